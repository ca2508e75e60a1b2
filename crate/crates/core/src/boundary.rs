//! Boundary conditions at the two string ends.
//!
//! Each end is either fixed in space (Dirichlet) or loaded by a prescribed
//! contact force (Neumann). Inputs and outputs are stacked per end as
//! `(left, right)` blocks of `d` components; the block of a fixed end is
//! inactive and stays zero. The left input is `-n(0, t)` and the right input
//! is `n(L, t)`, so both enter the momentum balance with a plus sign.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::discretization::{Mesh, State};
use crate::error::{Error, Result};
use crate::signal::InputSignal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum End {
    Left,
    Right,
}

impl End {
    pub const BOTH: [End; 2] = [End::Left, End::Right];

    pub fn node(self, mesh: &Mesh) -> usize {
        match self {
            End::Left => 0,
            End::Right => mesh.last_node(),
        }
    }

    fn slot(self) -> usize {
        match self {
            End::Left => 0,
            End::Right => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            End::Left => "left",
            End::Right => "right",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum EndCondition {
    Fixed { position: Vec<f64> },
    Force { signal: InputSignal },
}

impl EndCondition {
    pub fn free() -> Self {
        EndCondition::Force {
            signal: InputSignal::Zero,
        }
    }

    pub fn is_fixed(&self) -> bool {
        matches!(self, EndCondition::Fixed { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySpec {
    pub left: EndCondition,
    pub right: EndCondition,
}

impl BoundarySpec {
    pub fn free_floating() -> Self {
        Self {
            left: EndCondition::free(),
            right: EndCondition::free(),
        }
    }

    pub fn end(&self, end: End) -> &EndCondition {
        match end {
            End::Left => &self.left,
            End::Right => &self.right,
        }
    }

    pub fn fixed_ends(&self) -> impl Iterator<Item = End> + '_ {
        End::BOTH.into_iter().filter(|&e| self.end(e).is_fixed())
    }

    pub fn has_dirichlet(&self) -> bool {
        self.fixed_ends().next().is_some()
    }

    /// Both ends force-loaded: rigid motions are unconstrained.
    pub fn is_free_floating(&self) -> bool {
        !self.has_dirichlet()
    }

    /// True if no force input can ever act on the string.
    pub fn inputs_vanish(&self) -> bool {
        End::BOTH.into_iter().all(|e| match self.end(e) {
            EndCondition::Fixed { .. } => true,
            EndCondition::Force { signal } => signal.is_zero(),
        })
    }

    pub fn check_dimension(&self, dim: usize) -> Result<()> {
        let mut errors = Vec::new();
        self.validate(dim, "boundary", &mut errors);
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errors))
        }
    }

    pub fn validate(&self, dim: usize, path: &str, errors: &mut Vec<String>) {
        for end in End::BOTH {
            let p = format!("{path}.{}", end.name());
            match self.end(end) {
                EndCondition::Fixed { position } => {
                    if position.len() != dim {
                        errors.push(format!("{p}.position: expected {dim} components, got {}", position.len()));
                    }
                }
                EndCondition::Force { signal } => signal.validate(dim, &format!("{p}.signal"), errors),
            }
        }
    }

    /// Stacked boundary-force input `u(t)`; zero in the blocks of fixed ends.
    pub fn evaluate_input(&self, t: f64, dim: usize) -> DVector<f64> {
        let mut u = DVector::zeros(2 * dim);
        for end in End::BOTH {
            if let EndCondition::Force { signal } = self.end(end) {
                let f = signal.eval(t, dim);
                u.rows_mut(end.slot() * dim, dim).copy_from_slice(&f);
            }
        }
        u
    }

    /// Pinned position DOFs with their prescribed values.
    pub fn dirichlet_dofs(&self, mesh: &Mesh) -> Vec<(usize, f64)> {
        let mut dofs = Vec::new();
        for end in self.fixed_ends() {
            if let EndCondition::Fixed { position } = self.end(end) {
                let node = end.node(mesh);
                dofs.extend(position.iter().enumerate().map(|(c, &x)| (mesh.dof(node, c), x)));
            }
        }
        dofs
    }

    /// Sets the positions of fixed nodes to their prescribed values and their
    /// velocities to zero.
    pub fn apply_dirichlet(&self, mesh: &Mesh, state: &mut State) {
        for (dof, value) in self.dirichlet_dofs(mesh) {
            state.positions[dof] = value;
            state.velocities[dof] = 0.0;
        }
    }

    /// Replaces the residual rows of pinned DOFs by the constraint violation
    /// of the trial state. `residual` is stacked as `[r; v; C]`.
    pub fn apply_dirichlet_residual(&self, mesh: &Mesh, trial: &State, residual: &mut DVector<f64>) {
        let n = mesh.n_dofs();
        for (dof, value) in self.dirichlet_dofs(mesh) {
            residual[dof] = trial.positions[dof] - value;
            residual[n + dof] = trial.velocities[dof];
        }
    }

    /// Replaces the Jacobian rows of pinned DOFs by unit rows.
    pub fn apply_dirichlet_jacobian(&self, mesh: &Mesh, jacobian: &mut DMatrix<f64>) {
        let n = mesh.n_dofs();
        for (dof, _) in self.dirichlet_dofs(mesh) {
            for row in [dof, n + dof] {
                jacobian.row_mut(row).fill(0.0);
                jacobian[(row, row)] = 1.0;
            }
        }
    }

    /// Collocated output `y = Bᵀ v̂`: nodal velocities of force-loaded ends.
    pub fn extract_output(&self, mesh: &Mesh, velocities: &DVector<f64>) -> DVector<f64> {
        InputMap::new(mesh, self).transpose_apply(velocities)
    }

    /// Dirichlet reaction forces from the unconstrained momentum residual
    /// `M(v̂ₙ₊₁ - v̂ₙ) - h(F_b - K Ŝ) - hBû` of a step of size `h`.
    ///
    /// The returned force is the one the support exerts on the string.
    pub fn reaction_forces(
        &self,
        mesh: &Mesh,
        momentum_residual: &DVector<f64>,
        h: f64,
    ) -> Vec<(End, Vec<f64>)> {
        let d = mesh.dim();
        self.fixed_ends()
            .map(|end| {
                let node = end.node(mesh);
                let f = (0..d)
                    .map(|c| if h > 0.0 { momentum_residual[mesh.dof(node, c)] / h } else { 0.0 })
                    .collect();
                (end, f)
            })
            .collect()
    }
}

/// Input map `B_v̂` from the stacked `(left, right)` force slots to nodal
/// momentum DOFs. Slots of fixed ends map to nothing.
#[derive(Debug, Clone, PartialEq)]
pub struct InputMap {
    dim: usize,
    n_dofs: usize,
    /// Node receiving each slot, if the slot is active.
    targets: [Option<usize>; 2],
}

impl InputMap {
    pub fn new(mesh: &Mesh, spec: &BoundarySpec) -> Self {
        let target = |end: End| (!spec.end(end).is_fixed()).then(|| end.node(mesh));
        Self {
            dim: mesh.dim(),
            n_dofs: mesh.n_dofs(),
            targets: [target(End::Left), target(End::Right)],
        }
    }

    pub fn n_inputs(&self) -> usize {
        2 * self.dim
    }

    pub fn apply(&self, u: &DVector<f64>) -> DVector<f64> {
        let mut f = DVector::zeros(self.n_dofs);
        for (slot, target) in self.targets.iter().enumerate() {
            if let Some(node) = target {
                for c in 0..self.dim {
                    f[node * self.dim + c] += u[slot * self.dim + c];
                }
            }
        }
        f
    }

    pub fn transpose_apply(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut y = DVector::zeros(2 * self.dim);
        for (slot, target) in self.targets.iter().enumerate() {
            if let Some(node) = target {
                for c in 0..self.dim {
                    y[slot * self.dim + c] = v[node * self.dim + c];
                }
            }
        }
        y
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let mut b = DMatrix::zeros(self.n_dofs, 2 * self.dim);
        for (slot, target) in self.targets.iter().enumerate() {
            if let Some(node) = target {
                for c in 0..self.dim {
                    b[(node * self.dim + c, slot * self.dim + c)] = 1.0;
                }
            }
        }
        b
    }
}
