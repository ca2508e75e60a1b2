use nalgebra::{DMatrix, DVector};

use crate::boundary::BoundarySpec;
use crate::discretization::{assemble_tangent_coupling, BodyForce, Mesh, State, SystemOperators};
use crate::error::Result;
use crate::material::{MaterialLaw, DEFAULT_SWITCH_TOL};

/// A discretized string: mesh, material, assembled operators and boundary data.
#[derive(Debug, Clone)]
pub struct StringModel {
    pub mesh: Mesh,
    pub law: MaterialLaw,
    pub rho_a: f64,
    pub body: BodyForce,
    pub ops: SystemOperators,
    pub boundary: BoundarySpec,
    /// Relative gap below which the Greenspan secant falls back to the midpoint slope.
    pub switch_tol: f64,
}

impl StringModel {
    pub fn new(
        mesh: Mesh,
        law: MaterialLaw,
        rho_a: f64,
        body: BodyForce,
        boundary: BoundarySpec,
    ) -> Result<Self> {
        let ops = SystemOperators::assemble(&mesh, rho_a, &body, &boundary)?;
        if !body.is_constant() {
            log::warn!("time-varying body force: the discrete energy balance is not exact");
        }
        Ok(Self {
            mesh,
            law,
            rho_a,
            body,
            ops,
            boundary,
            switch_tol: DEFAULT_SWITCH_TOL,
        })
    }

    pub fn with_switch_tol(mut self, switch_tol: f64) -> Self {
        self.switch_tol = switch_tol;
        self
    }

    pub fn dim(&self) -> usize {
        self.mesh.dim()
    }

    /// Size of the stacked state `[r̂; v̂; Ĉ]`.
    pub fn n_state(&self) -> usize {
        State::stacked_len(&self.mesh)
    }

    /// Skew-symmetric structure matrix `J(x̂)` acting on efforts `(∂H/∂r̂, v̂, Ŝ/2)`.
    pub fn structure_matrix(&self, state: &State) -> DMatrix<f64> {
        let n = self.mesh.n_dofs();
        let m = self.mesh.n_elements();
        let k = assemble_tangent_coupling(&self.mesh, &state.positions);
        let mut j = DMatrix::zeros(2 * n + m, 2 * n + m);
        for i in 0..n {
            j[(i, n + i)] = 1.0;
            j[(n + i, i)] = -1.0;
        }
        j.view_mut((n, 2 * n), (n, m)).copy_from(&(&k * -2.0));
        j.view_mut((2 * n, n), (m, n)).copy_from(&(k.transpose() * 2.0));
        j
    }

    /// Block-diagonal descriptor matrix `E = diag(I, M_ρ, M_S)`.
    pub fn descriptor_matrix(&self) -> DMatrix<f64> {
        let n = self.mesh.n_dofs();
        let m = self.mesh.n_elements();
        let mut e = DMatrix::zeros(2 * n + m, 2 * n + m);
        e.view_mut((0, 0), (n, n)).fill_with_identity();
        e.view_mut((n, n), (n, n)).copy_from(&self.ops.mass);
        e.view_mut((2 * n, 2 * n), (m, m)).set_diagonal(&self.ops.strain_mass);
        e
    }

    /// Total linear momentum `Σ (M_ρ v̂)` per spatial component.
    pub fn linear_momentum(&self, velocities: &DVector<f64>) -> Vec<f64> {
        let p = &self.ops.mass * velocities;
        let d = self.dim();
        (0..d)
            .map(|c| (0..self.mesh.n_nodes()).map(|i| p[i * d + c]).sum())
            .collect()
    }
}
