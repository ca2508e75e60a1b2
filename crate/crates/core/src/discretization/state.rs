use nalgebra::DVector;

use super::Mesh;
use crate::error::{Error, Result};

/// Discrete state: nodal positions, nodal velocities and elementwise strains.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub positions: DVector<f64>,
    pub velocities: DVector<f64>,
    pub strains: DVector<f64>,
}

impl State {
    pub fn new(
        mesh: &Mesh,
        positions: DVector<f64>,
        velocities: DVector<f64>,
        strains: DVector<f64>,
    ) -> Result<Self> {
        let state = Self {
            positions,
            velocities,
            strains,
        };
        state.validate(mesh)?;
        Ok(state)
    }

    pub fn validate(&self, mesh: &Mesh) -> Result<()> {
        if self.positions.len() != mesh.n_dofs() || self.velocities.len() != mesh.n_dofs() {
            return Err(Error::Config(format!(
                "expected {} position/velocity entries, got {}/{}",
                mesh.n_dofs(),
                self.positions.len(),
                self.velocities.len()
            )));
        }
        if self.strains.len() != mesh.n_elements() {
            return Err(Error::Config(format!(
                "expected {} strain entries, got {}",
                mesh.n_elements(),
                self.strains.len()
            )));
        }
        if let Some(e) = self.strains.iter().position(|&c| !(c > 0.0)) {
            return Err(Error::Domain {
                quantity: "element strain C",
                value: self.strains[e],
            });
        }
        Ok(())
    }

    /// Length of the stacked state vector `[r; v; C]`.
    pub fn stacked_len(mesh: &Mesh) -> usize {
        2 * mesh.n_dofs() + mesh.n_elements()
    }

    pub fn to_stacked(&self) -> DVector<f64> {
        let n = self.positions.len();
        let m = self.strains.len();
        let mut x = DVector::zeros(2 * n + m);
        x.rows_mut(0, n).copy_from(&self.positions);
        x.rows_mut(n, n).copy_from(&self.velocities);
        x.rows_mut(2 * n, m).copy_from(&self.strains);
        x
    }

    /// Inverse of [`to_stacked`](Self::to_stacked); does not check strain positivity.
    pub fn from_stacked(mesh: &Mesh, x: &DVector<f64>) -> Self {
        let n = mesh.n_dofs();
        let m = mesh.n_elements();
        debug_assert_eq!(x.len(), 2 * n + m);
        Self {
            positions: x.rows(0, n).into_owned(),
            velocities: x.rows(n, n).into_owned(),
            strains: x.rows(2 * n, m).into_owned(),
        }
    }

    /// Average of two states, `(a + b) / 2` componentwise.
    pub fn midpoint(a: &State, b: &State) -> State {
        State {
            positions: (&a.positions + &b.positions) * 0.5,
            velocities: (&a.velocities + &b.velocities) * 0.5,
            strains: (&a.strains + &b.strains) * 0.5,
        }
    }

    /// Coordinates of node `i`.
    pub fn node_position(&self, mesh: &Mesh, node: usize) -> &[f64] {
        let d = mesh.dim();
        &self.positions.as_slice()[node * d..(node + 1) * d]
    }

    pub fn node_velocity(&self, mesh: &Mesh, node: usize) -> &[f64] {
        let d = mesh.dim();
        &self.velocities.as_slice()[node * d..(node + 1) * d]
    }
}
