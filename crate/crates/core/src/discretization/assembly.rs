//! Element integrals for linear nodal shape functions (positions, velocities)
//! and elementwise-constant fields (strain, stress).
//!
//! Every integral is evaluated with the two-point Gauss rule per element.

use nalgebra::{DMatrix, DVector};

use super::Mesh;
use crate::boundary::{BoundarySpec, InputMap};
use crate::error::{Error, Result};
use crate::material::MaterialLaw;
use crate::signal::Schedule;

const GAUSS_POINTS: [f64; 2] = [-0.577_350_269_189_625_8, 0.577_350_269_189_625_8];
const GAUSS_WEIGHTS: [f64; 2] = [1.0, 1.0];

/// Linear shape functions on the reference element `[-1, 1]`.
#[inline]
fn shape(xi: f64) -> [f64; 2] {
    [0.5 * (1.0 - xi), 0.5 * (1.0 + xi)]
}

/// Shape-function derivatives with respect to the arc length.
#[inline]
fn shape_ds(elem_len: f64) -> [f64; 2] {
    [-1.0 / elem_len, 1.0 / elem_len]
}

/// Consistent mass matrix `∫ Φᵀ ρA Φ ds`.
pub fn assemble_mass(mesh: &Mesh, rho_a: f64) -> DMatrix<f64> {
    let d = mesh.dim();
    let mut mass = DMatrix::zeros(mesh.n_dofs(), mesh.n_dofs());
    for (e, &len) in mesh.elem_lengths().iter().enumerate() {
        let mut block = [[0.0; 2]; 2];
        for (xi, w) in GAUSS_POINTS.iter().zip(GAUSS_WEIGHTS) {
            let n = shape(*xi);
            let jw = 0.5 * len * w;
            for a in 0..2 {
                for b in 0..2 {
                    block[a][b] += n[a] * rho_a * n[b] * jw;
                }
            }
        }
        for a in 0..2 {
            for b in 0..2 {
                for k in 0..d {
                    mass[(mesh.dof(e + a, k), mesh.dof(e + b, k))] += block[a][b];
                }
            }
        }
    }
    mass
}

/// Diagonal of `∫ Ψᵀ Ψ ds`, one entry per element.
pub fn assemble_strain_mass(mesh: &Mesh) -> DVector<f64> {
    DVector::from_iterator(
        mesh.n_elements(),
        mesh.elem_lengths().iter().map(|&len| {
            GAUSS_WEIGHTS.iter().map(|w| 0.5 * len * w).sum::<f64>()
        }),
    )
}

/// Consistent nodal load `∫ Φᵀ b ds` for a spatially constant body force.
pub fn assemble_body_force(mesh: &Mesh, density: &[f64]) -> DVector<f64> {
    assert_eq!(density.len(), mesh.dim(), "body force dimension mismatch");
    let mut load = DVector::zeros(mesh.n_dofs());
    for (e, &len) in mesh.elem_lengths().iter().enumerate() {
        for (xi, w) in GAUSS_POINTS.iter().zip(GAUSS_WEIGHTS) {
            let n = shape(*xi);
            let jw = 0.5 * len * w;
            for a in 0..2 {
                for (k, b) in density.iter().enumerate() {
                    load[mesh.dof(e + a, k)] += n[a] * b * jw;
                }
            }
        }
    }
    load
}

/// Position/strain coupling `K(r̂) = ∫ Φ,ₛᵀ Φ,ₛ r̂ Ψ ds` with one column per element.
pub fn assemble_tangent_coupling(mesh: &Mesh, positions: &DVector<f64>) -> DMatrix<f64> {
    let d = mesh.dim();
    let mut k = DMatrix::zeros(mesh.n_dofs(), mesh.n_elements());
    for (e, &len) in mesh.elem_lengths().iter().enumerate() {
        let dn = shape_ds(len);
        let (left, right) = mesh.element_dofs(e);
        // shape-function derivatives do not vary over the element
        for w in GAUSS_WEIGHTS {
            let jw = 0.5 * len * w;
            for c in 0..d {
                // ∂ₛr at the quadrature point, constant over the element
                let tangent = dn[0] * positions[left.start + c] + dn[1] * positions[right.start + c];
                k[(left.start + c, e)] += dn[0] * tangent * jw;
                k[(right.start + c, e)] += dn[1] * tangent * jw;
            }
        }
    }
    k
}

/// Matrix `A(g)` with `K(r̂)·g = A(g)·r̂`, i.e. the derivative of `K(r̂)g` with
/// respect to `r̂` for fixed elementwise weights `g`.
pub fn assemble_weighted_stiffness(mesh: &Mesh, weights: &DVector<f64>) -> DMatrix<f64> {
    let d = mesh.dim();
    let mut a = DMatrix::zeros(mesh.n_dofs(), mesh.n_dofs());
    for (e, &len) in mesh.elem_lengths().iter().enumerate() {
        let dn = shape_ds(len);
        let coef: f64 = GAUSS_WEIGHTS.iter().map(|w| 0.5 * len * w).sum::<f64>() * weights[e];
        for p in 0..2 {
            for q in 0..2 {
                for c in 0..d {
                    a[(mesh.dof(e + p, c), mesh.dof(e + q, c))] += dn[p] * dn[q] * coef;
                }
            }
        }
    }
    a
}

/// Element difference vector `r_{e+1} - r_e`.
pub fn element_difference(mesh: &Mesh, nodal: &DVector<f64>, e: usize) -> Vec<f64> {
    let (left, right) = mesh.element_dofs(e);
    left.zip(right).map(|(l, r)| nodal[r] - nodal[l]).collect()
}

/// Strain `|∂ₛr|²` per element for the given nodal positions.
pub fn kinematic_strains(mesh: &Mesh, positions: &DVector<f64>) -> DVector<f64> {
    DVector::from_iterator(
        mesh.n_elements(),
        (0..mesh.n_elements()).map(|e| {
            let len = mesh.element_length(e);
            element_difference(mesh, positions, e)
                .iter()
                .map(|dr| (dr / len) * (dr / len))
                .sum::<f64>()
        }),
    )
}

/// Elementwise strain consistent with the nodal positions.
///
/// Fails if an element is collapsed to a point (`C = 0`).
pub fn project_initial_strain(mesh: &Mesh, positions: &DVector<f64>) -> Result<DVector<f64>> {
    if positions.len() != mesh.n_dofs() {
        return Err(Error::Config(format!(
            "expected {} position entries, got {}",
            mesh.n_dofs(),
            positions.len()
        )));
    }
    let strains = kinematic_strains(mesh, positions);
    if let Some(e) = strains.iter().position(|&c| !(c > 0.0)) {
        log::warn!("element {e} is degenerate in the initial configuration");
        return Err(Error::Domain {
            quantity: "initial element strain C",
            value: strains[e],
        });
    }
    Ok(strains)
}

/// `∫ W(Cʰ) ds` for elementwise-constant strain.
pub fn stored_energy_integral(mesh: &Mesh, law: &MaterialLaw, strains: &DVector<f64>) -> Result<f64> {
    let mut total = 0.0;
    for (&len, &c) in mesh.elem_lengths().iter().zip(strains.iter()) {
        let w = law.stored_energy_density(c)?;
        for weight in GAUSS_WEIGHTS {
            total += w * 0.5 * len * weight;
        }
    }
    Ok(total)
}

/// Spatially constant body force per unit length, optionally scaled in time.
#[derive(Debug, Clone, PartialEq)]
pub struct BodyForce {
    pub density: Vec<f64>,
    pub schedule: Option<Schedule>,
}

impl BodyForce {
    pub fn constant(density: Vec<f64>) -> Self {
        Self {
            density,
            schedule: None,
        }
    }

    pub fn factor(&self, t: f64) -> f64 {
        self.schedule.as_ref().map_or(1.0, |s| s.eval(t))
    }

    pub fn is_constant(&self) -> bool {
        self.schedule.as_ref().is_none_or(Schedule::is_constant)
    }
}

/// All state-independent operators of the semi-discrete system.
#[derive(Debug, Clone)]
pub struct SystemOperators {
    pub mass: DMatrix<f64>,
    /// Diagonal of the strain mass matrix.
    pub strain_mass: DVector<f64>,
    /// Nodal body-force load for unit schedule factor.
    pub body_force: DVector<f64>,
    pub body_schedule: Option<Schedule>,
    pub input_map: InputMap,
}

impl SystemOperators {
    pub fn assemble(mesh: &Mesh, rho_a: f64, body: &BodyForce, boundary: &BoundarySpec) -> Result<Self> {
        if !(rho_a > 0.0 && rho_a.is_finite()) {
            return Err(Error::Config(format!("rhoA must be positive, got {rho_a}")));
        }
        if body.density.len() != mesh.dim() {
            return Err(Error::Config(format!(
                "body force has {} components, mesh dimension is {}",
                body.density.len(),
                mesh.dim()
            )));
        }
        boundary.check_dimension(mesh.dim())?;
        Ok(Self {
            mass: assemble_mass(mesh, rho_a),
            strain_mass: assemble_strain_mass(mesh),
            body_force: assemble_body_force(mesh, &body.density),
            body_schedule: body.schedule.clone(),
            input_map: InputMap::new(mesh, boundary),
        })
    }

    pub fn body_force_at(&self, t: f64) -> DVector<f64> {
        match &self.body_schedule {
            None => self.body_force.clone(),
            Some(s) => &self.body_force * s.eval(t),
        }
    }

    pub fn has_constant_body_force(&self) -> bool {
        self.body_schedule.as_ref().is_none_or(Schedule::is_constant)
    }
}
