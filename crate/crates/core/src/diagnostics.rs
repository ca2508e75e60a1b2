//! Energy bookkeeping and structure-preservation certificates.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::discretization::{kinematic_strains, stored_energy_integral, Mesh, State};
use crate::error::Result;
use crate::integrator::Trajectory;
use crate::model::StringModel;

/// Split of the discrete Hamiltonian `Ĥ = T̂ + V_int + V_ext`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Energy {
    pub total: f64,
    pub kinetic: f64,
    pub internal: f64,
    pub external: f64,
}

/// Per-record energy quantities; the step quantities are zero for `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyRecord {
    pub t: f64,
    pub hamiltonian: f64,
    pub kinetic: f64,
    pub internal: f64,
    pub external: f64,
    /// `|Ĥₙ₊₁ - Ĥₙ|`
    pub increment: f64,
    /// `|Ĥₙ₊₁ - Ĥₙ - h ûₙ₊½·ŷₙ₊½|`
    pub power_residual: f64,
    pub kinematic_error: f64,
}

/// `Ĥ = ½v̂ᵀM_ρv̂ + ∫W(Cʰ)ds - r̂ᵀF_b(t)`.
pub fn hamiltonian(model: &StringModel, state: &State, t: f64) -> Result<Energy> {
    let kinetic = 0.5 * state.velocities.dot(&(&model.ops.mass * &state.velocities));
    let internal = stored_energy_integral(&model.mesh, &model.law, &state.strains)?;
    let external = -state.positions.dot(&model.ops.body_force_at(t));
    Ok(Energy {
        total: kinetic + internal + external,
        kinetic,
        internal,
        external,
    })
}

pub fn power_balance_residual(h_prev: f64, h_next: f64, input: &DVector<f64>, output: &DVector<f64>, h: f64) -> f64 {
    (h_next - h_prev - h * input.dot(output)).abs()
}

/// Both sides of the directionality identity `D̄Ĥ·(x̂ₙ₊₁ - x̂ₙ) = Ĥₙ₊₁ - Ĥₙ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Directionality {
    pub projected_gradient: f64,
    pub energy_difference: f64,
}

impl Directionality {
    pub fn defect(&self) -> f64 {
        (self.projected_gradient - self.energy_difference).abs()
    }

    pub fn relative_defect(&self) -> f64 {
        let scale = self.projected_gradient.abs().max(self.energy_difference.abs());
        if scale == 0.0 {
            0.0
        } else {
            self.defect() / scale
        }
    }
}

/// Evaluates the Greenspan discrete gradient of `Ĥ` over a step of size `h`
/// starting at `t_n` and compares its projection with the energy change.
pub fn directionality_check(
    model: &StringModel,
    state_n: &State,
    state_next: &State,
    t_n: f64,
    h: f64,
) -> Result<Directionality> {
    let mesh = &model.mesh;
    let dr = &state_next.positions - &state_n.positions;
    let dv = &state_next.velocities - &state_n.velocities;
    let v_mid = (&state_n.velocities + &state_next.velocities) * 0.5;

    let mut projected = -model.ops.body_force_at(t_n + 0.5 * h).dot(&dr);
    projected += (&model.ops.mass * v_mid).dot(&dv);
    for e in 0..mesh.n_elements() {
        let (c0, c1) = (state_n.strains[e], state_next.strains[e]);
        let g = model.law.greenspan_derivative(c0, c1, model.switch_tol)?;
        projected += model.ops.strain_mass[e] * g * (c1 - c0);
    }
    let energy_difference = hamiltonian(model, state_next, t_n + h)?.total - hamiltonian(model, state_n, t_n)?.total;
    Ok(Directionality {
        projected_gradient: projected,
        energy_difference,
    })
}

/// `maxₑ |Ĉₑ - |Δrₑ/ℓₑ|²|`.
pub fn kinematic_consistency(mesh: &Mesh, state: &State) -> f64 {
    kinematic_strains(mesh, &state.positions)
        .iter()
        .zip(state.strains.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// `max |ẑ·Jẑ| / (1 + |ẑ|²)` over `samples` random effort vectors.
pub fn skew_symmetry_defect(structure: &DMatrix<f64>, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = structure.nrows();
    (0..samples)
        .map(|_| {
            let z = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
            z.dot(&(structure * &z)).abs() / (1.0 + z.norm_squared())
        })
        .fold(0.0, f64::max)
}

pub fn skew_symmetry_check(model: &StringModel, state: &State) -> f64 {
    skew_symmetry_defect(&model.structure_matrix(state), 100, 0x5eed)
}

/// One energy record per trajectory point.
pub fn energy_records(model: &StringModel, trajectory: &Trajectory) -> Result<Vec<EnergyRecord>> {
    let mut records: Vec<EnergyRecord> = Vec::with_capacity(trajectory.points.len());
    for point in &trajectory.points {
        let energy = hamiltonian(model, &point.state, point.t)?;
        let (increment, power_residual) = match (records.last(), &point.ports) {
            (Some(prev), Some(ports)) => (
                (energy.total - prev.hamiltonian).abs(),
                power_balance_residual(prev.hamiltonian, energy.total, &ports.input, &ports.output, point.h),
            ),
            _ => (0.0, 0.0),
        };
        records.push(EnergyRecord {
            t: point.t,
            hamiltonian: energy.total,
            kinetic: energy.kinetic,
            internal: energy.internal,
            external: energy.external,
            increment,
            power_residual,
            kinematic_error: kinematic_consistency(&model.mesh, &point.state),
        });
    }
    Ok(records)
}
