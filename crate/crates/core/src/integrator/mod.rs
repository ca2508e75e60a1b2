//! One-step time integration of the semi-discrete string.
//!
//! Both schemes solve
//!
//! ```text
//! E (x̂ₙ₊₁ - x̂ₙ) = h J(x̂ₙ₊½) ẑₙ₊½ + h B ûₙ₊½
//! ```
//!
//! for `x̂ₙ₊₁` with Newton's method. They differ only in the strain effort:
//! the discrete-gradient scheme takes the Greenspan secant of `W`, which
//! makes the step energy-consistent, while the midpoint rule evaluates `W'`
//! at the averaged strain.

mod residual;
mod simulate;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

pub use simulate::{n_steps, simulate, simulate_model, Trajectory, TrajectoryPoint};

use crate::boundary::End;
use crate::discretization::State;
use crate::error::{Error, Result};
use crate::model::StringModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "dg")]
    DiscreteGradient,
    #[serde(rename = "midpoint")]
    Midpoint,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::DiscreteGradient => "dg",
            Scheme::Midpoint => "midpoint",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dg" | "discrete-gradient" => Ok(Scheme::DiscreteGradient),
            "midpoint" | "mp" => Ok(Scheme::Midpoint),
            other => Err(Error::Config(format!("unknown scheme `{other}` (expected dg or midpoint)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JacobianMode {
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSettings {
    pub h: f64,
    pub newton_tol: f64,
    pub max_iter: usize,
    pub scheme: Scheme,
    pub jacobian: JacobianMode,
}

impl StepSettings {
    pub fn new(h: f64, newton_tol: f64) -> Self {
        Self {
            h,
            newton_tol,
            max_iter: 20,
            scheme: Scheme::DiscreteGradient,
            jacobian: JacobianMode::Analytic,
        }
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let mut errors = Vec::new();
        if !(self.h > 0.0 && self.h.is_finite()) {
            errors.push(format!("time.h: must be positive, got {}", self.h));
        }
        if !(self.newton_tol > 0.0) {
            errors.push(format!("solver.newton_tol: must be positive, got {}", self.newton_tol));
        }
        if self.max_iter == 0 {
            errors.push("solver.max_iter: must be at least 1".to_string());
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errors))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepReport {
    /// Residual evaluations up to and including the one that met the
    /// tolerance.
    pub iterations: usize,
    /// Residual norm of the accepted state.
    pub final_residual_norm: f64,
    pub converged: bool,
}

/// Port quantities over one step, evaluated at the step midpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct PortValues {
    /// Stacked boundary forces `(left, right)`.
    pub input: DVector<f64>,
    /// Stacked boundary velocities `(left, right)`, zero at fixed ends.
    pub output: DVector<f64>,
    pub reactions: Vec<(End, Vec<f64>)>,
}

impl PortValues {
    /// Supplied power `û·ŷ`.
    pub fn power(&self) -> f64 {
        self.input.dot(&self.output)
    }
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub state: State,
    pub report: StepReport,
    pub ports: PortValues,
}

const MAX_BACKTRACKS: usize = 40;

impl StringModel {
    /// Advances `state_n` at time `t_n` by one step of size `settings.h`.
    ///
    /// Newton starts from the previous state and stops once the residual norm
    /// drops below `newton_tol`; the accepted state then receives one chord
    /// correction with the last Jacobian factorization. Updates that would
    /// make some element strain nonpositive are halved until admissible.
    pub fn step(&self, state_n: &State, settings: &StepSettings, t_n: f64) -> Result<StepOutcome> {
        let h = settings.h;
        let scheme = settings.scheme;
        let mut trial = state_n.clone();
        self.boundary.apply_dirichlet(&self.mesh, &mut trial);

        let mut report = StepReport {
            iterations: 0,
            final_residual_norm: f64::INFINITY,
            converged: false,
        };
        let mut last_lu = None;
        let mut res = DVector::zeros(0);
        for iter in 1..=settings.max_iter {
            res = self.residual(scheme, state_n, &trial, h, t_n)?;
            report.iterations = iter;
            report.final_residual_norm = res.norm();
            if report.final_residual_norm < settings.newton_tol {
                report.converged = true;
                break;
            }
            if iter == settings.max_iter {
                break;
            }
            let lu = self.newton_jacobian(scheme, state_n, &trial, h, t_n, settings.jacobian)?.lu();
            let delta = lu.solve(&(-&res)).ok_or(Error::SingularJacobian { iteration: iter })?;
            trial = self.admissible_update(&trial, &delta)?;
            last_lu = Some(lu);
        }
        if !report.converged {
            return Err(Error::NonConvergence(report));
        }
        // One chord correction with the last factorization drives the
        // residual from the tolerance down to roundoff, which keeps the
        // strain kinematically exact over long runs.
        if let Some(lu) = last_lu.filter(|_| report.final_residual_norm > 0.0) {
            if let Some(delta) = lu.solve(&(-&res)) {
                if let Ok(polished) = self.admissible_update(&trial, &delta) {
                    let norm = self.residual(scheme, state_n, &polished, h, t_n)?.norm();
                    if norm < report.final_residual_norm {
                        trial = polished;
                        report.final_residual_norm = norm;
                    }
                }
            }
        }
        self.boundary.apply_dirichlet(&self.mesh, &mut trial);
        let ports = self.port_values(scheme, state_n, &trial, h, t_n)?;
        Ok(StepOutcome {
            state: trial,
            report,
            ports,
        })
    }

    fn admissible_update(&self, trial: &State, delta: &DVector<f64>) -> Result<State> {
        let x = trial.to_stacked();
        let mut alpha = 1.0;
        for _ in 0..MAX_BACKTRACKS {
            let mut next = State::from_stacked(&self.mesh, &(&x + delta * alpha));
            if next.strains.iter().all(|&c| c > 0.0) {
                self.boundary.apply_dirichlet(&self.mesh, &mut next);
                return Ok(next);
            }
            alpha *= 0.5;
        }
        Err(Error::Domain {
            quantity: "element strain C in Newton update",
            value: (&x + delta).rows(2 * self.mesh.n_dofs(), self.mesh.n_elements()).min(),
        })
    }

    /// Midpoint input, collocated output and Dirichlet reactions of a step.
    pub fn port_values(
        &self,
        scheme: Scheme,
        state_n: &State,
        state_next: &State,
        h: f64,
        t_n: f64,
    ) -> Result<PortValues> {
        let d = self.dim();
        let n = self.mesh.n_dofs();
        let input = self.boundary.evaluate_input(t_n + 0.5 * h, d);
        let v_mid = (&state_n.velocities + &state_next.velocities) * 0.5;
        let output = self.ops.input_map.transpose_apply(&v_mid);
        let reactions = if self.boundary.has_dirichlet() {
            let res = self.unconstrained_residual(scheme, state_n, state_next, h, t_n)?;
            let momentum = res.rows(n, n).into_owned();
            self.boundary.reaction_forces(&self.mesh, &momentum, h)
        } else {
            Vec::new()
        };
        Ok(PortValues {
            input,
            output,
            reactions,
        })
    }
}

#[cfg(test)]
mod tests;
