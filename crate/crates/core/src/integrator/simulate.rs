use super::{PortValues, StepReport, StepSettings};
use crate::config::ScenarioConfig;
use crate::discretization::State;
use crate::error::{Error, Result};
use crate::model::StringModel;

#[derive(Debug, Clone)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub state: State,
    /// Size of the step that produced this point (zero for the initial point).
    pub h: f64,
    pub report: Option<StepReport>,
    pub ports: Option<PortValues>,
}

/// Accepted states from `t = 0` onwards, plus the error that stopped the run
/// early, if any.
#[derive(Debug)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    pub failure: Option<Error>,
}

impl Trajectory {
    pub fn is_complete(&self) -> bool {
        self.failure.is_none()
    }

    pub fn last_state(&self) -> &State {
        &self.points.last().expect("trajectory holds the initial state").state
    }

    pub fn reports(&self) -> impl Iterator<Item = &StepReport> {
        self.points.iter().filter_map(|p| p.report.as_ref())
    }
}

/// Number of steps needed to reach `duration`; the last step is shortened
/// when `duration` is not a multiple of `h`.
pub fn n_steps(duration: f64, h: f64) -> usize {
    if duration <= 0.0 {
        return 0;
    }
    let ratio = duration / h;
    let nearest = ratio.round();
    if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest as usize
    } else {
        ratio.ceil() as usize
    }
}

/// Runs a validated scenario to its end time.
pub fn simulate(config: &ScenarioConfig) -> Result<Trajectory> {
    let scenario = config.build()?;
    Ok(simulate_model(
        &scenario.model,
        scenario.initial,
        &scenario.settings,
        scenario.duration,
    ))
}

pub fn simulate_model(model: &StringModel, initial: State, settings: &StepSettings, duration: f64) -> Trajectory {
    let steps = n_steps(duration, settings.h);
    let mut points = Vec::with_capacity(steps + 1);
    let mut state = initial;
    model.boundary.apply_dirichlet(&model.mesh, &mut state);
    points.push(TrajectoryPoint {
        t: 0.0,
        state: state.clone(),
        h: 0.0,
        report: None,
        ports: None,
    });
    for n in 0..steps {
        let t_n = n as f64 * settings.h;
        let t_next = if n + 1 == steps { duration } else { (n + 1) as f64 * settings.h };
        let step_settings = StepSettings {
            h: t_next - t_n,
            ..*settings
        };
        match model.step(&state, &step_settings, t_n) {
            Ok(outcome) => {
                state = outcome.state;
                points.push(TrajectoryPoint {
                    t: t_next,
                    state: state.clone(),
                    h: step_settings.h,
                    report: Some(outcome.report),
                    ports: Some(outcome.ports),
                });
            }
            Err(err) => {
                log::error!("step {} at t = {t_n} failed: {err}", n + 1);
                return Trajectory {
                    points,
                    failure: Some(err),
                };
            }
        }
    }
    Trajectory { points, failure: None }
}
