//! Run driver and result files.
//!
//! A run writes `energy.csv`, `ports.csv`, `snapshots.csv`, `resolved.cfg`
//! and `manifest.json` into the output directory. Floats are printed with
//! 17 significant digits so that reruns are byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::boundary::End;
use crate::config::ScenarioConfig;
use crate::diagnostics::{energy_records, EnergyRecord};
use crate::error::{Error, Result};
use crate::integrator::{n_steps, simulate_model, Trajectory};
use crate::model::StringModel;

pub const ENERGY_FILE: &str = "energy.csv";
pub const PORTS_FILE: &str = "ports.csv";
pub const SNAPSHOTS_FILE: &str = "snapshots.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const RESOLVED_CONFIG_FILE: &str = "resolved.cfg";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NewtonStats {
    pub steps: usize,
    pub total_iterations: usize,
    pub max_iterations: usize,
    pub mean_iterations: f64,
    pub max_final_residual: f64,
}

impl NewtonStats {
    fn from_trajectory(trajectory: &Trajectory) -> Self {
        let mut stats = NewtonStats {
            steps: 0,
            total_iterations: 0,
            max_iterations: 0,
            mean_iterations: 0.0,
            max_final_residual: 0.0,
        };
        for report in trajectory.reports() {
            stats.steps += 1;
            stats.total_iterations += report.iterations;
            stats.max_iterations = stats.max_iterations.max(report.iterations);
            stats.max_final_residual = stats.max_final_residual.max(report.final_residual_norm);
        }
        if stats.steps > 0 {
            stats.mean_iterations = stats.total_iterations as f64 / stats.steps as f64;
        }
        stats
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub status: &'static str,
    pub scheme: &'static str,
    pub steps_planned: usize,
    pub steps_completed: usize,
    /// Index of the step that failed, counted from 1.
    pub failure_step: Option<usize>,
    pub failure_time: Option<f64>,
    pub failure_message: Option<String>,
    pub wall_time_seconds: f64,
    pub newton: NewtonStats,
    pub max_power_residual: f64,
    pub max_kinematic_error: f64,
    pub files: Vec<&'static str>,
    pub config: serde_json::Value,
}

/// Result of [`run`].
#[derive(Debug)]
pub struct RunSummary {
    pub directory: PathBuf,
    pub trajectory: Trajectory,
    pub records: Vec<EnergyRecord>,
    pub manifest: Manifest,
}

impl RunSummary {
    pub fn succeeded(&self) -> bool {
        self.trajectory.is_complete()
    }
}

/// Integrates the scenario and writes all result files into the configured
/// output directory. Solver failures are recorded in the manifest; the
/// partial trajectory is still written.
pub fn run(config: &ScenarioConfig) -> Result<RunSummary> {
    let scenario = config.build()?;
    let directory = config.output.directory.clone();
    let started = Instant::now();
    let trajectory = simulate_model(&scenario.model, scenario.initial, &scenario.settings, scenario.duration);
    let wall_time_seconds = started.elapsed().as_secs_f64();
    let records = energy_records(&scenario.model, &trajectory)?;

    let steps_completed = trajectory.points.len() - 1;
    let failure_step = trajectory.failure.as_ref().map(|_| steps_completed + 1);
    let manifest = Manifest {
        status: if trajectory.is_complete() { "completed" } else { "solver-failure" },
        scheme: config.solver.scheme.name(),
        steps_planned: n_steps(scenario.duration, scenario.settings.h),
        steps_completed,
        failure_step,
        failure_time: failure_step.map(|_| trajectory.points.last().map_or(0.0, |p| p.t)),
        failure_message: trajectory.failure.as_ref().map(Error::to_string),
        wall_time_seconds,
        newton: NewtonStats::from_trajectory(&trajectory),
        max_power_residual: records.iter().map(|r| r.power_residual).fold(0.0, f64::max),
        max_kinematic_error: records.iter().map(|r| r.kinematic_error).fold(0.0, f64::max),
        files: vec![ENERGY_FILE, PORTS_FILE, SNAPSHOTS_FILE, RESOLVED_CONFIG_FILE],
        config: config.to_json_value(),
    };

    fs::create_dir_all(&directory)?;
    write(&directory, ENERGY_FILE, &energy_csv(&records))?;
    write(&directory, PORTS_FILE, &ports_csv(&scenario.model, &trajectory))?;
    write(
        &directory,
        SNAPSHOTS_FILE,
        &snapshots_csv(&scenario.model, &trajectory, config.output.snapshot_stride),
    )?;
    write(&directory, RESOLVED_CONFIG_FILE, &config.to_toml_string())?;
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Config(e.to_string()))?;
    write(&directory, MANIFEST_FILE, &(json + "\n"))?;

    Ok(RunSummary {
        directory,
        trajectory,
        records,
        manifest,
    })
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::write(dir.join(name), contents)?;
    Ok(())
}

fn push_float(line: &mut String, x: f64) {
    write!(line, ",{x:.16e}").unwrap();
}

pub fn energy_csv(records: &[EnergyRecord]) -> String {
    let mut out = String::from("t,H,kinetic,internal,external,increment,power_residual,kinematic_error\n");
    for r in records {
        let mut line = format!("{:.16e}", r.t);
        for x in [
            r.hamiltonian,
            r.kinetic,
            r.internal,
            r.external,
            r.increment,
            r.power_residual,
            r.kinematic_error,
        ] {
            push_float(&mut line, x);
        }
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// One row per step: input and output at the step midpoint, reactions at
/// fixed ends and the Newton statistics.
pub fn ports_csv(model: &StringModel, trajectory: &Trajectory) -> String {
    let d = model.dim();
    let fixed: Vec<End> = model.boundary.fixed_ends().collect();
    let mut header = vec!["t_start".to_string(), "t_end".to_string()];
    for prefix in ["u", "y"] {
        for end in End::BOTH {
            header.extend((0..d).map(|c| format!("{prefix}_{}_{c}", end.name())));
        }
    }
    for end in &fixed {
        header.extend((0..d).map(|c| format!("reaction_{}_{c}", end.name())));
    }
    header.extend(["newton_iterations".to_string(), "residual_norm".to_string()]);
    let mut out = header.join(",") + "\n";

    for pair in trajectory.points.windows(2) {
        let (prev, point) = (&pair[0], &pair[1]);
        let (Some(ports), Some(report)) = (&point.ports, &point.report) else {
            continue;
        };
        let mut line = format!("{:.16e}", prev.t);
        push_float(&mut line, point.t);
        for x in ports.input.iter().chain(ports.output.iter()) {
            push_float(&mut line, *x);
        }
        for end in &fixed {
            let force = ports
                .reactions
                .iter()
                .find(|(e, _)| e == end)
                .map(|(_, f)| f.clone())
                .unwrap_or_else(|| vec![0.0; d]);
            for x in force {
                push_float(&mut line, x);
            }
        }
        write!(line, ",{}", report.iterations).unwrap();
        push_float(&mut line, report.final_residual_norm);
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Nodal positions every `stride` steps; the last accepted state is always
/// included.
pub fn snapshots_csv(model: &StringModel, trajectory: &Trajectory, stride: usize) -> String {
    let d = model.dim();
    let mut header = vec!["step".to_string(), "t".to_string()];
    for i in 0..model.mesh.n_nodes() {
        header.extend((0..d).map(|c| format!("r_{i}_{c}")));
    }
    let mut out = header.join(",") + "\n";
    let last = trajectory.points.len() - 1;
    for (n, point) in trajectory.points.iter().enumerate() {
        if n % stride != 0 && n != last {
            continue;
        }
        let mut line = format!("{n},{:.16e}", point.t);
        for x in point.state.positions.iter() {
            push_float(&mut line, *x);
        }
        out.push_str(&line);
        out.push('\n');
    }
    out
}
