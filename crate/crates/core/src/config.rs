//! Scenario configuration.
//!
//! Scenarios are written in TOML. Every field is checked and all problems
//! are reported together, each prefixed by its dotted path:
//!
//! ```toml
//! rhoA = 1.0
//! body_force = [0.0, -9.81]
//!
//! [geometry]
//! L = 1.0
//! n_el = 30
//! d = 2
//!
//! [material]
//! kind = "hyperelastic"
//! EA = 20.0
//!
//! [boundary.left]
//! type = "fixed"
//! position = [0.0, 0.0]
//!
//! [boundary.right]
//! type = "force"
//! signal = { kind = "half-sine", amplitude = [1.0, 1.0], duration = 0.2 }
//!
//! [initial]
//! C0 = "consistent"
//! r0 = { type = "line", origin = [0.0, 0.0], direction = [0.7071, -0.7071] }
//!
//! [time]
//! h = 0.01
//! T = 1.0
//! ```

use std::path::{Path, PathBuf};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::boundary::{BoundarySpec, EndCondition};
use crate::diagnostics::kinematic_consistency;
use crate::discretization::{project_initial_strain, BodyForce, Mesh, State};
use crate::error::{Error, Result};
use crate::integrator::{JacobianMode, Scheme, StepSettings};
use crate::material::{MaterialKind, MaterialLaw, DEFAULT_SWITCH_TOL};
use crate::model::StringModel;
use crate::signal::{InputSignal, Schedule};

/// Largest strain mismatch accepted for explicit initial strain tables.
pub const INITIAL_STRAIN_TOL: f64 = 1e-12;

/// Nodal field given in closed form or as a table of node values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum FieldInit {
    /// `origin + s·direction`
    Line { origin: Vec<f64>, direction: Vec<f64> },
    Uniform { value: Vec<f64> },
    /// One row of `d` values per node.
    Table { values: Vec<Vec<f64>> },
}

impl FieldInit {
    fn validate(&self, dim: usize, n_nodes: Option<usize>, path: &str, errors: &mut Vec<String>) {
        let mut check = |name: &str, v: &[f64]| {
            if v.len() != dim {
                errors.push(format!("{path}.{name}: expected {dim} components, got {}", v.len()));
            }
        };
        match self {
            FieldInit::Line { origin, direction } => {
                check("origin", origin);
                check("direction", direction);
            }
            FieldInit::Uniform { value } => check("value", value),
            FieldInit::Table { values } => {
                if let Some(n) = n_nodes {
                    if values.len() != n {
                        errors.push(format!("{path}.values: expected {n} rows (one per node), got {}", values.len()));
                    }
                }
                if values.iter().any(|row| row.len() != dim) {
                    errors.push(format!("{path}.values: every row needs {dim} components"));
                }
            }
        }
    }

    fn nodal_values(&self, mesh: &Mesh) -> DVector<f64> {
        let d = mesh.dim();
        let mut out = DVector::zeros(mesh.n_dofs());
        for (i, &s) in mesh.node_coords().iter().enumerate() {
            for c in 0..d {
                out[i * d + c] = match self {
                    FieldInit::Line { origin, direction } => origin[c] + s * direction[c],
                    FieldInit::Uniform { value } => value[c],
                    FieldInit::Table { values } => values[i][c],
                };
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StrainInit {
    /// Strain computed from the initial positions.
    Consistent,
    Table(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub length: f64,
    pub n_el: usize,
    pub dim: usize,
    pub node_coords: Option<Vec<f64>>,
}

impl Geometry {
    pub fn mesh(&self) -> Result<Mesh> {
        match &self.node_coords {
            Some(nodes) => Mesh::from_nodes(nodes.clone(), self.dim),
            None => Mesh::uniform(self.length, self.n_el, self.dim),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialConditions {
    pub positions: FieldInit,
    pub velocities: FieldInit,
    pub strains: StrainInit,
    pub allow_inconsistent: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub h: f64,
    pub duration: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub newton_tol: f64,
    pub max_iter: usize,
    pub scheme: Scheme,
    pub jacobian: JacobianMode,
    pub switch_tol: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            newton_tol: 1e-11,
            max_iter: 20,
            scheme: Scheme::DiscreteGradient,
            jacobian: JacobianMode::Analytic,
            switch_tol: DEFAULT_SWITCH_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSettings {
    pub directory: PathBuf,
    pub snapshot_stride: usize,
}

impl Default for OutputSettings {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("output"),
            snapshot_stride: 1,
        }
    }
}

/// A fully validated scenario description.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub geometry: Geometry,
    pub material: MaterialLaw,
    pub rho_a: f64,
    pub body_force: BodyForce,
    pub boundary: BoundarySpec,
    pub initial: InitialConditions,
    pub time: TimeGrid,
    pub solver: SolverSettings,
    pub output: OutputSettings,
}

/// A scenario ready to integrate.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub model: StringModel,
    pub initial: State,
    pub settings: StepSettings,
    pub duration: f64,
}

impl ScenarioConfig {
    pub fn step_settings(&self) -> StepSettings {
        StepSettings {
            h: self.time.h,
            newton_tol: self.solver.newton_tol,
            max_iter: self.solver.max_iter,
            scheme: self.solver.scheme,
            jacobian: self.solver.jacobian,
        }
    }

    /// Assembles the model and the initial state.
    pub fn build(&self) -> Result<Scenario> {
        let mesh = self.geometry.mesh()?;
        let mut errors = Vec::new();
        let n_nodes = Some(mesh.n_nodes());
        self.initial.positions.validate(mesh.dim(), n_nodes, "initial.r0", &mut errors);
        self.initial.velocities.validate(mesh.dim(), n_nodes, "initial.v0", &mut errors);
        if let StrainInit::Table(values) = &self.initial.strains {
            if values.len() != mesh.n_elements() {
                errors.push(format!(
                    "initial.C0.values: expected {} entries (one per element), got {}",
                    mesh.n_elements(),
                    values.len()
                ));
            }
        }
        if !errors.is_empty() {
            return Err(Error::Validation(errors));
        }

        let positions = self.initial.positions.nodal_values(&mesh);
        let velocities = self.initial.velocities.nodal_values(&mesh);
        let strains = match &self.initial.strains {
            StrainInit::Consistent => project_initial_strain(&mesh, &positions)?,
            StrainInit::Table(values) => DVector::from_column_slice(values),
        };
        let initial = State::new(&mesh, positions, velocities, strains)?;
        let mismatch = kinematic_consistency(&mesh, &initial);
        if mismatch > INITIAL_STRAIN_TOL {
            if self.initial.allow_inconsistent {
                log::warn!("initial strain differs from the kinematic strain by {mismatch:.3e}");
            } else {
                return Err(Error::Validation(vec![format!(
                    "initial.C0: inconsistent with r0 (max mismatch {mismatch:.3e}); set initial.allow_inconsistent = true to override"
                )]));
            }
        }

        let model = StringModel::new(mesh, self.material, self.rho_a, self.body_force.clone(), self.boundary.clone())?
            .with_switch_tol(self.solver.switch_tol);
        let settings = self.step_settings();
        settings.validate()?;
        Ok(Scenario {
            model,
            initial,
            settings,
            duration: self.time.duration,
        })
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        raw.validate()
    }

    /// Resolved configuration as TOML; reloads to an equal config.
    pub fn to_toml_string(&self) -> String {
        toml::to_string(&RawConfig::from(self)).expect("configuration serializes to TOML")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(RawConfig::from(self)).expect("configuration serializes to JSON")
    }

    pub fn set_steps(&mut self, steps: usize) {
        self.time.duration = steps as f64 * self.time.h;
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    ScenarioConfig::from_toml_str(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Names of the scenarios shipped with the crate.
pub const BUILTIN_SCENARIOS: [&str; 3] = ["pendulum", "free-fall", "static-hang"];

pub fn builtin(name: &str) -> Result<ScenarioConfig> {
    match name {
        "pendulum" => Ok(pendulum()),
        "free-fall" => Ok(free_fall()),
        "static-hang" => static_hang(),
        other => Err(Error::Config(format!(
            "unknown scenario `{other}` (available: {})",
            BUILTIN_SCENARIOS.join(", ")
        ))),
    }
}

/// Rubber string pendulum: left end pinned at the origin, released from the
/// diagonal under gravity and kicked at the right end by a half-sine force
/// during the first 0.2 s.
///
/// `EA = 20 N` and `ρA = 1 kg/m` follow from `E = 18400 N/m²`,
/// `ρ = 920 kg/m³` and a circular section of radius `0.0186 m`.
pub fn pendulum() -> ScenarioConfig {
    let rho_a = 1.0;
    let c = std::f64::consts::FRAC_1_SQRT_2;
    ScenarioConfig {
        geometry: Geometry {
            length: 1.0,
            n_el: 30,
            dim: 2,
            node_coords: None,
        },
        material: MaterialLaw::hyperelastic(20.0).unwrap(),
        rho_a,
        body_force: BodyForce::constant(vec![0.0, -9.81 * rho_a]),
        boundary: BoundarySpec {
            left: EndCondition::Fixed {
                position: vec![0.0, 0.0],
            },
            right: EndCondition::Force {
                signal: InputSignal::HalfSine {
                    amplitude: vec![rho_a, rho_a],
                    duration: 0.2,
                },
            },
        },
        initial: InitialConditions {
            positions: FieldInit::Line {
                origin: vec![0.0, 0.0],
                direction: vec![c, -c],
            },
            velocities: FieldInit::Uniform { value: vec![0.0, 0.0] },
            strains: StrainInit::Consistent,
            allow_inconsistent: false,
        },
        time: TimeGrid { h: 1e-2, duration: 1.0 },
        solver: SolverSettings::default(),
        output: OutputSettings {
            directory: PathBuf::from("output/pendulum"),
            snapshot_stride: 10,
        },
    }
}

/// Unloaded horizontal string falling freely; it translates rigidly with
/// acceleration `b/ρA`.
pub fn free_fall() -> ScenarioConfig {
    let mut cfg = pendulum();
    cfg.geometry.n_el = 4;
    cfg.boundary = BoundarySpec::free_floating();
    cfg.initial.positions = FieldInit::Line {
        origin: vec![0.0, 0.0],
        direction: vec![1.0, 0.0],
    };
    cfg.output.directory = PathBuf::from("output/free-fall");
    cfg.output.snapshot_stride = 10;
    cfg
}

/// String hanging from a pinned top end in discrete static equilibrium.
pub fn static_hang() -> Result<ScenarioConfig> {
    let mut cfg = pendulum();
    cfg.geometry.n_el = 10;
    cfg.boundary.right = EndCondition::free();
    let mesh = cfg.geometry.mesh()?;
    let weights = crate::discretization::assemble_body_force(&mesh, &cfg.body_force.density);
    let n_el = mesh.n_elements();
    // element e carries the weight of all nodes below it
    let mut rows = vec![vec![0.0, 0.0]; mesh.n_nodes()];
    let mut y = 0.0;
    for e in 0..n_el {
        let load: f64 = ((e + 1)..mesh.n_nodes()).map(|j| -weights[2 * j + 1]).sum();
        let stretch = equilibrium_stretch(&cfg.material, load)?;
        y -= stretch * mesh.element_length(e);
        rows[e + 1] = vec![0.0, y];
    }
    cfg.initial.positions = FieldInit::Table { values: rows };
    cfg.output.directory = PathBuf::from("output/static-hang");
    Ok(cfg)
}

/// Stretch `ν ≥ 1` at which the law carries the given tension.
pub fn equilibrium_stretch(law: &MaterialLaw, tension: f64) -> Result<f64> {
    let (mut lo, mut hi) = (1.0, 2.0);
    while law.tension(hi)? < tension {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if law.tension(mid)? < tension {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

// Serialized form: every field optional so that all problems can be reported.

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(rename = "rhoA", skip_serializing_if = "Option::is_none")]
    rho_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    body_force: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    body_force_schedule: Option<Vec<[f64; 2]>>,
    geometry: Option<RawGeometry>,
    material: Option<RawMaterial>,
    boundary: Option<RawBoundary>,
    initial: Option<RawInitial>,
    time: Option<RawTime>,
    solver: Option<RawSolver>,
    output: Option<RawOutput>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    #[serde(rename = "L")]
    length: Option<f64>,
    n_el: Option<i64>,
    d: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    node_coords: Option<Vec<f64>>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMaterial {
    kind: Option<String>,
    #[serde(rename = "EA")]
    axial_stiffness: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBoundary {
    left: Option<EndCondition>,
    right: Option<EndCondition>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum RawStrainInit {
    Keyword(String),
    Table { values: Vec<f64> },
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    #[serde(rename = "C0", skip_serializing_if = "Option::is_none")]
    strains: Option<RawStrainInit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    allow_inconsistent: Option<bool>,
    r0: Option<FieldInit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    v0: Option<FieldInit>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTime {
    h: Option<f64>,
    #[serde(rename = "T")]
    duration: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    newton_tol: Option<f64>,
    max_iter: Option<i64>,
    scheme: Option<Scheme>,
    jacobian: Option<JacobianMode>,
    switch_tol: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    directory: Option<PathBuf>,
    snapshot_stride: Option<i64>,
}

fn require<T: Clone>(value: &Option<T>, path: &str, errors: &mut Vec<String>) -> Option<T> {
    if value.is_none() {
        errors.push(format!("{path}: missing"));
    }
    value.clone()
}

fn positive(value: Option<f64>, path: &str, errors: &mut Vec<String>) -> Option<f64> {
    match value {
        Some(v) if v > 0.0 && v.is_finite() => Some(v),
        Some(v) => {
            errors.push(format!("{path}: must be positive, got {v}"));
            None
        }
        None => None,
    }
}

impl RawConfig {
    fn validate(self) -> Result<ScenarioConfig> {
        let mut errors = Vec::new();
        let e = &mut errors;

        let geometry = self.geometry.unwrap_or_default();
        let length = positive(require(&geometry.length, "geometry.L", e), "geometry.L", e);
        let n_el = match require(&geometry.n_el, "geometry.n_el", e) {
            Some(n) if n >= 1 => Some(n as usize),
            Some(n) => {
                e.push(format!("geometry.n_el: must be at least 1, got {n}"));
                None
            }
            None => None,
        };
        let dim = match require(&geometry.d, "geometry.d", e) {
            Some(d) if (1..=3).contains(&d) => Some(d as usize),
            Some(d) => {
                e.push(format!("geometry.d: must be 1, 2 or 3, got {d}"));
                None
            }
            None => None,
        };
        if let (Some(nodes), Some(n), Some(len)) = (&geometry.node_coords, n_el, length) {
            if nodes.len() != n + 1 {
                e.push(format!("geometry.node_coords: expected {} entries, got {}", n + 1, nodes.len()));
            } else if nodes[0] != 0.0 || nodes[n] != len || nodes.windows(2).any(|w| !(w[1] > w[0])) {
                e.push("geometry.node_coords: must increase strictly from 0 to L".to_string());
            }
        }

        let material = self.material.unwrap_or_default();
        let kind = require(&material.kind, "material.kind", e).and_then(|k| match k.parse::<MaterialKind>() {
            Ok(kind) => Some(kind),
            Err(err) => {
                e.push(format!("material.kind: {err}"));
                None
            }
        });
        let ea = positive(
            require(&material.axial_stiffness, "material.EA", e),
            "material.EA",
            e,
        );
        let rho_a = positive(require(&self.rho_a, "rhoA", e), "rhoA", e);

        let body_density = self.body_force.clone().unwrap_or_else(|| vec![0.0; dim.unwrap_or(0)]);
        if let Some(d) = dim {
            if body_density.len() != d {
                e.push(format!("body_force: expected {d} components, got {}", body_density.len()));
            }
        }
        let schedule = match self.body_force_schedule {
            Some(points) => match Schedule::new(points) {
                Ok(s) => Some(s),
                Err(err) => {
                    e.push(format!("body_force_schedule: {err}"));
                    None
                }
            },
            None => None,
        };

        let boundary = self.boundary.unwrap_or_default();
        let left = require(&boundary.left, "boundary.left", e);
        let right = require(&boundary.right, "boundary.right", e);
        let boundary = match (left, right) {
            (Some(left), Some(right)) => {
                let spec = BoundarySpec { left, right };
                if let Some(d) = dim {
                    spec.validate(d, "boundary", e);
                }
                Some(spec)
            }
            _ => None,
        };

        let initial = self.initial.unwrap_or_default();
        let positions = require(&initial.r0, "initial.r0", e);
        let velocities = initial.v0.clone().unwrap_or(FieldInit::Uniform {
            value: vec![0.0; dim.unwrap_or(0)],
        });
        let strains = match &initial.strains {
            None => Some(StrainInit::Consistent),
            Some(RawStrainInit::Keyword(k)) if k == "consistent" => Some(StrainInit::Consistent),
            Some(RawStrainInit::Keyword(k)) => {
                e.push(format!("initial.C0: expected \"consistent\" or a table, got \"{k}\""));
                None
            }
            Some(RawStrainInit::Table { values }) => {
                if values.iter().any(|&c| !(c > 0.0)) {
                    e.push("initial.C0.values: strains must be positive".to_string());
                }
                Some(StrainInit::Table(values.clone()))
            }
        };
        if let Some(d) = dim {
            let n_nodes = n_el.map(|n| n + 1);
            if let Some(p) = &positions {
                p.validate(d, n_nodes, "initial.r0", e);
            }
            velocities.validate(d, n_nodes, "initial.v0", e);
        }

        let time = self.time.unwrap_or_default();
        let h = positive(require(&time.h, "time.h", e), "time.h", e);
        let duration = match require(&time.duration, "time.T", e) {
            Some(t) if t >= 0.0 && t.is_finite() => Some(t),
            Some(t) => {
                e.push(format!("time.T: must be nonnegative, got {t}"));
                None
            }
            None => None,
        };

        let solver_raw = self.solver.unwrap_or_default();
        let defaults = SolverSettings::default();
        let newton_tol = positive(solver_raw.newton_tol, "solver.newton_tol", e).unwrap_or(defaults.newton_tol);
        let switch_tol = positive(solver_raw.switch_tol, "solver.switch_tol", e).unwrap_or(defaults.switch_tol);
        let max_iter = match solver_raw.max_iter {
            Some(n) if n >= 1 => n as usize,
            Some(n) => {
                e.push(format!("solver.max_iter: must be at least 1, got {n}"));
                defaults.max_iter
            }
            None => defaults.max_iter,
        };

        let output_raw = self.output.unwrap_or_default();
        let snapshot_stride = match output_raw.snapshot_stride {
            Some(n) if n >= 1 => n as usize,
            Some(n) => {
                e.push(format!("output.snapshot_stride: must be at least 1, got {n}"));
                1
            }
            None => OutputSettings::default().snapshot_stride,
        };

        if !errors.is_empty() {
            return Err(Error::Validation(errors));
        }
        let (length, n_el, dim) = (length.unwrap(), n_el.unwrap(), dim.unwrap());
        Ok(ScenarioConfig {
            geometry: Geometry {
                length,
                n_el,
                dim,
                node_coords: geometry.node_coords,
            },
            material: MaterialLaw::new(kind.unwrap(), ea.unwrap())?,
            rho_a: rho_a.unwrap(),
            body_force: BodyForce {
                density: body_density,
                schedule,
            },
            boundary: boundary.unwrap(),
            initial: InitialConditions {
                positions: positions.unwrap(),
                velocities,
                strains: strains.unwrap(),
                allow_inconsistent: initial.allow_inconsistent.unwrap_or(false),
            },
            time: TimeGrid {
                h: h.unwrap(),
                duration: duration.unwrap(),
            },
            solver: SolverSettings {
                newton_tol,
                max_iter,
                scheme: solver_raw.scheme.unwrap_or(defaults.scheme),
                jacobian: solver_raw.jacobian.unwrap_or(defaults.jacobian),
                switch_tol,
            },
            output: OutputSettings {
                directory: output_raw.directory.unwrap_or_else(|| OutputSettings::default().directory),
                snapshot_stride,
            },
        })
    }
}

impl From<&ScenarioConfig> for RawConfig {
    fn from(cfg: &ScenarioConfig) -> Self {
        RawConfig {
            rho_a: Some(cfg.rho_a),
            body_force: Some(cfg.body_force.density.clone()),
            body_force_schedule: cfg.body_force.schedule.as_ref().map(|s| s.points().to_vec()),
            geometry: Some(RawGeometry {
                length: Some(cfg.geometry.length),
                n_el: Some(cfg.geometry.n_el as i64),
                d: Some(cfg.geometry.dim as i64),
                node_coords: cfg.geometry.node_coords.clone(),
            }),
            material: Some(RawMaterial {
                kind: Some(cfg.material.kind().name().to_string()),
                axial_stiffness: Some(cfg.material.axial_stiffness()),
            }),
            boundary: Some(RawBoundary {
                left: Some(cfg.boundary.left.clone()),
                right: Some(cfg.boundary.right.clone()),
            }),
            initial: Some(RawInitial {
                strains: Some(match &cfg.initial.strains {
                    StrainInit::Consistent => RawStrainInit::Keyword("consistent".into()),
                    StrainInit::Table(values) => RawStrainInit::Table { values: values.clone() },
                }),
                allow_inconsistent: Some(cfg.initial.allow_inconsistent),
                r0: Some(cfg.initial.positions.clone()),
                v0: Some(cfg.initial.velocities.clone()),
            }),
            time: Some(RawTime {
                h: Some(cfg.time.h),
                duration: Some(cfg.time.duration),
            }),
            solver: Some(RawSolver {
                newton_tol: Some(cfg.solver.newton_tol),
                max_iter: Some(cfg.solver.max_iter as i64),
                scheme: Some(cfg.solver.scheme),
                jacobian: Some(cfg.solver.jacobian),
                switch_tol: Some(cfg.solver.switch_tol),
            }),
            output: Some(RawOutput {
                directory: Some(cfg.output.directory.clone()),
                snapshot_stride: Some(cfg.output.snapshot_stride as i64),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BUNDLED_PENDULUM: &str = include_str!("../scenarios/pendulum.cfg");

    fn validation_errors(text: &str) -> Vec<String> {
        match ScenarioConfig::from_toml_str(text) {
            Err(Error::Validation(list)) => list,
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn bundled_pendulum_matches_builtin() {
        let cfg = ScenarioConfig::from_toml_str(BUNDLED_PENDULUM).unwrap();
        assert_eq!(cfg.geometry.length, 1.0);
        assert_eq!(cfg.geometry.n_el, 30);
        assert_eq!(cfg.material.axial_stiffness(), 20.0);
        assert_eq!(cfg.material.kind(), MaterialKind::Hyperelastic);
        assert_eq!(cfg.rho_a, 1.0);
        assert_eq!(cfg.time.h, 1e-2);
        assert_eq!(cfg.time.duration, 1.0);
        assert_eq!(cfg.solver.newton_tol, 1e-11);
        assert_eq!(cfg, pendulum());
    }

    #[test]
    fn missing_stiffness_is_named() {
        let text = BUNDLED_PENDULUM.replace("EA = 20.0", "");
        let errors = validation_errors(&text);
        assert_eq!(errors.len(), 1);
        assert!(errors[0].starts_with("material.EA"), "{errors:?}");
    }

    #[test]
    fn negative_duration_is_rejected() {
        let text = BUNDLED_PENDULUM.replace("T = 1.0", "T = -1.0");
        let errors = validation_errors(&text);
        assert!(errors.iter().any(|e| e.starts_with("time.T")), "{errors:?}");
    }

    #[test]
    fn all_errors_are_collected() {
        let errors = validation_errors("rhoA = -1.0\n[geometry]\nL = 1.0\nn_el = 0\nd = 5\n");
        for key in ["rhoA", "geometry.n_el", "geometry.d", "material.kind", "material.EA", "boundary.left", "initial.r0", "time.h"] {
            assert!(errors.iter().any(|e| e.starts_with(key)), "{key} missing from {errors:?}");
        }
    }

    #[test]
    fn parse_errors_carry_line_information() {
        let err = ScenarioConfig::from_toml_str("rhoA = 1.0\n[geometry\nL = 1\n").unwrap_err();
        match err {
            Error::Parse(msg) => assert!(msg.contains("line 2") || msg.contains(":2:"), "{msg}"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            ScenarioConfig::from_toml_str("unknown_key = 3\n"),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn resolved_config_round_trips() {
        for name in BUILTIN_SCENARIOS {
            let cfg = builtin(name).unwrap();
            let again = ScenarioConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
            assert_eq!(again, cfg, "{name}");
        }
    }

    #[test]
    fn inconsistent_strain_needs_override() {
        let mut cfg = pendulum();
        cfg.initial.strains = StrainInit::Table(vec![2.0; 30]);
        assert!(matches!(cfg.build(), Err(Error::Validation(_))));
        cfg.initial.allow_inconsistent = true;
        assert!(cfg.build().is_ok());
        cfg.initial.strains = StrainInit::Table(vec![1.0; 29]);
        assert!(cfg.build().is_err());
    }

    #[test]
    fn static_hang_is_in_equilibrium() {
        let scenario = static_hang().unwrap().build().unwrap();
        let model = &scenario.model;
        let res = model
            .residual(Scheme::DiscreteGradient, &scenario.initial, &scenario.initial, 1e-2, 0.0)
            .unwrap();
        assert!(res.norm() < 1e-12, "{}", res.norm());
    }

    #[test]
    fn equilibrium_stretch_inverts_tension() {
        for kind in MaterialKind::ALL {
            let law = MaterialLaw::new(kind, 20.0).unwrap();
            for t in [0.0, 0.5, 9.81, 40.0] {
                let nu = equilibrium_stretch(&law, t).unwrap();
                assert!((law.tension(nu).unwrap() - t).abs() < 1e-12 * (1.0 + t));
            }
        }
    }

    #[test]
    fn unknown_builtin() {
        assert!(builtin("double-pendulum").is_err());
    }
}
