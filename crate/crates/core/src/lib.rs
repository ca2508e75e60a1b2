//! Energy-consistent simulation of geometrically exact hyperelastic strings.
//!
//! The string is discretized with a mixed finite element method (linear
//! positions and velocities, elementwise-constant strain) and advanced in
//! time by a discrete-gradient scheme that preserves the port-Hamiltonian
//! power balance exactly. An implicit midpoint rule is included for
//! comparison.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod boundary;
pub mod config;
pub mod diagnostics;
pub mod discretization;
pub mod error;
pub mod integrator;
pub mod material;
pub mod model;
pub mod output;
pub mod signal;

pub use boundary::{BoundarySpec, End, EndCondition};
pub use config::{load_config, ScenarioConfig};
pub use discretization::{BodyForce, Mesh, State};
pub use error::{Error, Result};
pub use integrator::{simulate, simulate_model, JacobianMode, Scheme, StepSettings, Trajectory};
pub use material::{MaterialKind, MaterialLaw};
pub use model::StringModel;
pub use signal::InputSignal;
