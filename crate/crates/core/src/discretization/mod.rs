//! Mixed finite-element discretization of the string: continuous linear
//! elements for positions and velocities, elementwise constants for strain
//! and stress.

mod assembly;
mod mesh;
mod state;

pub use assembly::{
    assemble_body_force, assemble_mass, assemble_strain_mass, assemble_tangent_coupling,
    assemble_weighted_stiffness, element_difference, kinematic_strains, project_initial_strain,
    stored_energy_integral, BodyForce, SystemOperators,
};
pub use mesh::Mesh;
pub use state::State;
