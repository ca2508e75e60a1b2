use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use super::*;
use crate::boundary::{BoundarySpec, EndCondition};
use crate::diagnostics::{hamiltonian, kinematic_consistency, skew_symmetry_check};
use crate::discretization::{project_initial_strain, BodyForce, Mesh};
use crate::material::{MaterialKind, MaterialLaw};
use crate::signal::InputSignal;

fn pinned_left() -> BoundarySpec {
    BoundarySpec {
        left: EndCondition::Fixed {
            position: vec![0.0, 0.0],
        },
        right: EndCondition::free(),
    }
}

fn model(n_el: usize, kind: MaterialKind, gravity: f64, boundary: BoundarySpec) -> StringModel {
    StringModel::new(
        Mesh::uniform(1.0, n_el, 2).unwrap(),
        MaterialLaw::new(kind, 20.0).unwrap(),
        1.0,
        BodyForce::constant(vec![0.0, -gravity]),
        boundary,
    )
    .unwrap()
}

/// Straight string along `direction`, stretched by `stretch`, with velocity
/// `v(s) = v0 + s·v1`.
fn line_state(model: &StringModel, direction: [f64; 2], stretch: f64, v0: [f64; 2], v1: [f64; 2]) -> State {
    let mesh = &model.mesh;
    let r = DVector::from_iterator(
        mesh.n_dofs(),
        mesh.node_coords().iter().flat_map(|&s| [stretch * s * direction[0], stretch * s * direction[1]]),
    );
    let v = DVector::from_iterator(
        mesh.n_dofs(),
        mesh.node_coords().iter().flat_map(|&s| [v0[0] + s * v1[0], v0[1] + s * v1[1]]),
    );
    let c = project_initial_strain(mesh, &r).unwrap();
    State::new(mesh, r, v, c).unwrap()
}

fn diagonal() -> [f64; 2] {
    let c = std::f64::consts::FRAC_1_SQRT_2;
    [c, -c]
}

#[test]
fn scheme_names_parse() {
    assert_eq!("dg".parse::<Scheme>().unwrap(), Scheme::DiscreteGradient);
    assert_eq!("midpoint".parse::<Scheme>().unwrap(), Scheme::Midpoint);
    assert!("rk4".parse::<Scheme>().is_err());
}

#[test]
fn equilibrium_is_a_fixed_point() {
    let m = model(4, MaterialKind::Hyperelastic, 0.0, pinned_left());
    let s = line_state(&m, [1.0, 0.0], 1.0, [0.0, 0.0], [0.0, 0.0]);
    for scheme in [Scheme::DiscreteGradient, Scheme::Midpoint] {
        let res = m.residual(scheme, &s, &s, 1e-2, 0.0).unwrap();
        assert_eq!(res.norm(), 0.0);
        let out = m.step(&s, &StepSettings::new(1e-2, 1e-11).with_scheme(scheme), 0.0).unwrap();
        assert_eq!(out.report.iterations, 1);
        assert_eq!(out.state, s);
    }
}

#[test]
fn free_fall_step_is_exact() {
    let m = model(1, MaterialKind::Hyperelastic, 9.81, BoundarySpec::free_floating());
    let s0 = line_state(&m, [1.0, 0.0], 1.0, [0.0, 0.0], [0.0, 0.0]);
    let h = 0.01;
    let mut s1 = s0.clone();
    for i in 0..2 {
        s1.positions[2 * i + 1] = -0.5 * 9.81 * h * h;
        s1.velocities[2 * i + 1] = -9.81 * h;
    }
    let res = m.residual_dg(&s0, &s1, h, 0.0).unwrap();
    assert!(res.norm() < 1e-12, "{}", res.norm());
    let out = m.step(&s0, &StepSettings::new(h, 1e-12), 0.0).unwrap();
    assert!((&out.state.positions - &s1.positions).norm() < 1e-13);
}

#[test]
fn residual_is_linear_in_step_size() {
    // With x̂ₙ₊₁ = x̂ₙ, R = -h (J z + B u): doubling h doubles R.
    let m = model(3, MaterialKind::Hyperelastic, 9.81, BoundarySpec::free_floating());
    let s = line_state(&m, diagonal(), 1.1, [0.3, -0.2], [0.5, 1.0]);
    let r1 = m.residual_dg(&s, &s, 0.01, 0.0).unwrap();
    let r2 = m.residual_dg(&s, &s, 0.02, 0.0).unwrap();
    assert!((&r2 - &r1 * 2.0).norm() <= 1e-14 * r2.norm());
}

#[test]
fn schemes_coincide_for_quadratic_energy() {
    let m = model(3, MaterialKind::StVenantKirchhoff, 9.81, pinned_left());
    let s0 = line_state(&m, diagonal(), 1.0, [0.0, 0.0], [0.0, 0.0]);
    let s1 = line_state(&m, [0.6, -0.8], 1.05, [0.0, 0.0], [0.4, 0.1]);
    let a = m.residual_dg(&s0, &s1, 0.01, 0.0).unwrap();
    let b = m.residual_midpoint(&s0, &s1, 0.01, 0.0).unwrap();
    assert!((&a - &b).norm() <= 1e-13 * (1.0 + a.norm()));
}

#[test]
fn analytic_jacobian_matches_finite_differences() {
    for kind in MaterialKind::ALL {
        for boundary in [pinned_left(), BoundarySpec::free_floating()] {
            let m = model(2, kind, 9.81, boundary);
            let s0 = line_state(&m, diagonal(), 1.0, [0.1, 0.0], [0.0, 0.2]);
            let mut s1 = line_state(&m, [0.6, -0.8], 1.1, [0.2, -0.1], [0.3, 0.4]);
            s1.strains[1] *= 1.05;
            for scheme in [Scheme::DiscreteGradient, Scheme::Midpoint] {
                let a = m.newton_jacobian(scheme, &s0, &s1, 0.01, 0.0, JacobianMode::Analytic).unwrap();
                let f = m
                    .newton_jacobian(scheme, &s0, &s1, 0.01, 0.0, JacobianMode::FiniteDifference)
                    .unwrap();
                let err = (&a - &f).abs().max();
                assert!(err <= 1e-5 * (1.0 + f.abs().max()), "{kind:?} {scheme:?}: {err}");
            }
        }
    }
}

#[test]
fn jacobian_at_zero_step_is_descriptor() {
    let m = model(3, MaterialKind::Hyperelastic, 9.81, BoundarySpec::free_floating());
    let s = line_state(&m, diagonal(), 1.2, [0.0, 0.0], [1.0, 0.0]);
    let j = m.newton_jacobian(Scheme::DiscreteGradient, &s, &s, 0.0, 0.0, JacobianMode::Analytic).unwrap();
    assert_eq!(j, m.descriptor_matrix());
}

#[test]
fn step_counts() {
    assert_eq!(n_steps(1.0, 1e-2), 100);
    assert_eq!(n_steps(0.3, 0.1), 3);
    assert_eq!(n_steps(0.35, 0.1), 4);
    assert_eq!(n_steps(0.0, 0.1), 0);
}

#[test]
fn zero_duration_keeps_initial_state() {
    let m = model(2, MaterialKind::Hyperelastic, 9.81, pinned_left());
    let s = line_state(&m, diagonal(), 1.0, [0.0, 0.0], [0.0, 0.0]);
    let traj = simulate_model(&m, s.clone(), &StepSettings::new(0.01, 1e-11), 0.0);
    assert!(traj.is_complete());
    assert_eq!(traj.points.len(), 1);
    assert_eq!(traj.last_state(), &s);
}

#[test]
fn shortened_last_step_lands_on_end_time() {
    let m = model(2, MaterialKind::Hyperelastic, 9.81, pinned_left());
    let s = line_state(&m, diagonal(), 1.0, [0.0, 0.0], [0.0, 0.0]);
    let traj = simulate_model(&m, s, &StepSettings::new(0.01, 1e-11), 0.035);
    assert_eq!(traj.points.len(), 5);
    assert_eq!(traj.points.last().unwrap().t, 0.035);
    assert!((traj.points.last().unwrap().h - 0.005).abs() < 1e-15);
}

#[test]
fn pinned_ends_equilibrium_persists() {
    let boundary = BoundarySpec {
        left: EndCondition::Fixed {
            position: vec![0.0, 0.0],
        },
        right: EndCondition::Fixed {
            position: vec![1.2, 0.0],
        },
    };
    let m = model(4, MaterialKind::Hyperelastic, 0.0, boundary);
    let s = line_state(&m, [1.0, 0.0], 1.2, [0.0, 0.0], [0.0, 0.0]);
    let traj = simulate_model(&m, s.clone(), &StepSettings::new(0.01, 1e-11), 0.1);
    assert!(traj.is_complete());
    for p in &traj.points {
        assert!((&p.state.positions - &s.positions).abs().max() < 1e-14);
        assert!(p.state.velocities.abs().max() < 1e-14);
    }
    // both supports pull inwards with tension N(1.2)
    let tension = m.law.tension(1.2).unwrap();
    let ports = traj.points[1].ports.as_ref().unwrap();
    let left = &ports.reactions[0].1;
    let right = &ports.reactions[1].1;
    assert!((left[0] + tension).abs() < 1e-10 && (right[0] - tension).abs() < 1e-10);
}

#[test]
fn exhausted_iterations_report_nonconvergence() {
    let m = model(3, MaterialKind::Hyperelastic, 9.81, pinned_left());
    let s = line_state(&m, diagonal(), 1.0, [0.0, 0.0], [0.0, 0.0]);
    let settings = StepSettings {
        max_iter: 1,
        ..StepSettings::new(0.01, 1e-11)
    };
    match m.step(&s, &settings, 0.0) {
        Err(Error::NonConvergence(report)) => {
            assert_eq!(report.iterations, 1);
            assert!(!report.converged);
        }
        other => panic!("{other:?}"),
    }
    let traj = simulate_model(&m, s, &settings, 0.05);
    assert_eq!(traj.points.len(), 1);
    assert!(traj.failure.is_some());
}

#[test]
fn finite_difference_newton_converges_too() {
    let m = model(3, MaterialKind::Hyperelastic, 9.81, pinned_left());
    let s = line_state(&m, diagonal(), 1.0, [0.0, 0.0], [0.0, 0.0]);
    let a = m.step(&s, &StepSettings::new(0.01, 1e-11), 0.0).unwrap();
    let settings = StepSettings {
        jacobian: JacobianMode::FiniteDifference,
        ..StepSettings::new(0.01, 1e-11)
    };
    let f = m.step(&s, &settings, 0.0).unwrap();
    assert!((a.state.to_stacked() - f.state.to_stacked()).norm() < 1e-9);
}

fn kicked_pendulum(n_el: usize, kind: MaterialKind) -> StringModel {
    let boundary = BoundarySpec {
        left: EndCondition::Fixed {
            position: vec![0.0, 0.0],
        },
        right: EndCondition::Force {
            signal: InputSignal::HalfSine {
                amplitude: vec![1.0, 1.0],
                duration: 0.2,
            },
        },
    };
    model(n_el, kind, 9.81, boundary)
}

fn power_residuals(m: &StringModel, s: State, h: f64, steps: usize) -> (f64, Trajectory) {
    let traj = simulate_model(m, s, &StepSettings::new(h, 1e-11), h * steps as f64);
    assert!(traj.is_complete(), "{:?}", traj.failure);
    let mut worst: f64 = 0.0;
    for pair in traj.points.windows(2) {
        let h0 = hamiltonian(m, &pair[0].state, pair[0].t).unwrap().total;
        let h1 = hamiltonian(m, &pair[1].state, pair[1].t).unwrap().total;
        let ports = pair[1].ports.as_ref().unwrap();
        worst = worst.max((h1 - h0 - pair[1].h * ports.power()).abs());
    }
    (worst, traj)
}

#[test]
fn discrete_power_balance_under_loading() {
    let m = kicked_pendulum(6, MaterialKind::Hyperelastic);
    let s = line_state(&m, diagonal(), 1.0, [0.0, 0.0], [0.0, 0.0]);
    let (worst, traj) = power_residuals(&m, s, 0.01, 25);
    assert!(worst <= 1e-10, "{worst}");
    for p in &traj.points {
        assert!(kinematic_consistency(&m.mesh, &p.state) <= 1e-10);
    }
}

#[test]
fn power_balance_with_left_end_loading() {
    let boundary = BoundarySpec {
        left: EndCondition::Force {
            signal: InputSignal::HalfSine {
                amplitude: vec![-1.0, 0.5],
                duration: 0.1,
            },
        },
        right: EndCondition::Fixed {
            position: vec![0.0, -1.0],
        },
    };
    let m = model(5, MaterialKind::Hyperelastic, 9.81, boundary);
    let s = line_state(&m, [0.0, -1.0], 1.0, [0.0, 0.0], [0.0, 0.0]);
    let (worst, traj) = power_residuals(&m, s, 0.01, 15);
    assert!(worst <= 1e-10, "{worst}");
    let supplied: f64 = traj.points[1..].iter().map(|p| p.h * p.ports.as_ref().unwrap().power()).sum();
    assert!(supplied.abs() > 1e-4, "{supplied}");
}

/// Observed order of the global position error from successive halving.
fn observed_order(scheme: Scheme) -> f64 {
    let m = model(4, MaterialKind::Hyperelastic, 9.81, pinned_left());
    let s = line_state(&m, diagonal(), 1.0, [0.0, 0.0], [0.0, 0.0]);
    let duration = 0.4;
    let end_state = |h: f64| {
        let settings = StepSettings::new(h, 1e-11).with_scheme(scheme);
        let traj = simulate_model(&m, s.clone(), &settings, duration);
        assert!(traj.is_complete(), "h = {h}: {:?}", traj.failure);
        traj.last_state().positions.clone()
    };
    let reference = end_state(5e-3 / 64.0);
    let errors: Vec<f64> = [4e-2, 2e-2, 1e-2, 5e-3].iter().map(|&h| (end_state(h) - &reference).norm()).collect();
    let orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    orders[orders.len() - 1]
}

#[test]
fn second_order_convergence() {
    for scheme in [Scheme::DiscreteGradient, Scheme::Midpoint] {
        let p = observed_order(scheme);
        assert!((1.8..=2.2).contains(&p), "{scheme:?}: order {p}");
    }
}

fn unit_direction(angle: f64) -> [f64; 2] {
    [angle.cos(), angle.sin()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn structure_matrix_is_skew(angle in 0.0..6.3f64, stretch in 0.6..1.6f64, n_el in 1usize..6) {
        let m = model(n_el, MaterialKind::Hyperelastic, 9.81, pinned_left());
        let mut s = line_state(&m, unit_direction(angle), stretch, [0.0, 0.0], [0.0, 0.0]);
        s.positions.iter_mut().enumerate().for_each(|(i, x)| *x += 0.05 * ((i * 7) as f64).sin());
        prop_assert!(skew_symmetry_check(&m, &s) <= 1e-12);
        let j: DMatrix<f64> = m.structure_matrix(&s);
        prop_assert!((&j + j.transpose()).abs().max() == 0.0);
    }

    #[test]
    fn power_balance_holds(
        kind_idx in 0usize..3,
        angle in 0.0..6.3f64,
        stretch in 0.9..1.2f64,
        vx in -1.0..1.0f64,
        vy in -1.0..1.0f64,
    ) {
        let m = kicked_pendulum(4, MaterialKind::ALL[kind_idx]);
        let s = line_state(&m, unit_direction(angle), stretch, [0.0, 0.0], [vx, vy]);
        let (worst, _) = power_residuals(&m, s, 0.01, 10);
        prop_assert!(worst <= 1e-10, "{}", worst);
    }

    #[test]
    fn strain_stays_kinematic(angle in 0.0..6.3f64, vx in -2.0..2.0f64, vy in -2.0..2.0f64) {
        let m = kicked_pendulum(5, MaterialKind::Hyperelastic);
        let s = line_state(&m, unit_direction(angle), 1.0, [0.0, 0.0], [vx, vy]);
        let traj = simulate_model(&m, s, &StepSettings::new(0.01, 1e-11), 0.1);
        prop_assert!(traj.is_complete());
        for p in &traj.points {
            prop_assert!(kinematic_consistency(&m.mesh, &p.state) <= 1e-10);
        }
    }

    #[test]
    fn free_string_conserves_momentum(
        kind_idx in 0usize..3,
        angle in 0.0..6.3f64,
        stretch in 0.8..1.3f64,
        vx in -1.0..1.0f64,
        vy in -1.0..1.0f64,
        wx in -2.0..2.0f64,
        wy in -2.0..2.0f64,
    ) {
        let m = model(3, MaterialKind::ALL[kind_idx], 0.0, BoundarySpec::free_floating());
        let s = line_state(&m, unit_direction(angle), stretch, [vx, vy], [wx, wy]);
        let p0 = m.linear_momentum(&s.velocities);
        let traj = simulate_model(&m, s, &StepSettings::new(0.01, 1e-11), 0.2);
        prop_assert!(traj.is_complete());
        for p in &traj.points {
            let pn = m.linear_momentum(&p.state.velocities);
            for c in 0..2 {
                prop_assert!((pn[c] - p0[c]).abs() <= 1e-10);
            }
        }
    }
}
