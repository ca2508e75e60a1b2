use phstring::config::{builtin, free_fall, pendulum, static_hang};
use phstring::diagnostics::energy_records;
use phstring::integrator::simulate;

#[test]
fn pendulum_steps_converge_quickly() {
    let traj = simulate(&pendulum()).unwrap();
    assert!(traj.is_complete());
    assert_eq!(traj.points.len(), 101);
    assert!(traj.reports().all(|r| r.converged && r.iterations <= 10));
}

#[test]
fn pendulum_energy_bookkeeping() {
    let cfg = pendulum();
    let model = cfg.build().unwrap().model;
    let records = energy_records(&model, &simulate(&cfg).unwrap()).unwrap();
    let tol = cfg.solver.newton_tol;
    // loading raises the energy by O(1e-2) J per step, exactly as supplied
    let loading_gain = records[20].hamiltonian - records[0].hamiltonian;
    assert!(loading_gain > 1e-2, "{loading_gain}");
    assert!(records.iter().all(|r| r.power_residual <= 10.0 * tol));
    let drift: f64 = records[21..].iter().map(|r| r.increment).sum();
    assert!(drift <= 80.0 * 10.0 * tol);
}

#[test]
fn free_fall_translates_rigidly() {
    let cfg = free_fall();
    let traj = simulate(&cfg).unwrap();
    assert!(traj.is_complete());
    let g = 9.81;
    for p in &traj.points {
        let drop = -0.5 * g * p.t * p.t;
        for (i, &s) in cfg.build().unwrap().model.mesh.node_coords().iter().enumerate() {
            assert!((p.state.positions[2 * i] - s).abs() < 1e-12);
            assert!((p.state.positions[2 * i + 1] - drop).abs() < 1e-11, "t = {}", p.t);
            assert!((p.state.velocities[2 * i + 1] + g * p.t).abs() < 1e-11);
        }
    }
}

#[test]
fn static_hang_rests_and_carries_its_weight() {
    let cfg = static_hang().unwrap();
    let scenario = cfg.build().unwrap();
    let mut short = cfg.clone();
    short.time.duration = 0.2;
    let traj = simulate(&short).unwrap();
    assert!(traj.is_complete());
    for p in &traj.points {
        assert!((&p.state.positions - &scenario.initial.positions).abs().max() < 1e-12);
        assert!(p.state.velocities.abs().max() < 1e-12);
    }
    // the support holds the full weight ρA·g·L
    for p in &traj.points[1..] {
        let (end, force) = &p.ports.as_ref().unwrap().reactions[0];
        assert_eq!(end.name(), "left");
        assert!(force[0].abs() < 1e-10);
        assert!((force[1] - 9.81).abs() < 1e-10, "{}", force[1]);
    }
}

#[test]
fn all_builtins_build() {
    for name in phstring::config::BUILTIN_SCENARIOS {
        builtin(name).unwrap().build().unwrap();
    }
}
