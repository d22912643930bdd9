use num_complex::Complex64;
use painleve_core::algebra::{RationalExpression, Var};
use painleve_core::numerics::*;
use painleve_core::systems::{make_system, Family, FieldComponents};
use painleve_core::transforms::{generator, BirationalMap};

fn r(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[test]
fn constant_field_is_integrated_exactly() {
    // H = p gives dq/dt = 1, dp/dt = 0.
    let field = FieldComponents::new(vec![Var::Q, Var::P], vec![RationalExpression::one(), RationalExpression::zero()]);
    let compiled = CompiledField::new(&field, Var::T);
    let traj = integrate_field(&compiled, &[], &[r(0.25), r(3.0)], &[r(1.0), r(2.0)], Tolerance::both(1e-10), 16).unwrap();
    for (t, y) in traj.times.iter().zip(&traj.states) {
        assert!((y[0] - (0.25 + (t - 1.0))).norm() <= 1e-12);
        assert!((y[1] - 3.0).norm() <= 1e-12);
    }
}

#[test]
fn d4_benchmark_has_small_defect() {
    let bench = Benchmark::d4_default();
    let traj = bench.run().unwrap();
    let system = make_system(Family::D4);
    let field = CompiledField::new(&system.vector_field(), Var::T);
    let d = residual(&field, &traj).unwrap();
    println!("defect {:.3e} at {} ({} steps)", d.max, d.index, traj.stats.accepted);
    assert!(d.max <= 1e-8, "{d:?}");
}

#[test]
fn tighter_tolerance_does_not_increase_the_defect() {
    let mut bench = Benchmark::d4_default();
    let field = CompiledField::new(&make_system(Family::D4).vector_field(), Var::T);
    bench.tol = Tolerance::both(1e-8);
    let coarse = residual(&field, &bench.run().unwrap()).unwrap();
    bench.tol = Tolerance::both(1e-9);
    let fine = residual(&field, &bench.run().unwrap()).unwrap();
    assert!(fine.max <= coarse.max, "{fine:?} > {coarse:?}");
}

#[test]
fn path_reversal_returns_to_the_start() {
    let bench = Benchmark::d4_default();
    let system = make_system(Family::D4);
    let params = bench.param_values(&system).unwrap();
    let fwd = bench.run().unwrap();
    let back = integrate(&system, &params, fwd.last_state(), &[r(2.0), r(1.0)], bench.tol, 8).unwrap();
    let gap = back.last_state().iter().zip(&bench.state).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(gap <= 10.0 * bench.tol.abs.max(1e-9), "gap {gap:.3e}");
}

#[test]
fn complex_polyline_detour_agrees_with_the_real_segment() {
    let bench = Benchmark::d4_default();
    let system = make_system(Family::D4);
    let params = bench.param_values(&system).unwrap();
    let direct = bench.run().unwrap();
    let detour = integrate(&system, &params, &bench.state, &[r(1.0), Complex64::new(1.5, 0.3), r(2.0)], bench.tol, 8).unwrap();
    let gap = direct.last_state().iter().zip(detour.last_state()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(gap <= 1e-7, "gap {gap:.3e}");
}

#[test]
fn path_through_zero_is_rejected() {
    let bench = Benchmark::d4_default();
    let system = make_system(Family::D4);
    let params = bench.param_values(&system).unwrap();
    let err = integrate(&system, &params, &bench.state, &[r(-1.0), r(1.0)], bench.tol, 8).unwrap_err();
    assert!(matches!(err, NumericError::SingularStart(_) | NumericError::StepFailure { .. }));
}

#[test]
fn parameters_off_the_hyperplane_are_rejected() {
    let system = make_system(Family::D4);
    let params: Vec<_> = system.params.symbols().iter().map(|&v| (v, r(0.125))).collect();
    let err = integrate(&system, &params, &[r(0.5); 4], &[r(1.0), r(2.0)], Tolerance::both(1e-10), 4).unwrap_err();
    assert!(matches!(err, NumericError::Constraint(_)));
}

#[test]
fn corrupted_sample_shows_up_in_the_residual() {
    let bench = Benchmark::d4_default();
    let mut traj = bench.run().unwrap();
    let field = CompiledField::new(&make_system(Family::D4).vector_field(), Var::T);
    traj.states[7][2] += 1e-2;
    let d = residual(&field, &traj).unwrap();
    assert_eq!(d.index, 7);
    assert!(d.max > 1e-4);
}

#[test]
fn constant_trajectory_of_zero_field_has_zero_residual() {
    let field = FieldComponents::new(vec![Var::Q, Var::P], vec![RationalExpression::zero(), RationalExpression::zero()]);
    let compiled = CompiledField::new(&field, Var::T);
    let traj = integrate_field(&compiled, &[], &[r(1.0), r(2.0)], &[r(1.0), r(3.0)], Tolerance::both(1e-10), 4).unwrap();
    assert_eq!(residual(&compiled, &traj).unwrap().max, 0.0);
}

#[test]
fn identity_map_has_zero_difference() {
    let bench = Benchmark::d4_default();
    let out = run_backlund(&BirationalMap::identity(Family::D4), &bench, None).unwrap();
    assert_eq!(out.difference, 0.0);
}

#[test]
fn s1_passes_and_its_mutation_fails() {
    let bench = Benchmark::d4_default();
    let s1 = generator(Family::D4, "s1").unwrap();
    let r = verify_backlund_numeric(&s1, &bench);
    println!("{}", r.summary());
    assert!(r.passed());
    let params = make_system(Family::D4).params;
    let m = Mutation::cyclic(&params, 1, 1e-3);
    let out = run_backlund(&s1, &bench, Some(&m)).unwrap();
    assert!(out.difference > 1e-6, "{out:?}");
}

#[test]
fn every_d4_generator_passes_and_every_mutation_is_detected() {
    let bench = Benchmark::d4_default();
    let reports = verify_backlund_suite(&bench, true).unwrap();
    let mut failed = Vec::new();
    for r in &reports {
        println!("{}", r.summary());
        if !r.passed() {
            failed.push(r.check.clone());
        }
    }
    assert_eq!(reports.len(), 9 + 9 * 5);
    assert!(failed.is_empty(), "{failed:?}");
}

#[test]
fn trajectory_exports_json_lines() {
    let traj = Benchmark::d4_default().run().unwrap();
    let mut buf = Vec::new();
    traj.write_json_lines(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), traj.len());
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(first["t_re"], 1.0);
    assert_eq!(first["state"].as_array().unwrap().len(), 4);
}

#[test]
fn benchmark_round_trips_through_json() {
    let bench = Benchmark::d4_default();
    let text = serde_json::to_string(&bench).unwrap();
    let back: Benchmark = serde_json::from_str(&text).unwrap();
    assert_eq!(back.params, bench.params);
    assert_eq!(back.path, bench.path);
}
