//! Chains across modules: a travelling wave as boundary data for the
//! elliptic solver, the solved field fed to the gauge conditions and the
//! frame, and the radial `n = 3` first integral.

use affsphere::gauge::{check_affine_sphere_gauge, hitchin_residual, AffineSphereJet};
use affsphere::geometry::{integrate_frame, loop_defect};
use affsphere::io::{read_grid, write_grid, Meta};
use affsphere::pdesolve::{
    first_integral_value, harmonic_extension, integrate_radial_n3, lift_to_grid, radial_n3_first_integral,
    solve_affine_sphere, CubicDifferential, GridShape, NewtonOptions, ScalarGrid, WaveSpec,
};
use affsphere::{re, CMat3};

const WAVE: WaveSpec = WaveSpec { energy: 1.0, f0: 0.0, t0: 0.0, ascending: true };

fn solve_wave(n: usize) -> (ScalarGrid, ScalarGrid) {
    let shape = GridShape::rect(n, n, -0.2, 0.2, -0.2, 0.2).unwrap();
    let (exact, _) = lift_to_grid(WAVE, &shape).unwrap();
    let init = harmonic_extension(&exact).unwrap();
    let opts = NewtonOptions { tol: 1e-11, ..Default::default() };
    let (psi, stats) = solve_affine_sphere(&CubicDifferential::Constant(re(1.0)), &exact, &init, &opts).unwrap();
    assert!(stats.is_monotone());
    (psi, exact)
}

#[test]
fn newton_reproduces_the_travelling_wave() {
    let errs: Vec<f64> = [17, 33, 65]
        .iter()
        .map(|&n| {
            let (psi, exact) = solve_wave(n);
            psi.max_diff(&exact).unwrap()
        })
        .collect();
    assert!(errs[2] < 1e-5, "{errs:?}");
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.5..4.5).contains(&ratio), "{errs:?}");
    }
}

#[test]
fn solved_field_satisfies_the_conditions_pointwise() {
    let (psi, _) = solve_wave(33);
    let s = psi.shape;
    let mut worst = 0.0f64;
    for (i, j) in s.interior() {
        let jet = AffineSphereJet::euclidean(psi.at(i, j), psi.d_z(i, j), psi.d_zzbar(i, j), re(1.0));
        let gd = jet.gauge_data().unwrap();
        worst = worst.max(hitchin_residual(&gd).unwrap().max_norm());
        let rep = check_affine_sphere_gauge(&gd, 1e-6).unwrap();
        assert!(rep.c1 && rep.c3 && !rep.degenerate, "{rep:?} at ({i}, {j})");
    }
    // the discrete equation holds to the Newton tolerance
    assert!(worst < 1e-9, "{worst}");
}

#[test]
fn frame_over_the_solved_field_closes_at_second_order() {
    let u = CubicDifferential::Constant(re(1.0));
    let defects: Vec<f64> = [17, 33, 65]
        .iter()
        .map(|&n| {
            let (psi, _) = solve_wave(n);
            let f = integrate_frame(&psi, &u, CMat3::identity(), (0, 0)).unwrap();
            assert!(f.frames.iter().all(|m| m.is_finite()));
            loop_defect(&psi, &u, CMat3::identity(), (0, 0), (n - 1, n - 1)).unwrap()
        })
        .collect();
    for w in defects.windows(2) {
        assert!(w[0] / w[1] > 3.0, "{defects:?}");
    }
}

#[test]
fn grid_files_round_trip_the_solution() {
    let (psi, _) = solve_wave(17);
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("psi.csv");
    let mut m = Meta::new();
    m.insert("u".into(), CubicDifferential::Constant(re(1.0)).describe());
    write_grid(&p, &psi, "psi", &m).unwrap();
    let (back, meta) = read_grid(&p).unwrap();
    assert_eq!(back.values, psi.values);
    let u = CubicDifferential::parse(&meta["u"]).unwrap();
    assert_eq!(u.eval(re(0.3)).unwrap(), re(1.0));
}

#[test]
fn radial_first_integral_is_conserved() {
    let s: Vec<f64> = (0..201).map(|k| 1.0 + 0.5 * k as f64 / 200.0).collect();
    let (psi, dpsi) = integrate_radial_n3(1.0, 0.2, -0.5, &s, 1e-12).unwrap();
    let c0 = first_integral_value(1.0, 0.2, -0.5);
    for (k, &sk) in s.iter().enumerate() {
        assert!((first_integral_value(sk, psi[k], dpsi[k]) - c0).abs() < 1e-9);
    }
    // from samples alone the first integral is only second-order accurate
    let c = radial_n3_first_integral(&psi, &s).unwrap();
    let drift = c[1..c.len() - 1].iter().map(|v| (v - c0).abs()).fold(0.0, f64::max);
    assert!(drift < 1e-3, "{drift}");
}
