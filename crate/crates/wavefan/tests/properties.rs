use std::sync::OnceLock;

use proptest::prelude::*;

use wavefan::bvp::{solve_profile, Profile, ProfileProblem, SolveOptions};
use wavefan::corner::{first_integral_h, invert_first_integral, solve_corner, CornerProfile};
use wavefan::flux::FluxSpec;
use wavefan::io::{read_profile, write_profile};
use wavefan::mesh::Mesh;
use wavefan::riemann::solve_exact;
use wavefan::rk::StepControl;

fn corner() -> &'static CornerProfile {
    static CORNER: OnceLock<CornerProfile> = OnceLock::new();
    CORNER.get_or_init(|| solve_corner(-8.0, 10.0, &StepControl::default()).unwrap())
}

fn quartic() -> impl Strategy<Value = FluxSpec> {
    prop::collection::vec(-1.0..1.0_f64, 4..=5).prop_map(|c| FluxSpec::polynomial(c).unwrap())
}

fn states() -> impl Strategy<Value = (f64, f64)> {
    (-1.5..1.5_f64, -1.5..1.5_f64).prop_filter("distinct states", |(a, b)| (a - b).abs() > 0.05)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn shocks_satisfy_rankine_hugoniot(flux in quartic(), (ul, ur) in states()) {
        let sol = solve_exact(&flux, ul, ur);
        for (speed, left, right) in sol.shocks() {
            let jump = flux.eval(right) - flux.eval(left);
            let scale = 1.0 + jump.abs() + speed.abs();
            prop_assert!((speed * (right - left) - jump).abs() <= 1e-9 * scale,
                "speed {speed} for {left} -> {right}");
        }
    }

    #[test]
    fn riemann_solution_is_monotone_between_states(flux in quartic(), (ul, ur) in states()) {
        let sol = solve_exact(&flux, ul, ur);
        let sign = (ur - ul).signum();
        let mut prev = ul;
        for k in 0..=400 {
            let xi = -6.0 + 12.0 * k as f64 / 400.0;
            let u = sol.eval(xi);
            prop_assert!(sign * (u - prev) >= -1e-12, "non-monotone at xi = {xi}");
            prev = u;
        }
        prop_assert!(sign * (ur - prev) >= -1e-12);
    }

    #[test]
    fn corner_slope_decreases_in_offset(w in 0.0..6.0_f64, dw in 1e-3..1.0_f64) {
        let p = invert_first_integral(w).unwrap();
        let q = invert_first_integral(w + dw).unwrap();
        prop_assert!(0.0 < q && q < p && p <= 1.0);
    }

    #[test]
    fn translated_corner_keeps_zero_first_integral(shift in -3.0..3.0_f64) {
        let c = corner();
        let mesh = c.mesh.translated(shift);
        let u = c.u.iter().map(|u| u + shift).collect();
        let moved = CornerProfile::from_samples(mesh, u, c.p.clone()).unwrap();
        let h = first_integral_h(&moved, 1.0).unwrap();
        let worst = h.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        prop_assert!(worst <= 1e-8, "max |H| = {worst}");
    }

    #[test]
    fn corner_left_tail_below_gaussian(xi in -7.9..-2.0_f64) {
        let u = corner().eval(xi).unwrap();
        prop_assert!(u > 0.0 && u <= (-0.5 * xi * xi).exp(), "U({xi}) = {u}");
    }

    #[test]
    fn profile_csv_round_trips(
        steps in prop::collection::vec(1e-3..0.5_f64, 2..60),
        start in -10.0..0.0_f64,
        seed in prop::collection::vec(-1e3..1e3_f64, 60),
    ) {
        let mut nodes = vec![start];
        for h in &steps {
            nodes.push(nodes.last().unwrap() + h);
        }
        let u: Vec<f64> = seed[..nodes.len()].iter().map(|v| v / 7.0).collect();
        let profile = Profile::from_values(Mesh::new(nodes).unwrap(), u).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("profile.csv");
        write_profile(&profile, &path).unwrap();
        let back = read_profile(&path).unwrap();
        prop_assert_eq!(back, profile);
    }
}

#[test]
fn burgers_shock_profile_is_odd() {
    let p = ProfileProblem::burgers(1.0, -1.0, 0.1).unwrap();
    let (profile, _) = solve_profile(&p, &SolveOptions::default()).unwrap();
    for xi in [0.05, 0.2, 0.5, 1.0] {
        let (a, b) = (profile.eval(xi), profile.eval(-xi));
        assert!((a + b).abs() <= 1e-8, "u({xi}) = {a}, u(-{xi}) = {b}");
    }
}

#[test]
fn profile_is_independent_of_continuation_path() {
    let p = ProfileProblem::burgers(-1.0, 1.0, 0.05).unwrap();
    let direct = SolveOptions { continuation: vec![0.05], ..SolveOptions::default() };
    let (a, _) = solve_profile(&p, &SolveOptions::default()).unwrap();
    let (b, _) = solve_profile(&p, &direct).unwrap();
    let gap = a.u.iter().zip(&b.u).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
    assert!(gap <= 1e-8, "gap {gap}");
}
