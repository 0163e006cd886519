//! Acceptance criteria, one line per criterion.
//!
//! Runs without the libtest harness so that every line is printed even when
//! an earlier criterion fails; the process exits non-zero if any fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wavefan::bvp::{self, solve_profile, Profile, ProfileProblem, SolveOptions};
use wavefan::corner::{
    barrier_lower, barrier_upper, first_integral_h, fit_tail_rate, invert_first_integral, solve_corner,
    BarrierUpper,
};
use wavefan::flux::FluxSpec;
use wavefan::mesh::Mesh;
use wavefan::riemann::{solve_exact, RiemannSolution};
use wavefan::rk::StepControl;
use wavefan::verification::{
    barrier_operator_margin, check_corner_expansion, check_monotone, expansion_corner_start,
    refinement_ratio, sliding_constant_m, sliding_supersolution_margin, sweep_l1, sweeping_supersolution_margin,
    uniqueness_probe, FIRST_INTEGRAL_CORE,
};

type Outcome = Result<String, String>;

fn ensure(ok: bool, what: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what)
    }
}

fn sci(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn cubic() -> FluxSpec {
    FluxSpec::Polynomial(vec![0.0, 0.0, 0.0, 1.0])
}

fn constant_case() -> Outcome {
    let p = ProfileProblem::burgers(0.3, 0.3, 0.2).map_err(fail)?;
    let (profile, report) = solve_profile(&p, &SolveOptions::default()).map_err(fail)?;
    let deviation = profile.u.iter().fold(0.0_f64, |m, u| m.max((u - 0.3).abs()));
    let residual = report.final_residual();
    ensure(deviation <= 1e-12, format!("max |u - 0.3| = {deviation:.3e}"))?;
    ensure(residual <= 1e-12, format!("residual {residual:.3e}"))?;
    Ok(format!("max |u - 0.3| = {deviation:.1e}, residual {residual:.1e}"))
}

fn burgers_shock() -> Outcome {
    let p = ProfileProblem::burgers(1.0, -1.0, 0.05).map_err(fail)?;
    let (profile, report) = solve_profile(&p, &SolveOptions::default()).map_err(fail)?;
    let slope = check_monotone(&profile, 1.0, -1.0);
    let center = profile.eval(0.0).abs();
    let h = first_integral_h(&profile.core(FIRST_INTEGRAL_CORE).map_err(fail)?, 0.05).map_err(fail)?;
    let spread = h.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - h.iter().cloned().fold(f64::INFINITY, f64::min);
    ensure(report.converged && report.iterations <= 30, format!("{} Newton iterations", report.iterations))?;
    ensure(slope > 0.0, format!("not strictly decreasing (min oriented slope {slope:.3e})"))?;
    ensure(center <= 1e-8, format!("|u(0)| = {center:.3e}"))?;
    ensure(spread <= 1e-5, format!("first-integral spread {spread:.3e}"))?;
    Ok(format!(
        "{} iterations, |u(0)| = {center:.1e}, H spread {spread:.2e} over {} layer nodes",
        report.iterations,
        h.len()
    ))
}

fn rarefaction_sweep() -> Outcome {
    let p = ProfileProblem::burgers(-1.0, 1.0, 0.1).map_err(fail)?;
    let errors = sweep_l1(&p, &[0.1, 0.05, 0.025, 0.0125], (-2.0, 2.0), &SolveOptions::default()).map_err(fail)?;
    ensure(errors.windows(2).all(|w| w[1] < w[0]), format!("not decreasing: {}", sci(&errors)))?;
    ensure(errors[3] <= errors[0] / 2.0, format!("{:.3e} > {:.3e} / 2", errors[3], errors[0]))?;
    Ok(format!("L1 errors {}", sci(&errors)))
}

fn corner_profile() -> Outcome {
    let c = solve_corner(-8.0, 10.0, &StepControl::default()).map_err(fail)?;
    let barrier = BarrierUpper::new(10.0).map_err(fail)?;
    for (xi, u) in c.xi().iter().zip(&c.u) {
        ensure(
            barrier_lower(*xi) < *u && *u < barrier_upper(*xi, &barrier),
            format!("bracket violated at xi = {xi}: U = {u}"),
        )?;
    }
    let h = bvp::max_norm(&first_integral_h(&c, 1.0).map_err(fail)?);
    ensure(h <= 1e-8, format!("max |H| = {h:.3e}"))?;
    let fit = fit_tail_rate(&c, (4.0, 8.0)).map_err(fail)?;
    ensure((0.9..=1.1).contains(&fit.rate), format!("tail rate {}", fit.rate))?;
    let left = c.eval(-4.0).ok_or("U(-4) not covered")?;
    ensure(left < 1e-3, format!("U(-4) = {left:.3e}"))?;

    // independent re-integration at a tighter tolerance
    let tight = solve_corner(-8.0, 10.0, &StepControl { rtol: 1e-14, ..StepControl::default() }).map_err(fail)?;
    let (u0, u0_tight) = (c.eval(0.0).unwrap(), tight.eval(0.0).unwrap());
    ensure((u0 - u0_tight).abs() <= 1e-10, format!("U(0) = {u0} vs {u0_tight}"))?;
    Ok(format!(
        "{} nodes bracketed, max |H| = {h:.1e}, tail rate {:.4}, U(-4) = {left:.2e}, U(0) = {u0:.8}",
        c.len(),
        fit.rate
    ))
}

fn expansion_remainder() -> Outcome {
    let opts = SolveOptions::default();
    let schedule = [0.09, 0.04, 0.0225];
    let base = ProfileProblem::burgers(-1.0, 1.0, schedule[0]).map_err(fail)?;
    let start = expansion_corner_start(&base, schedule[2], &opts).map_err(fail)?;
    let corner = solve_corner(start, 10.0, &StepControl::default()).map_err(fail)?;
    let mut remainders = Vec::new();
    for eps in schedule {
        let p = base.with_epsilon(eps).map_err(fail)?;
        let (profile, _) = solve_profile(&p, &opts).map_err(fail)?;
        let r = check_corner_expansion(&profile, &corner, &p).map_err(fail)?;
        ensure(r.is_finite(), format!("remainder at eps = {eps} is {r}"))?;
        remainders.push(r);
    }
    let max = remainders.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = remainders.iter().cloned().fold(f64::INFINITY, f64::min);
    ensure(max / min <= 2.0, format!("ratio {:.3} from {remainders:.4?}", max / min))?;
    Ok(format!("normalized remainders {remainders:.4?}, ratio {:.4}", max / min))
}

fn uniqueness() -> Outcome {
    let opts = SolveOptions::default();
    let mut parts = Vec::new();
    for (name, ul, ur) in [("shock", 1.0, -1.0), ("rarefaction", -1.0, 1.0)] {
        let p = ProfileProblem::burgers(ul, ur, 0.05).map_err(fail)?;
        let report = uniqueness_probe(&p, &opts, 8, 2024).map_err(fail)?;
        ensure(report.converged >= 6, format!("{name}: only {} of 8 converged", report.converged))?;
        ensure(report.max_distance <= 1e-6, format!("{name}: distance {:.3e}", report.max_distance))?;
        parts.push(format!("{name} {}/8 within {:.1e}", report.converged, report.max_distance));
    }
    Ok(parts.join(", "))
}

fn comparison_margins() -> Outcome {
    let opts = SolveOptions::default();
    let rare = ProfileProblem::burgers(-1.0, 1.0, 0.05).map_err(fail)?;
    let shock = ProfileProblem::burgers(1.0, -1.0, 0.05).map_err(fail)?;
    let (rp, _) = solve_profile(&rare, &opts).map_err(fail)?;
    let (sp, _) = solve_profile(&shock, &opts).map_err(fail)?;

    let slide = sliding_supersolution_margin(&rp, &rare, 0.1).map_err(fail)?;
    let slide_floor = 10.0 * opts.newton_tol.max(slide.residual_floor);
    ensure(slide.value > slide_floor, format!("sliding margin {:.3e} <= {slide_floor:.3e}", slide.value))?;

    let sweep = sweeping_supersolution_margin(&sp, &shock, 0.1, 1.0).map_err(fail)?;
    let sweep_floor = 10.0 * opts.newton_tol.max(sweep.residual_floor);
    ensure(sweep.value > sweep_floor, format!("sweeping margin {:.3e} <= {sweep_floor:.3e}", sweep.value))?;

    // the truncated domain stops short of M, so pad it
    let m0 = sliding_constant_m(&rare, &rp).map_err(fail)?;
    let padded = SolveOptions { domain_pad: m0 - rp.mesh.hi() + 1.0, ..opts.clone() };
    let (wide, _) = solve_profile(&rare, &padded).map_err(fail)?;
    let m = sliding_constant_m(&rare, &wide).map_err(fail)?;
    let barrier = barrier_operator_margin(&rare, &wide, 0.1, m).map_err(fail)?;
    ensure(barrier < 0.0, format!("barrier operator max {barrier:.3e} beyond M = {m:.4}"))?;
    Ok(format!(
        "sliding {:.2e} > {slide_floor:.1e}, sweeping {:.2e} > {sweep_floor:.1e}, barrier {barrier:.2e} beyond M = {m:.3}",
        slide.value, sweep.value
    ))
}

fn discretization_order() -> Outcome {
    let p = ProfileProblem::burgers(1.0, -1.0, 0.05).map_err(fail)?;
    let coarse = SolveOptions::default().coarsened(4);
    let report = refinement_ratio(&p, &coarse, 8).map_err(fail)?;
    ensure((3.0..=5.0).contains(&report.ratio), format!("ratio {}", report.ratio))?;
    Ok(format!(
        "distances {:.3e} -> {:.3e}, ratio {:.3}",
        report.coarse_distance, report.fine_distance, report.ratio
    ))
}

fn cubic_flux() -> Outcome {
    let opts = SolveOptions::default();
    let p = ProfileProblem::new(cubic(), -1.0, 1.0, 0.1).map_err(fail)?;
    let window = (-1.0, 3.0);
    for eps in [0.1, 0.05, 0.025] {
        let (profile, report) = solve_profile(&p.with_epsilon(eps).map_err(fail)?, &opts).map_err(fail)?;
        ensure(report.converged, format!("eps = {eps} did not converge"))?;
        let slope = check_monotone(&profile, -1.0, 1.0);
        ensure(slope > 0.0, format!("eps = {eps}: not monotone ({slope:.3e})"))?;
    }
    let errors = sweep_l1(&p, &[0.1, 0.05, 0.025], window, &opts).map_err(fail)?;
    ensure(errors.windows(2).all(|w| w[1] < w[0]), format!("not decreasing: {}", sci(&errors)))?;
    Ok(format!("monotone, L1 errors {}", sci(&errors)))
}

fn jacobian_oracle(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let n = rng.gen_range(8..40);
        let mut x = vec![rng.gen_range(-3.0..-1.0)];
        for _ in 1..n {
            let last = *x.last().unwrap();
            x.push(last + rng.gen_range(0.02..0.3));
        }
        let u: Vec<f64> = x.iter().map(|_| rng.gen_range(-1.5..1.5)).collect();
        let flux = match rng.gen_range(0..3) {
            0 => FluxSpec::Burgers,
            1 => cubic(),
            _ => FluxSpec::Polynomial((0..5).map(|_| rng.gen_range(-1.0..1.0)).collect()),
        };
        let p = ProfileProblem::new(flux, u[0], u[n - 1], rng.gen_range(0.01..1.0)).map_err(fail)?;
        let profile = Profile::from_values(Mesh::new(x.clone()).map_err(fail)?, u.clone()).map_err(fail)?;
        let jac = bvp::jacobian(&p, &profile);
        let mut scale = 0.0_f64;
        let mut err = 0.0_f64;
        for j in 0..n {
            let h = 1e-6 * (1.0 + u[j].abs());
            let (mut plus, mut minus) = (u.clone(), u.clone());
            plus[j] += h;
            minus[j] -= h;
            let rp = bvp::residual_on(&p, &x, &plus);
            let rm = bvp::residual_on(&p, &x, &minus);
            for i in j.saturating_sub(1)..=(j + 1).min(n - 1) {
                let fd = (rp[i] - rm[i]) / (2.0 * h);
                let exact = if i + 1 == j {
                    jac.upper[i]
                } else if i == j {
                    jac.diag[i]
                } else {
                    jac.lower[i]
                };
                scale = scale.max(exact.abs());
                err = err.max((fd - exact).abs());
            }
        }
        worst = worst.max(err / scale);
    }
    ensure(worst <= 1e-6, format!("jacobian relative error {worst:.3e}"))?;
    Ok(worst)
}

/// Dense samples of the flux over the state interval.
struct FluxScan {
    lo: f64,
    step: f64,
    values: Vec<f64>,
}

impl FluxScan {
    const N: usize = 100_000;

    fn new(flux: &FluxSpec, ul: f64, ur: f64) -> Self {
        let (lo, hi) = if ul < ur { (ul, ur) } else { (ur, ul) };
        let step = (hi - lo) / Self::N as f64;
        let values = (0..=Self::N).map(|k| flux.eval(lo + step * k as f64)).collect();
        FluxScan { lo, step, values }
    }

    fn node(&self, k: usize) -> f64 {
        self.lo + self.step * k as f64
    }

    /// `argmin (f(u) - xi u)` over the states for increasing data, `argmax`
    /// for decreasing data, refined by bisection on `f'(u) = xi`.
    fn solution(&self, flux: &FluxSpec, increasing: bool, xi: f64) -> f64 {
        let sign = if increasing { 1.0 } else { -1.0 };
        let mut best = 0;
        let mut best_value = f64::INFINITY;
        for (k, f) in self.values.iter().enumerate() {
            let v = sign * (f - xi * self.node(k));
            if v < best_value {
                best_value = v;
                best = k;
            }
        }
        if best == 0 || best == Self::N {
            return self.node(best);
        }
        // the minimiser is a root of f' - xi in one of the neighbouring cells
        let (mut a, mut b) = (self.node(best - 1), self.node(best + 1));
        let d = |u: f64| flux.derivative(u) - xi;
        if d(a) * d(b) > 0.0 {
            return self.node(best);
        }
        for _ in 0..100 {
            let m = 0.5 * (a + b);
            if d(a) * d(m) <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        0.5 * (a + b)
    }
}

fn envelope_oracle(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut worst = 0.0_f64;
    for _ in 0..10 {
        let degree = rng.gen_range(3..=4);
        let coefficients: Vec<f64> = (0..=degree).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let flux = FluxSpec::polynomial(coefficients).map_err(fail)?;
        let ul: f64 = rng.gen_range(-1.5..1.5);
        let mut ur: f64 = rng.gen_range(-1.5..1.5);
        if (ur - ul).abs() < 0.2 {
            ur = ul + 0.5;
        }
        let sol: RiemannSolution = solve_exact(&flux, ul, ur);
        let (smin, smax) = flux.derivative_range(ul, ur);
        let scan = FluxScan::new(&flux, ul, ur);
        let shocks: Vec<f64> = sol.shocks().map(|s| s.0).collect();
        for k in 0..1000 {
            let xi = smin - 0.5 + (smax - smin + 1.0) * (k as f64 + 0.5) / 1000.0;
            if shocks.iter().any(|s| (s - xi).abs() < 1e-7) {
                continue;
            }
            let oracle = scan.solution(&flux, ur > ul, xi);
            worst = worst.max((sol.eval(xi) - oracle).abs());
        }
    }
    ensure(worst <= 1e-6, format!("envelope deviates from the scan by {worst:.3e}"))?;
    Ok(worst)
}

fn inversion_oracle(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let w: f64 = rng.gen_range(0.0..6.0);
        let target = 0.5 * w * w;
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if m - 1.0 - m.ln() > target {
                lo = m;
            } else {
                hi = m;
            }
        }
        let p = invert_first_integral(w).map_err(fail)?;
        worst = worst.max((p - 0.5 * (lo + hi)).abs());
    }
    ensure(worst <= 1e-12, format!("inversion deviates by {worst:.3e}"))?;
    Ok(worst)
}

fn oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let jac = jacobian_oracle(&mut rng)?;
    let env = envelope_oracle(&mut rng)?;
    let inv = inversion_oracle(&mut rng)?;
    Ok(format!("jacobian {jac:.1e}, envelope {env:.1e}, inversion {inv:.1e}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 10] = [
        ("1 constant case", constant_case, Duration::from_millis(100)),
        ("2 burgers shock", burgers_shock, Duration::from_secs(1)),
        ("3 rarefaction sweep", rarefaction_sweep, Duration::from_secs(5)),
        ("4 corner profile", corner_profile, Duration::from_secs(1)),
        ("5 expansion remainder", expansion_remainder, Duration::from_secs(5)),
        ("6 uniqueness probe", uniqueness, Duration::from_secs(10)),
        ("7 comparison margins", comparison_margins, Duration::from_secs(2)),
        ("8 discretization order", discretization_order, Duration::from_secs(5)),
        ("9 cubic flux", cubic_flux, Duration::from_secs(10)),
        ("10 oracle equivalences", oracles, Duration::from_secs(5)),
    ];
    let mut failures = 0;
    for (name, check, budget) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|detail| {
            if elapsed <= budget {
                Ok(detail)
            } else {
                Err(format!("{detail}; took {elapsed:.2?}, budget {budget:.2?}"))
            }
        });
        match outcome {
            Ok(detail) => println!("PASS  {name:<24} ({elapsed:.2?})  {detail}"),
            Err(reason) => {
                failures += 1;
                println!("FAIL  {name:<24} ({elapsed:.2?})  {reason}");
            }
        }
    }
    if failures > 0 {
        println!("{failures} of 10 criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
