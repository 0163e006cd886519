//! Numerical checks of the structural properties of viscous profiles:
//! monotonicity, symmetry, convergence to the Riemann fan, the corner-layer
//! expansion, comparison-principle margins and uniqueness.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bvp::{self, newton_solve, Profile, ProfileProblem, SolveOptions};
use crate::corner::CornerProfile;
use crate::error::{Result, WavefanError};
use crate::flux::chord_slope_q;
use crate::riemann::{self, RiemannSolution};

/// Translate margins are taken on nodes where `|u_xi|` is at least this
/// fraction of its maximum; farther out the slope is below rounding noise.
pub const MARGIN_SLOPE_FLOOR: f64 = 1e-4;
/// Differences of nodal values up to this many ulps of the state scale
/// count as flat in [`check_monotone`].
pub const MONOTONE_ULPS: f64 = 4.0;

/// Minimum of a pointwise defect over the sampled nodes, with the residual
/// level of the underlying profile for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Margin {
    pub value: f64,
    /// Max-norm of the profile's own interior residual.
    pub residual_floor: f64,
    pub samples: usize,
}

/// Constants and margins of one comparison-principle run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsRecord {
    /// Lipschitz constant `K` of `f'` on the state interval.
    pub lipschitz: f64,
    /// Threshold `M` beyond which the exponential barrier is used.
    pub sliding_threshold: f64,
    pub lambda: f64,
    pub margins: BTreeMap<String, f64>,
}

impl DiagnosticsRecord {
    pub fn validate(&self) -> Result<()> {
        if !(self.lipschitz >= 0.0) || !(self.sliding_threshold > 0.0) {
            return Err(WavefanError::param("diagnostics", "need K >= 0 and M > 0"));
        }
        if let Some((name, v)) = self.margins.iter().find(|(_, v)| !v.is_finite()) {
            return Err(WavefanError::param("diagnostics", format!("margin `{name}` is {v}")));
        }
        Ok(())
    }
}

/// Smallest oriented difference quotient `sign(uR - uL) du/dxi` between
/// neighbouring nodes, ignoring differences within [`MONOTONE_ULPS`] of
/// rounding. Returns 0 for equal states or a fully flat profile.
pub fn check_monotone(profile: &Profile, u_left: f64, u_right: f64) -> f64 {
    if u_left == u_right {
        return 0.0;
    }
    let sign = (u_right - u_left).signum();
    let resolution = MONOTONE_ULPS * f64::EPSILON * u_left.abs().max(u_right.abs()).max(1.0);
    let x = profile.xi();
    let mut min = f64::INFINITY;
    for (w, dx) in profile.u.windows(2).zip(x.windows(2)) {
        let du = w[1] - w[0];
        if du.abs() <= resolution {
            continue;
        }
        min = min.min(sign * du / (dx[1] - dx[0]));
    }
    if min.is_finite() {
        min
    } else {
        0.0
    }
}

/// `max |u(uL + uR - xi) + u(xi) - uL - uR|` over the nodes whose mirror
/// image lies inside the mesh.
pub fn check_symmetry(profile: &Profile, problem: &ProfileProblem) -> Result<f64> {
    require_burgers(problem, "odd symmetry")?;
    let total = problem.u_left + problem.u_right;
    let (lo, hi) = (profile.mesh.lo(), profile.mesh.hi());
    Ok(profile
        .xi()
        .iter()
        .zip(&profile.u)
        .filter(|(xi, _)| (total - **xi) >= lo && (total - **xi) <= hi)
        .map(|(xi, u)| (profile.eval(total - xi) + u - total).abs())
        .fold(0.0, f64::max))
}

/// Remainder of the corner-layer expansion
/// `u(xi) ~ sqrt(eps) U((xi - uL)/sqrt(eps)) + uL` on the left half of the
/// profile, scaled by `exp(1/sqrt(eps)) / sqrt(eps)`.
pub fn check_corner_expansion(
    profile: &Profile,
    corner: &CornerProfile,
    problem: &ProfileProblem,
) -> Result<f64> {
    if !(problem.u_left < problem.u_right) {
        return Err(WavefanError::Precondition(
            "corner expansion needs increasing data (uL < uR)".into(),
        ));
    }
    let s = problem.epsilon.sqrt();
    let middle = 0.5 * (problem.u_left + problem.u_right);
    let mut worst = 0.0_f64;
    for (xi, u) in profile.xi().iter().zip(&profile.u) {
        if *xi > middle {
            break;
        }
        let z = (xi - problem.u_left) / s;
        let corner_value = corner.eval(z).ok_or_else(|| {
            WavefanError::Coverage(format!(
                "corner profile on [{}, {}] does not reach z = {z:.4}",
                corner.mesh.lo(),
                corner.mesh.hi()
            ))
        })?;
        worst = worst.max((u - s * corner_value - problem.u_left).abs());
    }
    Ok(worst * (1.0 / s).exp() / s)
}

/// Trapezoid-rule `int |u - u*|` over `window`, split at mesh nodes and at
/// shocks of `exact`.
pub fn l1_window_error(profile: &Profile, exact: &RiemannSolution, window: (f64, f64)) -> Result<f64> {
    let (a, b) = window;
    if !(a < b) || a < profile.mesh.lo() || b > profile.mesh.hi() {
        return Err(WavefanError::InvalidWindow(format!(
            "[{a}, {b}] not inside the mesh [{}, {}]",
            profile.mesh.lo(),
            profile.mesh.hi()
        )));
    }
    let mut cuts: Vec<f64> = vec![a, b];
    cuts.extend(profile.xi().iter().copied().filter(|x| *x > a && *x < b));
    cuts.extend(exact.shocks().map(|s| s.0).filter(|s| *s > a && *s < b));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    Ok(cuts
        .windows(2)
        .map(|c| {
            let left = (profile.eval(c[0]) - exact.eval_right(c[0])).abs();
            let right = (profile.eval(c[1]) - exact.eval(c[1])).abs();
            0.5 * (c[1] - c[0]) * (left + right)
        })
        .sum())
}

/// Defect `(f'(v) - xi) v' - eps v''` of the sliding translate
/// `v(xi) = u(xi + lambda)` of an increasing profile, minimised over nodes
/// with significant slope.
pub fn sliding_supersolution_margin(profile: &Profile, problem: &ProfileProblem, lambda: f64) -> Result<Margin> {
    check_lambda(lambda)?;
    if !(problem.u_left < problem.u_right) {
        return Err(WavefanError::Precondition(
            "sliding needs increasing data (uL < uR); the inequality reverses otherwise".into(),
        ));
    }
    translate_margin(profile, problem, -lambda, &profile.u)
}

/// Defect of the sweeping translate `v(xi) = u(xi - 2 K lambda) + lambda` of
/// a decreasing profile, minimised over nodes with significant slope.
pub fn sweeping_supersolution_margin(
    profile: &Profile,
    problem: &ProfileProblem,
    lambda: f64,
    lipschitz: f64,
) -> Result<Margin> {
    check_lambda(lambda)?;
    if !(problem.u_left > problem.u_right) {
        return Err(WavefanError::Precondition("sweeping needs decreasing data (uL > uR)".into()));
    }
    let needed = problem.flux.lipschitz_of_derivative(problem.u_right, problem.u_left)?;
    if !(lipschitz >= needed) {
        return Err(WavefanError::Precondition(format!(
            "K = {lipschitz} is below the Lipschitz constant {needed} of f'"
        )));
    }
    let shift = 2.0 * lipschitz * lambda;
    let u: Vec<f64> = profile.u.iter().map(|u| u + lambda).collect();
    let shifted = ProfileProblem {
        u_left: problem.u_left + lambda,
        u_right: problem.u_right + lambda,
        ..problem.clone()
    };
    translate_margin(profile, &shifted, shift, &u)
}

fn translate_margin(profile: &Profile, problem: &ProfileProblem, shift: f64, u: &[f64]) -> Result<Margin> {
    let defect = bvp::residual_translated(problem, profile.xi(), u, shift);
    // boundary rows aside, the residual does not depend on the far-field states
    let own = bvp::residual(problem, profile);
    let n = profile.len();
    let residual_floor = bvp::max_norm(&own[1..n - 1]);
    let floor = MARGIN_SLOPE_FLOOR * profile.max_abs_slope();
    let mut value = f64::INFINITY;
    let mut samples = 0;
    for i in 1..n - 1 {
        if profile.du[i].abs() >= floor && floor > 0.0 {
            value = value.min(-defect[i]);
            samples += 1;
        }
    }
    if samples == 0 {
        return Err(WavefanError::Coverage("no nodes with significant slope".into()));
    }
    Ok(Margin {
        value,
        residual_floor,
        samples,
    })
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(WavefanError::param("lambda", format!("{lambda} must be finite and non-negative")));
    }
    Ok(())
}

/// `M = 1 + eps + sup|f'| + sup|u_xi| * K` over the state interval.
pub fn sliding_constant_m(problem: &ProfileProblem, profile: &Profile) -> Result<f64> {
    if !(problem.u_left < problem.u_right) {
        return Err(WavefanError::Precondition("needs increasing data (uL < uR)".into()));
    }
    let (a, b) = (problem.u_left, problem.u_right);
    let sup_speed = problem.flux.max_abs_derivative(a, b);
    let lipschitz = problem.flux.lipschitz_of_derivative(a, b)?;
    Ok(1.0 + problem.epsilon + sup_speed + profile.max_abs_slope() * lipschitz)
}

/// Which far field [`barrier_operator_margin_on`] samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FarField {
    Both,
    Left,
    Right,
}

/// Largest value of `eps g'' - (f'(v) - xi) g' - u_xi Q g` for
/// `g = exp(-|xi|)` at mesh nodes with `|xi| > M`, where `v` is the sliding
/// translate and `Q` the chord slope of `f'` between `v` and `u`.
pub fn barrier_operator_margin(problem: &ProfileProblem, profile: &Profile, lambda: f64, m: f64) -> Result<f64> {
    barrier_operator_margin_on(problem, profile, lambda, m, FarField::Both)
}

pub fn barrier_operator_margin_on(
    problem: &ProfileProblem,
    profile: &Profile,
    lambda: f64,
    m: f64,
    side: FarField,
) -> Result<f64> {
    check_lambda(lambda)?;
    if !(problem.u_left < problem.u_right) {
        return Err(WavefanError::Precondition("needs increasing data (uL < uR)".into()));
    }
    let eps = problem.epsilon;
    let mut worst = f64::NEG_INFINITY;
    for ((&xi, &u), &du) in profile.xi().iter().zip(&profile.u).zip(&profile.du) {
        let take = match side {
            FarField::Both => xi.abs() > m,
            FarField::Left => xi < -m,
            FarField::Right => xi > m,
        };
        if !take {
            continue;
        }
        let v = profile.eval(xi + lambda);
        let q = chord_slope_q(&problem.flux, v, u);
        let g = (-xi.abs()).exp();
        let dg = -xi.signum() * g;
        let value = eps * g - (problem.flux.derivative(v) - xi) * dg - du * q * g;
        worst = worst.max(value);
    }
    if worst == f64::NEG_INFINITY {
        return Err(WavefanError::Coverage(format!(
            "mesh [{}, {}] has no nodes beyond M = {m:.4}; enlarge the domain",
            profile.mesh.lo(),
            profile.mesh.hi()
        )));
    }
    Ok(worst)
}

/// Outcome of [`uniqueness_probe`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    /// Largest pairwise max-norm distance between converged profiles.
    pub max_distance: f64,
    pub converged: usize,
    pub attempted: usize,
    pub non_converged: usize,
}

/// Newton from `n_guesses` random monotone guesses on the final mesh of
/// [`bvp::solve_profile`], without continuation.
///
/// Guess `k` is a tanh front with random center and width, drawn from a
/// generator seeded by `(seed, k)`, so results do not depend on scheduling.
pub fn uniqueness_probe(
    problem: &ProfileProblem,
    opts: &SolveOptions,
    n_guesses: usize,
    seed: u64,
) -> Result<ProbeReport> {
    if n_guesses < 2 {
        return Err(WavefanError::param("n_guesses", format!("{n_guesses} < 2")));
    }
    opts.validate()?;
    let exact = riemann::solve_exact(&problem.flux, problem.u_left, problem.u_right);
    let mesh = bvp::stage_setup(problem, &exact, None, opts)?.mesh;
    let speeds = exact.wave_speeds();
    let (c_lo, c_hi) = speeds
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(*s), hi.max(*s)));
    let (c_lo, c_hi) = if c_lo.is_finite() { (c_lo - 0.5, c_hi + 0.5) } else { (-0.5, 0.5) };
    let sqrt_eps = problem.epsilon.sqrt();

    let runs: Vec<Option<Profile>> = (0..n_guesses)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let center = rng.gen_range(c_lo..=c_hi);
            let width = sqrt_eps * rng.gen_range(0.5..4.0);
            let n = mesh.len();
            let mut u: Vec<f64> = mesh
                .nodes()
                .iter()
                .map(|xi| {
                    let t = 0.5 * (1.0 + ((xi - center) / width).tanh());
                    problem.u_left + (problem.u_right - problem.u_left) * t
                })
                .collect();
            u[0] = problem.u_left;
            u[n - 1] = problem.u_right;
            let guess = Profile::from_values(mesh.clone(), u).ok()?;
            newton_solve(problem, &guess, opts).ok().map(|(p, _)| p)
        })
        .collect();

    let good: Vec<&Profile> = runs.iter().flatten().collect();
    if good.len() < 2 {
        return Err(WavefanError::InconclusiveProbe {
            converged: good.len(),
            attempted: n_guesses,
        });
    }
    let mut max_distance = 0.0_f64;
    for i in 0..good.len() {
        for j in i + 1..good.len() {
            let d = good[i]
                .u
                .iter()
                .zip(&good[j].u)
                .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
            max_distance = max_distance.max(d);
        }
    }
    Ok(ProbeReport {
        max_distance,
        converged: good.len(),
        attempted: n_guesses,
        non_converged: n_guesses - good.len(),
    })
}

/// Residual of a translated profile with the rounding level of its samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TranslationCheck {
    /// Max interior residual of the translated samples.
    pub residual: f64,
    /// [`bvp::rounding_floor`] of the translated samples.
    pub rounding_floor: f64,
}

/// Residual of `u(xi - lambda) + lambda`, which solves the same Burgers
/// equation with shifted far-field states.
pub fn translation_invariance_check(profile: &Profile, problem: &ProfileProblem, lambda: f64) -> Result<TranslationCheck> {
    require_burgers(problem, "translation invariance")?;
    if !lambda.is_finite() {
        return Err(WavefanError::param("lambda", "must be finite"));
    }
    let u: Vec<f64> = profile.u.iter().map(|u| u + lambda).collect();
    let shifted = ProfileProblem {
        u_left: problem.u_left + lambda,
        u_right: problem.u_right + lambda,
        ..problem.clone()
    };
    let r = bvp::residual_translated(&shifted, profile.xi(), &u, lambda);
    let x: Vec<f64> = profile.xi().iter().map(|x| x + lambda).collect();
    Ok(TranslationCheck {
        residual: bvp::max_norm(&r[1..r.len() - 1]),
        rounding_floor: bvp::rounding_floor(&shifted, &x, &u),
    })
}

fn require_burgers(problem: &ProfileProblem, what: &str) -> Result<()> {
    if problem.flux.is_burgers() {
        Ok(())
    } else {
        Err(WavefanError::UnsupportedFlux(format!(
            "{what} holds for the Burgers flux only, got `{}`",
            problem.flux
        )))
    }
}

/// Distances to a fine reference on nested meshes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RefinementReport {
    /// Max distance from the `opts` solution to the reference, at its nodes.
    pub coarse_distance: f64,
    /// Same for the solution with every spacing halved.
    pub fine_distance: f64,
    /// `coarse_distance / fine_distance`; about 4 for a second-order scheme.
    pub ratio: f64,
}

/// Solves on the mesh of `opts`, on the mesh with halved spacings and on a
/// reference mesh refined `reference_factor` times (a power of two, at
/// least 4), and compares at the coarse nodes, which all three meshes share.
pub fn refinement_ratio(problem: &ProfileProblem, opts: &SolveOptions, reference_factor: usize) -> Result<RefinementReport> {
    if reference_factor < 4 || !reference_factor.is_power_of_two() {
        return Err(WavefanError::param(
            "reference_factor",
            format!("{reference_factor} must be a power of two, at least 4"),
        ));
    }
    let (coarse, _) = bvp::solve_profile(problem, opts)?;
    let (fine, _) = bvp::solve_profile(problem, &opts.refined(2))?;
    let (reference, _) = bvp::solve_profile(problem, &opts.refined(reference_factor))?;
    let at = |p: &Profile, stride: usize| -> f64 {
        (0..coarse.len())
            .map(|k| (p.u[k * stride] - reference.u[k * reference_factor]).abs())
            .fold(0.0, f64::max)
    };
    check_nested(&coarse, &fine, 2)?;
    check_nested(&coarse, &reference, reference_factor)?;
    let coarse_distance = at(&coarse, 1);
    let fine_distance = at(&fine, 2);
    Ok(RefinementReport {
        coarse_distance,
        fine_distance,
        ratio: coarse_distance / fine_distance,
    })
}

fn check_nested(coarse: &Profile, fine: &Profile, stride: usize) -> Result<()> {
    if fine.len() != (coarse.len() - 1) * stride + 1 {
        return Err(WavefanError::Precondition("meshes are not nested".into()));
    }
    for (k, xi) in coarse.xi().iter().enumerate() {
        let xj = fine.xi()[k * stride];
        if (xj - xi).abs() > 1e-9 * (1.0 + xi.abs()) {
            return Err(WavefanError::Precondition(format!(
                "meshes are not nested at xi = {xi} (found {xj})"
            )));
        }
    }
    Ok(())
}

/// Result of one named check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl CheckOutcome {
    pub fn at_most(value: f64, threshold: f64) -> Self {
        CheckOutcome {
            value,
            threshold,
            pass: value <= threshold,
        }
    }

    pub fn above(value: f64, threshold: f64) -> Self {
        CheckOutcome {
            value,
            threshold,
            pass: value > threshold,
        }
    }

    pub fn below(value: f64, threshold: f64) -> Self {
        CheckOutcome {
            value,
            threshold,
            pass: value < threshold,
        }
    }
}

/// Names accepted by [`run_check`], in battery order.
pub const CHECK_NAMES: &[&str] = &[
    "constant_solution",
    "shock_iterations",
    "shock_monotone",
    "shock_center",
    "shock_first_integral_spread",
    "rarefaction_symmetry",
    "rarefaction_l1_decreasing",
    "rarefaction_l1_halving",
    "corner_bracket",
    "corner_first_integral",
    "corner_tail_rate",
    "corner_left_tail",
    "expansion_ratio",
    "uniqueness_shock",
    "uniqueness_rarefaction",
    "sliding_margin",
    "sweeping_margin",
    "barrier_operator",
    "translation_invariance",
    "refinement_order",
    "cubic_monotone",
    "cubic_l1_decreasing",
];

/// Fraction of the peak slope delimiting the layer on which the first
/// integral of a viscous profile is compared across nodes.
pub const FIRST_INTEGRAL_CORE: f64 = 0.1;
/// Minimum number of converged runs for a uniqueness check to pass.
pub const PROBE_MIN_CONVERGED: usize = 6;

/// Runs the named check on the standard test problems (Burgers shock and
/// rarefaction between -1 and 1, the cubic flux, the corner profile).
pub fn run_check(name: &str, opts: &SolveOptions, seed: u64) -> Result<CheckOutcome> {
    use crate::corner::{self, barrier_lower, barrier_upper, BarrierUpper};
    use crate::flux::FluxSpec;
    use crate::rk::StepControl;

    let shock = ProfileProblem::burgers(1.0, -1.0, 0.05)?;
    let rarefaction = ProfileProblem::burgers(-1.0, 1.0, 0.05)?;
    let tol = |floor: f64| 10.0 * opts.newton_tol.max(floor);
    let decreasing = |errors: &[f64]| errors.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);

    Ok(match name {
        "constant_solution" => {
            let p = ProfileProblem::burgers(0.3, 0.3, 0.2)?;
            let (profile, report) = bvp::solve_profile(&p, opts)?;
            let deviation = profile.u.iter().fold(0.0_f64, |m, u| m.max((u - 0.3).abs()));
            CheckOutcome::at_most(deviation.max(report.final_residual()), 1e-12)
        }
        "shock_iterations" => {
            let (_, report) = bvp::solve_profile(&shock, opts)?;
            CheckOutcome::at_most(report.iterations as f64, 30.0)
        }
        "shock_monotone" => {
            let (profile, _) = bvp::solve_profile(&shock, opts)?;
            CheckOutcome::above(check_monotone(&profile, 1.0, -1.0), 0.0)
        }
        "shock_center" => {
            let (profile, _) = bvp::solve_profile(&shock, opts)?;
            CheckOutcome::at_most(profile.eval(0.0).abs(), 1e-8)
        }
        "shock_first_integral_spread" => {
            let (profile, _) = bvp::solve_profile(&shock, opts)?;
            let h = corner::first_integral_h(&profile.core(FIRST_INTEGRAL_CORE)?, shock.epsilon)?;
            let (lo, hi) = h.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
            CheckOutcome::at_most(hi - lo, 1e-5)
        }
        "rarefaction_symmetry" => {
            let (profile, _) = bvp::solve_profile(&rarefaction, opts)?;
            CheckOutcome::at_most(check_symmetry(&profile, &rarefaction)?, 1e-6)
        }
        "rarefaction_l1_decreasing" | "rarefaction_l1_halving" => {
            let errors = sweep_l1(&rarefaction, &[0.1, 0.05, 0.025, 0.0125], (-2.0, 2.0), opts)?;
            if name == "rarefaction_l1_decreasing" {
                CheckOutcome::below(decreasing(&errors), 1.0)
            } else {
                CheckOutcome::at_most(errors[3] / errors[0], 0.5)
            }
        }
        "corner_bracket" | "corner_first_integral" | "corner_tail_rate" | "corner_left_tail" => {
            let c = corner::solve_corner(corner::DEFAULT_XI_MIN, corner::DEFAULT_XI_MAX, &StepControl::default())?;
            match name {
                "corner_bracket" => {
                    let b = BarrierUpper::default();
                    let gap = c
                        .xi()
                        .iter()
                        .zip(&c.u)
                        .map(|(xi, u)| (u - barrier_lower(*xi)).min(barrier_upper(*xi, &b) - u))
                        .fold(f64::INFINITY, f64::min);
                    CheckOutcome::above(gap, 0.0)
                }
                "corner_first_integral" => {
                    let h = corner::first_integral_h(&c, 1.0)?;
                    CheckOutcome::at_most(bvp::max_norm(&h), 1e-8)
                }
                "corner_tail_rate" => {
                    let fit = corner::fit_tail_rate(&c, (4.0, 8.0))?;
                    CheckOutcome::at_most((fit.rate - 1.0).abs(), 0.1)
                }
                _ => CheckOutcome::below(c.eval(-4.0).unwrap_or(f64::NAN), 1e-3),
            }
        }
        "expansion_ratio" => {
            let schedule = [0.09, 0.04, 0.0225];
            let corner = corner::solve_corner(
                expansion_corner_start(&rarefaction, schedule[2], opts)?,
                corner::DEFAULT_XI_MAX,
                &StepControl::default(),
            )?;
            let mut remainders = Vec::new();
            for eps in schedule {
                let p = rarefaction.with_epsilon(eps)?;
                let (profile, _) = bvp::solve_profile(&p, opts)?;
                remainders.push(check_corner_expansion(&profile, &corner, &p)?);
            }
            let max = remainders.iter().cloned().fold(0.0, f64::max);
            let min = remainders.iter().cloned().fold(f64::INFINITY, f64::min);
            CheckOutcome::at_most(max / min, 2.0)
        }
        "uniqueness_shock" | "uniqueness_rarefaction" => {
            let p = if name == "uniqueness_shock" { &shock } else { &rarefaction };
            let report = uniqueness_probe(p, opts, 8, seed)?;
            let mut outcome = CheckOutcome::at_most(report.max_distance, 1e-6);
            outcome.pass &= report.converged >= PROBE_MIN_CONVERGED;
            outcome
        }
        "sliding_margin" => {
            let (profile, _) = bvp::solve_profile(&rarefaction, opts)?;
            let m = sliding_supersolution_margin(&profile, &rarefaction, 0.1)?;
            CheckOutcome::above(m.value, tol(m.residual_floor))
        }
        "sweeping_margin" => {
            let (profile, _) = bvp::solve_profile(&shock, opts)?;
            let m = sweeping_supersolution_margin(&profile, &shock, 0.1, 1.0)?;
            CheckOutcome::above(m.value, tol(m.residual_floor))
        }
        "barrier_operator" => {
            let (unpadded, _) = bvp::solve_profile(&rarefaction, opts)?;
            let m = sliding_constant_m(&rarefaction, &unpadded)?;
            let padded = SolveOptions {
                domain_pad: opts.domain_pad.max(m - unpadded.mesh.hi() + 1.0),
                ..opts.clone()
            };
            let (profile, _) = bvp::solve_profile(&rarefaction, &padded)?;
            let m = sliding_constant_m(&rarefaction, &profile)?;
            CheckOutcome::below(barrier_operator_margin(&rarefaction, &profile, 0.1, m)?, 0.0)
        }
        "translation_invariance" => {
            let (profile, _) = bvp::solve_profile(&shock, opts)?;
            let check = translation_invariance_check(&profile, &shock, 0.7)?;
            CheckOutcome::at_most(check.residual, bvp::FLOOR_FACTOR * check.rounding_floor)
        }
        "refinement_order" => {
            let coarse = opts.coarsened(4);
            let report = refinement_ratio(&shock, &coarse, 8)?;
            CheckOutcome::at_most((report.ratio - 4.0).abs(), 1.0)
        }
        "cubic_monotone" | "cubic_l1_decreasing" => {
            let cubic = ProfileProblem::new(FluxSpec::Polynomial(vec![0.0, 0.0, 0.0, 1.0]), -1.0, 1.0, 0.1)?;
            if name == "cubic_monotone" {
                let (profile, _) = bvp::solve_profile(&cubic.with_epsilon(0.025)?, opts)?;
                CheckOutcome::above(check_monotone(&profile, -1.0, 1.0), 0.0)
            } else {
                let errors = sweep_l1(&cubic, &[0.1, 0.05, 0.025], (-1.0, 3.0), opts)?;
                CheckOutcome::below(decreasing(&errors), 1.0)
            }
        }
        other => {
            return Err(WavefanError::Parse(format!(
                "unknown check `{other}` (known: {})",
                CHECK_NAMES.join(", ")
            )))
        }
    })
}

/// Runs every check in [`CHECK_NAMES`]; a check that errors is reported as
/// a failure with a NaN value.
pub fn run_battery(opts: &SolveOptions, seed: u64) -> BTreeMap<String, CheckOutcome> {
    CHECK_NAMES
        .iter()
        .map(|name| {
            let outcome = run_check(name, opts, seed).unwrap_or(CheckOutcome {
                value: f64::NAN,
                threshold: f64::NAN,
                pass: false,
            });
            (name.to_string(), outcome)
        })
        .collect()
}

/// L1 errors against the Riemann solution for each `eps`, on meshes padded
/// so that they cover `window`.
pub fn sweep_l1(problem: &ProfileProblem, eps_list: &[f64], window: (f64, f64), opts: &SolveOptions) -> Result<Vec<f64>> {
    let exact = riemann::solve_exact(&problem.flux, problem.u_left, problem.u_right);
    sweep_profiles(problem, eps_list, window, opts)?
        .iter()
        .map(|(_, profile)| l1_window_error(profile, &exact, window))
        .collect()
}

/// One profile per `eps`, each on a mesh padded to cover `window`.
pub fn sweep_profiles(
    problem: &ProfileProblem,
    eps_list: &[f64],
    window: (f64, f64),
    opts: &SolveOptions,
) -> Result<Vec<(f64, Profile)>> {
    bvp::check_decreasing(eps_list)?;
    eps_list
        .iter()
        .map(|&eps| {
            let p = problem.with_epsilon(eps)?;
            let (lo, hi) = bvp::truncate_domain(&p, opts.tail_tol)?;
            let pad = opts.domain_pad.max(lo - window.0).max(window.1 - hi).max(0.0);
            let padded = SolveOptions {
                domain_pad: if pad > opts.domain_pad { pad + 0.1 } else { pad },
                ..opts.clone()
            };
            Ok((eps, bvp::solve_profile(&p, &padded)?.0))
        })
        .collect()
}

/// Left end for a corner profile covering the rescaled left half of every
/// profile with `eps >= smallest_eps`, one unit of margin included.
pub fn expansion_corner_start(problem: &ProfileProblem, smallest_eps: f64, opts: &SolveOptions) -> Result<f64> {
    let p = problem.with_epsilon(smallest_eps)?;
    let (lo, _) = bvp::truncate_domain(&p, opts.tail_tol)?;
    let z = (lo - opts.domain_pad - problem.u_left) / smallest_eps.sqrt();
    Ok((z - 1.0).min(crate::corner::DEFAULT_XI_MIN).floor())
}
