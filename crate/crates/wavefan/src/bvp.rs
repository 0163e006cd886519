//! Viscous wave fan profiles: the two-point boundary value problem
//!
//! ```text
//! eps u'' = (f'(u) - xi) u',   u(-inf) = uL,   u(+inf) = uR
//! ```
//!
//! truncated to a finite window with Dirichlet data, discretized by
//! second-order central differences on a graded mesh and solved by damped
//! Newton iteration with continuation in `eps`.

use serde::Serialize;

use crate::error::{Result, WavefanError};
use crate::flux::FluxSpec;
use crate::mesh::{interp_linear, Mesh};
use crate::riemann::{self, RiemannSolution};
use crate::tridiag::Tridiagonal;

/// Maximum number of step halvings per Newton iteration.
pub const MAX_HALVINGS: usize = 30;
/// Multiple of the rounding floor at which Newton stops regardless of
/// `newton_tol`, see [`rounding_floor`].
pub const FLOOR_FACTOR: f64 = 4.0;
/// Mesh coarsening applied to every continuation stage but the last.
pub const INTERMEDIATE_COARSENING: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileProblem {
    pub epsilon: f64,
    pub u_left: f64,
    pub u_right: f64,
    pub flux: FluxSpec,
}

impl ProfileProblem {
    pub fn new(flux: FluxSpec, u_left: f64, u_right: f64, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(WavefanError::param("epsilon", format!("{epsilon} must be positive")));
        }
        if !u_left.is_finite() || !u_right.is_finite() {
            return Err(WavefanError::param("states", "far-field states must be finite"));
        }
        Ok(ProfileProblem {
            epsilon,
            u_left,
            u_right,
            flux,
        })
    }

    pub fn burgers(u_left: f64, u_right: f64, epsilon: f64) -> Result<Self> {
        Self::new(FluxSpec::Burgers, u_left, u_right, epsilon)
    }

    /// Same far-field data at another `eps`.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(self.flux.clone(), self.u_left, self.u_right, epsilon)
    }

    /// `+1` for increasing data, `-1` for decreasing, `0` for constant.
    pub fn orientation(&self) -> f64 {
        if self.u_right > self.u_left {
            1.0
        } else if self.u_right < self.u_left {
            -1.0
        } else {
            0.0
        }
    }
}

/// Nodal values of a profile plus the reconstructed slope `u_xi`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub mesh: Mesh,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
}

impl Profile {
    /// Builds a profile from nodal values, reconstructing `du` with
    /// second-order differences (central inside, one-sided at the ends).
    pub fn from_values(mesh: Mesh, u: Vec<f64>) -> Result<Self> {
        if u.len() != mesh.len() {
            return Err(WavefanError::param(
                "profile",
                format!("{} values for {} nodes", u.len(), mesh.len()),
            ));
        }
        let du = reconstruct_slope(mesh.nodes(), &u);
        Ok(Profile { mesh, u, du })
    }

    pub fn xi(&self) -> &[f64] {
        self.mesh.nodes()
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// Linear interpolation, clamped to the end values outside the mesh.
    pub fn eval(&self, xi: f64) -> f64 {
        interp_linear(self.xi(), &self.u, xi)
    }

    pub fn max_abs_slope(&self) -> f64 {
        self.du.iter().fold(0.0, |m, d| m.max(d.abs()))
    }

    /// The contiguous block of nodes around the steepest node where
    /// `|du| >= rel_floor * max |du|`, with the original slopes.
    pub fn core(&self, rel_floor: f64) -> Result<Profile> {
        let peak = self
            .du
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let floor = rel_floor * self.du[peak].abs();
        let mut lo = peak;
        while lo > 0 && self.du[lo - 1].abs() >= floor {
            lo -= 1;
        }
        let mut hi = peak;
        while hi + 1 < self.len() && self.du[hi + 1].abs() >= floor {
            hi += 1;
        }
        Ok(Profile {
            mesh: Mesh::new(self.xi()[lo..=hi].to_vec())?,
            u: self.u[lo..=hi].to_vec(),
            du: self.du[lo..=hi].to_vec(),
        })
    }
}

/// Newton and discretization controls.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveOptions {
    /// Stop when the residual max-norm is at most this.
    pub newton_tol: f64,
    /// Newton iterations allowed per continuation stage.
    pub max_iter: usize,
    /// Step reduction factor for backtracking.
    pub damping: f64,
    /// Far-field truncation tolerance, see [`truncate_domain`].
    pub tail_tol: f64,
    /// Intervals of the uniform part of the mesh.
    pub base_nodes: usize,
    /// Extra intervals concentrated around each layer.
    pub nodes_per_layer: usize,
    /// Extra width added on both sides of the truncated domain.
    pub domain_pad: f64,
    /// Decreasing `eps` schedule ending at the target; empty selects the
    /// default geometric schedule.
    pub continuation: Vec<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            newton_tol: 1e-10,
            max_iter: 50,
            damping: 0.5,
            tail_tol: 1e-12,
            base_nodes: 1000,
            nodes_per_layer: 6000,
            domain_pad: 0.0,
            continuation: Vec::new(),
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.newton_tol > 0.0) {
            return Err(WavefanError::param("newton_tol", "must be positive"));
        }
        if self.max_iter < 1 {
            return Err(WavefanError::param("max_iter", "must be at least 1"));
        }
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(WavefanError::param("damping", "must lie in (0, 1)"));
        }
        if !(self.tail_tol > 0.0 && self.tail_tol < 1.0) {
            return Err(WavefanError::param("tail_tol", "must lie in (0, 1)"));
        }
        if !(self.domain_pad >= 0.0) {
            return Err(WavefanError::param("domain_pad", "must be non-negative"));
        }
        check_decreasing(&self.continuation)
    }

    /// Scales both mesh counts, e.g. `2` halves every spacing.
    pub fn refined(&self, factor: usize) -> Self {
        SolveOptions {
            base_nodes: self.base_nodes * factor,
            nodes_per_layer: self.nodes_per_layer * factor,
            ..self.clone()
        }
    }

    /// Divides both mesh counts by `factor` (keeping a usable minimum).
    pub fn coarsened(&self, factor: usize) -> Self {
        SolveOptions {
            base_nodes: (self.base_nodes / factor).max(50),
            nodes_per_layer: (self.nodes_per_layer / factor).max(50),
            ..self.clone()
        }
    }

    /// The stages to run for `target`.
    pub fn schedule(&self, target: f64) -> Result<Vec<f64>> {
        if self.continuation.is_empty() {
            return Ok(default_schedule(target));
        }
        check_decreasing(&self.continuation)?;
        let last = *self.continuation.last().unwrap();
        if (last - target).abs() > 1e-12 * target {
            return Err(WavefanError::param(
                "continuation",
                format!("schedule ends at {last}, target is {target}"),
            ));
        }
        Ok(self.continuation.clone())
    }
}

/// Geometric schedule from `max(target, 1)` down to `target`, ratio 1/2.
pub fn default_schedule(target: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut eps = target.max(1.0);
    while eps > target * (1.0 + 1e-9) {
        out.push(eps);
        eps *= 0.5;
    }
    out.push(target);
    out
}

pub(crate) fn check_decreasing(list: &[f64]) -> Result<()> {
    if let Some(bad) = list.iter().find(|e| !(**e > 0.0) || !e.is_finite()) {
        return Err(WavefanError::param("eps", format!("{bad} is not a positive value")));
    }
    if let Some(w) = list.windows(2).find(|w| !(w[1] < w[0])) {
        return Err(WavefanError::param(
            "eps",
            format!("schedule must be strictly decreasing ({} then {})", w[0], w[1]),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageReport {
    pub epsilon: f64,
    pub iterations: usize,
    pub residual: f64,
    pub mesh_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub converged: bool,
    /// Newton iterations summed over all stages.
    pub iterations: usize,
    /// Residual max-norm after each accepted step of the last stage,
    /// starting with the initial residual.
    pub residual_history: Vec<f64>,
    pub domain: (f64, f64),
    pub mesh_size: usize,
    pub stages: Vec<StageReport>,
}

impl SolveReport {
    pub fn final_residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(f64::NAN)
    }
}

/// Truncated window `[m - d, M + d]`, where `[m, M]` is the range of `f'`
/// over the states and `d = sqrt(2 eps ln(1/tail_tol)) + sqrt(eps)`.
pub fn truncate_domain(problem: &ProfileProblem, tail_tol: f64) -> Result<(f64, f64)> {
    if !(tail_tol > 0.0 && tail_tol < 1.0) {
        return Err(WavefanError::param("tail_tol", format!("{tail_tol} must lie in (0, 1)")));
    }
    let (m, big_m) = problem.flux.derivative_range(problem.u_left, problem.u_right);
    let eps = problem.epsilon;
    let pad = (2.0 * eps * (1.0 / tail_tol).ln()).sqrt() + eps.sqrt();
    Ok((m - pad, big_m + pad))
}

/// Graded mesh for `problem` on `domain`, refined around the characteristic
/// speeds of the far-field states and every wave edge of `exact`.
pub fn build_mesh(
    problem: &ProfileProblem,
    exact: &RiemannSolution,
    domain: (f64, f64),
    opts: &SolveOptions,
) -> Result<Mesh> {
    let mut centers = vec![
        problem.flux.derivative(problem.u_left),
        problem.flux.derivative(problem.u_right),
    ];
    centers.extend(exact.wave_speeds());
    centers.retain(|c| *c > domain.0 && *c < domain.1);
    Mesh::graded(
        domain.0,
        domain.1,
        &centers,
        problem.epsilon.sqrt(),
        opts.base_nodes,
        opts.nodes_per_layer,
    )
}

/// Exact Riemann solution smoothed by a moving average of width `sqrt(eps)`.
pub fn initial_guess(problem: &ProfileProblem, mesh: &Mesh) -> Profile {
    let exact = riemann::solve_exact(&problem.flux, problem.u_left, problem.u_right);
    initial_guess_from(problem, mesh, &exact)
}

pub fn initial_guess_from(problem: &ProfileProblem, mesh: &Mesh, exact: &RiemannSolution) -> Profile {
    const TAPS: usize = 21;
    let width = problem.epsilon.sqrt();
    let mut u: Vec<f64> = mesh
        .nodes()
        .iter()
        .map(|&xi| {
            let sum: f64 = (0..TAPS)
                .map(|j| {
                    let offset = width * (j as f64 / (TAPS - 1) as f64 - 0.5);
                    exact.eval(xi + offset)
                })
                .sum();
            sum / TAPS as f64
        })
        .collect();
    let n = u.len();
    u[0] = problem.u_left;
    u[n - 1] = problem.u_right;
    Profile::from_values(mesh.clone(), u).expect("lengths match")
}

/// Finite-difference weights at interior node `i`, for `u'` and `u''`.
#[derive(Debug, Clone, Copy)]
struct Stencil {
    d1: [f64; 3],
    d2: [f64; 3],
}

fn stencil(x: &[f64], i: usize) -> Stencil {
    let hm = x[i] - x[i - 1];
    let hp = x[i + 1] - x[i];
    let s = hm + hp;
    Stencil {
        d1: [-hp / (hm * s), (hp - hm) / (hm * hp), hm / (hp * s)],
        d2: [2.0 / (hm * s), -2.0 / (hm * hp), 2.0 / (hp * s)],
    }
}

/// `u'` at interior node `i` from one-sided differences (better roundoff
/// than the weight form when `u` is nearly constant).
fn first_difference(x: &[f64], u: &[f64], i: usize) -> f64 {
    let hm = x[i] - x[i - 1];
    let hp = x[i + 1] - x[i];
    (hm * hm * (u[i + 1] - u[i]) + hp * hp * (u[i] - u[i - 1])) / (hm * hp * (hm + hp))
}

fn second_difference(x: &[f64], u: &[f64], i: usize) -> f64 {
    let hm = x[i] - x[i - 1];
    let hp = x[i + 1] - x[i];
    2.0 * ((u[i + 1] - u[i]) / hp - (u[i] - u[i - 1]) / hm) / (hm + hp)
}

fn reconstruct_slope(x: &[f64], u: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut du = vec![0.0; n];
    for i in 1..n - 1 {
        du[i] = first_difference(x, u, i);
    }
    // one-sided second-order differences in difference form, exact zero on constants
    let one_sided = |d1: f64, d2: f64, h1: f64, h2: f64| {
        let s = h1 + h2;
        (d1 * s * s - d2 * h1 * h1) / (h1 * h2 * s)
    };
    du[0] = one_sided(u[1] - u[0], u[2] - u[0], x[1] - x[0], x[2] - x[1]);
    du[n - 1] = one_sided(
        u[n - 2] - u[n - 1],
        u[n - 3] - u[n - 1],
        x[n - 2] - x[n - 1],
        x[n - 3] - x[n - 2],
    );
    du
}

/// Discrete residual: `eps D2 u - (f'(u) - xi) D1 u` inside, `u - uL` and
/// `u - uR` at the ends.
pub fn residual(problem: &ProfileProblem, profile: &Profile) -> Vec<f64> {
    residual_on(problem, profile.xi(), &profile.u)
}

/// [`residual`] on raw nodes and values.
pub fn residual_on(problem: &ProfileProblem, x: &[f64], u: &[f64]) -> Vec<f64> {
    residual_translated(problem, x, u, 0.0)
}

/// Residual of the samples `u` placed at the nodes `x + shift`.
///
/// Difference stencils are built from `x` itself, so the translated mesh
/// keeps exactly the spacings of `x` instead of re-rounded ones.
pub fn residual_translated(problem: &ProfileProblem, x: &[f64], u: &[f64], shift: f64) -> Vec<f64> {
    let n = x.len();
    let eps = problem.epsilon;
    let mut r = vec![0.0; n];
    r[0] = u[0] - problem.u_left;
    r[n - 1] = u[n - 1] - problem.u_right;
    for i in 1..n - 1 {
        let a = problem.flux.derivative(u[i]) - (x[i] + shift);
        r[i] = eps * second_difference(x, u, i) - a * first_difference(x, u, i);
    }
    r
}

pub fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Exact derivative of [`residual`] with respect to the nodal values.
pub fn jacobian(problem: &ProfileProblem, profile: &Profile) -> Tridiagonal {
    jacobian_of(problem, profile.xi(), &profile.u)
}

fn jacobian_of(problem: &ProfileProblem, x: &[f64], u: &[f64]) -> Tridiagonal {
    let n = x.len();
    let eps = problem.epsilon;
    let mut jac = Tridiagonal::zeros(n);
    jac.diag[0] = 1.0;
    jac.diag[n - 1] = 1.0;
    for i in 1..n - 1 {
        let st = stencil(x, i);
        let a = problem.flux.derivative(u[i]) - x[i];
        let curvature = problem.flux.second_derivative(u[i]) * first_difference(x, u, i);
        jac.lower[i] = eps * st.d2[0] - a * st.d1[0];
        jac.diag[i] = eps * st.d2[1] - a * st.d1[1] - curvature;
        jac.upper[i] = eps * st.d2[2] - a * st.d1[2];
    }
    jac
}

/// Size of the residual change caused by rounding `u` to working
/// precision, `EPS * max_i sum_j |J_ij| |u_j|`. On fine meshes this grows
/// like `eps * ulp / h^2` and can exceed any fixed tolerance.
pub fn rounding_floor(problem: &ProfileProblem, x: &[f64], u: &[f64]) -> f64 {
    let jac = jacobian_of(problem, x, u);
    let n = u.len();
    let mut worst = 0.0_f64;
    for i in 0..n {
        let mut row = jac.diag[i].abs() * u[i].abs();
        if i > 0 {
            row += jac.lower[i].abs() * u[i - 1].abs();
        }
        if i + 1 < n {
            row += jac.upper[i].abs() * u[i + 1].abs();
        }
        worst = worst.max(row);
    }
    f64::EPSILON * worst
}

/// Damped Newton iteration from `guess` on the guess's mesh.
///
/// Stops once the residual max-norm is at most `newton_tol`, or at most
/// [`FLOOR_FACTOR`] times the [`rounding_floor`] of the guess when that is
/// larger.
pub fn newton_solve(
    problem: &ProfileProblem,
    guess: &Profile,
    opts: &SolveOptions,
) -> Result<(Profile, SolveReport)> {
    opts.validate()?;
    let x = guess.xi();
    let n = x.len();
    let boundary_gap = (guess.u[0] - problem.u_left)
        .abs()
        .max((guess.u[n - 1] - problem.u_right).abs());
    if boundary_gap > opts.newton_tol {
        return Err(WavefanError::Precondition(format!(
            "guess misses the boundary values by {boundary_gap:.3e}"
        )));
    }

    let mut u = guess.u.clone();
    let mut r = residual_on(problem, x, &u);
    let mut norm = max_norm(&r);
    let mut history = vec![norm];
    let mut iterations = 0;
    let report = |converged: bool, iterations: usize, history: Vec<f64>| SolveReport {
        converged,
        iterations,
        residual_history: history,
        domain: (x[0], x[n - 1]),
        mesh_size: n,
        stages: Vec::new(),
    };

    let target = opts.newton_tol.max(FLOOR_FACTOR * rounding_floor(problem, x, &u));
    while norm > target {
        if iterations == opts.max_iter {
            return Err(WavefanError::NonConvergence {
                report: Box::new(report(false, iterations, history)),
            });
        }
        iterations += 1;
        let jac = jacobian_of(problem, x, &u);
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let step = jac.solve(&rhs)?;

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<f64> = u.iter().zip(&step).map(|(ui, si)| ui + t * si).collect();
            let r_trial = residual_on(problem, x, &trial);
            let n_trial = max_norm(&r_trial);
            if n_trial < norm {
                accepted = Some((trial, r_trial, n_trial));
                break;
            }
            t *= opts.damping;
        }
        let Some((trial, r_trial, n_trial)) = accepted else {
            return Err(WavefanError::NonConvergence {
                report: Box::new(report(false, iterations, history)),
            });
        };
        u = trial;
        r = r_trial;
        norm = n_trial;
        history.push(norm);
    }

    let profile = Profile::from_values(guess.mesh.clone(), u)?;
    Ok((profile, report(true, iterations, history)))
}

/// Full solve: truncation, graded mesh, smoothed Riemann guess, and Newton
/// with continuation in `eps`.
pub fn solve_profile(problem: &ProfileProblem, opts: &SolveOptions) -> Result<(Profile, SolveReport)> {
    opts.validate()?;
    let schedule = opts.schedule(problem.epsilon)?;
    let exact = riemann::solve_exact(&problem.flux, problem.u_left, problem.u_right);
    let mut previous: Option<Profile> = None;
    let mut stages = Vec::with_capacity(schedule.len());
    let mut total = 0;
    let mut last_report = None;
    let coarse = opts.coarsened(INTERMEDIATE_COARSENING);
    for (k, &eps) in schedule.iter().enumerate() {
        let stage_problem = problem.with_epsilon(eps)?;
        let stage_opts = if k + 1 == schedule.len() { opts } else { &coarse };
        let (profile, report) = solve_stage(&stage_problem, &exact, previous.as_ref(), stage_opts)
            .map_err(|e| WavefanError::Stage {
                eps,
                source: Box::new(e),
            })?;
        total += report.iterations;
        stages.push(StageReport {
            epsilon: eps,
            iterations: report.iterations,
            residual: report.final_residual(),
            mesh_size: report.mesh_size,
        });
        previous = Some(profile);
        last_report = Some(report);
    }
    let mut report = last_report.expect("schedule is never empty");
    report.iterations = total;
    report.stages = stages;
    Ok((previous.expect("schedule is never empty"), report))
}

/// Mesh and guess for one `eps`, seeded from `previous` when given.
pub fn stage_setup(
    problem: &ProfileProblem,
    exact: &RiemannSolution,
    previous: Option<&Profile>,
    opts: &SolveOptions,
) -> Result<Profile> {
    let (lo, hi) = truncate_domain(problem, opts.tail_tol)?;
    let domain = (lo - opts.domain_pad, hi + opts.domain_pad);
    let mesh = build_mesh(problem, exact, domain, opts)?;
    Ok(match previous {
        None => initial_guess_from(problem, &mesh, exact),
        Some(prev) => reinterpolate(problem, prev, mesh),
    })
}

fn solve_stage(
    problem: &ProfileProblem,
    exact: &RiemannSolution,
    previous: Option<&Profile>,
    opts: &SolveOptions,
) -> Result<(Profile, SolveReport)> {
    let guess = stage_setup(problem, exact, previous, opts)?;
    newton_solve(problem, &guess, opts)
}

fn reinterpolate(problem: &ProfileProblem, prev: &Profile, mesh: Mesh) -> Profile {
    let n = mesh.len();
    let mut u: Vec<f64> = mesh.nodes().iter().map(|&xi| prev.eval(xi)).collect();
    u[0] = problem.u_left;
    u[n - 1] = problem.u_right;
    Profile::from_values(mesh, u).expect("lengths match")
}

/// One converged profile per entry of the strictly decreasing `eps_list`,
/// each stage seeded by the previous one.
pub fn continuation_sweep(
    problem: &ProfileProblem,
    eps_list: &[f64],
    opts: &SolveOptions,
) -> Result<Vec<(f64, Profile)>> {
    if eps_list.is_empty() {
        return Err(WavefanError::param("eps", "empty schedule"));
    }
    check_decreasing(eps_list)?;
    let exact = riemann::solve_exact(&problem.flux, problem.u_left, problem.u_right);
    let mut out: Vec<(f64, Profile)> = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let stage_problem = problem.with_epsilon(eps)?;
        let profile = match out.last() {
            None => solve_profile(&stage_problem, opts)?.0,
            Some((_, prev)) => {
                solve_stage(&stage_problem, &exact, Some(prev), opts)
                    .map_err(|e| WavefanError::Stage {
                        eps,
                        source: Box::new(e),
                    })?
                    .0
            }
        };
        out.push((eps, profile));
    }
    Ok(out)
}
