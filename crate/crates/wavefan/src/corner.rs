//! The unbounded corner profile `U` of the rarefaction edge.
//!
//! `U` solves `U'' = (U - xi) U'` with `U -> 0` as `xi -> -inf` and
//! `U - xi -> 0` as `xi -> +inf`. Along it the first integral
//! `(U - xi)^2 / 2 - (U' - 1) + ln U'` vanishes, so the slope `p = U'` is a
//! function of `w = U - xi` alone and the profile follows from the scalar
//! first-order problem `U' = p(U - xi)`.

use std::sync::OnceLock;

use serde::Serialize;

use crate::bvp::Profile;
use crate::error::{Result, WavefanError};
use crate::mesh::Mesh;
use crate::rk::{self, StepControl};

/// Default left end of the computed corner profile.
pub const DEFAULT_XI_MIN: f64 = -8.0;
/// Default right end of the computed corner profile.
pub const DEFAULT_XI_MAX: f64 = 10.0;
/// Spacing of the output nodes the integrator is forced to land on.
pub const OUTPUT_SPACING: f64 = 0.01;
/// Default stretch of the exponential tail of the upper barrier.
pub const DEFAULT_TAIL_STRETCH: f64 = 10.0;

/// Root `p in (0, 1]` of `p - 1 - ln p = w^2 / 2`.
///
/// Bisection runs on `q = ln p` in `[-1 - w^2/2, 0]`, so `p` is resolved to
/// full relative precision even when it is tiny.
pub fn invert_first_integral(w: f64) -> Result<f64> {
    if !(w >= 0.0) || !w.is_finite() {
        return Err(WavefanError::param("w", format!("{w} must be finite and non-negative")));
    }
    if w == 0.0 {
        return Ok(1.0);
    }
    let half_sq = 0.5 * w * w;
    let g = |q: f64| libm::expm1(q) - q - half_sq;
    let (mut lo, mut hi) = (-1.0 - half_sq, 0.0);
    while hi - lo > 1e-15 * lo.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

/// `max{0, xi}`.
pub fn barrier_lower(xi: f64) -> f64 {
    xi.max(0.0)
}

/// Parameters of the piecewise upper barrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BarrierUpper {
    /// Length scale `L` of the exponential tail for `xi > 1`.
    pub tail_stretch: f64,
    /// `I`, the integral of `exp(-t^2/2)` over `(-inf, 0]`.
    pub half_gaussian_mass: f64,
}

impl BarrierUpper {
    /// Rejects stretches for which `1 - 1/L^2 - I/L <= 0`.
    pub fn new(tail_stretch: f64) -> Result<Self> {
        let barrier = BarrierUpper {
            tail_stretch,
            half_gaussian_mass: half_gaussian_mass(),
        };
        let margin = barrier.margin();
        if !(tail_stretch > 0.0 && margin > 0.0) {
            return Err(WavefanError::param(
                "tail_stretch",
                format!("{tail_stretch} gives barrier margin {margin:.4}, need > 0"),
            ));
        }
        Ok(barrier)
    }

    /// `1 - 1/L^2 - I/L`.
    pub fn margin(&self) -> f64 {
        let l = self.tail_stretch;
        1.0 - 1.0 / (l * l) - self.half_gaussian_mass / l
    }
}

impl Default for BarrierUpper {
    fn default() -> Self {
        BarrierUpper::new(DEFAULT_TAIL_STRETCH).expect("default stretch satisfies the margin")
    }
}

/// Gaussian integral `G(xi)` for `xi <= 0`, `xi + I` on `(0, 1]`, and
/// `xi + I exp(-(xi - 1)/L)` beyond.
pub fn barrier_upper(xi: f64, barrier: &BarrierUpper) -> f64 {
    let mass = barrier.half_gaussian_mass;
    if xi <= 0.0 {
        gaussian_integral(xi, mass)
    } else if xi <= 1.0 {
        xi + mass
    } else {
        xi + mass * (-(xi - 1.0) / barrier.tail_stretch).exp()
    }
}

/// `int_{-inf}^{xi} exp(-t^2/2) dt`, scaled so that it equals `mass` at 0.
fn gaussian_integral(xi: f64, mass: f64) -> f64 {
    mass * libm::erfc(-xi / std::f64::consts::SQRT_2)
}

/// `I` by adaptive Simpson quadrature on `[-40, 0]` (the remainder of the
/// tail is below `1e-300`), computed once.
pub fn half_gaussian_mass() -> f64 {
    static MASS: OnceLock<f64> = OnceLock::new();
    *MASS.get_or_init(|| adaptive_simpson(&|t: f64| (-0.5 * t * t).exp(), -40.0, 0.0, 1e-15))
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    recurse(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 50)
}

/// Samples of `U` with exact slopes `p` and offsets `w = U - xi`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CornerProfile {
    pub mesh: Mesh,
    pub u: Vec<f64>,
    pub p: Vec<f64>,
    pub w: Vec<f64>,
}

impl CornerProfile {
    /// Assembles a profile from values and slopes; `w` is derived.
    pub fn from_samples(mesh: Mesh, u: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if u.len() != mesh.len() || p.len() != mesh.len() {
            return Err(WavefanError::param("corner", "sample lengths differ from the mesh"));
        }
        let w = mesh.nodes().iter().zip(&u).map(|(x, v)| v - x).collect();
        Ok(CornerProfile { mesh, u, p, w })
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

    /// Cubic Hermite interpolant of `(U, p)`; `None` outside the mesh.
    pub fn eval(&self, z: f64) -> Option<f64> {
        let x = self.xi();
        let n = x.len();
        if !(z >= x[0] && z <= x[n - 1]) {
            return None;
        }
        let j = x.partition_point(|&v| v <= z).clamp(1, n - 1);
        let (x0, x1) = (x[j - 1], x[j]);
        let h = x1 - x0;
        let t = (z - x0) / h;
        let (t2, t3) = (t * t, t * t * t);
        Some(
            (2.0 * t3 - 3.0 * t2 + 1.0) * self.u[j - 1]
                + (t3 - 2.0 * t2 + t) * h * self.p[j - 1]
                + (-2.0 * t3 + 3.0 * t2) * self.u[j]
                + (t3 - t2) * h * self.p[j],
        )
    }
}

/// Integrates `U' = p(U - xi)` from `xi_min` to `xi_max`.
///
/// The anchor `U(xi_min) = G(xi_min) / e` is the leading-order left tail, so
/// the anchoring error is far below `G(xi_min)` itself. Output nodes are the
/// accepted steps, which include every multiple of [`OUTPUT_SPACING`].
pub fn solve_corner(xi_min: f64, xi_max: f64, control: &StepControl) -> Result<CornerProfile> {
    if !(xi_min <= -4.0) {
        return Err(WavefanError::param("xi_min", format!("{xi_min} must be at most -4")));
    }
    if !(xi_max > 0.0) || !xi_max.is_finite() {
        return Err(WavefanError::param("xi_max", format!("{xi_max} must be positive")));
    }
    let anchor = gaussian_integral(xi_min, half_gaussian_mass()) * (-1.0f64).exp();
    let first = (xi_min / OUTPUT_SPACING).floor() as i64 + 1;
    let last = (xi_max / OUTPUT_SPACING).ceil() as i64;
    let stops: Vec<f64> = (first..last).map(|k| k as f64 * OUTPUT_SPACING).collect();
    let slope = |xi: f64, u: f64| invert_first_integral((u - xi).max(0.0)).unwrap_or(1.0);
    let nodes = rk::integrate(slope, xi_min, anchor, xi_max, &stops, control)?;

    let (xs, u): (Vec<f64>, Vec<f64>) = nodes.into_iter().unzip();
    let p = xs
        .iter()
        .zip(&u)
        .map(|(x, v)| invert_first_integral((v - x).max(0.0)))
        .collect::<Result<Vec<_>>>()?;
    CornerProfile::from_samples(Mesh::new(xs)?, u, p)
}

/// Node-wise values of the scaled first integral
/// `(u - xi)^2 / (2 eps) - (u_xi - 1) + ln |u_xi|`.
pub trait SlopeSamples {
    fn sample_nodes(&self) -> &[f64];
    fn sample_values(&self) -> &[f64];
    fn sample_slopes(&self) -> &[f64];
}

impl SlopeSamples for Profile {
    fn sample_nodes(&self) -> &[f64] {
        self.xi()
    }
    fn sample_values(&self) -> &[f64] {
        &self.u
    }
    fn sample_slopes(&self) -> &[f64] {
        &self.du
    }
}

impl SlopeSamples for CornerProfile {
    fn sample_nodes(&self) -> &[f64] {
        self.xi()
    }
    fn sample_values(&self) -> &[f64] {
        &self.u
    }
    fn sample_slopes(&self) -> &[f64] {
        &self.p
    }
}

pub fn first_integral_h<P: SlopeSamples + ?Sized>(profile: &P, epsilon: f64) -> Result<Vec<f64>> {
    if !(epsilon > 0.0) {
        return Err(WavefanError::param("epsilon", format!("{epsilon} must be positive")));
    }
    let (x, u, du) = (profile.sample_nodes(), profile.sample_values(), profile.sample_slopes());
    x.iter()
        .zip(u)
        .zip(du)
        .enumerate()
        .map(|(node, ((xi, ui), di))| {
            if *di == 0.0 {
                return Err(WavefanError::DegenerateProfile { node });
            }
            let w = ui - xi;
            Ok(w * w / (2.0 * epsilon) - (di - 1.0) + di.abs().ln())
        })
        .collect()
}

/// Least-squares fit of `U - xi ~ amplitude * exp(-rate * xi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailFit {
    pub rate: f64,
    pub amplitude: f64,
    pub samples: usize,
}

pub fn fit_tail_rate(corner: &CornerProfile, window: (f64, f64)) -> Result<TailFit> {
    let (a, b) = window;
    let x = corner.xi();
    if !(a < b) || a < x[0] || b > x[x.len() - 1] {
        return Err(WavefanError::InvalidWindow(format!(
            "[{a}, {b}] not inside the profile range [{}, {}]",
            x[0],
            x[x.len() - 1]
        )));
    }
    let picked: Vec<(f64, f64)> = x
        .iter()
        .zip(&corner.w)
        .filter(|(xi, _)| **xi >= a && **xi <= b)
        .map(|(xi, w)| (*xi, *w))
        .collect();
    if picked.len() < 5 {
        return Err(WavefanError::InvalidWindow(format!(
            "[{a}, {b}] holds {} nodes, need at least 5",
            picked.len()
        )));
    }
    if let Some((xi, w)) = picked.iter().find(|(_, w)| !(*w > 0.0)) {
        return Err(WavefanError::InvalidWindow(format!("U - xi = {w} is not positive at xi = {xi}")));
    }
    let n = picked.len() as f64;
    let mean_x = picked.iter().map(|s| s.0).sum::<f64>() / n;
    let mean_y = picked.iter().map(|s| -s.1.ln()).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (xi, w) in &picked {
        let dx = xi - mean_x;
        sxy += dx * (-w.ln() - mean_y);
        sxx += dx * dx;
    }
    let rate = sxy / sxx;
    let intercept = mean_y - rate * mean_x;
    Ok(TailFit {
        rate,
        amplitude: (-intercept).exp(),
        samples: picked.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bisect(w: f64) -> f64 {
        let g = |p: f64| p - 1.0 - p.ln() - 0.5 * w * w;
        let (mut lo, mut hi) = (1e-300, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn inversion_examples() {
        assert_eq!(invert_first_integral(0.0).unwrap(), 1.0);
        assert!((invert_first_integral(2.0).unwrap() - bisect(2.0)).abs() < 1e-13);
        assert!((invert_first_integral(2.0).unwrap() - 0.0524).abs() < 1e-4);
        assert!((invert_first_integral(0.1).unwrap() - bisect(0.1)).abs() < 1e-13);
        assert!((invert_first_integral(0.1).unwrap() - 0.9033).abs() < 1e-4);
        assert!(invert_first_integral(-0.1).is_err());
    }

    #[test]
    fn inversion_is_decreasing_in_w() {
        let mut prev = 1.0;
        for k in 1..200 {
            let p = invert_first_integral(0.05 * k as f64).unwrap();
            assert!(p < prev && p > 0.0);
            prev = p;
        }
    }

    #[test]
    fn barrier_examples() {
        let b = BarrierUpper::default();
        let mass = (std::f64::consts::PI / 2.0).sqrt();
        assert!((b.half_gaussian_mass - mass).abs() < 1e-14);
        assert!((barrier_upper(0.0, &b) - 1.2533141).abs() < 1e-7);
        assert_eq!(barrier_upper(1.0, &b), 1.0 + b.half_gaussian_mass);
        let far = barrier_upper(11.0, &b);
        assert!((far - (11.0 + b.half_gaussian_mass / std::f64::consts::E)).abs() < 1e-14);
        assert!((b.margin() - 0.8647).abs() < 1e-3);
        assert!(BarrierUpper::new(1.0).is_err());
        assert_eq!(barrier_lower(-3.0), 0.0);
        assert_eq!(barrier_lower(0.0), 0.0);
        assert_eq!(barrier_lower(2.5), 2.5);
    }

    #[test]
    fn corner_is_bracketed_convex_and_on_the_zero_level() {
        let c = solve_corner(DEFAULT_XI_MIN, DEFAULT_XI_MAX, &StepControl::default()).unwrap();
        let b = BarrierUpper::default();
        for (i, &xi) in c.xi().iter().enumerate() {
            assert!(barrier_lower(xi) < c.u[i] && c.u[i] < barrier_upper(xi, &b), "xi = {xi}");
            assert!(c.p[i] > 0.0 && c.p[i] < 1.0);
        }
        for w in c.p.windows(2) {
            assert!(w[1] > w[0]);
        }
        let h = first_integral_h(&c, 1.0).unwrap();
        assert!(h.iter().all(|v| v.abs() < 1e-8));
        let u0 = c.eval(0.0).unwrap();
        assert!(u0 > 0.0 && u0 < 1.2534);
        assert!(c.eval(-4.0).unwrap() < 1e-3);
    }

    #[test]
    fn tighter_integration_agrees() {
        let c = solve_corner(-8.0, 6.0, &StepControl::default()).unwrap();
        let tight = StepControl { rtol: 1e-14, ..StepControl::default() };
        let f = solve_corner(-8.0, 6.0, &tight).unwrap();
        for z in [-4.0, -1.0, 0.0, 1.0, 3.0, 6.0] {
            let (a, b) = (c.eval(z).unwrap(), f.eval(z).unwrap());
            assert!((a - b).abs() <= 1e-10 * b.abs().max(1e-12), "z = {z}: {a} {b}");
        }
    }

    #[test]
    fn solve_corner_preconditions() {
        assert!(solve_corner(-3.0, 5.0, &StepControl::default()).is_err());
        assert!(solve_corner(-5.0, 0.0, &StepControl::default()).is_err());
    }

    #[test]
    fn tail_rate_of_synthetic_exponentials() {
        let mesh = Mesh::uniform(0.0, 10.0, 200).unwrap();
        for rate in [1.0, 2.0] {
            let u: Vec<f64> = mesh.nodes().iter().map(|x| x + 3.0 * (-rate * x).exp()).collect();
            let c = CornerProfile::from_samples(mesh.clone(), u, vec![0.5; 201]).unwrap();
            let fit = fit_tail_rate(&c, (4.0, 8.0)).unwrap();
            assert!((fit.rate - rate).abs() < 1e-6);
            assert!((fit.amplitude - 3.0).abs() < 1e-6);
        }
        let c = CornerProfile::from_samples(mesh.clone(), mesh.nodes().iter().map(|x| x + 1.0).collect(), vec![0.5; 201])
            .unwrap();
        assert!(matches!(fit_tail_rate(&c, (4.0, 4.1)), Err(WavefanError::InvalidWindow(_))));
        assert!(matches!(fit_tail_rate(&c, (4.0, 12.0)), Err(WavefanError::InvalidWindow(_))));
    }

    #[test]
    fn constant_profile_has_no_first_integral() {
        let mesh = Mesh::uniform(-1.0, 1.0, 4).unwrap();
        let p = Profile::from_values(mesh, vec![0.3; 5]).unwrap();
        assert!(matches!(first_integral_h(&p, 0.2), Err(WavefanError::DegenerateProfile { node: 0 })));
    }
}
