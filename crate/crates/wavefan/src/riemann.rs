//! Exact entropy solutions of the scalar Riemann problem.
//!
//! For `uL < uR` the solution follows the lower convex envelope of `f` on
//! `[uL, uR]`, for `uL > uR` the upper concave envelope on `[uR, uL]`.
//! Pointwise, `u(xi)` is the minimizer (maximizer) of `f(u) - xi u`. The
//! envelope is computed as the convex hull of a fine sampling of `f`; hull
//! edges between neighbouring samples belong to rarefaction fans, longer
//! edges are shocks whose endpoints are then polished by Newton's method on
//! the tangency conditions.

use std::fmt;

use serde::Serialize;

use crate::flux::FluxSpec;

/// Default number of state samples used to build the envelope.
pub const DEFAULT_ENVELOPE_SAMPLES: usize = 200_000;

/// Hull edges spanning at most this many sample intervals count as fan pieces.
const FAN_GAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Wave {
    /// Constant state on `(xi_from, xi_to]`; infinite bounds at the ends.
    Constant { state: f64, xi_from: f64, xi_to: f64 },
    /// Discontinuity travelling at the Rankine-Hugoniot speed.
    Shock { speed: f64, left: f64, right: f64 },
    /// Centered fan `u = (f')^{-1}(xi)` for `xi` in `[xi_from, xi_to]`.
    Rarefaction {
        xi_from: f64,
        xi_to: f64,
        u_from: f64,
        u_to: f64,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct RiemannSolution {
    pub flux: FluxSpec,
    pub u_left: f64,
    pub u_right: f64,
    pub waves: Vec<Wave>,
}

/// Entropy solution with the default envelope resolution.
pub fn solve_exact(flux: &FluxSpec, u_left: f64, u_right: f64) -> RiemannSolution {
    solve_exact_with_samples(flux, u_left, u_right, DEFAULT_ENVELOPE_SAMPLES)
}

pub fn solve_exact_with_samples(
    flux: &FluxSpec,
    u_left: f64,
    u_right: f64,
    samples: usize,
) -> RiemannSolution {
    let waves = if u_left == u_right {
        vec![Wave::Constant {
            state: u_left,
            xi_from: f64::NEG_INFINITY,
            xi_to: f64::INFINITY,
        }]
    } else if u_left < u_right {
        let segments = lower_envelope(&Direct(flux), u_left, u_right, samples.max(2));
        assemble(flux, u_left, u_right, segments)
    } else {
        // upper envelope of f on [uR, uL] is the lower envelope of
        // h(v) = -f(-v) on [-uL, -uR], traversed with v = -u
        let segments = lower_envelope(&Reflected(flux), -u_left, -u_right, samples.max(2));
        let segments = segments
            .into_iter()
            .map(|s| Segment {
                kind: s.kind,
                from: -s.from,
                to: -s.to,
            })
            .collect();
        assemble(flux, u_left, u_right, segments)
    };
    RiemannSolution {
        flux: flux.clone(),
        u_left,
        u_right,
        waves,
    }
}

impl RiemannSolution {
    /// `u*(xi)`; at a shock location the left state is returned.
    pub fn eval(&self, xi: f64) -> f64 {
        for wave in &self.waves {
            match *wave {
                Wave::Constant { state, xi_to, .. } => {
                    if xi <= xi_to {
                        return state;
                    }
                }
                Wave::Shock { speed, left, .. } => {
                    if xi <= speed {
                        return left;
                    }
                }
                Wave::Rarefaction {
                    xi_from,
                    xi_to,
                    u_from,
                    u_to,
                } => {
                    if xi <= xi_to {
                        if xi <= xi_from {
                            return u_from;
                        }
                        return invert_derivative(&self.flux, u_from, u_to, xi);
                    }
                }
            }
        }
        self.u_right
    }

    /// Right limit `u*(xi+)`; differs from [`eval`](Self::eval) only at a shock.
    pub fn eval_right(&self, xi: f64) -> f64 {
        self.eval(xi.next_up())
    }

    /// Shock speeds and fan edges, left to right.
    pub fn wave_speeds(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for wave in &self.waves {
            match *wave {
                Wave::Shock { speed, .. } => out.push(speed),
                Wave::Rarefaction { xi_from, xi_to, .. } => {
                    out.push(xi_from);
                    out.push(xi_to);
                }
                Wave::Constant { .. } => {}
            }
        }
        out.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
        out
    }

    pub fn shocks(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.waves.iter().filter_map(|w| match *w {
            Wave::Shock { speed, left, right } => Some((speed, left, right)),
            _ => None,
        })
    }

    pub fn is_constant(&self) -> bool {
        self.u_left == self.u_right
    }
}

impl fmt::Display for RiemannSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "riemann solution: flux {}, uL = {}, uR = {}",
            self.flux, self.u_left, self.u_right
        )?;
        for (i, wave) in self.waves.iter().enumerate() {
            match wave {
                Wave::Constant {
                    state,
                    xi_from,
                    xi_to,
                } => writeln!(f, "  [{i}] constant   u = {state:.12}  on ({xi_from:.12}, {xi_to:.12}]")?,
                Wave::Shock { speed, left, right } => writeln!(
                    f,
                    "  [{i}] shock      speed {speed:.12}  {left:.12} -> {right:.12}"
                )?,
                Wave::Rarefaction {
                    xi_from,
                    xi_to,
                    u_from,
                    u_to,
                } => writeln!(
                    f,
                    "  [{i}] rarefaction xi in [{xi_from:.12}, {xi_to:.12}]  {u_from:.12} -> {u_to:.12}"
                )?,
            }
        }
        Ok(())
    }
}

/// Solves `f'(u) = xi` for `u` between `u_from` and `u_to`, where `f'` is
/// monotone along the segment and brackets `xi`.
fn invert_derivative(flux: &FluxSpec, u_from: f64, u_to: f64, xi: f64) -> f64 {
    if flux.is_burgers() {
        return xi.clamp(u_from.min(u_to), u_from.max(u_to));
    }
    // g(t) = f'(u_from + t (u_to - u_from)) - xi is nondecreasing in t on [0, 1]
    let span = u_to - u_from;
    let g = |t: f64| flux.derivative(u_from + t * span) - xi;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    if g(lo) >= 0.0 {
        return u_from;
    }
    if g(hi) <= 0.0 {
        return u_to;
    }
    let mut t = 0.5;
    for _ in 0..200 {
        let gt = g(t);
        if gt == 0.0 {
            break;
        }
        if gt < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        // Newton step, falling back to bisection when it leaves the bracket
        let slope = flux.second_derivative(u_from + t * span) * span;
        let newton = t - gt / slope;
        let next = if slope != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let moved = (next - t).abs();
        t = next;
        if moved <= 2.0 * f64::EPSILON * t.abs().max(f64::MIN_POSITIVE) || hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    u_from + t * span
}

trait Curve {
    fn f(&self, u: f64) -> f64;
    fn df(&self, u: f64) -> f64;
    fn d2f(&self, u: f64) -> f64;
}

struct Direct<'a>(&'a FluxSpec);
struct Reflected<'a>(&'a FluxSpec);

impl Curve for Direct<'_> {
    fn f(&self, u: f64) -> f64 {
        self.0.eval(u)
    }
    fn df(&self, u: f64) -> f64 {
        self.0.derivative(u)
    }
    fn d2f(&self, u: f64) -> f64 {
        self.0.second_derivative(u)
    }
}

impl Curve for Reflected<'_> {
    fn f(&self, v: f64) -> f64 {
        -self.0.eval(-v)
    }
    fn df(&self, v: f64) -> f64 {
        self.0.derivative(-v)
    }
    fn d2f(&self, v: f64) -> f64 {
        -self.0.second_derivative(-v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum SegmentKind {
    Fan,
    Shock,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    kind: SegmentKind,
    from: f64,
    to: f64,
}

/// Lower convex envelope of `curve` on `[lo, hi]` as alternating fan/shock
/// segments in increasing state order.
fn lower_envelope(curve: &impl Curve, lo: f64, hi: f64, samples: usize) -> Vec<Segment> {
    let n = samples;
    let h = (hi - lo) / (n - 1) as f64;
    let us: Vec<f64> = (0..n)
        .map(|j| if j + 1 == n { hi } else { lo + h * j as f64 })
        .collect();
    let fs: Vec<f64> = us.iter().map(|&u| curve.f(u)).collect();

    // Andrew's monotone chain, lower hull; collinear points are dropped
    let mut hull: Vec<usize> = Vec::with_capacity(n);
    for j in 0..n {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (us[b] - us[a]) * (fs[j] - fs[a]) - (fs[b] - fs[a]) * (us[j] - us[a]);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(j);
    }

    // group hull edges into index runs
    let mut runs: Vec<(SegmentKind, usize, usize)> = Vec::new();
    for w in hull.windows(2) {
        let (i, j) = (w[0], w[1]);
        let kind = if j - i <= FAN_GAP {
            SegmentKind::Fan
        } else {
            SegmentKind::Shock
        };
        match runs.last_mut() {
            Some((SegmentKind::Fan, _, end)) if kind == SegmentKind::Fan => *end = j,
            _ => runs.push((kind, i, j)),
        }
    }

    // state values at run boundaries, polished for shocks
    let mut bounds: Vec<f64> = Vec::with_capacity(runs.len() + 1);
    bounds.push(lo);
    for r in &runs {
        bounds.push(us[r.2]);
    }
    let last = bounds.len() - 1;
    bounds[last] = hi;
    for (k, r) in runs.iter().enumerate() {
        if r.0 != SegmentKind::Shock {
            continue;
        }
        let a_free = k > 0;
        let b_free = k + 1 < runs.len();
        let window = (FAN_GAP as f64 + 2.0) * h;
        let (a, b) = refine_shock(curve, bounds[k], bounds[k + 1], a_free, b_free, window);
        bounds[k] = a;
        bounds[k + 1] = b;
    }

    runs.iter()
        .enumerate()
        .map(|(k, r)| Segment {
            kind: r.0,
            from: bounds[k],
            to: bounds[k + 1],
        })
        .filter(|s| s.to > s.from)
        .collect()
}

/// Newton iteration on the tangency conditions `f'(a) = S = f'(b)` for the
/// free endpoints of a shock, `S` being the chord slope. Falls back to the
/// sampled endpoints if the iteration wanders further than `window`.
fn refine_shock(
    curve: &impl Curve,
    a0: f64,
    b0: f64,
    a_free: bool,
    b_free: bool,
    window: f64,
) -> (f64, f64) {
    if !a_free && !b_free {
        return (a0, b0);
    }
    let (mut a, mut b) = (a0, b0);
    for _ in 0..50 {
        let s = (curve.f(b) - curve.f(a)) / (b - a);
        let ds_da = (s - curve.df(a)) / (b - a);
        let ds_db = (curve.df(b) - s) / (b - a);
        let f1 = curve.df(a) - s;
        let f2 = curve.df(b) - s;
        let (da, db) = match (a_free, b_free) {
            (true, true) => {
                let j11 = curve.d2f(a) - ds_da;
                let j12 = -ds_db;
                let j21 = -ds_da;
                let j22 = curve.d2f(b) - ds_db;
                let det = j11 * j22 - j12 * j21;
                if det == 0.0 || !det.is_finite() {
                    return (a0, b0);
                }
                (
                    -(j22 * f1 - j12 * f2) / det,
                    -(-j21 * f1 + j11 * f2) / det,
                )
            }
            (true, false) => {
                let j = curve.d2f(a) - ds_da;
                if j == 0.0 {
                    return (a0, b0);
                }
                (-f1 / j, 0.0)
            }
            (false, true) => {
                let j = curve.d2f(b) - ds_db;
                if j == 0.0 {
                    return (a0, b0);
                }
                (0.0, -f2 / j)
            }
            (false, false) => unreachable!(),
        };
        a += da;
        b += db;
        if !(a.is_finite() && b.is_finite())
            || (a - a0).abs() > window
            || (b - b0).abs() > window
            || b <= a
        {
            return (a0, b0);
        }
        if da.abs() <= 1e-15 * (1.0 + a.abs()) && db.abs() <= 1e-15 * (1.0 + b.abs()) {
            break;
        }
    }
    (a, b)
}

/// Turns state-ordered segments (traversed from `u_left` to `u_right`) into
/// waves ordered by increasing `xi`.
fn assemble(flux: &FluxSpec, u_left: f64, u_right: f64, segments: Vec<Segment>) -> Vec<Wave> {
    let mut waves = Vec::with_capacity(2 * segments.len() + 1);
    let mut state = u_left;
    let mut xi_last = f64::NEG_INFINITY;
    let push_constant = |waves: &mut Vec<Wave>, state: f64, xi_from: f64, xi_to: f64| {
        if xi_to > xi_from {
            waves.push(Wave::Constant {
                state,
                xi_from,
                xi_to,
            });
        }
    };
    for seg in segments {
        match seg.kind {
            SegmentKind::Shock => {
                let speed = (flux.eval(seg.to) - flux.eval(seg.from)) / (seg.to - seg.from);
                push_constant(&mut waves, state, xi_last, speed);
                waves.push(Wave::Shock {
                    speed,
                    left: seg.from,
                    right: seg.to,
                });
                xi_last = xi_last.max(speed);
            }
            SegmentKind::Fan => {
                let xi_from = flux.derivative(seg.from).max(xi_last);
                let xi_to = flux.derivative(seg.to);
                if xi_to <= xi_from {
                    continue;
                }
                push_constant(&mut waves, state, xi_last, xi_from);
                waves.push(Wave::Rarefaction {
                    xi_from,
                    xi_to,
                    u_from: seg.from,
                    u_to: seg.to,
                });
                xi_last = xi_to;
            }
        }
        state = seg.to;
    }
    debug_assert!((state - u_right).abs() <= 1e-12 * (1.0 + u_right.abs()));
    push_constant(&mut waves, u_right, xi_last, f64::INFINITY);
    waves
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn burgers_shock_is_single_wave_at_mean_speed() {
        let sol = solve_exact(&FluxSpec::Burgers, 1.0, -1.0);
        let shocks: Vec<_> = sol.shocks().collect();
        assert_eq!(shocks.len(), 1);
        assert_eq!(shocks[0], (0.0, 1.0, -1.0));
        assert_eq!(sol.eval(-0.5), 1.0);
        assert_eq!(sol.eval(0.0), 1.0);
        assert_eq!(sol.eval(1e-12), -1.0);
    }

    #[test]
    fn burgers_rarefaction_is_identity_fan() {
        let sol = solve_exact(&FluxSpec::Burgers, -1.0, 1.0);
        assert_eq!(sol.waves.len(), 3);
        assert!(matches!(
            sol.waves[1],
            Wave::Rarefaction { xi_from, xi_to, .. } if xi_from == -1.0 && xi_to == 1.0
        ));
        assert_eq!(sol.eval(0.3), 0.3);
        assert_eq!(sol.eval(5.0), 1.0);
        assert_eq!(sol.eval(-5.0), -1.0);
    }

    #[test]
    fn cubic_composite_wave() {
        // tangent from (-1, -1) touches u^3 at u = 1/2, slope 3/4
        let f = FluxSpec::Polynomial(vec![0.0, 0.0, 0.0, 1.0]);
        let sol = solve_exact(&f, -1.0, 1.0);
        let shocks: Vec<_> = sol.shocks().collect();
        assert_eq!(shocks.len(), 1);
        let (s, l, r) = shocks[0];
        assert!((s - 0.75).abs() < 1e-12, "{s}");
        assert_eq!(l, -1.0);
        assert!((r - 0.5).abs() < 1e-12, "{r}");
        let fan = sol.eval(1.2) - (1.2_f64 / 3.0).sqrt();
        assert!(fan.abs() < 1e-14, "{fan:e}");
        assert_eq!(sol.eval(0.7), -1.0);
        assert_eq!(sol.eval(3.5), 1.0);
    }

    #[test]
    fn equal_states_give_constant() {
        let sol = solve_exact(&FluxSpec::Burgers, 0.3, 0.3);
        assert!(sol.is_constant());
        for xi in [-1e9, -1.0, 0.0, 2.0, 1e9] {
            assert_eq!(sol.eval(xi), 0.3);
        }
    }

    #[test]
    fn shocks_satisfy_rankine_hugoniot() {
        let f = FluxSpec::Polynomial(vec![0.1, -0.4, 0.3, 0.8, -0.5]);
        for (ul, ur) in [(-1.5, 1.2), (1.3, -0.9), (0.2, 1.9)] {
            let sol = solve_exact(&f, ul, ur);
            for (s, l, r) in sol.shocks() {
                let jump = f.eval(r) - f.eval(l);
                assert!((s * (r - l) - jump).abs() <= 1e-12, "{s} {l} {r}");
            }
        }
    }
}
