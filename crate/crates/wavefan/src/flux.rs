//! Flux functions `f` of the scalar conservation law `U_t + f(U)_x = 0`.
//!
//! Only the Burgers flux and polynomials are supported. For both, `f''` is
//! available in closed form, which gives computable Lipschitz bounds for
//! `f'` on any state interval.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WavefanError};

/// Number of equispaced samples used when bounding `|f''|` or `|f'|`.
pub const LIPSCHITZ_SAMPLES: usize = 10_001;
/// Inflation applied to a sampled maximum that may miss an interior peak.
pub const LIPSCHITZ_SAFETY: f64 = 1.001;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "coefficients", rename_all = "lowercase")]
pub enum FluxSpec {
    /// `f(u) = u^2 / 2`.
    Burgers,
    /// `f(u) = c0 + c1 u + c2 u^2 + ...` (ascending powers).
    Polynomial(Vec<f64>),
}

impl FluxSpec {
    /// Builds a polynomial flux; rejects empty or non-finite coefficient lists.
    pub fn polynomial(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(WavefanError::param("flux", "polynomial needs at least one coefficient"));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(WavefanError::param("flux", "non-finite coefficient"));
        }
        Ok(FluxSpec::Polynomial(coefficients))
    }

    pub fn is_burgers(&self) -> bool {
        matches!(self, FluxSpec::Burgers)
    }

    /// Ascending-power coefficients; Burgers is `[0, 0, 1/2]`.
    pub fn coefficients(&self) -> Vec<f64> {
        match self {
            FluxSpec::Burgers => vec![0.0, 0.0, 0.5],
            FluxSpec::Polynomial(c) => c.clone(),
        }
    }

    /// `f(u)`.
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            FluxSpec::Burgers => 0.5 * u * u,
            FluxSpec::Polynomial(c) => horner(c.iter().copied(), u),
        }
    }

    /// `f'(u)`.
    pub fn derivative(&self, u: f64) -> f64 {
        match self {
            FluxSpec::Burgers => u,
            FluxSpec::Polynomial(c) => horner(
                c.iter().enumerate().skip(1).map(|(k, &ck)| k as f64 * ck),
                u,
            ),
        }
    }

    /// `f''(u)`.
    pub fn second_derivative(&self, u: f64) -> f64 {
        match self {
            FluxSpec::Burgers => 1.0,
            FluxSpec::Polynomial(c) => horner(
                c.iter()
                    .enumerate()
                    .skip(2)
                    .map(|(k, &ck)| (k * (k - 1)) as f64 * ck),
                u,
            ),
        }
    }

    /// Whether `f''` is affine, so that `|f''|` peaks at an interval endpoint.
    fn curvature_is_affine(&self) -> bool {
        match self {
            FluxSpec::Burgers => true,
            FluxSpec::Polynomial(c) => c.len() <= 4,
        }
    }

    /// Upper bound `K` for the Lipschitz constant of `f'` on `[lo, hi]`.
    ///
    /// `|f''|` is sampled on [`LIPSCHITZ_SAMPLES`] equispaced points. When
    /// `f''` is affine the sampled maximum is exact (it sits at an endpoint)
    /// and is returned as is; otherwise it is inflated by [`LIPSCHITZ_SAFETY`].
    pub fn lipschitz_of_derivative(&self, lo: f64, hi: f64) -> Result<f64> {
        if !(lo <= hi) {
            return Err(WavefanError::InvalidInterval { lo, hi });
        }
        let sampled = sample_max(lo, hi, |u| self.second_derivative(u).abs());
        if self.curvature_is_affine() {
            Ok(sampled)
        } else {
            Ok(sampled * LIPSCHITZ_SAFETY)
        }
    }

    /// `sup |f'|` on `[lo, hi]` by dense sampling.
    pub fn max_abs_derivative(&self, lo: f64, hi: f64) -> f64 {
        let (a, b) = ordered(lo, hi);
        sample_max(a, b, |u| self.derivative(u).abs())
    }

    /// Range `(min f', max f')` over the state interval spanned by `a` and `b`.
    pub fn derivative_range(&self, a: f64, b: f64) -> (f64, f64) {
        let (lo, hi) = ordered(a, b);
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for u in linspace(lo, hi, LIPSCHITZ_SAMPLES) {
            let d = self.derivative(u);
            min = min.min(d);
            max = max.max(d);
        }
        (min, max)
    }
}

/// Chord slope of `f'` between `a` and `b`; exactly `0` when `a == b`.
pub fn chord_slope_q(flux: &FluxSpec, a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (flux.derivative(a) - flux.derivative(b)) / (a - b)
    }
}

fn horner(coefficients: impl DoubleEndedIterator<Item = f64>, u: f64) -> f64 {
    coefficients.rev().fold(0.0, |acc, c| acc * u + c)
}

fn ordered(a: f64, b: f64) -> (f64, f64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = if n > 1 { (hi - lo) / (n - 1) as f64 } else { 0.0 };
    (0..n).map(move |i| if i + 1 == n { hi } else { lo + step * i as f64 })
}

fn sample_max(lo: f64, hi: f64, g: impl Fn(f64) -> f64) -> f64 {
    linspace(lo, hi, LIPSCHITZ_SAMPLES).map(g).fold(0.0, f64::max)
}

impl fmt::Display for FluxSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FluxSpec::Burgers => write!(f, "burgers"),
            FluxSpec::Polynomial(c) => {
                let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                write!(f, "poly:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for FluxSpec {
    type Err = WavefanError;

    /// Parses `burgers` or `poly:c0,c1,...,cn`.
    fn from_str(token: &str) -> Result<Self> {
        let token = token.trim();
        if token == "burgers" {
            return Ok(FluxSpec::Burgers);
        }
        let Some(list) = token.strip_prefix("poly:") else {
            return Err(WavefanError::Parse(format!(
                "malformed flux `{token}` (expected `burgers` or `poly:c0,c1,...`)"
            )));
        };
        let coefficients = list
            .split(',')
            .map(|s| {
                s.trim().parse::<f64>().map_err(|_| {
                    WavefanError::Parse(format!("malformed flux coefficient `{s}` in `{token}`"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        FluxSpec::polynomial(coefficients)
            .map_err(|e| WavefanError::Parse(format!("flux `{token}`: {e}")))
    }
}
