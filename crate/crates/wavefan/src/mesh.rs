//! One-dimensional meshes in the self-similar variable `xi`.

use serde::Serialize;

use crate::error::{Result, WavefanError};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mesh {
    nodes: Vec<f64>,
}

impl Mesh {
    /// Validates at least three strictly increasing finite nodes.
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(WavefanError::param("mesh", format!("{} nodes, need at least 3", nodes.len())));
        }
        if nodes.iter().any(|x| !x.is_finite()) {
            return Err(WavefanError::param("mesh", "non-finite node"));
        }
        if let Some(i) = nodes.windows(2).position(|w| w[1] <= w[0]) {
            return Err(WavefanError::param(
                "mesh",
                format!("nodes not strictly increasing at index {}", i + 1),
            ));
        }
        Ok(Mesh { nodes })
    }

    pub fn uniform(lo: f64, hi: f64, intervals: usize) -> Result<Self> {
        let n = intervals.max(2);
        let h = (hi - lo) / n as f64;
        Mesh::new(
            (0..=n)
                .map(|k| if k == n { hi } else { lo + h * k as f64 })
                .collect(),
        )
    }

    /// Smoothly graded mesh on `[lo, hi]`.
    ///
    /// Node density is a uniform part carrying `base_intervals` intervals
    /// plus one Gaussian bump of standard deviation `width` per center, each
    /// carrying `per_layer` intervals (less whatever falls outside the
    /// domain). Nodes equidistribute the density, so the mesh is a smooth
    /// image of a uniform grid and doubling both counts halves every
    /// spacing asymptotically while nesting the coarser nodes.
    ///
    /// When the centers are symmetric about the domain midpoint the nodes are
    /// mirrored exactly.
    pub fn graded(
        lo: f64,
        hi: f64,
        centers: &[f64],
        width: f64,
        base_intervals: usize,
        per_layer: usize,
    ) -> Result<Self> {
        if !(lo < hi) {
            return Err(WavefanError::InvalidInterval { lo, hi });
        }
        if !(width > 0.0) {
            return Err(WavefanError::param("width", format!("{width} must be positive")));
        }
        let mut centers: Vec<f64> = centers.to_vec();
        centers.sort_by(f64::total_cmp);
        centers.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));

        let intervals = base_intervals.max(2) + per_layer * centers.len();
        let density = Density {
            lo,
            uniform: base_intervals.max(2) as f64 / (hi - lo),
            centers: &centers,
            width,
            weight: per_layer as f64,
        };
        let total = density.cumulative(hi);
        let mid = 0.5 * (lo + hi);
        let symmetric = is_symmetric(&centers, mid, hi - lo);

        let mut nodes = vec![0.0; intervals + 1];
        nodes[0] = lo;
        nodes[intervals] = hi;
        let last = if symmetric { intervals / 2 } else { intervals - 1 };
        let mut prev = lo;
        for (k, node) in nodes.iter_mut().enumerate().take(last + 1).skip(1) {
            let target = total * k as f64 / intervals as f64;
            *node = density.invert(target, prev, hi);
            prev = *node;
        }
        if symmetric {
            for k in 1..=intervals / 2 {
                nodes[intervals - k] = 2.0 * mid - nodes[k];
            }
            if intervals % 2 == 0 {
                nodes[intervals / 2] = mid;
            }
        }
        Mesh::new(nodes)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn lo(&self) -> f64 {
        self.nodes[0]
    }

    pub fn hi(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn min_spacing(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_spacing(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// The same mesh moved by `shift`.
    pub fn translated(&self, shift: f64) -> Mesh {
        Mesh {
            nodes: self.nodes.iter().map(|x| x + shift).collect(),
        }
    }
}

fn is_symmetric(sorted_centers: &[f64], mid: f64, scale: f64) -> bool {
    let n = sorted_centers.len();
    (0..n).all(|i| {
        let pair = sorted_centers[i] + sorted_centers[n - 1 - i];
        (pair - 2.0 * mid).abs() <= 1e-13 * (1.0 + scale + mid.abs())
    })
}

struct Density<'a> {
    lo: f64,
    uniform: f64,
    centers: &'a [f64],
    width: f64,
    weight: f64,
}

impl Density<'_> {
    fn value(&self, x: f64) -> f64 {
        let norm = 1.0 / (self.width * (2.0 * std::f64::consts::PI).sqrt());
        self.uniform
            + self
                .centers
                .iter()
                .map(|c| {
                    let z = (x - c) / self.width;
                    self.weight * norm * (-0.5 * z * z).exp()
                })
                .sum::<f64>()
    }

    fn cumulative(&self, x: f64) -> f64 {
        self.uniform * (x - self.lo)
            + self
                .centers
                .iter()
                .map(|c| {
                    self.weight
                        * (normal_cdf((x - c) / self.width) - normal_cdf((self.lo - c) / self.width))
                })
                .sum::<f64>()
    }

    /// Solves `cumulative(x) = target` on `[a, b]` by safeguarded Newton.
    fn invert(&self, target: f64, a: f64, b: f64) -> f64 {
        let (mut lo, mut hi) = (a, b);
        let mut x = a + (target - self.cumulative(a)) / self.value(a);
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        for _ in 0..100 {
            let g = self.cumulative(x) - target;
            if g < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let step = g / self.value(x);
            let next = x - step;
            let next = if next > lo && next < hi {
                next
            } else {
                0.5 * (lo + hi)
            };
            if (next - x).abs() <= 1e-15 * (1.0 + x.abs()) {
                return next;
            }
            x = next;
        }
        x
    }
}

pub(crate) fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Piecewise-linear interpolation, clamped to the end values outside the nodes.
pub fn interp_linear(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let j = xs.partition_point(|&v| v <= x).clamp(1, n - 1);
    let (x0, x1) = (xs[j - 1], xs[j]);
    let t = (x - x0) / (x1 - x0);
    ys[j - 1] + t * (ys[j] - ys[j - 1])
}
