//! Adaptive Dormand–Prince 5(4) integration of scalar ODEs `y' = g(x, y)`.

use crate::error::{Result, WavefanError};

/// Local error control: a step is accepted when the embedded error
/// estimate is at most `atol + rtol * max(|y_n|, |y_n+1|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    /// Steps never exceed this length.
    pub max_step: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rtol: 1e-12,
            atol: 0.0,
            max_step: 0.05,
        }
    }
}

impl StepControl {
    pub fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 || self.atol > 0.0) || self.rtol < 0.0 || self.atol < 0.0 {
            return Err(WavefanError::param("step_control", "tolerances must be non-negative, one positive"));
        }
        if !(self.max_step > 0.0) {
            return Err(WavefanError::param("step_control", "max_step must be positive"));
        }
        Ok(())
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates from `(x0, y0)` to `x_end`, landing exactly on every
/// `stops` entry inside the interval (which must be increasing).
///
/// Returns the accepted nodes `(x, y)` including both ends.
pub fn integrate<G: Fn(f64, f64) -> f64>(
    g: G,
    x0: f64,
    y0: f64,
    x_end: f64,
    stops: &[f64],
    control: &StepControl,
) -> Result<Vec<(f64, f64)>> {
    control.validate()?;
    if !(x_end > x0) {
        return Err(WavefanError::InvalidInterval { lo: x0, hi: x_end });
    }
    let mut targets: Vec<f64> = stops.iter().copied().filter(|s| *s > x0 && *s < x_end).collect();
    targets.push(x_end);

    let mut out = vec![(x0, y0)];
    let (mut x, mut y) = (x0, y0);
    let mut h = (control.max_step).min(1e-3 * (x_end - x0).max(1e-3));
    let mut k1 = g(x, y);
    let mut next = 0;
    while next < targets.len() {
        let stop = targets[next];
        let landing = x + h >= stop;
        let step = if landing { stop - x } else { h };
        if step <= 16.0 * f64::EPSILON * x.abs().max(1.0) {
            if landing {
                next += 1;
                continue;
            }
            return Err(WavefanError::Integration { xi: x, step });
        }

        let mut k = [0.0; 7];
        k[0] = k1;
        for s in 1..7 {
            let ys = y + step * (0..s).map(|j| A[s][j] * k[j]).sum::<f64>();
            k[s] = g(x + C[s] * step, ys);
        }
        let y_new = y + step * (0..6).map(|j| A[6][j] * k[j]).sum::<f64>();
        let err = (step * (0..7).map(|j| E[j] * k[j]).sum::<f64>()).abs();
        let scale = control.atol + control.rtol * y.abs().max(y_new.abs());
        let ratio = if scale > 0.0 { err / scale } else { f64::INFINITY };
        if !y_new.is_finite() {
            h = 0.25 * step;
            continue;
        }

        if ratio <= 1.0 {
            x = if landing { stop } else { x + step };
            y = y_new;
            k1 = k[6];
            out.push((x, y));
            if landing {
                next += 1;
            }
        }
        let factor = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
        // a landing step may be much shorter than the step the controller would take
        let base = if landing && ratio <= 1.0 { h.max(step) } else { step };
        h = (base * factor).min(control.max_step);
    }
    Ok(out)
}
