//! The universal corner profile at the edge of a rarefaction fan: its
//! barriers, first integral and exponential tail.
//!
//! ```text
//! cargo run --example corner_layer
//! ```

use wavefan::corner::{
    barrier_lower, barrier_upper, first_integral_h, fit_tail_rate, half_gaussian_mass, solve_corner, BarrierUpper,
};
use wavefan::rk::StepControl;

fn main() -> wavefan::Result<()> {
    let corner = solve_corner(-8.0, 10.0, &StepControl::default())?;
    let barrier = BarrierUpper::default();
    println!("{} samples, half Gaussian mass {:.12}", corner.len(), half_gaussian_mass());

    println!("{:>6} {:>14} {:>14} {:>14}", "xi", "lower", "U", "upper");
    for xi in [-6.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0] {
        let u = corner.eval(xi).expect("inside the integration range");
        println!("{xi:>6} {:>14.6e} {u:>14.6e} {:>14.6e}", barrier_lower(xi), barrier_upper(xi, &barrier));
    }

    let h = first_integral_h(&corner, 1.0)?;
    println!("max |H| = {:.2e}", h.iter().fold(0.0_f64, |m, v| m.max(v.abs())));

    let tail = fit_tail_rate(&corner, (4.0, 8.0))?;
    println!("U - xi ~ {:.4} exp(-{:.4} xi) from {} samples", tail.amplitude, tail.rate, tail.samples);
    Ok(())
}
