//! Sub/supersolution devices of the uniqueness argument, evaluated on
//! computed profiles: translated supersolutions, the exponential barrier
//! beyond the sliding threshold, and Galilean translation.
//!
//! ```text
//! cargo run --example comparison_margins -- 0.2
//! ```

use wavefan::bvp::{solve_profile, ProfileProblem, SolveOptions};
use wavefan::verification::{
    barrier_operator_margin, sliding_constant_m, sliding_supersolution_margin, sweeping_supersolution_margin,
    translation_invariance_check,
};

fn main() -> wavefan::Result<()> {
    let lambda: f64 = std::env::args().nth(1).map_or(Ok(0.1), |s| s.parse()).expect("lambda must be a number");
    let opts = SolveOptions::default();

    let rare = ProfileProblem::burgers(-1.0, 1.0, 0.05)?;
    let (rp, _) = solve_profile(&rare, &opts)?;
    let slide = sliding_supersolution_margin(&rp, &rare, lambda)?;
    println!("sliding   margin {:.3e} over {} nodes (residual floor {:.1e})", slide.value, slide.samples, slide.residual_floor);

    let shock = ProfileProblem::burgers(1.0, -1.0, 0.05)?;
    let (sp, _) = solve_profile(&shock, &opts)?;
    let sweep = sweeping_supersolution_margin(&sp, &shock, lambda, 1.0)?;
    println!("sweeping  margin {:.3e} over {} nodes (residual floor {:.1e})", sweep.value, sweep.samples, sweep.residual_floor);

    // the barrier lives beyond M, so the domain must reach past it
    let m = sliding_constant_m(&rare, &rp)?;
    let padded = SolveOptions { domain_pad: (m - rp.mesh.hi()).max(0.0) + 1.0, ..opts };
    let (wide, _) = solve_profile(&rare, &padded)?;
    let m = sliding_constant_m(&rare, &wide)?;
    let barrier = barrier_operator_margin(&rare, &wide, lambda, m)?;
    println!("barrier operator max {barrier:.3e} beyond M = {m:.4}");

    for shift in [0.0, lambda, 0.7] {
        let t = translation_invariance_check(&sp, &shock, shift)?;
        println!("translate by {shift:<4}: residual {:.2e}, rounding floor {:.2e}", t.residual, t.rounding_floor);
    }
    Ok(())
}
