//! Non-convex flux `u^3`: the viscous profile converges to the composite
//! shock-rarefaction wave built from the convex envelope.
//!
//! ```text
//! cargo run --example cubic_composite
//! ```

use wavefan::bvp::{ProfileProblem, SolveOptions};
use wavefan::riemann::solve_exact;
use wavefan::verification::{check_monotone, l1_window_error, sweep_profiles};

fn main() -> wavefan::Result<()> {
    let problem = ProfileProblem::new("poly:0,0,0,1".parse()?, -1.0, 1.0, 0.1)?;
    let exact = solve_exact(&problem.flux, -1.0, 1.0);
    println!("{exact}");

    let window = (-1.0, 3.0);
    for (eps, profile) in sweep_profiles(&problem, &[0.1, 0.05, 0.025, 0.0125], window, &SolveOptions::default())? {
        println!(
            "eps = {eps:<7} L1 error {:.4e}  min slope {:.2e}  u(0.75) = {:.5}",
            l1_window_error(&profile, &exact, window)?,
            check_monotone(&profile, -1.0, 1.0),
            profile.eval(0.75)
        );
    }
    Ok(())
}
