//! Viscous Burgers shock: Newton with eps-continuation, then the layer
//! diagnostics.
//!
//! ```text
//! cargo run --example shock_profile -- 0.02
//! ```

use wavefan::bvp::{solve_profile, ProfileProblem, SolveOptions};
use wavefan::corner::first_integral_h;
use wavefan::verification::{check_monotone, FIRST_INTEGRAL_CORE};

fn main() -> wavefan::Result<()> {
    let eps: f64 = std::env::args().nth(1).map_or(Ok(0.05), |s| s.parse()).expect("eps must be a number");
    let problem = ProfileProblem::burgers(1.0, -1.0, eps)?;
    let (profile, report) = solve_profile(&problem, &SolveOptions::default())?;

    for stage in &report.stages {
        println!("stage eps = {:<8} iterations {:>2}  residual {:.2e}", stage.epsilon, stage.iterations, stage.residual);
    }
    println!("{} nodes on [{:.3}, {:.3}]", report.mesh_size, report.domain.0, report.domain.1);
    println!("u(0) = {:.2e}", profile.eval(0.0));
    println!("min oriented slope {:.3e}", check_monotone(&profile, 1.0, -1.0));

    let h = first_integral_h(&profile.core(FIRST_INTEGRAL_CORE)?, eps)?;
    let (lo, hi) = h.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    println!("first integral in the layer: [{lo:.8}, {hi:.8}]");
    Ok(())
}
