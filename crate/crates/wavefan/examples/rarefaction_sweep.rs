//! Vanishing-viscosity convergence towards the centered rarefaction fan,
//! with plot data for every profile.
//!
//! ```text
//! cargo run --example rarefaction_sweep -- /tmp/fan.csv /tmp/fan.svg
//! ```

use std::path::PathBuf;

use wavefan::bvp::{Profile, ProfileProblem, SolveOptions};
use wavefan::io::emit_plotdata;
use wavefan::riemann::solve_exact;
use wavefan::verification::{l1_window_error, sweep_profiles};

fn main() -> wavefan::Result<()> {
    let mut args = std::env::args().skip(1).map(PathBuf::from);
    let (csv, svg) = (args.next(), args.next());

    let problem = ProfileProblem::burgers(-1.0, 1.0, 0.1)?;
    let exact = solve_exact(&problem.flux, -1.0, 1.0);
    let window = (-2.0, 2.0);
    let profiles = sweep_profiles(&problem, &[0.1, 0.05, 0.025, 0.0125], window, &SolveOptions::default())?;

    let mut previous = None;
    for (eps, profile) in &profiles {
        let err = l1_window_error(profile, &exact, window)?;
        let rate = previous.map(|p: f64| (p / err).log2());
        match rate {
            Some(r) => println!("eps = {eps:<7} L1 error {err:.4e}  observed order {r:.2}"),
            None => println!("eps = {eps:<7} L1 error {err:.4e}"),
        }
        previous = Some(err);
    }

    if let Some(csv) = csv {
        let labelled: Vec<(String, &Profile)> = profiles.iter().map(|(e, p)| (format!("eps={e}"), p)).collect();
        emit_plotdata(&labelled, Some(&exact), &csv, svg.as_deref())?;
        println!("plot data written to {}", csv.display());
    }
    Ok(())
}
