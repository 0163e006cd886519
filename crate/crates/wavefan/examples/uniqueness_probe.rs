//! Newton from randomized initial guesses lands on one profile.
//!
//! ```text
//! WAVEFAN_SEED=11 cargo run --example uniqueness_probe
//! ```

use wavefan::bvp::{ProfileProblem, SolveOptions};
use wavefan::verification::uniqueness_probe;

fn main() -> wavefan::Result<()> {
    let seed = std::env::var("WAVEFAN_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(1);
    let opts = SolveOptions::default();
    for (name, flux, ul, ur) in [
        ("burgers shock", "burgers", 1.0, -1.0),
        ("burgers rarefaction", "burgers", -1.0, 1.0),
        ("cubic composite", "poly:0,0,0,1", -1.0, 1.0),
    ] {
        let problem = ProfileProblem::new(flux.parse()?, ul, ur, 0.05)?;
        let report = uniqueness_probe(&problem, &opts, 16, seed)?;
        println!(
            "{name:<20} {}/{} converged, max pairwise distance {:.2e}",
            report.converged, report.attempted, report.max_distance
        );
    }
    Ok(())
}
