//! Entropy solutions of Riemann problems for convex and non-convex fluxes.
//!
//! ```text
//! cargo run --example riemann_fans
//! ```

use wavefan::flux::FluxSpec;
use wavefan::riemann::solve_exact;

fn main() -> wavefan::Result<()> {
    let cases: [(&str, FluxSpec, f64, f64); 4] = [
        ("burgers shock", FluxSpec::Burgers, 1.0, -1.0),
        ("burgers rarefaction", FluxSpec::Burgers, -1.0, 1.0),
        ("cubic composite", "poly:0,0,0,1".parse()?, -1.0, 1.0),
        ("cubic composite, reversed", "poly:0,0,0,1".parse()?, 1.0, -1.0),
    ];
    for (name, flux, ul, ur) in cases {
        let sol = solve_exact(&flux, ul, ur);
        println!("== {name}: f = {flux}, uL = {ul}, uR = {ur}");
        println!("{sol}");
        let row: Vec<String> = [-2.0, -0.5, 0.0, 0.5, 2.0]
            .iter()
            .map(|xi| format!("u({xi}) = {:.6}", sol.eval(*xi)))
            .collect();
        println!("{}\n", row.join(", "));
    }
    Ok(())
}
