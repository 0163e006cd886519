//! Self-similar viscous profiles `eps u'' = (f'(u) - xi) u'` for the Riemann
//! problem of a scalar conservation law `u_t + f(u)_x = 0`, with the tools
//! to check them against the exact Riemann fan and the corner-layer
//! profile.

pub mod bvp;
pub mod cli;
pub mod config;
pub mod corner;
pub mod error;
pub mod flux;
pub mod io;
pub mod mesh;
pub mod riemann;
pub mod rk;
pub mod tridiag;
pub mod verification;

pub use bvp::{solve_profile, Profile, ProfileProblem, SolveOptions};
pub use error::{Result, WavefanError};
pub use flux::FluxSpec;
pub use riemann::{solve_exact, RiemannSolution};
