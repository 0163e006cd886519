//! Orchestration behind the `wavefan` binary.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};

use serde::Serialize;

use crate::bvp::{self, ProfileProblem, SolveReport};
use crate::config::{parse_config, Command, Invocation, RunConfig};
use crate::corner::{self, fit_tail_rate, TailFit};
use crate::error::{Result, WavefanError};
use crate::io;
use crate::riemann::{self, RiemannSolution};
use crate::rk::StepControl;
use crate::verification::{self, CheckOutcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Parses `argv`, runs the command and returns the process exit code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match parse_config(argv) {
        Ok(Invocation::Run(config)) => config,
        Ok(Invocation::Info(text)) => {
            print!("{text}");
            return EXIT_OK;
        }
        Err(e) => {
            eprintln!("wavefan: {e}");
            return EXIT_USAGE;
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(&config, &mut lock) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_CHECK_FAILED,
        Err(e) => {
            eprintln!("wavefan: {e}");
            match e.root_cause() {
                WavefanError::Parse(_) | WavefanError::InvalidParameter { .. } => EXIT_USAGE,
                _ => EXIT_CHECK_FAILED,
            }
        }
    }
}

/// Runs `config`, writing console output to `out`. Returns whether every
/// check that was run passed.
pub fn run(config: &RunConfig, out: &mut dyn Write) -> Result<bool> {
    match config.command {
        Command::Solve => solve(config, out),
        Command::Corner => corner(config, out),
        Command::Riemann => riemann(config, out),
        Command::Verify => verify(config, out),
        Command::Sweep => sweep(config, out),
    }
}

fn problem(config: &RunConfig, eps: f64) -> Result<ProfileProblem> {
    ProfileProblem::new(config.flux.clone(), config.u_left, config.u_right, eps)
}

/// Wave range widened by one on each side.
fn default_window(exact: &RiemannSolution) -> (f64, f64) {
    let speeds = exact.wave_speeds();
    let lo = speeds.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = speeds.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if lo.is_finite() {
        (lo - 1.0, hi + 1.0)
    } else {
        let c = 0.5 * (exact.u_left + exact.u_right);
        (c - 1.0, c + 1.0)
    }
}

#[derive(Serialize)]
struct SolveSummary<'a> {
    config: &'a RunConfig,
    report: &'a SolveReport,
    monotone: f64,
    symmetry: Option<f64>,
}

fn solve(config: &RunConfig, out: &mut dyn Write) -> Result<bool> {
    let p = problem(config, config.eps[0])?;
    let (profile, report) = bvp::solve_profile(&p, &config.solve)?;
    match &config.out {
        Some(path) => io::write_profile(&profile, path)?,
        None => io::write_profile_to(&profile, &mut *out)?,
    }
    eprintln!(
        "converged: {} iterations, residual {:.3e}, {} nodes on [{:.4}, {:.4}]",
        report.iterations,
        report.final_residual(),
        report.mesh_size,
        report.domain.0,
        report.domain.1
    );
    if let Some(path) = &config.report {
        let summary = SolveSummary {
            config,
            report: &report,
            monotone: verification::check_monotone(&profile, p.u_left, p.u_right),
            symmetry: verification::check_symmetry(&profile, &p).ok(),
        };
        io::write_json(&summary, path)?;
    }
    if let Some(path) = &config.plot {
        let exact = riemann::solve_exact(&p.flux, p.u_left, p.u_right);
        let label = format!("eps={}", p.epsilon);
        io::emit_plotdata(&[(label, &profile)], Some(&exact), path, config.svg.as_deref())?;
    }
    Ok(true)
}

#[derive(Serialize)]
struct CornerSummary {
    nodes: usize,
    value_at_zero: Option<f64>,
    max_abs_first_integral: f64,
    tail: Option<TailFit>,
}

fn corner(config: &RunConfig, out: &mut dyn Write) -> Result<bool> {
    let c = corner::solve_corner(config.xi_min, config.xi_max, &StepControl::default())?;
    match &config.out {
        Some(path) => io::write_corner(&c, path)?,
        None => io::write_corner_to(&c, &mut *out)?,
    }
    let summary = CornerSummary {
        nodes: c.len(),
        value_at_zero: c.eval(0.0),
        max_abs_first_integral: bvp::max_norm(&corner::first_integral_h(&c, 1.0)?),
        tail: fit_tail_rate(&c, (4.0, 8.0)).ok(),
    };
    if let Some(tail) = &summary.tail {
        eprintln!(
            "U(0) = {:.10}, tail U - xi ~ {:.6} exp(-{:.6} xi)",
            summary.value_at_zero.unwrap_or(f64::NAN),
            tail.amplitude,
            tail.rate
        );
    }
    if let Some(path) = &config.report {
        io::write_json(&summary, path)?;
    }
    Ok(true)
}

fn riemann(config: &RunConfig, out: &mut dyn Write) -> Result<bool> {
    let exact = riemann::solve_exact(&config.flux, config.u_left, config.u_right);
    let range = config.window.unwrap_or_else(|| default_window(&exact));
    match &config.out {
        Some(path) => {
            writeln!(out, "{exact}")?;
            let mut file = BufWriter::new(File::create(path)?);
            io::write_riemann_table(&exact, range, config.samples, &mut file)?;
            file.flush()?;
        }
        None => {
            writeln!(out, "{exact}")?;
            io::write_riemann_table(&exact, range, config.samples, &mut *out)?;
        }
    }
    Ok(true)
}

fn verify(config: &RunConfig, out: &mut dyn Write) -> Result<bool> {
    let results: BTreeMap<String, CheckOutcome> = match &config.check {
        Some(name) => {
            let outcome = verification::run_check(name, &config.solve, config.seed)?;
            BTreeMap::from([(name.clone(), outcome)])
        }
        None => verification::run_battery(&config.solve, config.seed),
    };
    serde_json::to_writer_pretty(&mut *out, &results)?;
    writeln!(out)?;
    if let Some(path) = &config.report {
        io::write_json(&results, path)?;
    }
    Ok(results.values().all(|r| r.pass))
}

#[derive(Serialize)]
struct SweepSummary {
    window: (f64, f64),
    eps: Vec<f64>,
    l1_error: Vec<f64>,
    decreasing: bool,
}

fn sweep(config: &RunConfig, out: &mut dyn Write) -> Result<bool> {
    let p = problem(config, config.eps[0])?;
    let exact = riemann::solve_exact(&p.flux, p.u_left, p.u_right);
    let window = config.window.unwrap_or_else(|| default_window(&exact));
    let profiles = verification::sweep_profiles(&p, &config.eps, window, &config.solve)?;
    let errors = profiles
        .iter()
        .map(|(_, profile)| verification::l1_window_error(profile, &exact, window))
        .collect::<Result<Vec<_>>>()?;
    let summary = SweepSummary {
        window,
        eps: config.eps.clone(),
        decreasing: errors.windows(2).all(|w| w[1] < w[0]),
        l1_error: errors,
    };
    writeln!(out, "eps,l1_error")?;
    for (eps, err) in summary.eps.iter().zip(&summary.l1_error) {
        writeln!(out, "{},{}", io::fmt_f64(*eps), io::fmt_f64(*err))?;
    }
    if let Some(path) = &config.report {
        io::write_json(&summary, path)?;
    }
    if let Some(path) = &config.plot {
        let labelled: Vec<(String, &bvp::Profile)> =
            profiles.iter().map(|(eps, pr)| (format!("eps={eps}"), pr)).collect();
        io::emit_plotdata(&labelled, Some(&exact), path, config.svg.as_deref())?;
    }
    if let Some(dir) = &config.out {
        std::fs::create_dir_all(dir)?;
        for (eps, profile) in &profiles {
            io::write_profile(profile, dir.join(format!("profile_eps{eps}.csv")))?;
        }
    }
    Ok(true)
}
