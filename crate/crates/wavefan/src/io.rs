//! CSV, JSON and SVG artifacts.
//!
//! Numbers are written with 17 significant digits, which reproduce every
//! `f64` exactly when read back.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::bvp::Profile;
use crate::corner::{first_integral_h, CornerProfile};
use crate::error::{Result, WavefanError};
use crate::mesh::{interp_linear, Mesh};
use crate::riemann::RiemannSolution;

/// Points of the common grid used by [`emit_plotdata`].
pub const PLOT_POINTS: usize = 1001;

pub const PROFILE_HEADER: [&str; 3] = ["xi", "u", "du"];
pub const CORNER_HEADER: [&str; 5] = ["xi", "U", "p", "w", "H"];

/// Full-precision decimal text of `x`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_profile(profile: &Profile, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path.as_ref())?;
    write_profile_to(profile, BufWriter::new(file))
}

pub fn write_profile_to<W: Write>(profile: &Profile, sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(PROFILE_HEADER)?;
    for ((xi, u), du) in profile.xi().iter().zip(&profile.u).zip(&profile.du) {
        w.write_record([fmt_f64(*xi), fmt_f64(*u), fmt_f64(*du)])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a file written by [`write_profile`]; slopes are taken as stored.
pub fn read_profile(path: impl AsRef<Path>) -> Result<Profile> {
    let path = path.as_ref();
    let shown = path.display().to_string();
    let malformed = |line: u64, reason: String| WavefanError::MalformedFile {
        path: shown.clone(),
        line,
        reason,
    };
    let mut reader = csv::ReaderBuilder::new().has_headers(false).from_path(path)?;
    let mut records = reader.records();
    let header = match records.next() {
        Some(r) => r?,
        None => return Err(malformed(1, "empty file, expected header `xi,u,du`".into())),
    };
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    if names != PROFILE_HEADER {
        return Err(malformed(1, format!("missing header `xi,u,du` (found `{}`)", names.join(","))));
    }
    let (mut xi, mut u, mut du) = (Vec::new(), Vec::new(), Vec::new());
    for record in records {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != 3 {
            return Err(malformed(line, format!("expected 3 fields, found {}", record.len())));
        }
        let mut values = [0.0; 3];
        for (slot, field) in values.iter_mut().zip(record.iter()) {
            *slot = field
                .trim()
                .parse::<f64>()
                .map_err(|_| malformed(line, format!("not a number: `{field}`")))?;
        }
        if let Some(prev) = xi.last() {
            if !(values[0] > *prev) {
                return Err(malformed(line, format!("xi = {} does not increase (previous {prev})", values[0])));
            }
        }
        xi.push(values[0]);
        u.push(values[1]);
        du.push(values[2]);
    }
    let mesh = Mesh::new(xi).map_err(|e| malformed(0, e.to_string()))?;
    Ok(Profile { mesh, u, du })
}

/// Corner samples with the first integral at each node.
pub fn write_corner(corner: &CornerProfile, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path.as_ref())?;
    write_corner_to(corner, BufWriter::new(file))
}

pub fn write_corner_to<W: Write>(corner: &CornerProfile, sink: W) -> Result<()> {
    let h = first_integral_h(corner, 1.0)?;
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(CORNER_HEADER)?;
    for i in 0..corner.len() {
        w.write_record([
            fmt_f64(corner.xi()[i]),
            fmt_f64(corner.u[i]),
            fmt_f64(corner.p[i]),
            fmt_f64(corner.w[i]),
            fmt_f64(h[i]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `(xi, u)` table of a Riemann solution on `samples` equispaced points.
pub fn write_riemann_table<W: Write>(solution: &RiemannSolution, range: (f64, f64), samples: usize, sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["xi", "u"])?;
    for xi in grid(range.0, range.1, samples.max(2)) {
        w.write_record([fmt_f64(xi), fmt_f64(solution.eval(xi))])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let mut file = BufWriter::new(File::create(path.as_ref())?);
    serde_json::to_writer_pretty(&mut file, value)?;
    writeln!(file)?;
    file.flush()?;
    Ok(())
}

/// Columns sampled on a common grid: `xi`, one per profile, and `exact`
/// when a Riemann solution is given.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotData {
    pub labels: Vec<String>,
    pub xi: Vec<f64>,
    pub columns: Vec<Vec<f64>>,
}

impl PlotData {
    /// Samples every profile (clamped linear interpolation) on
    /// [`PLOT_POINTS`] points spanning the union of their meshes. With no
    /// profiles the data has headers only.
    pub fn new(profiles: &[(String, &Profile)], reference: Option<&RiemannSolution>) -> Self {
        let mut labels: Vec<String> = profiles.iter().map(|(l, _)| l.clone()).collect();
        if reference.is_some() {
            labels.push("exact".into());
        }
        if profiles.is_empty() {
            return PlotData {
                labels,
                xi: Vec::new(),
                columns: Vec::new(),
            };
        }
        let lo = profiles.iter().map(|(_, p)| p.mesh.lo()).fold(f64::INFINITY, f64::min);
        let hi = profiles.iter().map(|(_, p)| p.mesh.hi()).fold(f64::NEG_INFINITY, f64::max);
        let xi: Vec<f64> = grid(lo, hi, PLOT_POINTS).collect();
        let mut columns: Vec<Vec<f64>> = profiles
            .iter()
            .map(|(_, p)| xi.iter().map(|x| interp_linear(p.xi(), &p.u, *x)).collect())
            .collect();
        if let Some(exact) = reference {
            columns.push(xi.iter().map(|x| exact.eval(*x)).collect());
        }
        PlotData { labels, xi, columns }
    }

    pub fn write_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        let mut header = vec!["xi".to_string()];
        header.extend(self.labels.iter().cloned());
        w.write_record(&header)?;
        for (i, xi) in self.xi.iter().enumerate() {
            let mut row = vec![fmt_f64(*xi)];
            row.extend(self.columns.iter().map(|c| fmt_f64(c[i])));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Line chart with axes, tick labels and a legend; one polyline per
    /// data column.
    pub fn write_svg<W: Write>(&self, mut sink: W) -> Result<()> {
        const WIDTH: f64 = 720.0;
        const HEIGHT: f64 = 440.0;
        const MARGIN: f64 = 60.0;
        const COLORS: [&str; 8] = [
            "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
        ];
        let (x_lo, x_hi) = bounds(self.xi.iter());
        let (y_lo, y_hi) = bounds(self.columns.iter().flatten());
        let sx = |x: f64| MARGIN + (x - x_lo) / (x_hi - x_lo) * (WIDTH - 2.0 * MARGIN);
        let sy = |y: f64| HEIGHT - MARGIN - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - 2.0 * MARGIN);

        writeln!(
            sink,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        )?;
        writeln!(sink, r#"<rect width="100%" height="100%" fill="white"/>"#)?;
        let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
        writeln!(sink, r#"<g stroke="black" stroke-width="1">"#)?;
        writeln!(sink, r#"<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}"/>"#)?;
        writeln!(sink, r#"<line x1="{left}" y1="{bottom}" x2="{left}" y2="{top}"/>"#)?;
        writeln!(sink, "</g>")?;
        for k in 0..=4 {
            let t = k as f64 / 4.0;
            let (xv, yv) = (x_lo + t * (x_hi - x_lo), y_lo + t * (y_hi - y_lo));
            writeln!(
                sink,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
                sx(xv),
                bottom + 18.0,
                tick(xv)
            )?;
            writeln!(
                sink,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
                left - 6.0,
                sy(yv) + 4.0,
                tick(yv)
            )?;
        }
        writeln!(
            sink,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">xi</text>"#,
            0.5 * (left + right),
            HEIGHT - 15.0
        )?;
        for (k, (label, column)) in self.labels.iter().zip(&self.columns).enumerate() {
            let color = COLORS[k % COLORS.len()];
            let points: Vec<String> = self
                .xi
                .iter()
                .zip(column)
                .map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y)))
                .collect();
            writeln!(
                sink,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                points.join(" ")
            )?;
            let ly = top + 16.0 * k as f64;
            writeln!(
                sink,
                r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#,
                right - 110.0,
                right - 90.0
            )?;
            writeln!(
                sink,
                r#"<text x="{:.1}" y="{:.1}">{}</text>"#,
                right - 84.0,
                ly + 4.0,
                escape(label)
            )?;
        }
        writeln!(sink, "</svg>")?;
        Ok(())
    }
}

/// Writes [`PlotData`] as CSV to `path` and, when given, as SVG to `svg`.
pub fn emit_plotdata(
    profiles: &[(String, &Profile)],
    reference: Option<&RiemannSolution>,
    path: impl AsRef<Path>,
    svg: Option<&Path>,
) -> Result<PlotData> {
    let data = PlotData::new(profiles, reference);
    data.write_csv(BufWriter::new(File::create(path.as_ref())?))?;
    if let Some(svg) = svg {
        let mut sink = BufWriter::new(File::create(svg)?);
        data.write_svg(&mut sink)?;
        sink.flush()?;
    }
    Ok(data)
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(move |k| if k + 1 == n { hi } else { lo + step * k as f64 })
}

fn bounds<'a>(values: impl Iterator<Item = &'a f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 * (1.0 + lo.abs()) {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn tick(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
