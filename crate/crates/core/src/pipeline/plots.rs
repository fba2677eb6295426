//! Plot-data CSVs and minimal SVG renderings.
//!
//! | file                             | columns                                  |
//! |----------------------------------|------------------------------------------|
//! | `phase_<year>_<kind>.csv`        | `year,t,u,v` then `# area,<value>`       |
//! | `acf_nao.csv`                    | `lag,value,band`                         |
//! | `ccf_nao_velocity.csv`           | `lag,value,band`                         |
//! | `skew_<yearly/monthly>.csv`      | `bucket,count,mean,median,mean_minus_median` |
//! | `dlm_coefficients.csv`           | `date,<one column per regressor>`        |
//!
//! Each CSV has an `.svg` sibling drawn in data coordinates.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::report::PipelineReport;
use crate::error::Result;
use crate::memory::{Correlogram, SkewSummary};

/// Writes files into one directory and can remove what it wrote.
pub(crate) struct OutputWriter {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl OutputWriter {
    pub(crate) fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(OutputWriter { dir: dir.to_path_buf(), written: Vec::new() })
    }

    pub(crate) fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents)?;
        self.written.push(path);
        Ok(())
    }

    pub(crate) fn written(&self) -> &[PathBuf] {
        &self.written
    }

    pub(crate) fn rollback(&mut self) {
        for p in self.written.drain(..) {
            let _ = fs::remove_file(p);
        }
    }
}

/// Render polylines in data coordinates. The viewBox is the padded bounding
/// box and a flip transform puts larger `y` at the top. A closed polyline
/// repeats its first point at the end.
pub fn render_svg(title: &str, lines: &[(&[(f64, f64)], bool)]) -> String {
    let pts = lines.iter().flat_map(|(p, _)| p.iter()).filter(|(x, y)| x.is_finite() && y.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let pad = |lo: f64, hi: f64| {
        let span = hi - lo;
        if span > 0.0 { 0.05 * span } else { 0.5 }
    };
    let (px, py) = (pad(x0, x1), pad(y0, y1));
    let (vx, vy, vw, vh) = (x0 - px, y0 - py, x1 - x0 + 2.0 * px, y1 - y0 + 2.0 * py);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="640" height="480" viewBox="{vx} {vy} {vw} {vh}" preserveAspectRatio="none">"#
    );
    let _ = writeln!(s, "<title>{title}</title>");
    let _ = writeln!(s, r#"<g transform="matrix(1 0 0 -1 0 {})">"#, 2.0 * vy + vh);
    for (i, (points, closed)) in lines.iter().enumerate() {
        let mut coords: Vec<String> = points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(x, y)| format!("{x},{y}"))
            .collect();
        if *closed && !coords.is_empty() {
            coords.push(coords[0].clone());
        }
        let _ = writeln!(
            s,
            r#"<polyline class="series{i}" fill="none" stroke="black" stroke-width="1" vector-effect="non-scaling-stroke" points="{}"/>"#,
            coords.join(" ")
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}

fn correlogram_csv(c: &Correlogram) -> String {
    let mut s = String::from("lag,value,band\n");
    for p in &c.points {
        let _ = writeln!(s, "{},{},{}", p.lag, p.value, c.band);
    }
    s
}

fn correlogram_svg(title: &str, c: &Correlogram) -> String {
    let pts: Vec<(f64, f64)> = c.points.iter().map(|p| (p.lag as f64, p.value)).collect();
    let (lo, hi) = (pts.first().map_or(0.0, |p| p.0), pts.last().map_or(0.0, |p| p.0));
    let upper = [(lo, c.band), (hi, c.band)];
    let lower = [(lo, -c.band), (hi, -c.band)];
    render_svg(title, &[(&pts, false), (&upper, false), (&lower, false)])
}

fn skew_csv(s: &SkewSummary) -> String {
    let mut out = String::from("bucket,count,mean,median,mean_minus_median\n");
    for b in &s.buckets {
        let _ = writeln!(out, "{},{},{},{},{}", b.bucket, b.count, b.mean, b.median, b.mean_minus_median);
    }
    out
}

/// Write every plot file the report has data for; returns the paths. On
/// failure the files written so far are removed.
pub fn emit_plots(report: &PipelineReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut w = OutputWriter::new(dir)?;
    match write_plots(report, &mut w) {
        Ok(()) => Ok(w.written().to_vec()),
        Err(e) => {
            w.rollback();
            Err(e)
        }
    }
}

pub(crate) fn write_plots(report: &PipelineReport, w: &mut OutputWriter) -> Result<()> {
    for tr in &report.trajectories {
        let stem = format!("phase_{}_{}", tr.year, tr.kind);
        let mut csv = String::from("year,t,u,v\n");
        for (t, (u, v)) in tr.t.iter().zip(&tr.points) {
            let _ = writeln!(csv, "{},{t},{u},{v}", tr.year);
        }
        let _ = writeln!(csv, "# area,{}", tr.area);
        w.write(&format!("{stem}.csv"), &csv)?;
        w.write(&format!("{stem}.svg"), &render_svg(&stem, &[(&tr.points, true)]))?;
    }
    if let Some(c) = &report.acf {
        w.write("acf_nao.csv", &correlogram_csv(c))?;
        w.write("acf_nao.svg", &correlogram_svg("acf_nao", c))?;
    }
    if let Some(c) = &report.ccf {
        w.write("ccf_nao_velocity.csv", &correlogram_csv(c))?;
        w.write("ccf_nao_velocity.svg", &correlogram_svg("ccf_nao_velocity", c))?;
    }
    for (name, s) in [("skew_yearly", &report.skew_yearly), ("skew_monthly", &report.skew_monthly)] {
        if let Some(s) = s {
            w.write(&format!("{name}.csv"), &skew_csv(s))?;
            let pts: Vec<(f64, f64)> =
                s.buckets.iter().enumerate().map(|(i, b)| (i as f64, b.mean_minus_median)).collect();
            let zero = [(0.0, 0.0), (pts.len().saturating_sub(1) as f64, 0.0)];
            w.write(&format!("{name}.svg"), &render_svg(name, &[(&pts, false), (&zero, false)]))?;
        }
    }
    if let Some(tr) = &report.dlm_trace {
        let mut csv = String::from("date");
        for l in &tr.labels {
            csv.push(',');
            csv.push_str(l);
        }
        csv.push('\n');
        for (i, d) in tr.times.iter().enumerate() {
            csv.push_str(&d.to_string());
            for p in &tr.coefficient_paths {
                let _ = write!(csv, ",{}", p[i]);
            }
            csv.push('\n');
        }
        w.write("dlm_coefficients.csv", &csv)?;
        let paths: Vec<Vec<(f64, f64)>> = tr
            .coefficient_paths
            .iter()
            .map(|p| p.iter().enumerate().map(|(i, b)| (i as f64, *b)).collect())
            .collect();
        let lines: Vec<(&[(f64, f64)], bool)> = paths.iter().map(|p| (p.as_slice(), false)).collect();
        w.write("dlm_coefficients.svg", &render_svg("dlm_coefficients", &lines))?;
    }
    Ok(())
}
