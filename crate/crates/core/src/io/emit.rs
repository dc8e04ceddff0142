//! JSON, SVG and 3D polyline renderings of a [`LiftReport`].

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_traits::ToPrimitive;

use crate::lattice::parse_rational;

use super::report::LiftReport;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Targets {
    pub json: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub lines3d: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
#[error("{}: {source}", path.display())]
pub struct EmitError {
    pub path: PathBuf,
    pub source: std::io::Error,
}

pub fn render_json(report: &LiftReport) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serialises");
    text.push('\n');
    text
}

const CANVAS: f64 = 640.0;
const MARGIN: f64 = 96.0;
const RAY_LENGTH: f64 = 48.0;

fn num(text: &str) -> f64 {
    parse_rational(text).and_then(|q| q.to_f64()).expect("report numbers are rationals")
}

pub fn render_svg(report: &LiftReport) -> String {
    let points: Vec<(f64, f64)> = report.vertices.iter().map(|v| (num(&v.mu[0]), num(&v.mu[1]))).collect();
    let fold = |f: fn(f64, f64) -> f64, init: f64, pick: fn(&(f64, f64)) -> f64| {
        points.iter().map(pick).fold(init, f)
    };
    let (min_x, max_x) = (fold(f64::min, f64::INFINITY, |p| p.0), fold(f64::max, f64::NEG_INFINITY, |p| p.0));
    let (min_y, max_y) = (fold(f64::min, f64::INFINITY, |p| p.1), fold(f64::max, f64::NEG_INFINITY, |p| p.1));
    let span = (max_x - min_x).max(max_y - min_y);
    let scale = if span > 0.0 { (CANVAS - 2.0 * MARGIN) / span } else { 1.0 };
    let cx = (min_x + max_x) / 2.0;
    let cy = (min_y + max_y) / 2.0;
    let place = |x: f64, y: f64| (CANVAS / 2.0 + (x - cx) * scale, CANVAS / 2.0 - (y - cy) * scale);
    let index = |id: &str| report.vertices.iter().position(|v| v.id == id).expect("known vertex");

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" viewBox="0 0 {CANVAS} {CANVAS}">"#
    );
    svg.push_str(
        "<defs><marker id=\"arrow\" markerWidth=\"8\" markerHeight=\"8\" refX=\"7\" refY=\"4\" orient=\"auto\">\
         <path d=\"M0,0 L8,4 L0,8 z\" fill=\"#555\"/></marker></defs>\n",
    );
    let _ = writeln!(svg, r##"<rect width="{CANVAS}" height="{CANVAS}" fill="#fff"/>"##);
    for e in &report.edges {
        let (x1, y1) = place(points[index(&e.from)].0, points[index(&e.from)].1);
        let (x2, y2) = place(points[index(&e.to)].0, points[index(&e.to)].1);
        let _ = writeln!(
            svg,
            r##"<line class="edge" x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="#000" stroke-width="2"/>"##
        );
    }
    for r in &report.rays {
        let (x1, y1) = place(points[index(&r.at)].0, points[index(&r.at)].1);
        let (dx, dy) = (num(&r.direction[0]), num(&r.direction[1]));
        let norm = dx.hypot(dy);
        let (x2, y2) = (x1 + RAY_LENGTH * dx / norm, y1 - RAY_LENGTH * dy / norm);
        let _ = writeln!(
            svg,
            r##"<line class="ray" x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="#555" stroke-width="1.5" marker-end="url(#arrow)"/>"##
        );
    }
    for (v, vertex) in report.vertices.iter().enumerate() {
        let (x, y) = place(points[v].0, points[v].1);
        let _ = writeln!(svg, r##"<circle class="vertex" cx="{x:.2}" cy="{y:.2}" r="4" fill="#c00"/>"##);
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" font-family="monospace">{} ν₃={}</text>"#,
            x + 6.0,
            y - 6.0,
            escape(&vertex.id),
            escape(&vertex.nu3)
        );
    }
    for res in &report.residuals {
        let n = res.cycle.len().max(1) as f64;
        let (sx, sy) = res
            .cycle
            .iter()
            .map(|id| points[index(id)])
            .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
        let (x, y) = place(sx / n, sy / n);
        let _ = writeln!(
            svg,
            r##"<text class="residual" x="{x:.2}" y="{y:.2}" font-size="12" font-family="monospace" fill="#00a" text-anchor="middle">{}: {}</text>"##,
            escape(&res.site),
            escape(&res.value)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// One `edge` line per compact edge and one `ray` line per ray, `z = ν₃`.
pub fn render_lines3d(report: &LiftReport) -> String {
    let mut out = String::from("# edge FROM TO x1 y1 z1 x2 y2 z2\n# ray AT x y z dx dy dz\n");
    let vertex = |id: &str| report.vertices.iter().find(|v| v.id == id).expect("known vertex");
    for e in &report.edges {
        let (a, b) = (vertex(&e.from), vertex(&e.to));
        let _ = writeln!(
            out,
            "edge {} {} {} {} {} {} {} {}",
            e.from, e.to, a.mu[0], a.mu[1], a.nu3, b.mu[0], b.mu[1], b.nu3
        );
    }
    for r in &report.rays {
        let a = vertex(&r.at);
        let [dx, dy, dz] = &r.direction3d;
        let _ = writeln!(out, "ray {} {} {} {} {dx} {dy} {dz}", r.at, a.mu[0], a.mu[1], a.nu3);
    }
    out
}

fn write(path: &Path, text: &str) -> Result<PathBuf, EmitError> {
    std::fs::write(path, text).map_err(|source| EmitError {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(path.to_path_buf())
}

/// Writes every requested target, returning the paths written.
pub fn emit_outputs(report: &LiftReport, targets: &Targets) -> Result<Vec<PathBuf>, EmitError> {
    let mut written = Vec::new();
    if let Some(p) = &targets.json {
        written.push(write(p, &render_json(report))?);
    }
    if let Some(p) = &targets.svg {
        written.push(write(p, &render_svg(report))?);
    }
    if let Some(p) = &targets.lines3d {
        written.push(write(p, &render_lines3d(report))?);
    }
    Ok(written)
}
