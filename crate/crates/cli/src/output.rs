//! CSV and SVG writers. Floats are written with Rust's shortest
//! round-trip formatting, so parsing a file back reproduces the values
//! bit-exactly.

use std::io::{self, Write};
use std::path::Path;

use num_complex::Complex64;
use quadprop::pdecheck::WaveField;
use quadprop::propagator::SweepTable;

pub const SWEEP_HEADER: &str = "n,x,t,re_psi_n,im_psi_n,re_phi_h,im_phi_h,err_re,err_im,err_abs";
pub const FIELD_HEADER: &str = "x,re_num,im_num,re_exact,im_exact";

pub fn write_sweep_csv(table: &SweepTable, path: &Path) -> io::Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "{SWEEP_HEADER}")?;
    for r in &table.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.x,
            r.t,
            r.psi_n.re,
            r.psi_n.im,
            r.phi_h.re,
            r.phi_h.im,
            r.err_re,
            r.err_im,
            r.err_abs
        )?;
    }
    out.flush()
}

pub fn write_field_csv(
    field: &WaveField,
    exact: &dyn Fn(f64) -> Complex64,
    path: &Path,
) -> io::Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "{FIELD_HEADER}")?;
    for (i, v) in field.values.iter().enumerate() {
        let x = field.grid.point(i);
        let e = exact(x);
        writeln!(out, "{},{},{},{},{}", x, v.re, v.im, e.re, e.im)?;
    }
    out.flush()
}

/// Minimal line chart of err_re (blue) and err_im (red) against n, the
/// color convention of the reference convergence figures. The CSV stays the
/// authoritative artifact.
pub fn write_sweep_svg(table: &SweepTable, path: &Path) -> io::Result<()> {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const ML: f64 = 60.0;
    const MR: f64 = 20.0;
    const MT: f64 = 30.0;
    const MB: f64 = 45.0;

    let ns: Vec<f64> = table.rows.iter().map(|r| r.n as f64).collect();
    let (n_lo, n_hi) = (ns[0], *ns.last().unwrap());
    let ys: Vec<f64> = table
        .rows
        .iter()
        .flat_map(|r| [r.err_re, r.err_im])
        .collect();
    let y_lo = ys.iter().copied().fold(f64::INFINITY, f64::min).min(0.0);
    let y_hi = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max).max(0.0);
    let y_span = (y_hi - y_lo).max(1e-300);
    let sx = |n: f64| ML + (n - n_lo) / (n_hi - n_lo).max(1e-300) * (W - ML - MR);
    let sy = |y: f64| H - MB - (y - y_lo) / y_span * (H - MT - MB);

    let poly = |vals: &dyn Fn(&quadprop::propagator::SweepRow) -> f64| -> String {
        table
            .rows
            .iter()
            .map(|r| format!("{:.2},{:.2}", sx(r.n as f64), sy(vals(r))))
            .collect::<Vec<_>>()
            .join(" ")
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"18\" font-family=\"sans-serif\" font-size=\"13\">{} h={} p={} x={} t={}: \
         re (blue) / im (red) error vs n</text>\n",
        ML, table.model, table.h, table.p,
        table.rows.first().map(|r| r.x).unwrap_or(0.0),
        table.rows.first().map(|r| r.t).unwrap_or(0.0),
    ));
    // axes
    svg.push_str(&format!(
        "<line x1=\"{ML}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        H - MB,
        W - MR,
        H - MB
    ));
    svg.push_str(&format!(
        "<line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{}\" stroke=\"black\"/>\n",
        H - MB
    ));
    if y_lo < 0.0 && y_hi > 0.0 {
        svg.push_str(&format!(
            "<line x1=\"{ML}\" y1=\"{0:.2}\" x2=\"{1}\" y2=\"{0:.2}\" stroke=\"#cccccc\"/>\n",
            sy(0.0),
            W - MR
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{ML}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">n = {n_lo}</text>\n",
        H - MB + 16.0
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">n = {n_hi}</text>\n",
        W - MR,
        H - MB + 16.0
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
         transform=\"rotate(-90 14 {})\">[{y_lo:.3e}, {y_hi:.3e}]</text>\n",
        14.0,
        H / 2.0,
        H / 2.0
    ));
    svg.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"blue\" stroke-width=\"1.5\"/>\n",
        poly(&|r| r.err_re)
    ));
    svg.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"red\" stroke-width=\"1.5\"/>\n",
        poly(&|r| r.err_im)
    ));
    svg.push_str("</svg>\n");
    std::fs::write(path, svg)
}
