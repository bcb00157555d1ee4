//! SVG renderers for experiment reports: log-log convergence lines, a
//! modulus-of-continuity fit with growth-function overlays, and a domain
//! field heatmap. The SVG is assembled by hand; an empty data selection is
//! an error, never an empty picture.

use crate::error::{Error, Result};
use crate::growth::GrowthFunction;
use crate::quad::QuadratureSpec;
use crate::report::{ExperimentReport, Row};
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    Convergence,
    ModulusFit,
    FieldHeatmap,
}

impl PlotKind {
    pub fn name(self) -> &'static str {
        match self {
            PlotKind::Convergence => "convergence",
            PlotKind::ModulusFit => "modulus_fit",
            PlotKind::FieldHeatmap => "field_heatmap",
        }
    }
}

impl FromStr for PlotKind {
    type Err = Error;

    fn from_str(text: &str) -> Result<PlotKind> {
        match text {
            "convergence" => Ok(PlotKind::Convergence),
            "modulus_fit" => Ok(PlotKind::ModulusFit),
            "field_heatmap" => Ok(PlotKind::FieldHeatmap),
            other => Err(Error::Config(format!(
                "unknown plot kind '{other}'; expected convergence, modulus_fit, or field_heatmap"
            ))),
        }
    }
}

pub fn render(report: &ExperimentReport, kind: PlotKind, path: &Path) -> Result<()> {
    let svg = render_string(report, kind)?;
    std::fs::write(path, svg)?;
    Ok(())
}

pub fn render_string(report: &ExperimentReport, kind: PlotKind) -> Result<String> {
    match kind {
        PlotKind::Convergence => convergence(report),
        PlotKind::ModulusFit => modulus_fit(report),
        PlotKind::FieldHeatmap => field_heatmap(report),
    }
}

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 540.0;
const PALETTE: [&str; 6] = ["#3f6ad8", "#d8413f", "#2e9e62", "#b052c4", "#c98a2e", "#5ab4c9"];

/// Maps data coordinates into the plot viewport; y grows upward.
struct Frame {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
}

impl Frame {
    fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Frame {
        let (xmin, xmax) = pad_span(xmin, xmax);
        let (ymin, ymax) = pad_span(ymin, ymax);
        Frame { x0: 70.0, y0: 40.0, w: WIDTH - 250.0, h: HEIGHT - 110.0, xmin, xmax, ymin, ymax }
    }

    fn sx(&self, x: f64) -> f64 {
        self.x0 + (x - self.xmin) / (self.xmax - self.xmin) * self.w
    }

    fn sy(&self, y: f64) -> f64 {
        self.y0 + self.h - (y - self.ymin) / (self.ymax - self.ymin) * self.h
    }
}

fn pad_span(lo: f64, hi: f64) -> (f64, f64) {
    if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.06 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

fn svg_open(out: &mut String, title: &str) {
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"system-ui, sans-serif\" font-size=\"13\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>\n\
         <text x=\"{}\" y=\"24\" font-size=\"16\" fill=\"#1c1c1c\">{title}</text>\n",
        70.0
    );
}

/// Axes box with decade gridlines and `1e{k}` tick labels on both log axes.
fn log_axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let _ = write!(
        out,
        "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" stroke=\"#888\"/>\n",
        frame.x0, frame.y0, frame.w, frame.h
    );
    for k in (frame.xmin.ceil() as i64)..=(frame.xmax.floor() as i64) {
        let x = frame.sx(k as f64);
        let _ = write!(
            out,
            "<line x1=\"{x:.1}\" y1=\"{:.1}\" x2=\"{x:.1}\" y2=\"{:.1}\" stroke=\"#ddd\"/>\n\
             <text x=\"{x:.1}\" y=\"{:.1}\" text-anchor=\"middle\" fill=\"#444\">1e{k}</text>\n",
            frame.y0,
            frame.y0 + frame.h,
            frame.y0 + frame.h + 18.0
        );
    }
    for k in (frame.ymin.ceil() as i64)..=(frame.ymax.floor() as i64) {
        let y = frame.sy(k as f64);
        let _ = write!(
            out,
            "<line x1=\"{:.1}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"#ddd\"/>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" fill=\"#444\">1e{k}</text>\n",
            frame.x0,
            frame.x0 + frame.w,
            frame.x0 - 6.0,
            y + 4.0
        );
    }
    let _ = write!(
        out,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" fill=\"#1c1c1c\">{x_label}</text>\n\
         <text x=\"18\" y=\"{:.1}\" fill=\"#1c1c1c\" transform=\"rotate(-90 18 {:.1})\" text-anchor=\"middle\">{y_label}</text>\n",
        frame.x0 + frame.w / 2.0,
        frame.y0 + frame.h + 38.0,
        frame.y0 + frame.h / 2.0,
        frame.y0 + frame.h / 2.0
    );
}

fn polyline(out: &mut String, points: &[(f64, f64)], color: &str, dashed: bool) {
    let coords: Vec<String> = points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    let dash = if dashed { " stroke-dasharray=\"6 4\"" } else { "" };
    let _ = write!(
        out,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\"{dash}/>\n",
        coords.join(" ")
    );
}

fn markers(out: &mut String, points: &[(f64, f64)], color: &str) {
    for (x, y) in points {
        let _ = write!(out, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3.2\" fill=\"{color}\"/>\n");
    }
}

fn legend(out: &mut String, entries: &[(String, &str)]) {
    let x = WIDTH - 168.0;
    let mut y = 48.0;
    let h = 20.0 * entries.len() as f64 + 12.0;
    let _ = write!(
        out,
        "<rect x=\"{:.1}\" y=\"36\" width=\"156\" height=\"{h:.1}\" fill=\"#fafafa\" stroke=\"#bbb\"/>\n",
        x - 8.0
    );
    for (label, color) in entries {
        y += 20.0;
        let _ = write!(
            out,
            "<line x1=\"{x:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"{color}\" stroke-width=\"3\"/>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" fill=\"#1c1c1c\">{label}</text>\n",
            y - 4.0,
            x + 22.0,
            y - 4.0,
            x + 30.0,
            y
        );
    }
}

/// Rows that carry a resolution column, in report order.
fn resolution_rows(report: &ExperimentReport) -> Vec<&Row> {
    report.rows.iter().filter(|r| r.contains_key("n")).collect()
}

fn convergence(report: &ExperimentReport) -> Result<String> {
    let rows = resolution_rows(report);
    let mut keys: Vec<&str> = rows
        .iter()
        .flat_map(|r| r.keys().map(String::as_str))
        .filter(|&k| k != "n")
        .collect();
    keys.sort_unstable();
    keys.dedup();
    // A series needs at least two positive samples to say anything about
    // convergence.
    let mut series: Vec<(&str, Vec<(f64, f64)>)> = Vec::new();
    for key in keys {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter_map(|r| {
                let v = *r.get(key)?;
                (v > 0.0 && v.is_finite()).then(|| (r["n"].log10(), v.log10()))
            })
            .collect();
        if pts.len() >= 2 {
            series.push((key, pts));
        }
    }
    if series.is_empty() {
        return Err(Error::Config("report has no convergence series to plot".into()));
    }
    let xs = series.iter().flat_map(|(_, p)| p.iter().map(|q| q.0));
    let ys = series.iter().flat_map(|(_, p)| p.iter().map(|q| q.1));
    let frame = Frame::new(
        xs.clone().fold(f64::INFINITY, f64::min),
        xs.fold(f64::NEG_INFINITY, f64::max),
        ys.clone().fold(f64::INFINITY, f64::min),
        ys.fold(f64::NEG_INFINITY, f64::max),
    );
    let mut out = String::new();
    svg_open(&mut out, &format!("{}: convergence", report.experiment));
    log_axes(&mut out, &frame, "N", "value");
    let mut entries = Vec::new();
    for (k, (key, pts)) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mapped: Vec<(f64, f64)> =
            pts.iter().map(|(x, y)| (frame.sx(*x), frame.sy(*y))).collect();
        polyline(&mut out, &mapped, color, false);
        markers(&mut out, &mapped, color);
        entries.push(((*key).to_string(), color));
    }
    legend(&mut out, &entries);
    out.push_str("</svg>\n");
    Ok(out)
}

fn modulus_fit(report: &ExperimentReport) -> Result<String> {
    let bins: Vec<(f64, f64)> = report
        .rows
        .iter()
        .filter_map(|r| {
            let lo = *r.get("bin_lo")?;
            let hi = *r.get("bin_hi")?;
            let delta = *r.get("max_delta")?;
            (delta > 0.0).then(|| ((lo * hi).sqrt(), delta))
        })
        .collect();
    if bins.is_empty() {
        return Err(Error::Config("report has no modulus rows to plot".into()));
    }
    let logs: Vec<(f64, f64)> = bins.iter().map(|(t, d)| (t.log10(), d.log10())).collect();
    let mut frame_pts = logs.clone();

    // Overlays: the configured growth function and its Zygmund transform,
    // each scaled by the median measured ratio.
    let mut overlays: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    if let Some(spec) = &report.provenance.config.omega {
        let g = GrowthFunction::new(spec.clone())?.extend();
        let quad_spec = QuadratureSpec::default();
        let omega_curve: Vec<(f64, f64)> =
            bins.iter().map(|(t, _)| Ok((*t, g.eval(*t)?))).collect::<Result<_>>()?;
        let zyg_curve: Vec<(f64, f64)> = bins
            .iter()
            .map(|(t, _)| Ok((*t, g.zygmund_transform(*t, &quad_spec)?)))
            .collect::<Result<_>>()?;
        for (label, curve) in [("c*omega(t)", omega_curve), ("c*omega_Z(t)", zyg_curve)] {
            let mut ratios: Vec<f64> =
                bins.iter().zip(&curve).map(|((_, d), (_, w))| d / w).collect();
            ratios.sort_by(f64::total_cmp);
            let c = ratios[ratios.len() / 2];
            let pts: Vec<(f64, f64)> =
                curve.iter().map(|(t, w)| (t.log10(), (c * w).log10())).collect();
            frame_pts.extend(pts.iter().copied());
            overlays.push((label.to_string(), pts));
        }
    }

    let frame = Frame::new(
        frame_pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min),
        frame_pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max),
        frame_pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min),
        frame_pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max),
    );
    let mut out = String::new();
    svg_open(&mut out, &format!("{}: modulus of continuity", report.experiment));
    log_axes(&mut out, &frame, "pair distance t", "max |f(x) - f(y)|");
    let mapped: Vec<(f64, f64)> = logs.iter().map(|(x, y)| (frame.sx(*x), frame.sy(*y))).collect();
    markers(&mut out, &mapped, PALETTE[0]);
    let mut entries = vec![("measured bins".to_string(), PALETTE[0])];
    for (k, (label, pts)) in overlays.iter().enumerate() {
        let color = PALETTE[k + 1];
        let mapped: Vec<(f64, f64)> =
            pts.iter().map(|(x, y)| (frame.sx(*x), frame.sy(*y))).collect();
        polyline(&mut out, &mapped, color, true);
        entries.push((label.clone(), color));
    }
    legend(&mut out, &entries);
    out.push_str("</svg>\n");
    Ok(out)
}

fn field_heatmap(report: &ExperimentReport) -> Result<String> {
    let probes: Vec<(f64, f64, f64, f64)> = report
        .rows
        .iter()
        .filter_map(|r| {
            Some((*r.get("x")?, *r.get("y")?, *r.get("rho")?, *r.get("grad_norm")?))
        })
        .collect();
    if probes.is_empty() {
        return Err(Error::Config("report has no field probes to plot".into()));
    }
    let spec = report.provenance.config.omega.clone().unwrap_or(
        crate::growth::GrowthSpec::Power { alpha: 0.5, d: 1.0 },
    );
    let g = GrowthFunction::new(spec)?.extend();
    let quad_spec = QuadratureSpec::default();

    // Band index: measured |grad| against W_omega~(rho) thresholds.
    let thresholds = [0.5, 1.0, 2.0, 4.0];
    let band_colors = ["#3f6ad8", "#5ab4c9", "#2e9e62", "#c98a2e", "#d8413f"];
    let mut banded = Vec::with_capacity(probes.len());
    for (x, y, rho, grad) in &probes {
        let w = g.w_omega(*rho, &quad_spec)?;
        let ratio = grad / w;
        let band = thresholds.iter().filter(|&&t| ratio >= t).count();
        banded.push((*x, *y, band));
    }

    let xmin = probes.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let xmax = probes.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let ymin = probes.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let ymax = probes.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let span = (xmax - xmin).max(ymax - ymin).max(1e-12);
    let side = (HEIGHT - 120.0).min(WIDTH - 260.0);
    let scale = side / (span * 1.12);
    let cx = (xmin + xmax) / 2.0;
    let cy = (ymin + ymax) / 2.0;
    let px = |x: f64| 70.0 + side / 2.0 + (x - cx) * scale;
    let py = |y: f64| 50.0 + side / 2.0 - (y - cy) * scale;

    let mut out = String::new();
    svg_open(&mut out, &format!("{}: |grad S1| in W bands", report.experiment));
    let _ = write!(
        out,
        "<rect x=\"70\" y=\"50\" width=\"{side:.1}\" height=\"{side:.1}\" fill=\"none\" stroke=\"#888\"/>\n"
    );
    for (x, y, band) in &banded {
        let _ = write!(
            out,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"{}\" fill-opacity=\"0.85\"/>\n",
            px(*x),
            py(*y),
            band_colors[*band]
        );
    }
    let labels = ["< 0.5", "0.5 - 1", "1 - 2", "2 - 4", ">= 4"];
    let entries: Vec<(String, &str)> = labels
        .iter()
        .zip(band_colors)
        .map(|(l, c)| (format!("|grad| / W: {l}"), c))
        .collect();
    legend(&mut out, &entries);
    out.push_str("</svg>\n");
    Ok(out)
}
