//! Self-contained SVG figures drawn from result records.

use std::fmt::Write as _;

use mesochaos::stats::linear_fit;

use crate::error::{HarnessError, Result};
use crate::record::ResultRecord;
use crate::spec::FigureStyle;

const W: f64 = 640.0;
const H: f64 = 420.0;
const MARGIN: (f64, f64, f64, f64) = (70.0, 20.0, 40.0, 50.0); // left, right, top, bottom
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub style: FigureStyle,
    pub svg: String,
    /// Fitted log-log slope, for decay figures.
    pub slope: Option<f64>,
    /// `estimate / reference` per plotted point, for moment comparisons.
    pub ratios: Vec<f64>,
}

struct Panel {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    xr: (f64, f64),
    yr: (f64, f64),
    logx: bool,
    logy: bool,
}

impl Panel {
    fn new(top: f64, height: f64, xs: &[f64], ys: &[f64], logx: bool, logy: bool) -> Self {
        let range = |v: &[f64], log: bool| {
            let t: Vec<f64> = v.iter().map(|&x| if log { x.log10() } else { x }).collect();
            let lo = t.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = t.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 };
            (lo - pad, hi + pad)
        };
        Self {
            x0: MARGIN.0,
            y0: top,
            w: W - MARGIN.0 - MARGIN.1,
            h: height,
            xr: range(xs, logx),
            yr: range(ys, logy),
            logx,
            logy,
        }
    }

    fn px(&self, x: f64) -> f64 {
        let x = if self.logx { x.log10() } else { x };
        self.x0 + (x - self.xr.0) / (self.xr.1 - self.xr.0) * self.w
    }

    fn py(&self, y: f64) -> f64 {
        let y = if self.logy { y.log10() } else { y };
        self.y0 + self.h - (y - self.yr.0) / (self.yr.1 - self.yr.0) * self.h
    }

    fn axes(&self, s: &mut String, xlabel: &str, ylabel: &str) {
        let _ = write!(
            s,
            r#"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
            self.x0, self.y0, self.w, self.h
        );
        for (k, (lo, hi, log, horizontal)) in [
            (self.xr.0, self.xr.1, self.logx, true),
            (self.yr.0, self.yr.1, self.logy, false),
        ]
        .into_iter()
        .enumerate()
        {
            for i in 0..=4 {
                let t = lo + (hi - lo) * i as f64 / 4.0;
                let v = if log { 10f64.powf(t) } else { t };
                let label = tick_label(v);
                if horizontal {
                    let x = self.px(v);
                    let y = self.y0 + self.h;
                    let _ = write!(
                        s,
                        r#"<line x1="{x:.1}" y1="{y:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/><text x="{x:.1}" y="{:.1}" font-size="11" text-anchor="middle">{label}</text>"#,
                        y + 4.0,
                        y + 16.0
                    );
                } else {
                    let y = self.py(v);
                    let _ = write!(
                        s,
                        r#"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="black"/><text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{label}</text>"#,
                        self.x0 - 4.0,
                        self.x0,
                        self.x0 - 6.0,
                        y + 4.0
                    );
                }
            }
            let _ = k;
        }
        let _ = write!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">{}</text>"#,
            self.x0 + 0.5 * self.w,
            self.y0 + self.h + 32.0,
            escape(xlabel)
        );
        let (lx, ly) = (18.0, self.y0 + 0.5 * self.h);
        let _ = write!(
            s,
            r#"<text x="{lx}" y="{ly:.1}" font-size="12" text-anchor="middle" transform="rotate(-90 {lx} {ly:.1})">{}</text>"#,
            escape(ylabel)
        );
    }

    fn series(&self, s: &mut String, xs: &[f64], ys: &[f64], color: &str, markers: bool) {
        let pts: Vec<String> = xs
            .iter()
            .zip(ys)
            .map(|(&x, &y)| format!("{:.2},{:.2}", self.px(x), self.py(y)))
            .collect();
        let _ = write!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            pts.join(" ")
        );
        if markers {
            for (&x, &y) in xs.iter().zip(ys) {
                let _ = write!(
                    s,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                    self.px(x),
                    self.py(y)
                );
            }
        }
    }
}

fn tick_label(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.1e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn open(title: &str) -> String {
    format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif"><rect width="100%" height="100%" fill="white"/><text x="{:.1}" y="24" font-size="14" text-anchor="middle">{}</text>"#,
        W / 2.0,
        escape(title)
    )
}

fn legend(s: &mut String, entries: &[(&str, &str)], x: f64, y: f64) {
    for (i, (label, color)) in entries.iter().enumerate() {
        let yy = y + 16.0 * i as f64;
        let _ = write!(
            s,
            r#"<line x1="{x:.1}" y1="{yy:.1}" x2="{:.1}" y2="{yy:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}" font-size="11">{}</text>"#,
            x + 20.0,
            x + 25.0,
            yy + 4.0,
            escape(label)
        );
    }
}

fn mismatch(style: FigureStyle, reason: impl Into<String>) -> HarnessError {
    HarnessError::ColumnMismatch {
        style: style.to_string(),
        reason: reason.into(),
    }
}

fn pick<'a>(rec: &ResultRecord, names: &[&'a str]) -> Option<(&'a str, Vec<f64>)> {
    names.iter().find_map(|n| rec.floats(n).map(|v| (*n, v)))
}

pub fn emit_figure(rec: &ResultRecord, style: FigureStyle) -> Result<Figure> {
    if rec.rows.is_empty() {
        return Err(HarnessError::EmptyRecord);
    }
    match style {
        FigureStyle::LoglogDecay => loglog_decay(rec),
        FigureStyle::MomentCompare => moment_compare(rec),
        FigureStyle::DensitySnapshot => density_snapshot(rec),
    }
}

fn loglog_decay(rec: &ResultRecord) -> Result<Figure> {
    let style = FigureStyle::LoglogDecay;
    let (xn, xs) =
        pick(rec, &["n", "eps"]).ok_or_else(|| mismatch(style, "needs an `n` or `eps` column"))?;
    let (yn, ys) = pick(rec, &["error", "residual", "discrepancy", "rel_gap"])
        .ok_or_else(|| mismatch(style, "needs an error-like column"))?;
    let (px, py): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(&ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (*x, *y))
        .unzip();
    if px.len() < 2 {
        return Err(mismatch(style, "fewer than two positive points"));
    }
    let lx: Vec<f64> = px.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = py.iter().map(|y| y.ln()).collect();
    let fit = linear_fit(&lx, &ly);
    let mut s = open(&format!(
        "{} ({}): {yn} vs {xn}",
        rec.meta.kind, rec.meta.anchor
    ));
    let panel = Panel::new(MARGIN.2, H - MARGIN.2 - MARGIN.3, &px, &py, true, true);
    panel.axes(&mut s, xn, yn);
    panel.series(&mut s, &px, &py, COLORS[0], true);
    let (a, b) = (px[0], px[px.len() - 1]);
    let line = |x: f64| (fit.intercept + fit.slope * x.ln()).exp();
    let _ = write!(
        s,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{}" stroke-dasharray="5,4"/>"#,
        panel.px(a),
        panel.py(line(a)),
        panel.px(b),
        panel.py(line(b)),
        COLORS[1]
    );
    let _ = write!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="end" fill="{}">slope = {:.3} ± {:.3}</text>"#,
        W - MARGIN.1 - 10.0,
        MARGIN.2 + 20.0,
        COLORS[1],
        fit.slope,
        fit.slope_err
    );
    s.push_str("</svg>\n");
    Ok(Figure {
        style,
        svg: s,
        slope: Some(fit.slope),
        ratios: Vec::new(),
    })
}

fn moment_compare(rec: &ResultRecord) -> Result<Figure> {
    let style = FigureStyle::MomentCompare;
    let (xn, xs) = pick(rec, &["n", "ell", "eps"])
        .ok_or_else(|| mismatch(style, "needs an `n`, `ell` or `eps` column"))?;
    let pairs = [("exact", "gaussian"), ("mc", "exact"), ("mc", "gaussian")];
    let (en, rn, est, reference) = pairs
        .iter()
        .find_map(|(e, r)| {
            let ev = rec.floats(e)?;
            let rv = rec.floats(r)?;
            ev.iter().any(|v| v.is_finite()).then_some((*e, *r, ev, rv))
        })
        .ok_or_else(|| mismatch(style, "needs an estimate and a reference moment column"))?;
    let pts: Vec<(f64, f64, f64)> = xs
        .iter()
        .zip(est.iter().zip(&reference))
        .filter(|(x, (e, r))| x.is_finite() && e.is_finite() && r.is_finite() && **r != 0.0)
        .map(|(x, (e, r))| (*x, *e, *r))
        .collect();
    if pts.is_empty() {
        return Err(mismatch(style, "no finite points"));
    }
    let x: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let e: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let r: Vec<f64> = pts.iter().map(|p| p.2).collect();
    let ratios: Vec<f64> = pts.iter().map(|p| p.1 / p.2).collect();
    let logx = x.iter().all(|v| *v > 0.0)
        && x.iter().cloned().fold(0.0, f64::max)
            > 4.0 * x.iter().cloned().fold(f64::INFINITY, f64::min);

    let mut s = open(&format!(
        "{} ({}): {en} vs {rn}",
        rec.meta.kind, rec.meta.anchor
    ));
    let total = H - MARGIN.2 - MARGIN.3;
    let top_h = 0.62 * total;
    let mut both = e.clone();
    both.extend(&r);
    let mut xx = x.clone();
    xx.extend(&x);
    let upper = Panel::new(MARGIN.2, top_h, &xx, &both, logx, false);
    upper.axes(&mut s, "", "moment");
    upper.series(&mut s, &x, &r, COLORS[0], true);
    upper.series(&mut s, &x, &e, COLORS[1], true);
    legend(
        &mut s,
        &[(rn, COLORS[0]), (en, COLORS[1])],
        MARGIN.0 + 12.0,
        MARGIN.2 + 16.0,
    );
    let mut rr = ratios.clone();
    rr.push(1.0);
    let lower = Panel::new(
        MARGIN.2 + top_h + 28.0,
        total - top_h - 28.0,
        &x,
        &rr,
        logx,
        false,
    );
    lower.axes(&mut s, xn, "ratio");
    let _ = write!(
        s,
        r##"<line x1="{:.1}" y1="{:.2}" x2="{:.1}" y2="{:.2}" stroke="#888" stroke-dasharray="3,3"/>"##,
        lower.x0,
        lower.py(1.0),
        lower.x0 + lower.w,
        lower.py(1.0)
    );
    lower.series(&mut s, &x, &ratios, COLORS[2], true);
    s.push_str("</svg>\n");
    Ok(Figure {
        style,
        svg: s,
        slope: None,
        ratios,
    })
}

fn density_snapshot(rec: &ResultRecord) -> Result<Figure> {
    let style = FigureStyle::DensitySnapshot;
    let snap = rec
        .meta
        .snapshot
        .as_ref()
        .filter(|s| !s.u.is_empty() && s.u.len() == s.density.len())
        .ok_or_else(|| mismatch(style, "record carries no density snapshot"))?;
    let mut s = open(&format!(
        "{} ({}): chaos density, {}",
        rec.meta.kind, rec.meta.anchor, snap.label
    ));
    let panel = Panel::new(
        MARGIN.2,
        H - MARGIN.2 - MARGIN.3,
        &snap.u,
        &snap.density,
        false,
        false,
    );
    panel.axes(&mut s, "u", "density");
    panel.series(&mut s, &snap.u, &snap.density, COLORS[0], false);
    s.push_str("</svg>\n");
    Ok(Figure {
        style,
        svg: s,
        slope: None,
        ratios: Vec::new(),
    })
}
