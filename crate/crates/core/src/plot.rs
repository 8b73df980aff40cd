//! Self-contained SVG charts plus the CSV data behind each one.
//!
//! Output depends only on the inputs (fixed palette, fixed number formatting),
//! so identical runs produce identical files.

use std::fmt::Write as _;

use crate::projection::Projection2D;
use crate::validation::{KSweepResult, SilhouetteReport};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 540.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_BOTTOM: f64 = 60.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

fn color(cluster: usize) -> &'static str {
    PALETTE[cluster % PALETTE.len()]
}

#[derive(Clone, Copy)]
struct Scale {
    d0: f64,
    d1: f64,
    r0: f64,
    r1: f64,
}

impl Scale {
    fn new(mut d0: f64, mut d1: f64, r0: f64, r1: f64) -> Self {
        if d1.is_nan() || d0.is_nan() || d1 <= d0 {
            d0 -= 1.0;
            d1 += 1.0;
        }
        Scale { d0, d1, r0, r1 }
    }

    fn padded(lo: f64, hi: f64, r0: f64, r1: f64) -> Self {
        let pad = if hi > lo { 0.05 * (hi - lo) } else { 1.0 };
        Scale::new(lo - pad, hi + pad, r0, r1)
    }

    fn map(&self, v: f64) -> f64 {
        self.r0 + (v - self.d0) / (self.d1 - self.d0) * (self.r1 - self.r0)
    }

    /// About five round-numbered ticks inside the domain.
    fn ticks(&self) -> Vec<f64> {
        let span = self.d1 - self.d0;
        let raw = span / 5.0;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0]
            .iter()
            .map(|m| m * mag)
            .find(|s| span / s <= 6.0)
            .unwrap_or(10.0 * mag);
        let mut t = (self.d0 / step).ceil() * step;
        let mut out = Vec::new();
        while t <= self.d1 + 1e-9 * step {
            out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
            t += step;
        }
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn open_svg(s: &mut String, title: &str) {
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text class="title" x="{:.2}" y="28" text-anchor="middle" font-size="16">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

/// Axis frame with ticks. `x`/`y` map data to pixels inside the given box.
#[allow(clippy::too_many_arguments)]
fn axes(
    s: &mut String,
    x: Scale,
    y: Scale,
    left: f64,
    right: f64,
    top: f64,
    bottom: f64,
    xlabel: &str,
    ylabel: &str,
) {
    s.push_str("<g class=\"axes\" stroke=\"black\" fill=\"none\">\n");
    let _ = writeln!(
        s,
        r#"<line x1="{left:.2}" y1="{bottom:.2}" x2="{right:.2}" y2="{bottom:.2}"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line x1="{left:.2}" y1="{top:.2}" x2="{left:.2}" y2="{bottom:.2}"/>"#
    );
    for t in x.ticks() {
        let px = x.map(t);
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{bottom:.2}" x2="{px:.2}" y2="{:.2}"/>"#,
            bottom + 5.0
        );
    }
    for t in y.ticks() {
        let py = y.map(t);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{left:.2}" y2="{py:.2}"/>"#,
            left - 5.0
        );
    }
    s.push_str("</g>\n<g class=\"tick-labels\" fill=\"black\">\n");
    for t in x.ticks() {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            x.map(t),
            bottom + 18.0,
            fmt_tick(t)
        );
    }
    for t in y.ticks() {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            left - 8.0,
            y.map(t) + 4.0,
            fmt_tick(t)
        );
    }
    s.push_str("</g>\n");
    let _ = writeln!(
        s,
        r#"<text class="xlabel" x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (left + right) / 2.0,
        bottom + 40.0,
        escape(xlabel)
    );
    let cy = (top + bottom) / 2.0;
    let _ = writeln!(
        s,
        r#"<text class="ylabel" x="{:.2}" y="{cy:.2}" text-anchor="middle" transform="rotate(-90 {:.2} {cy:.2})">{}</text>"#,
        left - 48.0,
        left - 48.0,
        escape(ylabel)
    );
}

/// Scatter of the projected points colored by cluster. `centers` (already in
/// projected coordinates) are drawn as crosses.
pub fn emit_scatter_svg(
    proj: &Projection2D,
    labels: &[usize],
    centers: Option<&[(f64, f64)]>,
    title: &str,
) -> Vec<u8> {
    let n = proj.coords.nrows().min(labels.len());
    let centers = centers.unwrap_or(&[]);
    let xs = (0..n)
        .map(|i| proj.coords.get(i, 0))
        .chain(centers.iter().map(|c| c.0));
    let ys = (0..n)
        .map(|i| proj.coords.get(i, 1))
        .chain(centers.iter().map(|c| c.1));
    let (xlo, xhi) = bounds(xs);
    let (ylo, yhi) = bounds(ys);

    let (left, right, top, bottom) = (
        MARGIN_LEFT,
        WIDTH - MARGIN_RIGHT,
        MARGIN_TOP,
        HEIGHT - MARGIN_BOTTOM,
    );
    let x = Scale::padded(xlo, xhi, left, right);
    let y = Scale::padded(ylo, yhi, bottom, top);

    let mut s = String::new();
    open_svg(&mut s, title);
    axes(
        &mut s,
        x,
        y,
        left,
        right,
        top,
        bottom,
        &format!("PC1 ({:.1}% of variance)", 100.0 * proj.axis_variance[0]),
        &format!("PC2 ({:.1}% of variance)", 100.0 * proj.axis_variance[1]),
    );
    s.push_str("<g class=\"points\">\n");
    for (i, &label) in labels.iter().enumerate().take(n) {
        let _ = writeln!(
            s,
            r#"<circle class="point" data-cluster="{}" cx="{:.2}" cy="{:.2}" r="3" fill="{}" fill-opacity="0.6"/>"#,
            label,
            x.map(proj.coords.get(i, 0)),
            y.map(proj.coords.get(i, 1)),
            color(label)
        );
    }
    s.push_str("</g>\n<g class=\"centers\">\n");
    for (c, &(cx, cy)) in centers.iter().enumerate() {
        let (px, py) = (x.map(cx), y.map(cy));
        let _ = writeln!(
            s,
            r#"<path class="center" data-cluster="{c}" d="M{:.2} {:.2}L{:.2} {:.2}M{:.2} {:.2}L{:.2} {:.2}" stroke="black" stroke-width="3"/>"#,
            px - 8.0,
            py - 8.0,
            px + 8.0,
            py + 8.0,
            px - 8.0,
            py + 8.0,
            px + 8.0,
            py - 8.0
        );
    }
    s.push_str("</g>\n");
    legend(&mut s, labels, right);
    s.push_str("</svg>\n");
    s.into_bytes()
}

fn legend(s: &mut String, labels: &[usize], right: f64) {
    let k = labels.iter().max().map_or(0, |&m| m + 1);
    s.push_str("<g class=\"legend\">\n");
    for c in 0..k {
        let count = labels.iter().filter(|&&l| l == c).count();
        let y = MARGIN_TOP + 10.0 + 18.0 * c as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{:.2}" y="{:.2}" width="10" height="10" fill="{}"/><text x="{:.2}" y="{:.2}" text-anchor="end">cluster {c} (n={count})</text>"#,
            right - 12.0,
            y - 9.0,
            color(c),
            right - 16.0,
            y
        );
    }
    s.push_str("</g>\n");
}

fn bounds(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
        (lo.min(x), hi.max(x))
    });
    if lo.is_finite() {
        (lo, hi)
    } else {
        (-1.0, 1.0)
    }
}

/// Horizontal silhouette bars, grouped by cluster and sorted descending within
/// each group, with the overall mean as a dashed reference line.
pub fn emit_silhouette_svg(report: &SilhouetteReport, title: &str) -> Vec<u8> {
    let n = report.widths.len();
    let (left, right, top, bottom) = (
        MARGIN_LEFT,
        WIDTH - 190.0,
        MARGIN_TOP,
        HEIGHT - MARGIN_BOTTOM,
    );
    let wmin = report.widths.iter().copied().fold(0.0, f64::min);
    let x = Scale::new(wmin.min(0.0), 1.0, left, right);

    let groups = report.cluster_means.len();
    let gap = if n > 0 {
        (n as f64 * 0.02).max(1.0)
    } else {
        0.0
    };
    let slots = n as f64 + gap * groups.saturating_sub(1) as f64;
    let bar = if n > 0 { (bottom - top) / slots } else { 0.0 };
    let y = Scale::new(0.0, slots.max(1.0), top, bottom);

    let mut s = String::new();
    open_svg(&mut s, title);
    axes(
        &mut s,
        x,
        y,
        left,
        right,
        top,
        bottom,
        "Silhouette width s(i)",
        "Points (grouped by cluster)",
    );

    s.push_str("<g class=\"bars\">\n");
    let mut cursor = 0.0;
    let mut prev_cluster = None;
    let mut group_spans: Vec<(usize, f64, f64)> = Vec::new();
    for &i in &report.order {
        let c = report.labels[i];
        if prev_cluster != Some(c) {
            if prev_cluster.is_some() {
                cursor += gap;
            }
            group_spans.push((c, cursor, cursor));
            prev_cluster = Some(c);
        }
        let w = report.widths[i];
        let (x0, x1) = (x.map(0.0_f64.min(w)), x.map(0.0_f64.max(w)));
        let _ = writeln!(
            s,
            r#"<rect class="bar" data-cluster="{c}" x="{x0:.2}" y="{:.3}" width="{:.2}" height="{:.3}" fill="{}"/>"#,
            y.map(cursor),
            x1 - x0,
            bar.max(0.0),
            color(c)
        );
        cursor += 1.0;
        if let Some(g) = group_spans.last_mut() {
            g.2 = cursor;
        }
    }
    s.push_str("</g>\n");

    if n > 0 {
        let px = x.map(report.overall);
        let _ = writeln!(
            s,
            r#"<line class="mean" x1="{px:.2}" y1="{top:.2}" x2="{px:.2}" y2="{bottom:.2}" stroke="red" stroke-dasharray="6 4"/>"#
        );
        let _ = writeln!(
            s,
            r#"<text class="overall" x="{:.2}" y="{:.2}">average width {:.3}</text>"#,
            right + 10.0,
            top + 4.0,
            report.overall
        );
    }
    for (c, start, end) in group_spans {
        if let Some(cm) = report.cluster_means.iter().find(|m| m.cluster == c) {
            let _ = writeln!(
                s,
                r#"<text class="cluster-mean" x="{:.2}" y="{:.2}" fill="{}">cluster {c}: n={} mean {:.3}</text>"#,
                right + 10.0,
                y.map((start + end) / 2.0) + 4.0,
                color(c),
                cm.size,
                cm.mean
            );
        }
    }
    s.push_str("</svg>\n");
    s.into_bytes()
}

/// Average silhouette and WSS against k, side by side, with the best k marked.
pub fn emit_sweep_svg(sweep: &KSweepResult, title: &str) -> Vec<u8> {
    let mut s = String::new();
    open_svg(&mut s, title);
    let panel_w = (WIDTH - 2.0 * MARGIN_LEFT - 2.0 * MARGIN_RIGHT) / 2.0;
    let (top, bottom) = (MARGIN_TOP + 10.0, HEIGHT - MARGIN_BOTTOM);
    let ks: Vec<f64> = sweep.ks.iter().map(|&k| k as f64).collect();
    let (klo, khi) = bounds(ks.iter().copied());

    let panels = [
        (
            "silhouette",
            "Average silhouette width",
            &sweep.avg_silhouette,
            "#1f77b4",
        ),
        (
            "wss",
            if sweep.algorithm == crate::validation::SweepAlgorithm::Pam {
                "Total distance to medoids"
            } else {
                "Within-cluster sum of squares"
            },
            &sweep.wss,
            "#d62728",
        ),
    ];
    for (p, (class, ylabel, values, stroke)) in panels.into_iter().enumerate() {
        let left = MARGIN_LEFT + p as f64 * (panel_w + MARGIN_LEFT + MARGIN_RIGHT);
        let right = left + panel_w;
        let x = Scale::new(klo - 0.5, khi + 0.5, left, right);
        let (vlo, vhi) = bounds(values.iter().copied());
        let y = Scale::padded(vlo, vhi, bottom, top);
        axes(
            &mut s,
            x,
            y,
            left,
            right,
            top,
            bottom,
            "Number of clusters k",
            ylabel,
        );

        let pts: Vec<String> = ks
            .iter()
            .zip(values.iter())
            .map(|(k, v)| format!("{:.2},{:.2}", x.map(*k), y.map(*v)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline class="{class}" points="{}" fill="none" stroke="{stroke}" stroke-width="2"/>"#,
            pts.join(" ")
        );
        for (k, v) in ks.iter().zip(values.iter()) {
            let _ = writeln!(
                s,
                r#"<circle class="marker" cx="{:.2}" cy="{:.2}" r="3.5" fill="{stroke}"/>"#,
                x.map(*k),
                y.map(*v)
            );
        }
        if let Some(pos) = sweep.ks.iter().position(|&k| k == sweep.best_k) {
            let (px, py) = (x.map(ks[pos]), y.map(values[pos]));
            let _ = writeln!(
                s,
                r#"<circle class="best" cx="{px:.2}" cy="{py:.2}" r="8" fill="none" stroke="black" stroke-width="2"/>"#
            );
        }
    }
    let _ = writeln!(
        s,
        r#"<text class="best-label" x="{:.2}" y="{:.2}" text-anchor="middle">best k = {}</text>"#,
        WIDTH / 2.0,
        MARGIN_TOP,
        sweep.best_k
    );
    s.push_str("</svg>\n");
    s.into_bytes()
}

pub fn scatter_csv(proj: &Projection2D, labels: &[usize], row_ids: &[String]) -> Vec<u8> {
    let mut s = String::from("row_id,pc1,pc2,cluster\n");
    for (i, &l) in labels.iter().enumerate().take(proj.coords.nrows()) {
        let id = row_ids
            .get(i)
            .map_or_else(|| (i + 1).to_string(), Clone::clone);
        let _ = writeln!(
            s,
            "{id},{},{},{l}",
            proj.coords.get(i, 0),
            proj.coords.get(i, 1)
        );
    }
    s.into_bytes()
}

pub fn silhouette_csv(report: &SilhouetteReport) -> Vec<u8> {
    let mut s = String::from("rank,index,cluster,width\n");
    for (rank, &i) in report.order.iter().enumerate() {
        let _ = writeln!(s, "{rank},{i},{},{}", report.labels[i], report.widths[i]);
    }
    s.into_bytes()
}

pub fn sweep_csv(sweep: &KSweepResult) -> Vec<u8> {
    let mut s = String::from("k,avg_silhouette,wss,best\n");
    for ((k, sil), w) in sweep.ks.iter().zip(&sweep.avg_silhouette).zip(&sweep.wss) {
        let _ = writeln!(s, "{k},{sil},{w},{}", *k == sweep.best_k);
    }
    s.into_bytes()
}
