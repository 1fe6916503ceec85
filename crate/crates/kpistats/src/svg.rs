//! Dependency-free SVG emission: dendrograms and labeled scatter plots on a
//! fixed 800×600 canvas. Output is a pure function of the input, so report
//! files are byte-identical across runs and platforms.

use crate::cluster::Dendrogram;
use crate::error::{Error, Result};
use serde::Serialize;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;

/// One labeled marker in a scatter plot.
#[derive(Debug, Clone, Serialize)]
pub struct ScatterPoint {
    pub label: String,
    pub x: f64,
    pub y: f64,
}

/// Formats with six significant digits, trimming trailing zeros.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { format!("{v}") };
    }
    let mag = v.abs().log10().floor() as i32;
    let dec = 5 - mag;
    if dec >= 0 {
        let s = format!("{v:.prec$}", prec = dec.min(17) as usize);
        let t = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        if t == "-0" {
            "0".into()
        } else {
            t
        }
    } else {
        let scale = 10f64.powi(-dec);
        format!("{:.0}", (v / scale).round() * scale)
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn open_svg(out: &mut String) {
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"10\">\n"
    ));
    out.push_str(&format!(
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
}

/// Dendrogram: leaves along the bottom in tree order, merges drawn as
/// square brackets at their heights. Exactly one text element per leaf.
pub fn render_dendrogram(tree: &Dendrogram) -> String {
    let n = tree.n_leaves();
    let (left, right) = (40.0, WIDTH - 20.0);
    let baseline = HEIGHT - 40.0;
    let top = 30.0;

    let order = tree.leaf_order();
    let mut slot = vec![0usize; n];
    for (pos, &leaf) in order.iter().enumerate() {
        slot[leaf] = pos;
    }
    let leaf_x = |leaf: usize| left + (slot[leaf] as f64 + 0.5) * (right - left) / n as f64;

    let max_height = tree
        .merges
        .iter()
        .map(|m| m.height)
        .fold(0.0, f64::max);
    let y_of = |h: f64| {
        if max_height > 0.0 {
            baseline - h / max_height * (baseline - top)
        } else {
            baseline
        }
    };

    // x of every node: leaves at their slots, internal nodes centered over
    // their children (children are always created before their parent)
    let mut x = vec![0.0; 2 * n - 1];
    let mut y = vec![baseline; 2 * n - 1];
    for (leaf, slot) in x.iter_mut().enumerate().take(n) {
        *slot = leaf_x(leaf);
    }
    for (i, m) in tree.merges.iter().enumerate() {
        x[n + i] = (x[m.left] + x[m.right]) / 2.0;
        y[n + i] = y_of(m.height);
    }

    let mut out = String::new();
    open_svg(&mut out);
    for m in &tree.merges {
        let yh = y_of(m.height);
        out.push_str(&format!(
            "<path class=\"bracket\" fill=\"none\" stroke=\"#334\" stroke-width=\"1.5\" \
             d=\"M {} {} L {} {} L {} {} L {} {}\"/>\n",
            fmt_sig(x[m.left]),
            fmt_sig(y[m.left]),
            fmt_sig(x[m.left]),
            fmt_sig(yh),
            fmt_sig(x[m.right]),
            fmt_sig(yh),
            fmt_sig(x[m.right]),
            fmt_sig(y[m.right]),
        ));
    }
    for leaf in 0..n {
        out.push_str(&format!(
            "<text class=\"leaf\" x=\"{}\" y=\"{}\" text-anchor=\"end\" \
             transform=\"rotate(-60 {} {})\">{}</text>\n",
            fmt_sig(leaf_x(leaf)),
            fmt_sig(baseline + 14.0),
            fmt_sig(leaf_x(leaf)),
            fmt_sig(baseline + 14.0),
            escape(&tree.leaf_labels[leaf]),
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// Labeled scatter plot with data-driven axes (5% margin). `second_set`
/// points (if any) are drawn as squares instead of circles so two point
/// clouds stay distinguishable in one frame.
pub fn render_scatter(points: &[ScatterPoint], second_set: &[ScatterPoint]) -> Result<String> {
    if points.is_empty() {
        return Err(Error::Domain("scatter plot of zero points".into()));
    }
    let all = || points.iter().chain(second_set);
    if !all().all(|p| p.x.is_finite() && p.y.is_finite()) {
        return Err(Error::Numeric("non-finite scatter coordinates".into()));
    }

    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for p in all() {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    let pad = |lo: &mut f64, hi: &mut f64| {
        let span = *hi - *lo;
        let margin = if span > 0.0 { 0.05 * span } else { 1.0 };
        *lo -= margin;
        *hi += margin;
    };
    pad(&mut x0, &mut x1);
    pad(&mut y0, &mut y1);

    let (pl, pr, pt, pb) = (70.0, WIDTH - 25.0, 25.0, HEIGHT - 45.0);
    let sx = |v: f64| pl + (v - x0) / (x1 - x0) * (pr - pl);
    let sy = |v: f64| pb - (v - y0) / (y1 - y0) * (pb - pt);

    let mut out = String::new();
    open_svg(&mut out);
    out.push_str(&format!(
        "<path class=\"axes\" fill=\"none\" stroke=\"#888\" d=\"M {pl} {pt} L {pl} {pb} L {pr} {pb}\"/>\n"
    ));
    for i in 0..=4 {
        let fx = x0 + (x1 - x0) * i as f64 / 4.0;
        let fy = y0 + (y1 - y0) * i as f64 / 4.0;
        out.push_str(&format!(
            "<line class=\"tickmark\" stroke=\"#888\" x1=\"{0}\" y1=\"{pb}\" x2=\"{0}\" y2=\"{1}\"/>\n",
            fmt_sig(sx(fx)),
            fmt_sig(pb + 4.0),
        ));
        out.push_str(&format!(
            "<text class=\"tick\" x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            fmt_sig(sx(fx)),
            fmt_sig(pb + 16.0),
            fmt_sig(fx),
        ));
        out.push_str(&format!(
            "<line class=\"tickmark\" stroke=\"#888\" x1=\"{1}\" y1=\"{0}\" x2=\"{pl}\" y2=\"{0}\"/>\n",
            fmt_sig(sy(fy)),
            fmt_sig(pl - 4.0),
        ));
        out.push_str(&format!(
            "<text class=\"tick\" x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
            fmt_sig(pl - 7.0),
            fmt_sig(sy(fy) + 3.0),
            fmt_sig(fy),
        ));
    }
    for p in points {
        out.push_str(&format!(
            "<circle class=\"pt\" cx=\"{0}\" cy=\"{1}\" r=\"3.5\" fill=\"#1f6fb2\"/>\n\
             <text class=\"lbl\" x=\"{2}\" y=\"{3}\">{4}</text>\n",
            fmt_sig(sx(p.x)),
            fmt_sig(sy(p.y)),
            fmt_sig(sx(p.x) + 5.0),
            fmt_sig(sy(p.y) - 5.0),
            escape(&p.label),
        ));
    }
    for p in second_set {
        out.push_str(&format!(
            "<rect class=\"pt2\" x=\"{0}\" y=\"{1}\" width=\"7\" height=\"7\" fill=\"#b23a1f\"/>\n\
             <text class=\"lbl2\" x=\"{2}\" y=\"{3}\" fill=\"#b23a1f\">{4}</text>\n",
            fmt_sig(sx(p.x) - 3.5),
            fmt_sig(sy(p.y) - 3.5),
            fmt_sig(sx(p.x) + 5.0),
            fmt_sig(sy(p.y) - 5.0),
            escape(&p.label),
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}
