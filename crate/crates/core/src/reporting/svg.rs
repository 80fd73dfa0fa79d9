//! Minimal self-contained SVG charts: stacked area, box plot, bar, and
//! treemap. No external assets, fixed-precision coordinates, so output is
//! deterministic for a given dataset.

use std::fmt::Write as _;

use crate::analytics::{BoxplotStats, DistributionSeries};
use crate::evaluation::TreemapNode;

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 180.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 50.0;

// 12-color categorical palette, cycled.
const PALETTE: [&str; 12] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948",
    "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#2f4b7c", "#a05195",
];

fn color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

fn fm(v: f64) -> String {
    format!("{v:.2}")
}

fn esc(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(title: &str) -> String {
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\">\n"
    );
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">{}</text>",
        fm(WIDTH / 2.0),
        esc(title)
    );
    s
}

fn empty_chart(title: &str) -> String {
    let mut s = header(title);
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" font-size=\"16\" fill=\"#888\" text-anchor=\"middle\">no data</text>",
        fm(WIDTH / 2.0),
        fm(HEIGHT / 2.0)
    );
    s.push_str("</svg>\n");
    s
}

fn legend(s: &mut String, labels: &[&str]) {
    let x = WIDTH - MARGIN_RIGHT + 16.0;
    for (i, label) in labels.iter().enumerate() {
        let y = MARGIN_TOP + 14.0 * i as f64;
        let _ = writeln!(
            s,
            "<rect x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{}\"/>",
            fm(x),
            fm(y),
            color(i)
        );
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-size=\"11\">{}</text>",
            fm(x + 14.0),
            fm(y + 9.0),
            esc(label)
        );
    }
}

fn axes(s: &mut String) {
    let x0 = MARGIN_LEFT;
    let x1 = WIDTH - MARGIN_RIGHT;
    let y0 = HEIGHT - MARGIN_BOTTOM;
    let _ = writeln!(
        s,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333\"/>",
        fm(x0),
        fm(y0),
        fm(x1),
        fm(y0)
    );
    let _ = writeln!(
        s,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333\"/>",
        fm(x0),
        fm(MARGIN_TOP),
        fm(x0),
        fm(y0)
    );
}

/// Stacked area chart of a binned label distribution over time.
pub fn stacked_area_svg(series: &DistributionSeries, title: &str) -> String {
    if series.bins.is_empty() || series.counts.is_empty() {
        return empty_chart(title);
    }
    let labels: Vec<&str> = series.counts.keys().map(String::as_str).collect();
    let n_bins = series.bins.len();
    // Stacked totals per bin set the y scale.
    let mut totals = vec![0u64; n_bins];
    for counts in series.counts.values() {
        for (t, c) in totals.iter_mut().zip(counts) {
            *t += c;
        }
    }
    let y_max = totals.iter().copied().max().unwrap_or(1).max(1) as f64;

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x_of = |i: usize| {
        if n_bins == 1 {
            MARGIN_LEFT + plot_w / 2.0
        } else {
            MARGIN_LEFT + plot_w * i as f64 / (n_bins - 1) as f64
        }
    };
    let y_of = |v: f64| HEIGHT - MARGIN_BOTTOM - plot_h * v / y_max;

    let mut s = header(title);
    axes(&mut s);
    // Draw from the bottom layer up, accumulating the baseline.
    let mut baseline = vec![0.0f64; n_bins];
    for (li, label) in labels.iter().enumerate() {
        let counts = &series.counts[*label];
        let tops: Vec<f64> = baseline
            .iter()
            .zip(counts)
            .map(|(b, c)| b + *c as f64)
            .collect();
        let mut d = String::new();
        for (i, top) in tops.iter().enumerate() {
            let cmd = if i == 0 { 'M' } else { 'L' };
            let _ = write!(d, "{cmd}{},{} ", fm(x_of(i)), fm(y_of(*top)));
        }
        for i in (0..n_bins).rev() {
            let _ = write!(d, "L{},{} ", fm(x_of(i)), fm(y_of(baseline[i])));
        }
        d.push('Z');
        let _ = writeln!(
            s,
            "<path d=\"{d}\" fill=\"{}\" fill-opacity=\"0.85\" stroke=\"none\"/>",
            color(li)
        );
        baseline = tops;
    }
    // X tick labels: first, middle, last bin starts.
    for i in [0, n_bins / 2, n_bins - 1] {
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
            fm(x_of(i)),
            fm(HEIGHT - MARGIN_BOTTOM + 16.0),
            series.bins[i].0
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{}</text>",
        fm(MARGIN_LEFT - 6.0),
        fm(MARGIN_TOP + 10.0),
        y_max as u64
    );
    legend(&mut s, &labels);
    s.push_str("</svg>\n");
    s
}

/// Box plots of tone percentages per period, one box per stat row.
pub fn boxplot_svg(rows: &[BoxplotStats], title: &str) -> String {
    if rows.is_empty() {
        return empty_chart(title);
    }
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let n = rows.len();
    let slot = plot_w / n as f64;
    let box_w = (slot * 0.5).min(40.0);
    let y_max = rows.iter().map(|r| r.max).fold(0.0f64, f64::max).max(1.0);
    let y_of = |v: f64| HEIGHT - MARGIN_BOTTOM - plot_h * v / y_max;

    let mut tones: Vec<&str> = rows.iter().map(|r| r.tone.as_str()).collect();
    tones.dedup();

    let mut s = header(title);
    axes(&mut s);
    for (i, r) in rows.iter().enumerate() {
        let cx = MARGIN_LEFT + slot * (i as f64 + 0.5);
        let tone_idx = tones.iter().position(|t| *t == r.tone).unwrap_or(0);
        let c = color(tone_idx);
        let (x0, x1) = (cx - box_w / 2.0, cx + box_w / 2.0);
        // whiskers
        let _ = writeln!(
            s,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333\"/>",
            fm(cx),
            fm(y_of(r.min)),
            fm(cx),
            fm(y_of(r.max))
        );
        // box q1..q3
        let _ = writeln!(
            s,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" fill-opacity=\"0.7\" stroke=\"#333\"/>",
            fm(x0),
            fm(y_of(r.q3)),
            fm(box_w),
            fm((y_of(r.q1) - y_of(r.q3)).max(0.5)),
            c
        );
        // median
        let _ = writeln!(
            s,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#000\" stroke-width=\"2\"/>",
            fm(x0),
            fm(y_of(r.median)),
            fm(x1),
            fm(y_of(r.median))
        );
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-size=\"9\" text-anchor=\"middle\">{}</text>",
            fm(cx),
            fm(HEIGHT - MARGIN_BOTTOM + 14.0),
            r.period_start
        );
    }
    legend(&mut s, &tones);
    s.push_str("</svg>\n");
    s
}

/// Horizontal bar chart of (label, value) pairs, drawn in the given order.
pub fn bar_svg(pairs: &[(String, f64)], title: &str) -> String {
    if pairs.is_empty() {
        return empty_chart(title);
    }
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let v_max = pairs.iter().map(|(_, v)| *v).fold(0.0f64, f64::max).max(1e-9);
    let row_h = (plot_h / pairs.len() as f64).min(26.0);

    let mut s = header(title);
    axes(&mut s);
    for (i, (label, value)) in pairs.iter().enumerate() {
        let y = MARGIN_TOP + row_h * i as f64;
        let w = plot_w * value / v_max;
        let _ = writeln!(
            s,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>",
            fm(MARGIN_LEFT),
            fm(y + 2.0),
            fm(w),
            fm(row_h - 4.0),
            color(i)
        );
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-size=\"11\">{} ({})</text>",
            fm(MARGIN_LEFT + w + 6.0),
            fm(y + row_h / 2.0 + 4.0),
            esc(label),
            fm(*value)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Squarified-ish treemap: slice-and-dice alternating orientation, two
/// levels deep (deeper levels contribute to parent area only).
pub fn treemap_svg(root: &TreemapNode, title: &str) -> String {
    if root.children.is_empty() || root.value <= 0.0 {
        return empty_chart(title);
    }
    let mut s = header(title);
    let x = 10.0;
    let y = MARGIN_TOP + 6.0;
    let w = WIDTH - 20.0;
    let h = HEIGHT - y - 10.0;
    slice_dice(&mut s, &root.children, x, y, w, h, true, 0);
    s.push_str("</svg>\n");
    s
}

fn slice_dice(
    s: &mut String,
    nodes: &[TreemapNode],
    x: f64,
    y: f64,
    w: f64,
    h: f64,
    horizontal: bool,
    depth: usize,
) {
    let total: f64 = nodes.iter().map(|n| n.value.max(0.0)).sum();
    if total <= 0.0 || w < 1.0 || h < 1.0 {
        return;
    }
    let mut offset = 0.0;
    for (i, node) in nodes.iter().enumerate() {
        let frac = node.value.max(0.0) / total;
        let (nx, ny, nw, nh) = if horizontal {
            (x + offset * w, y, frac * w, h)
        } else {
            (x, y + offset * h, w, frac * h)
        };
        offset += frac;
        if nw < 0.5 || nh < 0.5 {
            continue;
        }
        if depth == 0 {
            let _ = writeln!(
                s,
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" fill-opacity=\"0.35\" stroke=\"#333\"/>",
                fm(nx),
                fm(ny),
                fm(nw),
                fm(nh),
                color(i)
            );
            if nw > 40.0 && nh > 14.0 {
                let _ = writeln!(
                    s,
                    "<text x=\"{}\" y=\"{}\" font-size=\"11\">{}</text>",
                    fm(nx + 3.0),
                    fm(ny + 12.0),
                    esc(&node.name)
                );
            }
            if !node.children.is_empty() {
                slice_dice(
                    s,
                    &node.children,
                    nx + 2.0,
                    ny + 16.0,
                    (nw - 4.0).max(0.0),
                    (nh - 18.0).max(0.0),
                    !horizontal,
                    1,
                );
            }
        } else {
            let _ = writeln!(
                s,
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" fill-opacity=\"0.6\" stroke=\"#666\" stroke-width=\"0.5\"/>",
                fm(nx),
                fm(ny),
                fm(nw),
                fm(nh),
                color(i)
            );
            if nw > 50.0 && nh > 12.0 {
                let _ = writeln!(
                    s,
                    "<text x=\"{}\" y=\"{}\" font-size=\"9\">{}</text>",
                    fm(nx + 2.0),
                    fm(ny + 10.0),
                    esc(&node.name)
                );
            }
        }
    }
}
