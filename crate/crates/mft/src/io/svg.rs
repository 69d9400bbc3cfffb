//! Self-contained SVG of wave trajectories in the (x, t) plane: one polyline
//! per trajectory segment, hue by family, dark for compressive waves.

use std::fmt::Write as _;

use crate::engine::{RunRecord, Segment};

const W: f64 = 800.0;
const H: f64 = 600.0;
const MARGIN: f64 = 50.0;

/// (dark, light) stroke colors for backward, contact and forward families.
fn stroke(seg: &Segment, n: usize) -> &'static str {
    let (dark, light) = match seg.family {
        0 => ("#1b3a8c", "#8fb0ec"),
        f if f + 1 == n => ("#8c1b1b", "#eea29a"),
        _ => ("#1b6e2a", "#9fd8a8"),
    };
    if seg.compressive {
        dark
    } else {
        light
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub fn front_plot(rec: &RunRecord, title: &str) -> String {
    let (x0, x1) = rec.config.domain;
    let t1 = if rec.t_final > 0.0 { rec.t_final } else { 1.0 };
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let py = |t: f64| H - MARGIN - t / t1 * (H - 2.0 * MARGIN);
    let n = rec.system.n();
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(s, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">");
    let _ = writeln!(s, "<rect x=\"0\" y=\"0\" width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>",
        W - 2.0 * MARGIN,
        H - 2.0 * MARGIN
    );
    s.push_str("<g fill=\"none\" stroke-width=\"0.8\">\n");
    for seg in &rec.segments {
        let _ = writeln!(
            s,
            "<polyline points=\"{:.3},{:.3} {:.3},{:.3}\" stroke=\"{}\"/>",
            px(seg.x0),
            py(seg.t0),
            px(seg.x1),
            py(seg.t1),
            stroke(seg, n)
        );
    }
    s.push_str("</g>\n");
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\">x</text>", W / 2.0, H - 15.0);
    let _ = writeln!(s, "<text x=\"15\" y=\"{}\" font-size=\"14\">t</text>", H / 2.0);
    let _ = writeln!(s, "<text x=\"{MARGIN}\" y=\"{}\" font-size=\"11\">{x0}</text>", H - MARGIN + 15.0);
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{x1}</text>", W - MARGIN, H - MARGIN + 15.0);
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{t1:.4}</text>", MARGIN - 4.0, MARGIN + 4.0);
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"30\" font-size=\"15\" text-anchor=\"middle\">{} ({} events)</text>",
        W / 2.0,
        escape(title),
        rec.event_count()
    );
    s.push_str("</svg>\n");
    s
}

pub fn polyline_count(svg: &str) -> usize {
    svg.matches("<polyline").count()
}
