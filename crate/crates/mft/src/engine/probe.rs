//! Traces of a finished run along rays into a point.

use serde::Serialize;

use super::record::{RunRecord, Segment};
use crate::model::State;

fn active(seg: &Segment, t: f64, t_final: f64) -> bool {
    seg.t0 <= t && (t < seg.t1 || (t == seg.t1 && t == t_final))
}

/// Piecewise-constant approximation at `(x, t)`, averaging the two sides
/// when `x` sits exactly on a front.
pub fn state_at(rec: &RunRecord, x: f64, t: f64) -> State {
    let mut fronts: Vec<(f64, &Segment)> =
        rec.segments.iter().filter(|s| active(s, t, rec.t_final)).map(|s| (s.position_at(t), s)).collect();
    fronts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut left = rec.initial.leftmost;
    for (xp, s) in fronts {
        if x < xp {
            return left;
        }
        if x == xp {
            return s.left.midpoint(&s.right);
        }
        left = s.right;
    }
    left
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RayTrace {
    pub alpha: f64,
    /// Sample times and the trace value `U(x_* + α(t - t_*), t)` there.
    pub times: Vec<f64>,
    pub states: Vec<State>,
    /// Largest componentwise spread of the trace over the final window.
    pub oscillation: f64,
}

/// For each `α`, samples the trace along `x = x_* + α(t - t_*)` over
/// `[t_* - window, t_*)`: at every crossing with a front (midpoint value) and
/// between consecutive crossings.
pub fn alpha_ray_probe(rec: &RunRecord, point: (f64, f64), alphas: &[f64], window: f64) -> Vec<RayTrace> {
    let (xs, ts) = point;
    let t_lo = (ts - window).max(rec.initial.t);
    alphas
        .iter()
        .map(|&alpha| {
            let ray = |t: f64| xs + alpha * (t - ts);
            let mut marks = vec![t_lo, ts];
            for s in &rec.segments {
                if s.t1 <= s.t0 || s.t1 < t_lo || s.t0 > ts {
                    continue;
                }
                let speed = (s.x1 - s.x0) / (s.t1 - s.t0);
                if speed == alpha {
                    marks.push(s.t0.max(t_lo));
                    continue;
                }
                let t = (s.x0 - xs - speed * s.t0 + alpha * ts) / (alpha - speed);
                if t >= s.t0.max(t_lo) && t <= s.t1.min(ts) {
                    marks.push(t);
                }
            }
            marks.sort_by(f64::total_cmp);
            marks.dedup();
            let mut times = Vec::new();
            for (i, &t) in marks.iter().enumerate() {
                if t < ts {
                    times.push(t);
                }
                if let Some(&next) = marks.get(i + 1) {
                    let mid = 0.5 * (t + next);
                    if mid < ts {
                        times.push(mid);
                    }
                }
            }
            let states: Vec<State> = times.iter().map(|&t| state_at(rec, ray(t), t)).collect();
            let spread = |f: fn(&State) -> f64| {
                let lo = states.iter().map(f).fold(f64::INFINITY, f64::min);
                let hi = states.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
                if lo <= hi {
                    hi - lo
                } else {
                    0.0
                }
            };
            let oscillation = spread(|s| s.p).max(spread(|s| s.u)).max(spread(|s| s.s));
            RayTrace { alpha, times, states, oscillation }
        })
        .collect()
}
