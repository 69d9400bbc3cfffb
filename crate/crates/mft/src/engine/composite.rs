//! Carrier/passenger assignment for weak waves emerging together.

use crate::model::{dot3, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Assignment {
    /// Index of the carrying wave (itself if it is not a passenger).
    pub carrier: usize,
    pub heavy: bool,
}

/// Assigns carriers to emergent waves given in spatial order. Waves with
/// `|ζ| ≥ eps_p` carry themselves; a weak wave rides with the stronger of
/// its nearest self-carrying neighbours; if every wave is weak they all ride
/// with the strongest. Passengers with `|ζ| > q |ζ_carrier|` are heavy.
pub fn classify_passengers(strengths: &[f64], eps_p: f64, q: f64) -> Vec<Assignment> {
    let n = strengths.len();
    let strong: Vec<bool> = strengths.iter().map(|z| z.abs() >= eps_p).collect();
    let carrier_of = |j: usize| -> usize {
        if strong[j] {
            return j;
        }
        let left = (0..j).rev().find(|&i| strong[i]);
        let right = (j + 1..n).find(|&i| strong[i]);
        match (left, right) {
            (Some(l), Some(r)) => {
                if strengths[l].abs() >= strengths[r].abs() {
                    l
                } else {
                    r
                }
            }
            (Some(l), None) => l,
            (None, Some(r)) => r,
            (None, None) => (0..n)
                .max_by(|&a, &b| strengths[a].abs().total_cmp(&strengths[b].abs()).then(b.cmp(&a)))
                .unwrap_or(j),
        }
    };
    (0..n)
        .map(|j| {
            let c = carrier_of(j);
            let heavy = c != j && strengths[j].abs() > q * strengths[c].abs();
            Assignment { carrier: c, heavy }
        })
        .collect()
}

/// Least-squares speed of several coincident jumps `(A[q], A[f])` moving
/// together: `Σ q̂·f̂ / Σ q̂·q̂`.
pub fn combined_ls_speed(jumps: &[(Vec3, Vec3)]) -> f64 {
    let num: f64 = jumps.iter().map(|(q, f)| dot3(*q, *f)).sum();
    let den: f64 = jumps.iter().map(|(q, _)| dot3(*q, *q)).sum();
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Weight of the heavy passengers `Σ |ζ_j|`.
pub fn heavy_weight(strengths: &[f64], assignment: &[Assignment]) -> f64 {
    strengths.iter().zip(assignment).filter(|(_, a)| a.heavy).map(|(z, _)| z.abs()).sum()
}
