//! Residual measures, the residual bound, the conservation ledger and the
//! ε-sweep rate fit.

use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{LedgerEntry, RunRecord};
use crate::error::Result;
use crate::model::{norm3, scale3, sub3, variation, PointMassMeasure, SchemeConfig, WaveSequence};
use crate::numerics::loglog_slope;
use crate::system::System;

/// `Σ_j A_j([f]_j - s_j [q]_j) δ_{x_j}`, coincident atoms merged.
pub fn residual_measure(sys: &System, seq: &WaveSequence) -> PointMassMeasure {
    let mut m = PointMassMeasure::default();
    for w in &seq.waves {
        let (q, f) = sys.preconditioned_jumps(w.precond, &w.left, &w.right);
        m.push(w.position_at(seq.t), sub3(f, scale3(w.speed, q)));
    }
    m
}

/// `Σ |ζ_j|` over heavy passengers.
pub fn heavy_passenger_weight(seq: &WaveSequence) -> f64 {
    seq.waves.iter().filter(|w| w.heavy && w.carrier.is_some()).map(|w| w.strength.abs()).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub residual_norm: f64,
    pub variation: f64,
    pub w_h: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `‖R(Γ)‖ ≤ V(Γ)(K_s ε^{2 e_s} + K_p Q(ε)) + K_hp W_H`, with the `Q` term
/// present only when composite waves are in use.
pub fn residual_bound_check(sys: &System, seq: &WaveSequence, cfg: &SchemeConfig) -> BoundReport {
    let r = residual_measure(sys, seq).norm();
    let v = variation(seq);
    let w_h = heavy_passenger_weight(seq);
    let q = if cfg.composites_enabled { cfg.q() } else { 0.0 };
    let rhs = v * (cfg.k_s * cfg.epsilon.powf(2.0 * cfg.e_s()) + cfg.k_p * q) + cfg.k_hp * w_h;
    BoundReport { residual_norm: r, variation: v, w_h, rhs, holds: r <= rhs }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LedgerReport {
    pub entries: Vec<LedgerEntry>,
    /// Largest `|D| / (∫‖R‖ + tolerance)` over the checkpoints.
    pub worst_ratio: f64,
    pub holds: bool,
}

/// Checks `|∫q(t) - ∫q(0) + (f_R - f_L) t| ≤ (1 + 1e-6) ∫_0^t ‖[f] - s[q]‖`
/// at every ledger checkpoint of a run.
pub fn conservation_ledger(rec: &RunRecord) -> LedgerReport {
    let worst_ratio = rec
        .ledger
        .iter()
        .map(|e| e.drift_norm / (e.residual_integral + e.snap_tolerance + 1e-10))
        .fold(0.0, f64::max);
    LedgerReport { entries: rec.ledger.clone(), worst_ratio, holds: rec.ledger.iter().all(|e| e.within_bound()) }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateFit {
    pub epsilons: Vec<f64>,
    pub sup_residuals: Vec<f64>,
    /// Least-squares slope of `log sup‖R‖` against `log ε`; `None` when every
    /// run is exact.
    pub slope: Option<f64>,
    pub exact: bool,
}

/// Sup residuals at or below this are round-off in exact shock speeds.
pub const EXACT_RESIDUAL: f64 = 1e-12;

/// Runs `build(ε)` for every ε in parallel and fits the sup-in-time residual.
pub fn rate_harness<F>(build: F, epsilons: &[f64]) -> Result<RateFit>
where
    F: Fn(f64) -> Result<RunRecord> + Sync,
{
    let sups: Vec<f64> = epsilons.par_iter().map(|&e| build(e).map(|r| r.sup_residual())).collect::<Result<_>>()?;
    let exact = sups.iter().all(|&s| s <= EXACT_RESIDUAL);
    let slope = if exact || sups.iter().any(|&s| s <= 0.0) { None } else { Some(loglog_slope(epsilons, &sups)) };
    Ok(RateFit { epsilons: epsilons.to_vec(), sup_residuals: sups, slope, exact })
}

/// Largest `|R|` atom-merged norm difference between two sequences that are
/// reorderings of each other; used to check reindexing invariance.
pub fn residual_norm(sys: &System, seq: &WaveSequence) -> f64 {
    residual_measure(sys, seq).norm()
}

/// Raw (unpreconditioned) residual norm `Σ |[f] - s[q]|`.
pub fn raw_residual_norm(sys: &System, seq: &WaveSequence) -> f64 {
    seq.waves.iter().map(|w| norm3(sys.raw_residual(&w.left, &w.right, w.speed))).sum()
}
