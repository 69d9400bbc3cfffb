use serde::Serialize;

use crate::error::MftError;
use crate::model::{SchemeConfig, State, Vec3, WaveKind, WaveSequence};
use crate::system::System;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventClass {
    Pair,
    Collapse,
    Revert,
}

impl EventClass {
    pub fn label(self) -> &'static str {
        match self {
            EventClass::Pair => "pair",
            EventClass::Collapse => "collapse",
            EventClass::Revert => "revert",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EventLog {
    pub index: usize,
    pub t: f64,
    pub x: f64,
    pub kind: EventClass,
    pub in_ids: Vec<u64>,
    pub in_kinds: Vec<WaveKind>,
    pub in_families: Vec<usize>,
    pub in_strengths: Vec<f64>,
    pub out_ids: Vec<u64>,
    pub out_families: Vec<usize>,
    pub out_strengths: Vec<f64>,
    pub out_speeds: Vec<f64>,
    pub out_widths: Vec<f64>,
    pub variation_after: f64,
    pub residual_norm_after: f64,
    /// Families with a nonzero outgoing wave, before splitting.
    pub out_logical: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesPoint {
    pub t: f64,
    pub variation: f64,
    pub residual_norm: f64,
    pub wave_count: usize,
    #[serde(rename = "W_H")]
    pub w_h: f64,
    /// User-supplied Glimm-type potential, when one was registered.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential: Option<f64>,
}

/// A straight piece of one wave's trajectory.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Segment {
    pub id: u64,
    pub family: usize,
    pub kind: WaveKind,
    pub compressive: bool,
    pub t0: f64,
    pub x0: f64,
    pub t1: f64,
    pub x1: f64,
    pub left: State,
    pub right: State,
}

impl Segment {
    pub fn position_at(&self, t: f64) -> f64 {
        if self.t1 == self.t0 {
            return self.x0;
        }
        self.x0 + (self.x1 - self.x0) * (t - self.t0) / (self.t1 - self.t0)
    }
}

/// Drift of `∫ q dx` against the far-field fluxes, and the time integral of
/// the unpreconditioned residual norm that bounds it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LedgerEntry {
    pub t: f64,
    pub drift: Vec3,
    pub drift_norm: f64,
    pub residual_integral: f64,
    /// Accumulated `|Σ (x_j - x!) [q]_j|` from placing nearly coincident
    /// incident waves exactly at the interaction point.
    pub snap_tolerance: f64,
}

impl LedgerEntry {
    /// `|D| ≤ (1 + 1e-6) ∫ ‖R‖ dt` up to round-off and snapping.
    pub fn within_bound(&self) -> bool {
        self.drift_norm <= (1.0 + 1e-6) * self.residual_integral + self.snap_tolerance + 1e-10
    }
}

/// Spatial span of the live waves created by interactions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SupportSample {
    pub t: f64,
    pub event_index: usize,
    pub lo: f64,
    pub hi: f64,
}

impl SupportSample {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StopReason {
    EndTime,
    Budget,
    Failed(MftError),
}

impl StopReason {
    pub fn label(&self) -> String {
        match self {
            StopReason::EndTime => "end_time".into(),
            StopReason::Budget => "event_budget".into(),
            StopReason::Failed(e) => format!("failed: {e}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunRecord {
    pub system: System,
    pub config: SchemeConfig,
    pub initial: WaveSequence,
    pub final_sequence: WaveSequence,
    pub events: Vec<EventLog>,
    pub series: Vec<SeriesPoint>,
    pub segments: Vec<Segment>,
    pub ledger: Vec<LedgerEntry>,
    pub support: Vec<SupportSample>,
    pub stop: StopReason,
    pub t_final: f64,
    pub accumulation_flag: bool,
    /// Index of the first event in which a shock met a rarefaction.
    pub first_shock_rarefaction: Option<usize>,
}

impl RunRecord {
    pub fn event_count(&self) -> usize {
        self.events.len()
    }

    pub fn sup_residual(&self) -> f64 {
        self.series.iter().map(|p| p.residual_norm).fold(0.0, f64::max)
    }

    pub fn max_variation(&self) -> f64 {
        self.series.iter().map(|p| p.variation).fold(0.0, f64::max)
    }
}
