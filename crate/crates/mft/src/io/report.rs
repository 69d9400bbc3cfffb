//! `diagnostics.json`: event count, time series, ledger and (for sweeps) the
//! rate fit.

use serde::Serialize;

use crate::diagnostics::{conservation_ledger, residual_bound_check, BoundReport, RateFit};
use crate::engine::{LedgerEntry, RunRecord, SeriesPoint};
use crate::error::{MftError, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticsReport {
    pub event_count: usize,
    pub time_series: Vec<SeriesPoint>,
    pub ledger: Vec<LedgerEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate_fit: Option<RateFit>,
    pub ledger_holds: bool,
    pub final_bound: BoundReport,
    pub stop: String,
    pub t_final: f64,
    pub accumulation_flag: bool,
}

impl DiagnosticsReport {
    pub fn from_run(rec: &RunRecord) -> Self {
        DiagnosticsReport {
            event_count: rec.event_count(),
            time_series: rec.series.clone(),
            ledger: rec.ledger.clone(),
            rate_fit: None,
            ledger_holds: conservation_ledger(rec).holds,
            final_bound: residual_bound_check(&rec.system, &rec.final_sequence, &rec.config),
            stop: rec.stop.label(),
            t_final: rec.t_final,
            accumulation_flag: rec.accumulation_flag,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| MftError::Io(e.to_string()))
    }
}
