//! CSV tables: the event log, reconstruction profiles and initial data.

use std::io::{Read, Write};

use crate::engine::EventLog;
use crate::error::{MftError, Result};
use crate::init_recon::{InitialData, Profile};
use crate::model::State;
use crate::system::System;

use super::config::Frame;

pub const EVENT_COLUMNS: [&str; 13] = [
    "event_index",
    "t",
    "x",
    "kind",
    "in_ids",
    "in_strengths",
    "out_ids",
    "out_families",
    "out_strengths",
    "out_speeds",
    "out_widths",
    "variation_after",
    "residual_norm_after",
];

fn csv_err(e: csv::Error) -> MftError {
    MftError::Io(e.to_string())
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn join<T, F: Fn(&T) -> String>(xs: &[T], f: F) -> String {
    xs.iter().map(f).collect::<Vec<_>>().join(";")
}

pub fn write_events<W: Write>(out: W, events: &[EventLog]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(EVENT_COLUMNS).map_err(csv_err)?;
    for e in events {
        w.write_record([
            e.index.to_string(),
            fmt_f64(e.t),
            fmt_f64(e.x),
            e.kind.label().to_string(),
            join(&e.in_ids, |i| i.to_string()),
            join(&e.in_strengths, |&v| fmt_f64(v)),
            join(&e.out_ids, |i| i.to_string()),
            join(&e.out_families, |f| f.to_string()),
            join(&e.out_strengths, |&v| fmt_f64(v)),
            join(&e.out_speeds, |&v| fmt_f64(v)),
            join(&e.out_widths, |&v| fmt_f64(v)),
            fmt_f64(e.variation_after),
            fmt_f64(e.residual_norm_after),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// `(t, x)` of every logged event, for order and count checks.
pub fn read_event_times<R: Read>(input: R) -> Result<Vec<(f64, f64)>> {
    let mut r = csv::Reader::from_reader(input);
    let parse = |s: &str| s.parse::<f64>().map_err(|e| MftError::Io(format!("{s:?}: {e}")));
    r.records()
        .map(|rec| {
            let rec = rec.map_err(csv_err)?;
            Ok((parse(&rec[1])?, parse(&rec[2])?))
        })
        .collect()
}

/// Eulerian positions `X(m) = X(m_0) + ∫ v dm` at the sample points, the
/// left end moving with the far-field velocity.
pub fn eulerian_positions(sys: &System, xs: &[f64], states: &[State], t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(xs.len());
    let Some(&x0) = xs.first() else { return out };
    let mut x_e = x0 + states[0].u * t;
    out.push(x_e);
    for i in 1..xs.len() {
        let dv = 0.5 * (sys.volume(&states[i - 1]) + sys.volume(&states[i]));
        x_e += dv * (xs[i] - xs[i - 1]);
        out.push(x_e);
    }
    out
}

/// `n + 1` equally spaced samples of the profile over `domain`.
pub fn write_profile<W: Write>(out: W, profile: &Profile, domain: (f64, f64), n: usize, frame: Frame) -> Result<()> {
    let n = n.max(1);
    let xs: Vec<f64> = (0..=n).map(|i| domain.0 + (domain.1 - domain.0) * i as f64 / n as f64).collect();
    let states = profile.sample(&xs);
    let sys = &profile.system;
    let xe = (frame == Frame::EulerianOutput).then(|| eulerian_positions(sys, &xs, &states, profile.t));
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["x", "p", "u", "s", "v"];
    if xe.is_some() {
        header.push("x_eulerian");
    }
    w.write_record(&header).map_err(csv_err)?;
    for (i, (x, s)) in xs.iter().zip(&states).enumerate() {
        let mut row = vec![fmt_f64(*x), fmt_f64(s.p), fmt_f64(s.u), fmt_f64(s.s), fmt_f64(sys.volume(s))];
        if let Some(xe) = &xe {
            row.push(fmt_f64(xe[i]));
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Samples `x, p, u[, s]` with an optional header row; a repeated `x` marks a
/// jump. The first and last rows are the far-field states.
pub fn read_initial_data<R: Read>(input: R) -> Result<InitialData> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut xs = Vec::new();
    let mut states = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        // optional header row
        if i == 0 && rec.get(0).is_some_and(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        let v: Vec<f64> = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|e| MftError::Config(format!("initial data {s:?}: {e}"))))
            .collect::<Result<_>>()?;
        let (x, w) = match v[..] {
            [x, p, u] => (x, State::new(p, u)),
            [x, p, u, s] => (x, State::with_entropy(p, u, s)),
            _ => return Err(MftError::Config(format!("initial data row needs 3 or 4 columns, got {}", v.len()))),
        };
        xs.push(x);
        states.push(w);
    }
    InitialData::new(xs, states).map_err(|e| MftError::Config(e.to_string()))
}

pub fn write_initial_data<W: Write>(out: W, data: &InitialData) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "p", "u", "s"]).map_err(csv_err)?;
    for (x, s) in data.xs.iter().zip(&data.states) {
        w.write_record([fmt_f64(*x), fmt_f64(s.p), fmt_f64(s.u), fmt_f64(s.s)]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
