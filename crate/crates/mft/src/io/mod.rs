//! Configuration files and every output artifact of a run.

pub mod config;
pub mod report;
pub mod svg;
pub mod tables;

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use crate::engine::{advance, RunRecord};
use crate::error::Result;
use crate::init_recon::{reconstruct, InitialData};
use crate::scenarios::{Scenario, EULER_EXTRAS, REGISTRY};

pub use config::{Frame, OutputSection, RunConfig};
pub use report::DiagnosticsReport;
pub use svg::front_plot;
pub use tables::{write_events, write_initial_data, write_profile};

pub fn read_initial_data(path: &Path) -> Result<InitialData> {
    tables::read_initial_data(File::open(path)?)
}

const INITIAL_DATA: &str = "initial_data.csv";

fn is_named(name: &str) -> bool {
    REGISTRY.contains(&name) || EULER_EXTRAS.contains(&name)
}

/// Files written by [`write_run`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Artifacts {
    pub config: PathBuf,
    pub events: PathBuf,
    pub diagnostics: PathBuf,
    pub front_plot: PathBuf,
    pub profiles: Vec<PathBuf>,
}

/// Profile times: `frames` evenly spaced points of `[0, t_end]`, always
/// including both ends.
pub fn frame_times(t_end: f64, frames: usize) -> Vec<f64> {
    let k = frames.max(2) - 1;
    (0..=k).map(|i| t_end * i as f64 / k as f64).collect()
}

/// Writes the config, event log, diagnostics, front plot and profiles of a
/// finished run into `out.dir`. Intermediate profiles rerun the scenario to
/// the frame time, which is deterministic.
pub fn write_run(s: &Scenario, rec: &RunRecord, out: &OutputSection) -> Result<Artifacts> {
    fs::create_dir_all(&out.dir)?;
    let path = |name: &str| out.dir.join(name);
    let mut a = Artifacts {
        config: path("config.toml"),
        events: path("events.csv"),
        diagnostics: path("diagnostics.json"),
        front_plot: path("frontplot.svg"),
        profiles: Vec::new(),
    };
    let mut rc = config::config_for(s, out.clone());
    if !is_named(&s.name) {
        // keep the config reloadable: the data travel alongside it
        write_initial_data(BufWriter::new(File::create(path(INITIAL_DATA))?), &s.data)?;
        rc.scenario = config::ScenarioSection { initial_data: Some(INITIAL_DATA.into()), ..Default::default() };
    }
    fs::write(&a.config, rc.emit()?)?;
    write_events(BufWriter::new(File::create(&a.events)?), &rec.events)?;
    fs::write(&a.diagnostics, DiagnosticsReport::from_run(rec).to_json()?)?;
    fs::write(&a.front_plot, front_plot(rec, &s.name))?;
    let sys = s.system();
    let times = frame_times(rec.t_final, out.frames);
    let last = times.len() - 1;
    for (i, &t) in times.iter().enumerate() {
        let seq = if i == 0 {
            rec.initial.clone()
        } else if i == last {
            rec.final_sequence.clone()
        } else {
            let cfg = crate::model::SchemeConfig { t_end: t, ..s.config.clone() };
            advance(sys, &cfg, rec.initial.clone())?.final_sequence
        };
        let p = path(&format!("profile_t{i:03}.csv"));
        let profile = reconstruct(&sys, &seq);
        write_profile(BufWriter::new(File::create(&p)?), &profile, s.config.domain, out.profile_samples, out.frame)?;
        a.profiles.push(p);
    }
    Ok(a)
}
