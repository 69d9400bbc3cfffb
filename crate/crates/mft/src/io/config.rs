//! TOML run configuration: `[eos]`, `[scheme]`, `[domain]`, `[scenario]`,
//! `[output]`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{MftError, Result};
use crate::model::{EosParams, QRule, SchemeConfig, State, SystemKind};
use crate::scenarios::{scenario, Scenario};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EosSection {
    pub system: SystemKind,
    pub gamma: f64,
    #[serde(default = "one")]
    pub k: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeSection {
    pub epsilon: f64,
    pub e_r: f64,
    pub e_c: f64,
    pub e_w: f64,
    pub e_p: f64,
    pub e_d: f64,
    pub e_i: f64,
    pub kappa: f64,
    pub q_rule: QRule,
    pub composites: bool,
    pub max_events: usize,
    pub t_sharp_factor: f64,
    pub k_s: f64,
    pub k_p: f64,
    pub k_hp: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    pub x_min: f64,
    pub x_max: f64,
    pub t_end: f64,
}

/// Where the initial data comes from: a registry name, a Riemann problem, or
/// a CSV of samples. Exactly one should be given.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub riemann: Option<RiemannData>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_data: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiemannData {
    pub x0: f64,
    /// `[p, u]` or `[p, u, s]`.
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
#[value(rename_all = "kebab-case")]
pub enum Frame {
    #[default]
    Lagrangian,
    /// Profiles additionally carry Eulerian positions.
    EulerianOutput,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    /// Number of profile frames, evenly spaced in `[0, t_end]`.
    pub frames: usize,
    pub profile_samples: usize,
    pub frame: Frame,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: PathBuf::from("out"), frames: 2, profile_samples: 2000, frame: Frame::Lagrangian }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub eos: EosSection,
    pub scheme: SchemeSection,
    pub domain: DomainSection,
    #[serde(default)]
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl RunConfig {
    pub fn from_scheme(cfg: &SchemeConfig, scenario: ScenarioSection, output: OutputSection) -> Self {
        RunConfig {
            eos: EosSection { system: cfg.system, gamma: cfg.eos.gamma, k: cfg.eos.k },
            scheme: SchemeSection {
                epsilon: cfg.epsilon,
                e_r: cfg.e_r,
                e_c: cfg.e_c,
                e_w: cfg.e_w,
                e_p: cfg.e_p,
                e_d: cfg.e_d,
                e_i: cfg.e_i,
                kappa: cfg.kappa,
                q_rule: cfg.q_rule,
                composites: cfg.composites_enabled,
                max_events: cfg.max_events,
                t_sharp_factor: cfg.t_sharp_factor,
                k_s: cfg.k_s,
                k_p: cfg.k_p,
                k_hp: cfg.k_hp,
            },
            domain: DomainSection { x_min: cfg.domain.0, x_max: cfg.domain.1, t_end: cfg.t_end },
            scenario,
            output,
        }
    }

    pub fn scheme_config(&self) -> SchemeConfig {
        let s = &self.scheme;
        SchemeConfig {
            epsilon: s.epsilon,
            e_r: s.e_r,
            e_c: s.e_c,
            e_w: s.e_w,
            e_p: s.e_p,
            e_d: s.e_d,
            e_i: s.e_i,
            kappa: s.kappa,
            q_rule: s.q_rule,
            composites_enabled: s.composites,
            system: self.eos.system,
            eos: EosParams { gamma: self.eos.gamma, k: self.eos.k },
            domain: (self.domain.x_min, self.domain.x_max),
            t_end: self.domain.t_end,
            max_events: s.max_events,
            t_sharp_factor: s.t_sharp_factor,
            k_s: s.k_s,
            k_p: s.k_p,
            k_hp: s.k_hp,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| MftError::Config(e.to_string()))?;
        cfg.scheme_config().validate()?;
        Ok(cfg)
    }

    pub fn emit(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| MftError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| MftError::Config(format!("{}: {e}", path.display())))?;
        RunConfig::parse(&text)
    }

    /// Initial data and scheme settings; the scheme always comes from this
    /// file, even for a named scenario.
    pub fn resolve(&self, base: &Path) -> Result<Scenario> {
        let config = self.scheme_config();
        config.validate()?;
        let sc = &self.scenario;
        let given = sc.name.is_some() as u8 + sc.riemann.is_some() as u8 + sc.initial_data.is_some() as u8;
        if given != 1 {
            return Err(MftError::Config("[scenario] needs exactly one of name, riemann, initial_data".into()));
        }
        if let Some(name) = &sc.name {
            let mut s = scenario(name, config.epsilon)?;
            s.config = config;
            return Ok(s);
        }
        if let Some(r) = &sc.riemann {
            let l = state_from_slice(&r.left)?;
            let rr = state_from_slice(&r.right)?;
            return Ok(Scenario::riemann("riemann", config, l, rr, r.x0));
        }
        let path = base.join(sc.initial_data.as_ref().unwrap());
        let data = super::read_initial_data(&path)?;
        Ok(Scenario { name: path.display().to_string(), config, data })
    }
}

fn state_from_slice(v: &[f64]) -> Result<State> {
    let w = match v {
        [p, u] => State::new(*p, *u),
        [p, u, s] => State::with_entropy(*p, *u, *s),
        _ => return Err(MftError::Config(format!("a state is [p, u] or [p, u, s], got {v:?}"))),
    };
    w.check().map_err(|e| MftError::Config(e.to_string()))?;
    Ok(w)
}

/// Shorthand used when no config file is given.
pub fn config_for(s: &Scenario, output: OutputSection) -> RunConfig {
    let scenario = ScenarioSection { name: Some(s.name.clone()), ..Default::default() };
    RunConfig::from_scheme(&s.config, scenario, output)
}
