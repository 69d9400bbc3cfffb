//! Canned experiments by name, the periodic cycle, and the finite-volume
//! reference.

pub mod cycle;
pub mod fv;

use serde::{Deserialize, Serialize};

use crate::engine::{advance, RunRecord};
use crate::eos::GammaLaw;
use crate::error::{MftError, Result};
use crate::init_recon::{initialize, InitialData};
use crate::model::{EosParams, SchemeConfig, State, SystemKind, WaveSequence};
use crate::psystem::{Direction, PSystem};
use crate::system::System;

pub use cycle::{build_cycle, critical_strength, cyclic_initial_data, CycleLayout, CycleReport};
pub use fv::{reference_fv, reference_fv_grids, self_convergence_error, FvSolution};

/// Registry names.
pub const REGISTRY: [&str; 6] = ["sod_like", "two_shock", "single_rarefaction", "compressive_ramp", "cycle_gamma14", "cycle_gamma2"];

/// Gas-dynamics scenarios outside the core registry.
pub const EULER_EXTRAS: [&str; 2] = ["euler_sod", "euler_contact"];

/// Event cap and end time of the cyclic runs; the pattern keeps interacting,
/// so these runs normally end on the budget.
pub const CYCLE_EVENTS: usize = 100_000;
pub const CYCLE_T_END: f64 = 10.0;

/// Strength of the cyclic data relative to the critical one.
pub const CYCLE_MARGIN: f64 = 1.02;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub config: SchemeConfig,
    pub data: InitialData,
}

impl Scenario {
    pub fn system(&self) -> System {
        System::from_config(&self.config)
    }

    pub fn initial_sequence(&self) -> Result<WaveSequence> {
        initialize(&self.system(), &self.data, &self.config)
    }

    pub fn run(&self) -> Result<RunRecord> {
        advance(self.system(), &self.config, self.initial_sequence()?)
    }

    /// Riemann data `l | r` at `x0` under an arbitrary configuration.
    pub fn riemann(name: &str, config: SchemeConfig, l: State, r: State, x0: f64) -> Scenario {
        let data = InitialData::step(x0, l, r, config.domain);
        Scenario { name: name.into(), config, data }
    }
}

fn psystem_config(gamma: f64, epsilon: f64, t_end: f64) -> SchemeConfig {
    SchemeConfig { eos: EosParams { gamma, k: 1.0 }, t_end, ..SchemeConfig::default() }.with_epsilon(epsilon)
}

/// Entropy `ln(p v^γ)` of a gas state given density.
pub fn entropy_from_density(gamma: f64, p: f64, rho: f64) -> f64 {
    (p * rho.powf(-gamma)).ln()
}

/// The cyclic pattern for `γ` with `p_0 = 1`. Closed cycles use `ζ` just
/// above the critical strength; when no strength in `(0, z_0)` closes the
/// cycle, the unled pattern at `ζ = 0.95 z_0` is used instead.
pub fn cycle_for(gamma: f64) -> Result<CycleReport> {
    let z0 = GammaLaw::new(gamma, 1.0).z(1.0);
    let zeta = match critical_strength(z0, gamma, 1.0) {
        Ok(c) => (CYCLE_MARGIN * c.zeta_star).min(0.999 * z0),
        Err(MftError::NoBracket(_)) => 0.95 * z0,
        Err(e) => return Err(e),
    };
    build_cycle(z0, zeta, gamma, 1.0)
}

pub fn scenario(name: &str, epsilon: f64) -> Result<Scenario> {
    let ps = PSystem::new(1.4, 1.0);
    let named = |config: SchemeConfig, data: InitialData| Scenario { name: name.into(), config, data };
    Ok(match name {
        "sod_like" => {
            let cfg = psystem_config(1.4, epsilon, 0.2);
            Scenario::riemann(name, cfg, State::new(1.0, 0.0), State::new(0.1, 0.0), 0.5)
        }
        "two_shock" => {
            let cfg = psystem_config(1.4, epsilon, 0.2);
            Scenario::riemann(name, cfg, State::new(1.0, 0.5), State::new(1.0, -0.5), 0.5)
        }
        "single_rarefaction" => {
            let r = State::new(1.0, 0.0);
            let l = ps.simple_wave_to(r, 0.4, Direction::Forward)?;
            Scenario::riemann(name, psystem_config(1.4, epsilon, 0.2), l, r, 0.3)
        }
        "compressive_ramp" => {
            // forward compression: pressure falls from 2 to 1 across [0.2, 0.4]
            let r = State::new(1.0, 0.0);
            let (a, b) = (0.2, 0.4);
            let ramp = |x: f64| ps.simple_wave_to(r, 2.0 - (x - a) / (b - a), Direction::Forward).unwrap_or(r);
            named(psystem_config(1.4, epsilon, 0.3), InitialData::sampled(ramp, a, b, 200)?)
        }
        "cycle_gamma14" | "cycle_gamma2" => {
            let gamma = if name == "cycle_gamma14" { 1.4 } else { 2.0 };
            let c = cycle_for(gamma)?;
            let layout = CycleLayout::default();
            let cfg = SchemeConfig { max_events: CYCLE_EVENTS, domain: layout.domain, ..psystem_config(gamma, epsilon, CYCLE_T_END) };
            named(cfg, cyclic_initial_data(&c, &layout)?)
        }
        "euler_sod" => {
            let g = 1.4;
            let l = State::with_entropy(1.0, 0.0, entropy_from_density(g, 1.0, 1.0));
            let r = State::with_entropy(0.1, 0.0, entropy_from_density(g, 0.1, 0.125));
            let cfg = SchemeConfig { system: SystemKind::Euler, ..psystem_config(g, epsilon, 0.2) };
            Scenario::riemann(name, cfg, l, r, 0.5)
        }
        "euler_contact" => {
            let l = State::with_entropy(1.0, 0.1, 0.0);
            let r = State::with_entropy(0.8, 0.0, 0.7);
            let cfg = SchemeConfig { system: SystemKind::Euler, ..psystem_config(1.4, epsilon, 0.2) };
            Scenario::riemann(name, cfg, l, r, 0.5)
        }
        _ => return Err(MftError::Config(format!("unknown scenario {name:?}"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_builds() {
        for name in REGISTRY.iter().chain(&EULER_EXTRAS) {
            let s = scenario(name, 0.1).unwrap();
            s.config.validate().unwrap();
            s.initial_sequence().unwrap();
        }
        assert!(scenario("nope", 0.1).is_err());
    }
}
