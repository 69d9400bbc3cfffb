//! Shared vocabulary: states, waves, wave sequences, point-mass residuals and
//! scheme configuration.

use serde::{Deserialize, Serialize};

use crate::error::{MftError, Result};

/// Conserved/flux vectors are padded to length 3; the p-system leaves the last
/// component at zero.
pub type Vec3 = [f64; 3];

pub fn add3(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub3(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn scale3(s: f64, a: Vec3) -> Vec3 {
    [s * a[0], s * a[1], s * a[2]]
}

pub fn dot3(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm3(a: Vec3) -> f64 {
    dot3(a, a).sqrt()
}

/// Pressure, velocity and (Euler only) specific entropy. The p-system keeps
/// `s = 0` and takes its entropy constant from the equation of state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub p: f64,
    pub u: f64,
    #[serde(default)]
    pub s: f64,
}

impl State {
    pub fn new(p: f64, u: f64) -> Self {
        State { p, u, s: 0.0 }
    }

    pub fn with_entropy(p: f64, u: f64, s: f64) -> Self {
        State { p, u, s }
    }

    pub fn is_valid(&self) -> bool {
        self.p > 0.0 && self.p.is_finite() && self.u.is_finite() && self.s.is_finite()
    }

    pub fn check(&self) -> Result<()> {
        if !(self.p.is_finite() && self.u.is_finite() && self.s.is_finite()) {
            return Err(MftError::Invariant(format!("non-finite state {self:?}")));
        }
        if self.p <= 0.0 {
            return Err(MftError::Vacuum(format!("pressure {} at state {self:?}", self.p)));
        }
        Ok(())
    }

    pub fn distance(&self, other: &State) -> f64 {
        ((self.p - other.p).powi(2) + (self.u - other.u).powi(2) + (self.s - other.s).powi(2)).sqrt()
    }

    pub fn midpoint(&self, other: &State) -> State {
        State {
            p: 0.5 * (self.p + other.p),
            u: 0.5 * (self.u + other.u),
            s: 0.5 * (self.s + other.s),
        }
    }
}

/// Human-readable label of family `k` in a system with `n` families.
pub fn family_label(n: usize, k: usize) -> &'static str {
    match (n, k) {
        (_, 0) => "backward",
        (3, 1) => "contact",
        _ => "forward",
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WaveKind {
    Shock,
    Contact,
    Rarefaction,
    Compression,
}

impl WaveKind {
    pub fn is_simple(self) -> bool {
        matches!(self, WaveKind::Rarefaction | WaveKind::Compression)
    }

    pub fn label(self) -> &'static str {
        match self {
            WaveKind::Shock => "shock",
            WaveKind::Contact => "contact",
            WaveKind::Rarefaction => "rarefaction",
            WaveKind::Compression => "compression",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PreconditionerTag {
    Identity,
    /// `diag(<1/c>/<1/c^2>, 1)` for the p-system.
    PSystemAR,
    /// The 3x3 gas-dynamics preconditioner: scaled first row after removing
    /// the `(p̄, ū)` coupling from the energy row.
    EulerAR,
}

/// Temporary trajectory of a multi-rarefaction member: the wave leaves the
/// interaction point with an interpolated speed and reverts to `target_speed`
/// at `t_revert`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TempPhase {
    pub group: u64,
    pub target_speed: f64,
    pub t_revert: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Wave {
    pub id: u64,
    pub family: usize,
    pub kind: WaveKind,
    pub strength: f64,
    pub left: State,
    pub right: State,
    /// Current speed of the jump.
    pub speed: f64,
    /// A point on the current trajectory: `x^p(t) = x0 + speed (t - t0)`.
    pub x0: f64,
    pub t0: f64,
    /// Virtual center of a simple wave, or origin of a shock/contact.
    pub xc: f64,
    pub tc: f64,
    /// Expansion rate `λ_k(right) - λ_k(left)`.
    pub rate: f64,
    pub born: f64,
    pub next_interaction: f64,
    pub temp: Option<TempPhase>,
    pub carrier: Option<u64>,
    /// Passenger too strong relative to its carrier to be neglected.
    #[serde(default)]
    pub heavy: bool,
    pub precond: PreconditionerTag,
}

impl Wave {
    pub fn position_at(&self, t: f64) -> f64 {
        position_at(self, t)
    }

    /// Virtual width, zero for shocks and contacts and clamped at zero after a
    /// compression focuses.
    pub fn width_at(&self, t: f64) -> f64 {
        if self.kind.is_simple() {
            (self.rate * (t - self.tc)).max(0.0)
        } else {
            0.0
        }
    }

    /// Left and right virtual edges given the edge characteristic speeds.
    pub fn edges_at(&self, t: f64, lambda_left: f64, lambda_right: f64) -> (f64, f64) {
        if !self.kind.is_simple() {
            let x = self.position_at(t);
            return (x, x);
        }
        let dt = t - self.tc;
        let a = self.xc + lambda_left * dt;
        let b = self.xc + lambda_right * dt;
        (a.min(b), a.max(b))
    }

    pub fn is_compressive(&self) -> bool {
        self.strength < 0.0
    }
}

/// `x^p(t) = x0 + s (t - t0)` for the wave's current trajectory.
pub fn position_at(w: &Wave, t: f64) -> f64 {
    w.x0 + w.speed * (t - w.t0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveSequence {
    pub leftmost: State,
    pub waves: Vec<Wave>,
    pub t: f64,
}

impl WaveSequence {
    pub fn constant(state: State) -> Self {
        WaveSequence { leftmost: state, waves: Vec::new(), t: 0.0 }
    }

    pub fn rightmost(&self) -> State {
        self.waves.last().map(|w| w.right).unwrap_or(self.leftmost)
    }

    /// Piecewise-constant value at `x`, averaging at a jump.
    pub fn state_at(&self, x: f64) -> State {
        let mut left = self.leftmost;
        for w in &self.waves {
            let xp = w.position_at(self.t);
            if x < xp {
                return left;
            }
            if x == xp {
                return w.left.midpoint(&w.right);
            }
            left = w.right;
        }
        left
    }

    /// Adjacency and spatial ordering; same-family overlap is checked by the
    /// engine, which knows the characteristic speeds.
    pub fn validate(&self, pos_tol: f64) -> Result<()> {
        let mut prev = self.leftmost;
        let mut prev_x = f64::NEG_INFINITY;
        for w in &self.waves {
            if w.left != prev {
                return Err(MftError::Invariant(format!("adjacency broken at wave {}", w.id)));
            }
            let x = w.position_at(self.t);
            if x + pos_tol < prev_x {
                return Err(MftError::Invariant(format!("wave {} out of order: {x} < {prev_x}", w.id)));
            }
            w.right.check()?;
            prev = w.right;
            prev_x = x;
        }
        Ok(())
    }
}

/// `Σ |ζ_j|`.
pub fn variation(seq: &WaveSequence) -> f64 {
    seq.waves.iter().map(|w| w.strength.abs()).sum()
}

/// Finite sum of Dirac masses with vector weights.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PointMassMeasure {
    pub atoms: Vec<(f64, Vec3)>,
}

impl PointMassMeasure {
    /// Adds an atom, merging with an existing atom at the identical location.
    pub fn push(&mut self, x: f64, weight: Vec3) {
        if let Some(a) = self.atoms.iter_mut().find(|a| a.0 == x) {
            a.1 = add3(a.1, weight);
        } else {
            self.atoms.push((x, weight));
        }
    }

    pub fn norm(&self) -> f64 {
        self.atoms.iter().map(|a| norm3(a.1)).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    PSystem,
    Euler,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EosParams {
    pub gamma: f64,
    #[serde(default = "one")]
    pub k: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule", content = "value")]
pub enum QRule {
    /// `Q(ε) = 1/|ln ε|`.
    InverseLog,
    Constant(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub epsilon: f64,
    pub e_r: f64,
    pub e_c: f64,
    pub e_w: f64,
    pub e_p: f64,
    pub e_d: f64,
    pub e_i: f64,
    pub kappa: f64,
    pub q_rule: QRule,
    pub composites_enabled: bool,
    pub system: SystemKind,
    pub eos: EosParams,
    pub domain: (f64, f64),
    pub t_end: f64,
    pub max_events: usize,
    /// Multiplier `C` in `t# - t! = C (t! - t^c) / (m ε^{e_r})`.
    pub t_sharp_factor: f64,
    /// Empirical constants of the residual bound.
    pub k_s: f64,
    pub k_p: f64,
    pub k_hp: f64,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        SchemeConfig {
            epsilon: 0.1,
            e_r: 1.0,
            e_c: 1.0,
            e_w: 2.0,
            e_p: 1.5,
            e_d: 1.0,
            e_i: 1.0,
            kappa: 0.25,
            q_rule: QRule::InverseLog,
            composites_enabled: false,
            system: SystemKind::PSystem,
            eos: EosParams { gamma: 1.4, k: 1.0 },
            domain: (0.0, 1.0),
            t_end: 0.2,
            max_events: 1_000_000,
            t_sharp_factor: 1.0,
            k_s: 1.0,
            k_p: 1.0,
            k_hp: 1.0,
        }
    }
}

impl SchemeConfig {
    pub fn with_epsilon(mut self, eps: f64) -> Self {
        self.epsilon = eps;
        self
    }

    pub fn threshold(&self, e: f64) -> f64 {
        self.epsilon.powf(e)
    }

    pub fn eps_r(&self) -> f64 {
        self.threshold(self.e_r)
    }

    pub fn eps_c(&self) -> f64 {
        self.threshold(self.e_c)
    }

    pub fn eps_w(&self) -> f64 {
        self.threshold(self.e_w)
    }

    pub fn eps_p(&self) -> f64 {
        self.threshold(self.e_p)
    }

    pub fn eps_d(&self) -> f64 {
        self.threshold(self.e_d)
    }

    pub fn eps_i(&self) -> f64 {
        self.threshold(self.e_i)
    }

    pub fn e_s(&self) -> f64 {
        self.e_r.min(self.e_c)
    }

    pub fn q(&self) -> f64 {
        match self.q_rule {
            QRule::InverseLog => 1.0 / self.epsilon.ln().abs(),
            QRule::Constant(q) => q,
        }
    }

    pub fn length(&self) -> f64 {
        self.domain.1 - self.domain.0
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(MftError::Config(m.to_string()));
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad("epsilon must lie in (0, 1)");
        }
        for (name, e) in [("e_r", self.e_r), ("e_c", self.e_c), ("e_w", self.e_w), ("e_p", self.e_p), ("e_d", self.e_d), ("e_i", self.e_i)] {
            if !(e > 0.0 && e.is_finite()) {
                return Err(MftError::Config(format!("{name} must be positive")));
            }
        }
        if self.e_w <= self.e_c {
            return bad("e_w must exceed e_c");
        }
        if !(self.kappa > 0.0 && self.kappa < 1.0 / 3.0) {
            return bad("kappa must lie in (0, 1/3)");
        }
        if self.composites_enabled && self.e_r >= self.e_p {
            return bad("composite waves need e_r < e_p");
        }
        if !(self.eos.gamma > 1.0 && self.eos.k > 0.0) {
            return bad("eos needs gamma > 1 and K > 0");
        }
        if !(self.domain.1 > self.domain.0) {
            return bad("empty domain");
        }
        if !(self.t_end >= 0.0) {
            return bad("t_end must be nonnegative");
        }
        if !(self.t_sharp_factor > 0.0) {
            return bad("t_sharp_factor must be positive");
        }
        Ok(())
    }
}
