//! Acoustic wave curves of the p-system `v_t - u_x = 0, u_t + p_x = 0`,
//! written in pressure/velocity variables.
//!
//! Convention: along every acoustic wave, `u_r - u_l = z(p_a) - z(p_b)` for a
//! simple wave and `u_r - u_l = -sqrt((p_b - p_a)(v_a - v_b))` for a shock,
//! where `a` is the state ahead of the wave (the right state for the forward
//! family, the left state for the backward family) and `b` the state behind.

use serde::{Deserialize, Serialize};

use crate::eos::GammaLaw;
use crate::error::{MftError, Result};
use crate::model::{State, Wave, WaveKind};
use crate::numerics::{bisect, rtsafe};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Backward,
    Forward,
}

impl Direction {
    /// Sign of the characteristic speed `λ = ±c`.
    pub fn sign(self) -> f64 {
        match self {
            Direction::Backward => -1.0,
            Direction::Forward => 1.0,
        }
    }

    /// Orders `(left, right)` as `(ahead, behind)`.
    pub fn ahead_behind(self, l: State, r: State) -> (State, State) {
        match self {
            Direction::Backward => (l, r),
            Direction::Forward => (r, l),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Simple,
    Shock,
}

/// How the behind volume of a shock is obtained: on the same isentrope
/// (p-system) or on the gas-dynamics Hugoniot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShockLaw {
    Isentropic,
    Hugoniot,
}

/// `v_a - v_b` across a shock with ahead EOS `eos`, ahead pressure `pa`,
/// behind pressure `pb`.
pub fn shock_volume_drop(eos: &GammaLaw, law: ShockLaw, pa: f64, pb: f64) -> f64 {
    match law {
        ShockLaw::Isentropic => eos.v_diff(pa, pb),
        ShockLaw::Hugoniot => {
            let mu = 1.0 / (eos.gamma - 1.0);
            let d = (mu + 0.5) * pb + 0.5 * pa;
            eos.v(pa) * mu * (pb - pa) / d
        }
    }
}

/// Velocity change `u_r - u_l` across a wave with ahead pressure `pa` and
/// behind pressure `pb`, and its derivative with respect to `pb`.
pub fn velocity_jump(eos: &GammaLaw, law: ShockLaw, pa: f64, pb: f64, branch: Branch) -> (f64, f64) {
    if pb <= 0.0 {
        return (eos.z(pa), f64::NEG_INFINITY);
    }
    match branch {
        Branch::Simple => (eos.z_diff(pa, pb), -1.0 / eos.c(pb)),
        Branch::Shock => {
            if pb == pa {
                return (0.0, -1.0 / eos.c(pa));
            }
            match law {
                ShockLaw::Isentropic => {
                    let dv = eos.v_diff(pa, pb);
                    let g = (pb - pa) * dv;
                    let cb = eos.c(pb);
                    let dg = dv + (pb - pa) / (cb * cb);
                    let r = g.sqrt();
                    (-r, -0.5 * dg / r)
                }
                ShockLaw::Hugoniot => {
                    let mu = 1.0 / (eos.gamma - 1.0);
                    let d = (mu + 0.5) * pb + 0.5 * pa;
                    let k = (eos.v(pa) * mu).sqrt();
                    let du = -(pb - pa) * k / d.sqrt();
                    let ddu = -k * (d.powf(-0.5) - 0.5 * (pb - pa) * (mu + 0.5) * d.powf(-1.5));
                    (du, ddu)
                }
            }
        }
    }
}

/// Branch actually taken by an acoustic wave in a gRP: widths force the
/// simple branch, otherwise compressive data produce a shock.
pub fn branch_for(force_simple: bool, pa: f64, pb: f64) -> Branch {
    if force_simple || pb <= pa {
        Branch::Simple
    } else {
        Branch::Shock
    }
}

/// Signed strength `½(z_a - z_b + u_r - u_l)`; z is evaluated with the ahead EOS.
pub fn strength_of(eos_ahead: &GammaLaw, dir: Direction, l: State, r: State) -> f64 {
    let (a, b) = dir.ahead_behind(l, r);
    0.5 * (eos_ahead.z_diff(a.p, b.p) + (r.u - l.u))
}

/// Scalar middle-pressure problem shared by the p-system and gas dynamics.
/// Returns `(p_m, u_m)`.
pub fn solve_middle(
    law: ShockLaw,
    wl: State,
    eos_l: &GammaLaw,
    wr: State,
    eos_r: &GammaLaw,
    force_simple: [bool; 2],
) -> Result<(f64, f64)> {
    wl.check()?;
    wr.check()?;
    let du = wr.u - wl.u;
    let gap = eos_l.z(wl.p) + eos_r.z(wr.p);
    if gap <= du {
        return Err(MftError::Vacuum(format!(
            "velocity gap {du} exceeds z_L + z_R = {gap}"
        )));
    }
    if wl.p == wr.p && du == 0.0 {
        return Ok((wl.p, wl.u));
    }
    let fdf = |pm: f64| {
        let (al, dl) = velocity_jump(eos_l, law, wl.p, pm, branch_for(force_simple[0], wl.p, pm));
        let (ar, dr) = velocity_jump(eos_r, law, wr.p, pm, branch_for(force_simple[1], wr.p, pm));
        (al + ar - du, dl + dr)
    };
    // bracket around the acoustic estimate, which is sharp for weak jumps
    let (cl, cr) = (eos_l.c(wl.p), eos_r.c(wr.p));
    let guess = (cr * wl.p + cl * wr.p - cl * cr * du) / (cl + cr);
    let guess = if guess > 0.0 { guess } else { 0.5 * wl.p.min(wr.p) };
    let mut lo = guess * (1.0 - 1e-3);
    let mut hi = guess * (1.0 + 1e-3);
    let mut tries = 0;
    while fdf(lo).0 <= 0.0 {
        lo *= 0.25;
        tries += 1;
        if tries > 60 {
            lo = 0.0;
            break;
        }
    }
    tries = 0;
    while fdf(hi).0 > 0.0 {
        hi *= 4.0;
        tries += 1;
        if tries > 400 || !hi.is_finite() {
            return Err(MftError::NoBracket("middle pressure unbounded".into()));
        }
    }
    let pm = rtsafe(fdf, lo, hi, 1e-13, 100)?;
    if pm <= 0.0 {
        return Err(MftError::Vacuum(format!("middle pressure {pm}")));
    }
    let (al, _) = velocity_jump(eos_l, law, wl.p, pm, branch_for(force_simple[0], wl.p, pm));
    let (ar, _) = velocity_jump(eos_r, law, wr.p, pm, branch_for(force_simple[1], wr.p, pm));
    let um = 0.5 * ((wl.u + al) + (wr.u - ar));
    // a family that carries no wave up to solver tolerance keeps its state exactly
    for (w, eos) in [(wl, eos_l), (wr, eos_r)] {
        let tol = 1e-12;
        if (pm - w.p).abs() <= tol * w.p && (um - w.u).abs() <= tol * (eos.z(w.p) + w.u.abs()) {
            return Ok((w.p, w.u));
        }
    }
    Ok((pm, um))
}

/// Solution of a generalized Riemann problem: `n + 1` states separated by
/// one wave per family. A family whose two states coincide has no wave.
#[derive(Clone, Debug, PartialEq)]
pub struct GrpSolution {
    pub states: Vec<State>,
    pub kinds: Vec<Option<WaveKind>>,
    pub strengths: Vec<f64>,
}

impl GrpSolution {
    pub fn middle(&self) -> State {
        self.states[1]
    }
}

pub(crate) fn acoustic_kind(branch: Branch, pa: f64, pb: f64) -> WaveKind {
    match branch {
        Branch::Shock => WaveKind::Shock,
        Branch::Simple if pb > pa => WaveKind::Compression,
        Branch::Simple => WaveKind::Rarefaction,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PSystem {
    pub eos: GammaLaw,
}

impl PSystem {
    pub fn new(gamma: f64, k: f64) -> Self {
        PSystem { eos: GammaLaw::new(gamma, k) }
    }

    /// State behind a simple wave with ahead state `wa` and behind pressure `pb`.
    pub fn simple_wave_to(&self, wa: State, pb: f64, dir: Direction) -> Result<State> {
        if pb <= 0.0 {
            return Err(MftError::Vacuum(format!("behind pressure {pb}")));
        }
        let du = self.eos.z_diff(wa.p, pb);
        Ok(match dir {
            Direction::Backward => State::new(pb, wa.u + du),
            Direction::Forward => State::new(pb, wa.u - du),
        })
    }

    /// State behind an admissible shock and its signed Lagrangian speed.
    pub fn shock_to(&self, wa: State, pb: f64, dir: Direction) -> Result<(State, f64)> {
        if pb <= 0.0 {
            return Err(MftError::Vacuum(format!("behind pressure {pb}")));
        }
        if pb <= wa.p {
            return Err(MftError::NotAdmissible(format!("p_b = {pb} <= p_a = {}", wa.p)));
        }
        let (du, _) = velocity_jump(&self.eos, ShockLaw::Isentropic, wa.p, pb, Branch::Shock);
        let dv = self.eos.v_diff(wa.p, pb);
        let sigma = dir.sign() * ((pb - wa.p) / dv).sqrt();
        let wb = match dir {
            Direction::Backward => State::new(pb, wa.u + du),
            Direction::Forward => State::new(pb, wa.u - du),
        };
        Ok((wb, sigma))
    }

    pub fn on_curve(&self, l: State, r: State, dir: Direction, branch: Branch) -> bool {
        let (a, b) = dir.ahead_behind(l, r);
        if branch == Branch::Shock && b.p < a.p {
            return false;
        }
        let (du, _) = velocity_jump(&self.eos, ShockLaw::Isentropic, a.p, b.p, branch);
        let scale = 1.0 + l.u.abs().max(r.u.abs()) + self.eos.z(a.p.max(b.p));
        ((r.u - l.u) - du).abs() <= 1e-10 * scale
    }

    pub fn wave_strength(&self, l: State, r: State, dir: Direction, branch: Branch) -> Result<f64> {
        if !self.on_curve(l, r, dir, branch) {
            return Err(MftError::NotOnCurve(format!("{l:?} -> {r:?} ({dir:?}, {branch:?})")));
        }
        Ok(strength_of(&self.eos, dir, l, r))
    }

    /// Behind state of a simple wave of strength `zeta` with ahead state `wa`;
    /// with `transpose`, the ahead state given the behind state.
    pub fn simple_by_strength(&self, w: State, zeta: f64, dir: Direction, transpose: bool) -> State {
        let z = self.eos.z(w.p);
        let (z_new, du) = if transpose { (z + zeta, zeta) } else { (z - zeta, zeta) };
        let p = self.eos.pressure_from_z(z_new);
        // u_r - u_l = ζ for either family
        let u = match (dir, transpose) {
            (Direction::Backward, false) | (Direction::Forward, true) => w.u + du,
            (Direction::Backward, true) | (Direction::Forward, false) => w.u - du,
        };
        State::new(p, u)
    }

    /// Shock of strength `zeta < 0`: behind state from the ahead state, or with
    /// `transpose` the ahead state from the behind state.
    pub fn shock_by_strength(&self, w: State, zeta: f64, dir: Direction, transpose: bool) -> Result<State> {
        if zeta > 0.0 {
            return Err(MftError::NotAdmissible(format!("shock strength {zeta} > 0")));
        }
        if zeta == 0.0 {
            return Ok(w);
        }
        let e = &self.eos;
        let law = ShockLaw::Isentropic;
        let build = |a: State, pb: f64| -> State {
            let (du, _) = velocity_jump(e, law, a.p, pb, Branch::Shock);
            match dir {
                Direction::Backward => State::new(pb, a.u + du),
                Direction::Forward => State::new(pb, a.u - du),
            }
        };
        if !transpose {
            let g = |pb: f64| 0.5 * (e.z_diff(w.p, pb) + velocity_jump(e, law, w.p, pb, Branch::Shock).0) - zeta;
            let mut hi = 2.0 * w.p;
            while g(hi) > 0.0 {
                hi *= 4.0;
            }
            let pb = bisect(g, w.p, hi, 1e-15, 200)?;
            Ok(build(w, pb))
        } else {
            let g = |pa: f64| 0.5 * (e.z_diff(pa, w.p) + velocity_jump(e, law, pa, w.p, Branch::Shock).0) - zeta;
            let mut lo = 0.5 * w.p;
            while g(lo) > 0.0 {
                lo *= 0.25;
                if lo < 1e-300 {
                    return Err(MftError::Vacuum("no ahead state for shock strength".into()));
                }
            }
            let pa = bisect(g, lo, w.p, 1e-15, 400)?;
            // ahead state: invert u_b = u_a ± du
            let (du, _) = velocity_jump(e, law, pa, w.p, Branch::Shock);
            let ua = match dir {
                Direction::Backward => w.u - du,
                Direction::Forward => w.u + du,
            };
            Ok(State::new(pa, ua))
        }
    }

    pub fn solve_grp(&self, wl: State, wr: State, widths: (f64, f64)) -> Result<GrpSolution> {
        let force = [widths.0 > 0.0, widths.1 > 0.0];
        let (pm, um) = solve_middle(ShockLaw::Isentropic, wl, &self.eos, wr, &self.eos, force)?;
        let wm = State::new(pm, um);
        let mut kinds = Vec::with_capacity(2);
        let mut strengths = Vec::with_capacity(2);
        for (dir, l, r, f) in [(Direction::Backward, wl, wm, force[0]), (Direction::Forward, wm, wr, force[1])] {
            let (a, b) = dir.ahead_behind(l, r);
            if l == r {
                kinds.push(None);
                strengths.push(0.0);
            } else {
                kinds.push(Some(acoustic_kind(branch_for(f, a.p, b.p), a.p, b.p)));
                strengths.push(strength_of(&self.eos, dir, l, r));
            }
        }
        Ok(GrpSolution { states: vec![wl, wm, wr], kinds, strengths })
    }

    /// Least-squares speed, preconditioned residual and `β` of a simple-wave
    /// jump; a shock gets its exact speed and zero residual.
    pub fn ls_speed_residual(&self, l: State, r: State, dir: Direction) -> Result<(f64, [f64; 2], f64)> {
        let (a, b) = dir.ahead_behind(l, r);
        if !self.on_curve(l, r, dir, Branch::Simple) {
            if b.p > a.p && self.on_curve(l, r, dir, Branch::Shock) {
                let (_, sigma) = self.shock_to(a, b.p, dir)?;
                return Ok((sigma, [0.0, 0.0], 1.0));
            }
            return Err(MftError::NotOnCurve(format!("{l:?} -> {r:?}")));
        }
        let av = self.eos.averages(l.p, r.p)?;
        let sgn = dir.sign();
        let speed = sgn * (av.beta + 1.0) / (2.0 * av.inv_c);
        let h = 0.5 * (r.p - l.p) * (av.beta - 1.0);
        Ok((speed, [sgn * h, -h], av.beta))
    }

    fn wave_state_pair(&self, w: &Wave) -> (State, State) {
        (w.left, w.right)
    }

    /// Outgoing wave strengths `[backward, forward]` of an interaction between
    /// two adjacent waves meeting at time `t`, with widths assigned by the
    /// nonincreasing-width rules.
    pub fn interact_pair(&self, left: &Wave, right: &Wave, t: f64) -> Result<GrpSolution> {
        let (wl, _) = self.wave_state_pair(left);
        let (_, wr) = self.wave_state_pair(right);
        let widths = crate::grp::emergent_widths(2, None, &[left, right], t);
        self.solve_grp(wl, wr, (widths[0], widths[1]))
    }

    /// Riemann solution at the focus of a collapsing compression.
    pub fn collapse_compression(&self, w: &Wave) -> Result<GrpSolution> {
        self.solve_grp(w.left, w.right, (0.0, 0.0))
    }
}
