//! One facade over the p-system (`n = 2`) and gas dynamics (`n = 3`) so the
//! discretization layer and the engine are written once.
//!
//! Family indices: `0` backward, `n - 1` forward, `1` the contact when `n = 3`.

use serde::{Deserialize, Serialize};

use crate::eos::GammaLaw;
use crate::error::{MftError, Result};
use crate::euler::Euler;
use crate::model::{sub3, EosParams, PreconditionerTag, SchemeConfig, State, SystemKind, Vec3, WaveKind};
use crate::psystem::{solve_middle, strength_of, Direction, GrpSolution, PSystem, ShockLaw};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct System {
    pub kind: SystemKind,
    pub gamma: f64,
    /// Entropy constant of the p-system; gas dynamics uses `exp(s)` instead.
    pub k: f64,
}

impl System {
    pub fn new(kind: SystemKind, eos: EosParams) -> Self {
        System { kind, gamma: eos.gamma, k: eos.k }
    }

    pub fn psystem(gamma: f64, k: f64) -> Self {
        System { kind: SystemKind::PSystem, gamma, k }
    }

    pub fn euler(gamma: f64) -> Self {
        System { kind: SystemKind::Euler, gamma, k: 1.0 }
    }

    pub fn from_config(cfg: &SchemeConfig) -> Self {
        System::new(cfg.system, cfg.eos)
    }

    pub fn n(&self) -> usize {
        match self.kind {
            SystemKind::PSystem => 2,
            SystemKind::Euler => 3,
        }
    }

    pub fn forward(&self) -> usize {
        self.n() - 1
    }

    pub fn direction(&self, family: usize) -> Option<Direction> {
        if family == 0 {
            Some(Direction::Backward)
        } else if family == self.forward() {
            Some(Direction::Forward)
        } else {
            None
        }
    }

    pub fn is_contact(&self, family: usize) -> bool {
        self.direction(family).is_none()
    }

    pub fn eos(&self, w: &State) -> GammaLaw {
        match self.kind {
            SystemKind::PSystem => GammaLaw::new(self.gamma, self.k),
            SystemKind::Euler => GammaLaw::at_entropy(self.gamma, w.s),
        }
    }

    pub fn volume(&self, w: &State) -> f64 {
        self.eos(w).v(w.p)
    }

    /// Lagrangian characteristic speed of `family` at `w`.
    pub fn lambda(&self, family: usize, w: &State) -> f64 {
        match self.direction(family) {
            Some(d) => d.sign() * self.eos(w).c(w.p),
            None => 0.0,
        }
    }

    pub fn max_speed(&self, w: &State) -> f64 {
        self.eos(w).c(w.p)
    }

    pub fn q(&self, w: &State) -> Vec3 {
        match self.kind {
            SystemKind::PSystem => [-self.volume(w), w.u, 0.0],
            SystemKind::Euler => Euler::new(self.gamma).q(w),
        }
    }

    pub fn f(&self, w: &State) -> Vec3 {
        match self.kind {
            SystemKind::PSystem => [w.u, w.p, 0.0],
            SystemKind::Euler => Euler::new(self.gamma).f(w),
        }
    }

    /// Middle pressure and velocity of the plain Riemann problem.
    pub fn middle(&self, wl: State, wr: State) -> Result<(f64, f64)> {
        let law = match self.kind {
            SystemKind::PSystem => ShockLaw::Isentropic,
            SystemKind::Euler => ShockLaw::Hugoniot,
        };
        solve_middle(law, wl, &self.eos(&wl), wr, &self.eos(&wr), [false; 2])
    }

    /// Inverse of `q`; fails at vacuum.
    pub fn state_from_q(&self, q: Vec3) -> Result<State> {
        let v = -q[0];
        if !(v > 0.0) {
            return Err(MftError::Vacuum(format!("specific volume {v}")));
        }
        match self.kind {
            SystemKind::PSystem => Ok(State::new(self.k * v.powf(-self.gamma), q[1])),
            SystemKind::Euler => {
                let e = q[2] - 0.5 * q[1] * q[1];
                if !(e > 0.0) {
                    return Err(MftError::Vacuum(format!("internal energy {e}")));
                }
                let p = (self.gamma - 1.0) * e / v;
                Ok(State::with_entropy(p, q[1], (p * v.powf(self.gamma)).ln()))
            }
        }
    }

    pub fn solve_grp(&self, wl: State, wr: State, widths: &[f64]) -> Result<GrpSolution> {
        match self.kind {
            SystemKind::PSystem => PSystem::new(self.gamma, self.k).solve_grp(wl, wr, (widths[0], widths[1])),
            SystemKind::Euler => Euler::new(self.gamma).solve_grp_3(wl, wr, [widths[0], 0.0, widths[2]]),
        }
    }

    /// Signed strength: the change of the opposite Riemann invariant for
    /// acoustic waves, the entropy jump for contacts.
    pub fn strength(&self, family: usize, l: &State, r: &State) -> f64 {
        match self.direction(family) {
            Some(d) => {
                let (a, _) = d.ahead_behind(*l, *r);
                strength_of(&self.eos(&a), d, *l, *r)
            }
            None => r.s - l.s,
        }
    }

    pub fn preconditioner(&self) -> PreconditionerTag {
        match self.kind {
            SystemKind::PSystem => PreconditionerTag::PSystemAR,
            SystemKind::Euler => PreconditionerTag::EulerAR,
        }
    }

    /// `([q], [f])` across a jump, with cancellation-free volume differences.
    pub fn jumps(&self, l: &State, r: &State) -> (Vec3, Vec3) {
        let du = r.u - l.u;
        let dp = r.p - l.p;
        let neg_dv = if l.s == r.s {
            self.eos(l).v_diff(l.p, r.p)
        } else {
            self.volume(l) - self.volume(r)
        };
        match self.kind {
            SystemKind::PSystem => ([neg_dv, du, 0.0], [du, dp, 0.0]),
            SystemKind::Euler => {
                let ubar = 0.5 * (l.u + r.u);
                let pbar = 0.5 * (l.p + r.p);
                let de = (r.p * self.volume(r) - l.p * self.volume(l)) / (self.gamma - 1.0);
                ([neg_dv, du, ubar * du + de], [du, dp, ubar * dp + pbar * du])
            }
        }
    }

    /// `(A[q], A[f])` for the given preconditioner.
    pub fn preconditioned_jumps(&self, tag: PreconditionerTag, l: &State, r: &State) -> (Vec3, Vec3) {
        let (q, f) = self.jumps(l, r);
        match tag {
            PreconditionerTag::Identity => (q, f),
            PreconditionerTag::PSystemAR | PreconditionerTag::EulerAR => {
                let a = match self.eos(l).averages(l.p, r.p) {
                    Ok(av) => av.inv_c / av.inv_c2,
                    Err(_) => 1.0,
                };
                let mut qa = [a * q[0], q[1], q[2]];
                let mut fa = [a * f[0], f[1], f[2]];
                if tag == PreconditionerTag::EulerAR {
                    // energy row minus p̄·(mass row) + ū·(momentum row)
                    let pbar = 0.5 * (l.p + r.p);
                    let de = (r.p * self.volume(r) - l.p * self.volume(l)) / (self.gamma - 1.0);
                    qa[2] = de - pbar * q[0];
                    fa[2] = 0.0;
                }
                (qa, fa)
            }
        }
    }

    /// Exact Rankine–Hugoniot speed of a shock or contact.
    pub fn shock_speed(&self, l: &State, r: &State) -> f64 {
        let (q, f) = self.jumps(l, r);
        if q[0] == 0.0 {
            return 0.0;
        }
        f[0] / q[0]
    }

    /// Least-squares speed of a simple-wave jump, exact speed of a shock or
    /// contact.
    pub fn jump_speed(&self, kind: WaveKind, l: &State, r: &State) -> f64 {
        match kind {
            WaveKind::Contact => 0.0,
            WaveKind::Shock => self.shock_speed(l, r),
            _ => {
                let (q, f) = self.preconditioned_jumps(self.preconditioner(), l, r);
                crate::grp::ls_speed_generic(q, f).map(|x| x.0).unwrap_or(0.0)
            }
        }
    }

    /// Preconditioned residual `A([f] - s[q])`.
    pub fn residual(&self, l: &State, r: &State, s: f64) -> Vec3 {
        let (q, f) = self.preconditioned_jumps(self.preconditioner(), l, r);
        [f[0] - s * q[0], f[1] - s * q[1], f[2] - s * q[2]]
    }

    /// Unpreconditioned residual `[f] - s[q]`.
    pub fn raw_residual(&self, l: &State, r: &State, s: f64) -> Vec3 {
        let (q, f) = self.jumps(l, r);
        sub3(f, [s * q[0], s * q[1], s * q[2]])
    }

    /// Right state of a simple-wave piece of strength `piece` starting at `w`.
    pub fn simple_step(&self, family: usize, w: &State, piece: f64) -> State {
        let eos = self.eos(w);
        let z = eos.z(w.p);
        let dir = self.direction(family).expect("acoustic family");
        let zr = match dir {
            Direction::Forward => z + piece,
            Direction::Backward => z - piece,
        };
        State::with_entropy(eos.pressure_from_z(zr), w.u + piece, w.s)
    }

    /// State inside the centered simple wave `l -> r` where the characteristic
    /// speed equals `lambda` (clamped to the wave's range).
    pub fn fan_state(&self, family: usize, l: &State, r: &State, lambda: f64) -> State {
        let dir = self.direction(family).expect("acoustic family");
        let eos = self.eos(l);
        let p = eos.pressure_from_impedance(lambda * dir.sign());
        let p = p.clamp(l.p.min(r.p), l.p.max(r.p));
        let dz = eos.z_diff(p, l.p);
        let u = match dir {
            Direction::Forward => l.u + dz,
            Direction::Backward => l.u - dz,
        };
        State::with_entropy(p, u, l.s)
    }

    /// Eulerian speed `ū + v̄ a` of a jump moving with Lagrangian speed `a`.
    pub fn eulerian_speed(&self, l: &State, r: &State, a: f64) -> f64 {
        0.5 * (l.u + r.u) + 0.5 * (self.volume(l) + self.volume(r)) * a
    }
}
