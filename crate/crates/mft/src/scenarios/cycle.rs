//! The periodic cycle of states behind alternating backward rarefactions and
//! shocks crossing a forward simple wave, and its closure bifurcation in ζ.
//!
//! Curves are taken in (z, u): `W_∓` are simple waves, `S_∓` shocks, and a
//! superscript `T` means the curve is traversed from the behind state.

use serde::Serialize;

use crate::error::{MftError, Result};
use crate::init_recon::InitialData;
use crate::model::State;
use crate::numerics::{bisect, loglog_slope};
use crate::psystem::{Branch, Direction, PSystem};

use Direction::{Backward, Forward};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IdentityTerms {
    pub zeta_25: f64,
    pub zeta_23: f64,
    pub beta: f64,
    pub zeta_04: f64,
}

impl IdentityTerms {
    pub fn sum(&self) -> f64 {
        self.zeta_25 + self.zeta_23 + self.beta - self.zeta_04
    }
}

/// Far-left state feeding both backward shocks of a closed cycle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LeftState {
    pub w_l: State,
    pub z_l: f64,
    pub alpha: f64,
    /// `|ζ(w_L, w_0) + (1 + α)ζ|`, zero when the pair is consistent.
    pub defect: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CycleReport {
    pub gamma: f64,
    pub k: f64,
    pub z0: f64,
    pub zeta: f64,
    pub beta: f64,
    /// `w_0 … w_5` in index order.
    pub states: [State; 6],
    pub z5_minus_z0: f64,
    pub closed: bool,
    pub identity: IdentityTerms,
    pub left: Option<LeftState>,
}

impl CycleReport {
    pub fn w(&self, i: usize) -> State {
        self.states[i]
    }
}

fn shock_jump(ps: &PSystem, pa: f64, pb: f64) -> f64 {
    ((pb - pa) * ps.eos.v_diff(pa, pb)).sqrt()
}

fn shock_strength(ps: &PSystem, pa: f64, pb: f64) -> f64 {
    0.5 * (ps.eos.z_diff(pa, pb) - shock_jump(ps, pa, pb))
}

fn zu(ps: &PSystem, w: &State) -> f64 {
    ps.eos.z(w.p) - w.u
}

/// `β` with `(z - u)(S_+(w_4, -β)) = (z - u)(w_1)`: a log-grid scan for the
/// first sign change, then bisection.
fn solve_beta(ps: &PSystem, w1: State, w4: State) -> Result<f64> {
    let target = zu(ps, &w1);
    let g = |b: f64| -> f64 {
        match ps.shock_by_strength(w4, -b, Forward, false) {
            Ok(w2) => zu(ps, &w2) - target,
            Err(_) => f64::NAN,
        }
    };
    let n = 400;
    let grid: Vec<f64> = (0..n).map(|i| 10f64.powf(-8.0 + 12.0 * i as f64 / (n - 1) as f64)).collect();
    let mut prev = (grid[0], g(grid[0]));
    for &b in &grid[1..] {
        let v = g(b);
        if v.is_finite() && prev.1.is_finite() && v.signum() != prev.1.signum() {
            return bisect(g, prev.0, b, 1e-15, 300);
        }
        prev = (b, v);
    }
    Err(MftError::NoConvergence(format!("no β bracket for w_1 = {w1:?}")))
}

/// Solves for `p_L < p_5` with both `w_0` and `w_5` behind backward shocks
/// out of `w_L`, and the split `α` of the reflected strength.
fn solve_left(ps: &PSystem, w0: State, w5: State, zeta: f64) -> Option<LeftState> {
    let du = w0.u - w5.u;
    let g = |pl: f64| shock_jump(ps, pl, w5.p) - shock_jump(ps, pl, w0.p) - du;
    let pl = bisect(g, 1e-14 * w5.p, w5.p * (1.0 - 1e-14), 1e-15, 400).ok()?;
    let alpha = -shock_strength(ps, pl, w5.p) / zeta;
    let w_l = State::new(pl, w0.u + shock_jump(ps, pl, w0.p));
    let defect = (shock_strength(ps, pl, w0.p) + (1.0 + alpha) * zeta).abs();
    Some(LeftState { w_l, z_l: ps.eos.z(pl), alpha, defect })
}

pub fn build_cycle(z0: f64, zeta: f64, gamma: f64, k: f64) -> Result<CycleReport> {
    if !(zeta > 0.0 && zeta < z0) {
        return Err(MftError::Config(format!("cycle needs 0 < ζ < z_0, got ζ = {zeta}, z_0 = {z0}")));
    }
    let ps = PSystem::new(gamma, k);
    let w0 = State::new(ps.eos.pressure_from_z(z0), 0.0);
    let w1 = ps.simple_by_strength(w0, zeta, Backward, false);
    let w4 = ps.shock_by_strength(w1, -zeta, Backward, false)?;
    let beta = solve_beta(&ps, w1, w4)?;
    let w2 = ps.shock_by_strength(w4, -beta, Forward, false)?;
    let w3 = ps.simple_by_strength(w2, zeta, Backward, true);
    let w5 = ps.shock_by_strength(w3, -zeta, Backward, true)?;
    let z = |w: &State| ps.eos.z(w.p);
    let identity = IdentityTerms {
        zeta_25: z(&w5) - z(&w2),
        zeta_23: z(&w2) - z(&w3),
        beta: z(&w3) - z(&w4),
        zeta_04: z(&w0) - z(&w4),
    };
    let d = z(&w5) - z0;
    let closed = d < 0.0;
    let left = if closed { solve_left(&ps, w0, w5, zeta) } else { None };
    Ok(CycleReport {
        gamma,
        k,
        z0,
        zeta,
        beta,
        states: [w0, w1, w2, w3, w4, w5],
        z5_minus_z0: d,
        closed,
        identity,
        left,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalStrength {
    pub zeta_star: f64,
    /// Every scan interval where `z_5 - z_0` changed sign; more than one
    /// means the bracket was not unique and the first was refined.
    pub sign_changes: Vec<(f64, f64)>,
}

/// Smallest closing strength: a 200-point sign scan of `z_5(ζ) - z_0` over
/// `(0, z_0)`, refined by bisection to relative tolerance 1e-10.
pub fn critical_strength(z0: f64, gamma: f64, k: f64) -> Result<CriticalStrength> {
    let d = |zeta: f64| build_cycle(z0, zeta, gamma, k).map(|c| c.z5_minus_z0);
    let n = 200;
    let grid: Vec<f64> = (1..=n).map(|i| z0 * i as f64 / (n + 1) as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&z| d(z)).collect::<Result<_>>()?;
    let sign_changes: Vec<(f64, f64)> = (1..n)
        .filter(|&i| vals[i - 1].signum() != vals[i].signum())
        .map(|i| (grid[i - 1], grid[i]))
        .collect();
    let &(lo, hi) = sign_changes
        .first()
        .ok_or_else(|| MftError::NoBracket(format!("z_5 - z_0 keeps one sign on (0, {z0})")))?;
    let zeta_star = bisect(|z| d(z).unwrap_or(f64::NAN), lo, hi, 1e-10, 200)?;
    Ok(CriticalStrength { zeta_star, sign_changes })
}

/// Fitted exponent of `β(ζ)` over the given strengths.
pub fn beta_exponent(z0: f64, gamma: f64, k: f64, zetas: &[f64]) -> Result<f64> {
    let betas: Vec<f64> = zetas.iter().map(|&z| build_cycle(z0, z, gamma, k).map(|c| c.beta)).collect::<Result<_>>()?;
    Ok(loglog_slope(zetas, &betas))
}

/// `|σ| / c(p_L)` of the backward shock out of `w_L` in a closed cycle.
pub fn mach_proxy(cycle: &CycleReport) -> Option<f64> {
    let left = cycle.left?;
    let ps = PSystem::new(cycle.gamma, cycle.k);
    let (pl, p0) = (left.w_l.p, cycle.w(0).p);
    let sigma = ((p0 - pl) / ps.eos.v_diff(pl, p0)).sqrt();
    Some(sigma / ps.eos.c(pl))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CycleLayout {
    pub periods: usize,
    pub period_width: f64,
    /// Position of the leading backward shock.
    pub start: f64,
    pub domain: (f64, f64),
}

impl Default for CycleLayout {
    fn default() -> Self {
        CycleLayout { periods: 8, period_width: 0.1, start: 0.1, domain: (0.0, 1.0) }
    }
}

/// Which curve joins consecutive states of the cyclic pattern; `led` when the
/// pattern starts with the leading backward shock out of `w_L`.
pub fn cyclic_joins(n_states: usize, led: bool) -> Vec<(Direction, Branch)> {
    let period = [(Backward, Branch::Simple), (Forward, Branch::Simple), (Backward, Branch::Shock), (Forward, Branch::Simple)];
    let lead = led.then_some((Backward, Branch::Shock));
    lead.into_iter().chain(period.iter().copied().cycle()).take(n_states.saturating_sub(1)).collect()
}

/// `w_L` (closed cycles only), then `periods` repetitions of `w_0 w_1 w_5 w_3`.
pub fn cyclic_states(cycle: &CycleReport, periods: usize) -> Vec<State> {
    let period = [cycle.w(0), cycle.w(1), cycle.w(5), cycle.w(3)];
    cycle.left.map(|l| l.w_l).into_iter().chain((0..periods).flat_map(|_| period)).collect()
}

/// Piecewise-constant cyclic data with equal quarter-period cells.
pub fn cyclic_initial_data(cycle: &CycleReport, layout: &CycleLayout) -> Result<InitialData> {
    let states = cyclic_states(cycle, layout.periods);
    let h = layout.period_width / 4.0;
    let cuts: Vec<f64> = (0..states.len() - 1).map(|i| layout.start + i as f64 * h).collect();
    InitialData::piecewise_constant(&cuts, &states, layout.domain)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn states_lie_on_their_curves() {
        let c = build_cycle(1.0, 0.5, 1.4, 1.0).unwrap();
        let ps = PSystem::new(1.4, 1.0);
        let w = |i| c.w(i);
        assert!(ps.on_curve(w(0), w(1), Backward, Branch::Simple));
        assert!(ps.on_curve(w(1), w(4), Backward, Branch::Shock));
        assert!(ps.on_curve(w(2), w(4), Forward, Branch::Shock));
        assert!(ps.on_curve(w(2), w(3), Backward, Branch::Simple));
        assert!(ps.on_curve(w(5), w(3), Backward, Branch::Shock));
        assert!(ps.on_curve(w(1), w(5), Forward, Branch::Simple));
        assert!(ps.on_curve(w(3), w(0), Forward, Branch::Simple));
    }

    #[test]
    fn identity_and_small_strength() {
        let c = build_cycle(1.0, 0.01, 1.4, 1.0).unwrap();
        assert!(!c.closed && c.z5_minus_z0 > 0.0);
        assert!((c.identity.sum() - c.z5_minus_z0).abs() < 1e-10);
    }

    #[test]
    fn closed_cycle_has_left_state() {
        let cs = critical_strength(1.0, 1.4, 1.0).unwrap();
        let c = build_cycle(1.0, cs.zeta_star * 1.01, 1.4, 1.0).unwrap();
        assert!(c.closed);
        let l = c.left.unwrap();
        assert!(l.alpha > 0.0 && l.w_l.p < c.w(5).p);
        let states = cyclic_states(&c, 3);
        let ps = PSystem::new(1.4, 1.0);
        let joins = cyclic_joins(states.len(), true);
        assert_eq!(joins.len(), 12);
        for (pair, (dir, branch)) in states.windows(2).zip(joins) {
            assert!(ps.on_curve(pair[0], pair[1], dir, branch), "{pair:?} {dir:?} {branch:?}");
        }
        let data = cyclic_initial_data(&c, &CycleLayout::default()).unwrap();
        assert_eq!(data.xs.len(), 2 * 33);
    }
}
