//! System-generic discretization of generalized Riemann solutions: centering
//! from widths, least-squares speeds, rarefaction splitting and the ordered
//! jump list (dgRS) emanating from an interaction point.

use crate::error::{MftError, Result};
use crate::model::{dot3, norm3, SchemeConfig, State, Vec3, Wave, WaveKind};
use crate::psystem::GrpSolution;
use crate::system::System;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CenteredWaveSpec {
    pub xc: f64,
    pub tc: f64,
    pub width: f64,
    /// Focus in the future of the reference time.
    pub compression: bool,
}

/// Center of a simple wave of width `w` whose left edge sits at `x_ref` at
/// time `t_ref`, with edge characteristic speeds `lam_minus` (left) and
/// `lam_plus` (right).
pub fn center_wave(lam_minus: f64, lam_plus: f64, w: f64, x_ref: f64, t_ref: f64) -> Result<CenteredWaveSpec> {
    let d = lam_minus - lam_plus;
    if d == 0.0 {
        return Err(MftError::DegenerateWidth);
    }
    let tau = w / d;
    Ok(CenteredWaveSpec { xc: x_ref + lam_minus * tau, tc: t_ref + tau, width: w, compression: tau > 0.0 })
}

/// `s_* = q̂·f̂ / q̂·q̂` and `R_* = f̂ - s_* q̂`.
pub fn ls_speed_generic(q: Vec3, f: Vec3) -> Result<(f64, Vec3)> {
    let qq = dot3(q, q);
    if qq == 0.0 {
        if dot3(f, f) == 0.0 {
            return Ok((0.0, [0.0; 3]));
        }
        return Err(MftError::ZeroJump);
    }
    let s = dot3(q, f) / qq;
    Ok((s, [f[0] - s * q[0], f[1] - s * q[1], f[2] - s * q[2]]))
}

/// `|f̂ - s q̂|`, equal to `sqrt(|R_*|² + (s - s_*)² |q̂|²)`.
pub fn residual_at(q: Vec3, f: Vec3, s: f64) -> f64 {
    norm3([f[0] - s * q[0], f[1] - s * q[1], f[2] - s * q[2]])
}

/// Odd, symmetric partition of `zeta` into pieces in `[κ ε_r, ε_r]` with the
/// middle pieces as large as possible.
pub fn split_rarefaction(zeta: f64, eps_r: f64, kappa: f64) -> Result<Vec<f64>> {
    if zeta <= eps_r {
        return Ok(vec![zeta]);
    }
    let floor = kappa * eps_r;
    let mut n = (zeta / eps_r).ceil() as usize;
    if n.is_multiple_of(2) {
        n += 1;
    }
    if n as f64 * floor > zeta || n as f64 * eps_r < zeta {
        return Err(MftError::Infeasible(format!("ζ = {zeta}, ε_r = {eps_r}, κ = {kappa}")));
    }
    let m = n / 2;
    let mut pieces = vec![floor; n];
    let mut rem = zeta - n as f64 * floor;
    let room = eps_r - floor;
    let add = rem.min(room);
    pieces[m] += add;
    rem -= add;
    for i in 1..=m {
        if rem <= 0.0 {
            break;
        }
        let add = rem.min(2.0 * room);
        pieces[m - i] += 0.5 * add;
        pieces[m + i] += 0.5 * add;
        rem -= add;
    }
    Ok(pieces)
}

/// Widths of the waves emerging from an interaction of `incident` waves at
/// time `t`: never larger than the incident widths of the same family, zero
/// after a shock, zero for contacts.
pub fn emergent_widths(n: usize, contact: Option<usize>, incident: &[&Wave], t: f64) -> Vec<f64> {
    let all_max = incident.iter().map(|w| w.width_at(t)).fold(0.0, f64::max);
    (0..n)
        .map(|k| {
            if Some(k) == contact {
                return 0.0;
            }
            let same: Vec<&&Wave> = incident.iter().filter(|w| w.family == k).collect();
            if same.iter().any(|w| w.kind == WaveKind::Shock) {
                0.0
            } else if same.is_empty() {
                all_max
            } else {
                same.iter().map(|w| w.width_at(t)).fold(f64::INFINITY, f64::min)
            }
        })
        .collect()
}

/// One jump of a discretized generalized Riemann solution.
#[derive(Clone, Debug, PartialEq)]
pub struct Jump {
    pub family: usize,
    pub kind: WaveKind,
    pub strength: f64,
    pub left: State,
    pub right: State,
    pub speed: f64,
    /// `λ_k(right) - λ_k(left)`.
    pub rate: f64,
}

impl Jump {
    pub fn new(sys: &System, family: usize, kind: WaveKind, left: State, right: State) -> Jump {
        let strength = sys.strength(family, &left, &right);
        let speed = sys.jump_speed(kind, &left, &right);
        let rate = sys.lambda(family, &right) - sys.lambda(family, &left);
        Jump { family, kind, strength, left, right, speed, rate }
    }

    pub fn residual_norm(&self, sys: &System) -> f64 {
        norm3(sys.residual(&self.left, &self.right, self.speed))
    }
}

/// Pieces of a rarefaction `l -> r` of strength `zeta`, with exact states; the
/// last piece ends exactly at `r`.
pub fn split_states(sys: &System, family: usize, l: State, r: State, pieces: &[f64]) -> Vec<(State, State)> {
    let mut out = Vec::with_capacity(pieces.len());
    let mut cur = l;
    for (i, &z) in pieces.iter().enumerate() {
        let next = if i + 1 == pieces.len() { r } else { sys.simple_step(family, &cur, z) };
        out.push((cur, next));
        cur = next;
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dgrs {
    pub jumps: Vec<Jump>,
    /// Earliest collapse time after the interaction among emergent
    /// compressions, given their widths; `+∞` if none.
    pub t_sharp: f64,
}

impl Dgrs {
    pub fn residual_norm(&self, sys: &System) -> f64 {
        self.jumps.iter().map(|j| j.residual_norm(sys)).sum()
    }
}

/// Jumps of a solved gRP in increasing order of speed; rarefactions stronger
/// than `ε^{e_r}` are split.
pub fn build_dgrs(sys: &System, sol: &GrpSolution, widths: &[f64], cfg: &SchemeConfig) -> Result<Dgrs> {
    let mut jumps = Vec::new();
    let mut t_sharp = f64::INFINITY;
    for k in 0..sys.n() {
        let Some(kind) = sol.kinds[k] else { continue };
        let (l, r) = (sol.states[k], sol.states[k + 1]);
        let zeta = sol.strengths[k];
        if kind == WaveKind::Rarefaction && zeta > cfg.eps_r() {
            let pieces = split_rarefaction(zeta, cfg.eps_r(), cfg.kappa)?;
            for (a, b) in split_states(sys, k, l, r, &pieces) {
                jumps.push(Jump::new(sys, k, kind, a, b));
            }
        } else {
            let j = Jump::new(sys, k, kind, l, r);
            if kind == WaveKind::Compression && widths[k] > 0.0 {
                t_sharp = t_sharp.min(widths[k] / -j.rate);
            }
            jumps.push(j);
        }
    }
    Ok(Dgrs { jumps, t_sharp })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PreconditionerTag;
    use crate::numerics::golden_section;

    #[test]
    fn centering_examples() {
        let c = center_wave(3.0, 1.0, 2.0, 0.0, 0.0).unwrap();
        assert_eq!((c.tc, c.xc, c.compression), (1.0, 3.0, true));
        let c = center_wave(1.0, 3.0, 2.0, 0.0, 0.0).unwrap();
        assert_eq!((c.tc, c.xc, c.compression), (-1.0, -1.0, false));
        let d = center_wave(1.0, 3.0, 4.0, 0.0, 0.0).unwrap();
        assert_eq!((d.tc, d.xc), (2.0 * c.tc, 2.0 * c.xc));
        assert!(center_wave(1.0, 1.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn generic_ls_examples() {
        let (s, r) = ls_speed_generic([1.0, 2.0, 0.0], [2.0, 4.0, 0.0]).unwrap();
        assert_eq!(s, 2.0);
        assert_eq!(norm3(r), 0.0);
        let (q, f) = ([1.0, 0.0, 0.0], [1.0, 1.0, 0.0]);
        let (s, r) = ls_speed_generic(q, f).unwrap();
        assert_eq!(s, 1.0);
        assert!((norm3(r) - 1.0).abs() < 1e-15);
        assert!((residual_at(q, f, 0.0) - 2f64.sqrt()).abs() < 1e-15);
        for i in 0..10 {
            let s = -2.0 + 0.5 * i as f64;
            assert!((residual_at(q, f, s) - (1.0 + (s - 1.0).powi(2)).sqrt()).abs() < 1e-12);
        }
        let m = golden_section(|s| residual_at(q, f, s), -5.0, 5.0, 1e-12);
        assert!((m - 1.0).abs() < 1e-6);
        assert!(matches!(ls_speed_generic([0.0; 3], f), Err(MftError::ZeroJump)));
    }

    #[test]
    fn split_examples() {
        let p = split_rarefaction(0.25, 0.1, 0.3).unwrap();
        assert_eq!(p.len(), 3);
        assert!((p[0] - 0.075).abs() < 1e-15 && (p[1] - 0.1).abs() < 1e-15 && (p[2] - 0.075).abs() < 1e-15);
        let p = split_rarefaction(0.1 + 1e-12, 0.1, 0.25).unwrap();
        assert_eq!(p.len(), 3);
        assert!(p.iter().all(|&x| (0.025 - 1e-15..=0.1).contains(&x)));
        assert_eq!(split_rarefaction(0.05, 0.1, 0.25).unwrap(), vec![0.05]);
    }

    #[test]
    fn dgrs_of_two_shocks_and_a_rarefaction() {
        let cfg = SchemeConfig::default();
        let sys = System::psystem(2.0, 1.0);
        let sol = sys.solve_grp(State::new(1.0, 0.0), State::new(1.0, -2.0), &[0.0, 0.0]).unwrap();
        let d = build_dgrs(&sys, &sol, &[0.0, 0.0], &cfg).unwrap();
        assert_eq!(d.jumps.len(), 2);
        assert!(d.residual_norm(&sys) < 1e-12);
        assert!(d.jumps[0].speed < 0.0 && d.jumps[1].speed > 0.0);

        let l = State::new(1.0, 0.0);
        let r = sys.simple_step(1, &l, 0.25);
        let sol = sys.solve_grp(l, r, &[0.0, 0.0]).unwrap();
        let d = build_dgrs(&sys, &sol, &[0.0, 0.0], &cfg).unwrap();
        assert_eq!(d.jumps.len(), 3);
        let mut total = 0.0;
        for (i, j) in d.jumps.iter().enumerate() {
            let (a, b) = (sys.lambda(1, &j.left), sys.lambda(1, &j.right));
            assert!(j.speed > a && j.speed < b);
            if i > 0 {
                assert!(j.speed > d.jumps[i - 1].speed);
            }
            let (q, f) = sys.preconditioned_jumps(PreconditionerTag::PSystemAR, &j.left, &j.right);
            total += residual_at(q, f, j.speed);
        }
        assert!((total - d.residual_norm(&sys)).abs() < 1e-12);
        assert_eq!(d.jumps[2].right, r);
    }
}
