//! Lagrangian gas dynamics with a γ-law gas, `K(s) = exp(s)`.
//!
//! Conserved/flux maps in mass coordinates: `q = (-v, u, u²/2 + e)`,
//! `f = (u, p, u p)`. Acoustic waves reuse the p-system curve machinery with
//! the Hugoniot volume law; contacts carry a pure entropy jump.

use serde::{Deserialize, Serialize};

use crate::eos::GammaLaw;
use crate::error::{MftError, Result};
use crate::model::{State, Vec3, WaveKind};
use crate::psystem::{
    acoustic_kind, branch_for, solve_middle, strength_of, velocity_jump, Branch, Direction, GrpSolution, ShockLaw,
};

pub type Mat3 = [[f64; 3]; 3];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Euler {
    pub gamma: f64,
}

impl Euler {
    pub fn new(gamma: f64) -> Self {
        Euler { gamma }
    }

    pub fn eos(&self, w: &State) -> GammaLaw {
        GammaLaw::at_entropy(self.gamma, w.s)
    }

    pub fn volume(&self, w: &State) -> f64 {
        self.eos(w).v(w.p)
    }

    pub fn internal_energy(&self, w: &State) -> f64 {
        w.p * self.volume(w) / (self.gamma - 1.0)
    }

    pub fn q(&self, w: &State) -> Vec3 {
        [-self.volume(w), w.u, 0.5 * w.u * w.u + self.internal_energy(w)]
    }

    pub fn f(&self, w: &State) -> Vec3 {
        [w.u, w.p, w.u * w.p]
    }

    /// Eulerian density, momentum and total energy.
    pub fn q_eulerian(&self, w: &State) -> Vec3 {
        let rho = 1.0 / self.volume(w);
        [rho, rho * w.u, rho * (0.5 * w.u * w.u + self.internal_energy(w))]
    }

    pub fn f_eulerian(&self, w: &State) -> Vec3 {
        let q = self.q_eulerian(w);
        [q[1], q[1] * w.u + w.p, w.u * (q[2] + w.p)]
    }

    /// Jacobians of `q` and `f` with respect to `(p, u, s)`.
    pub fn jacobians(&self, w: &State) -> (Mat3, Mat3) {
        let g = self.gamma;
        let v = self.volume(w);
        let dedp = v / g;
        let deds = w.p * v / (g * (g - 1.0));
        let dq = [[v / (g * w.p), 0.0, -v / g], [0.0, 1.0, 0.0], [dedp, w.u, deds]];
        let df = [[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [w.u, w.p, 0.0]];
        (dq, df)
    }

    /// Generalized eigenpairs of `Df r = λ Dq r`, ordered backward, contact,
    /// forward.
    pub fn eigensystem(&self, w: &State) -> Result<[(f64, Vec3); 3]> {
        w.check()?;
        let c = self.eos(w).c(w.p);
        Ok([(-c, [-1.0, 1.0 / c, 0.0]), (0.0, [0.0, 0.0, 1.0]), (c, [1.0, 1.0 / c, 0.0])])
    }

    pub fn eulerian_eigenvalues(&self, w: &State) -> [f64; 3] {
        let a = (self.gamma * w.p * self.volume(w)).sqrt();
        [w.u - a, w.u, w.u + a]
    }

    /// Behind state of an admissible gas-dynamics shock and its Lagrangian speed.
    pub fn shock_curve_3(&self, wa: State, pb: f64, dir: Direction) -> Result<(State, f64)> {
        if pb <= 0.0 {
            return Err(MftError::Vacuum(format!("behind pressure {pb}")));
        }
        if pb <= wa.p {
            return Err(MftError::NotAdmissible(format!("p_b = {pb} <= p_a = {}", wa.p)));
        }
        let eos = self.eos(&wa);
        let va = eos.v(wa.p);
        let vb = GammaLaw::hugoniot_volume(self.gamma, wa.p, va, pb);
        let sb = (pb * vb.powf(self.gamma)).ln();
        let (du, _) = velocity_jump(&eos, ShockLaw::Hugoniot, wa.p, pb, Branch::Shock);
        let dv = crate::psystem::shock_volume_drop(&eos, ShockLaw::Hugoniot, wa.p, pb);
        let sigma = dir.sign() * ((pb - wa.p) / dv).sqrt();
        let ub = match dir {
            Direction::Backward => wa.u + du,
            Direction::Forward => wa.u - du,
        };
        Ok((State::with_entropy(pb, ub, sb), sigma))
    }

    /// Behind state of a simple wave; entropy is unchanged.
    pub fn simple_curve_3(&self, wa: State, pb: f64, dir: Direction) -> Result<State> {
        if pb <= 0.0 {
            return Err(MftError::Vacuum(format!("behind pressure {pb}")));
        }
        let du = self.eos(&wa).z_diff(wa.p, pb);
        let ub = match dir {
            Direction::Backward => wa.u + du,
            Direction::Forward => wa.u - du,
        };
        Ok(State::with_entropy(pb, ub, wa.s))
    }

    fn behind(&self, wa: State, pb: f64, dir: Direction, branch: Branch, um: f64) -> State {
        match branch {
            Branch::Simple => State::with_entropy(pb, um, wa.s),
            Branch::Shock => {
                let va = self.eos(&wa).v(wa.p);
                let vb = GammaLaw::hugoniot_volume(self.gamma, wa.p, va, pb);
                let _ = dir;
                State::with_entropy(pb, um, (pb * vb.powf(self.gamma)).ln())
            }
        }
    }

    pub fn solve_grp_3(&self, wl: State, wr: State, widths: [f64; 3]) -> Result<GrpSolution> {
        let force = [widths[0] > 0.0, widths[2] > 0.0];
        let (el, er) = (self.eos(&wl), self.eos(&wr));
        let (pm, um) = solve_middle(ShockLaw::Hugoniot, wl, &el, wr, &er, force)?;
        let bl = branch_for(force[0], wl.p, pm);
        let br = branch_for(force[1], wr.p, pm);
        let mut w1 = self.behind(wl, pm, Direction::Backward, bl, um);
        let mut w2 = self.behind(wr, pm, Direction::Forward, br, um);
        // keep trivially unchanged states bitwise identical
        if pm == wl.p && um == wl.u {
            w1 = wl;
        }
        if pm == wr.p && um == wr.u {
            w2 = wr;
        }
        if w1.p == w2.p && w1.u == w2.u && (w1.s - w2.s).abs() == 0.0 {
            w2 = w1;
        }
        let mut kinds = vec![None; 3];
        let mut strengths = vec![0.0; 3];
        if wl != w1 {
            kinds[0] = Some(acoustic_kind(bl, wl.p, pm));
            strengths[0] = strength_of(&el, Direction::Backward, wl, w1);
        }
        if w1 != w2 {
            kinds[1] = Some(WaveKind::Contact);
            strengths[1] = w2.s - w1.s;
        }
        if w2 != wr {
            kinds[2] = Some(acoustic_kind(br, wr.p, pm));
            strengths[2] = strength_of(&er, Direction::Forward, w2, wr);
        }
        Ok(GrpSolution { states: vec![wl, w1, w2, wr], kinds, strengths })
    }

    /// `a^E = ū + v̄ a^L`.
    pub fn to_eulerian_speed(&self, l: &State, r: &State, a_lagrangian: f64) -> f64 {
        let ubar = 0.5 * (l.u + r.u);
        let vbar = 0.5 * (self.volume(l) + self.volume(r));
        ubar + vbar * a_lagrangian
    }

    /// Eulerian jump speed from conservation of mass, `[ρu]/[ρ]`.
    pub fn eulerian_mass_speed(&self, l: &State, r: &State) -> f64 {
        let (ql, qr) = (self.q_eulerian(l), self.q_eulerian(r));
        (qr[1] - ql[1]) / (qr[0] - ql[0])
    }

    /// Eulerian Rankine–Hugoniot residual `|[f^E] - σ[q^E]|` at speed `sigma`.
    pub fn eulerian_rh_residual(&self, l: &State, r: &State, sigma: f64) -> f64 {
        let (ql, qr) = (self.q_eulerian(l), self.q_eulerian(r));
        let (fl, fr) = (self.f_eulerian(l), self.f_eulerian(r));
        (0..3)
            .map(|i| ((fr[i] - fl[i]) - sigma * (qr[i] - ql[i])).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

#[cfg(test)]
#[allow(clippy::approx_constant)] // golden values typed out to their stated digits
mod tests {
    use super::*;
    use crate::psystem::PSystem;

    fn mat_vec(m: &Mat3, x: &Vec3) -> Vec3 {
        [0, 1, 2].map(|i| m[i][0] * x[0] + m[i][1] * x[1] + m[i][2] * x[2])
    }

    #[test]
    fn eigenvalues_gamma2() {
        let e = Euler::new(2.0);
        let w = State::with_entropy(1.0, 0.0, 0.0);
        let ev = e.eigensystem(&w).unwrap();
        assert!((ev[0].0 + 1.41421356).abs() < 1e-8);
        assert_eq!(ev[1].0, 0.0);
        assert!((ev[2].0 - 1.41421356).abs() < 1e-8);
    }

    #[test]
    fn jacobians_match_finite_differences() {
        let e = Euler::new(1.4);
        let w = State::with_entropy(1.7, 0.3, 0.2);
        let (dq, df) = e.jacobians(&w);
        let h = 1e-6;
        for j in 0..3 {
            let mut a = w;
            let mut b = w;
            match j {
                0 => {
                    a.p += h;
                    b.p -= h
                }
                1 => {
                    a.u += h;
                    b.u -= h
                }
                _ => {
                    a.s += h;
                    b.s -= h
                }
            }
            let (qa, qb, fa, fb) = (e.q(&a), e.q(&b), e.f(&a), e.f(&b));
            for i in 0..3 {
                assert!(((qa[i] - qb[i]) / (2.0 * h) - dq[i][j]).abs() < 1e-6);
                assert!(((fa[i] - fb[i]) / (2.0 * h) - df[i][j]).abs() < 1e-6);
            }
        }
        for (lam, r) in e.eigensystem(&w).unwrap() {
            let a = mat_vec(&df, &r);
            let b = mat_vec(&dq, &r);
            for i in 0..3 {
                assert!((a[i] - lam * b[i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn shock_entropy_and_rh() {
        let e = Euler::new(1.4);
        let wa = State::with_entropy(1.0, 0.0, 0.0);
        let (wb, sigma) = e.shock_curve_3(wa, 2.0, Direction::Forward).unwrap();
        assert!(wb.s > 0.0);
        let (l, r) = (wb, wa);
        let (ql, qr, fl, fr) = (e.q(&l), e.q(&r), e.f(&l), e.f(&r));
        for i in 0..3 {
            assert!(((fr[i] - fl[i]) - sigma * (qr[i] - ql[i])).abs() < 1e-10);
        }
    }

    #[test]
    fn contact_only_data() {
        let e = Euler::new(1.4);
        let wl = State::with_entropy(1.0, 0.5, 0.0);
        let wr = State::with_entropy(1.0, 0.5, 0.7);
        let sol = e.solve_grp_3(wl, wr, [0.0; 3]).unwrap();
        assert_eq!(sol.kinds, vec![None, Some(WaveKind::Contact), None]);
        assert!((sol.strengths[1] - 0.7).abs() < 1e-15);
        let same = e.solve_grp_3(wl, wl, [0.0; 3]).unwrap();
        assert_eq!(same.kinds, vec![None, None, None]);
    }

    #[test]
    fn isentropic_rarefactions_match_psystem() {
        let e = Euler::new(1.4);
        let ps = PSystem::new(1.4, 1.0);
        let wl = State::new(1.0, -0.3);
        let wr = State::new(0.8, 0.4);
        let a = e.solve_grp_3(wl, wr, [0.0; 3]).unwrap();
        let b = ps.solve_grp(wl, wr, (0.0, 0.0)).unwrap();
        assert!((a.states[1].p - b.states[1].p).abs() < 1e-10);
        assert_eq!(a.kinds[1], None);
    }

    #[test]
    fn eulerian_speed_of_shock() {
        let e = Euler::new(2.0);
        let ps = PSystem::new(2.0, 1.0);
        let wa = State::new(1.0, 0.0);
        let (wb, sigma) = ps.shock_to(wa, 4.0, Direction::Forward).unwrap();
        let se = e.to_eulerian_speed(&wb, &wa, sigma);
        assert!((se - e.eulerian_mass_speed(&wb, &wa)).abs() < 1e-10);
        let w = State::new(1.0, 1.0);
        let v = e.volume(&w);
        assert!((e.to_eulerian_speed(&w, &w, 2.0 / v * 0.5) - 2.0).abs() < 1e-12);
    }
}
