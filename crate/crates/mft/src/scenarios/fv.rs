//! First-order Godunov reference in mass coordinates, used as an oracle that
//! shares nothing with the front tracker except the exact Riemann solver.
//!
//! In Lagrangian coordinates the backward waves are left-going and the
//! forward waves right-going, so the interface state is always the middle
//! state of the Riemann fan and the flux `f = (u, p, u p)` is unambiguous
//! even across a contact.

use rayon::prelude::*;

use crate::error::Result;
use crate::init_recon::InitialData;
use crate::model::{add3, scale3, sub3, State, Vec3};
use crate::system::System;

#[derive(Clone, Debug, PartialEq)]
pub struct FvSolution {
    pub domain: (f64, f64),
    pub t: f64,
    pub steps: usize,
    pub cells: Vec<State>,
}

impl FvSolution {
    pub fn dx(&self) -> f64 {
        (self.domain.1 - self.domain.0) / self.cells.len() as f64
    }

    /// Cell value containing `x`, clamped to the domain.
    pub fn eval(&self, x: f64) -> State {
        let n = self.cells.len();
        let i = ((x - self.domain.0) / self.dx()).floor();
        self.cells[(i.max(0.0) as usize).min(n - 1)]
    }

    pub fn centers(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.cells.len()).map(|i| self.domain.0 + (i as f64 + 0.5) * dx).collect()
    }
}

fn interface_flux(sys: &System, l: &State, r: &State) -> Result<Vec3> {
    if l == r {
        return Ok(sys.f(l));
    }
    let (p, u) = sys.middle(*l, *r)?;
    Ok(sys.f(&State::new(p, u)))
}

/// Godunov scheme on `n` cells with transmissive boundaries, advanced to
/// `t_end` with time steps `cfl · dx / max c`.
pub fn reference_fv(sys: &System, data: &InitialData, domain: (f64, f64), n: usize, cfl: f64, t_end: f64) -> Result<FvSolution> {
    let dx = (domain.1 - domain.0) / n as f64;
    let mut cells: Vec<State> = (0..n).map(|i| data.eval(domain.0 + (i as f64 + 0.5) * dx)).collect();
    let mut qs: Vec<Vec3> = cells.iter().map(|w| sys.q(w)).collect();
    let mut fluxes = vec![[0.0; 3]; n + 1];
    let mut t = 0.0;
    let mut steps = 0;
    while t < t_end {
        let cmax = cells.iter().map(|w| sys.max_speed(w)).fold(0.0, f64::max);
        let dt = if cmax > 0.0 { (cfl * dx / cmax).min(t_end - t) } else { t_end - t };
        for (i, f) in fluxes.iter_mut().enumerate() {
            let l = &cells[i.saturating_sub(1)];
            let r = &cells[i.min(n - 1)];
            *f = interface_flux(sys, l, r)?;
        }
        let lam = dt / dx;
        for i in 0..n {
            let df = sub3(fluxes[i + 1], fluxes[i]);
            if df == [0.0; 3] {
                continue;
            }
            qs[i] = sub3(qs[i], scale3(lam, df));
            cells[i] = sys.state_from_q(qs[i])?;
        }
        t += dt;
        steps += 1;
        if t_end - t <= 1e-14 * t_end {
            break;
        }
    }
    Ok(FvSolution { domain, t: t_end, steps, cells })
}

/// Independent grids in parallel.
pub fn reference_fv_grids(
    sys: &System,
    data: &InitialData,
    domain: (f64, f64),
    grids: &[usize],
    cfl: f64,
    t_end: f64,
) -> Result<Vec<FvSolution>> {
    grids.par_iter().map(|&n| reference_fv(sys, data, domain, n, cfl, t_end)).collect()
}

/// `∫ |U_fine - U_coarse|` summed over components, on the fine grid.
pub fn self_convergence_error(coarse: &FvSolution, fine: &FvSolution) -> f64 {
    let dx = fine.dx();
    fine.centers()
        .iter()
        .zip(&fine.cells)
        .map(|(&x, w)| {
            let c = coarse.eval(x);
            (w.p - c.p).abs() + (w.u - c.u).abs() + (w.s - c.s).abs()
        })
        .sum::<f64>()
        * dx
}

/// Total of `∫ q dx` over the grid.
pub fn mass(sys: &System, sol: &FvSolution) -> Vec3 {
    sol.cells.iter().fold([0.0; 3], |acc, w| add3(acc, scale3(sol.dx(), sys.q(w))))
}
