//! γ-law equation of state `p v^γ = K` and the derived scalar functions used
//! along acoustic wave curves.

use serde::{Deserialize, Serialize};

use crate::error::{MftError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaLaw {
    pub gamma: f64,
    pub k: f64,
}

/// Integral averages of `1/c` and `1/c²` over a pressure interval, and their
/// ratio `β = <1/c>² / <1/c²>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Averages {
    pub inv_c: f64,
    pub inv_c2: f64,
    pub beta: f64,
}

fn vacuum(p: f64) -> MftError {
    MftError::Vacuum(format!("nonpositive pressure {p}"))
}

impl GammaLaw {
    pub fn new(gamma: f64, k: f64) -> Self {
        GammaLaw { gamma, k }
    }

    /// Gas-dynamics entropy map `K(s) = exp(s)`.
    pub fn at_entropy(gamma: f64, s: f64) -> Self {
        GammaLaw { gamma, k: s.exp() }
    }

    pub fn entropy_of(&self) -> f64 {
        self.k.ln()
    }

    pub fn specific_volume(&self, p: f64) -> Result<f64> {
        if p <= 0.0 {
            return Err(vacuum(p));
        }
        Ok(self.v(p))
    }

    pub fn impedance(&self, p: f64) -> Result<f64> {
        if p <= 0.0 {
            return Err(vacuum(p));
        }
        Ok(self.c(p))
    }

    /// `v = (K/p)^{1/γ}` without the positivity check.
    pub fn v(&self, p: f64) -> f64 {
        (self.k / p).powf(1.0 / self.gamma)
    }

    /// Lagrangian sound speed `c = sqrt(-dp/dv)`.
    pub fn c(&self, p: f64) -> f64 {
        let g = self.gamma;
        g.sqrt() * self.k.powf(-0.5 / g) * p.powf(0.5 * (g + 1.0) / g)
    }

    /// Eulerian sound speed `a = c v`.
    pub fn eulerian_sound_speed(&self, p: f64) -> f64 {
        self.c(p) * self.v(p)
    }

    fn z_coeff(&self) -> f64 {
        let g = self.gamma;
        2.0 * g.sqrt() / (g - 1.0) * self.k.powf(0.5 / g)
    }

    fn z_exp(&self) -> f64 {
        0.5 * (self.gamma - 1.0) / self.gamma
    }

    /// Riemann coordinate `z(p) = ∫_0^p dp'/c(p')`.
    pub fn riemann_coordinate(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return 0.0;
        }
        self.z_coeff() * p.powf(self.z_exp())
    }

    pub fn z(&self, p: f64) -> f64 {
        self.riemann_coordinate(p)
    }

    pub fn pressure_from_z(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 0.0;
        }
        (z / self.z_coeff()).powf(1.0 / self.z_exp())
    }

    pub fn pressure_from_impedance(&self, c: f64) -> f64 {
        let g = self.gamma;
        (c / (g.sqrt() * self.k.powf(-0.5 / g))).powf(2.0 * g / (g + 1.0))
    }

    /// `ln(a/b)` computed accurately when `a ≈ b`.
    fn log_ratio(a: f64, b: f64) -> f64 {
        ((a - b) / b).ln_1p()
    }

    /// `z(pa) - z(pb)` without cancellation.
    pub fn z_diff(&self, pa: f64, pb: f64) -> f64 {
        if pa == pb {
            return 0.0;
        }
        self.z(pb) * (self.z_exp() * Self::log_ratio(pa, pb)).exp_m1()
    }

    /// `v(pa) - v(pb)` without cancellation.
    pub fn v_diff(&self, pa: f64, pb: f64) -> f64 {
        if pa == pb {
            return 0.0;
        }
        self.v(pb) * (-Self::log_ratio(pa, pb) / self.gamma).exp_m1()
    }

    pub fn internal_energy(&self, p: f64) -> f64 {
        p * self.v(p) / (self.gamma - 1.0)
    }

    pub fn enthalpy(&self, p: f64) -> f64 {
        self.gamma / (self.gamma - 1.0) * p * self.v(p)
    }

    pub fn averages(&self, pl: f64, pr: f64) -> Result<Averages> {
        if pl <= 0.0 {
            return Err(vacuum(pl));
        }
        if pr <= 0.0 {
            return Err(vacuum(pr));
        }
        if pl == pr {
            let ic = 1.0 / self.c(pl);
            return Ok(Averages { inv_c: ic, inv_c2: ic * ic, beta: 1.0 });
        }
        let dp = pr - pl;
        let inv_c = self.z_diff(pr, pl) / dp;
        let inv_c2 = self.v_diff(pl, pr) / dp;
        Ok(Averages { inv_c, inv_c2, beta: inv_c * inv_c / inv_c2 })
    }

    /// Specific volume behind a gas-dynamics shock with ahead state
    /// `(pa, va)` and behind pressure `pb`, from `[e] + p̄ [v] = 0`.
    pub fn hugoniot_volume(gamma: f64, pa: f64, va: f64, pb: f64) -> f64 {
        let mu = 1.0 / (gamma - 1.0);
        let mean = 0.5 * (pa + pb);
        va * (mu * pa + mean) / (mu * pb + mean)
    }
}

#[cfg(test)]
#[allow(clippy::approx_constant)] // golden values typed out to their stated digits
mod tests {
    use super::*;
    use crate::numerics::adaptive_simpson;

    #[test]
    fn volumes() {
        let e = GammaLaw::new(2.0, 1.0);
        assert_eq!(e.specific_volume(1.0).unwrap(), 1.0);
        assert!((e.specific_volume(4.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((GammaLaw::new(1.4, 1.0).v(1.0) - 1.0).abs() < 1e-15);
        assert!(e.specific_volume(0.0).is_err());
    }

    #[test]
    fn impedance_matches_finite_difference_of_volume() {
        let e = GammaLaw::new(2.0, 1.0);
        for (p, c) in [(1.0, 1.41421356), (16.0, 11.3137085)] {
            let h = 1e-6;
            let dv = (e.v(p + h) - e.v(p - h)) / (2.0 * h);
            let fd = (-1.0 / dv).sqrt();
            assert!((fd - c).abs() < 1e-6 * c.max(1.0));
            assert!((e.c(p) - c).abs() < 1e-7);
        }
        assert!(e.c(1e-12) < 1e-8);
    }

    #[test]
    fn riemann_coordinate_matches_quadrature() {
        let e = GammaLaw::new(2.0, 1.0);
        for (p, z) in [(1.0, 2.0 * 2f64.sqrt()), (16.0, 4.0 * 2f64.sqrt())] {
            // p' = p y^8 removes the integrable singularity at the origin
            let q = adaptive_simpson(&|y: f64| if y == 0.0 { 0.0 } else { 8.0 * p * y.powi(7) / e.c(p * y.powi(8)) }, 0.0, 1.0, 1e-13);
            assert!((q - z).abs() < 1e-9, "{q} vs {z}");
            assert!((e.z(p) - z).abs() < 1e-12);
        }
        assert_eq!(e.z(0.0), 0.0);
        assert!((e.pressure_from_z(e.z(3.7)) - 3.7).abs() < 1e-12);
        assert!((e.pressure_from_impedance(e.c(3.7)) - 3.7).abs() < 1e-12);
    }

    #[test]
    fn averages_gamma2() {
        let e = GammaLaw::new(2.0, 1.0);
        let a = e.averages(1.0, 4.0).unwrap();
        assert!((a.inv_c - 0.390524).abs() < 1e-6);
        assert!((a.inv_c2 - 1.0 / 6.0).abs() < 1e-12);
        // (4 - 2√2)² · 6/9
        assert!((a.beta - (4.0 - 2.0 * 2f64.sqrt()).powi(2) * 6.0 / 9.0).abs() < 1e-14);
        assert!((a.beta - 0.915053).abs() < 5e-6);
        let q1 = adaptive_simpson(&|x: f64| 1.0 / e.c(x), 1.0, 4.0, 1e-13) / 3.0;
        let q2 = adaptive_simpson(&|x: f64| 1.0 / e.c(x).powi(2), 1.0, 4.0, 1e-13) / 3.0;
        assert!((a.inv_c - q1).abs() < 1e-9);
        assert!((a.inv_c2 - q2).abs() < 1e-9);
        let b = e.averages(1.0, 1.0).unwrap();
        assert!((b.inv_c - 0.70710678).abs() < 1e-8);
        assert_eq!(b.beta, 1.0);
    }

    #[test]
    fn stable_differences() {
        let e = GammaLaw::new(1.4, 1.3);
        for (a, b) in [(1.0, 2.0), (3.0, 0.5), (0.01, 7.0)] {
            let zd = e.z(a) - e.z(b);
            assert!((e.z_diff(a, b) - zd).abs() <= 1e-13 * zd.abs());
            let vd = e.v(a) - e.v(b);
            assert!((e.v_diff(a, b) - vd).abs() <= 1e-13 * vd.abs());
        }
        // nearly equal pressures: midpoint rule is exact to O(Δp²)
        let (a, b) = (1.0 + 1e-9, 1.0);
        let m = 0.5 * (a + b);
        assert!((e.z_diff(a, b) / ((a - b) / e.c(m)) - 1.0).abs() < 1e-12);
        assert!((e.v_diff(a, b) / (-(a - b) / e.c(m).powi(2)) - 1.0).abs() < 1e-12);
    }
}
