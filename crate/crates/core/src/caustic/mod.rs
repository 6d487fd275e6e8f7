//! Caustic states for the harmonic well `V = X²`: the Legendre dual phase,
//! its oscillatory Fourier integral, the stationary-phase expansion away from
//! the turning points, and the glued approximate solution. Also the Airy
//! toy problem with its approximate-identity estimate.

mod airy;
mod assemble;
mod fourier;
mod stationary;

use num_complex::Complex64;

use crate::{Error, Result};

pub use airy::{
    airy_fourier_integral, airy_md_observable_identity, airy_mollifier_check, AiryObservable, MollifierCheck,
};
pub use assemble::{assemble_caustic_solution, CausticSolution};
pub use fourier::{fourier_integral_u, FourierIntegral, MAX_NODES};
pub use stationary::{stationary_phase_psis, StationaryPhase};

/// Dual phase `θ*(P) = ∫₀^P √(E − s²/2) ds` of the well `V = X²`, real on
/// `|P| ≤ √(2E)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualPhase {
    pub energy: f64,
    /// `√(2E)`, the edge of the real domain.
    pub p_max: f64,
}

pub fn dual_phase(energy: f64) -> Result<DualPhase> {
    if !(energy > 0.0) || !energy.is_finite() {
        return Err(Error::InvalidInput(format!("energy {energy} must be > 0")));
    }
    Ok(DualPhase {
        energy,
        p_max: (2.0 * energy).sqrt(),
    })
}

impl DualPhase {
    fn check(&self, p: f64) -> Result<f64> {
        if !(p.abs() <= self.p_max * (1.0 + 1e-12)) {
            return Err(Error::OutsideDomain(p));
        }
        Ok(p.clamp(-self.p_max, self.p_max))
    }

    /// Closed form on the real domain.
    pub fn theta_star(&self, p: f64) -> Result<f64> {
        let s = self.check(p)? / self.p_max;
        Ok(self.energy / 2f64.sqrt() * (s.asin() + s * (1.0 - s * s).max(0.0).sqrt()))
    }

    /// `X(P) = √(E − P²/2)`.
    pub fn dtheta_star(&self, p: f64) -> Result<f64> {
        let p = self.check(p)?;
        Ok((self.energy - 0.5 * p * p).max(0.0).sqrt())
    }

    pub fn d2theta_star(&self, p: f64) -> Result<f64> {
        let p = self.check(p)?;
        Ok(-p / (2.0 * (self.energy - 0.5 * p * p).max(0.0).sqrt()))
    }

    /// Analytic continuation past `±√(2E)` whose imaginary part grows on both
    /// sides, so `e^{i√M θ*}` decays there.
    pub fn theta_star_continued(&self, p: f64) -> Complex64 {
        let q = p.abs();
        if q <= self.p_max {
            let s = p / self.p_max;
            let re = self.energy / 2f64.sqrt() * (s.asin() + s * (1.0 - s * s).max(0.0).sqrt());
            return Complex64::new(re, 0.0);
        }
        let a2 = 2.0 * self.energy;
        let f = |t: f64| {
            let r = (t * t - a2).max(0.0).sqrt();
            0.5 * t * r - 0.5 * a2 * (t + r).ln()
        };
        let edge = self.energy * std::f64::consts::PI / (2.0 * 2f64.sqrt());
        Complex64::new(p.signum() * edge, (f(q) - f(self.p_max)) / 2f64.sqrt())
    }

    /// Momentum `P0 = √(2(E − V))` for a potential value `v < E`.
    pub fn momentum(&self, v: f64) -> Result<f64> {
        if !(v < self.energy) {
            return Err(Error::NonpositiveKineticEnergy { x: v });
        }
        Ok((2.0 * (self.energy - v)).sqrt())
    }

    /// Position phase `θ(X) = X P0 − θ*(P0)` with `P0 = √(2(E − V(X)))`.
    pub fn phase(&self, x: f64, v: f64) -> Result<f64> {
        let p0 = self.momentum(v)?;
        Ok(x * p0 - self.theta_star(p0)?)
    }
}
