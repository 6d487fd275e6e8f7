use num_complex::Complex64;
use rayon::prelude::*;

use super::DualPhase;
use crate::numerics::gauss_legendre;
use crate::{Error, Result};

/// Node cap for one Fourier integral.
pub const MAX_NODES: usize = 1 << 22;

const GL_POINTS: usize = 16;

/// Precomputed quadrature for `u(X) = ∫ e^{i√M(−XP + θ*(P))} dP` over
/// `|P| < 2√E`, reusable across many `X`.
///
/// The real part `|P| ≤ √(2E)` uses `P = √(2E) sin φ`, which removes the
/// square-root behaviour of `θ*` at the edges. Beyond the edges `θ*` is
/// continued analytically (see [`DualPhase::theta_star_continued`]) and
/// `P = ±(√(2E) + t²)` smooths the branch point.
#[derive(Debug, Clone)]
pub struct FourierIntegral {
    pub mass: f64,
    nodes: Vec<f64>,
    /// `w_j e^{i√M θ*(P_j)}`.
    weighted: Vec<Complex64>,
}

impl FourierIntegral {
    pub fn new(dp: &DualPhase, mass: f64) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidInput(format!("mass M = {mass} must be > 0")));
        }
        let half = 2.0 * dp.energy.sqrt();
        let sm = mass.sqrt();
        // 20 nodes per wavelength 2π/(√M max|X − θ*'| + 1) over the whole P range
        let wavelength = 2.0 * std::f64::consts::PI / (sm * (half + dp.energy.sqrt()) + 1.0);
        let by_wavelength = (20.0 * 2.0 * half / wavelength).ceil() as usize;
        let needed = by_wavelength.max(4096).max(40 * sm.ceil() as usize);
        let inner_panels = (needed / GL_POINTS).max(256);
        let outer_panels = (needed / (2 * GL_POINTS)).max(128);
        let total = GL_POINTS * (inner_panels + 2 * outer_panels);
        if total > MAX_NODES {
            return Err(Error::BudgetExceeded {
                needed: total,
                cap: MAX_NODES,
            });
        }
        let rule = gauss_legendre(GL_POINTS);
        let mut nodes = Vec::with_capacity(total);
        let mut weighted = Vec::with_capacity(total);
        let mut push = |p: f64, w: f64, ts: Complex64| {
            nodes.push(p);
            weighted.push(w * (Complex64::i() * sm * ts).exp());
        };
        let pm = dp.p_max;
        let half_pi = std::f64::consts::FRAC_PI_2;
        for (phi, w) in rule.composite_points(-half_pi, half_pi, inner_panels) {
            let p = pm * phi.sin();
            push(p, w * pm * phi.cos(), dp.theta_star_continued(p));
        }
        if half > pm {
            for (t, w) in rule.composite_points(0.0, (half - pm).sqrt(), outer_panels) {
                for sign in [1.0, -1.0] {
                    let p = sign * (pm + t * t);
                    push(p, 2.0 * t * w, dp.theta_star_continued(p));
                }
            }
        }
        Ok(Self { mass, nodes, weighted })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let k = -self.mass.sqrt() * x;
        self.nodes
            .iter()
            .zip(&self.weighted)
            .map(|(&p, &w)| {
                let (s, c) = (k * p).sin_cos();
                w * Complex64::new(c, s)
            })
            .sum()
    }

    /// Parallel evaluation at many abscissae.
    pub fn eval_many(&self, xs: &[f64]) -> Vec<Complex64> {
        xs.par_iter().map(|&x| self.eval(x)).collect()
    }
}

/// Single evaluation of the caustic Fourier integral.
pub fn fourier_integral_u(x: f64, dp: &DualPhase, mass: f64) -> Result<Complex64> {
    Ok(FourierIntegral::new(dp, mass)?.eval(x))
}
