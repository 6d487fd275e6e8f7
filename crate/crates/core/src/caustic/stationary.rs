use num_complex::Complex64;

use super::DualPhase;
use crate::numerics::lsq_polyfit;
use crate::{Error, Result};

const STENCIL: usize = 41;
const FIT_DEGREE: usize = 10;

/// Stationary-phase amplitudes `ψ±` at a fixed abscissa `x0`, together with
/// the position phase there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryPhase {
    pub x0: f64,
    pub mass: f64,
    pub order: usize,
    pub psi_plus: Complex64,
    pub psi_minus: Complex64,
    /// `θ(x0)`.
    pub theta: f64,
}

impl StationaryPhase {
    /// `ū(x) = e^{−i√M θ(x)} ψ₊ + e^{i√M θ(x)} ψ₋` with the amplitudes held at
    /// `x0`. `v` is the potential value at `x`.
    pub fn ubar_at(&self, dp: &DualPhase, x: f64, v: f64) -> Result<Complex64> {
        let th = dp.phase(x, v)?;
        Ok(self.combine(th))
    }

    /// `ū(x0)`.
    pub fn ubar(&self) -> Complex64 {
        self.combine(self.theta)
    }

    fn combine(&self, theta: f64) -> Complex64 {
        let e = Complex64::from_polar(1.0, self.mass.sqrt() * theta);
        e.conj() * self.psi_plus + e * self.psi_minus
    }

    /// Stationary-phase estimate of the Fourier integral at `x0`,
    /// `√π M^{-1/4} ū(x0)`.
    pub fn u_estimate(&self) -> Complex64 {
        std::f64::consts::PI.sqrt() * self.mass.powf(-0.25) * self.ubar()
    }
}

/// Expands `∫ e^{i√M(−x0 P + θ*(P))} dP` around both stationary points
/// `±P0`, `P0 = √(2(E − x0²))`, keeping terms up to `M^{-order/2}`.
///
/// The change of variables `Y(p)` that makes the phase exactly quadratic is
/// inverted by a least-squares polynomial, and the odd derivatives of `p(Y)`
/// at 0 feed the series.
pub fn stationary_phase_psis(x0: f64, dp: &DualPhase, mass: f64, order: usize) -> Result<StationaryPhase> {
    if !(mass > 0.0) {
        return Err(Error::InvalidInput(format!("mass M = {mass} must be > 0")));
    }
    if 2 * order + 1 > FIT_DEGREE {
        return Err(Error::InvalidInput(format!(
            "order {order} needs p-derivatives beyond the degree {FIT_DEGREE} fit"
        )));
    }
    if !(x0 > 0.0 && x0 * x0 < dp.energy) {
        return Err(Error::OutsideDomain(x0));
    }
    let p0 = dp.momentum(x0 * x0)?;
    let theta = x0 * p0 - dp.theta_star(p0)?;
    let half = (0.4 * dp.p_max).min(0.5 * (dp.p_max - p0)).min(p0);
    let phi = |p: f64| -> Result<f64> { Ok(-x0 * p + dp.theta_star(p)?) };

    let mut psis = [Complex64::new(0.0, 0.0); 2];
    for (slot, centre) in [p0, -p0].into_iter().enumerate() {
        let a = dp.d2theta_star(centre)?;
        if !(a.abs() >= 1e-6) || !a.is_finite() {
            return Err(Error::DegenerateStationaryPoint(a));
        }
        let base = phi(centre)?;
        let mut ps = Vec::with_capacity(STENCIL);
        let mut ys = Vec::with_capacity(STENCIL);
        for i in 0..STENCIL {
            let p = -half + 2.0 * half * i as f64 / (STENCIL - 1) as f64;
            let q = 2.0 * (phi(centre + p)? - base) / a;
            ps.push(p);
            ys.push(p.signum() * q.max(0.0).sqrt());
        }
        let fit = lsq_polyfit(&ys, &ps, FIT_DEGREE)?;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut factorial = 1.0;
        let mut coef = Complex64::new(1.0, 0.0);
        let step = Complex64::new(0.0, 1.0 / (2.0 * a));
        for k in 0..=order {
            if k > 0 {
                factorial *= k as f64;
                coef *= step;
            }
            let d = fit.derivative(0.0, 2 * k + 1);
            sum += mass.powf(-0.5 * k as f64) / factorial * coef * d;
        }
        let prefactor = Complex64::from_polar((0.5 * a).abs().powf(-0.5), std::f64::consts::FRAC_PI_4 * a.signum());
        psis[slot] = prefactor * sum;
    }
    Ok(StationaryPhase {
        x0,
        mass,
        order,
        psi_plus: psis[0],
        psi_minus: psis[1],
        theta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caustic::{dual_phase, FourierIntegral};

    #[test]
    fn leading_order_modulus() {
        let dp = dual_phase(1.0).unwrap();
        let sp = stationary_phase_psis(0.7, &dp, 800.0, 0).unwrap();
        let p0 = dp.momentum(0.49).unwrap();
        let expect = (0.5 * dp.d2theta_star(p0).unwrap()).abs().powf(-0.5);
        assert!((sp.psi_plus.norm() - expect).abs() < 1e-8 * expect);
        assert!((sp.psi_minus.norm() - expect).abs() < 1e-8 * expect);
    }

    #[test]
    fn conjugate_amplitudes() {
        let dp = dual_phase(1.0).unwrap();
        for k in 0..4 {
            let sp = stationary_phase_psis(0.6, &dp, 400.0, k).unwrap();
            assert!((sp.psi_minus - sp.psi_plus.conj()).norm() < 1e-9 * sp.psi_plus.norm());
            assert!(sp.ubar().im.abs() < 1e-9 * sp.ubar().norm().max(1.0));
        }
    }

    #[test]
    fn error_decreases_with_order() {
        let dp = dual_phase(1.0).unwrap();
        // the branch points at ±√(2E) leave an error floor the series cannot
        // remove, so monotone decay needs x0 away from them relative to M^{-1/2}
        for (m, x0) in [(800.0, 0.8), (3200.0, 0.75), (3200.0, 0.8)] {
            let u = FourierIntegral::new(&dp, m).unwrap();
            {
                let exact = u.eval(x0);
                let errs: Vec<f64> = (0..4)
                    .map(|k| (stationary_phase_psis(x0, &dp, m, k).unwrap().u_estimate() - exact).norm())
                    .collect();
                for w in errs.windows(2) {
                    assert!(w[1] < w[0], "M={m} x0={x0} {errs:?}");
                }
            }
        }
    }

    #[test]
    fn rejects_turning_point_and_outside() {
        let dp = dual_phase(1.0).unwrap();
        assert!(stationary_phase_psis(1.2, &dp, 100.0, 0).is_err());
        assert!(matches!(
            stationary_phase_psis(1.0 - 1e-13, &dp, 100.0, 0),
            Err(Error::DegenerateStationaryPoint(_))
        ));
        assert_eq!(
            stationary_phase_psis(0.0, &dp, 100.0, 0),
            Err(Error::OutsideDomain(0.0))
        );
    }
}
