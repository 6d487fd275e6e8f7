use num_complex::Complex64;

use super::{stationary_phase_psis, DualPhase, FourierIntegral, StationaryPhase};
use crate::model::Grid1D;
use crate::{Error, Result};

/// Approximate caustic state glued from the stationary-phase form inside
/// `|X| ≤ x0` and the Fourier integral outside.
#[derive(Debug, Clone, PartialEq)]
pub struct CausticSolution {
    pub x0: f64,
    pub c: Complex64,
    /// `u(|X|)` on grid points with `|X| > x0`, zero elsewhere.
    pub u_outer: Vec<Complex64>,
    /// `ū(|X|)` on grid points with `|X| ≤ x0`, zero elsewhere.
    pub u_inner: Vec<Complex64>,
    pub phi: Vec<Complex64>,
    pub order: usize,
    pub stationary: StationaryPhase,
    /// `|Φ(x0⁻) − Φ(x0⁺)| / max|Φ|` with both forms evaluated at `x0`.
    pub glue_jump: f64,
}

/// Builds `Φ` on `grid` for the even potential `v` with derivative `dv`.
///
/// `x0` is the first grid point in `(X₊/2, X₊)`, `X₊ = √E`, where `|u|` has
/// a local maximum. The inner form `C ū (E − V)^{-1/4}` is matched to the
/// outer form `u / √|V'|` there, and both are mirrored to `X < 0`.
pub fn assemble_caustic_solution(
    dp: &DualPhase,
    v: &dyn Fn(f64) -> f64,
    dv: &dyn Fn(f64) -> f64,
    mass: f64,
    grid: &Grid1D,
    order: usize,
) -> Result<CausticSolution> {
    let e = dp.energy;
    let x_plus = e.sqrt();
    let fi = FourierIntegral::new(dp, mass)?;
    let xs = grid.points();

    let (lo, hi) = (0.5 * x_plus, x_plus);
    let candidates: Vec<f64> = xs.iter().copied().filter(|&x| x > lo && x < hi).collect();
    let mods: Vec<f64> = fi.eval_many(&candidates).iter().map(|z| z.norm()).collect();
    let pick = (1..mods.len().saturating_sub(1))
        .find(|&i| mods[i] >= mods[i - 1] && mods[i] >= mods[i + 1])
        .ok_or(Error::GluePointNotFound { lo, hi })?;
    let x0 = candidates[pick];

    let sp = stationary_phase_psis(x0, dp, mass, order)?;
    let u_x0 = fi.eval(x0);
    let ubar_x0 = sp.ubar();
    let slope = dv(x0).abs().sqrt();
    if !(ubar_x0.norm() > 0.0) || !(slope > 0.0) {
        return Err(Error::VanishingObservable(x0));
    }
    let kinetic = e - v(x0);
    let c = u_x0 * kinetic.powf(0.25) / (slope * ubar_x0);

    let outer_at: Vec<f64> = xs.iter().map(|x| x.abs()).filter(|&a| a > x0).collect();
    let outer_vals = fi.eval_many(&outer_at);
    let mut outer_iter = outer_vals.into_iter();

    let n = grid.n;
    let mut u_outer = vec![Complex64::new(0.0, 0.0); n];
    let mut u_inner = vec![Complex64::new(0.0, 0.0); n];
    let mut phi = vec![Complex64::new(0.0, 0.0); n];
    for (j, &x) in xs.iter().enumerate() {
        let a = x.abs();
        if a > x0 {
            let u = outer_iter.next().expect("one outer value per outer point");
            u_outer[j] = u;
            let s = dv(a).abs().sqrt();
            if !(s > 0.0) {
                return Err(Error::VanishingObservable(a));
            }
            phi[j] = u / s;
        } else {
            let ub = sp.ubar_at(dp, a, v(a))?;
            u_inner[j] = ub;
            phi[j] = c * ub * (e - v(a)).powf(-0.25);
        }
    }
    let inner_x0 = c * ubar_x0 * kinetic.powf(-0.25);
    let outer_x0 = u_x0 / slope;
    let peak = phi.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let glue_jump = (inner_x0 - outer_x0).norm() / peak;
    if phi.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidInput("assembled state is not finite".into()));
    }
    Ok(CausticSolution {
        x0,
        c,
        u_outer,
        u_inner,
        phi,
        order,
        stationary: sp,
        glue_jump,
    })
}
