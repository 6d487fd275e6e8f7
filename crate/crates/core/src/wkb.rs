//! Molecular-dynamics densities, WKB phases and observable errors.

use num_complex::Complex64;

use crate::model::{Grid1D, RealFn};
use crate::numerics::{gauss_legendre, trapezoid_periodic};
use crate::{Error, Result};

/// Anything an observable can be averaged against.
pub trait Expectation {
    /// `∫ g ρ` for a normalized density `ρ`.
    fn expect(&self, g: &dyn Fn(f64) -> f64) -> f64;

    fn grid(&self) -> Option<&Grid1D> {
        None
    }
}

/// Nonnegative grid function with unit trapezoid integral.
#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    pub grid: Grid1D,
    pub values: Vec<f64>,
}

impl Density {
    /// Normalizes `values` to unit trapezoid integral.
    pub fn from_unnormalized(grid: Grid1D, mut values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::DimensionMismatch(format!(
                "{} values on a grid of {} points",
                values.len(),
                grid.n
            )));
        }
        if values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidInput("density values must be finite and >= 0".into()));
        }
        let mass = trapezoid_periodic(&values, grid.h);
        if !(mass > 0.0) {
            return Err(Error::InvalidInput("density has zero mass".into()));
        }
        for v in &mut values {
            *v /= mass;
        }
        Ok(Self { grid, values })
    }

    /// Channel-summed `|Φ|²` of an interleaved wave with `channels` components
    /// per grid point.
    pub fn from_wave(grid: Grid1D, wave: &[Complex64], channels: usize) -> Result<Self> {
        if wave.len() != grid.n * channels {
            return Err(Error::DimensionMismatch(format!(
                "wave of length {} on {} points x {channels} channels",
                wave.len(),
                grid.n
            )));
        }
        let values = wave
            .chunks(channels)
            .map(|c| c.iter().map(|z| z.norm_sqr()).sum())
            .collect();
        Self::from_unnormalized(grid, values)
    }
}

impl Expectation for Density {
    fn expect(&self, g: &dyn Fn(f64) -> f64) -> f64 {
        let h = self.grid.h;
        self.values
            .iter()
            .enumerate()
            .map(|(j, r)| g(self.grid.point(j)) * r)
            .sum::<f64>()
            * h
    }

    fn grid(&self) -> Option<&Grid1D> {
        Some(&self.grid)
    }
}

/// Classical density `∝ (E - V)^(-1/2)` between two simple turning points,
/// averaged with the substitution `X = mid + half·sin φ`, which removes the
/// endpoint singularities.
#[derive(Clone)]
pub struct TurningPointDensity {
    pub potential: RealFn,
    pub energy: f64,
    pub left: f64,
    pub right: f64,
    panels: usize,
}

impl TurningPointDensity {
    pub fn new(potential: RealFn, energy: f64, left: f64, right: f64) -> Result<Self> {
        if !(right > left) {
            return Err(Error::InvalidInput(format!("turning points {left} >= {right}")));
        }
        Ok(Self {
            potential,
            energy,
            left,
            right,
            panels: 64,
        })
    }

    fn weighted(&self, g: &dyn Fn(f64) -> f64) -> (f64, f64) {
        let mid = 0.5 * (self.left + self.right);
        let half = 0.5 * (self.right - self.left);
        let rule = gauss_legendre(16);
        let (mut num, mut den) = (0.0, 0.0);
        let hw = std::f64::consts::FRAC_PI_2;
        for (phi, w) in rule.composite_points(-hw, hw, self.panels) {
            let x = mid + half * phi.sin();
            let kin = self.energy - (self.potential)(x);
            if kin <= 0.0 {
                continue;
            }
            let wt = w * half * phi.cos() / kin.sqrt();
            num += wt * g(x);
            den += wt;
        }
        (num, den)
    }
}

impl Expectation for TurningPointDensity {
    fn expect(&self, g: &dyn Fn(f64) -> f64) -> f64 {
        let (num, den) = self.weighted(g);
        num / den
    }
}

/// `ρ_MD ∝ (E0 - λ)^(-1/2)` on the grid.
pub fn md_density(lambda: &[f64], e0: f64, grid: &Grid1D) -> Result<Density> {
    let vals = kinetic(lambda, e0, grid)?.into_iter().map(|k| 1.0 / k.sqrt()).collect();
    Density::from_unnormalized(*grid, vals)
}

fn kinetic(lambda: &[f64], e0: f64, grid: &Grid1D) -> Result<Vec<f64>> {
    if lambda.len() != grid.n {
        return Err(Error::DimensionMismatch(format!(
            "surface has {} values, grid {} points",
            lambda.len(),
            grid.n
        )));
    }
    lambda
        .iter()
        .enumerate()
        .map(|(j, l)| {
            let k = e0 - l;
            if k > 0.0 {
                Ok(k)
            } else {
                Err(Error::NonpositiveKineticEnergy { x: grid.point(j) })
            }
        })
        .collect()
}

/// Cumulative trapezoid of `√(2(E0 - λ))`, zero at the grid point nearest
/// `X = 0`, integrated outward in both directions.
pub fn wkb_phase(lambda: &[f64], e0: f64, grid: &Grid1D) -> Result<Vec<f64>> {
    let f: Vec<f64> = kinetic(lambda, e0, grid)?
        .into_iter()
        .map(|k| (2.0 * k).sqrt())
        .collect();
    let n = grid.n;
    let h = grid.h;
    let j0 = grid.nearest_index(0.0);
    let mut theta = vec![0.0; n];
    for j in j0 + 1..n {
        theta[j] = theta[j - 1] + 0.5 * h * (f[j - 1] + f[j]);
    }
    for j in (0..j0).rev() {
        theta[j] = theta[j + 1] - 0.5 * h * (f[j] + f[j + 1]);
    }
    Ok(theta)
}

/// `Φ_MD(X, x) = √ρ(X) e^{i√M Θ(X)} υ(X, x)` on the two-state grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WkbState {
    pub grid: Grid1D,
    pub theta: Vec<f64>,
    pub amplitude: Vec<[Complex64; 2]>,
    pub mass: f64,
}

impl WkbState {
    /// Interleaved `(X_j, x₋), (X_j, x₊)` vector matching the two-state
    /// Hamiltonian ordering.
    pub fn flatten(&self) -> Vec<Complex64> {
        self.amplitude.iter().flat_map(|a| [a[0], a[1]]).collect()
    }
}

pub fn md_ansatz(density: &Density, theta: &[f64], vectors: &[[f64; 2]], mass: f64) -> Result<WkbState> {
    let n = density.grid.n;
    if theta.len() != n || vectors.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "density on {n} points, phase {} and eigenvectors {}",
            theta.len(),
            vectors.len()
        )));
    }
    let s = mass.sqrt();
    let mut amplitude: Vec<[Complex64; 2]> = (0..n)
        .map(|j| {
            let z = Complex64::from_polar(density.values[j].sqrt(), s * theta[j]);
            [z * vectors[j][0], z * vectors[j][1]]
        })
        .collect();
    let norm = (density.grid.h * amplitude.iter().map(|a| a[0].norm_sqr() + a[1].norm_sqr()).sum::<f64>()).sqrt();
    for a in &mut amplitude {
        a[0] /= norm;
        a[1] /= norm;
    }
    Ok(WkbState {
        grid: density.grid,
        theta: theta.to_vec(),
        amplitude,
        mass,
    })
}

fn check_grids(a: &dyn Expectation, b: &dyn Expectation) -> Result<()> {
    if let (Some(ga), Some(gb)) = (a.grid(), b.grid()) {
        if !ga.same_as(gb) {
            return Err(Error::DimensionMismatch("densities live on different grids".into()));
        }
    }
    Ok(())
}

const DENOMINATOR_FLOOR: f64 = 1e-14;

/// `|⟨g, ρa⟩ - ⟨g, ρb⟩| / |⟨g, ρa⟩|`.
pub fn observable_error(g: &dyn Fn(f64) -> f64, a: &dyn Expectation, b: &dyn Expectation) -> Result<f64> {
    check_grids(a, b)?;
    let ea = a.expect(g);
    let eb = b.expect(g);
    if !(ea.abs() >= DENOMINATOR_FLOOR) {
        return Err(Error::VanishingObservable(ea));
    }
    Ok((ea - eb).abs() / ea.abs())
}

/// `|⟨g1, ρa⟩/⟨g2, ρa⟩ - ⟨g1, ρb⟩/⟨g2, ρb⟩|`.
pub fn observable_ratio_error(
    g1: &dyn Fn(f64) -> f64,
    g2: &dyn Fn(f64) -> f64,
    a: &dyn Expectation,
    b: &dyn Expectation,
) -> Result<f64> {
    check_grids(a, b)?;
    let ratio = |d: &dyn Expectation| {
        let den = d.expect(g2);
        if !(den.abs() >= DENOMINATOR_FLOOR) {
            return Err(Error::VanishingObservable(den));
        }
        Ok(d.expect(g1) / den)
    };
    Ok((ratio(a)? - ratio(b)?).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn ring(n: usize) -> Grid1D {
        Grid1D::new(n, -PI, PI).unwrap()
    }

    #[test]
    fn uniform_density_and_linear_phase() {
        let g = ring(64);
        let lam = vec![0.3 - 0.5; 64];
        let d = md_density(&lam, 0.3, &g).unwrap();
        for v in &d.values {
            assert!((v - 1.0 / (2.0 * PI)).abs() < 1e-14);
        }
        let th = wkb_phase(&lam, 0.3, &g).unwrap();
        for j in 0..64 {
            assert!((th[j] - g.point(j)).abs() < 1e-13);
        }
        let lam2 = vec![0.3 - 2.0; 64];
        let th2 = wkb_phase(&lam2, 0.3, &g).unwrap();
        for j in 0..64 {
            assert!((th2[j] - 2.0 * g.point(j)).abs() < 1e-13);
        }
    }

    #[test]
    fn turning_point_inside_domain_is_rejected() {
        let g = Grid1D::new(100, -2.0, 2.0).unwrap();
        let lam: Vec<f64> = g.points().iter().map(|x| x * x).collect();
        assert!(matches!(
            md_density(&lam, 1.0, &g),
            Err(Error::NonpositiveKineticEnergy { .. })
        ));
    }

    #[test]
    fn phase_is_second_order_and_monotone() {
        let period = |n: usize| {
            let g = ring(n);
            let lam: Vec<f64> = g.points().iter().map(|x| x.cos()).collect();
            let th = wkb_phase(&lam, 2.0, &g).unwrap();
            assert!(th.windows(2).all(|w| w[1] > w[0]));
            // close the loop across the periodic seam
            let f = |x: f64| (2.0 * (2.0 - x.cos())).sqrt();
            th[n - 1] - th[0] + 0.5 * g.h * (f(g.point(n - 1)) + f(g.point(0)))
        };
        // reference by fine Gauss-Legendre
        let exact = gauss_legendre(20).composite(-PI, PI, 200, |x| (2.0 * (2.0 - x.cos())).sqrt());
        let e1 = (period(11) - exact).abs();
        let e2 = (period(22) - exact).abs();
        assert!(e1 > 0.0);
        // periodic trapezoid converges spectrally; require at least second order
        assert!(e2 <= e1 / 4.0 + 1e-14);
    }

    #[test]
    fn plane_wave_assembly() {
        let g = ring(32);
        let lam = vec![-0.5; 32];
        let d = md_density(&lam, 0.0, &g).unwrap();
        let th = wkb_phase(&lam, 0.0, &g).unwrap();
        let st = md_ansatz(&d, &th, &vec![[1.0, 0.0]; 32], 4.0).unwrap();
        let j0 = g.nearest_index(0.0);
        for j in 0..32 {
            let x = g.point(j) - g.point(j0);
            let want = Complex64::from_polar((2.0 * PI).powf(-0.5), 2.0 * x);
            assert!((st.amplitude[j][0] - want).norm() < 1e-13);
            assert_eq!(st.amplitude[j][1], Complex64::new(0.0, 0.0));
        }
        let norm: f64 = g.h * st.flatten().iter().map(|z| z.norm_sqr()).sum::<f64>();
        assert!((norm - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ansatz_density_matches() {
        let g = ring(50);
        let lam: Vec<f64> = g.points().iter().map(|x| x.sin()).collect();
        let d = md_density(&lam, 1.5, &g).unwrap();
        let th = wkb_phase(&lam, 1.5, &g).unwrap();
        let vecs: Vec<[f64; 2]> = g.points().iter().map(|x| [x.cos(), x.sin()]).collect();
        let st = md_ansatz(&d, &th, &vecs, 9.0).unwrap();
        for j in 0..50 {
            let r = st.amplitude[j][0].norm_sqr() + st.amplitude[j][1].norm_sqr();
            assert!((r - d.values[j]).abs() < 1e-12);
        }
        let back = Density::from_wave(g, &st.flatten(), 2).unwrap();
        for (a, b) in back.values.iter().zip(&d.values) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn observable_errors() {
        let g = ring(400);
        let uni = Density::from_unnormalized(g, vec![1.0; 400]).unwrap();
        let peak = Density::from_unnormalized(g, g.points().iter().map(|x| (-x * x / 1e-4).exp()).collect()).unwrap();
        let x2 = |x: f64| x * x;
        assert_eq!(observable_error(&x2, &uni, &uni).unwrap(), 0.0);
        assert!(observable_error(&|_| 1.0, &uni, &peak).unwrap() < 1e-13);
        let e = observable_error(&x2, &uni, &peak).unwrap();
        assert!((e - 1.0).abs() < 1e-3, "{e}");
        assert!((uni.expect(&x2) - PI * PI / 3.0).abs() < 1e-3);
        // change of reference
        let cosd = Density::from_unnormalized(g, g.points().iter().map(|x| 1.2 + x.cos()).collect()).unwrap();
        let ab = observable_error(&x2, &uni, &cosd).unwrap();
        let ba = observable_error(&x2, &cosd, &uni).unwrap();
        let scale = (cosd.expect(&x2) / uni.expect(&x2)).abs();
        assert!((ab - ba * scale).abs() < 1e-12);
        assert!(matches!(
            observable_error(&|_| 0.0, &uni, &cosd),
            Err(Error::VanishingObservable(_))
        ));
        assert_eq!(observable_ratio_error(&x2, &x2, &uni, &cosd).unwrap(), 0.0);
        assert_eq!(
            observable_ratio_error(&x2, &|x: f64| x.cos() + 2.0, &cosd, &cosd).unwrap(),
            0.0
        );
    }

    #[test]
    fn turning_point_density_is_arcsine_law() {
        let d = TurningPointDensity::new(Arc::new(|x: f64| x * x), 1.0, -1.0, 1.0).unwrap();
        // arcsine law: ⟨X²⟩ = 1/2, ⟨X⁴⟩ = 3/8
        assert!((d.expect(&|x| x * x) - 0.5).abs() < 1e-12);
        assert!((d.expect(&|x| x.powi(4)) - 0.375).abs() < 1e-12);
    }
}
