use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::numerics::gauss_legendre;
use crate::{Error, Result};

/// `∫ e^{i(s³/3 + z s)} ds = 2π Ai(z)`, evaluated along `Im s = η` where the
/// integrand decays like `e^{−η t²}`.
fn airy_contour_integral(z: f64) -> Complex64 {
    let eta = if z >= 0.0 {
        z.sqrt().max(1.0)
    } else {
        (4.0 / -z).min(1.0)
    };
    let t_max = (40.0 / eta).sqrt();
    let width = 2.0 * std::f64::consts::PI / (t_max * t_max + z.abs() + 1.0);
    let panels = (2.0 * t_max / width).ceil() as usize;
    let rule = gauss_legendre(16);
    let mut acc = Complex64::new(0.0, 0.0);
    for (t, w) in rule.composite_points(-t_max, t_max, panels) {
        let s = Complex64::new(t, eta);
        acc += w * (Complex64::i() * (s * s * s / 3.0 + z * s)).exp();
    }
    acc
}

/// Fourier integral `∫ e^{i√M(−x p − p³/3)} dp` of the Airy dual phase
/// `θ*(p) = −p³/3`. Rescaling `p = M^{-1/6} s` gives `M^{-1/6} · 2π Ai(M^{1/3} x)`.
pub fn airy_fourier_integral(x: f64, mass: f64) -> Complex64 {
    let z = mass.cbrt() * x;
    // the p-integral is the conjugate of the s-integral
    mass.powf(-1.0 / 6.0) * airy_contour_integral(z).conj()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MollifierCheck {
    /// `‖g ∗ A_M − g‖₂`.
    pub lhs: f64,
    /// `‖∂³g‖₂ / (12M)`.
    pub bound: f64,
}

/// Both sides of the approximate-identity estimate for the scaled Airy kernel,
/// computed in frequency space from `n` samples of `g` on the periodic box
/// `[a, b)`.
pub fn airy_mollifier_check(g: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize, mass: f64) -> Result<MollifierCheck> {
    if !(b > a) || n < 8 {
        return Err(Error::InvalidInput(format!("bad box [{a}, {b}) with {n} samples")));
    }
    if !(mass > 0.0) {
        return Err(Error::InvalidInput(format!("mass M = {mass} must be > 0")));
    }
    let len = b - a;
    let h = len / n as f64;
    let mut buf: Vec<Complex64> = (0..n).map(|j| Complex64::new(g(a + j as f64 * h), 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let omega = |k: usize| {
        let signed = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
        2.0 * std::f64::consts::PI * signed / len
    };
    let total: f64 = buf.iter().map(|z| z.norm_sqr()).sum();
    if total == 0.0 {
        return Ok(MollifierCheck { lhs: 0.0, bound: 0.0 });
    }
    let tail: f64 = (0..n)
        .filter(|&k| k.min(n - k) > n / 4)
        .map(|k| buf[k].norm_sqr())
        .sum();
    if tail > 1e-10 * total {
        return Err(Error::Aliasing(tail / total));
    }
    // Parseval: ‖f‖² = len/n² Σ|F_k|²
    let scale = len / (n as f64 * n as f64);
    let (mut lhs, mut bound) = (0.0, 0.0);
    for (k, c) in buf.iter().enumerate() {
        let w = omega(k);
        let y = w * w * w / (12.0 * mass);
        lhs += (Complex64::from_polar(1.0, y) - 1.0).norm_sqr() * c.norm_sqr();
        bound += w.powi(6) * c.norm_sqr();
    }
    Ok(MollifierCheck {
        lhs: (scale * lhs).sqrt(),
        bound: (scale * bound).sqrt() / (12.0 * mass),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryObservable {
    /// `∫ g1 |u|² / ∫ g2 |u|²`.
    pub quantum: f64,
    /// `∫ g1 |x|^{-1/2} / ∫ g2 |x|^{-1/2}`.
    pub classical: f64,
    pub difference: f64,
}

/// Quantum and classical observable ratios of the Airy state for observables
/// supported in `[a, b]`, `b < 0`.
pub fn airy_md_observable_identity(
    g1: &dyn Fn(f64) -> f64,
    g2: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    mass: f64,
) -> Result<AiryObservable> {
    if !(a < b && b < 0.0) {
        return Err(Error::OutsideDomain(b));
    }
    if !(mass > 0.0) {
        return Err(Error::InvalidInput(format!("mass M = {mass} must be > 0")));
    }
    // |u|² oscillates with local wavenumber 2√(M|x|)
    let waves = (b - a) * 2.0 * (mass * a.abs()).sqrt() / (2.0 * std::f64::consts::PI);
    let panels = 256 + (4.0 * waves).ceil() as usize;
    let rule = gauss_legendre(16);
    let pts = rule.composite_points(a, b, panels);
    let (mut q1, mut q2, mut c1, mut c2) = (0.0, 0.0, 0.0, 0.0);
    for &(x, w) in &pts {
        let dens = airy_fourier_integral(x, mass).norm_sqr();
        let cl = x.abs().powf(-0.5);
        let (v1, v2) = (g1(x), g2(x));
        q1 += w * v1 * dens;
        q2 += w * v2 * dens;
        c1 += w * v1 * cl;
        c2 += w * v2 * cl;
    }
    if q2 == 0.0 || c2 == 0.0 {
        return Err(Error::VanishingObservable(q2));
    }
    let (quantum, classical) = (q1 / q2, c1 / c2);
    Ok(AiryObservable {
        quantum,
        classical,
        difference: (quantum - classical).abs(),
    })
}
