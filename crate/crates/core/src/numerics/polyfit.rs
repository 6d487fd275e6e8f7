use crate::{Error, Result};

/// Least-squares polynomial in the mapped variable `t = (x - center) / scale`,
/// which sends the sample range onto [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct PolyFit {
    pub degree: usize,
    /// Ascending powers of `t`.
    pub coefficients: Vec<f64>,
    pub center: f64,
    pub scale: f64,
    pub residual_norm: f64,
}

impl PolyFit {
    pub fn eval(&self, x: f64) -> f64 {
        let t = (x - self.center) / self.scale;
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    /// `order`-th derivative with respect to `x`.
    pub fn derivative(&self, x: f64, order: usize) -> f64 {
        let t = (x - self.center) / self.scale;
        let mut acc = 0.0;
        for (m, &c) in self.coefficients.iter().enumerate().skip(order).rev() {
            let falling: f64 = ((m - order + 1)..=m).map(|v| v as f64).product();
            acc = acc * t + c * falling;
        }
        acc / self.scale.powi(order as i32)
    }
}

/// Least-squares fit of degree `degree` by Householder QR on the mapped
/// Vandermonde matrix.
pub fn lsq_polyfit(xs: &[f64], ys: &[f64], degree: usize) -> Result<PolyFit> {
    let m = xs.len();
    if ys.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "{m} abscissae but {} ordinates",
            ys.len()
        )));
    }
    let cols = degree + 1;
    if m < cols {
        return Err(Error::InvalidInput(format!(
            "{m} samples cannot determine a degree {degree} polynomial"
        )));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite sample".into()));
    }
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let center = 0.5 * (lo + hi);
    let scale = if hi > lo { 0.5 * (hi - lo) } else { 1.0 };

    // column-major Vandermonde
    let mut a = vec![0.0; m * cols];
    for (i, &x) in xs.iter().enumerate() {
        let t = (x - center) / scale;
        let mut p = 1.0;
        for j in 0..cols {
            a[j * m + i] = p;
            p *= t;
        }
    }
    let mut b = ys.to_vec();
    let mut rdiag = vec![0.0; cols];
    for k in 0..cols {
        let col = &mut a[k * m..(k + 1) * m];
        let nrm = col[k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        let alpha = if col[k] > 0.0 { -nrm } else { nrm };
        rdiag[k] = alpha;
        if nrm == 0.0 {
            continue;
        }
        col[k] -= alpha;
        let vtv: f64 = col[k..].iter().map(|v| v * v).sum();
        let v: Vec<f64> = col[k..].to_vec();
        for j in k + 1..cols {
            let cj = &mut a[j * m + k..(j + 1) * m];
            let s: f64 = v.iter().zip(cj.iter()).map(|(x, y)| x * y).sum();
            let f = 2.0 * s / vtv;
            for (c, vi) in cj.iter_mut().zip(&v) {
                *c -= f * vi;
            }
        }
        let s: f64 = v.iter().zip(&b[k..]).map(|(x, y)| x * y).sum();
        let f = 2.0 * s / vtv;
        for (c, vi) in b[k..].iter_mut().zip(&v) {
            *c -= f * vi;
        }
    }
    let rmax = rdiag.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if rdiag.iter().any(|v| v.abs() <= 1e-12 * rmax) {
        return Err(Error::RankDeficient);
    }
    let mut coef = vec![0.0; cols];
    for k in (0..cols).rev() {
        let mut s = b[k];
        for j in k + 1..cols {
            s -= a[j * m + k] * coef[j];
        }
        coef[k] = s / rdiag[k];
    }
    let fit = PolyFit {
        degree,
        coefficients: coef,
        center,
        scale,
        residual_norm: 0.0,
    };
    let residual_norm = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| (fit.eval(x) - y).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(PolyFit { residual_norm, ..fit })
}

/// Least-squares slope of `ln err` against `ln M`.
pub fn loglog_slope(pairs: &[(f64, f64)]) -> Result<f64> {
    if pairs.len() < 2 {
        return Err(Error::InvalidInput("need at least two points".into()));
    }
    if pairs
        .iter()
        .any(|&(m, e)| !(m > 0.0 && e > 0.0) || !m.is_finite() || !e.is_finite())
    {
        return Err(Error::InvalidInput("log-log fit needs positive values".into()));
    }
    let n = pairs.len() as f64;
    let (sx, sy) = pairs
        .iter()
        .fold((0.0, 0.0), |(a, b), &(m, e)| (a + m.ln(), b + e.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(m, e) in pairs {
        let dx = m.ln() - mx;
        sxx += dx * dx;
        sxy += dx * (e.ln() - my);
    }
    if sxx == 0.0 {
        return Err(Error::InvalidInput("all masses are equal".into()));
    }
    Ok(sxy / sxx)
}
