use std::collections::BTreeMap;

use crate::{Error, Result};

/// Symmetric matrix stored by its lower band plus optional wrap-around
/// entries far from the diagonal (periodic stencils).
#[derive(Debug, Clone, PartialEq)]
pub struct SymBandMatrix {
    n: usize,
    bandwidth: usize,
    // bands[d * n + j] = A[j + d][j]
    bands: Vec<f64>,
    // (row, col) with row > col + bandwidth
    corners: BTreeMap<(usize, usize), f64>,
}

impl SymBandMatrix {
    pub fn new(n: usize, bandwidth: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("matrix dimension must be >= 1".into()));
        }
        if bandwidth >= n {
            return Err(Error::InvalidInput(format!(
                "bandwidth {bandwidth} must be below n = {n}"
            )));
        }
        Ok(Self {
            n,
            bandwidth,
            bands: vec![0.0; (bandwidth + 1) * n],
            corners: BTreeMap::new(),
        })
    }

    pub fn from_diagonal(d: &[f64]) -> Result<Self> {
        let mut a = Self::new(d.len(), 0)?;
        a.bands[..d.len()].copy_from_slice(d);
        Ok(a)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn has_corners(&self) -> bool {
        !self.corners.is_empty()
    }

    fn lower(i: usize, j: usize) -> (usize, usize) {
        if i >= j {
            (i, j)
        } else {
            (j, i)
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = Self::lower(i, j);
        let d = r - c;
        if d <= self.bandwidth {
            self.bands[d * self.n + c]
        } else {
            self.corners.get(&(r, c)).copied().unwrap_or(0.0)
        }
    }

    /// Sets `A[i][j]` and `A[j][i]`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) -> Result<()> {
        if i >= self.n || j >= self.n {
            return Err(Error::DimensionMismatch(format!(
                "index ({i}, {j}) outside {}x{}",
                self.n, self.n
            )));
        }
        let (r, c) = Self::lower(i, j);
        let d = r - c;
        if d <= self.bandwidth {
            self.bands[d * self.n + c] = v;
        } else if v == 0.0 {
            self.corners.remove(&(r, c));
        } else {
            self.corners.insert((r, c), v);
        }
        Ok(())
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) -> Result<()> {
        let cur = self.get(i, j);
        self.set(i, j, cur + v)
    }

    /// Nonzero lower-triangle entries `(row, col, value)` with `row >= col`.
    pub fn lower_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let band = (0..=self.bandwidth).flat_map(move |d| {
            (0..self.n - d).filter_map(move |c| {
                let v = self.bands[d * self.n + c];
                (v != 0.0).then_some((c + d, c, v))
            })
        });
        band.chain(self.corners.iter().map(|(&(r, c), &v)| (r, c, v)))
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let n = self.n;
        for (j, yj) in y.iter_mut().enumerate().take(n) {
            *yj = self.bands[j] * x[j];
        }
        for d in 1..=self.bandwidth {
            let row = &self.bands[d * n..d * n + n - d];
            for (c, &v) in row.iter().enumerate() {
                y[c + d] += v * x[c];
                y[c] += v * x[c + d];
            }
        }
        for (&(r, c), &v) in &self.corners {
            y[r] += v * x[c];
            y[c] += v * x[r];
        }
    }

    /// Exact induced 1-norm (maximum absolute column sum).
    pub fn norm1(&self) -> f64 {
        let mut col = vec![0.0; self.n];
        for (r, c, v) in self.lower_entries() {
            col[c] += v.abs();
            if r != c {
                col[r] += v.abs();
            }
        }
        col.into_iter().fold(0.0, f64::max)
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut a = vec![0.0; n * n];
        for (r, c, v) in self.lower_entries() {
            a[r * n + c] = v;
            a[c * n + r] = v;
        }
        a
    }
}

/// Symmetric band matrix without wrap-around entries, stored row-wise:
/// `rows[i * (kd + 1) + (j + kd - i)] = A[i][j]` for `i - kd <= j <= i`.
#[derive(Debug, Clone)]
pub(crate) struct PlainBand {
    pub n: usize,
    pub kd: usize,
    pub rows: Vec<f64>,
}

impl PlainBand {
    pub fn zeros(n: usize, kd: usize) -> Self {
        Self {
            n,
            kd,
            rows: vec![0.0; n * (kd + 1)],
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.rows[i * (self.kd + 1) + (j + self.kd - i)]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.rows[i * (self.kd + 1) + (j + self.kd - i)]
    }

    /// Number of eigenvalues strictly below `sigma`, from the inertia of
    /// an unpivoted LDLᵀ factorization of `A - sigma I`.
    pub fn count_below(&self, sigma: f64, tiny: f64) -> usize {
        let (n, kd) = (self.n, self.kd);
        let w = kd + 1;
        // ring buffer of the last kd rows of L (same layout as `rows`) and D
        let mut l = vec![0.0; w * w];
        let mut d = vec![0.0; w];
        let mut neg = 0;
        for i in 0..n {
            let slot = i % w;
            let j0 = i.saturating_sub(kd);
            for j in j0..i {
                let sj = j % w;
                let k0 = j.saturating_sub(kd).max(j0);
                let mut s = self.at(i, j);
                for k in k0..j {
                    let sk = k % w;
                    s -= l[slot * w + (k + kd - i)] * d[sk] * l[sj * w + (k + kd - j)];
                }
                l[slot * w + (j + kd - i)] = s / d[sj];
            }
            let mut dii = self.at(i, i) - sigma;
            for k in j0..i {
                let lik = l[slot * w + (k + kd - i)];
                dii -= lik * lik * d[k % w];
            }
            if dii.abs() < tiny {
                dii = -tiny;
            }
            if dii < 0.0 {
                neg += 1;
            }
            d[slot] = dii;
        }
        neg
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let kd = self.kd;
        for i in 0..self.n {
            y[i] = self.at(i, i) * x[i];
        }
        for i in 0..self.n {
            for j in i.saturating_sub(kd)..i {
                let v = self.at(i, j);
                y[i] += v * x[j];
                y[j] += v * x[i];
            }
        }
    }
}

/// LU factorization with partial pivoting of a band matrix `A - sigma I`.
pub(crate) struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    w: usize,
    a: Vec<f64>,
    lmul: Vec<f64>,
    piv: Vec<usize>,
}

impl BandLu {
    pub fn factor(b: &PlainBand, sigma: f64, tiny: f64) -> Self {
        let (n, kl) = (b.n, b.kd);
        let ku = b.kd;
        let w = 2 * kl + ku + 1;
        let mut a = vec![0.0; n * w];
        let idx = |r: usize, j: usize| r * w + (j + kl - r);
        for i in 0..n {
            for j in i.saturating_sub(kl)..=i {
                let v = b.at(i, j) - if i == j { sigma } else { 0.0 };
                a[idx(i, j)] = v;
                a[idx(j, i)] = v;
            }
        }
        let mut lmul = vec![0.0; n * kl.max(1)];
        let mut piv = vec![0; n];
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = a[idx(k, k)].abs();
            for r in k + 1..=last {
                let v = a[idx(r, k)].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            piv[k] = p;
            let jend = (k + kl + ku).min(n - 1);
            if p != k {
                for j in k..=jend {
                    a.swap(idx(k, j), idx(p, j));
                }
            }
            if a[idx(k, k)].abs() < tiny {
                a[idx(k, k)] = tiny;
            }
            let pivot = a[idx(k, k)];
            for r in k + 1..=last {
                let m = a[idx(r, k)] / pivot;
                lmul[k * kl + (r - k - 1)] = m;
                if m != 0.0 {
                    for j in k + 1..=jend {
                        a[idx(r, j)] -= m * a[idx(k, j)];
                    }
                }
            }
        }
        Self {
            n,
            kl,
            ku,
            w,
            a,
            lmul,
            piv,
        }
    }

    pub fn solve(&self, x: &mut [f64]) {
        let (n, kl, ku, w) = (self.n, self.kl, self.ku, self.w);
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            for r in k + 1..=(k + kl).min(n - 1) {
                x[r] -= self.lmul[k * kl + (r - k - 1)] * xk;
            }
        }
        for k in (0..n).rev() {
            let row = &self.a[k * w..(k + 1) * w];
            let mut s = x[k];
            for j in k + 1..=(k + kl + ku).min(n - 1) {
                s -= row[j + kl - k] * x[j];
            }
            x[k] = s / row[kl];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_is_symmetric_and_corners_are_kept() {
        let mut a = SymBandMatrix::new(5, 1).unwrap();
        a.set(0, 1, 2.0).unwrap();
        a.set(4, 0, -1.0).unwrap();
        assert_eq!(a.get(1, 0), 2.0);
        assert_eq!(a.get(0, 4), -1.0);
        assert!(a.has_corners());
        let d = a.to_dense();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(d[i * 5 + j], d[j * 5 + i]);
            }
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(SymBandMatrix::new(0, 0).is_err());
        assert!(SymBandMatrix::new(3, 3).is_err());
        let mut a = SymBandMatrix::new(3, 1).unwrap();
        assert!(a.set(3, 0, 1.0).is_err());
    }

    #[test]
    fn matvec_matches_dense() {
        let mut a = SymBandMatrix::new(6, 2).unwrap();
        for i in 0..6 {
            a.set(i, i, 1.0 + i as f64).unwrap();
            if i + 1 < 6 {
                a.set(i + 1, i, 0.5).unwrap();
            }
            if i + 2 < 6 {
                a.set(i + 2, i, -0.25 * i as f64).unwrap();
            }
        }
        a.set(5, 0, 3.0).unwrap();
        let x: Vec<f64> = (0..6).map(|i| (i as f64).sin()).collect();
        let mut y = vec![0.0; 6];
        a.matvec(&x, &mut y);
        let d = a.to_dense();
        for i in 0..6 {
            let r: f64 = (0..6).map(|j| d[i * 6 + j] * x[j]).sum();
            assert!((r - y[i]).abs() < 1e-14);
        }
        assert!(a.norm1() >= 3.0);
    }

    #[test]
    fn inertia_of_diagonal() {
        let mut b = PlainBand::zeros(4, 1);
        for (i, v) in [-2.0, -1.0, 1.0, 3.0].into_iter().enumerate() {
            *b.at_mut(i, i) = v;
        }
        assert_eq!(b.count_below(0.0, 1e-300), 2);
        assert_eq!(b.count_below(2.0, 1e-300), 3);
        assert_eq!(b.count_below(-5.0, 1e-300), 0);
    }

    #[test]
    fn band_lu_solves() {
        let mut b = PlainBand::zeros(7, 2);
        for i in 0..7 {
            *b.at_mut(i, i) = 0.1 * i as f64;
            if i >= 1 {
                *b.at_mut(i, i - 1) = 1.0;
            }
            if i >= 2 {
                *b.at_mut(i, i - 2) = -0.7;
            }
        }
        let lu = BandLu::factor(&b, 0.3, 1e-300);
        let xs: Vec<f64> = (0..7).map(|i| 1.0 + i as f64).collect();
        let mut y = vec![0.0; 7];
        b.matvec(&xs, &mut y);
        for i in 0..7 {
            y[i] -= 0.3 * xs[i];
        }
        lu.solve(&mut y);
        for i in 0..7 {
            assert!((y[i] - xs[i]).abs() < 1e-10, "{i}: {}", y[i]);
        }
    }
}
