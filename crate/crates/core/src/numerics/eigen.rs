//! Eigenpairs of a symmetric band matrix closest to a target value.
//!
//! Small problems go through a dense Householder tridiagonalization and
//! implicit QL. Large problems use spectrum slicing: inertia counts of
//! `A - σI` from a band LDLᵀ locate the wanted eigenvalues by bisection.
//! Both routes finish with inverse iteration and a Rayleigh-quotient pass on
//! the original matrix.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::band::{BandLu, PlainBand, SymBandMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EigenStrategy {
    /// Dense route up to [`DENSE_LIMIT`], slicing above.
    #[default]
    Auto,
    Dense,
    Sliced,
}

pub const DENSE_LIMIT: usize = 1200;

const MAX_INVERSE_STEPS: usize = 8;

/// The `count` eigenpairs of `a` whose eigenvalues are closest to `target`,
/// sorted by distance (ties broken toward the smaller eigenvalue).
pub fn eigs_near(a: &SymBandMatrix, target: f64, count: usize) -> Result<Vec<EigenPair>> {
    eigs_near_with(a, target, count, EigenStrategy::Auto)
}

pub fn eigs_near_with(a: &SymBandMatrix, target: f64, count: usize, strategy: EigenStrategy) -> Result<Vec<EigenPair>> {
    let n = a.n();
    if count > n {
        return Err(Error::DimensionMismatch(format!(
            "requested {count} eigenpairs of a {n}x{n} matrix"
        )));
    }
    if !target.is_finite() {
        return Err(Error::InvalidInput("target must be finite".into()));
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    let dense = match strategy {
        EigenStrategy::Auto => n <= DENSE_LIMIT,
        EigenStrategy::Dense => true,
        EigenStrategy::Sliced => false,
    };
    let vectors = if dense {
        dense_route(a, target, count)?
    } else {
        sliced_route(a, target, count)?
    };
    finalize(a, target, vectors)
}

fn anorm_of(a: &SymBandMatrix) -> f64 {
    let v = a.norm1();
    if v > 0.0 {
        v
    } else {
        1.0
    }
}

/// The `count` values closest to `target`, returned in ascending order.
fn closest(values: &[f64], target: f64, count: usize) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(|x, y| (x - target).abs().total_cmp(&(y - target).abs()).then(x.total_cmp(y)));
    v.truncate(count);
    v.sort_by(f64::total_cmp);
    v
}

fn dense_route(a: &SymBandMatrix, target: f64, count: usize) -> Result<Vec<Vec<f64>>> {
    let n = a.n();
    let anorm = anorm_of(a);
    let mut m = a.to_dense();
    let tri = householder_tridiagonal(&mut m, n);
    let evals = tridiagonal_eigenvalues(&tri.diag, &tri.off)?;
    let chosen = closest(&evals, target, count);
    let mut t = PlainBand::zeros(n, 1.min(n - 1));
    for i in 0..n {
        *t.at_mut(i, i) = tri.diag[i];
        if i > 0 {
            *t.at_mut(i, i - 1) = tri.off[i - 1];
        }
    }
    let mut vecs = inverse_iteration(&t, &chosen, anorm)?;
    for y in &mut vecs {
        tri.back_transform(y);
    }
    Ok(vecs)
}

struct Tridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
    // (start index, beta, v) for each reflector H = I - beta v vᵀ acting on
    // indices start..n
    reflectors: Vec<(usize, f64, Vec<f64>)>,
}

impl Tridiagonal {
    fn back_transform(&self, y: &mut [f64]) {
        for (start, beta, v) in self.reflectors.iter().rev() {
            let tail = &mut y[*start..];
            let s: f64 = v.iter().zip(tail.iter()).map(|(a, b)| a * b).sum();
            let f = beta * s;
            for (t, vi) in tail.iter_mut().zip(v) {
                *t -= f * vi;
            }
        }
    }
}

/// Householder reduction of a dense row-major symmetric matrix.
fn householder_tridiagonal(m: &mut [f64], n: usize) -> Tridiagonal {
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    let mut reflectors = Vec::new();
    let mut p = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        let s = k + 1;
        let len = n - s;
        let mut v: Vec<f64> = (s..n).map(|r| m[r * n + k]).collect();
        let xnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        diag[k] = m[k * n + k];
        if xnorm == 0.0 {
            off[k] = 0.0;
            continue;
        }
        let alpha = if v[0] > 0.0 { -xnorm } else { xnorm };
        v[0] -= alpha;
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        off[k] = alpha;
        if vtv == 0.0 {
            continue;
        }
        let beta = 2.0 / vtv;
        // p = beta S v on the trailing block
        for i in 0..len {
            let row = &m[(s + i) * n + s..(s + i) * n + n];
            p[i] = beta * row.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>();
        }
        let kk = 0.5 * beta * p[..len].iter().zip(&v).map(|(a, b)| a * b).sum::<f64>();
        for i in 0..len {
            p[i] -= kk * v[i];
        }
        for i in 0..len {
            let (vi, qi) = (v[i], p[i]);
            let row = &mut m[(s + i) * n + s..(s + i) * n + n];
            for j in 0..len {
                row[j] -= vi * p[j] + qi * v[j];
            }
        }
        reflectors.push((s, beta, v));
    }
    if n >= 2 {
        diag[n - 2] = m[(n - 2) * n + n - 2];
        off[n - 2] = m[(n - 1) * n + n - 2];
    }
    diag[n - 1] = m[(n - 1) * n + n - 1];
    Tridiagonal { diag, off, reflectors }
}

/// All eigenvalues of the symmetric tridiagonal matrix with diagonal `d`
/// and off-diagonal `e` (implicit-shift QL), in ascending order.
pub fn tridiagonal_eigenvalues(d: &[f64], e: &[f64]) -> Result<Vec<f64>> {
    let n = d.len();
    if e.len() + 1 != n.max(1) {
        return Err(Error::DimensionMismatch(format!(
            "off-diagonal has {} entries for n = {n}",
            e.len()
        )));
    }
    let mut d = d.to_vec();
    let mut e: Vec<f64> = e.to_vec();
    e.push(0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NoConvergence { residual: e[l].abs() });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Ordering that turns a periodic band (wrap-around entries) into an
/// ordinary band: 0, n-1, 1, n-2, ...
fn fold_permutation(n: usize) -> Vec<usize> {
    let mut order = Vec::with_capacity(n);
    let (mut lo, mut hi) = (0usize, n - 1);
    while lo <= hi {
        order.push(lo);
        if lo != hi {
            order.push(hi);
        }
        lo += 1;
        if hi == 0 {
            break;
        }
        hi -= 1;
    }
    order
}

fn bandwidth_under(a: &SymBandMatrix, pos: &[usize]) -> usize {
    a.lower_entries()
        .map(|(r, c, _)| pos[r].abs_diff(pos[c]))
        .max()
        .unwrap_or(0)
}

fn sliced_route(a: &SymBandMatrix, target: f64, count: usize) -> Result<Vec<Vec<f64>>> {
    let n = a.n();
    let anorm = anorm_of(a);
    let identity: Vec<usize> = (0..n).collect();
    let order = if a.has_corners() {
        let fold = fold_permutation(n);
        let mut pos = vec![0; n];
        for (p, &i) in fold.iter().enumerate() {
            pos[i] = p;
        }
        if bandwidth_under(a, &pos) < bandwidth_under(a, &identity) {
            fold
        } else {
            identity
        }
    } else {
        identity
    };
    let mut pos = vec![0; n];
    for (p, &i) in order.iter().enumerate() {
        pos[i] = p;
    }
    let kd = bandwidth_under(a, &pos).min(n - 1);
    let mut b = PlainBand::zeros(n, kd);
    for (r, c, v) in a.lower_entries() {
        let (pr, pc) = (pos[r], pos[c]);
        let (i, j) = if pr >= pc { (pr, pc) } else { (pc, pr) };
        *b.at_mut(i, j) = v;
    }

    let tiny = f64::EPSILON * anorm * 1e-3;
    let cnt = |s: f64| b.count_below(s, tiny);

    let mut r = (anorm * count as f64 / n as f64).max(64.0 * f64::EPSILON * anorm);
    let mut r_short = 0.0;
    let mut window = loop {
        let (lo, hi) = (target - r, target + r);
        let (clo, chi) = (cnt(lo), cnt(hi));
        if chi >= clo + count {
            break (lo, hi, clo, chi);
        }
        if r > 4.0 * anorm + target.abs() {
            return Err(Error::NoConvergence { residual: r });
        }
        r_short = r;
        r *= 2.0;
    };
    // shrink the symmetric window until it barely holds `count` values, so
    // only those get bisected to full precision
    while r - r_short > 1e-3 * r {
        let mid = 0.5 * (r + r_short);
        let (lo, hi) = (target - mid, target + mid);
        let (clo, chi) = (cnt(lo), cnt(hi));
        if chi >= clo + count {
            r = mid;
            window = (lo, hi, clo, chi);
        } else {
            r_short = mid;
        }
    }
    let (lo, hi, clo, chi) = window;

    let mut values = Vec::with_capacity(chi - clo);
    let mut stack = vec![(lo, hi, clo, chi)];
    while let Some((l, h, cl, ch)) = stack.pop() {
        if ch <= cl {
            continue;
        }
        let tol = (4.0 * f64::EPSILON * anorm).max(2.0 * f64::EPSILON * l.abs().max(h.abs()));
        let mid = 0.5 * (l + h);
        if h - l <= tol || mid <= l || mid >= h {
            values.extend(std::iter::repeat_n(mid, ch - cl));
            continue;
        }
        let cm = cnt(mid).clamp(cl, ch);
        stack.push((l, mid, cl, cm));
        stack.push((mid, h, cm, ch));
    }
    let chosen = closest(&values, target, count);
    let vecs = inverse_iteration(&b, &chosen, anorm)?;
    Ok(vecs
        .into_iter()
        .map(|y| {
            let mut x = vec![0.0; n];
            for (p, &i) in order.iter().enumerate() {
                x[i] = y[p];
            }
            x
        })
        .collect())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(x: &mut [f64]) -> f64 {
    let nrm = dot(x, x).sqrt();
    if nrm > 0.0 {
        for v in x.iter_mut() {
            *v /= nrm;
        }
    }
    nrm
}

fn orthogonalize(x: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in basis {
            let s = dot(x, q);
            for (xi, qi) in x.iter_mut().zip(q) {
                *xi -= s * qi;
            }
        }
    }
}

/// Inverse iteration for ascending eigenvalue estimates `values`; vectors of
/// eigenvalues within `1e-10·anorm` of each other are kept orthogonal.
fn inverse_iteration(b: &PlainBand, values: &[f64], anorm: f64) -> Result<Vec<Vec<f64>>> {
    let n = b.n;
    let tiny = f64::EPSILON * anorm;
    let cluster_tol = 1e-10 * anorm;
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(values.len());
    let mut cluster_start = 0;
    let mut lu: Option<(f64, BandLu)> = None;
    let mut ax = vec![0.0; n];
    for (idx, &mu) in values.iter().enumerate() {
        if idx > 0 && mu - values[idx - 1] > cluster_tol {
            cluster_start = idx;
        }
        if lu.as_ref().is_none_or(|(s, _)| *s != mu) {
            lu = Some((mu, BandLu::factor(b, mu, tiny)));
        }
        let (_, fac) = lu.as_ref().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ idx as u64);
        let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let cluster = &out[cluster_start..idx];
        orthogonalize(&mut x, cluster);
        normalize(&mut x);
        let mut best = f64::INFINITY;
        for step in 0..MAX_INVERSE_STEPS {
            fac.solve(&mut x);
            orthogonalize(&mut x, cluster);
            normalize(&mut x);
            if step == 0 {
                continue;
            }
            b.matvec(&x, &mut ax);
            let lam = dot(&x, &ax);
            let res = ax
                .iter()
                .zip(&x)
                .map(|(a, v)| (a - lam * v).powi(2))
                .sum::<f64>()
                .sqrt();
            if res <= 1e-13 * anorm || res >= 0.5 * best {
                best = best.min(res);
                break;
            }
            best = res;
        }
        if best > 1e-8 * anorm {
            return Err(Error::NoConvergence { residual: best });
        }
        out.push(x);
    }
    Ok(out)
}

/// Reorthogonalizes, recomputes Rayleigh quotients on `a`, checks residuals
/// and sorts by distance to the target.
fn finalize(a: &SymBandMatrix, target: f64, mut vecs: Vec<Vec<f64>>) -> Result<Vec<EigenPair>> {
    let anorm = anorm_of(a);
    for i in 0..vecs.len() {
        let (done, rest) = vecs.split_at_mut(i);
        let x = &mut rest[0];
        orthogonalize(x, done);
        normalize(x);
    }
    let mut ax = vec![0.0; a.n()];
    let mut pairs = Vec::with_capacity(vecs.len());
    for v in vecs {
        a.matvec(&v, &mut ax);
        let lam = dot(&v, &ax);
        let res = ax
            .iter()
            .zip(&v)
            .map(|(y, x)| (y - lam * x).powi(2))
            .sum::<f64>()
            .sqrt();
        if !(res <= 1e-8 * anorm) {
            return Err(Error::NoConvergence { residual: res });
        }
        pairs.push(EigenPair { value: lam, vector: v });
    }
    pairs.sort_by(|p, q| {
        (p.value - target)
            .abs()
            .total_cmp(&(q.value - target).abs())
            .then(p.value.total_cmp(&q.value))
    });
    Ok(pairs)
}
