#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semiclassical::model::Grid1D;
use semiclassical::numerics::{EigenPair, SymBandMatrix};
use semiclassical::projection::{cluster_eigenvalues, EigenSelection};

/// Cyclic Jacobi rotations on a dense row-major symmetric matrix; returns
/// the eigenvalues in ascending order.
pub fn jacobi_eigenvalues(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].powi(2))
            .sum();
        let total: f64 = a.iter().map(|v| v * v).sum();
        if off <= 1e-30 * total.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// The `count` reference eigenvalues closest to `target`, sorted by
/// distance then value.
pub fn reference_near(ev: &[f64], target: f64, count: usize) -> Vec<f64> {
    let mut v = ev.to_vec();
    v.sort_by(|x, y| (x - target).abs().total_cmp(&(y - target).abs()).then(x.total_cmp(y)));
    v.truncate(count);
    v
}

/// Random symmetric band matrix, optionally with periodic wrap entries.
pub fn random_band(rng: &mut ChaCha8Rng, n: usize, bw: usize, periodic: bool) -> SymBandMatrix {
    let mut a = SymBandMatrix::new(n, bw).unwrap();
    for i in 0..n {
        for d in 0..=bw.min(i) {
            a.set(i, i - d, rng.gen_range(-1.0..1.0)).unwrap();
        }
    }
    if periodic && n > 2 * bw + 1 {
        for d in 1..=bw {
            for k in 0..d {
                a.set(n - d + k, k, rng.gen_range(-1.0..1.0)).unwrap();
            }
        }
    }
    a
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Periodic second-difference operator (1/2M)(-Δ_h) on n points over a
/// period of length `length`.
pub fn periodic_laplacian(n: usize, length: f64, mass: f64) -> SymBandMatrix {
    let h = length / n as f64;
    let k = 1.0 / (2.0 * mass * h * h);
    let mut a = SymBandMatrix::new(n, 1).unwrap();
    for i in 0..n {
        a.set(i, i, 2.0 * k).unwrap();
        a.add(i, (i + 1) % n, -k).unwrap();
    }
    a
}

pub fn circulant_eigenvalue(k: i64, n: usize, length: f64, mass: f64) -> f64 {
    let h = length / n as f64;
    (1.0 - (2.0 * std::f64::consts::PI * k as f64 / n as f64).cos()) / (mass * h * h)
}

/// Literal transcription of the projection formula over every mask
/// b ∈ {0,1}^J̄, without any cluster bookkeeping.
pub fn oracle_mask(phi: &[Complex64], sel: &EigenSelection, grid: &Grid1D, channels: usize) -> Vec<bool> {
    let jbar = sel.kept.len();
    let ups: Vec<&Vec<f64>> = sel.kept.iter().map(|&i| &sel.pairs[i].vector).collect();
    let coef: Vec<Complex64> = ups
        .iter()
        .map(|u| u.iter().zip(phi).map(|(a, z)| z * a).sum())
        .collect();
    let density = |w: &[Complex64]| -> Option<Vec<f64>> {
        let raw: Vec<f64> = w
            .chunks(channels)
            .map(|c| c.iter().map(|z| z.norm_sqr()).sum())
            .collect();
        let mass: f64 = grid.h * raw.iter().sum::<f64>();
        (mass > 0.0).then(|| raw.into_iter().map(|v| v / mass).collect())
    };
    let rho = density(phi).unwrap();
    let mut best: Option<(f64, usize, Vec<bool>)> = None;
    for bits in 1u32..(1 << jbar) {
        let b: Vec<bool> = (0..jbar).map(|k| bits & (1 << k) != 0).collect();
        let mut w = vec![Complex64::new(0.0, 0.0); phi.len()];
        for j in 0..jbar {
            let weight: f64 = (0..jbar)
                .map(|k| if b[k] && sel.cluster_matrix[k][j] { 1.0 } else { 0.0 })
                .sum();
            for (wi, u) in w.iter_mut().zip(ups[j]) {
                *wi += weight * coef[j] * u;
            }
        }
        let Some(rb) = density(&w) else { continue };
        let d = (grid.h * rho.iter().zip(&rb).map(|(x, y)| (x - y).powi(2)).sum::<f64>()).sqrt();
        let ones = b.iter().filter(|&&x| x).count();
        let better = match &best {
            None => true,
            Some((bd, bo, bb)) => d < *bd || (d == *bd && (ones < *bo || (ones == *bo && b < *bb))),
        };
        if better {
            best = Some((d, ones, b));
        }
    }
    best.unwrap().2
}

pub fn orthonormal(r: &mut impl Rng, dim: usize, count: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    while out.len() < count {
        let mut v: Vec<f64> = (0..dim).map(|_| r.gen_range(-1.0..1.0)).collect();
        for _ in 0..2 {
            for q in &out {
                let s: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(q).for_each(|(a, b)| *a -= s * b);
            }
        }
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        v.iter_mut().for_each(|a| *a /= n);
        out.push(v);
    }
    out
}

pub fn random_case(seed: u64) -> (Vec<Complex64>, EigenSelection, Grid1D, usize) {
    let mut r = rng(seed);
    let channels = 1 + (seed % 2) as usize;
    let n = 12 + (seed % 7) as usize;
    let grid = Grid1D::new(n, -1.0, 1.0).unwrap();
    let jbar = 1 + (seed % 6) as usize;
    let mass = 100.0;
    // values inside M^(-1/2) = 0.1, clustered on the scale M^(-3/4) ≈ 0.0316
    let centers = [0.0, 0.05, -0.06, 0.09];
    let vecs = orthonormal(&mut r, n * channels, jbar);
    let pairs: Vec<EigenPair> = vecs
        .into_iter()
        .map(|v| EigenPair {
            value: centers[r.gen_range(0..4)] + r.gen_range(-0.004..0.004),
            vector: v,
        })
        .collect();
    let sel = cluster_eigenvalues(pairs, 0.0, mass).unwrap();
    assert_eq!(sel.kept.len(), jbar);
    let phi: Vec<Complex64> = (0..n * channels)
        .map(|_| Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
        .collect();
    (phi, sel, grid, channels)
}
