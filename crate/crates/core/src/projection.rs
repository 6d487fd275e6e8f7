//! Multiplicity clustering of eigenvalues near a target energy and the
//! best-subset projection of a trial state onto their eigenvectors.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::model::Grid1D;
use crate::numerics::EigenPair;
use crate::wkb::Density;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EigenSelection {
    /// All candidate pairs, sorted by distance to the target.
    pub pairs: Vec<EigenPair>,
    /// Indices into `pairs` of the kept eigenvalues.
    pub kept: Vec<usize>,
    pub e0: f64,
    /// `cluster_matrix[i][j]`: kept eigenvalue `j` belongs to the cluster
    /// opened by row `i`.
    pub cluster_matrix: Vec<Vec<bool>>,
    /// True when the keep window was empty and the nearest cluster was used.
    pub fallback: bool,
}

impl EigenSelection {
    pub fn kept_pairs(&self) -> impl Iterator<Item = &EigenPair> {
        self.kept.iter().map(|&i| &self.pairs[i])
    }

    /// Rows of the cluster matrix that claim at least one column, with their
    /// columns.
    pub fn clusters(&self) -> Vec<(usize, Vec<usize>)> {
        self.cluster_matrix
            .iter()
            .enumerate()
            .filter_map(|(i, row)| {
                let cols: Vec<usize> = (0..row.len()).filter(|&j| row[j]).collect();
                (!cols.is_empty()).then_some((i, cols))
            })
            .collect()
    }
}

fn sorted_by_distance(mut pairs: Vec<EigenPair>, target: f64) -> Vec<EigenPair> {
    pairs.sort_by(|p, q| {
        (p.value - target)
            .abs()
            .total_cmp(&(q.value - target).abs())
            .then(p.value.total_cmp(&q.value))
    });
    pairs
}

/// Row `i` claims column `j >= i` when `|E_i - E_j| < M^(-3/4)` and no
/// earlier row claimed it.
pub fn cluster_matrix(values: &[f64], mass: f64) -> Vec<Vec<bool>> {
    let thr = mass.powf(-0.75);
    let n = values.len();
    let mut a = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i..n {
            if (values[i] - values[j]).abs() < thr && !(0..i).any(|k| a[k][j]) {
                a[i][j] = true;
            }
        }
    }
    a
}

/// Keeps eigenvalues within `M^(-1/2)` of `target` and clusters them.
pub fn cluster_eigenvalues(pairs: Vec<EigenPair>, target: f64, mass: f64) -> Result<EigenSelection> {
    if !(mass > 0.0) {
        return Err(Error::InvalidInput(format!("mass M = {mass} must be > 0")));
    }
    if pairs.is_empty() {
        return Err(Error::EmptySelection {
            target,
            radius: mass.powf(-0.5),
        });
    }
    let pairs = sorted_by_distance(pairs, target);
    let radius = mass.powf(-0.5);
    let kept: Vec<usize> = (0..pairs.len())
        .filter(|&i| (pairs[i].value - target).abs() < radius)
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptySelection { target, radius });
    }
    Ok(build(pairs, kept, mass, false))
}

/// As [`cluster_eigenvalues`], but an empty keep window falls back to the
/// cluster of the eigenvalue nearest to `target`.
pub fn cluster_eigenvalues_or_nearest(pairs: Vec<EigenPair>, target: f64, mass: f64) -> Result<EigenSelection> {
    match cluster_eigenvalues(pairs.clone(), target, mass) {
        Err(Error::EmptySelection { .. }) if !pairs.is_empty() => {
            let pairs = sorted_by_distance(pairs, target);
            let e0 = pairs[0].value;
            let thr = mass.powf(-0.75);
            let kept: Vec<usize> = (0..pairs.len())
                .filter(|&i| (pairs[i].value - e0).abs() < thr)
                .collect();
            Ok(build(pairs, kept, mass, true))
        }
        other => other,
    }
}

fn build(pairs: Vec<EigenPair>, kept: Vec<usize>, mass: f64, fallback: bool) -> EigenSelection {
    let values: Vec<f64> = kept.iter().map(|&i| pairs[i].value).collect();
    EigenSelection {
        e0: pairs[0].value,
        cluster_matrix: cluster_matrix(&values, mass),
        pairs,
        kept,
        fallback,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedState {
    /// `⟨Φ, Υ_j⟩` over the kept eigenvectors.
    pub coefficients: Vec<Complex64>,
    pub wave: Vec<Complex64>,
    pub chosen_mask: Vec<bool>,
    /// L² distance between the normalized densities of `Φ` and `wave`.
    pub distance: f64,
}

fn l2_distance(a: &Density, b: &Density) -> f64 {
    let s: f64 = a.values.iter().zip(&b.values).map(|(x, y)| (x - y).powi(2)).sum();
    (a.grid.h * s).sqrt()
}

/// Exhaustive search over cluster subsets for the projection whose density
/// is closest to that of `phi`. Ties go to fewer selected rows, then to the
/// lexicographically smallest mask.
pub fn project_best_subset(
    phi: &[Complex64],
    sel: &EigenSelection,
    grid: &Grid1D,
    channels: usize,
) -> Result<ProjectedState> {
    let jbar = sel.kept.len();
    if jbar > 10 {
        return Err(Error::InvalidInput(format!(
            "{jbar} kept eigenvalues, at most 10 supported"
        )));
    }
    let dim = phi.len();
    if dim != grid.n * channels || sel.kept_pairs().any(|p| p.vector.len() != dim) {
        return Err(Error::DimensionMismatch(format!(
            "trial state of length {dim}, grid {} x {channels}",
            grid.n
        )));
    }
    let coefficients: Vec<Complex64> = sel
        .kept_pairs()
        .map(|p| p.vector.iter().zip(phi).map(|(u, z)| z * u).sum())
        .collect();
    let clusters = sel.clusters();
    let cluster_waves: Vec<Vec<Complex64>> = clusters
        .iter()
        .map(|(_, cols)| {
            let mut w = vec![Complex64::new(0.0, 0.0); dim];
            for &j in cols {
                let c = coefficients[j];
                for (wi, u) in w.iter_mut().zip(&sel.pairs[sel.kept[j]].vector) {
                    *wi += c * u;
                }
            }
            w
        })
        .collect();
    let phi_norm = phi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let total: f64 = cluster_waves
        .iter()
        .map(|w| w.iter().map(|z| z.norm_sqr()).sum::<f64>())
        .sum::<f64>()
        .sqrt();
    if !(total > 1e-14 * phi_norm) {
        return Err(Error::OrthogonalTrialState);
    }
    let rho = Density::from_wave(*grid, phi, channels)?;

    let k = clusters.len();
    let candidates: Vec<(f64, Vec<bool>, usize)> = (1u32..(1 << k))
        .into_par_iter()
        .filter_map(|subset| {
            let mut w = vec![Complex64::new(0.0, 0.0); dim];
            for (c, cw) in cluster_waves.iter().enumerate() {
                if subset & (1 << c) != 0 {
                    for (wi, z) in w.iter_mut().zip(cw) {
                        *wi += z;
                    }
                }
            }
            let d = Density::from_wave(*grid, &w, channels).ok()?;
            let mut mask = vec![false; jbar];
            for (c, (row, _)) in clusters.iter().enumerate() {
                if subset & (1 << c) != 0 {
                    mask[*row] = true;
                }
            }
            Some((l2_distance(&rho, &d), mask, subset as usize))
        })
        .collect();
    let best = candidates
        .into_iter()
        .min_by(|a, b| {
            a.0.total_cmp(&b.0)
                .then(a.2.count_ones().cmp(&b.2.count_ones()))
                .then(a.1.cmp(&b.1))
        })
        .ok_or(Error::OrthogonalTrialState)?;
    let (distance, chosen_mask, subset) = best;
    let mut wave = vec![Complex64::new(0.0, 0.0); dim];
    for (c, cw) in cluster_waves.iter().enumerate() {
        if subset & (1 << c) != 0 {
            for (wi, z) in wave.iter_mut().zip(cw) {
                *wi += z;
            }
        }
    }
    Ok(ProjectedState {
        coefficients,
        wave,
        chosen_mask,
        distance,
    })
}
