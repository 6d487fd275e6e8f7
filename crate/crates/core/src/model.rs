//! Discrete Schrödinger operators and the two-state electronic structure.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::numerics::SymBandMatrix;
use crate::{Error, Result};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Uniform periodic mesh on `(a, b]`: point `j` (0-based) sits at
/// `a + (j + 1) h`, so the last point is `b` and `b ≡ a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub h: f64,
}

impl Grid1D {
    pub fn new(n: usize, a: f64, b: f64) -> Result<Self> {
        if n == 0 || !(b > a) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidInput(format!(
                "grid needs n >= 1 and a < b, got n = {n}, ({a}, {b}]"
            )));
        }
        Ok(Self {
            n,
            a,
            b,
            h: (b - a) / n as f64,
        })
    }

    pub fn point(&self, j: usize) -> f64 {
        self.a + (j + 1) as f64 * self.h
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.point(j)).collect()
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    /// Index of the grid point nearest `x` (ties toward the lower index).
    pub fn nearest_index(&self, x: f64) -> usize {
        let r = ((x - self.a) / self.h - 1.0).round();
        r.clamp(0.0, (self.n - 1) as f64) as usize
    }

    pub fn same_as(&self, other: &Grid1D) -> bool {
        self.n == other.n && self.a == other.a && self.b == other.b
    }
}

/// Heavy potential `V`, coupling shape `e` and gap constant `c` of the
/// two-state matrix `[[V, V e / 2 + c], [V e / 2 + c, 0]]`.
#[derive(Clone)]
pub struct TwoStateModel {
    pub potential: RealFn,
    pub potential_deriv: Option<RealFn>,
    pub coupling: RealFn,
    pub coupling_deriv: Option<RealFn>,
    pub c: f64,
    pub mass: f64,
    /// Reference abscissa fixing the branch labels when `c = 0`.
    pub sgn_anchor: f64,
}

impl fmt::Debug for TwoStateModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TwoStateModel")
            .field("c", &self.c)
            .field("mass", &self.mass)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl TwoStateModel {
    pub fn new(potential: RealFn, coupling: RealFn, c: f64, mass: f64) -> Result<Self> {
        if !(c >= 0.0) {
            return Err(Error::InvalidInput(format!("gap constant c = {c} must be >= 0")));
        }
        if !(mass > 0.0) {
            return Err(Error::InvalidInput(format!("mass M = {mass} must be > 0")));
        }
        Ok(Self {
            potential,
            potential_deriv: None,
            coupling,
            coupling_deriv: None,
            c,
            mass,
            sgn_anchor: -PI,
        })
    }

    /// `V = -2 cos X + cos 4X`, `e = 1 + X²`.
    pub fn cosine(c: f64, mass: f64) -> Result<Self> {
        let mut m = Self::new(
            Arc::new(|x: f64| -2.0 * x.cos() + (4.0 * x).cos()),
            Arc::new(|x: f64| 1.0 + x * x),
            c,
            mass,
        )?;
        m.potential_deriv = Some(Arc::new(|x: f64| 2.0 * x.sin() - 4.0 * (4.0 * x).sin()));
        m.coupling_deriv = Some(Arc::new(|x: f64| 2.0 * x));
        Ok(m)
    }

    pub fn off_diagonal(&self, x: f64) -> f64 {
        0.5 * (self.potential)(x) * (self.coupling)(x) + self.c
    }

    /// The 2×2 block `[[V, w], [w, 0]]` at `x`.
    pub fn block(&self, x: f64) -> [[f64; 2]; 2] {
        let v = (self.potential)(x);
        let w = self.off_diagonal(x);
        [[v, w], [w, 0.0]]
    }

    fn sign(v: f64) -> f64 {
        if v < 0.0 {
            -1.0
        } else {
            1.0
        }
    }

    /// `Sgn(x)` for an off-grid abscissa.
    pub fn sgn_at(&self, x: f64) -> f64 {
        if self.c > 0.0 {
            return 1.0;
        }
        let v = (self.potential)(x);
        if v == 0.0 {
            return Self::sign((self.potential)(self.sgn_anchor));
        }
        Self::sign((self.potential)(self.sgn_anchor)) * Self::sign(v)
    }

    fn eigenvalues_with(&self, x: f64, sgn: f64) -> (f64, f64) {
        let v = (self.potential)(x);
        let w = self.off_diagonal(x);
        let root = (v * v + 4.0 * w * w).sqrt();
        (0.5 * (v + sgn * root), 0.5 * (v - sgn * root))
    }

    /// `λ±(x)` with the sign convention evaluated at `x`.
    pub fn surface_at(&self, branch: Branch, x: f64) -> f64 {
        let (p, m) = self.eigenvalues_with(x, self.sgn_at(x));
        match branch {
            Branch::Plus => p,
            Branch::Minus => m,
        }
    }

    fn derivative(f: &RealFn, df: &Option<RealFn>, x: f64) -> f64 {
        match df {
            Some(d) => d(x),
            None => {
                let h = 1e-6 * (1.0 + x.abs());
                (f(x + h) - f(x - h)) / (2.0 * h)
            }
        }
    }

    /// `dλ±/dx` by the chain rule on `V` and `e`.
    pub fn surface_deriv(&self, branch: Branch, x: f64) -> f64 {
        let v = (self.potential)(x);
        let e = (self.coupling)(x);
        let dv = Self::derivative(&self.potential, &self.potential_deriv, x);
        let de = Self::derivative(&self.coupling, &self.coupling_deriv, x);
        let pm = match branch {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        };
        if self.c == 0.0 {
            // λ = V μ with μ = (1 ± s0 √(1+e²)) / 2, smooth through V = 0
            let s0 = Self::sign((self.potential)(self.sgn_anchor));
            let r = (1.0 + e * e).sqrt();
            let mu = 0.5 * (1.0 + pm * s0 * r);
            let dmu = 0.5 * pm * s0 * e * de / r;
            return dv * mu + v * dmu;
        }
        let w = 0.5 * v * e + self.c;
        let dw = 0.5 * (dv * e + v * de);
        let root = (v * v + 4.0 * w * w).sqrt();
        0.5 * (dv + pm * (v * dv + 4.0 * w * dw) / root)
    }
}

/// Unit eigenvector of the symmetric 2×2 matrix `m` for eigenvalue `lam`.
fn eigvec2(m: [[f64; 2]; 2], lam: f64) -> Option<[f64; 2]> {
    let c1 = [m[0][1], lam - m[0][0]];
    let c2 = [lam - m[1][1], m[1][0]];
    let n1 = c1[0].hypot(c1[1]);
    let n2 = c2[0].hypot(c2[1]);
    let (c, n) = if n1 >= n2 { (c1, n1) } else { (c2, n2) };
    (n > 0.0).then(|| [c[0] / n, c[1] / n])
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElectronicSurfaces {
    pub lambda_plus: Vec<f64>,
    pub lambda_minus: Vec<f64>,
    pub v_plus: Vec<[f64; 2]>,
    pub v_minus: Vec<[f64; 2]>,
    pub sgn: Vec<f64>,
}

impl ElectronicSurfaces {
    pub fn values(&self, branch: Branch) -> &[f64] {
        match branch {
            Branch::Plus => &self.lambda_plus,
            Branch::Minus => &self.lambda_minus,
        }
    }

    pub fn vectors(&self, branch: Branch) -> &[[f64; 2]] {
        match branch {
            Branch::Plus => &self.v_plus,
            Branch::Minus => &self.v_minus,
        }
    }
}

/// Eigenvalue curves, sign convention and continuous unit eigenvectors of
/// the 2×2 blocks on every grid point.
pub fn electronic_surfaces(model: &TwoStateModel, grid: &Grid1D) -> ElectronicSurfaces {
    let n = grid.n;
    let mut out = ElectronicSurfaces {
        lambda_plus: Vec::with_capacity(n),
        lambda_minus: Vec::with_capacity(n),
        v_plus: Vec::with_capacity(n),
        v_minus: Vec::with_capacity(n),
        sgn: Vec::with_capacity(n),
    };
    let s0 = TwoStateModel::sign((model.potential)(model.sgn_anchor));
    for j in 0..n {
        let x = grid.point(j);
        let v = (model.potential)(x);
        let sgn = if model.c > 0.0 {
            1.0
        } else if v == 0.0 {
            out.sgn.last().copied().unwrap_or(s0)
        } else {
            s0 * TwoStateModel::sign(v)
        };
        let (lp, lm) = model.eigenvalues_with(x, sgn);
        let (vp, vm) = if model.c > 0.0 {
            let blk = model.block(x);
            (eigvec2(blk, lp), eigvec2(blk, lm))
        } else {
            // the block is V·B with B = [[1, e/2], [e/2, 0]]; use B's
            // eigenvectors, which stay defined where V vanishes
            let e = (model.coupling)(x);
            let r = (1.0 + e * e).sqrt();
            let b = [[1.0, 0.5 * e], [0.5 * e, 0.0]];
            (eigvec2(b, 0.5 * (1.0 + s0 * r)), eigvec2(b, 0.5 * (1.0 - s0 * r)))
        };
        let mut vp = vp.unwrap_or([1.0, 0.0]);
        let mut vm = vm.unwrap_or([-vp[1], vp[0]]);
        if let Some(prev) = out.v_plus.last() {
            if prev[0] * vp[0] + prev[1] * vp[1] < 0.0 {
                vp = [-vp[0], -vp[1]];
            }
        }
        if let Some(prev) = out.v_minus.last() {
            if prev[0] * vm[0] + prev[1] * vm[1] < 0.0 {
                vm = [-vm[0], -vm[1]];
            }
        }
        out.lambda_plus.push(lp);
        out.lambda_minus.push(lm);
        out.v_plus.push(vp);
        out.v_minus.push(vm);
        out.sgn.push(sgn);
    }
    out
}

/// The surface lying strictly below `e0` on the whole grid; when both do,
/// the one with the larger minimum gap `e0 - λ`.
pub fn select_surface(surfaces: &ElectronicSurfaces, e0: f64) -> Result<(Branch, Vec<f64>)> {
    let gap = |v: &[f64]| v.iter().map(|l| e0 - l).fold(f64::INFINITY, f64::min);
    let gp = gap(&surfaces.lambda_plus);
    let gm = gap(&surfaces.lambda_minus);
    let branch = match (gp > 0.0, gm > 0.0) {
        (false, false) => return Err(Error::NoClassicallyAllowedSurface { e0 }),
        (true, false) => Branch::Plus,
        (false, true) => Branch::Minus,
        (true, true) => {
            if gp > gm {
                Branch::Plus
            } else {
                Branch::Minus
            }
        }
    };
    Ok((branch, surfaces.values(branch).to_vec()))
}

/// Finite-difference Schrödinger operator on a periodic grid.
#[derive(Debug, Clone)]
pub struct DiscreteHamiltonian {
    pub matrix: SymBandMatrix,
    pub grid: Grid1D,
    pub mass: f64,
    /// 1 for scalar problems, 2 for the interleaved two-state problem.
    pub channels: usize,
}

/// Interleaved `(X_j, x₋), (X_j, x₊)` ordering; row `2j` carries `V`.
pub fn build_two_state_hamiltonian(model: &TwoStateModel, grid: &Grid1D) -> Result<DiscreteHamiltonian> {
    if grid.n < 3 {
        return Err(Error::InvalidInput(format!(
            "need at least 3 grid points, got {}",
            grid.n
        )));
    }
    let n = grid.n;
    let k = 1.0 / (2.0 * model.mass * grid.h * grid.h);
    let mut a = SymBandMatrix::new(2 * n, 2)?;
    for j in 0..n {
        let blk = model.block(grid.point(j));
        for s in 0..2 {
            a.set(2 * j + s, 2 * j + s, 2.0 * k + blk[s][s])?;
            a.set(2 * j + s, 2 * ((j + 1) % n) + s, -k)?;
        }
        a.set(2 * j + 1, 2 * j, blk[1][0])?;
    }
    Ok(DiscreteHamiltonian {
        matrix: a,
        grid: *grid,
        mass: model.mass,
        channels: 2,
    })
}

pub fn build_scalar_hamiltonian<V: Fn(f64) -> f64>(
    potential: V,
    mass: f64,
    grid: &Grid1D,
) -> Result<DiscreteHamiltonian> {
    if grid.n < 3 {
        return Err(Error::InvalidInput(format!(
            "need at least 3 grid points, got {}",
            grid.n
        )));
    }
    if !(mass > 0.0) {
        return Err(Error::InvalidInput(format!("mass M = {mass} must be > 0")));
    }
    let n = grid.n;
    let k = 1.0 / (2.0 * mass * grid.h * grid.h);
    let mut a = SymBandMatrix::new(n, 1)?;
    for j in 0..n {
        a.set(j, j, 2.0 * k + potential(grid.point(j)))?;
        a.set(j, (j + 1) % n, -k)?;
    }
    Ok(DiscreteHamiltonian {
        matrix: a,
        grid: *grid,
        mass,
        channels: 1,
    })
}
