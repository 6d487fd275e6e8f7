//! Classical dynamics on a single surface: symplectic integrators, the
//! tangent map, hitting times and ergodic time averages.

use std::fmt;
use std::sync::Arc;

use crate::model::RealFn;
use crate::numerics::gauss_legendre;
use crate::wkb::{Expectation, TurningPointDensity};
use crate::{Error, Result};

/// `H(X, P) = P²/2 + λ(X)` with unit mass in the slow time.
#[derive(Clone)]
pub struct HamiltonianSystem1D {
    pub potential: RealFn,
    pub derivative: Option<RealFn>,
    pub second_derivative: Option<RealFn>,
    /// `[a, a + L)` onto which positions are folded before `λ`, its
    /// derivatives and observables are evaluated.
    pub period: Option<(f64, f64)>,
}

impl fmt::Debug for HamiltonianSystem1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HamiltonianSystem1D")
            .field("period", &self.period)
            .finish_non_exhaustive()
    }
}

impl HamiltonianSystem1D {
    pub fn new(potential: RealFn) -> Self {
        Self {
            potential,
            derivative: None,
            second_derivative: None,
            period: None,
        }
    }

    pub fn with_derivative(mut self, d: RealFn) -> Self {
        self.derivative = Some(d);
        self
    }

    pub fn with_second_derivative(mut self, d2: RealFn) -> Self {
        self.second_derivative = Some(d2);
        self
    }

    pub fn with_period(mut self, start: f64, length: f64) -> Self {
        self.period = Some((start, length));
        self
    }

    /// `λ(X) = k X² / 2`.
    pub fn harmonic(k: f64) -> Self {
        Self::new(Arc::new(move |x: f64| 0.5 * k * x * x))
            .with_derivative(Arc::new(move |x: f64| k * x))
            .with_second_derivative(Arc::new(move |_| k))
    }

    pub fn lambda(&self, x: f64) -> f64 {
        (self.potential)(self.wrap(x))
    }

    pub fn dlambda(&self, x: f64) -> f64 {
        match &self.derivative {
            Some(d) => d(self.wrap(x)),
            None => {
                let h = 1e-6 * (1.0 + x.abs());
                (self.lambda(x + h) - self.lambda(x - h)) / (2.0 * h)
            }
        }
    }

    pub fn d2lambda(&self, x: f64) -> f64 {
        match &self.second_derivative {
            Some(d) => d(self.wrap(x)),
            None => {
                let h = 1e-4 * (1.0 + x.abs());
                (self.dlambda(x + h) - self.dlambda(x - h)) / (2.0 * h)
            }
        }
    }

    pub fn energy(&self, x: f64, p: f64) -> f64 {
        0.5 * p * p + self.lambda(x)
    }

    /// Folds `x` into the period cell, or returns it unchanged.
    pub fn wrap(&self, x: f64) -> f64 {
        match self.period {
            Some((a, l)) => a + (x - a).rem_euclid(l),
            None => x,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Unfolded `(X, P)`.
    pub states: Vec<(f64, f64)>,
    /// `∂X_t/∂X_0`; empty unless the tangent map was propagated.
    pub jacobian: Vec<f64>,
    /// Times where the jacobian changes sign.
    pub caustics: Vec<f64>,
}

impl Trajectory {
    /// `max_t |H(X_t, P_t) − H(X_0, P_0)|`.
    pub fn energy_drift(&self, sys: &HamiltonianSystem1D) -> f64 {
        let (x0, p0) = self.states[0];
        let e0 = sys.energy(x0, p0);
        self.states
            .iter()
            .map(|&(x, p)| (sys.energy(x, p) - e0).abs())
            .fold(0.0, f64::max)
    }

    pub fn last(&self) -> (f64, f64) {
        *self.states.last().expect("trajectory holds the initial state")
    }
}

fn check_step(dt: f64) -> Result<()> {
    if dt == 0.0 || !dt.is_finite() {
        return Err(Error::InvalidInput(format!(
            "time step {dt} must be finite and nonzero"
        )));
    }
    Ok(())
}

fn run(sys: &HamiltonianSystem1D, x0: f64, p0: f64, dt: f64, steps: usize, tangent: bool) -> Result<Trajectory> {
    check_step(dt)?;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut jacobian = Vec::new();
    let mut caustics = Vec::new();
    let (mut x, mut p) = (x0, p0);
    let (mut dx, mut dq) = (1.0, 0.0);
    let mut force = sys.dlambda(x);
    let mut curv = if tangent { sys.d2lambda(x) } else { 0.0 };
    times.push(0.0);
    states.push((x, p));
    if tangent {
        jacobian.push(dx);
    }
    for n in 1..=steps {
        // kick-drift-kick
        let ph = p - 0.5 * dt * force;
        x += dt * ph;
        force = sys.dlambda(x);
        p = ph - 0.5 * dt * force;
        if tangent {
            let qh = dq - 0.5 * dt * curv * dx;
            let prev = dx;
            dx += dt * qh;
            curv = sys.d2lambda(x);
            dq = qh - 0.5 * dt * curv * dx;
            if prev != 0.0 && (prev > 0.0) != (dx > 0.0) {
                caustics.push(dt * ((n - 1) as f64 + prev / (prev - dx)));
            }
            jacobian.push(dx);
        }
        times.push(n as f64 * dt);
        states.push((x, p));
    }
    Ok(Trajectory {
        times,
        states,
        jacobian,
        caustics,
    })
}

/// Störmer-Verlet in kick-drift-kick form.
pub fn verlet_integrate(sys: &HamiltonianSystem1D, x0: f64, p0: f64, dt: f64, steps: usize) -> Result<Trajectory> {
    run(sys, x0, p0, dt, steps, false)
}

/// Kick-then-drift symplectic Euler. Started from `P0 + dt λ'(X0) / 2` its
/// positions coincide with those of [`verlet_integrate`] from `P0`.
pub fn symplectic_euler_integrate(
    sys: &HamiltonianSystem1D,
    x0: f64,
    p0: f64,
    dt: f64,
    steps: usize,
) -> Result<Trajectory> {
    check_step(dt)?;
    let mut times = vec![0.0];
    let mut states = vec![(x0, p0)];
    let (mut x, mut p) = (x0, p0);
    for n in 1..=steps {
        p -= dt * sys.dlambda(x);
        x += dt * p;
        times.push(n as f64 * dt);
        states.push((x, p));
    }
    Ok(Trajectory {
        times,
        states,
        jacobian: Vec::new(),
        caustics: Vec::new(),
    })
}

/// Verlet with the tangent pair `(δX, δP)` started at `(1, 0)`; fills the
/// jacobian and the caustic times.
pub fn monodromy_jacobian(sys: &HamiltonianSystem1D, x0: f64, p0: f64, dt: f64, steps: usize) -> Result<Trajectory> {
    run(sys, x0, p0, dt, steps, true)
}

/// Trapezoid-in-time average of `g(X_t)` over `[0, t_final]`. Positions are
/// folded into the period cell when there is one; leaving `|X| ≤ bound`
/// is an error.
pub fn time_average_observable(
    sys: &HamiltonianSystem1D,
    g: &dyn Fn(f64) -> f64,
    x0: f64,
    p0: f64,
    dt: f64,
    t_final: f64,
    bound: f64,
) -> Result<f64> {
    check_step(dt)?;
    if !(dt > 0.0 && t_final > 0.0) {
        return Err(Error::InvalidInput("time average needs dt > 0 and T > 0".into()));
    }
    let steps = (t_final / dt).round().max(1.0) as usize;
    let dt = t_final / steps as f64;
    let (mut x, mut p) = (x0, p0);
    let mut force = sys.dlambda(x);
    let mut prev = g(sys.wrap(x));
    let mut acc = 0.0;
    for n in 1..=steps {
        let ph = p - 0.5 * dt * force;
        x += dt * ph;
        force = sys.dlambda(x);
        p = ph - 0.5 * dt * force;
        let xw = sys.wrap(x);
        if !(xw.abs() <= bound) {
            return Err(Error::UnboundedExcursion {
                bound,
                t: n as f64 * dt,
            });
        }
        let cur = g(xw);
        acc += 0.5 * dt * (prev + cur);
        prev = cur;
    }
    Ok(acc / t_final)
}

/// Times at which `level(X_t)` changes sign, linearly interpolated within
/// the step.
pub fn hitting_times(traj: &Trajectory, level: &dyn Fn(f64) -> f64) -> Vec<f64> {
    let vals: Vec<f64> = traj.states.iter().map(|&(x, _)| level(x)).collect();
    let mut out = Vec::new();
    for i in 1..vals.len() {
        let (a, b) = (vals[i - 1], vals[i]);
        if a == 0.0 {
            if i == 1 {
                out.push(traj.times[0]);
            }
            continue;
        }
        if b == 0.0 || (a > 0.0) != (b > 0.0) {
            let s = a / (a - b);
            out.push(traj.times[i - 1] + s * (traj.times[i] - traj.times[i - 1]));
        }
    }
    out
}

/// Phase-space average of `g` over the energy shell through `x_start`:
/// `∫ g (E − λ)^{-1/2} / ∫ (E − λ)^{-1/2}`, between the turning points that
/// enclose `x_start`, or over a full period cell when the motion rotates.
pub fn microcanonical_average(
    sys: &HamiltonianSystem1D,
    g: &dyn Fn(f64) -> f64,
    energy: f64,
    x_start: f64,
) -> Result<f64> {
    if !(energy > sys.lambda(x_start)) {
        return Err(Error::NonpositiveKineticEnergy { x: x_start });
    }
    let scale = 1.0 + x_start.abs();
    let limit = match sys.period {
        Some((_, l)) => l,
        None => 1e3 * scale,
    };
    let find = |dir: f64| -> Option<f64> {
        let step = 1e-2 * scale.min(limit);
        let mut inside = x_start;
        let mut dist = 0.0;
        while dist < limit {
            dist += step;
            let x = x_start + dir * dist;
            if sys.lambda(x) >= energy {
                let mut outside = x;
                for _ in 0..200 {
                    let mid = 0.5 * (inside + outside);
                    if sys.lambda(mid) >= energy {
                        outside = mid;
                    } else {
                        inside = mid;
                    }
                }
                return Some(0.5 * (inside + outside));
            }
            inside = x;
        }
        None
    };
    match (find(-1.0), find(1.0), sys.period) {
        (Some(l), Some(r), _) => {
            let tp = TurningPointDensity::new(sys.potential.clone(), energy, l, r)?;
            Ok(tp.expect(g))
        }
        (None, None, Some((a, l))) => {
            let rule = gauss_legendre(16);
            let (mut num, mut den) = (0.0, 0.0);
            for (x, w) in rule.composite_points(a, a + l, 512) {
                let wt = w / (energy - sys.lambda(x)).sqrt();
                num += wt * g(x);
                den += wt;
            }
            Ok(num / den)
        }
        _ => Err(Error::UnboundedExcursion {
            bound: limit,
            t: f64::INFINITY,
        }),
    }
}
