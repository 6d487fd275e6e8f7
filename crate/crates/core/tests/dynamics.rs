use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;
use semiclassical::dynamics::{
    hitting_times, microcanonical_average, time_average_observable, verlet_integrate, HamiltonianSystem1D,
};
use semiclassical::model::{Branch, TwoStateModel};

/// Lower surface of the gap model folded onto `[-π, π)`. The coupling is
/// not periodic, so the folded surface has a cusp at the seam.
fn lower_surface(c: f64) -> HamiltonianSystem1D {
    let model = TwoStateModel::cosine(c, 1000.0).unwrap();
    let f = {
        let model = model.clone();
        move |x: f64| model.surface_at(Branch::Minus, x)
    };
    let df = move |x: f64| model.surface_deriv(Branch::Minus, x);
    HamiltonianSystem1D::new(Arc::new(f))
        .with_derivative(Arc::new(df))
        .with_period(-PI, 2.0 * PI)
}

#[test]
fn ergodic_average_on_two_state_surface() {
    let sys = lower_surface(5.0);
    let g = |x: f64| x * x + x;
    // trapped in the central well, then rotating over the seam
    for energy in [-4.7, 0.0, 1.2] {
        let p0 = (2.0 * (energy - sys.lambda(0.0))).sqrt();
        let ta = time_average_observable(&sys, &g, 0.0, p0, 2e-4, 2000.0, 10.0).unwrap();
        let mc = microcanonical_average(&sys, &g, energy, 0.0).unwrap();
        assert!((ta - mc).abs() < 1e-2 * mc.abs().max(1.0), "E={energy}: {ta} vs {mc}");
    }
}

#[test]
fn return_times_are_bounded() {
    let sys = lower_surface(5.0);
    let p0 = (2.0 * (-4.7 - sys.lambda(0.0))).sqrt();
    let traj = verlet_integrate(&sys, 0.0, p0, 1e-3, 100_000).unwrap();
    let hits = hitting_times(&traj, &|x| x - 1e-3);
    assert!(hits.len() > 10);
    let gaps: Vec<f64> = hits.windows(3).map(|w| w[2] - w[0]).collect();
    let (lo, hi) = gaps.iter().fold((f64::MAX, 0.0f64), |(a, b), g| (a.min(*g), b.max(*g)));
    assert!(hi - lo < 1e-2 * lo, "return times spread {lo}..{hi}");
}

fn quartic() -> HamiltonianSystem1D {
    HamiltonianSystem1D::new(Arc::new(|x: f64| 0.25 * x.powi(4) - 0.5 * x * x))
        .with_derivative(Arc::new(|x: f64| x.powi(3) - x))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn reversal_on_double_well(x0 in -1.5f64..1.5, p0 in -1.0f64..1.0) {
        let sys = quartic();
        let fwd = verlet_integrate(&sys, x0, p0, 0.01, 500).unwrap();
        let (x, p) = fwd.last();
        let (xb, pb) = verlet_integrate(&sys, x, p, -0.01, 500).unwrap().last();
        prop_assert!((xb - x0).abs() < 1e-10 && (pb - p0).abs() < 1e-10);
    }

    #[test]
    fn drift_is_second_order(x0 in 0.2f64..1.4) {
        let sys = quartic();
        let drift = |dt: f64| verlet_integrate(&sys, x0, 0.3, dt, (5.0 / dt) as usize).unwrap().energy_drift(&sys);
        let ratio = drift(0.02) / drift(0.01);
        prop_assert!((3.0..5.0).contains(&ratio), "ratio {}", ratio);
    }
}
