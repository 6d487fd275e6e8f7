/// Cumulative trapezoid: `F[0] = 0`, `F[j] = F[j-1] + h (f[j-1] + f[j]) / 2`.
pub fn trapezoid_cumulative(f: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(f.len());
    let mut acc = 0.0;
    for (j, &v) in f.iter().enumerate() {
        if j > 0 {
            acc += 0.5 * h * (f[j - 1] + v);
        }
        out.push(acc);
    }
    out
}

/// Trapezoid rule over one period of a periodic grid function.
pub fn trapezoid_periodic(f: &[f64], h: f64) -> f64 {
    h * f.iter().sum::<f64>()
}

/// Gauss-Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Integrates `f` over `[a, b]` split into `panels` equal pieces.
    pub fn composite<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, panels: usize, mut f: F) -> f64 {
        let w = (b - a) / panels as f64;
        let mut acc = 0.0;
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * w;
            for (x, wt) in self.nodes.iter().zip(&self.weights) {
                acc += wt * f(mid + 0.5 * w * x);
            }
        }
        0.5 * w * acc
    }

    /// Node/weight pairs of the composite rule on `[a, b]`.
    pub fn composite_points(&self, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
        let w = (b - a) / panels as f64;
        let mut out = Vec::with_capacity(panels * self.nodes.len());
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * w;
            for (x, wt) in self.nodes.iter().zip(&self.weights) {
                out.push((mid + 0.5 * w * x, 0.5 * w * wt));
            }
        }
        out
    }
}

/// `n`-point Gauss-Legendre rule by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> GaussRule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            if n == 0 {
                break;
            }
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    GaussRule { nodes, weights }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_integrand() {
        let f = trapezoid_cumulative(&[1.0; 5], 0.5);
        assert_eq!(f, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    }

    #[test]
    fn linear_is_exact() {
        let xs: Vec<f64> = (0..5).map(|i| 0.25 * i as f64).collect();
        let f = trapezoid_cumulative(&xs, 0.25);
        assert_eq!(*f.last().unwrap(), 0.5);
    }

    #[test]
    fn quarter_ellipse_area() {
        let n = 10_000;
        let b = 2f64.sqrt();
        let h = b / n as f64;
        let f: Vec<f64> = (0..=n)
            .map(|j| {
                let s = j as f64 * h;
                (1.0 - s * s / 2.0).max(0.0).sqrt()
            })
            .collect();
        let last = *trapezoid_cumulative(&f, h).last().unwrap();
        let exact = std::f64::consts::PI / (2.0 * 2f64.sqrt());
        assert!((last - exact).abs() < 1e-6);
    }

    #[test]
    fn second_order_on_square() {
        let err = |n: usize| {
            let h = 1.0 / n as f64;
            let f: Vec<f64> = (0..=n).map(|j| (j as f64 * h).powi(2)).collect();
            (trapezoid_cumulative(&f, h).last().unwrap() - 1.0 / 3.0).abs()
        };
        let ratio = err(40) / err(80);
        assert!((ratio - 4.0).abs() < 0.2);
    }

    #[test]
    fn gauss_legendre_exactness() {
        for n in [1, 2, 5, 16] {
            let g = gauss_legendre(n);
            assert!((g.weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            let deg = 2 * n - 1;
            let s: f64 = g
                .nodes
                .iter()
                .zip(&g.weights)
                .map(|(x, w)| w * x.powi(deg as i32 - 1))
                .sum();
            let exact = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((s - exact).abs() < 1e-13, "n={n}");
        }
        let g = gauss_legendre(8);
        let v = g.composite(0.0, std::f64::consts::PI, 4, f64::sin);
        assert!((v - 2.0).abs() < 1e-13);
    }
}
