//! Gauss–Legendre rules and the endpoint-smoothing composite used for
//! integrands with square-root behaviour at panel ends.

use std::f64::consts::PI;

#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// n-point rule on [−1, 1]; nodes by Newton iteration on P_n.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "need at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
        let s: f64 = self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(mid + half * x)).sum();
        s * half
    }

    /// Composite rule on `panels` equal panels, each mapped through the
    /// smoothstep x = a + (b − a)(3t² − 2t³). The Jacobian vanishes at both
    /// ends, which absorbs √-type endpoint singularities.
    pub fn integrate_smoothed(&self, a: f64, b: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let w = b - a;
        let g = |t: f64| {
            let x = a + w * t * t * (3.0 - 2.0 * t);
            f(x) * w * 6.0 * t * (1.0 - t)
        };
        let p = panels.max(1);
        (0..p).map(|i| self.integrate(i as f64 / p as f64, (i + 1) as f64 / p as f64, g)).sum()
    }

    /// Smoothstep-mapped rule with adaptive bisection in t: a panel is
    /// accepted once it agrees with the sum of its halves to `tol` (absolute).
    /// Returns (value, summed disagreement of the accepted panels, panel count).
    pub fn integrate_adaptive(&self, a: f64, b: f64, tol: f64, f: impl Fn(f64) -> f64) -> (f64, f64, usize) {
        if b <= a {
            return (0.0, 0.0, 0);
        }
        let w = b - a;
        let g = |t: f64| {
            let x = a + w * t * t * (3.0 - 2.0 * t);
            f(x) * w * 6.0 * t * (1.0 - t)
        };
        let mut stack = vec![(0.0, 1.0, self.integrate(0.0, 1.0, g), 0u32)];
        let (mut total, mut err, mut panels) = (0.0, 0.0, 0);
        while let Some((l, h, whole, depth)) = stack.pop() {
            let m = (l + h) / 2.0;
            let (left, right) = (self.integrate(l, m, g), self.integrate(m, h, g));
            let diff = (left + right - whole).abs();
            let share = (tol * (h - l)).max(1e-14 * (left.abs() + right.abs()));
            if diff <= share || depth >= 30 {
                total += left + right;
                err += diff;
                panels += 2;
            } else {
                stack.push((l, m, left, depth + 1));
                stack.push((m, h, right, depth + 1));
            }
        }
        (total, err, panels)
    }
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_polynomials() {
        let g = GaussLegendre::new(8);
        // 2n − 1 = 15 degree is integrated exactly.
        let v = g.integrate(-1.0, 2.0, |x| x.powi(15) - 3.0 * x.powi(4));
        let exact = (2f64.powi(16) - 1.0) / 16.0 - 3.0 * (32.0 + 1.0) / 5.0;
        assert!((v - exact).abs() < 1e-9 * exact.abs());
    }

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 24, 64] {
            let g = GaussLegendre::new(n);
            let s: f64 = g.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n} sum={s}");
        }
    }

    #[test]
    fn smoothing_handles_sqrt_ends() {
        let g = GaussLegendre::new(16);
        // ∫₀¹ √(x(1−x)) dx = π/8
        let v = g.integrate_smoothed(0.0, 1.0, 4, |x| (x * (1.0 - x)).max(0.0).sqrt());
        assert!((v - PI / 8.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn adaptive_resolves_near_endpoint_kink() {
        let g = GaussLegendre::new(8);
        // √|x − 1 − 10⁻⁵| has its kink just outside [0, 1].
        let e = 1e-5f64;
        let exact = 2.0 / 3.0 * ((1.0 + e).powf(1.5) - e.powf(1.5));
        let (v, err, _) = g.integrate_adaptive(0.0, 1.0, 1e-10, |x| (1.0 + e - x).sqrt());
        assert!((v - exact).abs() < 1e-8, "{v} vs {exact}");
        assert!(err < 1e-8);
    }
}
