//! Gauss–Legendre rules and composite sums on explicit panel lists.

use num_complex::Complex64;

/// Nodes and weights of the `n`-point rule on `[-1, 1]`, by Newton
/// iteration on `P_n` from Chebyshev starting guesses.
pub fn rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss–Legendre needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// `(P_n(z), P_n'(z))` by the three-term recurrence.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Quadrature nodes/weights for a sequence of panels.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Mesh {
    /// `order`-point rule on each interval between consecutive `edges`.
    pub fn from_edges(edges: &[f64], order: usize) -> Self {
        let (x, w) = rule(order);
        let mut nodes = Vec::with_capacity(edges.len() * order);
        let mut weights = Vec::with_capacity(edges.len() * order);
        for e in edges.windows(2) {
            let (a, b) = (e[0], e[1]);
            if b <= a {
                continue;
            }
            let h = 0.5 * (b - a);
            let c = 0.5 * (a + b);
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(c + h * xi);
                weights.push(h * wi);
            }
        }
        Self { nodes, weights }
    }

    /// `panels` equal panels on `[a, b]`.
    pub fn uniform(a: f64, b: f64, panels: usize, order: usize) -> Self {
        let edges: Vec<f64> = (0..=panels).map(|k| a + (b - a) * k as f64 / panels as f64).collect();
        Self::from_edges(&edges, order)
    }

    /// Panels on `[a, b]` graded geometrically towards `pole` down to width
    /// `scale / 4`, and no wider than `max_width` elsewhere.
    pub fn graded(a: f64, b: f64, pole: f64, scale: f64, max_width: f64, order: usize) -> Self {
        Self::graded_with_edge(a, b, pole, scale, max_width, false, order)
    }

    /// As [`Mesh::graded`], optionally also grading geometrically towards
    /// `a` for integrands with an algebraic singularity there.
    pub fn graded_with_edge(a: f64, b: f64, pole: f64, scale: f64, max_width: f64, edge: bool, order: usize) -> Self {
        let mut edges = vec![a, b];
        if edge {
            let mut d = max_width.min(b - a);
            for _ in 0..40 {
                d *= 0.5;
                edges.push(a + d);
            }
        }
        if pole > a && pole < b {
            edges.push(pole);
            let mut d = 0.25 * scale;
            while d < (b - a) {
                for e in [pole - d, pole + d] {
                    if e > a && e < b {
                        edges.push(e);
                    }
                }
                d *= 2.0;
            }
        }
        edges.sort_by(f64::total_cmp);
        let mut refined = vec![edges[0]];
        for e in edges.windows(2) {
            let k = ((e[1] - e[0]) / max_width).ceil().max(1.0) as usize;
            for j in 1..=k {
                refined.push(e[0] + (e[1] - e[0]) * j as f64 / k as f64);
            }
        }
        Self::from_edges(&refined, order)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn sum(&self, f: impl Fn(f64) -> Complex64) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rule_is_exact_for_polynomials() {
        for n in [1, 2, 5, 10, 20] {
            let (x, w) = rule(n);
            assert_abs_diff_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
            // degree 2n-1 exactness: ∫ x^{2n-2} = 2/(2n-1)
            let k = 2 * n as i32 - 2;
            let s: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k)).sum();
            assert_abs_diff_eq!(s, 2.0 / (k as f64 + 1.0), epsilon = 1e-13);
        }
    }

    #[test]
    fn graded_mesh_integrates_near_pole() {
        // ∫_0^2 dx / ((x-1)² + ε²) = (2/ε) atan(1/ε)
        let eps = 1e-3;
        let m = Mesh::graded(0.0, 2.0, 1.0, eps, 0.25, 16);
        let v = m.sum(|x| Complex64::new(1.0 / ((x - 1.0).powi(2) + eps * eps), 0.0));
        let exact = 2.0 / eps * (1.0 / eps).atan();
        assert!((v.re - exact).abs() < 1e-10 * exact);
    }
}
