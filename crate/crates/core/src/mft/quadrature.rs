//! Gaussian-measure quadrature rules.
//!
//! Gauss–Hermite rules integrate smooth functions against `Dz`. The replica
//! integrands `g(β(sz + μ))` develop a kink of width `1/(βs)` at
//! `z₀ = −μ/s` at low temperature, which a global polynomial rule resolves
//! poorly, so those use composite Gauss–Legendre panels graded towards `z₀`.

use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("quadrature order must be at least {min}, got {got}")]
    Order { min: usize, got: usize },
    #[error("integrand is not finite at z = {z}")]
    NonFinite { z: f64 },
}

/// Nodes and weights with `Σ w_i f(z_i) ≈ ∫ dz e^{−z²/2}/√(2π) f(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Golub–Welsch for the probabilists' Hermite weight.
pub fn gauss_hermite(order: usize) -> GaussRule {
    let jac = DMatrix::from_fn(order, order, |i, j| {
        if i + 1 == j || j + 1 == i {
            (i.max(j) as f64).sqrt()
        } else {
            0.0
        }
    });
    let eig = jac.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..order)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // symmetrize against round-off
    for i in 0..order / 2 {
        let j = order - 1 - i;
        let x = 0.5 * (pairs[j].0 - pairs[i].0);
        let w = 0.5 * (pairs[i].1 + pairs[j].1);
        pairs[i] = (-x, w);
        pairs[j] = (x, w);
    }
    if order % 2 == 1 {
        pairs[order / 2].0 = 0.0;
    }
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    GaussRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1 / total).collect(),
    }
}

/// `∫ Dz f(z)` with a Gauss–Hermite rule of the given order.
pub fn gaussian_quadrature_expectation<F: Fn(f64) -> f64>(
    f: F,
    order: usize,
) -> Result<f64, QuadratureError> {
    if order < 16 {
        return Err(QuadratureError::Order { min: 16, got: order });
    }
    let rule = gauss_hermite(order);
    let mut acc = 0.0;
    for (&z, &w) in rule.nodes.iter().zip(&rule.weights) {
        let v = f(z);
        if !v.is_finite() {
            return Err(QuadratureError::NonFinite { z });
        }
        acc += w * v;
    }
    Ok(acc)
}

/// Gauss–Legendre nodes and weights on `[−1, 1]` by Newton iteration.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = x;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
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
    (nodes, weights)
}

/// Composite rule for `∫ Dz g(β(s z + μ))` with panels graded towards the
/// kink at `z₀ = −μ/s`.
#[derive(Debug, Clone)]
pub struct KinkRule {
    legendre: (Vec<f64>, Vec<f64>),
    cutoff: f64,
}

impl KinkRule {
    /// `points` Gauss–Legendre nodes per panel; the Gaussian tail beyond
    /// `|z| = 12` is below double precision and dropped.
    pub fn new(points: usize) -> Self {
        Self {
            legendre: gauss_legendre(points.max(2)),
            cutoff: 12.0,
        }
    }

    fn breakpoints(&self, kink: f64, width: f64) -> Vec<f64> {
        let (lo, hi) = (-self.cutoff, self.cutoff);
        let mut pts = vec![lo, hi];
        let k = kink.clamp(lo, hi);
        if k > lo && k < hi {
            pts.push(k);
        }
        let mut push_side = |dir: f64| {
            let mut h = width.clamp(1e-6, 1.0);
            let mut z = k;
            loop {
                z += dir * h;
                if z <= lo || z >= hi {
                    break;
                }
                pts.push(z);
                h = (2.0 * h).min(1.0);
            }
        };
        push_side(1.0);
        push_side(-1.0);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Nodes `z_i` and weights including the Gaussian density.
    pub fn nodes(&self, kink: f64, width: f64) -> Vec<(f64, f64)> {
        let pts = self.breakpoints(kink, width);
        let (x, w) = &self.legendre;
        let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        let mut out = Vec::with_capacity((pts.len() - 1) * x.len());
        for win in pts.windows(2) {
            let (a, b) = (win[0], win[1]);
            let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
            for (xi, wi) in x.iter().zip(w) {
                let z = mid + half * xi;
                out.push((z, half * wi * norm * (-0.5 * z * z).exp()));
            }
        }
        out
    }
}
