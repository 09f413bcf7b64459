//! Mean-field theory of the d-dimensional Z_2 gauge model and its
//! replica-symmetric extension with Gaussian random plaquette couplings.
//!
//! `N_L = 2/(d−1)·N_P` links per plaquette and `C = (d−1)/2` are used
//! throughout; all free energies are per plaquette.

mod quadrature;
mod replica;
mod sweep;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use quadrature::{
    gauss_hermite, gauss_legendre, gaussian_quadrature_expectation, GaussRule, KinkRule,
    QuadratureError,
};
pub use replica::{
    disorder_average, rmft_expectations, rmft_free_energy, rmft_gradient, rmft_solve, Candidate,
    Phase, RmftExpectations, RmftOptions, RmftParams, RmftSolution, EPS_ORDER,
};
pub use sweep::{
    marching_squares, phase_diagram_sweep, Axes, Boundary, GridPoint, PhaseDiagram, SweepOptions,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MftError {
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("no start converged; final states {trajectories:?}")]
    NotConverged {
        /// `(U0, Q, gradient norm)` of every start after the last iteration.
        trajectories: Vec<(f64, f64, f64)>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MftParams {
    pub d: u32,
    pub beta: f64,
    pub h: f64,
    pub u0: f64,
}

impl MftParams {
    pub fn new(d: u32, beta: f64, h: f64, u0: f64) -> Self {
        Self { d, beta, h, u0 }
    }

    pub fn validate(&self) -> Result<(), MftError> {
        if self.d < 2 {
            return Err(MftError::Domain(format!("dimension must be at least 2, got {}", self.d)));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(MftError::Domain(format!("beta must be positive, got {}", self.beta)));
        }
        if !self.h.is_finite() || !self.u0.is_finite() {
            return Err(MftError::Domain("parameters must be finite".into()));
        }
        Ok(())
    }

    /// `C = (d−1)/2`.
    pub fn c(&self) -> f64 {
        f64::from(self.d - 1) / 2.0
    }
}

/// `log(2 cosh x)` without overflow.
pub fn log2cosh(x: f64) -> f64 {
    let a = x.abs();
    if a > 30.0 {
        a + (-2.0 * a).exp().ln_1p()
    } else {
        (2.0 * a.cosh()).ln()
    }
}

fn field(p: &MftParams) -> f64 {
    p.beta * (2.0 * f64::from(p.d - 1) * p.u0.powi(3) + p.h)
}

/// `F/N_P = 3U0⁴ − (1/β)(2/(d−1)) log 2cosh β(2(d−1)U0³ + h)`.
pub fn mft_free_energy(p: &MftParams) -> Result<f64, MftError> {
    p.validate()?;
    Ok(3.0 * p.u0.powi(4) - log2cosh(field(p)) / (p.beta * p.c()))
}

/// Link magnetization `m = tanh β(2(d−1)U0³ + h)`.
pub fn mft_magnetization(p: &MftParams) -> Result<f64, MftError> {
    p.validate()?;
    Ok(field(p).tanh())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalMinimum {
    pub u0: f64,
    pub free_energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MftMinimum {
    pub u0: f64,
    pub free_energy: f64,
    /// All local minima on `[0, 1.2]`, in increasing `U0`.
    pub local_minima: Vec<LocalMinimum>,
}

const SCAN_MAX: f64 = 1.2;
const SCAN_STEP: f64 = 1e-3;

fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > 1e-12 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Sharpens a minimum at `u > 0` to a root of `U − m(U)` by bisection.
fn polish(p: &MftParams, u: f64) -> f64 {
    let g = |x: f64| x - field(&MftParams { u0: x, ..*p }).tanh();
    let (mut a, mut b) = ((u - 2e-3).max(1e-9), u + 2e-3);
    let (ga, gb) = (g(a), g(b));
    if ga.is_nan() || gb.is_nan() || ga * gb > 0.0 {
        return u;
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if (g(mid) < 0.0) == (ga < 0.0) {
            a = mid;
        } else {
            b = mid;
        }
    }
    let r = 0.5 * (a + b);
    let f = |x: f64| 3.0 * x.powi(4) - log2cosh(field(&MftParams { u0: x, ..*p })) / (p.beta * p.c());
    if f(r) <= f(u) + 1e-15 {
        r
    } else {
        u
    }
}

/// Dense scan of `U0 ∈ [0, 1.2]` refined by golden section.
pub fn mft_minimize(d: u32, beta: f64, h: f64) -> Result<MftMinimum, MftError> {
    let base = MftParams::new(d, beta, h, 0.0);
    base.validate()?;
    let f = |u: f64| 3.0 * u.powi(4) - log2cosh(field(&MftParams { u0: u, ..base })) / (beta * base.c());
    let n = (SCAN_MAX / SCAN_STEP).round() as usize;
    let grid: Vec<f64> = (0..=n).map(|i| i as f64 * SCAN_STEP).collect();
    let vals: Vec<f64> = grid.iter().map(|&u| f(u)).collect();
    let mut local_minima = Vec::new();
    for i in 0..n {
        let left = i == 0 || vals[i] <= vals[i - 1];
        if left && vals[i] <= vals[i + 1] {
            let u = if i == 0 {
                // U0 = 0 is always stationary
                let r = golden_section(f, 0.0, grid[1]);
                if f(r) < f(0.0) { r } else { 0.0 }
            } else {
                polish(&base, golden_section(f, grid[i - 1], grid[i + 1]))
            };
            local_minima.push(LocalMinimum { u0: u, free_energy: f(u) });
        }
    }
    let best = *local_minima
        .iter()
        .min_by(|a, b| a.free_energy.total_cmp(&b.free_energy))
        .ok_or_else(|| MftError::Domain("no minimum on the scan interval".into()))?;
    Ok(MftMinimum {
        u0: best.u0,
        free_energy: best.free_energy,
        local_minima,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstOrderPoint {
    pub beta_c: f64,
    pub u_ordered: f64,
    pub delta_f: f64,
}

/// `F(U_local) − F(0)` with `+1` where no ordered minimum exists.
fn ordered_excess(d: u32, beta: f64) -> Result<(f64, f64), MftError> {
    let m = mft_minimize(d, beta, 0.0)?;
    let f0 = mft_free_energy(&MftParams::new(d, beta, 0.0, 0.0))?;
    Ok(m.local_minima
        .iter()
        .filter(|lm| lm.u0 > 0.05)
        .map(|lm| (lm.free_energy - f0, lm.u0))
        .next_back()
        .unwrap_or((1.0, 0.0)))
}

/// Bisection on `F(0) − F(U_local)` for the first-order transition at `h = 0`.
pub fn first_order_beta(d: u32, lo: f64, hi: f64) -> Result<FirstOrderPoint, MftError> {
    let (mut a, mut b) = (lo, hi);
    let (ga, _) = ordered_excess(d, a)?;
    let (gb, _) = ordered_excess(d, b)?;
    if ga <= 0.0 || gb >= 0.0 {
        return Err(MftError::Domain(format!(
            "no first-order transition bracketed in ({lo}, {hi})"
        )));
    }
    while b - a > 1e-13 {
        let mid = 0.5 * (a + b);
        if ordered_excess(d, mid)?.0 > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let (delta_f, u_ordered) = ordered_excess(d, b)?;
    Ok(FirstOrderPoint {
        beta_c: b,
        u_ordered,
        delta_f,
    })
}
