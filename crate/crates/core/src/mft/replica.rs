use rand::Rng;
use serde::{Deserialize, Serialize};

use super::quadrature::{gauss_hermite, KinkRule};
use super::{log2cosh, MftError};
use crate::seed;

/// Order-parameter threshold separating zero from nonzero mean fields.
pub const EPS_ORDER: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RmftParams {
    pub d: u32,
    pub beta: f64,
    pub h: f64,
    pub u0: f64,
    /// Width of the coupling distribution.
    pub j: f64,
    /// Mean of the coupling distribution.
    pub j0: f64,
    pub q: f64,
    /// Total Gauss–Legendre budget; a quarter of it goes to each panel.
    pub quad_order: usize,
}

impl RmftParams {
    pub fn new(d: u32, beta: f64, j: f64, j0: f64, h: f64, u0: f64, q: f64) -> Self {
        Self {
            d,
            beta,
            h,
            u0,
            j,
            j0,
            q,
            quad_order: 64,
        }
    }

    pub fn validate(&self) -> Result<(), MftError> {
        if self.d < 2 {
            return Err(MftError::Domain(format!("dimension must be at least 2, got {}", self.d)));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(MftError::Domain(format!("beta must be positive, got {}", self.beta)));
        }
        if !(self.j >= 0.0 && self.j.is_finite()) {
            return Err(MftError::Domain(format!("J must be non-negative, got {}", self.j)));
        }
        if !(self.q >= 0.0 && self.q.is_finite()) {
            return Err(MftError::Domain(format!("Q must be non-negative, got {}", self.q)));
        }
        if ![self.h, self.u0, self.j0].iter().all(|v| v.is_finite()) {
            return Err(MftError::Domain("parameters must be finite".into()));
        }
        if self.quad_order < 16 {
            return Err(MftError::Domain(format!(
                "quadrature order must be at least 16, got {}",
                self.quad_order
            )));
        }
        Ok(())
    }

    pub fn c(&self) -> f64 {
        f64::from(self.d - 1) / 2.0
    }

    /// `H̃(z) = slope·z + offset`.
    fn field(&self) -> (f64, f64) {
        let c = self.c();
        let slope = 2.0 * self.j * (c * self.q.powi(3)).sqrt();
        let offset = 4.0 * self.j0 * c * self.u0.powi(3) + self.h;
        (slope, offset)
    }
}

/// Gaussian averages of functions of `βH̃(z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RmftExpectations {
    pub log2cosh: f64,
    pub tanh: f64,
    pub tanh2: f64,
}

pub fn rmft_expectations(p: &RmftParams) -> Result<RmftExpectations, MftError> {
    p.validate()?;
    let (slope, offset) = p.field();
    let (bs, bm) = (p.beta * slope, p.beta * offset);
    if bs == 0.0 {
        let t = bm.tanh();
        return Ok(RmftExpectations {
            log2cosh: log2cosh(bm),
            tanh: t,
            tanh2: t * t,
        });
    }
    let rule = KinkRule::new((p.quad_order / 4).max(4));
    let mut out = RmftExpectations {
        log2cosh: 0.0,
        tanh: 0.0,
        tanh2: 0.0,
    };
    for (z, w) in rule.nodes(-offset / slope, 1.0 / bs) {
        let x = bs * z + bm;
        let t = x.tanh();
        out.log2cosh += w * log2cosh(x);
        out.tanh += w * t;
        out.tanh2 += w * t * t;
    }
    Ok(out)
}

/// Replica-symmetric free energy per plaquette.
pub fn rmft_free_energy(p: &RmftParams) -> Result<f64, MftError> {
    let e = rmft_expectations(p)?;
    Ok(free_energy_from(p, &e))
}

fn free_energy_from(p: &RmftParams, e: &RmftExpectations) -> f64 {
    let (b, j2) = (p.beta, p.j * p.j);
    let bracket = 1.5 * b * b * j2 * p.q.powi(4) - 3.0 * p.j0 * b * p.u0.powi(4) + e.log2cosh / p.c()
        - 2.0 * b * b * j2 * p.q.powi(3);
    -bracket / b
}

fn gradient_from(p: &RmftParams, e: &RmftExpectations) -> (f64, f64) {
    let du = 12.0 * p.j0 * p.u0 * p.u0 * (p.u0 - e.tanh);
    let dq = -6.0 * p.beta * p.j * p.j * p.q * p.q * (p.q - e.tanh2);
    (du, dq)
}

/// `(∂F_R/∂U0, ∂F_R/∂Q)`; the `z`-derivative of `tanh` under the integral
/// is traded for `tanh²` by Gaussian integration by parts.
pub fn rmft_gradient(p: &RmftParams) -> Result<(f64, f64), MftError> {
    let e = rmft_expectations(p)?;
    Ok(gradient_from(p, &e))
}

/// `∫ dJ_p P(J_p) f(J_p)` for the Gaussian coupling distribution.
pub fn disorder_average<F: Fn(f64) -> f64>(f: F, j: f64, j0: f64, order: usize) -> f64 {
    let rule = gauss_hermite(order);
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&z, &w)| w * f(j0 + j * z))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    Higgs,
    Confinement,
    GaugeGlass,
}

impl Phase {
    pub fn classify(u0: f64, q: f64) -> Self {
        if u0.abs() > EPS_ORDER {
            Phase::Higgs
        } else if q.abs() > EPS_ORDER {
            Phase::GaugeGlass
        } else {
            Phase::Confinement
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::Higgs => "higgs",
            Phase::Confinement => "confinement",
            Phase::GaugeGlass => "gauge-glass",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "higgs" => Some(Phase::Higgs),
            "confinement" => Some(Phase::Confinement),
            "gauge-glass" => Some(Phase::GaugeGlass),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmftOptions {
    pub tol: f64,
    pub damping: f64,
    pub max_iter: usize,
    pub quad_order: usize,
    pub seed: u64,
    pub random_starts: usize,
    /// Extra start, typically the solution at a neighbouring grid point.
    pub warm_start: Option<(f64, f64)>,
}

impl Default for RmftOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            damping: 0.5,
            max_iter: 100_000,
            quad_order: 64,
            seed: 0,
            random_starts: 4,
            warm_start: None,
        }
    }
}

/// A stationary point reached from one start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub start: (f64, f64),
    pub u0: f64,
    pub q: f64,
    pub free_energy: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmftSolution {
    pub u0: f64,
    pub q: f64,
    pub free_energy: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub phase: Phase,
    /// Every start, converged or not, in start order.
    pub candidates: Vec<Candidate>,
}

fn iterate(base: &RmftParams, start: (f64, f64), opts: &RmftOptions) -> Result<Candidate, MftError> {
    let mut p = RmftParams {
        u0: start.0,
        q: start.1,
        ..*base
    };
    let a = opts.damping;
    let mut it = 0;
    loop {
        let e = rmft_expectations(&p)?;
        let (du, dq) = gradient_from(&p, &e);
        let grad = du.hypot(dq);
        let resid = (p.u0 - e.tanh).abs().max((p.q - e.tanh2).abs());
        if (resid < opts.tol && grad < opts.tol) || it >= opts.max_iter {
            return Ok(Candidate {
                start,
                u0: p.u0,
                q: p.q,
                free_energy: free_energy_from(&p, &e),
                gradient_norm: grad,
                iterations: it,
                converged: resid < opts.tol && grad < opts.tol,
            });
        }
        p.u0 = (1.0 - a) * p.u0 + a * e.tanh;
        p.q = (1.0 - a) * p.q + a * e.tanh2;
        it += 1;
    }
}

/// Picks the physical stationary point: within each `U0` branch the
/// extremum over `Q` is a maximum (replica limit), across branches the
/// lowest free energy wins.
fn select(cands: &[Candidate]) -> Option<usize> {
    let conv: Vec<usize> = (0..cands.len()).filter(|&i| cands[i].converged).collect();
    let mut branches: Vec<Vec<usize>> = Vec::new();
    for &i in &conv {
        let u = cands[i].u0.abs();
        let same = |j: usize| {
            let v = cands[j].u0.abs();
            (u <= EPS_ORDER && v <= EPS_ORDER) || (u - v).abs() < 1e-6
        };
        match branches.iter_mut().find(|b| same(b[0])) {
            Some(b) => b.push(i),
            None => branches.push(vec![i]),
        }
    }
    let heads: Vec<usize> = branches
        .iter()
        .map(|b| {
            b.iter().copied().fold(b[0], |best, i| {
                if cands[i].free_energy > cands[best].free_energy + 1e-12 {
                    i
                } else {
                    best
                }
            })
        })
        .collect();
    heads.iter().copied().reduce(|best, i| {
        if cands[i].free_energy < cands[best].free_energy - 1e-12 {
            i
        } else {
            best
        }
    })
}

/// Multistart solver for the replica-symmetric stationarity conditions
/// `U0 = ⟨tanh βH̃⟩`, `Q = ⟨tanh² βH̃⟩`.
pub fn rmft_solve(
    d: u32,
    beta: f64,
    j: f64,
    j0: f64,
    h: f64,
    opts: &RmftOptions,
) -> Result<RmftSolution, MftError> {
    if !(j > 0.0) {
        return Err(MftError::Domain(format!("J must be positive, got {j}")));
    }
    let base = RmftParams {
        quad_order: opts.quad_order,
        ..RmftParams::new(d, beta, j, j0, h, 0.0, 0.0)
    };
    base.validate()?;
    let mut starts = vec![(0.0, 0.0), (1.0, 1.0), (0.0, 1.0), (1.0, 0.0)];
    for i in 0..opts.random_starts {
        let mut rng = seed::stream(opts.seed, "rmft-start", i as u64);
        starts.push((rng.random::<f64>(), rng.random::<f64>()));
    }
    if let Some((u, q)) = opts.warm_start {
        starts.push((u, q.max(0.0)));
    }
    let candidates = starts
        .iter()
        .map(|&s| iterate(&base, s, opts))
        .collect::<Result<Vec<_>, _>>()?;
    let Some(best) = select(&candidates) else {
        return Err(MftError::NotConverged {
            trajectories: candidates.iter().map(|c| (c.u0, c.q, c.gradient_norm)).collect(),
        });
    };
    let c = &candidates[best];
    Ok(RmftSolution {
        u0: c.u0,
        q: c.q,
        free_energy: c.free_energy,
        gradient_norm: c.gradient_norm,
        iterations: c.iterations,
        phase: Phase::classify(c.u0, c.q),
        candidates,
    })
}
