//! Quantum clock model on the dual lattice and static disorder absorption.
//!
//! Dual site `p` carries a clock variable `s_p` (the flux of plaquette `p`).
//! `W_p = diag(ω^{s_p})` and `V_p|s⟩ = |s − 1⟩`, so `V W = ω W V`. Bond
//! `l` between the plaquettes `p` (orientation +1) and `p'` (orientation −1)
//! carries `T_l = V_p V_{p'}†`, the image of `X_l`; bonds on the reference
//! cycles pick up the boundary twist phase.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::algebra::{cos_unit, root_of_unity};
use crate::eigen::{dense_spectrum, lowest_eigenpairs, EigenOptions};
use crate::gauge::{build_hamiltonian, build_physical_basis, GaugeError, GaugeModelSpec, DEFAULT_MAX_DIM};
use crate::lattice::TorusLattice;
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClockModelSpec {
    pub order: u32,
    pub lattice: TorusLattice,
    pub lambda1: f64,
    pub lambda2: f64,
    /// `τ_p = ω^{tau[p]}` per dual site.
    pub tau: Vec<u32>,
    pub twist: (u32, u32),
    /// Eigenvalue exponent `k` of `∏_p W_p`, i.e. `Σ s_p ≡ k`; `None` keeps
    /// the whole space.
    pub sector: Option<u32>,
}

impl ClockModelSpec {
    pub fn new(order: u32, lattice: TorusLattice, lambda1: f64, lambda2: f64) -> Self {
        let np = lattice.num_plaquettes();
        Self {
            order,
            lattice,
            lambda1,
            lambda2,
            tau: vec![0; np],
            twist: (0, 0),
            sector: None,
        }
    }
}

/// Basis states of a clock model: spin configurations packed in base `N`.
pub struct ClockBasis {
    order: u32,
    sites: usize,
    states: Vec<u64>,
}

impl ClockBasis {
    fn new(order: u32, sites: usize, sector: Option<u32>) -> Self {
        let n = u64::from(order);
        let full = n.pow(sites as u32);
        let states = (0..full)
            .filter(|&i| match sector {
                None => true,
                Some(k) => {
                    let mut sum = 0;
                    let mut r = i;
                    for _ in 0..sites {
                        sum += r % n;
                        r /= n;
                    }
                    sum % n == u64::from(k % order)
                }
            })
            .collect();
        Self {
            order,
            sites,
            states,
        }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn spins(&self, i: usize) -> Vec<u32> {
        let n = u64::from(self.order);
        let mut r = self.states[i];
        (0..self.sites)
            .map(|_| {
                let s = (r % n) as u32;
                r /= n;
                s
            })
            .collect()
    }

    fn position(&self, code: u64) -> Option<usize> {
        self.states.binary_search(&code).ok()
    }
}

pub fn build_clock_hamiltonian(spec: &ClockModelSpec) -> Result<(ClockBasis, CsrMatrix), GaugeError> {
    let n = spec.order;
    if n < 2 {
        return Err(GaugeError::InvalidOrder(n));
    }
    let lat = &spec.lattice;
    let np = lat.num_plaquettes();
    if spec.tau.len() != np {
        return Err(GaugeError::Length {
            what: "tau",
            expected: np,
            got: spec.tau.len(),
        });
    }
    let full = u128::from(n).pow(np as u32);
    if full > u128::from(DEFAULT_MAX_DIM) * u128::from(n) {
        return Err(GaugeError::Capacity {
            required: full,
            budget: DEFAULT_MAX_DIM,
        });
    }
    let basis = ClockBasis::new(n, np, spec.sector);
    let strides: Vec<i64> = (0..np).map(|p| i64::from(n).pow(p as u32)).collect();
    let cycle_a = lat.cycle_a_z();
    let cycle_b = lat.cycle_b_z();
    let bonds: Vec<(usize, usize, Complex64)> = (0..lat.num_links())
        .map(|l| {
            let [(p, _), (pp, _)] = lat.plaquettes_of_link(l);
            let twist = i64::from(spec.twist.0) * i64::from(cycle_a.contains(&l))
                + i64::from(spec.twist.1) * i64::from(cycle_b.contains(&l));
            (p, pp, -spec.lambda1 * root_of_unity(twist, n))
        })
        .collect();

    let row = |j: usize| -> (f64, Vec<(usize, usize, Complex64)>) {
        let s = basis.spins(j);
        let diag = -2.0
            * spec.lambda2
            * s.iter()
                .zip(&spec.tau)
                .map(|(&sp, &t)| cos_unit(i64::from(sp) + i64::from(t), n))
                .sum::<f64>();
        let mut off = Vec::new();
        if spec.lambda1 != 0.0 {
            let code = basis.states[j] as i64;
            for &(p, pp, v) in &bonds {
                let lower = if s[p] == 0 { i64::from(n) - 1 } else { -1 };
                let raise = if s[pp] + 1 == n { 1 - i64::from(n) } else { 1 };
                let target = code + lower * strides[p] + raise * strides[pp];
                let t = basis.position(target as u64).expect("bond preserves the sector");
                off.push((t, j, v));
            }
        }
        (diag, off)
    };
    #[cfg(feature = "parallel")]
    let rows: Vec<_> = (0..basis.dim()).into_par_iter().map(row).collect();
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<_> = (0..basis.dim()).map(row).collect();
    let mut diag = Vec::with_capacity(basis.dim());
    let mut off = Vec::new();
    for (d, e) in rows {
        diag.push(d);
        off.extend(e);
    }
    let h = CsrMatrix::hermitian(basis.dim(), &diag, off);
    Ok((basis, h))
}

/// `N×N` clock and shift matrices `(W, V)` of a single dual site.
pub fn clock_matrices(order: u32) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let n = order as usize;
    let w = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            root_of_unity(i as i64, order)
        } else {
            Complex64::default()
        }
    });
    let v = DMatrix::from_fn(n, n, |i, j| {
        if (i + 1) % n == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::default()
        }
    });
    (w, v)
}

/// Lowest excitation of the clock model at `λ₁ = 0`: one spin raised by one
/// step on a 2×2 dual lattice.
pub fn clock_single_site_gap(order: u32, lambda2: f64) -> f64 {
    let lat = TorusLattice::build(2, 2).expect("2x2 is valid");
    let spec = ClockModelSpec::new(order, lat, 0.0, lambda2);
    let (_, h) = build_clock_hamiltonian(&spec).expect("small clock model");
    let mut d = h.diagonal();
    d.sort_by(f64::total_cmp);
    let tol = 1e-9 * lambda2.abs().max(f64::MIN_POSITIVE);
    d.iter().find(|&&e| e - d[0] > tol).map_or(0.0, |e| e - d[0])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwistLevel {
    pub energy: f64,
    pub twist: (u32, u32),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub gauge_levels: Vec<f64>,
    pub clock_levels: Vec<TwistLevel>,
    pub differences: Vec<f64>,
    pub max_difference: f64,
    /// Lowest symmetric-sector level for every twist.
    pub twist_ground_energies: Vec<TwistLevel>,
    pub gauge_dim: u64,
    pub clock_sector_dim: u64,
    /// `N^{L1·L2+1} = N²·N^{L1·L2−1}`.
    pub dims_match: bool,
}

fn lowest(h: &CsrMatrix, m: usize) -> Result<Vec<f64>, GaugeError> {
    let m = m.min(h.dim());
    Ok(lowest_eigenpairs(h, m, &EigenOptions::default())?.values)
}

/// Compares the lowest `levels` gauge levels with the union over all
/// boundary twists of the symmetric-sector clock levels.
pub fn spectral_compare(gauge: &GaugeModelSpec, levels: usize) -> Result<DualityReport, GaugeError> {
    gauge.validate()?;
    if gauge.tau.iter().any(|&t| t != 0) || gauge.charges.iter().any(|&c| c != 0) {
        return Err(GaugeError::Precondition(
            "duality comparison needs uniform couplings and no static charges".into(),
        ));
    }
    let n = gauge.order;
    let basis = build_physical_basis(gauge, DEFAULT_MAX_DIM)?;
    let h = build_hamiltonian(gauge, &basis)?;
    let gauge_levels = lowest(&h, levels)?;

    let twists: Vec<(u32, u32)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
    let mut union = Vec::new();
    let mut grounds = Vec::new();
    let mut sector_dim = 0u64;
    for &twist in &twists {
        let spec = ClockModelSpec {
            twist,
            sector: Some(0),
            ..ClockModelSpec::new(n, gauge.lattice.clone(), gauge.lambda1, gauge.lambda2)
        };
        let (cb, hc) = build_clock_hamiltonian(&spec)?;
        sector_dim = cb.dim() as u64;
        let ev = lowest(&hc, levels)?;
        grounds.push(TwistLevel {
            energy: ev[0],
            twist,
        });
        union.extend(ev.into_iter().map(|energy| TwistLevel { energy, twist }));
    }
    union.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.twist.cmp(&b.twist)));
    union.truncate(gauge_levels.len());
    let differences: Vec<f64> = gauge_levels
        .iter()
        .zip(&union)
        .map(|(g, c)| (g - c.energy).abs())
        .collect();
    let max_difference = differences.iter().copied().fold(0.0, f64::max);
    let gauge_dim = h.dim() as u64;
    Ok(DualityReport {
        gauge_levels,
        clock_levels: union,
        differences,
        max_difference,
        twist_ground_energies: grounds,
        gauge_dim,
        clock_sector_dim: sector_dim,
        dims_match: gauge_dim == u64::from(n * n) * sector_dim,
    })
}

/// Link exponents `ζ` with `Σ_{l∈∂p} o_{p,l} ζ_l ≡ τ_p` for every plaquette,
/// or the obstruction `Σ_p τ_p mod N`.
pub fn absorb_static_disorder(tau: &[u32], lattice: &TorusLattice, order: u32) -> Result<Vec<u32>, u32> {
    let target: Vec<i64> = tau.iter().map(|&t| i64::from(t)).collect();
    lattice.solve_plaquette_field(&target, order)
}

pub fn random_tau<R: Rng>(lattice: &TorusLattice, order: u32, rng: &mut R) -> Vec<u32> {
    (0..lattice.num_plaquettes())
        .map(|_| rng.random_range(0..order))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RgcReport {
    pub obstruction: u32,
    /// `max |(U† H^R U − H)_{ij}|`; absent when τ cannot be absorbed.
    pub conjugation_max_error: Option<f64>,
    pub spectrum_max_difference: f64,
    pub isospectral: bool,
    pub disordered_spectrum: Vec<f64>,
    pub clean_spectrum: Vec<f64>,
}

/// Checks that a static random coupling `τ` is removed by the link
/// relabelling `U = ∏ X_l^{ζ_l}`.
pub fn rgc_isospectrality(spec: &GaugeModelSpec, levels: usize) -> Result<RgcReport, GaugeError> {
    spec.validate()?;
    if spec.charges.iter().any(|&c| c != 0) {
        return Err(GaugeError::Precondition(
            "static disorder check needs the neutral sector".into(),
        ));
    }
    let n = spec.order;
    let clean = GaugeModelSpec {
        tau: vec![0; spec.lattice.num_plaquettes()],
        ..spec.clone()
    };
    let basis = build_physical_basis(spec, DEFAULT_MAX_DIM)?;
    let hr = build_hamiltonian(spec, &basis)?;
    let h = build_hamiltonian(&clean, &basis)?;
    let dim = h.dim();

    let (obstruction, conjugation_max_error) = match absorb_static_disorder(&spec.tau, &spec.lattice, n) {
        Ok(zeta) => {
            let zero = vec![0u32; spec.lattice.num_sites()];
            let image: Vec<usize> = (0..dim as u64)
                .map(|j| {
                    let mut idx = j;
                    for (l, &z) in zeta.iter().enumerate() {
                        if z != 0 {
                            idx = basis.apply_x(idx, &zero, l, i64::from(z)).0;
                        }
                    }
                    idx as usize
                })
                .collect();
            // `image` is a permutation, so matching every stored entry of H
            // and the entry counts covers the whole matrix
            let mut worst = 0.0f64;
            for i in 0..dim {
                for (j, v) in h.row(i) {
                    worst = worst.max((hr.get(image[i], image[j]) - v).norm());
                }
            }
            if hr.nnz() != h.nnz() {
                worst = f64::INFINITY;
            }
            (0, Some(worst))
        }
        Err(obstruction) => (obstruction, None),
    };
    let (a, b) = if dim <= 256 {
        (dense_spectrum(&hr), dense_spectrum(&h))
    } else {
        (lowest(&hr, levels)?, lowest(&h, levels)?)
    };
    let spectrum_max_difference = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    Ok(RgcReport {
        obstruction,
        conjugation_max_error,
        spectrum_max_difference,
        isospectral: spectrum_max_difference < 1e-10,
        disordered_spectrum: a,
        clean_spectrum: b,
    })
}
