use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{build_hamiltonian, build_physical_basis, GaugeError, GaugeModelSpec, DEFAULT_MAX_DIM};
use crate::eigen::{lowest_eigenpairs, EigenOptions, SolverMethod};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumOptions {
    pub k: usize,
    /// Degeneracy tolerance in units of `λ₂`.
    pub deg_tol: f64,
    pub eigen: EigenOptions,
    pub max_dim: u64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            k: 10,
            deg_tol: 1e-8,
            eigen: EigenOptions::default(),
            max_dim: DEFAULT_MAX_DIM,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyCluster {
    pub energy: f64,
    pub start: usize,
    pub size: usize,
    /// The cluster touches the last computed level and may continue.
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorWeight {
    pub z_a: u32,
    pub z_b: u32,
    pub weight: f64,
}

/// Holonomy content of one cluster: `Σ_{v ∈ cluster} ‖P_{(z_a,z_b)} v‖²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSectors {
    pub cluster: usize,
    pub sectors: Vec<SectorWeight>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub dim: u64,
    pub eigenvalues: Vec<f64>,
    pub clusters: Vec<DegeneracyCluster>,
    /// Filled only when `λ₁ = 0`, where the holonomies are conserved.
    pub sectors: Vec<ClusterSectors>,
    pub method: SolverMethod,
    pub iterations: usize,
    pub max_residual: f64,
    pub cluster_tolerance: f64,
}

impl SpectrumResult {
    pub fn ground_degeneracy(&self) -> usize {
        self.clusters.first().map_or(0, |c| c.size)
    }

    /// Distance from the ground cluster to the next one, if computed.
    pub fn first_gap(&self) -> Option<f64> {
        match self.clusters.as_slice() {
            [g, next, ..] => Some(next.energy - g.energy),
            _ => None,
        }
    }
}

/// Groups sorted levels whose spread from the cluster's first level is at
/// most `tol`; the last cluster is flagged when the list may be cut short.
pub fn clusters(values: &[f64], tol: f64, complete: bool) -> Vec<DegeneracyCluster> {
    let mut out: Vec<DegeneracyCluster> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        match out.last_mut() {
            Some(c) if (v - values[c.start]).abs() <= tol => c.size += 1,
            _ => out.push(DegeneracyCluster {
                energy: v,
                start: i,
                size: 1,
                truncated: false,
            }),
        }
    }
    for c in &mut out {
        c.energy = values[c.start..c.start + c.size].iter().sum::<f64>() / c.size as f64;
    }
    if !complete {
        if let Some(last) = out.last_mut() {
            last.truncated = true;
        }
    }
    out
}

/// The `opts.k` lowest levels of the gauge Hamiltonian.
pub fn spectrum(spec: &GaugeModelSpec, opts: &SpectrumOptions) -> Result<SpectrumResult, GaugeError> {
    let basis = build_physical_basis(spec, opts.max_dim)?;
    let h = build_hamiltonian(spec, &basis)?;
    let dim = h.dim();
    let k = opts.k.min(dim);
    let res = lowest_eigenpairs(&h, k, &opts.eigen)?;
    let scale = if spec.lambda2 > 0.0 { spec.lambda2 } else { 1.0 };
    let tol = opts.deg_tol * scale;
    let cl = clusters(&res.values, tol, k == dim);

    let mut sectors = Vec::new();
    if spec.lambda1 == 0.0 {
        let labels: Vec<(u32, u32)> = (0..dim as u64).map(|i| basis.holonomy_labels(i)).collect();
        for (ci, c) in cl.iter().enumerate() {
            let mut w: BTreeMap<(u32, u32), f64> = BTreeMap::new();
            for v in &res.vectors[c.start..c.start + c.size] {
                for (j, amp) in v.iter().enumerate() {
                    let p = amp.norm_sqr();
                    if p > 0.0 {
                        *w.entry(labels[j]).or_default() += p;
                    }
                }
            }
            sectors.push(ClusterSectors {
                cluster: ci,
                sectors: w
                    .into_iter()
                    .filter(|&(_, x)| x > 1e-8)
                    .map(|((z_a, z_b), weight)| SectorWeight { z_a, z_b, weight })
                    .collect(),
            });
        }
    }
    Ok(SpectrumResult {
        dim: dim as u64,
        eigenvalues: res.values,
        clusters: cl,
        sectors,
        method: res.method,
        iterations: res.iterations,
        max_residual: res.max_residual,
        cluster_tolerance: tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VortexGap {
    /// Lowest excitation of the torus, a vortex–antivortex pair.
    pub pair_gap: f64,
    /// Single-site excitation of the dual clock model.
    pub single_vortex: f64,
    /// `2λ₂(1 − cos 2π/N)`.
    pub formula: f64,
}

/// Excitation gaps at `λ₁ = 0`, where the Hamiltonian is diagonal.
pub fn vortex_pair_gap(spec: &GaugeModelSpec) -> Result<VortexGap, GaugeError> {
    if spec.lambda1 != 0.0 {
        return Err(GaugeError::Precondition(format!(
            "vortex gap needs lambda1 = 0, got {}",
            spec.lambda1
        )));
    }
    let basis = build_physical_basis(spec, DEFAULT_MAX_DIM)?;
    let h = build_hamiltonian(spec, &basis)?;
    let mut diag = h.diagonal();
    diag.sort_by(f64::total_cmp);
    let tol = 1e-8 * spec.lambda2.max(f64::MIN_POSITIVE);
    let e0 = diag[0];
    let pair_gap = diag
        .iter()
        .find(|&&e| e - e0 > tol)
        .map(|&e| e - e0)
        .ok_or_else(|| GaugeError::Precondition("spectrum has a single level".into()))?;
    let single_vortex = crate::duality::clock_single_site_gap(spec.order, spec.lambda2);
    let formula = 2.0 * spec.lambda2 * (1.0 - (2.0 * std::f64::consts::PI / spec.order as f64).cos());
    Ok(VortexGap {
        pair_gap,
        single_vortex,
        formula,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapPoint {
    pub lambda1: f64,
    pub ground: f64,
    /// Spread of the `N²` lowest levels.
    pub splitting: f64,
    /// `E_{N²} − E_0`: the first level above the topological multiplet.
    pub gap: f64,
}

/// Measured gap above the `N²` lowest levels as `λ₁` varies.
pub fn gap_curve(
    spec: &GaugeModelSpec,
    lambda1: &[f64],
    opts: &SpectrumOptions,
) -> Result<Vec<GapPoint>, GaugeError> {
    let nn = (spec.order * spec.order) as usize;
    let opts = SpectrumOptions {
        k: nn + 1,
        ..opts.clone()
    };
    lambda1
        .iter()
        .map(|&l1| {
            let s = GaugeModelSpec {
                lambda1: l1,
                ..spec.clone()
            };
            let r = spectrum(&s, &opts)?;
            let ev = &r.eigenvalues;
            Ok(GapPoint {
                lambda1: l1,
                ground: ev[0],
                splitting: ev[nn.min(ev.len()) - 1] - ev[0],
                gap: ev.get(nn).map_or(f64::NAN, |e| e - ev[0]),
            })
        })
        .collect()
}
