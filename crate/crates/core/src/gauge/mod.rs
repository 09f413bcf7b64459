//! Z_N gauge theory on the torus in the gauge-invariant flux basis.
//!
//! With static charges `c` the physical states are labelled by plaquette
//! fluxes, the two holonomies and `c` itself. A representative link
//! configuration is kept in tree gauge (zero on a BFS spanning tree of the
//! sites); the `L1·L2 + 1` cotree link values are the basis digits.

mod basis;
mod braid;
mod hamiltonian;
mod spectrum;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::eigen::EigenError;
use crate::lattice::{LatticeError, TorusLattice};

pub use basis::{build_physical_basis, FluxBasis, FluxBasisState, SectorState};
pub use braid::{braiding_check, BraidReport};
pub use hamiltonian::{build_hamiltonian, diagonal_energy};
pub use spectrum::{
    clusters, gap_curve, spectrum, vortex_pair_gap, ClusterSectors, DegeneracyCluster, GapPoint, SectorWeight,
    SpectrumOptions, SpectrumResult, VortexGap,
};

/// Largest basis the dense/sparse builders accept by default.
pub const DEFAULT_MAX_DIM: u64 = 4_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaugeError {
    #[error("group order must be at least 2, got {0}")]
    InvalidOrder(u32),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error("static charges sum to {sum} mod {order}; charges must come in neutral sets")]
    ChargeSum { sum: u32, order: u32 },
    #[error("{what} has length {got}, expected {expected}")]
    Length {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("basis dimension {required} exceeds the budget of {budget}")]
    Capacity { required: u128, budget: u64 },
    #[error("plaquette fluxes sum to {sum} mod {order}, which no link configuration on the torus realizes")]
    FluxConstraint { sum: u32, order: u32 },
    #[error("string leaves unmatched charge {charge} at site {site}")]
    GaugeViolation { site: usize, charge: u32 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("geometry error: {0}")]
    Geometry(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeModelSpec {
    pub order: u32,
    pub lattice: TorusLattice,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Static random coupling `τ_p = ω^{tau[p]}` per plaquette.
    pub tau: Vec<u32>,
    /// Static background charge per site.
    pub charges: Vec<u32>,
    /// Mass `M` added per site that carries a nonzero charge.
    pub mass: Option<f64>,
}

impl GaugeModelSpec {
    pub fn new(order: u32, lattice: TorusLattice, lambda1: f64, lambda2: f64) -> Self {
        let np = lattice.num_plaquettes();
        let ns = lattice.num_sites();
        Self {
            order,
            lattice,
            lambda1,
            lambda2,
            tau: vec![0; np],
            charges: vec![0; ns],
            mass: None,
        }
    }

    pub fn square(order: u32, l: usize, lambda1: f64, lambda2: f64) -> Result<Self, GaugeError> {
        Ok(Self::new(order, TorusLattice::build(l, l)?, lambda1, lambda2))
    }

    pub fn with_tau(mut self, tau: Vec<u32>) -> Self {
        self.tau = tau;
        self
    }

    pub fn with_charges(mut self, charges: Vec<u32>) -> Self {
        self.charges = charges;
        self
    }

    pub fn with_mass(mut self, mass: f64) -> Self {
        self.mass = Some(mass);
        self
    }

    pub fn validate(&self) -> Result<(), GaugeError> {
        if self.order < 2 {
            return Err(GaugeError::InvalidOrder(self.order));
        }
        if self.tau.len() != self.lattice.num_plaquettes() {
            return Err(GaugeError::Length {
                what: "tau",
                expected: self.lattice.num_plaquettes(),
                got: self.tau.len(),
            });
        }
        if self.charges.len() != self.lattice.num_sites() {
            return Err(GaugeError::Length {
                what: "charges",
                expected: self.lattice.num_sites(),
                got: self.charges.len(),
            });
        }
        let sum = self
            .charges
            .iter()
            .map(|&c| u64::from(c))
            .sum::<u64>()
            .rem_euclid(u64::from(self.order)) as u32;
        if sum != 0 {
            return Err(GaugeError::ChargeSum {
                sum,
                order: self.order,
            });
        }
        Ok(())
    }

    /// Constant energy of the static charges.
    pub fn mass_energy(&self) -> f64 {
        let m = self.mass.unwrap_or(0.0);
        m * self
            .charges
            .iter()
            .filter(|&&c| c % self.order != 0)
            .count() as f64
    }
}
