//! Generalized Pauli group of Z_N clock and shift operators on lattice links.
//!
//! On a single link the clock matrix `Z` is `diag(1, ω, …, ω^{N-1})` with
//! `ω = exp(2πi/N)` and the shift matrix `X` sends `|k⟩` to `|k-1⟩`, so that
//! `X Z = ω Z X`. A [`PauliString`] stores a product of such powers over many
//! links in canonical order (per link all `Z` factors to the left of all `X`
//! factors) together with a global phase exponent, which keeps every
//! operation below in exact integer arithmetic.

mod dyon;

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dyon::{exchange_phase_dyons, DyonExchange};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("group order mismatch: {left} vs {right}")]
    OrderMismatch { left: u32, right: u32 },
    #[error("group order must be at least 2, got {0}")]
    InvalidOrder(u32),
}

/// `exp(2πi k / n)`, with `root_of_unity(n - k, n)` the exact conjugate of
/// `root_of_unity(k, n)`.
pub fn root_of_unity(k: i64, n: u32) -> Complex64 {
    let n64 = i64::from(n);
    let k = k.rem_euclid(n64);
    if 2 * k > n64 {
        return root_of_unity(n64 - k, n).conj();
    }
    if 2 * k == n64 {
        return Complex64::new(-1.0, 0.0);
    }
    if 4 * k == n64 {
        return Complex64::new(0.0, 1.0);
    }
    let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
    Complex64::new(angle.cos(), angle.sin())
}

/// `cos(2π k / n)` evaluated on the canonical representative of `k`.
pub fn cos_unit(k: i64, n: u32) -> f64 {
    root_of_unity(k, n).re
}

/// An element `ω^exponent` of the cyclic group Z_N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZnPhase {
    exponent: u32,
    order: u32,
}

impl ZnPhase {
    pub fn new(exponent: i64, order: u32) -> Self {
        assert!(order >= 2, "Z_N order must be at least 2");
        let exponent = exponent.rem_euclid(i64::from(order)) as u32;
        Self { exponent, order }
    }

    pub fn one(order: u32) -> Self {
        Self::new(0, order)
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_one(&self) -> bool {
        self.exponent == 0
    }

    pub fn try_mul(self, other: ZnPhase) -> Result<ZnPhase, AlgebraError> {
        if self.order != other.order {
            return Err(AlgebraError::OrderMismatch {
                left: self.order,
                right: other.order,
            });
        }
        Ok(ZnPhase::new(
            i64::from(self.exponent) + i64::from(other.exponent),
            self.order,
        ))
    }

    pub fn inverse(self) -> ZnPhase {
        ZnPhase::new(-i64::from(self.exponent), self.order)
    }

    pub fn pow(self, k: i64) -> ZnPhase {
        ZnPhase::new(i64::from(self.exponent) * k, self.order)
    }

    pub fn to_complex(self) -> Complex64 {
        root_of_unity(i64::from(self.exponent), self.order)
    }
}

impl std::ops::Mul for ZnPhase {
    type Output = ZnPhase;

    /// Panics on mismatched orders; use [`ZnPhase::try_mul`] to recover.
    fn mul(self, rhs: ZnPhase) -> ZnPhase {
        self.try_mul(rhs).expect("Z_N phases of different order")
    }
}

impl fmt::Display for ZnPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ω^{} (N={})", self.exponent, self.order)
    }
}

/// Result of reordering two strings: `a·b = sign · phase · (b·a)`.
///
/// The fermionic sign is kept apart from the Z_N phase because `-1` is not
/// an element of Z_N for odd `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Commutation {
    pub phase: ZnPhase,
    pub fermionic_sign: i8,
}

/// A product `ω^phase · ∏_l Z_l^{z_l} X_l^{x_l}`, optionally carrying an odd
/// number of fermionic matter operators (`fermion_parity = 1`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    order: u32,
    z: BTreeMap<usize, u32>,
    x: BTreeMap<usize, u32>,
    phase: u32,
    fermion_parity: u8,
}

fn set_power(map: &mut BTreeMap<usize, u32>, link: usize, power: i64, order: u32) {
    let p = power.rem_euclid(i64::from(order)) as u32;
    if p == 0 {
        map.remove(&link);
    } else {
        map.insert(link, p);
    }
}

impl PauliString {
    pub fn identity(order: u32) -> Self {
        assert!(order >= 2, "Z_N order must be at least 2");
        Self {
            order,
            z: BTreeMap::new(),
            x: BTreeMap::new(),
            phase: 0,
            fermion_parity: 0,
        }
    }

    pub fn try_identity(order: u32) -> Result<Self, AlgebraError> {
        if order < 2 {
            return Err(AlgebraError::InvalidOrder(order));
        }
        Ok(Self::identity(order))
    }

    /// `Z_link^power`.
    pub fn z(order: u32, link: usize, power: i64) -> Self {
        let mut s = Self::identity(order);
        set_power(&mut s.z, link, power, order);
        s
    }

    /// `X_link^power`.
    pub fn x(order: u32, link: usize, power: i64) -> Self {
        let mut s = Self::identity(order);
        set_power(&mut s.x, link, power, order);
        s
    }

    /// Builds a canonical string from per-link `(link, power)` lists. Repeated
    /// links have their powers summed.
    pub fn from_powers<Z, X>(order: u32, z: Z, x: X) -> Self
    where
        Z: IntoIterator<Item = (usize, i64)>,
        X: IntoIterator<Item = (usize, i64)>,
    {
        let mut s = Self::identity(order);
        for (l, p) in z {
            let cur = i64::from(s.z_power(l));
            set_power(&mut s.z, l, cur + p, order);
        }
        for (l, p) in x {
            let cur = i64::from(s.x_power(l));
            set_power(&mut s.x, l, cur + p, order);
        }
        s
    }

    pub fn with_phase(mut self, exponent: i64) -> Self {
        self.phase = exponent.rem_euclid(i64::from(self.order)) as u32;
        self
    }

    pub fn with_fermion_parity(mut self, parity: u8) -> Self {
        self.fermion_parity = parity % 2;
        self
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn phase(&self) -> ZnPhase {
        ZnPhase::new(i64::from(self.phase), self.order)
    }

    pub fn fermion_parity(&self) -> u8 {
        self.fermion_parity
    }

    pub fn z_power(&self, link: usize) -> u32 {
        self.z.get(&link).copied().unwrap_or(0)
    }

    pub fn x_power(&self, link: usize) -> u32 {
        self.x.get(&link).copied().unwrap_or(0)
    }

    pub fn z_powers(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.z.iter().map(|(&l, &p)| (l, p))
    }

    pub fn x_powers(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.x.iter().map(|(&l, &p)| (l, p))
    }

    /// Links carrying any nontrivial power, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut links: Vec<usize> = self.z.keys().chain(self.x.keys()).copied().collect();
        links.sort_unstable();
        links.dedup();
        links
    }

    pub fn is_identity(&self) -> bool {
        self.z.is_empty() && self.x.is_empty() && self.phase == 0 && self.fermion_parity == 0
    }

    /// True when the string has no shift content.
    pub fn is_diagonal(&self) -> bool {
        self.x.is_empty()
    }

    fn check_order(&self, other: &PauliString) -> Result<(), AlgebraError> {
        if self.order != other.order {
            return Err(AlgebraError::OrderMismatch {
                left: self.order,
                right: other.order,
            });
        }
        Ok(())
    }

    /// Canonical product `self · other`.
    ///
    /// Moving `X^a` of `self` past `Z^b` of `other` on a shared link picks up
    /// `ω^{ab}` because `X^a Z^b = ω^{ab} Z^b X^a`.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString, AlgebraError> {
        self.check_order(other)?;
        let n = i64::from(self.order);
        let mut phase = i64::from(self.phase) + i64::from(other.phase);
        for (&l, &xa) in &self.x {
            phase += i64::from(xa) * i64::from(other.z_power(l));
        }
        let mut out = self.clone();
        for (&l, &p) in &other.z {
            let cur = i64::from(out.z_power(l));
            set_power(&mut out.z, l, cur + i64::from(p), self.order);
        }
        for (&l, &p) in &other.x {
            let cur = i64::from(out.x_power(l));
            set_power(&mut out.x, l, cur + i64::from(p), self.order);
        }
        out.phase = phase.rem_euclid(n) as u32;
        out.fermion_parity = (self.fermion_parity + other.fermion_parity) % 2;
        Ok(out)
    }

    /// Inverse, equal to the Hermitian conjugate since every factor is unitary.
    pub fn inverse(&self) -> PauliString {
        let n = i64::from(self.order);
        // (Z^z X^x)^{-1} = X^{-x} Z^{-z} = ω^{xz} Z^{-z} X^{-x}
        let mut phase = -i64::from(self.phase);
        for (&l, &xp) in &self.x {
            phase += i64::from(xp) * i64::from(self.z_power(l));
        }
        let mut out = PauliString::identity(self.order);
        for (&l, &p) in &self.z {
            set_power(&mut out.z, l, -i64::from(p), self.order);
        }
        for (&l, &p) in &self.x {
            set_power(&mut out.x, l, -i64::from(p), self.order);
        }
        out.phase = phase.rem_euclid(n) as u32;
        out.fermion_parity = self.fermion_parity;
        out
    }

    pub fn dagger(&self) -> PauliString {
        self.inverse()
    }

    /// `self^k` for any integer `k`.
    pub fn pow(&self, k: i64) -> PauliString {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = PauliString::identity(self.order);
        for _ in 0..k.unsigned_abs() {
            acc = acc.multiply(&base).expect("same order");
        }
        acc
    }

    /// `φ` and fermionic sign `s` with `self·other = s·φ·(other·self)`.
    pub fn commutation(&self, other: &PauliString) -> Result<Commutation, AlgebraError> {
        self.check_order(other)?;
        let mut e: i64 = 0;
        for (&l, &xa) in &self.x {
            e += i64::from(xa) * i64::from(other.z_power(l));
        }
        for (&l, &za) in &self.z {
            e -= i64::from(za) * i64::from(other.x_power(l));
        }
        let sign = if self.fermion_parity == 1 && other.fermion_parity == 1 {
            -1
        } else {
            1
        };
        Ok(Commutation {
            phase: ZnPhase::new(e, self.order),
            fermionic_sign: sign,
        })
    }

    /// Z_N part of [`PauliString::commutation`].
    pub fn commutation_phase(&self, other: &PauliString) -> Result<ZnPhase, AlgebraError> {
        Ok(self.commutation(other)?.phase)
    }
}

/// Ordered product of strings, left to right.
pub fn product<'a, I>(order: u32, strings: I) -> Result<PauliString, AlgebraError>
where
    I: IntoIterator<Item = &'a PauliString>,
{
    strings
        .into_iter()
        .try_fold(PauliString::identity(order), |acc, s| acc.multiply(s))
}
