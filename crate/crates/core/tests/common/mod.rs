#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use zn_gauge::algebra::PauliString;

pub fn omega(k: i64, n: u32) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / f64::from(n))
}

/// `Z^z X^x` on one link with `Z|a⟩ = ω^a|a⟩`, `X|a⟩ = |a−1⟩`.
pub fn link_matrix(n: u32, z: u32, x: u32) -> DMatrix<Complex64> {
    let d = n as usize;
    let mut zm = DMatrix::zeros(d, d);
    let mut xm = DMatrix::zeros(d, d);
    for a in 0..d {
        zm[(a, a)] = omega(a as i64, n);
        xm[((a + d - 1) % d, a)] = Complex64::new(1.0, 0.0);
    }
    let mut m = DMatrix::identity(d, d);
    for _ in 0..z {
        m = &m * &zm;
    }
    for _ in 0..x {
        m = &m * &xm;
    }
    m
}

/// Tensor-factored matrix `scalar · ⊗_l factors[l]`.
#[derive(Clone, Debug)]
pub struct Factored {
    pub scalar: Complex64,
    pub factors: Vec<DMatrix<Complex64>>,
}

impl Factored {
    pub fn of(p: &PauliString, links: usize) -> Self {
        let n = p.order();
        Self {
            scalar: omega(i64::from(p.phase().exponent()), n),
            factors: (0..links).map(|l| link_matrix(n, p.z_power(l), p.x_power(l))).collect(),
        }
    }

    pub fn mul(&self, other: &Factored) -> Factored {
        Factored {
            scalar: self.scalar * other.scalar,
            factors: self.factors.iter().zip(&other.factors).map(|(a, b)| a * b).collect(),
        }
    }

    /// `c` with `self = c · other`, if the two are proportional.
    pub fn ratio(&self, other: &Factored) -> Option<Complex64> {
        let mut c = self.scalar / other.scalar;
        for (a, b) in self.factors.iter().zip(&other.factors) {
            let (i, _) = b.iter().enumerate().find(|(_, v)| v.norm() > 0.5)?;
            let r = a[i] / b[i];
            if (a - b * r).iter().any(|v| v.norm() > 1e-9) {
                return None;
            }
            c *= r;
        }
        Some(c)
    }

    /// Full Kronecker product, link 0 as the most significant factor.
    pub fn dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(1, 1, self.scalar);
        for f in &self.factors {
            m = m.kronecker(f);
        }
        m
    }
}

pub fn random_string<R: Rng>(rng: &mut R, n: u32, links: usize) -> PauliString {
    let z: Vec<(usize, i64)> = (0..links).map(|l| (l, rng.random_range(0..n as i64))).collect();
    let x: Vec<(usize, i64)> = (0..links).map(|l| (l, rng.random_range(0..n as i64))).collect();
    PauliString::from_powers(n, z, x)
        .with_phase(rng.random_range(0..n as i64))
        .with_fermion_parity(rng.random_range(0..2u8))
}

/// Exponent `k` with `c = ω^k`, if `c` is an N-th root of unity.
pub fn root_exponent(c: Complex64, n: u32) -> Option<u32> {
    (0..n).find(|&k| (c - omega(i64::from(k), n)).norm() < 1e-9)
}

/// Composite Simpson rule on `[a, b]` with `m` (even) intervals.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, m: usize) -> f64 {
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for i in 1..m {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}
