//! Lowest eigenpairs of Hermitian operators.
//!
//! Small problems go to a dense Hermitian eigensolver. Larger ones use a
//! thick-restart block Krylov method with full two-pass Gram–Schmidt
//! reorthogonalization; the block is wider than the number of wanted levels
//! so exactly degenerate multiplets are captured as a whole.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::sparse::CsrMatrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("requested {k} eigenpairs of a {dim}-dimensional operator")]
    BadCount { k: usize, dim: usize },
    #[error("eigensolver did not converge after {iterations} operator applications (max residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    Auto,
    Dense,
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolverMethod {
    Diagonal,
    Dense,
    BlockKrylov,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenOptions {
    pub choice: SolverChoice,
    /// Relative residual target `‖Hx − θx‖ ≤ tol·max(1, |θ|)`.
    pub tol: f64,
    pub dense_below: usize,
    /// Block width beyond the number of wanted levels.
    pub extra_block: usize,
    /// Krylov blocks held before a restart.
    pub blocks: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            choice: SolverChoice::Auto,
            tol: 1e-10,
            dense_below: 512,
            extra_block: 4,
            blocks: 5,
            max_restarts: 500,
            seed: 0x5eed_0f_c10c,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub values: Vec<f64>,
    /// Eigenvectors matching `values`, each of length `dim`.
    pub vectors: Vec<Vec<Complex64>>,
    pub method: SolverMethod,
    pub iterations: usize,
    pub max_residual: f64,
}

/// All eigenvalues of a small Hermitian matrix, ascending.
pub fn dense_spectrum(h: &CsrMatrix) -> Vec<f64> {
    dense_pairs(h, h.dim()).0
}

fn sorted_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    idx
}

fn dense_pairs(h: &CsrMatrix, k: usize) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let eig = h.to_dense().symmetric_eigen();
    let vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let order = sorted_order(&vals);
    let values = order.iter().take(k).map(|&i| vals[i]).collect();
    let vectors = order
        .iter()
        .take(k)
        .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();
    (values, vectors)
}

/// The `k` lowest eigenpairs of `h`.
pub fn lowest_eigenpairs(
    h: &CsrMatrix,
    k: usize,
    opts: &EigenOptions,
) -> Result<EigenResult, EigenError> {
    let dim = h.dim();
    if k == 0 || k > dim {
        return Err(EigenError::BadCount { k, dim });
    }
    let method = match opts.choice {
        SolverChoice::Dense => SolverMethod::Dense,
        SolverChoice::Iterative => SolverMethod::BlockKrylov,
        SolverChoice::Auto if h.is_diagonal() => SolverMethod::Diagonal,
        SolverChoice::Auto if dim < opts.dense_below => SolverMethod::Dense,
        SolverChoice::Auto => SolverMethod::BlockKrylov,
    };
    match method {
        SolverMethod::Diagonal => {
            let diag = h.diagonal();
            let order = sorted_order(&diag);
            let values = order.iter().take(k).map(|&i| diag[i]).collect();
            let vectors = order
                .iter()
                .take(k)
                .map(|&i| {
                    let mut v = vec![Complex64::default(); dim];
                    v[i] = Complex64::new(1.0, 0.0);
                    v
                })
                .collect();
            Ok(EigenResult {
                values,
                vectors,
                method,
                iterations: 0,
                max_residual: 0.0,
            })
        }
        SolverMethod::Dense => {
            let (values, vectors) = dense_pairs(h, k);
            Ok(EigenResult {
                values,
                vectors,
                method,
                iterations: 0,
                max_residual: 0.0,
            })
        }
        SolverMethod::BlockKrylov => block_krylov(h, k, opts),
    }
}

const CHUNK: usize = 4096;

/// `⟨a, b⟩` reduced over fixed-size chunks in a fixed order.
fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let partial = |(x, y): (&[Complex64], &[Complex64])| -> Complex64 {
        x.iter().zip(y).map(|(p, q)| p.conj() * q).sum()
    };
    #[cfg(feature = "parallel")]
    let parts: Vec<Complex64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(partial)
        .collect();
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<Complex64> = a.chunks(CHUNK).zip(b.chunks(CHUNK)).map(partial).collect();
    parts.into_iter().sum()
}

fn norm(a: &[Complex64]) -> f64 {
    dot(a, a).re.max(0.0).sqrt()
}

/// `v -= Σ_i c_i q_i` with `c_i = ⟨q_i, v⟩`, element-wise in a fixed order.
fn project_out(basis: &[Vec<Complex64>], v: &mut [Complex64]) -> Vec<Complex64> {
    #[cfg(feature = "parallel")]
    let coeffs: Vec<Complex64> = basis.par_iter().map(|q| dot(q, v)).collect();
    #[cfg(not(feature = "parallel"))]
    let coeffs: Vec<Complex64> = basis.iter().map(|q| dot(q, v)).collect();
    let update = |(j, vj): (usize, &mut Complex64)| {
        for (q, c) in basis.iter().zip(&coeffs) {
            *vj -= c * q[j];
        }
    };
    #[cfg(feature = "parallel")]
    v.par_iter_mut().enumerate().for_each(update);
    #[cfg(not(feature = "parallel"))]
    v.iter_mut().enumerate().for_each(update);
    coeffs
}

/// Orthonormalizes `v` against `basis`; `None` if it is numerically
/// dependent on it.
fn orthonormalize(basis: &[Vec<Complex64>], mut v: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let before = norm(&v);
    if before == 0.0 {
        return None;
    }
    project_out(basis, &mut v);
    project_out(basis, &mut v);
    let after = norm(&v);
    if after <= 1e-10 * before || after < 1e-300 {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= after);
    Some(v)
}

fn apply(h: &CsrMatrix, x: &[Complex64]) -> Vec<Complex64> {
    let mut y = vec![Complex64::default(); x.len()];
    h.matvec(x, &mut y);
    y
}

fn combine(cols: &[Vec<Complex64>], coeffs: &[Complex64]) -> Vec<Complex64> {
    let dim = cols[0].len();
    let mut out = vec![Complex64::default(); dim];
    let fill = |(j, o): (usize, &mut Complex64)| {
        let mut acc = Complex64::default();
        for (c, y) in cols.iter().zip(coeffs) {
            acc += c[j] * y;
        }
        *o = acc;
    };
    #[cfg(feature = "parallel")]
    out.par_iter_mut().enumerate().for_each(fill);
    #[cfg(not(feature = "parallel"))]
    out.iter_mut().enumerate().for_each(fill);
    out
}

fn block_krylov(h: &CsrMatrix, k: usize, opts: &EigenOptions) -> Result<EigenResult, EigenError> {
    let dim = h.dim();
    let width = (k + opts.extra_block).min(dim);
    let max_basis = (width * opts.blocks.max(2)).min(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut q: Vec<Vec<Complex64>> = Vec::with_capacity(max_basis);
    let mut hq: Vec<Vec<Complex64>> = Vec::with_capacity(max_basis);
    let mut iterations = 0usize;

    let random_vector = |rng: &mut ChaCha8Rng| -> Vec<Complex64> {
        (0..dim)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    };
    while q.len() < width {
        if let Some(v) = orthonormalize(&q, random_vector(&mut rng)) {
            hq.push(apply(h, &v));
            iterations += 1;
            q.push(v);
        }
    }
    // t[i][j] = ⟨q_i, H q_j⟩ for the current basis
    let mut t: Vec<Vec<Complex64>> = Vec::new();
    let extend_t = |t: &mut Vec<Vec<Complex64>>, q: &[Vec<Complex64>], hq: &[Vec<Complex64>]| {
        let old = t.len();
        for row in t.iter_mut() {
            row.resize(q.len(), Complex64::default());
        }
        for j in old..q.len() {
            t.push(vec![Complex64::default(); q.len()]);
            for i in 0..=j {
                let v = dot(&q[i], &hq[j]);
                if i == j {
                    t[j][j] = Complex64::new(v.re, 0.0);
                } else {
                    t[i][j] = v;
                    t[j][i] = v.conj();
                }
            }
        }
        for i in 0..old {
            for j in old..q.len() {
                let v = dot(&q[i], &hq[j]);
                t[i][j] = v;
                t[j][i] = v.conj();
            }
        }
    };
    extend_t(&mut t, &q, &hq);
    let mut frontier: Vec<usize> = (0..q.len()).collect();
    let mut worst = f64::INFINITY;

    for _restart in 0..opts.max_restarts {
        // Grow the Krylov basis block by block.
        while q.len() < max_basis && !frontier.is_empty() {
            let mut next = Vec::new();
            for &j in &frontier {
                if q.len() >= max_basis {
                    break;
                }
                let cand = hq[j].clone();
                if let Some(v) = orthonormalize(&q, cand) {
                    hq.push(apply(h, &v));
                    iterations += 1;
                    q.push(v);
                    next.push(q.len() - 1);
                }
            }
            if next.is_empty() && q.len() < dim {
                // Invariant subspace; widen with a fresh random direction so
                // levels outside it can still be found.
                if let Some(v) = orthonormalize(&q, random_vector(&mut rng)) {
                    hq.push(apply(h, &v));
                    iterations += 1;
                    q.push(v);
                    next.push(q.len() - 1);
                }
            }
            frontier = next;
        }
        let before_t = t.len();
        if before_t < q.len() {
            extend_t(&mut t, &q, &hq);
        }

        let m = q.len();
        let tm = DMatrix::from_fn(m, m, |i, j| t[i][j]);
        let eig = tm.symmetric_eigen();
        let vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        let order = sorted_order(&vals);
        let keep = width.min(m);

        let mut ritz = Vec::with_capacity(keep);
        let mut h_ritz = Vec::with_capacity(keep);
        let mut residuals = Vec::with_capacity(keep);
        for &i in order.iter().take(keep) {
            let y: Vec<Complex64> = eig.eigenvectors.column(i).iter().copied().collect();
            let x = combine(&q, &y);
            let hx = combine(&hq, &y);
            let theta = vals[i];
            let r: Vec<Complex64> = hx.iter().zip(&x).map(|(a, b)| a - b * theta).collect();
            residuals.push(norm(&r) / theta.abs().max(1.0));
            ritz.push(x);
            h_ritz.push(hx);
        }
        worst = residuals.iter().take(k).copied().fold(0.0, f64::max);
        if worst <= opts.tol || m == dim {
            let values = order.iter().take(k).map(|&i| vals[i]).collect();
            ritz.truncate(k);
            return Ok(EigenResult {
                values,
                vectors: ritz,
                method: SolverMethod::BlockKrylov,
                iterations,
                max_residual: worst,
            });
        }
        // Thick restart: keep the Ritz block, continue from its images.
        t = (0..keep)
            .map(|a| {
                (0..keep)
                    .map(|b| {
                        if a == b {
                            Complex64::new(vals[order[a]], 0.0)
                        } else {
                            Complex64::default()
                        }
                    })
                    .collect()
            })
            .collect();
        q = ritz;
        hq = h_ritz;
        frontier = (0..keep).collect();
    }
    Err(EigenError::NotConverged {
        iterations,
        residual: worst,
    })
}
