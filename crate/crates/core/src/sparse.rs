//! Compressed sparse row storage for Hermitian operators.

use nalgebra::DMatrix;
use num_complex::Complex64;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl CsrMatrix {
    /// Builds a Hermitian matrix from its real diagonal and a list of
    /// off-diagonal contributions `(row, col, value)`.
    ///
    /// Each contribution is folded onto the upper triangle (conjugating when
    /// `row > col`), duplicates are summed in insertion order, and the lower
    /// triangle is the exact conjugate mirror, so `H == H†` bit for bit.
    pub fn hermitian(dim: usize, diag: &[f64], offdiag: Vec<(usize, usize, Complex64)>) -> Self {
        assert_eq!(diag.len(), dim);
        let mut upper: Vec<(usize, usize, Complex64)> = offdiag
            .into_iter()
            .filter(|&(r, c, _)| r != c)
            .map(|(r, c, v)| if r < c { (r, c, v) } else { (c, r, v.conj()) })
            .collect();
        upper.sort_by_key(|&(r, c, _)| (r, c));
        let mut merged: Vec<(usize, usize, Complex64)> = Vec::with_capacity(upper.len());
        for (r, c, v) in upper {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|e| e.2 != Complex64::new(0.0, 0.0));

        let mut counts = vec![0usize; dim];
        for &(r, c, _) in &merged {
            counts[r] += 1;
            counts[c] += 1;
        }
        for (i, &d) in diag.iter().enumerate() {
            if d != 0.0 {
                counts[i] += 1;
            }
        }
        let mut row_ptr = vec![0usize; dim + 1];
        for i in 0..dim {
            row_ptr[i + 1] = row_ptr[i] + counts[i];
        }
        let nnz = row_ptr[dim];
        let mut cols = vec![0usize; nnz];
        let mut vals = vec![Complex64::new(0.0, 0.0); nnz];
        let mut fill = row_ptr[..dim].to_vec();
        let mut put = |r: usize, c: usize, v: Complex64, fill: &mut Vec<usize>| {
            cols[fill[r]] = c;
            vals[fill[r]] = v;
            fill[r] += 1;
        };
        // Column order within each row: lower part, diagonal, upper part.
        let mut lower_by_row: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); dim];
        for &(r, c, v) in &merged {
            lower_by_row[c].push((r, v.conj()));
        }
        let mut upper_iter = merged.iter().peekable();
        for i in 0..dim {
            let mut lower = std::mem::take(&mut lower_by_row[i]);
            lower.sort_by_key(|&(c, _)| c);
            for (c, v) in lower {
                put(i, c, v, &mut fill);
            }
            if diag[i] != 0.0 {
                put(i, i, Complex64::new(diag[i], 0.0), &mut fill);
            }
            while let Some(&&(r, c, v)) = upper_iter.peek() {
                if r != i {
                    break;
                }
                put(i, c, v, &mut fill);
                upper_iter.next();
            }
        }
        Self {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self::hermitian(diag.len(), diag, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.row(i)
            .find(|&(c, _)| c == j)
            .map(|(_, v)| v)
            .unwrap_or_default()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.dim).all(|i| self.row(i).all(|(c, _)| c == i))
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i).re).collect()
    }

    /// Largest `|H_ij - conj(H_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// `y = H x`. Rows are independent and each row sums in storage order,
    /// so the result does not depend on the thread count.
    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        let row = |i: usize| -> Complex64 {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            acc
        };
        #[cfg(feature = "parallel")]
        y.par_iter_mut().enumerate().for_each(|(i, yi)| *yi = row(i));
        #[cfg(not(feature = "parallel"))]
        y.iter_mut().enumerate().for_each(|(i, yi)| *yi = row(i));
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn duplicates_merge_and_mirror_exactly() {
        let h = CsrMatrix::hermitian(
            3,
            &[1.0, 0.0, -2.0],
            vec![
                (0, 1, c(0.1, 0.3)),
                (1, 0, c(0.2, 0.7)),
                (2, 0, c(-1.0, 0.0)),
                (1, 1, c(5.0, 0.0)),
            ],
        );
        assert_eq!(h.get(0, 1), c(0.1, 0.3) + c(0.2, -0.7));
        assert_eq!(h.get(1, 0), h.get(0, 1).conj());
        assert_eq!(h.get(0, 2), c(-1.0, 0.0));
        assert_eq!(h.get(1, 1), c(0.0, 0.0));
        assert_eq!(h.hermiticity_defect(), 0.0);
        assert!(!h.is_diagonal());
    }

    #[test]
    fn matvec_matches_dense() {
        let h = CsrMatrix::hermitian(
            4,
            &[1.0, 2.0, 3.0, 4.0],
            vec![(0, 3, c(0.5, -0.5)), (1, 2, c(0.0, 1.0)), (3, 2, c(2.0, 0.0))],
        );
        let x: Vec<Complex64> = (0..4).map(|i| c(i as f64, 1.0 - i as f64)).collect();
        let mut y = vec![Complex64::default(); 4];
        h.matvec(&x, &mut y);
        let d = h.to_dense();
        for i in 0..4 {
            let expect: Complex64 = (0..4).map(|j| d[(i, j)] * x[j]).sum();
            assert!((expect - y[i]).norm() < 1e-14);
        }
    }
}
