use num_complex::Complex64;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::{FluxBasis, GaugeError, GaugeModelSpec};
use crate::algebra::{cos_unit, root_of_unity};
use crate::sparse::CsrMatrix;

/// `-2λ₂ Σ_p cos(2π(w_p + τ_p)/N)` plus the static mass energy.
pub fn diagonal_energy(spec: &GaugeModelSpec, fluxes: &[u32]) -> f64 {
    let n = spec.order;
    let plaq: f64 = fluxes
        .iter()
        .zip(&spec.tau)
        .map(|(&w, &t)| cos_unit(i64::from(w) + i64::from(t), n))
        .sum();
    -2.0 * spec.lambda2 * plaq + spec.mass_energy()
}

/// `H = -λ₁ Σ_l (X_l + X_l†) - λ₂ Σ_p (τ_p ∏Z + h.c.)` on the charge
/// sector `spec.charges`.
pub fn build_hamiltonian(spec: &GaugeModelSpec, basis: &FluxBasis) -> Result<CsrMatrix, GaugeError> {
    spec.validate()?;
    if basis.order() != spec.order || basis.lattice() != &spec.lattice {
        return Err(GaugeError::Precondition(
            "basis was built for a different model".into(),
        ));
    }
    let dim = usize::try_from(basis.dim()).map_err(|_| GaugeError::Capacity {
        required: basis.dim(),
        budget: usize::MAX as u64,
    })?;
    let n = spec.order;
    let lattice = &spec.lattice;
    let nl = lattice.num_links();
    let strides: Vec<u64> = (0..basis.num_digits())
        .map(|i| u64::from(n).pow(i as u32))
        .collect();
    let x_terms: Vec<(Vec<(usize, i64)>, Complex64)> = (0..nl)
        .map(|l| {
            let (shifts, phase) = basis.x_shifts(l, &spec.charges);
            (shifts.to_vec(), -spec.lambda1 * root_of_unity(phase, n))
        })
        .collect();
    let cotree = basis.cotree_links().to_vec();
    let boundaries: Vec<[(usize, i8); 4]> = (0..lattice.num_plaquettes())
        .map(|p| lattice.plaquette_boundary(p))
        .collect();

    let row = |j: usize| -> (f64, Vec<(usize, usize, Complex64)>) {
        let digits = basis.digits(j as u64);
        let mut a = vec![0i64; nl];
        for (d, &l) in digits.iter().zip(&cotree) {
            a[l] = i64::from(*d);
        }
        let fluxes: Vec<u32> = boundaries
            .iter()
            .map(|b| {
                b.iter()
                    .map(|&(l, o)| i64::from(o) * a[l])
                    .sum::<i64>()
                    .rem_euclid(i64::from(n)) as u32
            })
            .collect();
        let diag = diagonal_energy(spec, &fluxes);
        let mut off = Vec::new();
        if spec.lambda1 != 0.0 {
            for (shifts, value) in &x_terms {
                let mut target = j as u64;
                for &(d, coef) in shifts {
                    let old = i64::from(digits[d]);
                    let new = (old + coef).rem_euclid(i64::from(n));
                    target = (target as i64 + (new - old) * strides[d] as i64) as u64;
                }
                off.push((target as usize, j, *value));
            }
        }
        (diag, off)
    };
    #[cfg(feature = "parallel")]
    let rows: Vec<(f64, Vec<(usize, usize, Complex64)>)> = (0..dim).into_par_iter().map(row).collect();
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<(f64, Vec<(usize, usize, Complex64)>)> = (0..dim).map(row).collect();

    let mut diag = Vec::with_capacity(dim);
    let mut off = Vec::new();
    for (d, entries) in rows {
        diag.push(d);
        off.extend(entries);
    }
    // X_l always changes the two fluxes next to l, so no term is diagonal.
    debug_assert!(off.iter().all(|&(r, c, _)| r != c));
    Ok(CsrMatrix::hermitian(dim, &diag, off))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::build_physical_basis;

    #[test]
    fn vacuum_diagonal_entry() {
        let spec = GaugeModelSpec::square(3, 3, 0.0, 1.3).unwrap();
        let b = build_physical_basis(&spec, 1 << 20).unwrap();
        let h = build_hamiltonian(&spec, &b).unwrap();
        assert!((h.get(0, 0).re + 2.0 * 1.3 * 9.0).abs() < 1e-12);
        assert!(h.is_diagonal());
    }

    #[test]
    fn hamiltonian_is_exactly_hermitian() {
        for n in [2, 3, 4] {
            let spec = GaugeModelSpec::square(n, 2, 0.37, 1.0)
                .unwrap()
                .with_tau(vec![1, 0, n - 1, 0])
                .with_charges(vec![1, n - 1, 0, 0]);
            let b = build_physical_basis(&spec, 1 << 20).unwrap();
            let h = build_hamiltonian(&spec, &b).unwrap();
            assert_eq!(h.hermiticity_defect(), 0.0);
        }
    }

    #[test]
    fn each_row_has_one_x_neighbour_per_link_pair() {
        let spec = GaugeModelSpec::square(3, 2, 0.5, 1.0).unwrap();
        let b = build_physical_basis(&spec, 1 << 20).unwrap();
        let h = build_hamiltonian(&spec, &b).unwrap();
        // 8 links, X and X† each reach a distinct neighbour for N = 3
        for i in 0..h.dim() {
            let off = h.row(i).filter(|&(c, _)| c != i).count();
            assert_eq!(off, 16);
        }
    }
}
