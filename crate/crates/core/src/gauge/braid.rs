use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{FluxBasis, GaugeError, GaugeModelSpec, SectorState};
use crate::lattice::{LatticePath, PathKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BraidReport {
    /// From reordering the closed charge loop past the vortex string.
    pub algebraic_phase_exponent: u32,
    /// From `⟨ψ| loop |ψ⟩` on the explicit two-excitation state.
    pub numeric_phase_exponent: u32,
    pub agree: bool,
    /// `q·(w_start − w_end) mod N` from the loop's winding numbers.
    pub expected_exponent: u32,
    pub winding_start: i64,
    pub winding_end: i64,
    /// `|⟨ψ| loop |ψ⟩|`, 1 when the state is an eigenstate of the loop.
    pub overlap_modulus: f64,
    /// Gauge-law charges of `ψ` equal `+q` / `-q` at the fermion ends.
    pub charges_consistent: bool,
}

/// Phase picked up when a charge-`q` fermion is carried around a closed
/// loop in the presence of a vortex pair created along `vortex_path`.
pub fn braiding_check(
    spec: &GaugeModelSpec,
    q: u32,
    fermion_path: &LatticePath,
    vortex_path: &LatticePath,
    encircle_loop: &LatticePath,
) -> Result<BraidReport, GaugeError> {
    spec.validate()?;
    if spec.lambda1 != 0.0 {
        return Err(GaugeError::Precondition(format!(
            "braiding needs lambda1 = 0, got {}",
            spec.lambda1
        )));
    }
    if fermion_path.kind != PathKind::Original || encircle_loop.kind != PathKind::Original {
        return Err(GaugeError::Geometry(
            "fermion path and loop must lie on the original lattice".into(),
        ));
    }
    if vortex_path.kind != PathKind::Dual {
        return Err(GaugeError::Geometry("vortex path must lie on the dual lattice".into()));
    }
    let lattice = &spec.lattice;
    let winding = lattice.loop_winding(encircle_loop).ok_or_else(|| {
        GaugeError::Geometry("loop is not closed and contractible".into())
    })?;
    let (ws, we) = (winding[vortex_path.start], winding[vortex_path.end]);
    if ws.abs() > 1 || we.abs() > 1 {
        return Err(GaugeError::Geometry(format!(
            "loop winds {ws} and {we} times around the vortex ends"
        )));
    }
    let n = spec.order;
    let qi = i64::from(q);
    let expected = (qi * (ws - we)).rem_euclid(i64::from(n)) as u32;

    let fermions = fermion_path.z_string(n, qi);
    let vortices = vortex_path.x_string(n, 1);
    let lp = encircle_loop.z_string(n, qi);
    let algebraic = lp.commutation_phase(&vortices)?.exponent();

    let basis = FluxBasis::new(n, lattice.clone())?;
    let vacuum = SectorState::from([(
        (vec![0u32; lattice.num_sites()], 0u64),
        Complex64::new(1.0, 0.0),
    )]);
    let psi = basis.apply_covariant(&vortices, &basis.apply_covariant(&fermions, &vacuum));
    let moved = basis.apply_covariant(&lp, &psi);
    let overlap: Complex64 = psi
        .iter()
        .map(|(key, a)| a.conj() * moved.get(key).copied().unwrap_or_default())
        .sum();
    let numeric = ((overlap.arg() * f64::from(n) / (2.0 * std::f64::consts::PI)).round() as i64)
        .rem_euclid(i64::from(n)) as u32;

    let mut implied = vec![0u32; lattice.num_sites()];
    if fermion_path.start != fermion_path.end {
        implied[fermion_path.start] = q % n;
        implied[fermion_path.end] = (n - q % n) % n;
    }
    let charges_consistent = psi.keys().all(|(c, _)| *c == implied);

    Ok(BraidReport {
        algebraic_phase_exponent: algebraic,
        numeric_phase_exponent: numeric,
        agree: algebraic == numeric && (overlap.norm() - 1.0).abs() < 1e-9,
        expected_exponent: expected,
        winding_start: ws,
        winding_end: we,
        overlap_modulus: overlap.norm(),
        charges_consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::TorusLattice;

    #[test]
    fn z2_braid_gives_minus_one() {
        let t = TorusLattice::build(4, 4).unwrap();
        let spec = GaugeModelSpec::new(2, t.clone(), 0.0, 1.0);
        let f = t.path_between(t.site(0, 3), t.site(3, 3)).unwrap();
        let v = t.dual_path_between(t.site(1, 1), t.site(3, 1)).unwrap();
        let lp = t.rectangle_loop(t.site(1, 1), 1, 1).unwrap();
        let r = braiding_check(&spec, 1, &f, &v, &lp).unwrap();
        assert_eq!(r.expected_exponent, 1);
        assert_eq!(r.algebraic_phase_exponent, 1);
        assert!(r.agree && r.charges_consistent);
    }

    #[test]
    fn loop_around_both_ends_is_trivial() {
        let t = TorusLattice::build(5, 5).unwrap();
        let spec = GaugeModelSpec::new(3, t.clone(), 0.0, 1.0);
        let f = t.path_between(t.site(0, 4), t.site(4, 4)).unwrap();
        let v = t.dual_path_between(t.site(1, 1), t.site(2, 1)).unwrap();
        let lp = t.rectangle_loop(t.site(1, 1), 2, 1).unwrap();
        let r = braiding_check(&spec, 1, &f, &v, &lp).unwrap();
        assert_eq!((r.winding_start, r.winding_end), (1, 1));
        assert_eq!(r.expected_exponent, 0);
        assert_eq!(r.numeric_phase_exponent, 0);
        assert!(r.agree);
    }

    #[test]
    fn open_loop_is_a_geometry_error() {
        let t = TorusLattice::build(4, 4).unwrap();
        let spec = GaugeModelSpec::new(2, t.clone(), 0.0, 1.0);
        let f = t.path_between(0, 1).unwrap();
        let v = t.dual_path_between(5, 6).unwrap();
        let open = t.path_between(0, 10).unwrap();
        assert!(matches!(
            braiding_check(&spec, 1, &f, &v, &open),
            Err(GaugeError::Geometry(_))
        ));
    }
}
