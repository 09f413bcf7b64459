use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{GaugeError, GaugeModelSpec};
use crate::algebra::{root_of_unity, PauliString, ZnPhase};
use crate::lattice::TorusLattice;

/// Label of a gauge-invariant basis state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FluxBasisState {
    pub fluxes: Vec<u32>,
    pub z_a: u32,
    pub z_b: u32,
}

/// Effect of a single `X` on a link: digit shifts of the representative and,
/// for tree links, the gauge transformation needed to restore tree gauge.
#[derive(Debug, Clone)]
struct LinkAction {
    shifts: Vec<(usize, i64)>,
    /// `κ` for tree links (+1 when the link points into the detached
    /// subtree), 0 for cotree links.
    kappa: i64,
    detached: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct FluxBasis {
    order: u32,
    lattice: TorusLattice,
    cotree: Vec<usize>,
    /// Site visiting order and the tree link to each site's parent.
    bfs: Vec<usize>,
    parent_link: Vec<Option<usize>>,
    actions: Vec<LinkAction>,
    dim: u128,
}

/// Sparse superposition over basis states in possibly different charge
/// sectors: `(charges, index) → amplitude`.
pub type SectorState = BTreeMap<(Vec<u32>, u64), Complex64>;

impl FluxBasis {
    pub fn new(order: u32, lattice: TorusLattice) -> Result<Self, GaugeError> {
        if order < 2 {
            return Err(GaugeError::InvalidOrder(order));
        }
        let ns = lattice.num_sites();
        let nl = lattice.num_links();
        let mut parent_link = vec![None; ns];
        let mut seen = vec![false; ns];
        let mut bfs = vec![0usize];
        seen[0] = true;
        let mut tree = vec![false; nl];
        let mut head = 0;
        while head < bfs.len() {
            let s = bfs[head];
            head += 1;
            let [out1, out2, in1, in2] = lattice.star(s);
            for (l, _) in [out1, out2, in1, in2] {
                let (u, v) = lattice.link_endpoints(l);
                let other = if u == s { v } else { u };
                if !seen[other] {
                    seen[other] = true;
                    tree[l] = true;
                    parent_link[other] = Some(l);
                    bfs.push(other);
                }
            }
        }
        let cotree: Vec<usize> = (0..nl).filter(|&l| !tree[l]).collect();
        let mut digit_of_link = vec![None; nl];
        for (i, &l) in cotree.iter().enumerate() {
            digit_of_link[l] = Some(i);
        }

        let mut children = vec![Vec::new(); ns];
        for &s in &bfs[1..] {
            let l = parent_link[s].expect("non-root has a parent");
            let (u, v) = lattice.link_endpoints(l);
            let parent = if u == s { v } else { u };
            children[parent].push(s);
        }
        let subtree = |root: usize| -> Vec<bool> {
            let mut inside = vec![false; ns];
            let mut stack = vec![root];
            while let Some(s) = stack.pop() {
                inside[s] = true;
                stack.extend(children[s].iter().copied());
            }
            inside
        };
        let mut actions = Vec::with_capacity(nl);
        for l in 0..nl {
            if let Some(d) = digit_of_link[l] {
                actions.push(LinkAction {
                    shifts: vec![(d, -1)],
                    kappa: 0,
                    detached: Vec::new(),
                });
                continue;
            }
            let (u, v) = lattice.link_endpoints(l);
            let child = if parent_link[v] == Some(l) { v } else { u };
            let inside = subtree(child);
            let kappa = if child == v { 1 } else { -1 };
            let mut shifts = Vec::new();
            for (i, &c) in cotree.iter().enumerate() {
                let (cu, cv) = lattice.link_endpoints(c);
                let coef = i64::from(inside[cv]) - i64::from(inside[cu]);
                if coef != 0 {
                    shifts.push((i, kappa * coef));
                }
            }
            actions.push(LinkAction {
                shifts,
                kappa,
                detached: (0..ns).filter(|&s| inside[s]).collect(),
            });
        }
        let dim = (order as u128).pow(cotree.len() as u32);
        Ok(Self {
            order,
            lattice,
            cotree,
            bfs,
            parent_link,
            actions,
            dim,
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn lattice(&self) -> &TorusLattice {
        &self.lattice
    }

    /// `N^{L1·L2+1}`; may exceed `u64` for large lattices.
    pub fn dim(&self) -> u128 {
        self.dim
    }

    pub fn num_digits(&self) -> usize {
        self.cotree.len()
    }

    pub fn cotree_links(&self) -> &[usize] {
        &self.cotree
    }

    pub fn digits(&self, index: u64) -> Vec<u32> {
        let n = u64::from(self.order);
        let mut rest = index;
        (0..self.cotree.len())
            .map(|_| {
                let d = (rest % n) as u32;
                rest /= n;
                d
            })
            .collect()
    }

    pub fn index_of_digits(&self, digits: &[u32]) -> u64 {
        let n = u64::from(self.order);
        digits.iter().rev().fold(0u64, |acc, &d| acc * n + u64::from(d))
    }

    /// Tree-gauge link configuration of a basis state.
    pub fn representative(&self, index: u64) -> Vec<u32> {
        let mut a = vec![0u32; self.lattice.num_links()];
        for (d, &l) in self.digits(index).iter().zip(&self.cotree) {
            a[l] = *d;
        }
        a
    }

    fn holonomies(&self, a: &[u32]) -> (u32, u32) {
        let n = self.order;
        let sum = |links: Vec<usize>| links.iter().map(|&l| a[l]).sum::<u32>() % n;
        (sum(self.lattice.cycle_a_z()), sum(self.lattice.cycle_b_z()))
    }

    pub fn label(&self, index: u64) -> FluxBasisState {
        let a = self.representative(index);
        let (z_a, z_b) = self.holonomies(&a);
        FluxBasisState {
            fluxes: self.lattice.fluxes(&a, self.order),
            z_a,
            z_b,
        }
    }

    /// Holonomy labels only, without computing fluxes.
    pub fn holonomy_labels(&self, index: u64) -> (u32, u32) {
        self.holonomies(&self.representative(index))
    }

    /// Brings a link configuration to tree gauge (gauge transformations
    /// preserve every flux and holonomy).
    fn gauge_fix(&self, a: &mut [u32]) {
        let n = i64::from(self.order);
        let mut g = vec![0i64; self.lattice.num_sites()];
        for &s in &self.bfs[1..] {
            let l = self.parent_link[s].expect("non-root has a parent");
            let (u, v) = self.lattice.link_endpoints(l);
            let al = i64::from(a[l]);
            if s == v {
                g[v] = g[u] - al;
            } else {
                g[u] = al + g[v];
            }
        }
        for (l, al) in a.iter_mut().enumerate() {
            let (u, v) = self.lattice.link_endpoints(l);
            *al = (i64::from(*al) - g[u] + g[v]).rem_euclid(n) as u32;
        }
    }

    pub fn index_of(&self, label: &FluxBasisState) -> Result<u64, GaugeError> {
        let np = self.lattice.num_plaquettes();
        if label.fluxes.len() != np {
            return Err(GaugeError::Length {
                what: "fluxes",
                expected: np,
                got: label.fluxes.len(),
            });
        }
        let n = self.order;
        let target: Vec<i64> = label.fluxes.iter().map(|&w| i64::from(w)).collect();
        let mut a = self
            .lattice
            .solve_plaquette_field(&target, n)
            .map_err(|sum| GaugeError::FluxConstraint { sum, order: n })?;
        let (za, zb) = self.holonomies(&a);
        let da = (label.z_a + n - za) % n;
        let db = (label.z_b + n - zb) % n;
        for l in self.lattice.cycle_b_x() {
            a[l] = (a[l] + da) % n;
        }
        for l in self.lattice.cycle_a_x() {
            a[l] = (a[l] + db) % n;
        }
        self.gauge_fix(&mut a);
        let digits: Vec<u32> = self.cotree.iter().map(|&l| a[l]).collect();
        Ok(self.index_of_digits(&digits))
    }

    /// `X_link^power` on `|index; charges⟩`: new index and phase exponent.
    pub fn apply_x(&self, index: u64, charges: &[u32], link: usize, power: i64) -> (u64, i64) {
        let n = i64::from(self.order);
        let act = &self.actions[link];
        let mut digits = self.digits(index);
        for &(d, coef) in &act.shifts {
            digits[d] = (i64::from(digits[d]) + power * coef).rem_euclid(n) as u32;
        }
        let phase = if act.kappa == 0 {
            0
        } else {
            let inside: i64 = act.detached.iter().map(|&s| i64::from(charges[s])).sum();
            -power * act.kappa * inside
        };
        (self.index_of_digits(&digits), phase.rem_euclid(n))
    }

    /// Digit-level form of [`FluxBasis::apply_x`] for a fixed charge sector;
    /// returns the per-unit phase exponent.
    pub(crate) fn x_shifts(&self, link: usize, charges: &[u32]) -> (&[(usize, i64)], i64) {
        let act = &self.actions[link];
        let inside: i64 = act.detached.iter().map(|&s| i64::from(charges[s])).sum();
        (&act.shifts, -act.kappa * inside)
    }

    /// Applies a string to a superposition, tracking charge sectors. `Z`
    /// factors on open strings move charge between sites.
    pub fn apply_covariant(&self, s: &PauliString, state: &SectorState) -> SectorState {
        let n = self.order;
        let mut out = SectorState::new();
        for ((charges, index), &amp) in state {
            let mut idx = *index;
            let mut phase = i64::from(s.phase().exponent());
            for (l, p) in s.x_powers() {
                let (next, ph) = self.apply_x(idx, charges, l, i64::from(p));
                idx = next;
                phase += ph;
            }
            let rep = self.representative(idx);
            let mut c = charges.clone();
            for (l, p) in s.z_powers() {
                phase += i64::from(p) * i64::from(rep[l]);
                let (u, v) = self.lattice.link_endpoints(l);
                c[u] = (c[u] + p) % n;
                c[v] = (c[v] + n - p) % n;
            }
            *out.entry((c, idx)).or_default() += amp * root_of_unity(phase, n);
        }
        out.retain(|_, v| v.norm() > 1e-14);
        out
    }

    /// Action of a charge-neutral string on a basis state.
    pub fn apply_to_flux_state(
        &self,
        s: &PauliString,
        charges: &[u32],
        index: u64,
    ) -> Result<(u64, ZnPhase), GaugeError> {
        if s.order() != self.order {
            return Err(crate::algebra::AlgebraError::OrderMismatch {
                left: s.order(),
                right: self.order,
            }
            .into());
        }
        let n = self.order;
        let mut div = vec![0u32; self.lattice.num_sites()];
        for (l, p) in s.z_powers() {
            let (u, v) = self.lattice.link_endpoints(l);
            div[u] = (div[u] + p) % n;
            div[v] = (div[v] + n - p) % n;
        }
        if let Some((site, &charge)) = div.iter().enumerate().find(|(_, &c)| c != 0) {
            return Err(GaugeError::GaugeViolation { site, charge });
        }
        let state = SectorState::from([((charges.to_vec(), index), Complex64::new(1.0, 0.0))]);
        let out = self.apply_covariant(s, &state);
        let ((_, idx), amp) = out.into_iter().next().expect("single basis state in, single out");
        let exponent = (amp.arg() * f64::from(n) / (2.0 * std::f64::consts::PI)).round() as i64;
        Ok((idx, ZnPhase::new(exponent, n)))
    }
}

/// Basis of `spec`, refusing dimensions above `max_dim`.
pub fn build_physical_basis(spec: &GaugeModelSpec, max_dim: u64) -> Result<FluxBasis, GaugeError> {
    spec.validate()?;
    let basis = FluxBasis::new(spec.order, spec.lattice.clone())?;
    if basis.dim() > u128::from(max_dim) {
        return Err(GaugeError::Capacity {
            required: basis.dim(),
            budget: max_dim,
        });
    }
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Direction;

    #[test]
    fn dimension_counts() {
        let t = TorusLattice::build(2, 2).unwrap();
        assert_eq!(FluxBasis::new(2, t.clone()).unwrap().dim(), 32);
        assert_eq!(FluxBasis::new(3, t).unwrap().dim(), 243);
        let bad = GaugeModelSpec::square(2, 2, 0.0, 1.0)
            .unwrap()
            .with_charges(vec![1, 0, 0, 0]);
        assert!(matches!(
            build_physical_basis(&bad, 1 << 20),
            Err(GaugeError::ChargeSum { .. })
        ));
        let big = GaugeModelSpec::square(3, 4, 0.0, 1.0).unwrap();
        assert!(matches!(
            build_physical_basis(&big, 1000),
            Err(GaugeError::Capacity { .. })
        ));
    }

    #[test]
    fn labels_round_trip() {
        let t = TorusLattice::build(3, 2).unwrap();
        let b = FluxBasis::new(3, t).unwrap();
        for i in 0..b.dim() as u64 {
            let lab = b.label(i);
            assert_eq!(lab.fluxes.iter().sum::<u32>() % 3, 0);
            assert_eq!(b.index_of(&lab).unwrap(), i);
        }
    }

    #[test]
    fn bulk_x_makes_opposite_fluxes() {
        let t = TorusLattice::build(3, 3).unwrap();
        let b = FluxBasis::new(3, t.clone()).unwrap();
        let l = t.link_at(1, 1, Direction::One);
        let x = PauliString::x(3, l, 1);
        let zero = vec![0; 9];
        let (idx, ph) = b.apply_to_flux_state(&x, &zero, 0).unwrap();
        assert!(ph.is_one());
        let lab = b.label(idx);
        let [(p1, _), (p2, _)] = t.plaquettes_of_link(l);
        for p in 0..9 {
            let expect = if p == p1 {
                2
            } else if p == p2 {
                1
            } else {
                0
            };
            assert_eq!(lab.fluxes[p], expect);
        }
    }

    #[test]
    fn thooft_loop_shifts_conjugate_holonomy() {
        let t = TorusLattice::build(3, 3).unwrap();
        let b = FluxBasis::new(3, t.clone()).unwrap();
        let zero = vec![0; 9];
        let (idx, _) = b.apply_to_flux_state(&t.thooft_a(3), &zero, 0).unwrap();
        let lab = b.label(idx);
        assert!(lab.fluxes.iter().all(|&w| w == 0));
        // X lowers link values, so ∏X over the dual a-cycle lowers z_b
        assert_eq!((lab.z_a, lab.z_b), (0, 2));
        let (idx, _) = b
            .apply_to_flux_state(&t.thooft_a(3).dagger(), &zero, 0)
            .unwrap();
        assert_eq!(b.label(idx).z_b, 1);
    }

    #[test]
    fn plaquette_string_is_diagonal_with_flux_phase() {
        let t = TorusLattice::build(3, 2).unwrap();
        let b = FluxBasis::new(5, t.clone()).unwrap();
        let zero = vec![0; 6];
        for i in [0u64, 17, 1234, 9999] {
            let lab = b.label(i);
            for p in 0..6 {
                let (j, ph) = b
                    .apply_to_flux_state(&t.plaquette_string(5, p), &zero, i)
                    .unwrap();
                assert_eq!(j, i);
                assert_eq!(ph.exponent(), lab.fluxes[p]);
            }
        }
    }

    #[test]
    fn open_z_string_is_a_gauge_violation() {
        let t = TorusLattice::build(2, 2).unwrap();
        let b = FluxBasis::new(2, t).unwrap();
        assert!(matches!(
            b.apply_to_flux_state(&PauliString::z(2, 0, 1), &[0; 4], 0),
            Err(GaugeError::GaugeViolation { .. })
        ));
    }
}
