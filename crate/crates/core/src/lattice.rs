//! Periodic L1×L2 square lattice, its dual, paths and reference cycles.
//!
//! Sites are numbered row-major, `s = x + L1·y`. Link `2s` points from `s`
//! in direction 1 (east) and link `2s + 1` in direction 2 (north). Plaquette
//! `p` has lower-left corner at site `p` and its boundary is traversed
//! counterclockwise, so the east link below it and the north link on its
//! right carry orientation `+1`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::PauliString;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("lattice extents must be at least 2, got {l1}x{l2}")]
    TooSmall { l1: usize, l2: usize },
    #[error("index {index} out of range for {what} (size {size})")]
    OutOfRange {
        what: &'static str,
        index: usize,
        size: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    One,
    Two,
}

impl Direction {
    pub fn offset(self) -> usize {
        match self {
            Direction::One => 0,
            Direction::Two => 1,
        }
    }
}

/// Unit step on the lattice or its dual.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    PlusOne,
    MinusOne,
    PlusTwo,
    MinusTwo,
}

impl Move {
    fn delta(self) -> (i64, i64) {
        match self {
            Move::PlusOne => (1, 0),
            Move::MinusOne => (-1, 0),
            Move::PlusTwo => (0, 1),
            Move::MinusTwo => (0, -1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathKind {
    Original,
    Dual,
}

/// One link of a path. For an original path `sign = +1` when the link is
/// walked along its own direction. For a dual path `sign = +1` when the
/// step crosses the link from its left to its right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathStep {
    pub link: usize,
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticePath {
    pub kind: PathKind,
    /// Site (original) or plaquette (dual) where the path starts.
    pub start: usize,
    pub end: usize,
    pub steps: Vec<PathStep>,
    /// Net displacement of the unwrapped path; zero for closed contractible
    /// loops.
    pub winding: (i64, i64),
    moves: Vec<Move>,
}

impl LatticePath {
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_closed(&self) -> bool {
        self.start == self.end
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    /// `∏ Z^{q·sign}` along an original path. Creates charge `+q` at the
    /// start site and `-q` at the end site.
    pub fn z_string(&self, order: u32, q: i64) -> PauliString {
        debug_assert_eq!(self.kind, PathKind::Original);
        PauliString::from_powers(
            order,
            self.steps.iter().map(|st| (st.link, q * i64::from(st.sign))),
            std::iter::empty(),
        )
    }

    /// `∏ X^{-r·sign}` along a dual path. Raises the flux of the start
    /// plaquette by `r` and lowers that of the end plaquette by `r`.
    pub fn x_string(&self, order: u32, r: i64) -> PauliString {
        debug_assert_eq!(self.kind, PathKind::Dual);
        PauliString::from_powers(
            order,
            std::iter::empty(),
            self.steps.iter().map(|st| (st.link, -r * i64::from(st.sign))),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusLattice {
    l1: usize,
    l2: usize,
}

impl TorusLattice {
    pub fn build(l1: usize, l2: usize) -> Result<Self, LatticeError> {
        if l1 < 2 || l2 < 2 {
            return Err(LatticeError::TooSmall { l1, l2 });
        }
        Ok(Self { l1, l2 })
    }

    pub fn l1(&self) -> usize {
        self.l1
    }

    pub fn l2(&self) -> usize {
        self.l2
    }

    pub fn num_sites(&self) -> usize {
        self.l1 * self.l2
    }

    pub fn num_links(&self) -> usize {
        2 * self.l1 * self.l2
    }

    pub fn num_plaquettes(&self) -> usize {
        self.l1 * self.l2
    }

    pub fn site(&self, x: i64, y: i64) -> usize {
        let x = x.rem_euclid(self.l1 as i64) as usize;
        let y = y.rem_euclid(self.l2 as i64) as usize;
        x + self.l1 * y
    }

    pub fn coords(&self, site: usize) -> (usize, usize) {
        (site % self.l1, site / self.l1)
    }

    pub fn link(&self, site: usize, dir: Direction) -> usize {
        2 * site + dir.offset()
    }

    pub fn link_at(&self, x: i64, y: i64, dir: Direction) -> usize {
        self.link(self.site(x, y), dir)
    }

    pub fn link_direction(&self, link: usize) -> Direction {
        if link.is_multiple_of(2) {
            Direction::One
        } else {
            Direction::Two
        }
    }

    /// `(tail, head)` sites of a link.
    pub fn link_endpoints(&self, link: usize) -> (usize, usize) {
        let s = link / 2;
        let (x, y) = self.coords(s);
        let head = match self.link_direction(link) {
            Direction::One => self.site(x as i64 + 1, y as i64),
            Direction::Two => self.site(x as i64, y as i64 + 1),
        };
        (s, head)
    }

    fn shift(&self, site: usize, dx: i64, dy: i64) -> usize {
        let (x, y) = self.coords(site);
        self.site(x as i64 + dx, y as i64 + dy)
    }

    /// Boundary links of a plaquette with orientations, counterclockwise
    /// from the bottom edge.
    pub fn plaquette_boundary(&self, p: usize) -> [(usize, i8); 4] {
        [
            (self.link(p, Direction::One), 1),
            (self.link(self.shift(p, 1, 0), Direction::Two), 1),
            (self.link(self.shift(p, 0, 1), Direction::One), -1),
            (self.link(p, Direction::Two), -1),
        ]
    }

    /// The two plaquettes containing a link with the orientation the link
    /// has in each. The first entry is the one with orientation `+1`.
    pub fn plaquettes_of_link(&self, link: usize) -> [(usize, i8); 2] {
        let s = link / 2;
        match self.link_direction(link) {
            Direction::One => [(s, 1), (self.shift(s, 0, -1), -1)],
            Direction::Two => [(self.shift(s, -1, 0), 1), (s, -1)],
        }
    }

    /// Links touching a site with the star exponent: `+1` on the two
    /// outgoing links, `-1` on the two incoming ones.
    pub fn star(&self, site: usize) -> [(usize, i8); 4] {
        [
            (self.link(site, Direction::One), 1),
            (self.link(site, Direction::Two), 1),
            (self.link(self.shift(site, -1, 0), Direction::One), -1),
            (self.link(self.shift(site, 0, -1), Direction::Two), -1),
        ]
    }

    pub fn plaquette_string(&self, order: u32, p: usize) -> PauliString {
        PauliString::from_powers(
            order,
            self.plaquette_boundary(p)
                .iter()
                .map(|&(l, o)| (l, i64::from(o))),
            std::iter::empty(),
        )
    }

    pub fn star_string(&self, order: u32, site: usize) -> PauliString {
        PauliString::from_powers(
            order,
            std::iter::empty(),
            self.star(site).iter().map(|&(l, e)| (l, i64::from(e))),
        )
    }

    /// Direction-1 links along row 0.
    pub fn cycle_a_z(&self) -> Vec<usize> {
        (0..self.l1)
            .map(|x| self.link_at(x as i64, 0, Direction::One))
            .collect()
    }

    /// Direction-2 links along column 0.
    pub fn cycle_b_z(&self) -> Vec<usize> {
        (0..self.l2)
            .map(|y| self.link_at(0, y as i64, Direction::Two))
            .collect()
    }

    /// Links crossed by the dual loop running along row 0 in direction 1.
    pub fn cycle_a_x(&self) -> Vec<usize> {
        (0..self.l1)
            .map(|x| self.link_at(x as i64, 0, Direction::Two))
            .collect()
    }

    /// Links crossed by the dual loop running up column 0 in direction 2.
    pub fn cycle_b_x(&self) -> Vec<usize> {
        (0..self.l2)
            .map(|y| self.link_at(0, y as i64, Direction::One))
            .collect()
    }

    pub fn holonomy_a(&self, order: u32) -> PauliString {
        PauliString::from_powers(
            order,
            self.cycle_a_z().into_iter().map(|l| (l, 1)),
            std::iter::empty(),
        )
    }

    pub fn holonomy_b(&self, order: u32) -> PauliString {
        PauliString::from_powers(
            order,
            self.cycle_b_z().into_iter().map(|l| (l, 1)),
            std::iter::empty(),
        )
    }

    /// `∏ X` over [`TorusLattice::cycle_a_x`].
    pub fn thooft_a(&self, order: u32) -> PauliString {
        PauliString::from_powers(
            order,
            std::iter::empty(),
            self.cycle_a_x().into_iter().map(|l| (l, 1)),
        )
    }

    /// `∏ X` over [`TorusLattice::cycle_b_x`].
    pub fn thooft_b(&self, order: u32) -> PauliString {
        PauliString::from_powers(
            order,
            std::iter::empty(),
            self.cycle_b_x().into_iter().map(|l| (l, 1)),
        )
    }

    fn check(&self, what: &'static str, index: usize, size: usize) -> Result<(), LatticeError> {
        if index >= size {
            return Err(LatticeError::OutOfRange { what, index, size });
        }
        Ok(())
    }

    /// Walks `moves` on the original lattice starting from `start`.
    pub fn path_from_moves(&self, start: usize, moves: &[Move]) -> Result<LatticePath, LatticeError> {
        self.check("site", start, self.num_sites())?;
        let mut cur = start;
        let mut steps = Vec::with_capacity(moves.len());
        let mut wind = (0i64, 0i64);
        for &m in moves {
            let (dx, dy) = m.delta();
            let next = self.shift(cur, dx, dy);
            let step = match m {
                Move::PlusOne => PathStep { link: self.link(cur, Direction::One), sign: 1 },
                Move::MinusOne => PathStep { link: self.link(next, Direction::One), sign: -1 },
                Move::PlusTwo => PathStep { link: self.link(cur, Direction::Two), sign: 1 },
                Move::MinusTwo => PathStep { link: self.link(next, Direction::Two), sign: -1 },
            };
            steps.push(step);
            wind.0 += dx;
            wind.1 += dy;
            cur = next;
        }
        Ok(LatticePath {
            kind: PathKind::Original,
            start,
            end: cur,
            steps,
            winding: wind,
            moves: moves.to_vec(),
        })
    }

    /// Walks `moves` on the dual lattice starting from plaquette `start`.
    pub fn dual_path_from_moves(
        &self,
        start: usize,
        moves: &[Move],
    ) -> Result<LatticePath, LatticeError> {
        self.check("plaquette", start, self.num_plaquettes())?;
        let mut cur = start;
        let mut steps = Vec::with_capacity(moves.len());
        let mut wind = (0i64, 0i64);
        for &m in moves {
            let (dx, dy) = m.delta();
            let next = self.shift(cur, dx, dy);
            let step = match m {
                Move::PlusOne => PathStep { link: self.link(next, Direction::Two), sign: 1 },
                Move::MinusOne => PathStep { link: self.link(cur, Direction::Two), sign: -1 },
                Move::PlusTwo => PathStep { link: self.link(next, Direction::One), sign: -1 },
                Move::MinusTwo => PathStep { link: self.link(cur, Direction::One), sign: 1 },
            };
            steps.push(step);
            wind.0 += dx;
            wind.1 += dy;
            cur = next;
        }
        Ok(LatticePath {
            kind: PathKind::Dual,
            start,
            end: cur,
            steps,
            winding: wind,
            moves: moves.to_vec(),
        })
    }

    fn staircase_moves(&self, from: (usize, usize), to: (usize, usize)) -> Vec<Move> {
        let short = |d: i64, l: usize| -> i64 {
            let l = l as i64;
            let mut d = d.rem_euclid(l);
            if 2 * d > l {
                d -= l;
            }
            d
        };
        let dx = short(to.0 as i64 - from.0 as i64, self.l1);
        let dy = short(to.1 as i64 - from.1 as i64, self.l2);
        let mut moves = Vec::new();
        let m1 = if dx >= 0 { Move::PlusOne } else { Move::MinusOne };
        let m2 = if dy >= 0 { Move::PlusTwo } else { Move::MinusTwo };
        moves.extend(std::iter::repeat_n(m1, dx.unsigned_abs() as usize));
        moves.extend(std::iter::repeat_n(m2, dy.unsigned_abs() as usize));
        moves
    }

    /// Shortest staircase path, direction 1 first, then direction 2.
    pub fn path_between(&self, x: usize, y: usize) -> Result<LatticePath, LatticeError> {
        self.check("site", y, self.num_sites())?;
        self.check("site", x, self.num_sites())?;
        let moves = self.staircase_moves(self.coords(x), self.coords(y));
        self.path_from_moves(x, &moves)
    }

    /// Dual counterpart of [`TorusLattice::path_between`].
    pub fn dual_path_between(&self, p: usize, q: usize) -> Result<LatticePath, LatticeError> {
        self.check("plaquette", q, self.num_plaquettes())?;
        self.check("plaquette", p, self.num_plaquettes())?;
        let moves = self.staircase_moves(self.coords(p), self.coords(q));
        self.dual_path_from_moves(p, &moves)
    }

    /// Counterclockwise `w×h` rectangle with lower-left corner at `corner`.
    pub fn rectangle_loop(&self, corner: usize, w: usize, h: usize) -> Result<LatticePath, LatticeError> {
        let mut moves = vec![Move::PlusOne; w];
        moves.extend(std::iter::repeat_n(Move::PlusTwo, h));
        moves.extend(std::iter::repeat_n(Move::MinusOne, w));
        moves.extend(std::iter::repeat_n(Move::MinusTwo, h));
        self.path_from_moves(corner, &moves)
    }

    /// Dual loop wrapping once around direction 1, starting at plaquette `p`.
    pub fn dual_wrap_one(&self, p: usize) -> Result<LatticePath, LatticeError> {
        self.dual_path_from_moves(p, &vec![Move::PlusOne; self.l1])
    }

    /// Dual loop wrapping once around direction 2, starting at plaquette `p`.
    pub fn dual_wrap_two(&self, p: usize) -> Result<LatticePath, LatticeError> {
        self.dual_path_from_moves(p, &vec![Move::PlusTwo; self.l2])
    }

    /// Signed count of links shared by an original path and the links
    /// crossed by a dual path, `Σ sign_p · sign_q`.
    pub fn crossing_exponent(&self, p: &LatticePath, q: &LatticePath) -> i64 {
        let mut net = vec![0i64; self.num_links()];
        for st in &p.steps {
            net[st.link] += i64::from(st.sign);
        }
        q.steps
            .iter()
            .map(|st| net[st.link] * i64::from(st.sign))
            .sum()
    }

    /// Winding number of a closed contractible original loop around every
    /// plaquette center, counterclockwise positive. `None` if the loop is
    /// open or wraps the torus.
    pub fn loop_winding(&self, path: &LatticePath) -> Option<Vec<i64>> {
        if path.kind != PathKind::Original || !path.is_closed() || path.winding != (0, 0) {
            return None;
        }
        let (x0, y0) = self.coords(path.start);
        let (mut x, mut y) = (x0 as i64, y0 as i64);
        let mut verticals = Vec::new();
        let (mut min_x, mut max_x) = (x, x);
        for &m in path.moves() {
            let (dx, dy) = m.delta();
            if dy != 0 {
                let band = if dy > 0 { y } else { y - 1 };
                verticals.push((x, band, dy));
            }
            x += dx;
            y += dy;
            min_x = min_x.min(x);
            max_x = max_x.max(x);
        }
        let mut w = vec![0i64; self.num_plaquettes()];
        // A ray from each plaquette-center image towards +x crosses the
        // vertical edges to its right; upward crossings count +1.
        for (ex, band, dy) in verticals {
            for k in min_x..ex {
                w[self.site(k, band)] += dy;
            }
        }
        Some(w)
    }

    /// Link field `ζ` with `Σ_{l∈∂p} o_{p,l} ζ_l ≡ target_p (mod N)` for
    /// every plaquette, built on a row-major BFS spanning tree of the dual
    /// lattice. Fails with the obstruction `Σ_p target_p mod N` when that
    /// is nonzero.
    pub fn solve_plaquette_field(&self, target: &[i64], order: u32) -> Result<Vec<u32>, u32> {
        let n = i64::from(order);
        let obstruction = target.iter().sum::<i64>().rem_euclid(n) as u32;
        if obstruction != 0 {
            return Err(obstruction);
        }
        let np = self.num_plaquettes();
        // BFS over plaquettes; parent_link[p] = link crossed from parent.
        let mut order_seen = Vec::with_capacity(np);
        let mut parent_link = vec![usize::MAX; np];
        let mut seen = vec![false; np];
        seen[0] = true;
        order_seen.push(0);
        let mut head = 0;
        while head < order_seen.len() {
            let p = order_seen[head];
            head += 1;
            for m in [Move::PlusOne, Move::PlusTwo, Move::MinusOne, Move::MinusTwo] {
                let step = self.dual_path_from_moves(p, &[m]).expect("valid plaquette");
                let q = step.end;
                if !seen[q] {
                    seen[q] = true;
                    parent_link[q] = step.steps[0].link;
                    order_seen.push(q);
                }
            }
        }
        let mut zeta = vec![0i64; self.num_links()];
        let mut flux = vec![0i64; np];
        for &p in order_seen.iter().skip(1).rev() {
            let l = parent_link[p];
            let o = self
                .plaquettes_of_link(l)
                .iter()
                .find(|&&(q, _)| q == p)
                .map(|&(_, o)| i64::from(o))
                .expect("tree link borders p");
            let delta = o * (target[p] - flux[p]);
            zeta[l] += delta;
            for (q, oq) in self.plaquettes_of_link(l) {
                flux[q] += i64::from(oq) * delta;
            }
        }
        Ok(zeta.into_iter().map(|z| z.rem_euclid(n) as u32).collect())
    }

    /// `Σ_{l∈∂p} o_{p,l} a_l mod N` for every plaquette.
    pub fn fluxes(&self, config: &[u32], order: u32) -> Vec<u32> {
        (0..self.num_plaquettes())
            .map(|p| {
                self.plaquette_boundary(p)
                    .iter()
                    .map(|&(l, o)| i64::from(o) * i64::from(config[l]))
                    .sum::<i64>()
                    .rem_euclid(i64::from(order)) as u32
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::product;

    #[test]
    fn counts() {
        let t = TorusLattice::build(2, 2).unwrap();
        assert_eq!((t.num_links(), t.num_plaquettes(), t.num_sites()), (8, 4, 4));
        let t = TorusLattice::build(3, 2).unwrap();
        assert_eq!((t.num_links(), t.num_plaquettes()), (12, 6));
        assert_eq!(
            TorusLattice::build(1, 5),
            Err(LatticeError::TooSmall { l1: 1, l2: 5 })
        );
    }

    #[test]
    fn every_link_in_two_plaquettes_with_opposite_orientation() {
        let t = TorusLattice::build(3, 4).unwrap();
        let mut seen = vec![Vec::new(); t.num_links()];
        for p in 0..t.num_plaquettes() {
            for (l, o) in t.plaquette_boundary(p) {
                seen[l].push((p, o));
            }
        }
        for (l, entries) in seen.iter().enumerate() {
            assert_eq!(entries.len(), 2);
            assert_eq!(entries[0].1 + entries[1].1, 0);
            let mut expected = t.plaquettes_of_link(l).to_vec();
            let mut got = entries.clone();
            expected.sort();
            got.sort();
            assert_eq!(got, expected);
        }
    }

    #[test]
    fn reference_cycles_cross_as_expected() {
        let t = TorusLattice::build(3, 3).unwrap();
        let shared = |a: &[usize], b: &[usize]| a.iter().filter(|l| b.contains(l)).count();
        assert_eq!(shared(&t.cycle_a_z(), &t.cycle_b_x()), 1);
        assert_eq!(shared(&t.cycle_a_z(), &t.cycle_a_x()), 0);
        assert_eq!(shared(&t.cycle_b_z(), &t.cycle_a_x()), 1);
        assert_eq!(shared(&t.cycle_b_z(), &t.cycle_b_x()), 0);
    }

    #[test]
    fn all_stars_and_all_plaquettes_multiply_to_identity() {
        let t = TorusLattice::build(3, 2).unwrap();
        for n in [2, 3, 5] {
            let stars: Vec<_> = (0..t.num_sites()).map(|s| t.star_string(n, s)).collect();
            assert!(product(n, &stars).unwrap().is_identity());
            let plaqs: Vec<_> = (0..t.num_plaquettes())
                .map(|p| t.plaquette_string(n, p))
                .collect();
            assert!(product(n, &plaqs).unwrap().is_identity());
        }
    }

    #[test]
    fn star_commutes_with_plaquette_and_closed_loops() {
        let t = TorusLattice::build(4, 4).unwrap();
        let lp = t.rectangle_loop(t.site(1, 1), 2, 1).unwrap().z_string(5, 1);
        for s in 0..t.num_sites() {
            let star = t.star_string(5, s);
            for p in 0..t.num_plaquettes() {
                assert!(star.commutation_phase(&t.plaquette_string(5, p)).unwrap().is_one());
            }
            assert!(lp.commutation_phase(&star).unwrap().is_one());
            assert!(t.holonomy_a(5).commutation_phase(&star).unwrap().is_one());
        }
    }

    #[test]
    fn staircase_paths() {
        let t = TorusLattice::build(3, 3).unwrap();
        assert!(t.path_between(4, 4).unwrap().is_empty());
        let p = t.path_between(t.site(0, 0), t.site(1, 0)).unwrap();
        assert_eq!(p.steps, vec![PathStep { link: 0, sign: 1 }]);
        let p = t.path_between(t.site(0, 0), t.site(2, 2)).unwrap();
        // shortest way is one step back in each direction
        assert_eq!(p.moves(), &[Move::MinusOne, Move::MinusTwo]);
        assert_eq!(p.end, t.site(2, 2));
    }

    #[test]
    fn full_dual_wrap_crosses_every_link_of_the_row() {
        let t = TorusLattice::build(3, 3).unwrap();
        let q = t.dual_wrap_one(0).unwrap();
        assert!(q.is_closed());
        assert_eq!(q.len(), 3);
        let mut links: Vec<_> = q.steps.iter().map(|s| s.link).collect();
        links.sort();
        let mut expect = t.cycle_a_x();
        expect.sort();
        assert_eq!(links, expect);
    }

    #[test]
    fn crossing_counts_match_commutation() {
        let t = TorusLattice::build(4, 4).unwrap();
        let a = t.path_from_moves(0, &[Move::PlusOne; 4]).unwrap();
        let b = t.dual_wrap_two(0).unwrap();
        assert_eq!(t.crossing_exponent(&a, &b).abs(), 1);
        let e = a.z_string(7, 1).commutation_phase(&b.x_string(7, 1)).unwrap();
        assert_eq!(i64::from(e.exponent()), t.crossing_exponent(&a, &b).rem_euclid(7));

        let loop_ = t.rectangle_loop(t.site(1, 1), 1, 1).unwrap();
        let inside = t.dual_path_between(t.site(3, 3), t.site(1, 1)).unwrap();
        assert_eq!(t.crossing_exponent(&loop_, &inside).abs(), 1);
        let far = t.dual_path_between(t.site(3, 0), t.site(3, 2)).unwrap();
        assert_eq!(t.crossing_exponent(&loop_, &far), 0);
    }

    #[test]
    fn dual_x_string_makes_a_vortex_pair() {
        let t = TorusLattice::build(4, 3).unwrap();
        let n = 5;
        let path = t.dual_path_between(t.site(0, 0), t.site(2, 1)).unwrap();
        let s = path.x_string(n, 1);
        let mut a = vec![0u32; t.num_links()];
        for (l, p) in s.x_powers() {
            // X^p lowers the link value by p
            a[l] = (n - p) % n;
        }
        let w = t.fluxes(&a, n);
        for (p, &wp) in w.iter().enumerate() {
            let expected = if p == path.start {
                1
            } else if p == path.end {
                n - 1
            } else {
                0
            };
            assert_eq!(wp, expected, "plaquette {p}");
        }
    }

    #[test]
    fn winding_of_rectangle() {
        let t = TorusLattice::build(5, 5).unwrap();
        let lp = t.rectangle_loop(t.site(3, 3), 2, 2).unwrap();
        let w = t.loop_winding(&lp).unwrap();
        let inside = [t.site(3, 3), t.site(4, 3), t.site(3, 4), t.site(4, 4)];
        for p in 0..t.num_plaquettes() {
            assert_eq!(w[p], i64::from(inside.contains(&p)), "plaquette {p}");
        }
        let wrap = t.path_from_moves(0, &[Move::PlusOne; 5]).unwrap();
        assert!(t.loop_winding(&wrap).is_none());
    }

    #[test]
    fn plaquette_field_solver() {
        let t = TorusLattice::build(3, 4).unwrap();
        let mut target = vec![0i64; 12];
        target[2] = 1;
        target[9] = -1;
        let z = t.solve_plaquette_field(&target, 3).unwrap();
        let w = t.fluxes(&z, 3);
        for p in 0..12 {
            assert_eq!(i64::from(w[p]), target[p].rem_euclid(3));
        }
        let mut single = vec![0i64; 12];
        single[5] = 1;
        assert_eq!(t.solve_plaquette_field(&single, 3), Err(1));
        assert!(t
            .solve_plaquette_field(&[0; 12], 3)
            .unwrap()
            .iter()
            .all(|&v| v == 0));
    }
}
