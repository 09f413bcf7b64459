use proptest::prelude::*;
use zn_gauge::algebra::PauliString;
use zn_gauge::lattice::{Move, TorusLattice};

fn moves() -> impl Strategy<Value = Vec<Move>> {
    prop::collection::vec(
        prop_oneof![
            Just(Move::PlusOne),
            Just(Move::MinusOne),
            Just(Move::PlusTwo),
            Just(Move::MinusTwo)
        ],
        0..12,
    )
}

proptest! {
    #[test]
    fn crossing_count_is_the_commutation_phase(
        a in moves(), b in moves(), s in 0usize..30, p in 0usize..30, n in 2u32..7,
    ) {
        let t = TorusLattice::build(5, 6).unwrap();
        let path = t.path_from_moves(s, &a).unwrap();
        let dual = t.dual_path_from_moves(p, &b).unwrap();
        let z = path.z_string(n, 1);
        let x = dual.x_string(n, 1);
        let want = t.crossing_exponent(&path, &dual).rem_euclid(i64::from(n)) as u32;
        prop_assert_eq!(z.commutation_phase(&x).unwrap().exponent(), want);
    }

    #[test]
    fn z_strings_only_violate_gauss_law_at_their_ends(a in moves(), s in 0usize..30, n in 2u32..7) {
        let t = TorusLattice::build(5, 6).unwrap();
        let path = t.path_from_moves(s, &a).unwrap();
        let z = path.z_string(n, 1);
        for site in 0..t.num_sites() {
            let e = i64::from(t.star_string(n, site).commutation_phase(&z).unwrap().exponent());
            let mut want = 0i64;
            if path.start != path.end {
                if site == path.start { want += 1; }
                if site == path.end { want -= 1; }
            }
            prop_assert_eq!(e == 0, want.rem_euclid(i64::from(n)) == 0);
        }
        let at = |site| i64::from(t.star_string(n, site).commutation_phase(&z).unwrap().exponent());
        prop_assert_eq!((at(path.start) + at(path.end)).rem_euclid(i64::from(n)), 0);
    }

    #[test]
    fn winding_is_translation_invariant(
        w in 1usize..4, h in 1usize..4, x in 0i64..6, y in 0i64..6, dx in 0i64..6, dy in 0i64..6,
    ) {
        let t = TorusLattice::build(6, 6).unwrap();
        let a = t.rectangle_loop(t.site(x, y), w, h).unwrap();
        let b = t.rectangle_loop(t.site(x + dx, y + dy), w, h).unwrap();
        let wa = t.loop_winding(&a).unwrap();
        let wb = t.loop_winding(&b).unwrap();
        for px in 0..6i64 {
            for py in 0..6i64 {
                prop_assert_eq!(wa[t.site(px, py)], wb[t.site(px + dx, py + dy)]);
            }
        }
        prop_assert_eq!(wa.iter().sum::<i64>(), (w * h) as i64);
    }

    #[test]
    fn plaquette_field_solutions_realize_their_target(
        target in prop::collection::vec(0i64..5, 20), n in 2u32..6,
    ) {
        let t = TorusLattice::build(4, 5).unwrap();
        let target: Vec<i64> = target.iter().map(|v| v % i64::from(n)).collect();
        let sum = target.iter().sum::<i64>().rem_euclid(i64::from(n));
        match t.solve_plaquette_field(&target, n) {
            Ok(config) => {
                prop_assert_eq!(sum, 0);
                let flux = t.fluxes(&config, n);
                for (f, want) in flux.iter().zip(&target) {
                    prop_assert_eq!(i64::from(*f), *want);
                }
            }
            Err(obstruction) => prop_assert_eq!(i64::from(obstruction), sum),
        }
    }
}

#[test]
fn plaquettes_and_stars_commute_and_holonomies_pair_with_thooft_loops() {
    let t = TorusLattice::build(3, 4).unwrap();
    for n in [2u32, 3, 5] {
        for p in 0..t.num_plaquettes() {
            for s in 0..t.num_sites() {
                let c = t.plaquette_string(n, p).commutation_phase(&t.star_string(n, s)).unwrap();
                assert!(c.is_one());
            }
        }
        let ab = t.holonomy_a(n).commutation_phase(&t.thooft_b(n)).unwrap();
        let aa = t.holonomy_a(n).commutation_phase(&t.thooft_a(n)).unwrap();
        assert!(!ab.is_one() || !aa.is_one());
        let prod: PauliString = (0..t.num_plaquettes()).fold(PauliString::identity(n), |acc, p| {
            acc.multiply(&t.plaquette_string(n, p)).unwrap()
        });
        assert!(prod.is_identity(), "product of all plaquettes is trivial on the torus");
    }
}
