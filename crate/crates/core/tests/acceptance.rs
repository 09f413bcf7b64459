mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use zn_gauge::algebra::PauliString;
use zn_gauge::duality::{absorb_static_disorder, clock_single_site_gap, random_tau, rgc_isospectrality, spectral_compare};
use zn_gauge::eigen::{lowest_eigenpairs, EigenOptions, SolverChoice};
use zn_gauge::gauge::{
    braiding_check, build_hamiltonian, build_physical_basis, clusters, spectrum, vortex_pair_gap, FluxBasis,
    GaugeModelSpec, SpectrumOptions,
};
use zn_gauge::io::{parse_config, run, RunOutput};
use zn_gauge::lattice::TorusLattice;
use zn_gauge::mft::*;
use zn_gauge::seed;

use common::{omega, random_string, root_exponent, Factored};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    if t > limit {
        Err(format!("took {t:.1?}, limit {limit:?}"))
    } else {
        Ok(t)
    }
}

fn algebra_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = seed::stream(1, "acceptance-algebra", 0);
    let mut kron = 0;
    for case in 0..10_000 {
        let n = 2 + (case % 4) as u32;
        let links = rng.random_range(1..=8usize);
        let a = random_string(&mut rng, n, links);
        let b = random_string(&mut rng, n, links);
        let (fa, fb) = (Factored::of(&a, links), Factored::of(&b, links));
        let ab = fa.mul(&fb);
        let prod = a.multiply(&b).map_err(|e| e.to_string())?;
        let r = ab.ratio(&Factored::of(&prod, links));
        ensure!(r.is_some_and(|r| (r - 1.0).norm() < 1e-9), "case {case}: product mismatch for N={n}");
        ensure!(
            prod.fermion_parity() == a.fermion_parity() ^ b.fermion_parity(),
            "case {case}: fermion parity of product"
        );
        let c = a.commutation(&b).map_err(|e| e.to_string())?;
        let swap = ab.ratio(&fb.mul(&fa)).and_then(|r| root_exponent(r, n));
        ensure!(swap == Some(c.phase.exponent()), "case {case}: commutation phase for N={n}");
        let sign = if a.fermion_parity() & b.fermion_parity() == 1 { -1 } else { 1 };
        ensure!(c.fermionic_sign == sign, "case {case}: fermionic sign");
        // full Kronecker product where it stays small
        if (n as usize).pow(links as u32) <= 64 {
            let (da, db) = (fa.dense(), fb.dense());
            let k = i64::from(c.phase.exponent());
            ensure!(
                (&da * &db - &db * &da * omega(k, n)).norm() < 1e-9,
                "case {case}: dense commutation for N={n}"
            );
            kron += 1;
        }
    }
    let t = within(start, Duration::from_secs(60))?;
    Ok(format!("10000 cases ({kron} with full Kronecker matrices) in {t:.1?}"))
}

fn topological_degeneracy() -> Outcome {
    let start = Instant::now();
    let mut seen = Vec::new();
    for n in [2u32, 3] {
        for l in [2usize, 3] {
            let spec = GaugeModelSpec::square(n, l, 0.0, 1.0).map_err(|e| e.to_string())?;
            let opts = SpectrumOptions {
                k: (n * n) as usize + 2,
                eigen: EigenOptions {
                    choice: SolverChoice::Iterative,
                    ..EigenOptions::default()
                },
                ..SpectrumOptions::default()
            };
            let r = spectrum(&spec, &opts).map_err(|e| e.to_string())?;
            let g = &r.clusters[0];
            ensure!(
                g.size == (n * n) as usize && !g.truncated,
                "N={n} L={l}: ground cluster of {} levels",
                g.size
            );
            seen.push(format!("N={n} L={l}: {}", g.size));
        }
    }
    let t = within(start, Duration::from_secs(120))?;
    Ok(format!("{} in {t:.1?}", seen.join(", ")))
}

fn gap_formula() -> Outcome {
    let lambda2 = 0.7;
    let mut prev = f64::INFINITY;
    for n in 2..=8u32 {
        let formula = 2.0 * lambda2 * (1.0 - (2.0 * std::f64::consts::PI / f64::from(n)).cos());
        let single = clock_single_site_gap(n, lambda2);
        ensure!((single - formula).abs() < 1e-10, "N={n}: single vortex {single} vs {formula}");
        let spec = GaugeModelSpec::square(n, 2, 0.0, lambda2).map_err(|e| e.to_string())?;
        let g = vortex_pair_gap(&spec).map_err(|e| e.to_string())?;
        ensure!((g.pair_gap - 2.0 * formula).abs() < 1e-10, "N={n}: pair gap {} vs {}", g.pair_gap, 2.0 * formula);
        ensure!(single < prev, "N={n}: gap does not decrease");
        prev = single;
    }
    Ok("N = 2..8, single and pair gaps match, decreasing in N".into())
}

fn braiding() -> Outcome {
    let start = Instant::now();
    let t = TorusLattice::build(4, 4).map_err(|e| e.to_string())?;
    for (n, q) in [(2u32, 1u32), (3, 1), (3, 2), (5, 2)] {
        let spec = GaugeModelSpec::new(n, t.clone(), 0.0, 1.0);
        let f = t.path_between(t.site(0, 3), t.site(3, 3)).map_err(|e| e.to_string())?;
        let v = t.dual_path_between(t.site(1, 1), t.site(3, 1)).map_err(|e| e.to_string())?;
        let lp = t.rectangle_loop(t.site(1, 1), 1, 1).map_err(|e| e.to_string())?;
        let r = braiding_check(&spec, q, &f, &v, &lp).map_err(|e| e.to_string())?;
        ensure!(
            r.agree && r.algebraic_phase_exponent == q % n && r.numeric_phase_exponent == q % n,
            "(N,q)=({n},{q}): algebraic {} numeric {}",
            r.algebraic_phase_exponent,
            r.numeric_phase_exponent
        );
        ensure!(r.charges_consistent, "(N,q)=({n},{q}): charges at the fermion ends");
    }
    let el = within(start, Duration::from_secs(60))?;
    Ok(format!("(2,1) (3,1) (3,2) (5,2) all give q mod N in {el:.1?}"))
}

/// `‖S ψ − c ψ‖` for a neutral string `S` acting on a vector over `basis`.
fn stabilizer_defect(basis: &FluxBasis, charges: &[u32], s: &PauliString, psi: &[Complex64], c: f64) -> f64 {
    let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
    for (i, &a) in psi.iter().enumerate() {
        let (j, ph) = basis.apply_to_flux_state(s, charges, i as u64).expect("neutral string");
        out[j as usize] += a * ph.to_complex();
    }
    out.iter().zip(psi).map(|(o, p)| (o - p * c).norm_sqr()).sum::<f64>().sqrt()
}

fn expectation(basis: &FluxBasis, charges: &[u32], s: &PauliString, psi: &[Complex64]) -> f64 {
    let mut e = Complex64::new(0.0, 0.0);
    for (i, &a) in psi.iter().enumerate() {
        let (j, ph) = basis.apply_to_flux_state(s, charges, i as u64).expect("neutral string");
        e += psi[j as usize].conj() * a * ph.to_complex();
    }
    e.re
}

fn kitaev_correspondence() -> Outcome {
    // −λ₂(U + U†) = −B_p for N = 2 at λ₂ = 1/2
    let lambda2 = 0.5;
    let mut notes = Vec::new();
    for l in [2usize, 3] {
        let spec = GaugeModelSpec::square(2, l, 0.0, lambda2).map_err(|e| e.to_string())?;
        let t = &spec.lattice;
        let np = t.num_plaquettes();
        let basis = build_physical_basis(&spec, 1 << 20).map_err(|e| e.to_string())?;
        let h = build_hamiltonian(&spec, &basis).map_err(|e| e.to_string())?;
        let pairs = np * (np - 1) / 2;
        let k = (4 + 4 * pairs + 1).min(h.dim());
        let opts = EigenOptions {
            choice: SolverChoice::Dense,
            ..EigenOptions::default()
        };
        let r = lowest_eigenpairs(&h, k, &opts).map_err(|e| e.to_string())?;
        let cl = clusters(&r.values, 1e-9, k == h.dim());
        ensure!(cl[0].size == 4, "L={l}: {} ground states", cl[0].size);
        ensure!((cl[0].energy + np as f64).abs() < 1e-9, "L={l}: ground energy {}", cl[0].energy);
        let zero = vec![0u32; t.num_sites()];
        for v in &r.vectors[..4] {
            for p in 0..np {
                let d = stabilizer_defect(&basis, &zero, &t.plaquette_string(2, p), v, 1.0);
                ensure!(d < 1e-9, "L={l}: plaquette {p} defect {d}");
            }
            for s in 0..t.num_sites() {
                let d = stabilizer_defect(&basis, &zero, &t.star_string(2, s), v, 1.0);
                ensure!(d < 1e-9, "L={l}: star {s} defect {d}");
            }
        }
        // one flipped pair of plaquettes, in every holonomy sector
        let ex = &cl[1];
        ensure!((ex.energy - cl[0].energy - 4.0).abs() < 1e-9, "L={l}: first excitation {}", ex.energy - cl[0].energy);
        ensure!(ex.size == 4 * pairs, "L={l}: {} first excited states, want {}", ex.size, 4 * pairs);
        for v in &r.vectors[ex.start..ex.start + ex.size] {
            let flipped: f64 = (0..np).map(|p| (1.0 - expectation(&basis, &zero, &t.plaquette_string(2, p), v)) / 2.0).sum();
            ensure!((flipped - 2.0).abs() < 1e-9, "L={l}: {flipped} flipped plaquettes");
            for s in 0..t.num_sites() {
                let d = stabilizer_defect(&basis, &zero, &t.star_string(2, s), v, 1.0);
                ensure!(d < 1e-9, "L={l}: excited star {s} defect {d}");
            }
        }
        notes.push(format!("L={l}: 4 ground, {} excited", ex.size));

        // static charge pair with M = 2
        let mass = 2.0;
        let (a, b) = (0, t.site(1, 1));
        let mut charges = zero.clone();
        charges[a] = 1;
        charges[b] = 1;
        let charged = spec.clone().with_charges(charges.clone()).with_mass(mass);
        let cb = build_physical_basis(&charged, 1 << 20).map_err(|e| e.to_string())?;
        let ch = build_hamiltonian(&charged, &cb).map_err(|e| e.to_string())?;
        let cr = lowest_eigenpairs(&ch, 4, &opts).map_err(|e| e.to_string())?;
        let cost = cr.values[0] - cl[0].energy;
        ensure!((cost - 2.0 * mass).abs() < 1e-9, "L={l}: charge pair costs {cost}");
        for s in 0..t.num_sites() {
            let want = if s == a || s == b { -1.0 } else { 1.0 };
            let d = stabilizer_defect(&cb, &charges, &t.star_string(2, s), &cr.vectors[0], want);
            ensure!(d < 1e-9, "L={l}: charged star {s} defect {d}");
        }
    }
    Ok(format!("{}, charge pair costs 2M = 4", notes.join("; ")))
}

fn duality() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [2u32, 3] {
        for (l1, l2) in [(0.2, 1.0), (0.8, 0.6), (1.5, 0.4)] {
            let spec = GaugeModelSpec::square(n, 2, l1, l2).map_err(|e| e.to_string())?;
            let r = spectral_compare(&spec, 8).map_err(|e| e.to_string())?;
            ensure!(r.gauge_levels.len() == 8, "N={n}: {} levels", r.gauge_levels.len());
            ensure!(r.max_difference < 1e-9, "N={n} ({l1},{l2}): difference {:.3e}", r.max_difference);
            ensure!(r.dims_match, "N={n}: {} vs N²·{}", r.gauge_dim, r.clock_sector_dim);
            worst = worst.max(r.max_difference);
        }
    }
    Ok(format!("max level difference {worst:.2e}, dimensions consistent"))
}

fn static_rgc() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut resampled = 0;
    for i in 0..50u64 {
        let (n, l) = if i % 5 == 0 { (2u32, 3usize) } else { (2 + (i % 2) as u32, 2) };
        let t = TorusLattice::build(l, l).map_err(|e| e.to_string())?;
        let mut rng = seed::stream(7, "acceptance-tau", i);
        let tau = loop {
            let tau = random_tau(&t, n, &mut rng);
            if absorb_static_disorder(&tau, &t, n).is_ok() {
                break tau;
            }
            resampled += 1;
        };
        for l1 in [0.0, 0.5] {
            let spec = GaugeModelSpec::new(n, t.clone(), l1, 1.0).with_tau(tau.clone());
            let r = rgc_isospectrality(&spec, 12).map_err(|e| e.to_string())?;
            ensure!(r.obstruction == 0, "draw {i}: obstruction {}", r.obstruction);
            ensure!(
                r.conjugation_max_error.is_some_and(|e| e < 1e-12),
                "draw {i}: relabelling leaves {:?}",
                r.conjugation_max_error
            );
            ensure!(
                r.isospectral && r.spectrum_max_difference < 1e-10,
                "draw {i} λ1={l1}: difference {:.3e}",
                r.spectrum_max_difference
            );
            worst = worst.max(r.spectrum_max_difference);
        }
    }
    Ok(format!(
        "50 draws ({resampled} obstructed draws resampled), max difference {worst:.2e} in {:.1?}",
        start.elapsed()
    ))
}

fn mean_field() -> Outcome {
    let low = mft_minimize(3, 0.4, 0.0).map_err(|e| e.to_string())?;
    ensure!(low.u0 == 0.0, "U0*(0.4) = {}", low.u0);
    let high = mft_minimize(3, 10.0, 0.0).map_err(|e| e.to_string())?;
    ensure!(high.u0 >= 0.999, "U0*(10) = {}", high.u0);
    let fo = first_order_beta(3, 0.4, 1.0).map_err(|e| e.to_string())?;
    ensure!(fo.beta_c > 0.4 && fo.beta_c < 1.0, "beta_c = {}", fo.beta_c);
    ensure!(fo.delta_f.abs() < 1e-8, "|ΔF| = {:.3e}", fo.delta_f);
    let at = mft_minimize(3, fo.beta_c, 0.0).map_err(|e| e.to_string())?;
    ensure!(at.local_minima.len() == 2, "{} minima at beta_c", at.local_minima.len());
    for beta in [0.4, fo.beta_c, 0.8, 1.0, 2.0, 10.0] {
        for lm in mft_minimize(3, beta, 0.0).map_err(|e| e.to_string())?.local_minima {
            let m = mft_magnetization(&MftParams::new(3, beta, 0.0, lm.u0)).map_err(|e| e.to_string())?;
            ensure!((m - lm.u0).abs() < 1e-8, "beta {beta}: m = {m}, U0 = {}", lm.u0);
        }
    }
    Ok(format!(
        "U0*(0.4) = 0, U0*(10) = {:.6}, beta_c = {:.6} with |ΔF| = {:.1e}",
        high.u0,
        fo.beta_c,
        fo.delta_f.abs()
    ))
}

fn replica_reductions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2718);
    for i in 0..12 {
        let d = rng.random_range(2..6u32);
        let beta = rng.random_range(0.2..8.0);
        let j0 = rng.random_range(0.1..2.0);
        let h = rng.random_range(-0.5..0.5);
        let u = rng.random_range(-1.1..1.1);
        let q = rng.random_range(0.0..1.0);
        let fr = rmft_free_energy(&RmftParams::new(d, beta, 0.0, j0, h, u, q)).map_err(|e| e.to_string())?;
        let fm = j0 * mft_free_energy(&MftParams::new(d, beta * j0, h / j0, u)).map_err(|e| e.to_string())?;
        ensure!((fr - fm).abs() < 1e-10, "point {i}: F_R {fr} vs F {fm}");
    }
    // [exp(βJ_p s)] over J_p ~ N(J0, J²) against the closed form
    for &(beta, j, j0) in &[(1.0, 1.0, 0.5), (0.7, 0.4, -0.3), (2.0, 0.6, 1.0)] {
        for s in -3i32..=3 {
            let s = f64::from(s);
            let closed = (beta * beta * j * j * s * s / 2.0 + j0 * beta * s).exp();
            let pdf = |x: f64| (-(x - j0) * (x - j0) / (2.0 * j * j)).exp() / (j * (2.0 * std::f64::consts::PI).sqrt());
            let direct = common::simpson(|x| pdf(x) * (beta * x * s).exp(), j0 - 16.0 * j, j0 + 16.0 * j, 200_000);
            let gh = disorder_average(|x| (beta * x * s).exp(), j, j0, 64);
            ensure!((direct - closed).abs() < 1e-10 * closed.max(1.0), "linearization: {direct} vs {closed}");
            ensure!((gh - closed).abs() < 1e-10 * closed.max(1.0), "linearization (GH): {gh} vs {closed}");
        }
    }
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let p = RmftParams::new(
            3,
            rng.random_range(0.3..5.0),
            rng.random_range(0.2..2.0),
            rng.random_range(0.1..2.0),
            rng.random_range(-0.5..0.5),
            rng.random_range(-1.0..1.0),
            rng.random_range(0.05..1.0),
        );
        let (du, dq) = rmft_gradient(&p).map_err(|e| e.to_string())?;
        let e = 1e-5;
        let f = |u: f64, q: f64| rmft_free_energy(&RmftParams { u0: u, q, ..p }).map_err(|e| e.to_string());
        let fu = (f(p.u0 + e, p.q)? - f(p.u0 - e, p.q)?) / (2.0 * e);
        let fq = (f(p.u0, p.q + e)? - f(p.u0, p.q - e)?) / (2.0 * e);
        let rel = (du - fu).hypot(dq - fq) / du.hypot(dq);
        ensure!(rel < 1e-6, "gradient point {i}: relative error {rel:.3e}");
        worst = worst.max(rel);
    }
    Ok(format!("12 J=0 points, linearization identity, gradient rel. error ≤ {worst:.1e}"))
}

fn golden_path(name: &str) -> String {
    format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn sweep_text(axes: &str, format: &str) -> Result<String, String> {
    let cfg = parse_config(&format!("command=rmft-phase-diagram axes={axes} format={format}")).map_err(|e| e.to_string())?;
    Ok(run(&cfg).map_err(|e| e.to_string())?.primary().to_string())
}

fn close_points(a: &Value, b: &Value) -> bool {
    match (a.as_array(), b.as_array()) {
        (Some(a), Some(b)) => a.len() == b.len() && a.iter().zip(b).all(|(x, y)| close_points(x, y)),
        _ => match (a.as_f64(), b.as_f64()) {
            (Some(x), Some(y)) => (x - y).abs() < 1e-9,
            _ => a == b,
        },
    }
}

fn phase_diagram() -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();
    // (axes, golden, phase at low T and small y, phase at low T and large y)
    for (axes, file, small, large) in [("T/J", "phase_diagram_tj.json", 'G', 'H'), ("T/J0", "phase_diagram_tj0.json", 'H', 'G')] {
        let got: Value = serde_json::from_str(&sweep_text(axes, "golden")?).map_err(|e| e.to_string())?;
        let text = std::fs::read_to_string(golden_path(file)).map_err(|e| format!("{file}: {e}"))?;
        let want: Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        let rows: Vec<&str> = got["labels"].as_array().unwrap().iter().map(|r| r.as_str().unwrap()).collect();
        ensure!(rows.len() == 30 && rows.iter().all(|r| r.len() == 30), "{axes}: grid is not 30×30");
        ensure!(rows.iter().all(|r| !r.contains('?')), "{axes}: failed points");
        ensure!(rows[29].chars().all(|c| c == 'C'), "{axes}: high T row is {}", rows[29]);
        ensure!(rows[0].starts_with(small) && rows[0].ends_with(large), "{axes}: low T row is {}", rows[0]);
        ensure!(
            got["labels"] == want["labels"] && got["xs"] == want["xs"] && got["ys"] == want["ys"],
            "{axes}: labels differ from {file}"
        );
        let (gb, wb) = (got["boundaries"].as_array().unwrap(), want["boundaries"].as_array().unwrap());
        ensure!(gb.len() == wb.len(), "{axes}: {} boundaries, golden has {}", gb.len(), wb.len());
        for (g, w) in gb.iter().zip(wb) {
            ensure!(g["phase"] == w["phase"] && g["closed"] == w["closed"], "{axes}: boundary labels differ");
            ensure!(close_points(&g["points"], &w["points"]), "{axes}: {} boundary moved", g["phase"]);
        }
        ensure!(close_points(&got["triple_cells"], &want["triple_cells"]), "{axes}: triple cells moved");
        notes.push(format!("{axes}: {} boundaries", gb.len()));
    }
    let t = within(start, Duration::from_secs(300))?;
    Ok(format!("{} match goldens in {t:.1?}", notes.join(", ")))
}

fn written_files(out: &RunOutput) -> Result<Vec<Vec<u8>>, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("out");
    let files = out.write(&path).map_err(|e| e.to_string())?;
    files.iter().map(|f| std::fs::read(f).map_err(|e| e.to_string())).collect()
}

fn determinism() -> Outcome {
    let configs = [
        "command=spectrum N=2 L=3 lambda1=0.3 solver=iterative",
        "command=gap N=2 L=2 lambda1_steps=4",
        "command=braid N=3 L=4 q=2",
        "command=duality-check N=3 L=2 lambda1=0.4 levels=8",
        "command=rgc-check N=3 L=2 lambda1=0.5 tau=random seed=11 draws=3",
        "command=mft-scan d=3",
        "command=rmft-solve d=3 T=0.4 J=1 J0=0.5 seed=5",
        "command=rmft-phase-diagram axes=T/J nx=12 ny=12 seed=9 format=csv",
        "command=rmft-phase-diagram axes=T/J0 format=golden",
    ];
    for text in configs {
        let cfg = parse_config(text).map_err(|e| e.to_string())?;
        let a = written_files(&run(&cfg).map_err(|e| format!("{text}: {e}"))?)?;
        let b = written_files(&run(&cfg).map_err(|e| format!("{text}: {e}"))?)?;
        ensure!(a == b, "{text}: outputs differ between runs");
    }
    Ok(format!("{} configurations byte-identical on rerun", configs.len()))
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("algebra suite", algebra_suite),
        ("topological degeneracy", topological_degeneracy),
        ("vortex gap formula", gap_formula),
        ("braiding phase", braiding),
        ("stabilizer correspondence", kitaev_correspondence),
        ("gauge/clock duality", duality),
        ("static disorder removal", static_rgc),
        ("mean-field transition", mean_field),
        ("replica reductions", replica_reductions),
        ("phase diagram", phase_diagram),
        ("determinism", determinism),
    ];
    // ACCEPTANCE_ONLY=1,7 runs a subset
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let mut failed = Vec::new();
    let mut err = std::io::stderr();
    for (i, (name, check)) in criteria.iter().enumerate() {
        if only.as_ref().is_some_and(|o| !o.contains(&(i + 1))) {
            continue;
        }
        let line = match check() {
            Ok(msg) => format!("[PASS] {:>2} {name}: {msg}", i + 1),
            Err(msg) => {
                failed.push(i + 1);
                format!("[FAIL] {:>2} {name}: {msg}", i + 1)
            }
        };
        // bypass test output capture so the report always shows
        writeln!(err, "{line}").ok();
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
