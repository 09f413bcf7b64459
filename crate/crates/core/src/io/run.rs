use serde::Serialize;

use super::config::{Command, Format, Model, ObstructionPolicy, Origin, RunConfig, TauSource};
use super::emit::{csv, float, json_document, phase_diagram_csv, phase_diagram_golden};
use super::{Artifact, ConfigError, RunError, RunOutput};
use crate::duality::{
    absorb_static_disorder, build_clock_hamiltonian, random_tau, rgc_isospectrality, spectral_compare,
    ClockModelSpec, RgcReport,
};
use crate::eigen::{lowest_eigenpairs, EigenOptions, SolverMethod};
use crate::gauge::{
    braiding_check, clusters, gap_curve, spectrum, vortex_pair_gap, DegeneracyCluster, GapPoint, GaugeModelSpec,
    SpectrumOptions, VortexGap,
};
use crate::lattice::TorusLattice;
use crate::mft::{
    first_order_beta, mft_free_energy, mft_minimize, phase_diagram_sweep, rmft_solve, FirstOrderPoint, MftMinimum,
    MftParams, RmftOptions, SweepOptions,
};
use crate::seed;

fn domain<E: std::fmt::Display>(e: E) -> RunError {
    RunError::Domain(e.to_string())
}

fn unsupported(cfg: &RunConfig) -> RunError {
    RunError::Config(ConfigError::new(
        Origin::Argument,
        format!("format {:?} is not available for {}", cfg.format, cfg.command.as_str()),
    ))
}

fn lattice(cfg: &RunConfig) -> Result<TorusLattice, RunError> {
    TorusLattice::build(cfg.l1, cfg.l2).map_err(domain)
}

fn load_tau(path: &str, expected: usize) -> Result<Vec<u32>, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::Io {
        path: path.to_string(),
        message: e.to_string(),
    })?;
    let mut tau = Vec::new();
    for (i, line) in text.lines().enumerate() {
        for tok in line.split('#').next().unwrap_or("").split_whitespace() {
            tau.push(tok.parse().map_err(|_| {
                ConfigError::new(Origin::Line(i + 1), format!("tau file {path}: cannot parse `{tok}`"))
            })?);
        }
    }
    if tau.len() != expected {
        return Err(RunError::Domain(format!(
            "tau file {path} has {} entries, the lattice has {expected} plaquettes",
            tau.len()
        )));
    }
    Ok(tau)
}

/// `τ` for draw `index`, plus the number of draws it took.
fn draw_tau(cfg: &RunConfig, lat: &TorusLattice, index: u64) -> Result<(Vec<u32>, u64), RunError> {
    match &cfg.tau {
        TauSource::None => Ok((vec![0; lat.num_plaquettes()], 1)),
        TauSource::File(p) => Ok((load_tau(p, lat.num_plaquettes())?, 1)),
        TauSource::Random => {
            let purpose = format!("tau-draw-{index}");
            for attempt in 0..10_000u64 {
                let tau = random_tau(lat, cfg.n, &mut seed::stream(cfg.seed, &purpose, attempt));
                let blocked = absorb_static_disorder(&tau, lat, cfg.n).is_err();
                if !blocked || cfg.obstruction == ObstructionPolicy::Keep {
                    return Ok((tau, attempt + 1));
                }
            }
            Err(RunError::Domain("no unobstructed tau found in 10000 draws".into()))
        }
    }
}

fn gauge_spec(cfg: &RunConfig) -> Result<GaugeModelSpec, RunError> {
    let lat = lattice(cfg)?;
    let mut charges = vec![0u32; lat.num_sites()];
    for &(x, y, q) in &cfg.charges {
        if x >= cfg.l1 || y >= cfg.l2 {
            return Err(RunError::Domain(format!("charge at ({x},{y}) lies outside the lattice")));
        }
        let s = lat.site(x as i64, y as i64);
        charges[s] = (charges[s] + q) % cfg.n;
    }
    let (tau, _) = draw_tau(cfg, &lat, 0)?;
    let mut spec = GaugeModelSpec::new(cfg.n, lat, cfg.lambda1, cfg.lambda2)
        .with_charges(charges)
        .with_tau(tau);
    if cfg.mass != 0.0 {
        spec = spec.with_mass(cfg.mass);
    }
    Ok(spec)
}

fn spectrum_options(cfg: &RunConfig) -> SpectrumOptions {
    SpectrumOptions {
        k: cfg.levels,
        deg_tol: cfg.deg_tol,
        eigen: EigenOptions {
            choice: cfg.solver,
            tol: cfg.eigen_tol,
            seed: seed::derive_seed(cfg.seed, "eigen-start", 0),
            ..EigenOptions::default()
        },
        max_dim: cfg.max_dim,
    }
}

fn json<R: Serialize>(cfg: &RunConfig, result: &R) -> Result<RunOutput, RunError> {
    match cfg.format {
        Format::Json => Ok(RunOutput::single(json_document(cfg.command.as_str(), cfg, result))),
        _ => Err(unsupported(cfg)),
    }
}

#[derive(Serialize)]
struct ClockSpectrum {
    dim: u64,
    eigenvalues: Vec<f64>,
    clusters: Vec<DegeneracyCluster>,
    method: SolverMethod,
    iterations: usize,
    max_residual: f64,
}

fn run_spectrum(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    let opts = spectrum_options(cfg);
    match cfg.model {
        Model::Gauge => json(cfg, &spectrum(&gauge_spec(cfg)?, &opts).map_err(domain)?),
        Model::Clock => {
            let lat = lattice(cfg)?;
            let (tau, _) = draw_tau(cfg, &lat, 0)?;
            let spec = ClockModelSpec {
                tau,
                twist: cfg.twist,
                sector: cfg.sector,
                ..ClockModelSpec::new(cfg.n, lat, cfg.lambda1, cfg.lambda2)
            };
            let (basis, h) = build_clock_hamiltonian(&spec).map_err(domain)?;
            let k = cfg.levels.min(basis.dim());
            let r = lowest_eigenpairs(&h, k, &opts.eigen).map_err(domain)?;
            let tol = cfg.deg_tol * cfg.lambda2.abs().max(f64::MIN_POSITIVE);
            json(
                cfg,
                &ClockSpectrum {
                    dim: basis.dim() as u64,
                    clusters: clusters(&r.values, tol, k == basis.dim()),
                    eigenvalues: r.values,
                    method: r.method,
                    iterations: r.iterations,
                    max_residual: r.max_residual,
                },
            )
        }
    }
}

#[derive(Serialize)]
struct GapRun {
    points: Vec<GapPoint>,
    vortex: VortexGap,
}

fn run_gap(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    let spec = gauge_spec(cfg)?;
    let n = cfg.lambda1_steps;
    let ls: Vec<f64> = (0..n)
        .map(|i| {
            if n == 1 {
                cfg.lambda1_min
            } else {
                cfg.lambda1_min + (cfg.lambda1_max - cfg.lambda1_min) * i as f64 / (n - 1) as f64
            }
        })
        .collect();
    let points = gap_curve(&spec, &ls, &spectrum_options(cfg)).map_err(domain)?;
    match cfg.format {
        Format::Csv => Ok(RunOutput::single(csv(
            &["lambda1", "ground", "splitting", "gap"],
            points
                .iter()
                .map(|p| vec![float(p.lambda1), float(p.ground), float(p.splitting), float(p.gap)]),
        ))),
        _ => {
            let clean = GaugeModelSpec {
                lambda1: 0.0,
                ..spec
            };
            json(
                cfg,
                &GapRun {
                    points,
                    vortex: vortex_pair_gap(&clean).map_err(domain)?,
                },
            )
        }
    }
}

fn run_braid(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    let spec = gauge_spec(cfg)?;
    let lat = &spec.lattice;
    let inside = |(x, y): (usize, usize), what: &str| {
        if x >= cfg.l1 || y >= cfg.l2 {
            Err(RunError::Domain(format!("{what} ({x},{y}) lies outside the lattice")))
        } else {
            Ok(lat.site(x as i64, y as i64))
        }
    };
    let f = lat
        .path_between(inside(cfg.fermion_from, "fermion_from")?, inside(cfg.fermion_to, "fermion_to")?)
        .map_err(domain)?;
    let v = lat
        .dual_path_between(inside(cfg.vortex_from, "vortex_from")?, inside(cfg.vortex_to, "vortex_to")?)
        .map_err(domain)?;
    let lp = lat
        .rectangle_loop(inside(cfg.loop_origin, "loop_origin")?, cfg.loop_width, cfg.loop_height)
        .map_err(domain)?;
    json(cfg, &braiding_check(&spec, cfg.q, &f, &v, &lp).map_err(domain)?)
}

#[derive(Serialize)]
struct RgcDraw {
    tau: Vec<u32>,
    attempts: u64,
    report: RgcReport,
}

#[derive(Serialize)]
struct RgcRun {
    draws: Vec<RgcDraw>,
    all_isospectral: bool,
}

fn run_rgc(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    let base = gauge_spec(cfg)?;
    let count = if cfg.tau == TauSource::Random { cfg.draws } else { 1 };
    let mut draws = Vec::with_capacity(count);
    for i in 0..count {
        let (tau, attempts) = draw_tau(cfg, &base.lattice, i as u64)?;
        let spec = base.clone().with_tau(tau.clone());
        let report = rgc_isospectrality(&spec, cfg.levels).map_err(domain)?;
        draws.push(RgcDraw {
            tau,
            attempts,
            report,
        });
    }
    let all_isospectral = draws.iter().all(|d| d.report.isospectral);
    json(
        cfg,
        &RgcRun {
            draws,
            all_isospectral,
        },
    )
}

#[derive(Serialize)]
struct MftCurve {
    beta: f64,
    minimum: MftMinimum,
    /// `(U0, F/N_P)` samples.
    curve: Vec<(f64, f64)>,
}

#[derive(Serialize)]
struct MftRun {
    curves: Vec<MftCurve>,
    first_order: Option<FirstOrderPoint>,
}

fn run_mft(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    let steps = (1.2 / cfg.u_step).round() as usize;
    let mut curves = Vec::new();
    for &beta in &cfg.betas {
        let minimum = mft_minimize(cfg.d, beta, cfg.h).map_err(domain)?;
        let curve = (0..=steps)
            .map(|i| {
                let u = i as f64 * cfg.u_step;
                mft_free_energy(&MftParams::new(cfg.d, beta, cfg.h, u)).map(|f| (u, f))
            })
            .collect::<Result<_, _>>()
            .map_err(domain)?;
        curves.push(MftCurve { beta, minimum, curve });
    }
    match cfg.format {
        Format::Csv => Ok(RunOutput::single(csv(
            &["beta", "U0", "F_per_Np"],
            curves
                .iter()
                .flat_map(|c| c.curve.iter().map(move |&(u, f)| vec![float(c.beta), float(u), float(f)])),
        ))),
        _ => {
            let first_order = if cfg.h == 0.0 {
                first_order_beta(cfg.d, 0.4, 1.0).ok()
            } else {
                None
            };
            json(cfg, &MftRun { curves, first_order })
        }
    }
}

fn rmft_options(cfg: &RunConfig) -> RmftOptions {
    RmftOptions {
        tol: cfg.tol,
        damping: cfg.damping,
        max_iter: cfg.max_iter,
        quad_order: cfg.quad_order,
        seed: cfg.seed,
        random_starts: cfg.random_starts,
        warm_start: None,
    }
}

fn run_rmft(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    let sol = rmft_solve(cfg.d, cfg.beta, cfg.j, cfg.j0, cfg.h, &rmft_options(cfg)).map_err(domain)?;
    json(cfg, &sol)
}

/// Sweep settings from a resolved config.
pub fn sweep_options(cfg: &RunConfig) -> SweepOptions {
    let defaults = SweepOptions::new(cfg.axes);
    SweepOptions {
        d: cfg.d,
        x_range: cfg.x_range.unwrap_or(defaults.x_range),
        y_range: cfg.y_range.unwrap_or(defaults.y_range),
        nx: cfg.nx,
        ny: cfg.ny,
        h: cfg.h,
        seed: cfg.seed,
        warm_start: cfg.warm_start,
        rmft: rmft_options(cfg),
        ..defaults
    }
}

#[derive(Serialize)]
struct SweepMeta<'a> {
    xs: &'a [f64],
    ys: &'a [f64],
    boundaries: &'a [crate::mft::Boundary],
    triple_cells: &'a [(f64, f64)],
    failures: usize,
}

fn run_sweep(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    let pd = phase_diagram_sweep(&sweep_options(cfg)).map_err(domain)?;
    match cfg.format {
        Format::Json => json(cfg, &pd),
        Format::Golden => Ok(RunOutput::single(phase_diagram_golden(&pd))),
        Format::Csv => {
            let meta = SweepMeta {
                xs: &pd.xs,
                ys: &pd.ys,
                boundaries: &pd.boundaries,
                triple_cells: &pd.triple_cells,
                failures: pd.points.iter().filter(|p| p.phase.is_none()).count(),
            };
            Ok(RunOutput {
                artifacts: vec![
                    Artifact {
                        suffix: String::new(),
                        content: phase_diagram_csv(&pd),
                    },
                    Artifact {
                        suffix: ".meta.json".into(),
                        content: json_document(cfg.command.as_str(), cfg, &meta),
                    },
                ],
            })
        }
    }
}

/// Executes one resolved configuration and returns its output files.
pub fn run(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    match cfg.command {
        Command::Spectrum => run_spectrum(cfg),
        Command::Gap => run_gap(cfg),
        Command::Braid => run_braid(cfg),
        Command::DualityCheck => json(
            cfg,
            &spectral_compare(&gauge_spec(cfg)?, cfg.levels).map_err(domain)?,
        ),
        Command::RgcCheck => run_rgc(cfg),
        Command::MftScan => run_mft(cfg),
        Command::RmftSolve => run_rmft(cfg),
        Command::RmftPhaseDiagram => run_sweep(cfg),
    }
}
