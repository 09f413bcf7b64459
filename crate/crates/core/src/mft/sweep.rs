use std::collections::BTreeMap;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::replica::{rmft_solve, Phase, RmftOptions};
use super::MftError;
use crate::seed;

/// Which pair of dimensionless ratios spans the grid. The first axis is
/// always a temperature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axes {
    /// `(k_B T/J, J0/J)` with `J = 1`.
    TOverJ,
    /// `(k_B T/J0, J/J0)` with `J0 = 1`.
    TOverJ0,
}

impl Axes {
    pub fn columns(&self) -> (&'static str, &'static str) {
        match self {
            Axes::TOverJ => ("T_over_J", "J0_over_J"),
            Axes::TOverJ0 => ("T_over_J0", "J_over_J0"),
        }
    }

    /// `(β, J, J0)` at a grid point.
    pub fn couplings(&self, x: f64, y: f64) -> (f64, f64, f64) {
        match self {
            Axes::TOverJ => (1.0 / x, 1.0, y),
            Axes::TOverJ0 => (1.0 / x, y, 1.0),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Axes::TOverJ => "T/J",
            Axes::TOverJ0 => "T/J0",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "T/J" | "t-over-j" => Some(Axes::TOverJ),
            "T/J0" | "t-over-j0" => Some(Axes::TOverJ0),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub d: u32,
    pub axes: Axes,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub seed: u64,
    /// Start each point from its left neighbour's solution as well.
    pub warm_start: bool,
    pub rmft: RmftOptions,
}

impl SweepOptions {
    pub fn new(axes: Axes) -> Self {
        let (x_range, y_range) = match axes {
            Axes::TOverJ => ((0.05, 3.5), (0.05, 2.0)),
            Axes::TOverJ0 => ((0.05, 2.0), (0.05, 2.5)),
        };
        Self {
            d: 3,
            axes,
            x_range,
            y_range,
            nx: 30,
            ny: 30,
            h: 0.0,
            seed: 0,
            warm_start: true,
            rmft: RmftOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub x: f64,
    pub y: f64,
    pub u0: f64,
    pub q: f64,
    pub free_energy: f64,
    /// `None` where the solver failed at this point.
    pub phase: Option<Phase>,
    pub iterations: usize,
    pub converged: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Boundary {
    pub phase: Phase,
    pub closed: bool,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagram {
    pub axes: Axes,
    pub d: u32,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Row-major: `points[i * ny + j]` sits at `(xs[i], ys[j])`.
    pub points: Vec<GridPoint>,
    pub boundaries: Vec<Boundary>,
    /// Centres of grid cells whose corners show all three phases.
    pub triple_cells: Vec<(f64, f64)>,
}

impl PhaseDiagram {
    pub fn phase_at(&self, i: usize, j: usize) -> Option<Phase> {
        self.points[i * self.ys.len() + j].phase
    }

    pub fn labels(&self) -> Vec<Option<Phase>> {
        self.points.iter().map(|p| p.phase).collect()
    }

    /// Whether two phases touch across a grid edge.
    pub fn adjacent(&self, a: Phase, b: Phase) -> bool {
        let (nx, ny) = (self.xs.len(), self.ys.len());
        (0..nx).any(|i| {
            (0..ny).any(|j| {
                let here = self.phase_at(i, j);
                let pair = |o: Option<Phase>| {
                    (here == Some(a) && o == Some(b)) || (here == Some(b) && o == Some(a))
                };
                (i + 1 < nx && pair(self.phase_at(i + 1, j)))
                    || (j + 1 < ny && pair(self.phase_at(i, j + 1)))
            })
        })
    }
}

fn axis(range: (f64, f64), n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![range.0];
    }
    (0..n)
        .map(|i| range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64)
        .collect()
}

fn solve_row(opts: &SweepOptions, i: usize, x: f64, ys: &[f64]) -> Vec<GridPoint> {
    let mut warm = None;
    ys.iter()
        .enumerate()
        .map(|(j, &y)| {
            let (beta, jw, j0) = opts.axes.couplings(x, y);
            let ro = RmftOptions {
                seed: seed::derive_seed(opts.seed, "sweep-point", (i * ys.len() + j) as u64),
                warm_start: if opts.warm_start { warm } else { None },
                ..opts.rmft.clone()
            };
            match rmft_solve(opts.d, beta, jw, j0, opts.h, &ro) {
                Ok(s) => {
                    warm = Some((s.u0, s.q));
                    GridPoint {
                        x,
                        y,
                        u0: s.u0,
                        q: s.q,
                        free_energy: s.free_energy,
                        phase: Some(s.phase),
                        iterations: s.iterations,
                        converged: true,
                        error: None,
                    }
                }
                Err(e) => GridPoint {
                    x,
                    y,
                    u0: f64::NAN,
                    q: f64::NAN,
                    free_energy: f64::NAN,
                    phase: None,
                    iterations: opts.rmft.max_iter,
                    converged: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

/// Solves the replica equations on a grid, one temperature per row.
pub fn phase_diagram_sweep(opts: &SweepOptions) -> Result<PhaseDiagram, MftError> {
    if opts.nx == 0 || opts.ny == 0 {
        return Err(MftError::Domain("grid must have at least one point per axis".into()));
    }
    let xs = axis(opts.x_range, opts.nx);
    let ys = axis(opts.y_range, opts.ny);
    if xs.iter().chain(&ys).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(MftError::Domain("grid axes must be positive".into()));
    }
    #[cfg(feature = "parallel")]
    let rows: Vec<Vec<GridPoint>> = xs
        .par_iter()
        .enumerate()
        .map(|(i, &x)| solve_row(opts, i, x, &ys))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Vec<GridPoint>> = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| solve_row(opts, i, x, &ys))
        .collect();
    let points: Vec<GridPoint> = rows.into_iter().flatten().collect();
    let labels: Vec<Option<Phase>> = points.iter().map(|p| p.phase).collect();
    let mut boundaries = Vec::new();
    for phase in [Phase::Higgs, Phase::GaugeGlass, Phase::Confinement] {
        let inside: Vec<bool> = labels.iter().map(|l| *l == Some(phase)).collect();
        for (closed, pts) in marching_squares(&xs, &ys, &inside) {
            boundaries.push(Boundary {
                phase,
                closed,
                points: pts,
            });
        }
    }
    let mut triple_cells = Vec::new();
    for i in 0..xs.len().saturating_sub(1) {
        for j in 0..ys.len().saturating_sub(1) {
            let corners = [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)];
            let has = |p: Phase| corners.iter().any(|&(a, b)| labels[a * ys.len() + b] == Some(p));
            if has(Phase::Higgs) && has(Phase::GaugeGlass) && has(Phase::Confinement) {
                triple_cells.push((0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])));
            }
        }
    }
    Ok(PhaseDiagram {
        axes: opts.axes,
        d: opts.d,
        xs,
        ys,
        points,
        boundaries,
        triple_cells,
    })
}

/// Grid edge: `(along_y, i, j)` joins `(i, j)` to `(i+1, j)` or `(i, j+1)`.
type Edge = (bool, usize, usize);

/// Contours of a boolean field sampled at `(xs[i], ys[j])`, row-major in
/// `i`. Saddle cells keep the inside corners apart. Each polyline runs
/// through edge midpoints and is flagged closed when it forms a loop.
pub fn marching_squares(xs: &[f64], ys: &[f64], inside: &[bool]) -> Vec<(bool, Vec<(f64, f64)>)> {
    let (nx, ny) = (xs.len(), ys.len());
    let at = |i: usize, j: usize| inside[i * ny + j];
    let mut adj: BTreeMap<Edge, Vec<Edge>> = BTreeMap::new();
    let mut link = |a: Edge, b: Edge| {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    };
    for i in 0..nx.saturating_sub(1) {
        for j in 0..ny.saturating_sub(1) {
            let c = [at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)];
            let e = [(false, i, j), (true, i + 1, j), (false, i, j + 1), (true, i, j)];
            let cut: Vec<usize> = (0..4).filter(|&k| c[k] != c[(k + 1) % 4]).collect();
            match cut.len() {
                2 => link(e[cut[0]], e[cut[1]]),
                4 if c[0] => {
                    link(e[0], e[3]);
                    link(e[1], e[2]);
                }
                4 => {
                    link(e[0], e[1]);
                    link(e[2], e[3]);
                }
                _ => {}
            }
        }
    }
    let mid = |(along_y, i, j): Edge| {
        if along_y {
            (xs[i], 0.5 * (ys[j] + ys[j + 1]))
        } else {
            (0.5 * (xs[i] + xs[i + 1]), ys[j])
        }
    };
    let mut used: BTreeMap<(Edge, Edge), bool> = BTreeMap::new();
    let key = |a: Edge, b: Edge| if a <= b { (a, b) } else { (b, a) };
    let mut out = Vec::new();
    let starts: Vec<Edge> = adj
        .iter()
        .filter(|(_, v)| v.len() == 1)
        .map(|(k, _)| *k)
        .chain(adj.keys().copied())
        .collect();
    for s in starts {
        if adj[&s].iter().all(|&n| used.contains_key(&key(s, n))) {
            continue;
        }
        let mut line = vec![mid(s)];
        let mut cur = s;
        loop {
            let next = adj[&cur].iter().copied().find(|&n| !used.contains_key(&key(cur, n)));
            let Some(n) = next else { break };
            used.insert(key(cur, n), true);
            line.push(mid(n));
            cur = n;
        }
        let closed = cur == s && line.len() > 2;
        out.push((closed, line));
    }
    out
}
