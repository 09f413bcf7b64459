use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eigen::SolverChoice;
use crate::mft::Axes;

/// Where a bad setting came from: a config line or a command-line override.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Argument,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::Argument => write!(f, "argument"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{origin}: {message}")]
pub struct ConfigError {
    pub origin: Origin,
    pub message: String,
}

impl ConfigError {
    pub fn new(origin: Origin, message: impl Into<String>) -> Self {
        Self {
            origin,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Spectrum,
    Gap,
    Braid,
    DualityCheck,
    RgcCheck,
    MftScan,
    RmftSolve,
    RmftPhaseDiagram,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Spectrum,
        Command::Gap,
        Command::Braid,
        Command::DualityCheck,
        Command::RgcCheck,
        Command::MftScan,
        Command::RmftSolve,
        Command::RmftPhaseDiagram,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Gap => "gap",
            Command::Braid => "braid",
            Command::DualityCheck => "duality-check",
            Command::RgcCheck => "rgc-check",
            Command::MftScan => "mft-scan",
            Command::RmftSolve => "rmft-solve",
            Command::RmftPhaseDiagram => "rmft-phase-diagram",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Gauge,
    Clock,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TauSource {
    None,
    Random,
    File(String),
}

/// What to do with a random `τ` whose plaquette sum is nonzero mod N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObstructionPolicy {
    Resample,
    Keep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
    /// Phase labels and boundaries only, as stored in the test goldens.
    Golden,
}

/// Fully resolved run settings. Every field has a default, so an empty
/// file is a valid spectrum run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub model: Model,
    pub n: u32,
    pub l1: usize,
    pub l2: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    pub mass: f64,
    /// `(x, y, q)` static charges.
    pub charges: Vec<(usize, usize, u32)>,
    pub twist: (u32, u32),
    pub sector: Option<u32>,
    pub tau: TauSource,
    pub obstruction: ObstructionPolicy,
    pub seed: u64,
    pub levels: usize,
    pub deg_tol: f64,
    pub solver: SolverChoice,
    pub eigen_tol: f64,
    pub max_dim: u64,
    pub lambda1_min: f64,
    pub lambda1_max: f64,
    pub lambda1_steps: usize,
    pub q: u32,
    pub fermion_from: (usize, usize),
    pub fermion_to: (usize, usize),
    pub vortex_from: (usize, usize),
    pub vortex_to: (usize, usize),
    pub loop_origin: (usize, usize),
    pub loop_width: usize,
    pub loop_height: usize,
    pub draws: usize,
    pub d: u32,
    pub beta: f64,
    pub h: f64,
    pub betas: Vec<f64>,
    pub u_step: f64,
    pub j: f64,
    pub j0: f64,
    pub quad_order: usize,
    pub tol: f64,
    pub damping: f64,
    pub max_iter: usize,
    pub random_starts: usize,
    pub axes: Axes,
    pub x_range: Option<(f64, f64)>,
    pub y_range: Option<(f64, f64)>,
    pub nx: usize,
    pub ny: usize,
    pub warm_start: bool,
    pub format: Format,
    pub out: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: Command::Spectrum,
            model: Model::Gauge,
            n: 2,
            l1: 2,
            l2: 2,
            lambda1: 0.0,
            lambda2: 1.0,
            mass: 0.0,
            charges: Vec::new(),
            twist: (0, 0),
            sector: Some(0),
            tau: TauSource::None,
            obstruction: ObstructionPolicy::Resample,
            seed: 0,
            levels: 10,
            deg_tol: 1e-8,
            solver: SolverChoice::Auto,
            eigen_tol: 1e-10,
            max_dim: crate::gauge::DEFAULT_MAX_DIM,
            lambda1_min: 0.0,
            lambda1_max: 1.0,
            lambda1_steps: 11,
            q: 1,
            fermion_from: (0, 3),
            fermion_to: (3, 3),
            vortex_from: (1, 1),
            vortex_to: (3, 1),
            loop_origin: (1, 1),
            loop_width: 1,
            loop_height: 1,
            draws: 1,
            d: 3,
            beta: 1.0,
            h: 0.0,
            betas: vec![0.4, 0.6, 0.7, 0.8, 1.0, 10.0],
            u_step: 0.01,
            j: 1.0,
            j0: 1.0,
            quad_order: 64,
            tol: 1e-10,
            damping: 0.5,
            max_iter: 100_000,
            random_starts: 4,
            axes: Axes::TOverJ,
            x_range: None,
            y_range: None,
            nx: 30,
            ny: 30,
            warm_start: true,
            format: Format::Json,
            out: None,
        }
    }
}

fn num<T: std::str::FromStr>(key: &str, v: &str, origin: Origin) -> Result<T, ConfigError> {
    v.trim()
        .parse()
        .map_err(|_| ConfigError::new(origin, format!("cannot parse `{v}` for `{key}`")))
}

fn pair<T: std::str::FromStr>(key: &str, v: &str, origin: Origin) -> Result<(T, T), ConfigError> {
    let (a, b) = v
        .split_once(',')
        .ok_or_else(|| ConfigError::new(origin, format!("`{key}` expects two values `a,b`, got `{v}`")))?;
    Ok((num(key, a, origin)?, num(key, b, origin)?))
}

fn flag(key: &str, v: &str, origin: Origin) -> Result<bool, ConfigError> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(ConfigError::new(origin, format!("`{key}` expects true or false, got `{v}`"))),
    }
}

fn at_least<T: PartialOrd + fmt::Display>(key: &str, v: T, min: T, origin: Origin) -> Result<T, ConfigError> {
    if v < min {
        return Err(ConfigError::new(origin, format!("`{key}` must be at least {min}, got {v}")));
    }
    Ok(v)
}

fn positive(key: &str, v: f64, origin: Origin) -> Result<f64, ConfigError> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(ConfigError::new(origin, format!("`{key}` must be positive, got {v}")));
    }
    Ok(v)
}

fn finite(key: &str, v: f64, origin: Origin) -> Result<f64, ConfigError> {
    if !v.is_finite() {
        return Err(ConfigError::new(origin, format!("`{key}` must be finite, got {v}")));
    }
    Ok(v)
}

fn range(key: &str, v: &str, origin: Origin) -> Result<Option<(f64, f64)>, ConfigError> {
    if v == "auto" {
        return Ok(None);
    }
    let (a, b): (f64, f64) = pair(key, v, origin)?;
    if !(a > 0.0 && b >= a && b.is_finite()) {
        return Err(ConfigError::new(origin, format!("`{key}` must satisfy 0 < lo <= hi, got {v}")));
    }
    Ok(Some((a, b)))
}

impl RunConfig {
    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, v: &str, origin: Origin) -> Result<(), ConfigError> {
        let o = origin;
        match key {
            "command" => {
                self.command = Command::parse(v)
                    .ok_or_else(|| ConfigError::new(o, format!("unknown command `{v}`")))?
            }
            "model" => {
                self.model = match v {
                    "gauge" => Model::Gauge,
                    "clock" => Model::Clock,
                    _ => return Err(ConfigError::new(o, format!("unknown model `{v}`"))),
                }
            }
            "N" => self.n = at_least(key, num(key, v, o)?, 2, o)?,
            "L" => {
                self.l1 = at_least(key, num(key, v, o)?, 2, o)?;
                self.l2 = self.l1;
            }
            "L1" => self.l1 = at_least(key, num(key, v, o)?, 2, o)?,
            "L2" => self.l2 = at_least(key, num(key, v, o)?, 2, o)?,
            "lambda1" => self.lambda1 = finite(key, num(key, v, o)?, o)?,
            "lambda2" => self.lambda2 = finite(key, num(key, v, o)?, o)?,
            "mass" => self.mass = finite(key, num(key, v, o)?, o)?,
            "charges" => {
                self.charges = v
                    .split(';')
                    .filter(|s| !s.is_empty())
                    .map(|t| {
                        let f: Vec<&str> = t.split(',').collect();
                        if f.len() != 3 {
                            return Err(ConfigError::new(o, format!("charge `{t}` must be `x,y,q`")));
                        }
                        Ok((num(key, f[0], o)?, num(key, f[1], o)?, num(key, f[2], o)?))
                    })
                    .collect::<Result<_, _>>()?
            }
            "twist_a" => self.twist.0 = num(key, v, o)?,
            "twist_b" => self.twist.1 = num(key, v, o)?,
            "sector" => self.sector = if v == "all" { None } else { Some(num(key, v, o)?) },
            "tau" => {
                self.tau = match v {
                    "none" => TauSource::None,
                    "random" => TauSource::Random,
                    _ => match v.strip_prefix("file:") {
                        Some(p) if !p.is_empty() => TauSource::File(p.to_string()),
                        _ => {
                            return Err(ConfigError::new(o, format!("`tau` expects none, random or file:PATH, got `{v}`")))
                        }
                    },
                }
            }
            "ntau_obstruction" => {
                self.obstruction = match v {
                    "resample" => ObstructionPolicy::Resample,
                    "keep" => ObstructionPolicy::Keep,
                    _ => return Err(ConfigError::new(o, format!("`{key}` expects resample or keep, got `{v}`"))),
                }
            }
            "seed" => self.seed = num(key, v, o)?,
            "levels" => self.levels = at_least(key, num(key, v, o)?, 1, o)?,
            "deg_tol" => self.deg_tol = positive(key, num(key, v, o)?, o)?,
            "solver" => {
                self.solver = match v {
                    "auto" => SolverChoice::Auto,
                    "dense" => SolverChoice::Dense,
                    "iterative" => SolverChoice::Iterative,
                    _ => return Err(ConfigError::new(o, format!("unknown solver `{v}`"))),
                }
            }
            "eigen_tol" => self.eigen_tol = positive(key, num(key, v, o)?, o)?,
            "max_dim" => self.max_dim = at_least(key, num(key, v, o)?, 1, o)?,
            "lambda1_min" => self.lambda1_min = finite(key, num(key, v, o)?, o)?,
            "lambda1_max" => self.lambda1_max = finite(key, num(key, v, o)?, o)?,
            "lambda1_steps" => self.lambda1_steps = at_least(key, num(key, v, o)?, 1, o)?,
            "q" => self.q = num(key, v, o)?,
            "fermion_from" => self.fermion_from = pair(key, v, o)?,
            "fermion_to" => self.fermion_to = pair(key, v, o)?,
            "vortex_from" => self.vortex_from = pair(key, v, o)?,
            "vortex_to" => self.vortex_to = pair(key, v, o)?,
            "loop_origin" => self.loop_origin = pair(key, v, o)?,
            "loop_width" => self.loop_width = at_least(key, num(key, v, o)?, 1, o)?,
            "loop_height" => self.loop_height = at_least(key, num(key, v, o)?, 1, o)?,
            "draws" => self.draws = at_least(key, num(key, v, o)?, 1, o)?,
            "d" => self.d = at_least(key, num(key, v, o)?, 2, o)?,
            "beta" => self.beta = positive(key, num(key, v, o)?, o)?,
            "T" => self.beta = 1.0 / positive(key, num(key, v, o)?, o)?,
            "h" => self.h = finite(key, num(key, v, o)?, o)?,
            "betas" => {
                self.betas = v
                    .split(',')
                    .map(|b| positive(key, num(key, b, o)?, o))
                    .collect::<Result<_, _>>()?
            }
            "u_step" => self.u_step = positive(key, num(key, v, o)?, o)?,
            "J" => self.j = positive(key, num(key, v, o)?, o)?,
            "J0" => self.j0 = finite(key, num(key, v, o)?, o)?,
            "quad_order" => self.quad_order = at_least(key, num(key, v, o)?, 16, o)?,
            "tol" => self.tol = positive(key, num(key, v, o)?, o)?,
            "damping" => {
                let a = positive(key, num(key, v, o)?, o)?;
                if a > 1.0 {
                    return Err(ConfigError::new(o, format!("`damping` must lie in (0, 1], got {a}")));
                }
                self.damping = a;
            }
            "max_iter" => self.max_iter = at_least(key, num(key, v, o)?, 1, o)?,
            "random_starts" => self.random_starts = num(key, v, o)?,
            "axes" => {
                self.axes = Axes::parse(v)
                    .ok_or_else(|| ConfigError::new(o, format!("`axes` expects T/J or T/J0, got `{v}`")))?
            }
            "x_range" => self.x_range = range(key, v, o)?,
            "y_range" => self.y_range = range(key, v, o)?,
            "nx" => self.nx = at_least(key, num(key, v, o)?, 1, o)?,
            "ny" => self.ny = at_least(key, num(key, v, o)?, 1, o)?,
            "warm_start" => self.warm_start = flag(key, v, o)?,
            "format" => {
                self.format = match v {
                    "json" => Format::Json,
                    "csv" => Format::Csv,
                    "golden" => Format::Golden,
                    _ => return Err(ConfigError::new(o, format!("`format` expects json, csv or golden, got `{v}`"))),
                }
            }
            "out" => self.out = if v.is_empty() || v == "-" { None } else { Some(v.to_string()) },
            _ => return Err(ConfigError::new(o, format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Applies whitespace-separated `key=value` tokens.
    pub fn apply_tokens<'a, I>(&mut self, tokens: I, origin: Origin) -> Result<(), ConfigError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        for tok in tokens {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| ConfigError::new(origin, format!("expected key=value, got `{tok}`")))?;
            self.set(k.trim(), v.trim(), origin)?;
        }
        Ok(())
    }

    /// Canonical text form; `parse_config(c.to_text())` gives back `c`.
    pub fn to_text(&self) -> String {
        fn opt_range(r: Option<(f64, f64)>) -> String {
            r.map_or("auto".into(), |(a, b)| format!("{a:?},{b:?}"))
        }
        let solver = match self.solver {
            SolverChoice::Auto => "auto",
            SolverChoice::Dense => "dense",
            SolverChoice::Iterative => "iterative",
        };
        let tau = match &self.tau {
            TauSource::None => "none".to_string(),
            TauSource::Random => "random".to_string(),
            TauSource::File(p) => format!("file:{p}"),
        };
        let charges: Vec<String> = self.charges.iter().map(|(x, y, q)| format!("{x},{y},{q}")).collect();
        let betas: Vec<String> = self.betas.iter().map(|b| format!("{b:?}")).collect();
        let lines = [
            ("command", self.command.as_str().to_string()),
            ("model", match self.model {
                Model::Gauge => "gauge".into(),
                Model::Clock => "clock".into(),
            }),
            ("N", self.n.to_string()),
            ("L1", self.l1.to_string()),
            ("L2", self.l2.to_string()),
            ("lambda1", format!("{:?}", self.lambda1)),
            ("lambda2", format!("{:?}", self.lambda2)),
            ("mass", format!("{:?}", self.mass)),
            ("charges", charges.join(";")),
            ("twist_a", self.twist.0.to_string()),
            ("twist_b", self.twist.1.to_string()),
            ("sector", self.sector.map_or("all".into(), |s| s.to_string())),
            ("tau", tau),
            ("ntau_obstruction", match self.obstruction {
                ObstructionPolicy::Resample => "resample".into(),
                ObstructionPolicy::Keep => "keep".into(),
            }),
            ("seed", self.seed.to_string()),
            ("levels", self.levels.to_string()),
            ("deg_tol", format!("{:?}", self.deg_tol)),
            ("solver", solver.to_string()),
            ("eigen_tol", format!("{:?}", self.eigen_tol)),
            ("max_dim", self.max_dim.to_string()),
            ("lambda1_min", format!("{:?}", self.lambda1_min)),
            ("lambda1_max", format!("{:?}", self.lambda1_max)),
            ("lambda1_steps", self.lambda1_steps.to_string()),
            ("q", self.q.to_string()),
            ("fermion_from", format!("{},{}", self.fermion_from.0, self.fermion_from.1)),
            ("fermion_to", format!("{},{}", self.fermion_to.0, self.fermion_to.1)),
            ("vortex_from", format!("{},{}", self.vortex_from.0, self.vortex_from.1)),
            ("vortex_to", format!("{},{}", self.vortex_to.0, self.vortex_to.1)),
            ("loop_origin", format!("{},{}", self.loop_origin.0, self.loop_origin.1)),
            ("loop_width", self.loop_width.to_string()),
            ("loop_height", self.loop_height.to_string()),
            ("draws", self.draws.to_string()),
            ("d", self.d.to_string()),
            ("beta", format!("{:?}", self.beta)),
            ("h", format!("{:?}", self.h)),
            ("betas", betas.join(",")),
            ("u_step", format!("{:?}", self.u_step)),
            ("J", format!("{:?}", self.j)),
            ("J0", format!("{:?}", self.j0)),
            ("quad_order", self.quad_order.to_string()),
            ("tol", format!("{:?}", self.tol)),
            ("damping", format!("{:?}", self.damping)),
            ("max_iter", self.max_iter.to_string()),
            ("random_starts", self.random_starts.to_string()),
            ("axes", self.axes.as_str().to_string()),
            ("x_range", opt_range(self.x_range)),
            ("y_range", opt_range(self.y_range)),
            ("nx", self.nx.to_string()),
            ("ny", self.ny.to_string()),
            ("warm_start", self.warm_start.to_string()),
            ("format", match self.format {
                Format::Json => "json".into(),
                Format::Csv => "csv".into(),
                Format::Golden => "golden".into(),
            }),
            ("out", self.out.clone().unwrap_or_else(|| "-".into())),
        ];
        lines.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

/// Parses `key=value` settings, several per line allowed; `#` starts a
/// comment. Unknown keys and bad values are reported with their line.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("");
        cfg.apply_tokens(body.split_whitespace(), Origin::Line(i + 1))?;
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_spectrum_run() {
        let c = parse_config("model=gauge N=2 L=2 lambda1=0 lambda2=1").unwrap();
        assert_eq!(c.command, Command::Spectrum);
        assert_eq!((c.n, c.l1, c.l2), (2, 2, 2));
    }

    #[test]
    fn order_one_rejected_with_line() {
        let e = parse_config("# header\nL=3\nN=1\n").unwrap_err();
        assert_eq!(e.origin, Origin::Line(3));
    }

    #[test]
    fn unknown_key_rejected() {
        let e = parse_config("N=3\nbogus=1").unwrap_err();
        assert_eq!(e.origin, Origin::Line(2));
        assert!(e.message.contains("bogus"));
    }

    #[test]
    fn rgc_settings() {
        let c = parse_config("tau=random seed=42 ntau_obstruction=resample").unwrap();
        assert_eq!(c.tau, TauSource::Random);
        assert_eq!(c.seed, 42);
        assert_eq!(c.obstruction, ObstructionPolicy::Resample);
    }

    #[test]
    fn text_round_trip() {
        let mut c = parse_config("command=rmft-phase-diagram axes=T/J0 x_range=0.1,2 charges=0,0,1;1,1,1 T=0.3").unwrap();
        c.sector = None;
        c.out = Some("run.csv".into());
        assert_eq!(parse_config(&c.to_text()).unwrap(), c);
        let d = RunConfig::default();
        assert_eq!(parse_config(&d.to_text()).unwrap(), d);
    }
}
