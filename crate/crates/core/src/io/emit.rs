use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::mft::PhaseDiagram;

pub const SCHEMA_VERSION: u32 = 1;

/// Pretty JSON with every float written as `{:.16e}` (17 significant
/// digits), so output is byte-stable and round-trips exactly.
struct FixedFloats<'a>(PrettyFormatter<'a>);

impl Formatter for FixedFloats<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{v:.16e}")
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(v))
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats(PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .expect("in-memory JSON serialization cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

#[derive(Serialize)]
struct Envelope<'a, C: Serialize, R: Serialize> {
    schema_version: u32,
    command: &'a str,
    config: &'a C,
    result: &'a R,
}

/// Wraps a result with the schema version and the full resolved config.
pub fn json_document<C: Serialize, R: Serialize>(command: &str, config: &C, result: &R) -> String {
    to_json(&Envelope {
        schema_version: SCHEMA_VERSION,
        command,
        config,
        result,
    })
}

pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Simple CSV: fixed header, fields never contain commas or quotes.
pub fn csv<I, R>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.into_iter().collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

pub fn phase_diagram_csv(pd: &PhaseDiagram) -> String {
    let (cx, cy) = pd.axes.columns();
    let header = [cx, cy, "U0", "Q", "F_per_Np", "phase", "iterations", "converged"];
    csv(
        &header,
        pd.points.iter().map(|p| {
            vec![
                float(p.x),
                float(p.y),
                float(p.u0),
                float(p.q),
                float(p.free_energy),
                p.phase.map_or("failed", |ph| ph.as_str()).to_string(),
                p.iterations.to_string(),
                p.converged.to_string(),
            ]
        }),
    )
}

#[derive(Serialize)]
struct GoldenBoundary<'a> {
    phase: &'a str,
    closed: bool,
    points: &'a [(f64, f64)],
}

#[derive(Serialize)]
struct Golden<'a> {
    schema_version: u32,
    axes: &'a str,
    d: u32,
    xs: &'a [f64],
    ys: &'a [f64],
    /// One string per row of constant `x`, one character per `y`.
    labels: Vec<String>,
    boundaries: Vec<GoldenBoundary<'a>>,
    triple_cells: &'a [(f64, f64)],
}

pub fn phase_char(p: Option<crate::mft::Phase>) -> char {
    use crate::mft::Phase;
    match p {
        Some(Phase::Higgs) => 'H',
        Some(Phase::GaugeGlass) => 'G',
        Some(Phase::Confinement) => 'C',
        None => '?',
    }
}

/// Phase labels and boundary polylines in the form kept under version
/// control as regression data.
pub fn phase_diagram_golden(pd: &PhaseDiagram) -> String {
    let ny = pd.ys.len();
    to_json(&Golden {
        schema_version: SCHEMA_VERSION,
        axes: pd.axes.as_str(),
        d: pd.d,
        xs: &pd.xs,
        ys: &pd.ys,
        labels: (0..pd.xs.len())
            .map(|i| (0..ny).map(|j| phase_char(pd.phase_at(i, j))).collect())
            .collect(),
        boundaries: pd
            .boundaries
            .iter()
            .map(|b| GoldenBoundary {
                phase: b.phase.as_str(),
                closed: b.closed,
                points: &b.points,
            })
            .collect(),
        triple_cells: &pd.triple_cells,
    })
}
