//! Browser bindings: mean-field free energy curves, a coarse replica phase
//! grid, and small exact gauge spectra.

use wasm_bindgen::prelude::*;
use zn_gauge::gauge::{spectrum, GaugeModelSpec, SpectrumOptions};
use zn_gauge::io::phase_char;
use zn_gauge::mft::{mft_free_energy, phase_diagram_sweep, Axes, MftParams, SweepOptions};

fn js<E: std::fmt::Display>(e: E) -> JsError {
    JsError::new(&e.to_string())
}

/// `F/N_P` at `points` evenly spaced values of `U0` in `[0, 1.2]`.
#[wasm_bindgen]
pub fn free_energy_curve(d: u32, beta: f64, h: f64, points: usize) -> Result<Vec<f64>, JsError> {
    let n = points.max(2);
    (0..n)
        .map(|i| {
            let u = 1.2 * i as f64 / (n - 1) as f64;
            mft_free_energy(&MftParams::new(d, beta, h, u)).map_err(js)
        })
        .collect()
}

/// Phase labels, one string per temperature row (lowest first), with
/// `H` Higgs, `G` gauge glass, `C` confinement.
#[wasm_bindgen]
pub fn phase_grid(axes: &str, nx: usize, ny: usize) -> Result<Vec<String>, JsError> {
    let axes = Axes::parse(axes).ok_or_else(|| JsError::new("axes must be T/J or T/J0"))?;
    let opts = SweepOptions {
        nx,
        ny,
        ..SweepOptions::new(axes)
    };
    let pd = phase_diagram_sweep(&opts).map_err(js)?;
    Ok((0..pd.xs.len())
        .map(|i| (0..pd.ys.len()).map(|j| phase_char(pd.phase_at(i, j))).collect())
        .collect())
}

/// Lowest `k` levels of the Z_N gauge model on an `l × l` torus.
#[wasm_bindgen]
pub fn gauge_spectrum(n: u32, l: usize, lambda1: f64, lambda2: f64, k: usize) -> Result<Vec<f64>, JsError> {
    let spec = GaugeModelSpec::square(n, l, lambda1, lambda2).map_err(js)?;
    let opts = SpectrumOptions {
        k,
        max_dim: 200_000,
        ..SpectrumOptions::default()
    };
    Ok(spectrum(&spec, &opts).map_err(js)?.eigenvalues)
}
