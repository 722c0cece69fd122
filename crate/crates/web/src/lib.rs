//! wasm-bindgen surface for the static demo page in `www/`.
//!
//! Each exported function returns a JSON string; the plain `*_json` functions
//! underneath are ordinary Rust so they can be tested natively.

use liarlab::decoherence::{build_env_pointer_shift, env_stability_sweep};
use liarlab::liar::stability_sweep;
use liarlab::measurement::{classify_completion, premeasure, Classification};
use liarlab::repeat::run_repeat;
use liarlab::{
    ApparatusPreparation, CompletionSpec, Complex64, MeasurementUnitary, Result, SystemPreparation,
};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn completion(kind: &str, seed: u32) -> Result<CompletionSpec> {
    match kind {
        "pointer_shift" => Ok(CompletionSpec::PointerShift),
        "haar_random" => Ok(CompletionSpec::HaarRandom { seed: seed.into() }),
        other => Err(liarlab::Error::Argument(format!(
            "unknown completion `{other}`"
        ))),
    }
}

/// Real amplitudes, rescaled to unit norm. An empty slice means uniform.
fn system(n: usize, amplitudes: &[f64]) -> Result<SystemPreparation> {
    if amplitudes.is_empty() {
        return Ok(SystemPreparation::uniform(n));
    }
    if amplitudes.len() != n {
        return Err(liarlab::Error::Argument(format!(
            "expected {n} amplitudes, got {}",
            amplitudes.len()
        )));
    }
    SystemPreparation::normalized(amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect())
}

fn grid(max: f64, points: usize) -> Vec<f64> {
    let points = points.max(2);
    (0..points)
        .map(|i| max * i as f64 / (points - 1) as f64)
        .collect()
}

/// Apparatus and environment stability curves on one ε grid.
pub fn stability_json(
    n: usize,
    k: usize,
    kind: &str,
    seed: u32,
    amplitudes: &[f64],
    eps_max: f64,
    points: usize,
) -> Result<String> {
    let m = MeasurementUnitary::build(n, &completion(kind, seed)?)?;
    let sys = system(n, amplitudes)?;
    let eps = grid(eps_max.clamp(0.0, 0.99), points);
    let curve = stability_sweep(&m, &sys, k, &eps)?;

    let coupled = premeasure(&m, &sys, &ApparatusPreparation::ready(n))?;
    let env = env_stability_sweep(&build_env_pointer_shift(n)?, &coupled, k, &eps)?;

    Ok(json!({
        "epsilon": eps,
        "liar_weight": curve.samples.iter().map(|s| s.liar_weight).collect::<Vec<_>>(),
        "ready_residual": curve.samples.iter().map(|s| s.ready_residual).collect::<Vec<_>>(),
        "born_tv": curve.samples.iter().map(|s| s.born_tv).collect::<Vec<_>>(),
        "susceptibility": curve.fit.c,
        "fit_residual": curve.fit.residual,
        "env_liar_weight": env.samples.iter().map(|s| s.env_liar_weight).collect::<Vec<_>>(),
        "coherence_l1": env.samples.iter().map(|s| s.coherence_l1).collect::<Vec<_>>(),
        "env_susceptibility": env.fit.c,
    })
    .to_string())
}

/// Off-calibration column weights of a completion as an `n × n` grid.
pub fn classify_json(n: usize, kind: &str, seed: u32) -> Result<String> {
    let m = MeasurementUnitary::build(n, &completion(kind, seed)?)?;
    let report = classify_completion(&m)?;
    let cols: Vec<_> = report
        .columns
        .iter()
        .map(|w| json!({"i": w.i, "k": w.k, "coupling": w.coupling, "liar": w.liar, "ready": w.ready}))
        .collect();
    Ok(json!({
        "n": n,
        "columns": cols,
        "total_liar": report.total_liar,
        "total_ready": report.total_ready,
        "liar_generating": report.classification == Classification::LiarGenerating,
    })
    .to_string())
}

/// Repeat-measurement statistics over an ε grid, pointer shift on both stages.
pub fn repeat_json(
    n: usize,
    k: usize,
    amplitudes: &[f64],
    eps_max: f64,
    points: usize,
) -> Result<String> {
    let sys = system(n, amplitudes)?;
    let eps = grid(eps_max.clamp(0.0, 1.0), points);
    let ps = CompletionSpec::PointerShift;
    let mut agreement = Vec::with_capacity(eps.len());
    let mut disagreement = Vec::with_capacity(eps.len());
    let mut ready = Vec::with_capacity(eps.len());
    for &e in &eps {
        let app = ApparatusPreparation::perturbed(n, k, e)?;
        let out = run_repeat(n, &ps, &ps, &sys, &app)?;
        agreement.push(out.agreement);
        disagreement.push(out.disagreement);
        ready.push(out.ready_involved);
    }
    Ok(json!({
        "epsilon": eps,
        "agreement": agreement,
        "disagreement": disagreement,
        "ready_involved": ready,
    })
    .to_string())
}

fn to_js(r: Result<String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn stability(
    n: usize,
    k: usize,
    kind: &str,
    seed: u32,
    amplitudes: Vec<f64>,
    eps_max: f64,
    points: usize,
) -> Result<String, JsError> {
    to_js(stability_json(
        n,
        k,
        kind,
        seed,
        &amplitudes,
        eps_max,
        points,
    ))
}

#[wasm_bindgen]
pub fn classify(n: usize, kind: &str, seed: u32) -> Result<String, JsError> {
    to_js(classify_json(n, kind, seed))
}

#[wasm_bindgen]
pub fn repeat(
    n: usize,
    k: usize,
    amplitudes: Vec<f64>,
    eps_max: f64,
    points: usize,
) -> Result<String, JsError> {
    to_js(repeat_json(n, k, &amplitudes, eps_max, points))
}
