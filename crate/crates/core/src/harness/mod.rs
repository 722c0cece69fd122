//! Declarative scenario runner producing deterministic result tables.

mod scenario;
mod table;

use sha2::{Digest, Sha256};

pub use scenario::{
    parse_document, parse_scenario, CompletionDoc, Experiment, GridDoc, GridSpec, PerturbationDoc,
    Scenario, ScenarioDoc, DEFAULT_GRID,
};
pub use table::{emit, format_real, Cell, Format, ResultTable};

use crate::decoherence::{env_stability_sweep, EnvironmentUnitary};
use crate::error::Result;
use crate::liar::{liar_budget, stability_sweep};
use crate::measurement::{
    classify_completion, premeasure, ApparatusPreparation, MeasurementUnitary,
};
use crate::repeat::run_repeat;

pub const TOOL_VERSION: &str = concat!("liarlab ", env!("CARGO_PKG_VERSION"));

/// Hex SHA-256 of the canonical JSON form of a validated scenario.
pub fn scenario_digest(s: &Scenario) -> String {
    let canonical = serde_json::to_string(s).expect("scenario serializes");
    Sha256::digest(canonical.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn run_scenario(s: &Scenario) -> Result<ResultTable> {
    let mut table = match s.experiment {
        Experiment::Sweep => run_sweep(s)?,
        Experiment::Classify => run_classify(s)?,
        Experiment::Budget => run_budget(s)?,
        Experiment::Decohere => run_decohere(s)?,
        Experiment::Repeat => run_repeat_grid(s)?,
    };
    let mut meta = vec![
        ("tool".to_string(), TOOL_VERSION.to_string()),
        ("scenario_digest".to_string(), scenario_digest(s)),
        ("seed".to_string(), s.seed.to_string()),
        ("experiment".to_string(), s.experiment.name().to_string()),
    ];
    meta.append(&mut table.metadata);
    table.metadata = meta;
    Ok(table)
}

fn measurement(s: &Scenario) -> Result<MeasurementUnitary> {
    MeasurementUnitary::build(s.n, &s.completion)
}

fn run_sweep(s: &Scenario) -> Result<ResultTable> {
    let curve = stability_sweep(&measurement(s)?, &s.system, s.label, &s.grid)?;
    let mut t = ResultTable::new(&["epsilon", "liar_weight", "ready_residual", "born_tv"]);
    for p in &curve.samples {
        t.push_row(vec![
            Cell::Real(p.epsilon),
            Cell::Real(p.liar_weight),
            Cell::Real(p.ready_residual),
            Cell::Real(p.born_tv),
        ]);
    }
    t.meta(
        "susceptibility_model",
        "least-squares c in liar_weight = c * epsilon^2",
    );
    t.meta("susceptibility_c", format_real(curve.fit.c));
    t.meta("fit_residual", format_real(curve.fit.residual));
    Ok(t)
}

fn run_classify(s: &Scenario) -> Result<ResultTable> {
    let report = classify_completion(&measurement(s)?)?;
    let mut t = ResultTable::new(&["input_i", "input_k", "coupling_w", "liar_w", "ready_w"]);
    for w in &report.columns {
        t.push_row(vec![
            Cell::Int(w.i as u64),
            Cell::Int(w.k as u64),
            Cell::Real(w.coupling),
            Cell::Real(w.liar),
            Cell::Real(w.ready),
        ]);
    }
    let class = match report.classification {
        crate::measurement::Classification::LiarGenerating => "liar_generating",
        crate::measurement::Classification::CouplingPreserving => "coupling_preserving",
    };
    t.meta("classification", class);
    Ok(t)
}

fn run_budget(s: &Scenario) -> Result<ResultTable> {
    let budget = liar_budget(&measurement(s)?)?;
    let mut t = ResultTable::new(&["n", "completion", "liar_budget"]);
    t.push_row(vec![
        Cell::Int(s.n as u64),
        Cell::Text(s.completion.name().to_string()),
        Cell::Real(budget),
    ]);
    Ok(t)
}

fn run_decohere(s: &Scenario) -> Result<ResultTable> {
    let coupled = premeasure(
        &measurement(s)?,
        &s.system,
        &ApparatusPreparation::ready(s.n),
    )?;
    let env = EnvironmentUnitary::build(s.n, &s.env_completion)?;
    let curve = env_stability_sweep(&env, &coupled, s.label, &s.grid)?;
    let mut t = ResultTable::new(&["eta", "env_liar_weight", "coherence_l1", "purity"]);
    for p in &curve.samples {
        t.push_row(vec![
            Cell::Real(p.eta),
            Cell::Real(p.env_liar_weight),
            Cell::Real(p.coherence_l1),
            Cell::Real(p.purity),
        ]);
    }
    t.meta(
        "susceptibility_model",
        "least-squares c in env_liar_weight = c * eta^2",
    );
    t.meta("susceptibility_c", format_real(curve.fit.c));
    t.meta("fit_residual", format_real(curve.fit.residual));
    Ok(t)
}

fn run_repeat_grid(s: &Scenario) -> Result<ResultTable> {
    let mut t = ResultTable::new(&["epsilon", "agreement", "disagreement", "ready_involved"]);
    for &eps in &s.grid {
        let app = ApparatusPreparation::perturbed(s.n, s.label, eps)?;
        let out = run_repeat(s.n, &s.completion, &s.second_completion, &s.system, &app)?;
        t.push_row(vec![
            Cell::Real(eps),
            Cell::Real(out.agreement),
            Cell::Real(out.disagreement),
            Cell::Real(out.ready_involved),
        ]);
    }
    Ok(t)
}
