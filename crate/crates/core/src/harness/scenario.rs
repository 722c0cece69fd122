//! Scenario documents: JSON in, validated [`Scenario`] out.
//!
//! ```json
//! {
//!   "n": 2,
//!   "g": [[0.7071067811865476, 0], [0.7071067811865476, 0]],
//!   "experiment": "sweep",
//!   "completion": {"kind": "pointer_shift"},
//!   "perturbation": {"k": 1, "epsilons": {"start": 0, "stop": 0.5, "count": 11}},
//!   "seed": 0
//! }
//! ```
//!
//! Complex numbers are `[re, im]` pairs. `docs/scenario.schema.json` holds the
//! full schema.

use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::completion::{CompletionSpec, PermutationTable};
use crate::decoherence::{env_permutation_table, EnvironmentUnitary};
use crate::error::{Error, Result};
use crate::liar::validate_grid;
use crate::measurement::{permutation_table, MeasurementUnitary, ModelDims, SystemPreparation};

pub const DEFAULT_GRID: GridSpec = GridSpec {
    start: 0.0,
    stop: 0.5,
    count: 11,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Sweep,
    Classify,
    Budget,
    Decohere,
    Repeat,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Sweep => "sweep",
            Experiment::Classify => "classify",
            Experiment::Budget => "budget",
            Experiment::Decohere => "decohere",
            Experiment::Repeat => "repeat",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GridSpec {
    /// Evenly spaced points including both ends.
    pub fn points(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.start],
            count => {
                let step = (self.stop - self.start) / (count - 1) as f64;
                (0..count).map(|i| self.start + step * i as f64).collect()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridDoc {
    Range(GridSpec),
    List(Vec<f64>),
}

/// Completion as written in a scenario. Permutation tables are lists of
/// `[[from...], [to...]]` label pairs; unlisted inputs are an error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CompletionDoc {
    PointerShift,
    Permutation {
        table: Vec<(Vec<usize>, Vec<usize>)>,
    },
    HaarRandom {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilons: Option<GridDoc>,
}

/// The scenario document before validation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub n: usize,
    pub g: Vec<[f64; 2]>,
    pub experiment: Experiment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub completion: Option<CompletionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub env_completion: Option<CompletionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_completion: Option<CompletionDoc>,
    #[serde(default)]
    pub perturbation: PerturbationDoc,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub renormalize: bool,
}

/// A fully validated scenario.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Scenario {
    pub n: usize,
    #[serde(serialize_with = "serialize_prep")]
    pub system: SystemPreparation,
    pub experiment: Experiment,
    pub completion: CompletionSpec,
    pub env_completion: CompletionSpec,
    pub second_completion: CompletionSpec,
    /// Perturbed apparatus label `k` (sweep, repeat) or environment label `m` (decohere).
    pub label: usize,
    pub grid: Vec<f64>,
    pub seed: u64,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    pub renormalize: bool,
}

fn serialize_prep<S: serde::Serializer>(
    prep: &SystemPreparation,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let pairs: Vec<[f64; 2]> = prep.coefficients().iter().map(|a| [a.re, a.im]).collect();
    pairs.serialize(s)
}

/// Parses the document grammar only.
pub fn parse_document(text: &str) -> Result<ScenarioDoc> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Parses and validates a scenario document, applying defaults.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    parse_document(text)?.validate()
}

impl ScenarioDoc {
    pub fn validate(self) -> Result<Scenario> {
        let dims = ModelDims::new(self.n).map_err(|e| Error::validation("n", e.to_string()))?;
        let n = self.n;

        if self.g.len() != n {
            return Err(Error::validation(
                "g",
                format!("expected {n} coefficients, got {}", self.g.len()),
            ));
        }
        if self.g.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::validation("g", "coefficients must be finite"));
        }
        let g: Vec<Complex64> = self
            .g
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        let system = if self.renormalize {
            SystemPreparation::normalized(g)?
        } else {
            SystemPreparation::new(g)?
        };

        let completion = resolve_completion(
            "completion",
            self.completion.as_ref(),
            self.seed,
            |spec| MeasurementUnitary::build(n, spec).map(drop),
            |table| permutation_table_from_pairs(&dims, table, false),
        )?;
        let env_completion = resolve_completion(
            "env_completion",
            self.env_completion.as_ref(),
            self.seed,
            // Haar environment unitaries are large; defer building them to run time.
            |spec| match spec {
                CompletionSpec::HaarRandom { .. } => Ok(()),
                _ => EnvironmentUnitary::build(n, spec).map(drop),
            },
            |table| permutation_table_from_pairs(&dims, table, true),
        )?;
        let second_completion = resolve_completion(
            "second_completion",
            self.second_completion.as_ref(),
            self.seed,
            |spec| MeasurementUnitary::build(n, spec).map(drop),
            |table| permutation_table_from_pairs(&dims, table, false),
        )?;

        let (label, label_field) = match self.experiment {
            Experiment::Decohere => (self.perturbation.m.unwrap_or(1), "perturbation.m"),
            _ => (self.perturbation.k.unwrap_or(1), "perturbation.k"),
        };
        if !(1..=n).contains(&label) {
            return Err(Error::validation(
                label_field,
                format!("label {label} outside 1..={n}"),
            ));
        }

        let grid = match &self.perturbation.epsilons {
            None => DEFAULT_GRID.points(),
            Some(GridDoc::List(points)) => points.clone(),
            Some(GridDoc::Range(spec)) => spec.points(),
        };
        validate_grid(&grid)
            .map_err(|e| Error::validation("perturbation.epsilons", e.to_string()))?;

        Ok(Scenario {
            n,
            system,
            experiment: self.experiment,
            completion,
            env_completion,
            second_completion,
            label,
            grid,
            seed: self.seed,
            output: self.output,
            renormalize: self.renormalize,
        })
    }
}

fn resolve_completion(
    field: &str,
    doc: Option<&CompletionDoc>,
    default_seed: u64,
    check: impl Fn(&CompletionSpec) -> Result<()>,
    table: impl Fn(&[(Vec<usize>, Vec<usize>)]) -> Result<PermutationTable>,
) -> Result<CompletionSpec> {
    let spec = match doc {
        None | Some(CompletionDoc::PointerShift) => CompletionSpec::PointerShift,
        Some(CompletionDoc::HaarRandom { seed }) => CompletionSpec::HaarRandom {
            seed: seed.unwrap_or(default_seed),
        },
        Some(CompletionDoc::Permutation { table: pairs }) => CompletionSpec::Permutation {
            table: table(pairs).map_err(|e| Error::validation(field, e.to_string()))?,
        },
    };
    check(&spec).map_err(|e| Error::validation(field, e.to_string()))?;
    Ok(spec)
}

/// Builds a flat-index table from label pairs. Measurement tables use
/// `[i, k]` labels, environment tables `[i, j, m]`.
fn permutation_table_from_pairs(
    dims: &ModelDims,
    pairs: &[(Vec<usize>, Vec<usize>)],
    environment: bool,
) -> Result<PermutationTable> {
    let arity = if environment { 3 } else { 2 };
    let size = if environment {
        dims.sae_dim()
    } else {
        dims.sa_dim()
    };
    let mut images: Vec<Option<Vec<usize>>> = vec![None; size];
    let flat = |labels: &[usize]| -> Result<usize> {
        let n = dims.outcomes();
        if labels.len() != arity
            || !(1..=n).contains(&labels[0])
            || labels[1..].iter().any(|&l| l > n)
        {
            return Err(Error::Completion(format!("invalid label {labels:?}")));
        }
        Ok(if environment {
            dims.sae_index(labels[0], labels[1], labels[2])
        } else {
            dims.sa_index(labels[0], labels[1])
        })
    };
    for (from, to) in pairs {
        let src = flat(from)?;
        flat(to)?;
        if images[src].replace(to.clone()).is_some() {
            return Err(Error::Completion(format!("input {from:?} listed twice")));
        }
    }
    if let Some(missing) = images.iter().position(Option::is_none) {
        let labels = if environment {
            let (i, j, m) = dims.sae_labels(missing);
            vec![i, j, m]
        } else {
            let (i, k) = dims.sa_labels(missing);
            vec![i, k]
        };
        return Err(Error::Completion(format!("input {labels:?} has no image")));
    }
    let images: Vec<Vec<usize>> = images.into_iter().map(Option::unwrap).collect();
    let n = dims.outcomes();
    if environment {
        env_permutation_table(n, |i, j, m| {
            let t = &images[dims.sae_index(i, j, m)];
            (t[0], t[1], t[2])
        })
    } else {
        permutation_table(n, |i, k| {
            let t = &images[dims.sa_index(i, k)];
            (t[0], t[1])
        })
    }
}
