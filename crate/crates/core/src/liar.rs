//! Liar projectors, record distributions and perturbation sweeps.
//!
//! A liar state is `|o_i⟩ ⊗ |a_j⟩` with a record `j ≥ 1` different from `i`.
//! The apparatus ready label is tracked separately as a residual: it is
//! anomalous after a measurement but records nothing false.
//!
//! Stability curves report liar weight against the perturbation strength ε
//! together with a least-squares susceptibility `c` in `L(ε) ≈ c·ε²`. The
//! quadratic model is this crate's stability metric, not a derived law for
//! arbitrary completions.

use crate::error::{Error, Result};
use crate::measurement::{
    premeasure, verify_calibration, ApparatusPreparation, MeasurementUnitary, ModelDims,
    RecordClass, SystemPreparation,
};
use crate::tensor::{project_weight, Projector, StateVector, UNITARY_TOL};

/// Projector onto `span{|o_i, a_j⟩ : j ≥ 1, j ≠ i}` in S ⊗ A.
#[derive(Clone, Debug)]
pub struct LiarProjector {
    dims: ModelDims,
    projector: Projector,
}

impl LiarProjector {
    pub fn new(n: usize) -> Result<Self> {
        let dims = ModelDims::new(n)?;
        let liar = (0..dims.sa_dim()).filter(|&f| dims.record_class(f) == RecordClass::Liar);
        let projector = Projector::onto_basis(dims.sa_dim(), liar)?;
        let expected = (n * (n - 1)) as f64;
        debug_assert!((projector.rank() - expected).abs() <= UNITARY_TOL);
        Ok(Self { dims, projector })
    }

    pub fn dims(&self) -> ModelDims {
        self.dims
    }

    pub fn projector(&self) -> &Projector {
        &self.projector
    }

    /// `tr P`, which must equal `n(n − 1)`.
    pub fn rank(&self) -> f64 {
        self.projector.rank()
    }

    pub fn weight(&self, psi: &StateVector) -> Result<f64> {
        project_weight(&self.projector, psi)
    }
}

/// Recovers the model size from an S ⊗ A state.
pub(crate) fn sa_model(psi: &StateVector) -> Result<ModelDims> {
    match psi.dims().dims() {
        &[s, a] if a == s + 1 => ModelDims::new(s),
        other => Err(Error::Dimension {
            expected: 2,
            actual: other.len(),
        }),
    }
}

pub fn liar_weight(psi: &StateVector) -> Result<f64> {
    let dims = sa_model(psi)?;
    LiarProjector::new(dims.outcomes())?.weight(psi)
}

/// Probability of each apparatus record, plus the ready residual.
#[derive(Clone, Debug, PartialEq)]
pub struct RecordDistribution {
    /// Entry `j − 1` is the probability of record `o_j`.
    pub per_record: Vec<f64>,
    pub ready_residual: f64,
}

impl RecordDistribution {
    pub fn total(&self) -> f64 {
        self.per_record.iter().sum::<f64>() + self.ready_residual
    }
}

pub fn record_distribution(psi: &StateVector) -> Result<RecordDistribution> {
    let dims = sa_model(psi)?;
    let mut per_label = vec![0.0; dims.apparatus_dim()];
    for (flat, amp) in psi.amplitudes().iter().enumerate() {
        let (_, j) = dims.sa_labels(flat);
        per_label[j] += amp.norm_sqr();
    }
    let ready_residual = per_label[0];
    Ok(RecordDistribution {
        per_record: per_label[1..].to_vec(),
        ready_residual,
    })
}

/// Total-variation distance between the record distribution (ready counted
/// as its own outcome) and the Born probabilities `|g_i|²`.
pub fn born_deviation(d: &RecordDistribution, sys: &SystemPreparation) -> f64 {
    let born = sys.probabilities();
    let spread: f64 = d
        .per_record
        .iter()
        .zip(&born)
        .map(|(p, q)| (p - q).abs())
        .sum();
    0.5 * spread + 0.5 * d.ready_residual
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilitySample {
    pub epsilon: f64,
    pub liar_weight: f64,
    pub ready_residual: f64,
    pub born_tv: f64,
}

/// Least-squares fit of `y ≈ c·x²` through the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SusceptibilityFit {
    pub c: f64,
    /// Root of the summed squared residuals.
    pub residual: f64,
}

/// Fits `y ≈ c·x²`; `c` is 0 when every `x` is 0.
pub fn fit_quadratic(points: impl IntoIterator<Item = (f64, f64)> + Clone) -> SusceptibilityFit {
    let (num, den) = points
        .clone()
        .into_iter()
        .fold((0.0, 0.0), |(num, den), (x, y)| {
            let x2 = x * x;
            (num + x2 * y, den + x2 * x2)
        });
    let c = if den > 0.0 { num / den } else { 0.0 };
    let residual = points
        .into_iter()
        .map(|(x, y)| (y - c * x * x).powi(2))
        .sum::<f64>()
        .sqrt();
    SusceptibilityFit { c, residual }
}

/// Samples ordered by perturbation strength, with the fitted susceptibility.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilityCurve<S = StabilitySample> {
    pub samples: Vec<S>,
    pub fit: SusceptibilityFit,
}

/// Checks a perturbation grid: nonempty, inside `[0, 1)`, strictly increasing.
pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Argument("perturbation grid is empty".into()));
    }
    if let Some(x) = grid.iter().find(|x| !(0.0..1.0).contains(*x)) {
        return Err(Error::Argument(format!("grid value {x} outside [0, 1)")));
    }
    if let Some(w) = grid.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::Argument(format!(
            "grid not strictly increasing at {} → {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// One sample of the apparatus perturbation family at strength `epsilon`.
pub fn stability_sample(
    m: &MeasurementUnitary,
    sys: &SystemPreparation,
    liar: &LiarProjector,
    k: usize,
    epsilon: f64,
) -> Result<StabilitySample> {
    let n = m.dims().outcomes();
    let app = ApparatusPreparation::perturbed(n, k, epsilon)?;
    let psi = premeasure(m, sys, &app)?;
    let dist = record_distribution(&psi)?;
    Ok(StabilitySample {
        epsilon,
        liar_weight: liar.weight(&psi)?,
        ready_residual: dist.ready_residual,
        born_tv: born_deviation(&dist, sys),
    })
}

/// Sweeps `α = √(1 − ε²)`, `β_k = ε` over `epsilons` and fits `c`.
pub fn stability_sweep(
    m: &MeasurementUnitary,
    sys: &SystemPreparation,
    k: usize,
    epsilons: &[f64],
) -> Result<StabilityCurve> {
    let n = m.dims().outcomes();
    if !(1..=n).contains(&k) {
        return Err(Error::Argument(format!(
            "perturbed label {k} outside 1..={n}"
        )));
    }
    validate_grid(epsilons)?;
    let liar = LiarProjector::new(n)?;
    let samples = epsilons
        .iter()
        .map(|&eps| stability_sample(m, sys, &liar, k, eps))
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_quadratic(samples.iter().map(|s| (s.epsilon, s.liar_weight)));
    Ok(StabilityCurve { samples, fit })
}

/// Closed-form liar weight of the pointer shift under the one-parameter
/// perturbation: `ε² · Σ_{i : (k + i) mod (n + 1) ≠ 0} |g_i|²`.
pub fn pointer_shift_liar_coefficient(sys: &SystemPreparation, k: usize) -> f64 {
    let n = sys.coefficients().len();
    sys.probabilities()
        .iter()
        .enumerate()
        .filter(|(idx, _)| !(k + idx + 1).is_multiple_of(n + 1))
        .map(|(_, p)| p)
        .sum()
}

/// Summed liar weight of all off-calibration columns `U |o_i, a_k⟩`, `k ≥ 1`.
pub fn liar_budget(m: &MeasurementUnitary) -> Result<f64> {
    let residual = verify_calibration(m);
    if residual > UNITARY_TOL {
        return Err(Error::Calibration { residual });
    }
    let dims = m.dims();
    let n = dims.outcomes();
    let liar = LiarProjector::new(n)?;
    let mut total = 0.0;
    for i in 1..=n {
        for k in 1..=n {
            let col = StateVector::new(dims.sa_dims(), m.image(i, k))?;
            total += liar.weight(&col)?;
        }
    }
    Ok(total)
}
