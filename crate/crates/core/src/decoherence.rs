//! Environment coupling on S ⊗ A ⊗ E and its perturbed preparations.
//!
//! The environment has labels `0..=n`: `0` is the initial state `E_in`, and
//! `m ≥ 1` the out state correlated with record `o_m`. Calibration requires
//! `U_E |o_i, a_i, E_in⟩ = |o_i, a_i, E_i⟩`, which fixes only `n` of the
//! `n(n + 1)²` columns.
//!
//! Environment liars are `|o_i, a_i, E_j⟩` with `j ≥ 1`, `j ≠ i`. Coupled
//! components left on `E_in` are reported as a separate residual.

use num_complex::Complex64;

use crate::completion::{haar_completion, CompletionSpec, PermutationTable};
use crate::error::{Error, Result};
use crate::liar::{fit_quadratic, sa_model, validate_grid, StabilityCurve};
use crate::measurement::{column_residual, ModelDims, SystemPreparation};
use crate::tensor::{
    partial_trace, tensor_state, DensityOperator, FactorDims, StateVector, UnitaryOperator,
    UNITARY_TOL,
};

impl ModelDims {
    pub fn env_dim(&self) -> usize {
        self.outcomes() + 1
    }

    /// `n(n + 1)²`.
    pub fn sae_dim(&self) -> usize {
        self.sa_dim() * self.env_dim()
    }

    pub fn sae_dims(&self) -> FactorDims {
        let n = self.outcomes();
        FactorDims::new(vec![n, n + 1, n + 1]).expect("checked in ModelDims::new")
    }

    /// Flat index of `|o_i, a_j, E_m⟩`, `i` in `1..=n`.
    pub fn sae_index(&self, i: usize, j: usize, m: usize) -> usize {
        self.sa_index(i, j) * self.env_dim() + m
    }

    pub fn sae_labels(&self, flat: usize) -> (usize, usize, usize) {
        let (i, j) = self.sa_labels(flat / self.env_dim());
        (i, j, flat % self.env_dim())
    }

    /// `(i, i, 0) ↦ (i, i, i)`.
    pub fn env_calibration_pairs(&self) -> Vec<(usize, usize)> {
        (1..=self.outcomes())
            .map(|i| (self.sae_index(i, i, 0), self.sae_index(i, i, i)))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnvironmentPreparation {
    e: Vec<Complex64>,
}

impl EnvironmentPreparation {
    pub fn new(e: Vec<Complex64>) -> Result<Self> {
        let norm2: f64 = e.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > UNITARY_TOL {
            return Err(Error::validation(
                "environment",
                format!("coefficients have squared norm {norm2}, expected 1"),
            ));
        }
        Ok(Self { e })
    }

    /// Pure `E_in`.
    pub fn initial(n: usize) -> Self {
        let mut e = vec![Complex64::new(0.0, 0.0); n + 1];
        e[0] = Complex64::new(1.0, 0.0);
        Self { e }
    }

    /// `√(1 − η²) E_in + η E_m`.
    pub fn perturbed(n: usize, m: usize, eta: f64) -> Result<Self> {
        if !(1..=n).contains(&m) {
            return Err(Error::Argument(format!(
                "perturbed environment label {m} outside 1..={n}"
            )));
        }
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::Argument(format!("eta {eta} outside [0, 1]")));
        }
        let mut e = vec![Complex64::new(0.0, 0.0); n + 1];
        e[0] = Complex64::new((1.0 - eta * eta).sqrt(), 0.0);
        e[m] = Complex64::new(eta, 0.0);
        Ok(Self { e })
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.e
    }

    pub fn state(&self, dims: &ModelDims) -> Result<StateVector> {
        if self.e.len() != dims.env_dim() {
            return Err(Error::validation(
                "environment",
                format!(
                    "expected {} coefficients, got {}",
                    dims.env_dim(),
                    self.e.len()
                ),
            ));
        }
        StateVector::new(FactorDims::new(vec![dims.env_dim()])?, self.e.clone())
    }
}

/// A unitary `U_E` on S ⊗ A ⊗ E with its completion rule.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvironmentUnitary {
    dims: ModelDims,
    completion: CompletionSpec,
    unitary: UnitaryOperator,
}

impl EnvironmentUnitary {
    pub fn build(n: usize, completion: &CompletionSpec) -> Result<Self> {
        let dims = ModelDims::new(n)?;
        let unitary = match completion {
            CompletionSpec::PointerShift => return build_env_pointer_shift(n),
            CompletionSpec::HaarRandom { seed } => {
                haar_completion(dims.sae_dim(), &dims.env_calibration_pairs(), *seed)?
            }
            CompletionSpec::Permutation { table } => {
                table.validate(dims.sae_dim(), &dims.env_calibration_pairs())?;
                table.to_unitary()
            }
            CompletionSpec::Explicit => {
                return Err(Error::Completion(
                    "explicit environment unitaries are not built from a spec".into(),
                ))
            }
        };
        Ok(Self {
            dims,
            completion: completion.clone(),
            unitary,
        })
    }

    pub fn dims(&self) -> ModelDims {
        self.dims
    }

    pub fn completion(&self) -> &CompletionSpec {
        &self.completion
    }

    pub fn unitary(&self) -> &UnitaryOperator {
        &self.unitary
    }
}

/// `(i, j, m) ↦ (i, j, (m + j) mod (n + 1))`: the environment pointer is
/// shifted by the apparatus record and untouched while the apparatus is ready.
pub fn build_env_pointer_shift(n: usize) -> Result<EnvironmentUnitary> {
    let dims = ModelDims::new(n)?;
    let images: Vec<usize> = (0..dims.sae_dim())
        .map(|flat| {
            let (i, j, m) = dims.sae_labels(flat);
            dims.sae_index(i, j, (m + j) % (n + 1))
        })
        .collect();
    Ok(EnvironmentUnitary {
        dims,
        completion: CompletionSpec::PointerShift,
        unitary: UnitaryOperator::from_permutation(&images),
    })
}

/// Environment permutation table from a label map on `(i, j, m)`.
pub fn env_permutation_table(
    n: usize,
    mut map: impl FnMut(usize, usize, usize) -> (usize, usize, usize),
) -> Result<PermutationTable> {
    let dims = ModelDims::new(n)?;
    (0..dims.sae_dim())
        .map(|flat| {
            let (i, j, m) = dims.sae_labels(flat);
            let (i2, j2, m2) = map(i, j, m);
            if !(1..=n).contains(&i2) || j2 > n || m2 > n {
                return Err(Error::Completion(format!(
                    "image ({i2}, {j2}, {m2}) of ({i}, {j}, {m}) is out of range"
                )));
            }
            Ok(dims.sae_index(i2, j2, m2))
        })
        .collect::<Result<Vec<_>>>()
        .map(PermutationTable::from_images)
}

/// `max_i ‖U_E |o_i, a_i, E_in⟩ − |o_i, a_i, E_i⟩‖`.
pub fn verify_env_calibration(e: &EnvironmentUnitary) -> f64 {
    column_residual(e.unitary.as_operator(), &e.dims.env_calibration_pairs())
}

/// `U_E (ψ_SA ⊗ env)`.
pub fn decohere(
    psi_sa: &StateVector,
    e: &EnvironmentUnitary,
    env: &EnvironmentPreparation,
) -> Result<StateVector> {
    let dims = sa_model(psi_sa)?;
    if dims != e.dims {
        return Err(Error::Dimension {
            expected: e.dims.sa_dim(),
            actual: dims.sa_dim(),
        });
    }
    let full = tensor_state(psi_sa, &env.state(&dims)?)?;
    e.unitary.apply(&full)
}

pub(crate) fn sae_model(psi: &StateVector) -> Result<ModelDims> {
    match psi.dims().dims() {
        &[s, a, env] if a == s + 1 && env == s + 1 => ModelDims::new(s),
        other => Err(Error::Dimension {
            expected: 3,
            actual: other.len(),
        }),
    }
}

/// Weights of a decohered state on the environment liar span and on the
/// coupled-but-unmarked span `{|o_i, a_i, E_in⟩}`.
fn env_weights(psi: &StateVector) -> Result<(f64, f64)> {
    let dims = sae_model(psi)?;
    let mut liar = 0.0;
    let mut residual = 0.0;
    for (flat, amp) in psi.amplitudes().iter().enumerate() {
        let (i, j, m) = dims.sae_labels(flat);
        if i != j {
            continue;
        }
        if m == 0 {
            residual += amp.norm_sqr();
        } else if m != i {
            liar += amp.norm_sqr();
        }
    }
    Ok((liar.clamp(0.0, 1.0), residual.clamp(0.0, 1.0)))
}

/// Weight on `span{|o_i, a_i, E_j⟩ : j ≥ 1, j ≠ i}`.
pub fn env_liar_weight(psi: &StateVector) -> Result<f64> {
    env_weights(psi).map(|(liar, _)| liar)
}

/// Weight on `span{|o_i, a_i, E_in⟩}`.
pub fn env_ready_residual(psi: &StateVector) -> Result<f64> {
    env_weights(psi).map(|(_, residual)| residual)
}

/// Sum of `|ρ_rc|` over `r ≠ c` in the product basis.
pub fn coherence_norm(rho: &DensityOperator) -> f64 {
    let n = rho.dim();
    let mut total = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                total += rho.get(r, c).norm();
            }
        }
    }
    total
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoherenceReport {
    pub off_diag_l1: f64,
    pub env_liar_weight: f64,
    pub purity: f64,
}

/// Diagnostics of a decohered state: coherence and purity of `ρ_SA = tr_E`.
pub fn coherence_report(psi: &StateVector) -> Result<CoherenceReport> {
    let rho = reduced_sa(psi)?;
    Ok(CoherenceReport {
        off_diag_l1: coherence_norm(&rho),
        env_liar_weight: env_liar_weight(psi)?,
        purity: rho.purity(),
    })
}

/// `ρ_SA` of a state on S ⊗ A ⊗ E.
pub fn reduced_sa(psi: &StateVector) -> Result<DensityOperator> {
    sae_model(psi)?;
    partial_trace(psi, &[0, 1])
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnvStabilitySample {
    pub eta: f64,
    pub env_liar_weight: f64,
    pub env_residual: f64,
    pub coherence_l1: f64,
    pub purity: f64,
}

/// Sweeps `√(1 − η²) E_in + η E_m` and fits `envLiar ≈ c·η²`.
pub fn env_stability_sweep(
    e: &EnvironmentUnitary,
    psi_sa: &StateVector,
    m: usize,
    etas: &[f64],
) -> Result<StabilityCurve<EnvStabilitySample>> {
    let n = e.dims.outcomes();
    if !(1..=n).contains(&m) {
        return Err(Error::Argument(format!(
            "perturbed environment label {m} outside 1..={n}"
        )));
    }
    validate_grid(etas)?;
    let samples = etas
        .iter()
        .map(|&eta| {
            let env = EnvironmentPreparation::perturbed(n, m, eta)?;
            let out = decohere(psi_sa, e, &env)?;
            let (liar, residual) = env_weights(&out)?;
            let rho = reduced_sa(&out)?;
            Ok(EnvStabilitySample {
                eta,
                env_liar_weight: liar,
                env_residual: residual,
                coherence_l1: coherence_norm(&rho),
                purity: rho.purity(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_quadratic(samples.iter().map(|s| (s.eta, s.env_liar_weight)));
    Ok(StabilityCurve { samples, fit })
}

/// Closed-form environment liar coefficient of the env pointer shift on a
/// perfect-coupling state: `Σ_{i : (m + i) mod (n + 1) ≠ 0} |g_i|²`.
pub fn env_pointer_shift_coefficient(sys: &SystemPreparation, m: usize) -> f64 {
    crate::liar::pointer_shift_liar_coefficient(sys, m)
}

/// Summed environment liar weight of the columns `U_E |o_i, a_i, E_m⟩`,
/// `m ≥ 1`: the off-calibration inputs inside the coupled subspace.
pub fn env_liar_budget(e: &EnvironmentUnitary) -> Result<f64> {
    let residual = verify_env_calibration(e);
    if residual > UNITARY_TOL {
        return Err(Error::Calibration { residual });
    }
    let dims = e.dims;
    let n = dims.outcomes();
    let mut total = 0.0;
    for i in 1..=n {
        for m in 1..=n {
            let col = StateVector::new(dims.sae_dims(), e.unitary.column(dims.sae_index(i, i, m)))?;
            total += env_liar_weight(&col)?;
        }
    }
    Ok(total)
}
