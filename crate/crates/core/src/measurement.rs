//! Measurement unitaries on system ⊗ apparatus, perturbed preparations and
//! premeasurement.
//!
//! Labels: system outcomes are `1..=n` (ket `|o_i⟩`), apparatus labels are
//! `0..=n` with `0` the ready state and `j ≥ 1` a record of `o_j`. The system
//! factor is stored 0-based, so `(i, k)` sits at flat index `(i − 1)(n + 1) + k`.
//!
//! Every measurement unitary satisfies the calibration constraint
//! `U |o_i, ready⟩ = |o_i, o_i⟩`. Off that n-dimensional subspace the operator
//! is a free choice, described by a [`CompletionSpec`].

use num_complex::Complex64;

use crate::completion::{haar_completion, CompletionSpec, PermutationTable};
use crate::error::{Error, Result};
use crate::tensor::{self, FactorDims, LinearOperator, StateVector, UnitaryOperator, UNITARY_TOL};

/// Equality tolerance for exact constructions.
pub const EXACT_TOL: f64 = 1e-12;

/// Total liar weight below which a completion counts as coupling preserving.
pub const CLASSIFY_TOL: f64 = 1e-10;

/// Size of a measurement model with `n` outcomes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModelDims {
    n: usize,
}

impl ModelDims {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Model(format!("need at least 2 outcomes, got {n}")));
        }
        // Three-factor spaces (S ⊗ A ⊗ A or S ⊗ A ⊗ E) must fit under the cap.
        if n.checked_mul((n + 1) * (n + 1))
            .is_none_or(|d| d > tensor::DIM_CAP)
        {
            return Err(Error::Model(format!("{n} outcomes exceeds the size cap")));
        }
        Ok(Self { n })
    }

    pub fn outcomes(&self) -> usize {
        self.n
    }

    pub fn apparatus_dim(&self) -> usize {
        self.n + 1
    }

    /// `n(n + 1)`.
    pub fn sa_dim(&self) -> usize {
        self.n * (self.n + 1)
    }

    pub fn system_dims(&self) -> FactorDims {
        FactorDims::new(vec![self.n]).expect("n ≥ 2")
    }

    pub fn apparatus_dims(&self) -> FactorDims {
        FactorDims::new(vec![self.n + 1]).expect("n ≥ 2")
    }

    pub fn sa_dims(&self) -> FactorDims {
        FactorDims::new(vec![self.n, self.n + 1]).expect("checked in new")
    }

    /// Flat index of `|o_i⟩ ⊗ |a_k⟩`, with `i` in `1..=n` and `k` in `0..=n`.
    pub fn sa_index(&self, i: usize, k: usize) -> usize {
        debug_assert!((1..=self.n).contains(&i) && k <= self.n);
        (i - 1) * (self.n + 1) + k
    }

    /// Inverse of [`sa_index`](Self::sa_index).
    pub fn sa_labels(&self, flat: usize) -> (usize, usize) {
        (flat / (self.n + 1) + 1, flat % (self.n + 1))
    }

    /// Calibration `(column, row)` pairs: `(i, 0) ↦ (i, i)`.
    pub fn calibration_pairs(&self) -> Vec<(usize, usize)> {
        (1..=self.n)
            .map(|i| (self.sa_index(i, 0), self.sa_index(i, i)))
            .collect()
    }

    /// Is `(i, j)` a liar label: a record `j ≥ 1` that differs from `i`?
    pub fn is_liar(&self, i: usize, j: usize) -> bool {
        j >= 1 && j != i
    }
}

/// `|ψ⟩ = Σ g_i |o_i⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemPreparation {
    g: Vec<Complex64>,
}

impl SystemPreparation {
    pub fn new(g: Vec<Complex64>) -> Result<Self> {
        let norm2: f64 = g.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > UNITARY_TOL {
            return Err(Error::validation(
                "g",
                format!("coefficients have squared norm {norm2}, expected 1"),
            ));
        }
        Ok(Self { g })
    }

    /// Rescales `g` to unit norm; fails only for the zero vector.
    pub fn normalized(g: Vec<Complex64>) -> Result<Self> {
        let norm = g.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::validation("g", "cannot normalize a zero vector"));
        }
        Ok(Self {
            g: g.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn uniform(n: usize) -> Self {
        let a = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
        Self { g: vec![a; n] }
    }

    /// The eigenstate `|o_i⟩`, `i` in `1..=n`.
    pub fn eigenstate(n: usize, i: usize) -> Self {
        let mut g = vec![Complex64::new(0.0, 0.0); n];
        g[i - 1] = Complex64::new(1.0, 0.0);
        Self { g }
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.g
    }

    /// Born probabilities `|g_i|²`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.g.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn state(&self, dims: &ModelDims) -> Result<StateVector> {
        check_len("g", dims.outcomes(), self.g.len())?;
        StateVector::new(dims.system_dims(), self.g.clone())
    }
}

/// Apparatus preparation `α|ready⟩ + Σ_k β_k |o_k⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct ApparatusPreparation {
    alpha: Complex64,
    beta: Vec<Complex64>,
}

impl ApparatusPreparation {
    pub fn new(alpha: Complex64, beta: Vec<Complex64>) -> Result<Self> {
        let norm2 = alpha.norm_sqr() + beta.iter().map(|a| a.norm_sqr()).sum::<f64>();
        if (norm2 - 1.0).abs() > UNITARY_TOL {
            return Err(Error::validation(
                "apparatus",
                format!("|alpha|² + Σ|beta|² = {norm2}, expected 1"),
            ));
        }
        Ok(Self { alpha, beta })
    }

    pub fn ready(n: usize) -> Self {
        Self {
            alpha: Complex64::new(1.0, 0.0),
            beta: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    /// One-parameter family `α = √(1 − ε²)`, `β_k = ε`, other β zero.
    pub fn perturbed(n: usize, k: usize, epsilon: f64) -> Result<Self> {
        if !(1..=n).contains(&k) {
            return Err(Error::Argument(format!(
                "perturbed label {k} outside 1..={n}"
            )));
        }
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::Argument(format!("epsilon {epsilon} outside [0, 1]")));
        }
        let mut beta = vec![Complex64::new(0.0, 0.0); n];
        beta[k - 1] = Complex64::new(epsilon, 0.0);
        Ok(Self {
            alpha: Complex64::new((1.0 - epsilon * epsilon).sqrt(), 0.0),
            beta,
        })
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> &[Complex64] {
        &self.beta
    }

    pub fn state(&self, dims: &ModelDims) -> Result<StateVector> {
        check_len("beta", dims.outcomes(), self.beta.len())?;
        let mut amps = Vec::with_capacity(dims.apparatus_dim());
        amps.push(self.alpha);
        amps.extend_from_slice(&self.beta);
        StateVector::new(dims.apparatus_dims(), amps)
    }
}

fn check_len(field: &str, expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::validation(
            field,
            format!("expected {expected} coefficients, got {actual}"),
        ))
    }
}

/// A unitary `U_M` on S ⊗ A with its completion rule.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementUnitary {
    dims: ModelDims,
    completion: CompletionSpec,
    unitary: UnitaryOperator,
}

impl MeasurementUnitary {
    pub fn build(n: usize, completion: &CompletionSpec) -> Result<Self> {
        match completion {
            CompletionSpec::PointerShift => build_pointer_shift(n),
            CompletionSpec::Permutation { table } => build_permutation(n, table),
            CompletionSpec::HaarRandom { seed } => build_haar_completion(n, *seed),
            CompletionSpec::Explicit => Err(Error::Completion(
                "explicit completions are built with MeasurementUnitary::from_unitary".into(),
            )),
        }
    }

    /// Wraps an arbitrary unitary on S ⊗ A. Calibration is not enforced here;
    /// [`classify_completion`] and the liar budget reject uncalibrated input.
    pub fn from_unitary(n: usize, unitary: UnitaryOperator) -> Result<Self> {
        let dims = ModelDims::new(n)?;
        if unitary.dim() != dims.sa_dim() {
            return Err(Error::Dimension {
                expected: dims.sa_dim(),
                actual: unitary.dim(),
            });
        }
        Ok(Self {
            dims,
            completion: CompletionSpec::Explicit,
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

    /// Image of the basis ket `|o_i, a_k⟩`.
    pub fn image(&self, i: usize, k: usize) -> Vec<Complex64> {
        self.unitary.column(self.dims.sa_index(i, k))
    }
}

/// Pointer-shift image label: `(i, k) ↦ (i, (k + i) mod (n + 1))`.
pub fn pointer_shift_record(n: usize, i: usize, k: usize) -> usize {
    (k + i) % (n + 1)
}

pub fn build_pointer_shift(n: usize) -> Result<MeasurementUnitary> {
    let dims = ModelDims::new(n)?;
    let images: Vec<usize> = (0..dims.sa_dim())
        .map(|flat| {
            let (i, k) = dims.sa_labels(flat);
            dims.sa_index(i, pointer_shift_record(n, i, k))
        })
        .collect();
    Ok(MeasurementUnitary {
        dims,
        completion: CompletionSpec::PointerShift,
        unitary: UnitaryOperator::from_permutation(&images),
    })
}

/// Permutation table built from a label map `(i, k) ↦ (i', k')`.
pub fn permutation_table(
    n: usize,
    mut map: impl FnMut(usize, usize) -> (usize, usize),
) -> Result<PermutationTable> {
    let dims = ModelDims::new(n)?;
    let mut images = Vec::with_capacity(dims.sa_dim());
    for flat in 0..dims.sa_dim() {
        let (i, k) = dims.sa_labels(flat);
        let (i2, k2) = map(i, k);
        if !(1..=n).contains(&i2) || k2 > n {
            return Err(Error::Completion(format!(
                "image ({i2}, {k2}) of ({i}, {k}) is out of range"
            )));
        }
        images.push(dims.sa_index(i2, k2));
    }
    Ok(PermutationTable::from_images(images))
}

pub fn build_permutation(n: usize, table: &PermutationTable) -> Result<MeasurementUnitary> {
    let dims = ModelDims::new(n)?;
    table.validate(dims.sa_dim(), &dims.calibration_pairs())?;
    Ok(MeasurementUnitary {
        dims,
        completion: CompletionSpec::Permutation {
            table: table.clone(),
        },
        unitary: table.to_unitary(),
    })
}

pub fn build_haar_completion(n: usize, seed: u64) -> Result<MeasurementUnitary> {
    let dims = ModelDims::new(n)?;
    let unitary = haar_completion(dims.sa_dim(), &dims.calibration_pairs(), seed)?;
    Ok(MeasurementUnitary {
        dims,
        completion: CompletionSpec::HaarRandom { seed },
        unitary,
    })
}

/// `max_i ‖U |o_i, ready⟩ − |o_i, o_i⟩‖` for any square operator on S ⊗ A.
pub fn calibration_residual(op: &LinearOperator, n: usize) -> Result<f64> {
    let dims = ModelDims::new(n)?;
    if op.dim() != dims.sa_dim() {
        return Err(Error::Dimension {
            expected: dims.sa_dim(),
            actual: op.dim(),
        });
    }
    Ok(column_residual(op, &dims.calibration_pairs()))
}

pub(crate) fn column_residual(op: &LinearOperator, pairs: &[(usize, usize)]) -> f64 {
    pairs
        .iter()
        .map(|&(col, row)| {
            (0..op.dim())
                .map(|r| {
                    let target = if r == row { 1.0 } else { 0.0 };
                    (op.get(r, col) - target).norm_sqr()
                })
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

pub fn verify_calibration(m: &MeasurementUnitary) -> f64 {
    column_residual(m.unitary.as_operator(), &m.dims.calibration_pairs())
}

/// `U_M (ψ ⊗ apparatus)`.
pub fn premeasure(
    m: &MeasurementUnitary,
    sys: &SystemPreparation,
    app: &ApparatusPreparation,
) -> Result<StateVector> {
    let psi = tensor::tensor_state(&sys.state(&m.dims)?, &app.state(&m.dims)?)?;
    m.unitary.apply(&psi)
}

/// Which of the three outcome spans a record label falls in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecordClass {
    /// `(j, j)`: the record matches the system.
    Coupling,
    /// `(j, m)` with `m ≥ 1`, `m ≠ j`.
    Liar,
    /// `(j, 0)`: the apparatus still reads ready.
    Ready,
}

impl ModelDims {
    pub fn record_class(&self, flat: usize) -> RecordClass {
        match self.sa_labels(flat) {
            (_, 0) => RecordClass::Ready,
            (i, j) if i == j => RecordClass::Coupling,
            _ => RecordClass::Liar,
        }
    }
}

/// Weights of one off-calibration column on the three spans.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ColumnWeights {
    pub i: usize,
    pub k: usize,
    pub coupling: f64,
    pub liar: f64,
    pub ready: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    LiarGenerating,
    CouplingPreserving,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaseReport {
    pub columns: Vec<ColumnWeights>,
    pub total_coupling: f64,
    pub total_liar: f64,
    pub total_ready: f64,
    pub classification: Classification,
}

/// Decomposes each off-calibration column `U |o_i, a_k⟩`, `k ≥ 1`, into
/// coupling, liar and ready weights.
pub fn classify_completion(m: &MeasurementUnitary) -> Result<CaseReport> {
    let residual = verify_calibration(m);
    if residual > UNITARY_TOL {
        return Err(Error::Calibration { residual });
    }
    let dims = m.dims;
    let n = dims.outcomes();
    let mut columns = Vec::with_capacity(n * n);
    for i in 1..=n {
        for k in 1..=n {
            let col = m.image(i, k);
            let mut w = ColumnWeights {
                i,
                k,
                coupling: 0.0,
                liar: 0.0,
                ready: 0.0,
            };
            for (flat, amp) in col.iter().enumerate() {
                let p = amp.norm_sqr();
                match dims.record_class(flat) {
                    RecordClass::Coupling => w.coupling += p,
                    RecordClass::Liar => w.liar += p,
                    RecordClass::Ready => w.ready += p,
                }
            }
            columns.push(w);
        }
    }
    let total_coupling = columns.iter().map(|w| w.coupling).sum();
    let total_liar: f64 = columns.iter().map(|w| w.liar).sum();
    let total_ready = columns.iter().map(|w| w.ready).sum();
    let classification = if total_liar <= CLASSIFY_TOL {
        Classification::CouplingPreserving
    } else {
        Classification::LiarGenerating
    };
    Ok(CaseReport {
        columns,
        total_coupling,
        total_liar,
        total_ready,
        classification,
    })
}
