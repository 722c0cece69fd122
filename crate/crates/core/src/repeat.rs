//! Two sequential measurements with independent registers on S ⊗ A₁ ⊗ A₂.
//!
//! No collapse happens between the stages: the first unitary acts on S ⊗ A₁,
//! the second on S ⊗ A₂, and statistics are read off the final joint state.

use crate::completion::CompletionSpec;
use crate::error::{Error, Result};
use crate::liar::{liar_weight, sa_model};
use crate::measurement::{
    premeasure, ApparatusPreparation, MeasurementUnitary, ModelDims, SystemPreparation,
};
use crate::tensor::{lift, tensor_state, FactorDims, StateVector};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RepeatOutcome {
    /// Both registers hold the same record `j ≥ 1`.
    pub agreement: f64,
    /// Both registers hold records, and they differ.
    pub disagreement: f64,
    /// At least one register still reads ready.
    pub ready_involved: f64,
}

impl RepeatOutcome {
    pub fn total(&self) -> f64 {
        self.agreement + self.disagreement + self.ready_involved
    }
}

impl ModelDims {
    /// S ⊗ A₁ ⊗ A₂.
    pub fn repeat_dims(&self) -> FactorDims {
        let n = self.outcomes();
        FactorDims::new(vec![n, n + 1, n + 1]).expect("checked in ModelDims::new")
    }
}

/// Runs the second stage on an explicit first-stage S ⊗ A₁ state, with A₂
/// prepared ready. Used directly for injected liar configurations.
pub fn run_second_stage(
    first_stage: &StateVector,
    second: &MeasurementUnitary,
) -> Result<(StateVector, RepeatOutcome)> {
    let dims = sa_model(first_stage)?;
    if dims != second.dims() {
        return Err(Error::Dimension {
            expected: second.dims().sa_dim(),
            actual: dims.sa_dim(),
        });
    }
    let ready = ApparatusPreparation::ready(dims.outcomes()).state(&dims)?;
    let joint = tensor_state(first_stage, &ready)?;
    let full = dims.repeat_dims();
    let u2 = lift(second.unitary(), &[0, 2], &full)?;
    let out = crate::tensor::apply(&u2, &joint)?;
    let outcome = classify_records(&out, &dims);
    Ok((out, outcome))
}

fn classify_records(psi: &StateVector, dims: &ModelDims) -> RepeatOutcome {
    let full = dims.repeat_dims();
    let mut outcome = RepeatOutcome {
        agreement: 0.0,
        disagreement: 0.0,
        ready_involved: 0.0,
    };
    for (flat, amp) in psi.amplitudes().iter().enumerate() {
        let labels = full.labels(flat);
        let p = amp.norm_sqr();
        match (labels[1], labels[2]) {
            (0, _) | (_, 0) => outcome.ready_involved += p,
            (a, b) if a == b => outcome.agreement += p,
            _ => outcome.disagreement += p,
        }
    }
    outcome
}

/// First measurement with `completion1` from `app1`, then an ideal-ready
/// second register measured with `completion2`.
pub fn run_repeat(
    n: usize,
    completion1: &CompletionSpec,
    completion2: &CompletionSpec,
    sys: &SystemPreparation,
    app1: &ApparatusPreparation,
) -> Result<RepeatOutcome> {
    let first = MeasurementUnitary::build(n, completion1)?;
    let second = MeasurementUnitary::build(n, completion2)?;
    let stage1 = premeasure(&first, sys, app1)?;
    run_second_stage(&stage1, &second).map(|(_, outcome)| outcome)
}

/// Disagreement probability of the repeat protocol and the liar weight of the
/// first-stage state, both with pointer-shift completions.
pub fn detection_equivalence(
    n: usize,
    sys: &SystemPreparation,
    app1: &ApparatusPreparation,
) -> Result<(f64, f64)> {
    let m = MeasurementUnitary::build(n, &CompletionSpec::PointerShift)?;
    let stage1 = premeasure(&m, sys, app1)?;
    let liar = liar_weight(&stage1)?;
    let (_, outcome) = run_second_stage(&stage1, &m)?;
    Ok((outcome.disagreement, liar))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{tensor_op, LinearOperator};

    #[test]
    fn ideal_repeat_agrees() {
        let ps = CompletionSpec::PointerShift;
        let out = run_repeat(
            3,
            &ps,
            &ps,
            &SystemPreparation::uniform(3),
            &ApparatusPreparation::ready(3),
        )
        .unwrap();
        assert!((out.agreement - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn injected_liar_is_revealed() {
        let dims = ModelDims::new(2).unwrap();
        // System |o₂⟩, register A₁ already showing record 1.
        let stage1 = StateVector::basis(dims.sa_dims(), &[1, 1]).unwrap();
        let m = MeasurementUnitary::build(2, &CompletionSpec::PointerShift).unwrap();
        let (out, outcome) = run_second_stage(&stage1, &m).unwrap();
        assert_eq!(outcome.disagreement, 1.0);
        // The second register reads o₂.
        assert_eq!(out.amplitude(&[1, 1, 2]).unwrap().re, 1.0);
    }

    #[test]
    fn perturbed_first_stage() {
        let eps: f64 = 0.3;
        let ps = CompletionSpec::PointerShift;
        let app = ApparatusPreparation::perturbed(2, 1, eps).unwrap();
        let out = run_repeat(2, &ps, &ps, &SystemPreparation::uniform(2), &app).unwrap();
        assert!((out.disagreement - eps * eps / 2.0).abs() <= 1e-12);
        assert!((out.ready_involved - eps * eps / 2.0).abs() <= 1e-12);
        assert!((out.total() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn detection_examples() {
        let (d, l) = detection_equivalence(
            2,
            &SystemPreparation::uniform(2),
            &ApparatusPreparation::ready(2),
        )
        .unwrap();
        assert_eq!((d, l), (0.0, 0.0));

        let app = ApparatusPreparation::perturbed(2, 1, 0.3).unwrap();
        let (d, l) = detection_equivalence(2, &SystemPreparation::uniform(2), &app).unwrap();
        assert!((d - 0.045).abs() <= 1e-12 && (l - 0.045).abs() <= 1e-12);

        let app = ApparatusPreparation::perturbed(3, 1, 0.5).unwrap();
        let (d, l) = detection_equivalence(3, &SystemPreparation::eigenstate(3, 1), &app).unwrap();
        assert!((d - 0.25).abs() <= 1e-12 && (l - 0.25).abs() <= 1e-12);
    }

    #[test]
    fn spectator_lift_order_is_immaterial() {
        // Lifting onto (S, A₂) directly equals swapping A₁ ↔ A₂ around U ⊗ I.
        let n = 2;
        let m = MeasurementUnitary::build(n, &CompletionSpec::HaarRandom { seed: 3 }).unwrap();
        let dims = ModelDims::new(n).unwrap();
        let full = dims.repeat_dims();
        let direct = lift(m.unitary(), &[0, 2], &full).unwrap();
        let kron = tensor_op(m.unitary(), &LinearOperator::identity(n + 1)).unwrap();
        let swap_images: Vec<usize> = (0..full.total())
            .map(|f| {
                let l = full.labels(f);
                crate::tensor::basis_index(&[l[0], l[2], l[1]], &full).unwrap()
            })
            .collect();
        let swap = LinearOperator::from_permutation(&swap_images);
        let conj = swap.matmul(&kron).unwrap().matmul(&swap).unwrap();
        assert!(direct.max_abs_diff(&conj).unwrap() <= 1e-15);
    }

    #[test]
    fn model_errors_surface() {
        let ps = CompletionSpec::PointerShift;
        let err = run_repeat(
            1,
            &ps,
            &ps,
            &SystemPreparation::eigenstate(1, 1),
            &ApparatusPreparation::ready(1),
        );
        assert!(matches!(err, Err(Error::Model(_))));
    }
}
