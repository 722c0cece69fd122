//! Dense complex linear algebra over ordered tensor products of small factors.
//!
//! Flattening is row-major over the factor order: the last factor varies
//! fastest, so `idx = Σ_f label_f · stride_f` with `stride_f` the product of
//! the dimensions after `f`. Every module in the crate shares this convention
//! with the factor order system, apparatus [, second apparatus] [, environment].

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest total dimension any state or operator may have.
pub const DIM_CAP: usize = 1_000_000;

/// Tolerance for unitarity, hermiticity, idempotence and normalization checks.
pub const UNITARY_TOL: f64 = 1e-10;

/// Floor applied to density operator eigenvalues to absorb round-off.
pub const EIGEN_FLOOR: f64 = -1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FactorDims {
    dims: Vec<usize>,
    total: usize,
}

impl FactorDims {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Argument("at least one factor is required".into()));
        }
        if let Some(f) = dims.iter().position(|&d| d == 0) {
            return Err(Error::Argument(format!("factor {f} has dimension 0")));
        }
        let mut total: usize = 1;
        for &d in &dims {
            total = match total.checked_mul(d) {
                Some(t) if t <= DIM_CAP => t,
                _ => {
                    return Err(Error::Capacity {
                        requested: dims.iter().fold(1usize, |a, &d| a.saturating_mul(d)),
                        cap: DIM_CAP,
                    })
                }
            };
        }
        Ok(Self { dims, total })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// Product of all factor dimensions.
    pub fn total(&self) -> usize {
        self.total
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for f in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[f] = strides[f + 1] * self.dims[f + 1];
        }
        strides
    }

    /// Per-factor labels of a flat index.
    pub fn labels(&self, mut flat: usize) -> Vec<usize> {
        debug_assert!(flat < self.total);
        let mut labels = vec![0; self.dims.len()];
        for f in (0..self.dims.len()).rev() {
            labels[f] = flat % self.dims[f];
            flat /= self.dims[f];
        }
        labels
    }

    pub fn concat(&self, other: &FactorDims) -> Result<FactorDims> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        FactorDims::new(dims)
    }
}

/// Row-major flat index of per-factor `labels`.
pub fn basis_index(labels: &[usize], dims: &FactorDims) -> Result<usize> {
    if labels.len() != dims.len() {
        return Err(Error::Dimension {
            expected: dims.len(),
            actual: labels.len(),
        });
    }
    let mut idx = 0;
    for (factor, (&label, &dim)) in labels.iter().zip(dims.dims()).enumerate() {
        if label >= dim {
            return Err(Error::Index { factor, label, dim });
        }
        idx = idx * dim + label;
    }
    Ok(idx)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    dims: FactorDims,
    amplitudes: Vec<Complex64>,
    normalized: bool,
}

impl StateVector {
    pub fn new(dims: FactorDims, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != dims.total() {
            return Err(Error::Dimension {
                expected: dims.total(),
                actual: amplitudes.len(),
            });
        }
        if amplitudes
            .iter()
            .any(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(Error::Argument("amplitudes must be finite".into()));
        }
        let normalized = (norm(&amplitudes) - 1.0).abs() <= UNITARY_TOL;
        Ok(Self {
            dims,
            amplitudes,
            normalized,
        })
    }

    /// The computational basis ket with the given per-factor labels.
    pub fn basis(dims: FactorDims, labels: &[usize]) -> Result<Self> {
        let idx = basis_index(labels, &dims)?;
        let mut amplitudes = vec![ZERO; dims.total()];
        amplitudes[idx] = ONE;
        Ok(Self {
            dims,
            amplitudes,
            normalized: true,
        })
    }

    pub fn dims(&self) -> &FactorDims {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn amplitude(&self, labels: &[usize]) -> Result<Complex64> {
        Ok(self.amplitudes[basis_index(labels, &self.dims)?])
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    /// Whether `|‖ψ‖ − 1| ≤ 1e-10`.
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        check_dim(self.dims.total(), other.dims.total())?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        check_dim(self.dims.total(), other.dims.total())?;
        Ok(max_abs_diff(&self.amplitudes, &other.amplitudes))
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::Dimension { expected, actual })
    }
}

/// Square complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearOperator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl LinearOperator {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Argument(
                "operator dimension must be positive".into(),
            ));
        }
        if dim > DIM_CAP {
            return Err(Error::Capacity {
                requested: dim,
                cap: DIM_CAP,
            });
        }
        check_dim(dim * dim, entries.len())?;
        if entries
            .iter()
            .any(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(Error::Operator("entries must be finite".into()));
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for i in 0..dim {
            op.entries[i * dim + i] = ONE;
        }
        op
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                entries.push(f(r, c));
            }
        }
        Self { dim, entries }
    }

    /// Matrix sending basis ket `c` to basis ket `images[c]`.
    ///
    /// `images` must be a permutation of `0..images.len()`; this is not checked.
    pub(crate) fn from_permutation(images: &[usize]) -> Self {
        let dim = images.len();
        let mut op = Self::zeros(dim);
        for (c, &r) in images.iter().enumerate() {
            op.entries[r * dim + c] = ONE;
        }
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub(crate) fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn column(&self, col: usize) -> Vec<Complex64> {
        (0..self.dim).map(|r| self.get(r, col)).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self.get(c, r).conj())
    }

    pub fn matmul(&self, other: &LinearOperator) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for r in 0..n {
            let row = &self.entries[r * n..(r + 1) * n];
            let dst = &mut out[r * n..(r + 1) * n];
            for (k, &a) in row.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let src = &other.entries[k * n..(k + 1) * n];
                for (d, &b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        Ok(Self {
            dim: n,
            entries: out,
        })
    }

    pub fn max_abs_diff(&self, other: &LinearOperator) -> Result<f64> {
        check_dim(self.dim, other.dim)?;
        Ok(max_abs_diff(&self.entries, &other.entries))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `‖A† − A‖_max`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.dim {
            for c in r..self.dim {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// `‖A†A − I‖_max`, computed column by column.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim;
        let cols: Vec<Vec<Complex64>> = (0..n).map(|c| self.column(c)).collect();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in a..n {
                let dot: Complex64 = cols[a]
                    .iter()
                    .zip(&cols[b])
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let target = if a == b { ONE } else { ZERO };
                worst = worst.max((dot - target).norm());
            }
        }
        worst
    }

    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.entries)
    }
}

/// A [`LinearOperator`] certified unitary to [`UNITARY_TOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryOperator(LinearOperator);

impl UnitaryOperator {
    pub fn new(op: LinearOperator) -> Result<Self> {
        let defect = op.unitarity_defect();
        if defect > UNITARY_TOL {
            return Err(Error::Operator(format!(
                "not unitary: ‖U†U − I‖_max = {defect:e}"
            )));
        }
        Ok(Self(op))
    }

    pub fn identity(dim: usize) -> Self {
        Self(LinearOperator::identity(dim))
    }

    /// Wraps an operator that is unitary by construction (permutation matrices).
    pub(crate) fn from_permutation(images: &[usize]) -> Self {
        Self(LinearOperator::from_permutation(images))
    }

    pub fn as_operator(&self) -> &LinearOperator {
        &self.0
    }

    pub fn into_operator(self) -> LinearOperator {
        self.0
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        apply(&self.0, psi)
    }
}

impl std::ops::Deref for UnitaryOperator {
    type Target = LinearOperator;

    fn deref(&self) -> &LinearOperator {
        &self.0
    }
}

/// An orthogonal projector: Hermitian and idempotent to [`UNITARY_TOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct Projector(LinearOperator);

impl Projector {
    pub fn new(op: LinearOperator) -> Result<Self> {
        let herm = op.hermiticity_defect();
        if herm > UNITARY_TOL {
            return Err(Error::Operator(format!(
                "projector not Hermitian: {herm:e}"
            )));
        }
        let idem = op.matmul(&op)?.max_abs_diff(&op)?;
        if idem > UNITARY_TOL {
            return Err(Error::Operator(format!(
                "projector not idempotent: {idem:e}"
            )));
        }
        Ok(Self(op))
    }

    /// Diagonal projector onto the span of the listed basis kets.
    pub fn onto_basis(dim: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut op = LinearOperator::zeros(dim);
        for i in indices {
            if i >= dim {
                return Err(Error::Index {
                    factor: 0,
                    label: i,
                    dim,
                });
            }
            op.set(i, i, ONE);
        }
        Ok(Self(op))
    }

    /// `I − P`.
    pub fn complement(&self) -> Self {
        let n = self.0.dim;
        Self(LinearOperator::from_fn(n, |r, c| {
            let id = if r == c { ONE } else { ZERO };
            id - self.0.get(r, c)
        }))
    }

    pub fn rank(&self) -> f64 {
        self.0.trace().re
    }

    pub fn as_operator(&self) -> &LinearOperator {
        &self.0
    }
}

/// A density operator: Hermitian, unit trace, eigenvalues above [`EIGEN_FLOOR`].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator(LinearOperator);

impl DensityOperator {
    pub fn new(op: LinearOperator) -> Result<Self> {
        let rho = Self(op);
        rho.validate()?;
        Ok(rho)
    }

    pub fn validate(&self) -> Result<()> {
        let herm = self.0.hermiticity_defect();
        if herm > UNITARY_TOL {
            return Err(Error::Operator(format!("density not Hermitian: {herm:e}")));
        }
        let tr = self.0.trace();
        if (tr - ONE).norm() > UNITARY_TOL {
            return Err(Error::Operator(format!("density trace {tr} is not 1")));
        }
        let min = self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < EIGEN_FLOOR {
            return Err(Error::Operator(format!("density has eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn as_operator(&self) -> &LinearOperator {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0.get(row, col)
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// Eigenvalues in ascending order from a Hermitian eigen-solve.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .0
            .to_nalgebra()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// `tr(ρ²)`, which for Hermitian ρ is the squared Frobenius norm.
    pub fn purity(&self) -> f64 {
        self.0.entries.iter().map(|a| a.norm_sqr()).sum()
    }
}

pub fn tensor_state(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    let dims = a.dims.concat(&b.dims)?;
    let mut amplitudes = Vec::with_capacity(dims.total());
    for x in &a.amplitudes {
        for y in &b.amplitudes {
            amplitudes.push(x * y);
        }
    }
    StateVector::new(dims, amplitudes)
}

/// Kronecker product `A ⊗ B`.
pub fn tensor_op(a: &LinearOperator, b: &LinearOperator) -> Result<LinearOperator> {
    let dim = a
        .dim
        .checked_mul(b.dim)
        .filter(|&d| d <= DIM_CAP)
        .ok_or(Error::Capacity {
            requested: a.dim.saturating_mul(b.dim),
            cap: DIM_CAP,
        })?;
    Ok(LinearOperator::from_fn(dim, |r, c| {
        a.get(r / b.dim, c / b.dim) * b.get(r % b.dim, c % b.dim)
    }))
}

pub fn apply(op: &LinearOperator, psi: &StateVector) -> Result<StateVector> {
    let n = op.dim;
    check_dim(n, psi.dims.total())?;
    let amplitudes = (0..n)
        .map(|r| {
            op.entries[r * n..(r + 1) * n]
                .iter()
                .zip(&psi.amplitudes)
                .map(|(a, b)| a * b)
                .sum()
        })
        .collect();
    StateVector::new(psi.dims.clone(), amplitudes)
}

/// `‖Pψ‖²`, clamped to `[0, 1]`.
pub fn project_weight(p: &Projector, psi: &StateVector) -> Result<f64> {
    let projected = apply(&p.0, psi)?;
    let w = projected.norm().powi(2);
    Ok(w.clamp(0.0, 1.0))
}

/// Reduced density operator over the factors at positions `keep`.
///
/// Kept factors appear in ascending position order. The trace equals `‖ψ‖²`;
/// the result is only a valid [`DensityOperator`] when `psi` is normalized,
/// and no validation is performed here.
pub fn partial_trace(psi: &StateVector, keep: &[usize]) -> Result<DensityOperator> {
    if keep.is_empty() {
        return Err(Error::Argument(
            "partial trace needs at least one kept factor".into(),
        ));
    }
    let nf = psi.dims.len();
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(&bad) = kept.iter().find(|&&f| f >= nf) {
        return Err(Error::Argument(format!(
            "factor position {bad} out of range for {nf} factors"
        )));
    }
    let dims = psi.dims.dims();
    let kept_dim: usize = kept.iter().map(|&f| dims[f]).product();
    let traced_dim = psi.dims.total() / kept_dim;

    // Rearrange ψ as a kept_dim × traced_dim matrix M, then ρ = M M†.
    let mut m = vec![ZERO; psi.dims.total()];
    for (flat, &amp) in psi.amplitudes.iter().enumerate() {
        let labels = psi.dims.labels(flat);
        let (mut k, mut t) = (0, 0);
        for (f, &l) in labels.iter().enumerate() {
            if kept.binary_search(&f).is_ok() {
                k = k * dims[f] + l;
            } else {
                t = t * dims[f] + l;
            }
        }
        m[k * traced_dim + t] = amp;
    }
    let rho = LinearOperator::from_fn(kept_dim, |r, c| {
        let row_r = &m[r * traced_dim..(r + 1) * traced_dim];
        let row_c = &m[c * traced_dim..(c + 1) * traced_dim];
        row_r.iter().zip(row_c).map(|(a, b)| a * b.conj()).sum()
    });
    Ok(DensityOperator(rho))
}

/// Embeds `op`, acting on the factors at `targets` (in that order), into the
/// full space described by `dims`, with identity on every other factor.
pub fn lift(op: &LinearOperator, targets: &[usize], dims: &FactorDims) -> Result<LinearOperator> {
    let nf = dims.len();
    let mut seen = vec![false; nf];
    for &t in targets {
        if t >= nf || seen[t] {
            return Err(Error::Argument(format!("invalid target factor {t}")));
        }
        seen[t] = true;
    }
    let target_dim: usize = targets.iter().map(|&t| dims.dims()[t]).product();
    check_dim(target_dim, op.dim)?;
    let target_dims = FactorDims::new(targets.iter().map(|&t| dims.dims()[t]).collect())?;

    let total = dims.total();
    let mut out = LinearOperator::zeros(total);
    for c in 0..total {
        let col_labels = dims.labels(c);
        let sub: Vec<usize> = targets.iter().map(|&t| col_labels[t]).collect();
        let ct = basis_index(&sub, &target_dims)?;
        let mut row_labels = col_labels.clone();
        for rt in 0..target_dim {
            let v = op.get(rt, ct);
            if v == ZERO {
                continue;
            }
            for (&t, l) in targets.iter().zip(target_dims.labels(rt)) {
                row_labels[t] = l;
            }
            let r = basis_index(&row_labels, dims)?;
            out.set(r, c, v);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dims(d: &[usize]) -> FactorDims {
        FactorDims::new(d.to_vec()).unwrap()
    }

    #[test]
    fn basis_index_examples() {
        assert_eq!(basis_index(&[0, 0], &dims(&[2, 3])).unwrap(), 0);
        assert_eq!(basis_index(&[1, 2], &dims(&[2, 3])).unwrap(), 5);
        assert_eq!(basis_index(&[1, 0, 2], &dims(&[2, 3, 3])).unwrap(), 11);
        assert!(matches!(
            basis_index(&[2, 0], &dims(&[2, 3])),
            Err(Error::Index {
                factor: 0,
                label: 2,
                dim: 2
            })
        ));
    }

    #[test]
    fn labels_invert_basis_index() {
        let d = dims(&[2, 3, 4]);
        for flat in 0..d.total() {
            assert_eq!(basis_index(&d.labels(flat), &d).unwrap(), flat);
        }
        assert_eq!(d.strides(), vec![12, 4, 1]);
    }

    #[test]
    fn capacity_cap_enforced() {
        assert!(matches!(
            FactorDims::new(vec![1000, 1001]),
            Err(Error::Capacity { .. })
        ));
        assert!(FactorDims::new(vec![1000, 1000]).is_ok());
        assert!(FactorDims::new(vec![2, 0]).is_err());
        let a = StateVector::basis(dims(&[1000]), &[0]).unwrap();
        let b = StateVector::basis(dims(&[1001]), &[0]).unwrap();
        assert!(matches!(tensor_state(&a, &b), Err(Error::Capacity { .. })));
    }

    #[test]
    fn tensor_state_examples() {
        let zero = StateVector::basis(dims(&[2]), &[0]).unwrap();
        let one = StateVector::basis(dims(&[2]), &[1]).unwrap();
        let t = tensor_state(&zero, &one).unwrap();
        assert_eq!(
            t.amplitudes(),
            &[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]
        );

        let (g1, g2) = (c(0.6, 0.0), c(0.0, 0.8));
        let sys = StateVector::new(dims(&[2]), vec![g1, g2]).unwrap();
        let ready = StateVector::basis(dims(&[3]), &[0]).unwrap();
        let t = tensor_state(&sys, &ready).unwrap();
        assert_eq!(t.dims().dims(), &[2, 3]);
        let zero = c(0., 0.);
        assert_eq!(t.amplitudes(), &[g1, zero, zero, g2, zero, zero]);
    }

    #[test]
    fn identity_kron_identity() {
        let i6 = tensor_op(&LinearOperator::identity(2), &LinearOperator::identity(3)).unwrap();
        assert_eq!(i6, LinearOperator::identity(6));
    }

    #[test]
    fn permutation_kron_permutation_is_permutation() {
        let p = LinearOperator::from_permutation(&[1, 2, 0]);
        let q = LinearOperator::from_permutation(&[1, 0]);
        let pq = tensor_op(&p, &q).unwrap();
        // Brute-force column scan: each column and row holds exactly one 1.
        for col in 0..6 {
            let ones = (0..6).filter(|&r| pq.get(r, col) == ONE).count();
            let zeros = (0..6).filter(|&r| pq.get(r, col) == ZERO).count();
            assert_eq!((ones, zeros), (1, 5));
        }
        for row in 0..6 {
            assert_eq!((0..6).filter(|&c| pq.get(row, c) == ONE).count(), 1);
        }
    }

    #[test]
    fn apply_dimension_mismatch() {
        let psi = StateVector::basis(dims(&[3]), &[0]).unwrap();
        assert!(matches!(
            apply(&LinearOperator::identity(2), &psi),
            Err(Error::Dimension {
                expected: 2,
                actual: 3
            })
        ));
    }

    #[test]
    fn project_weight_examples() {
        let d = dims(&[2, 3]);
        let psi = StateVector::basis(d.clone(), &[0, 2]).unwrap();
        let id = Projector::onto_basis(6, 0..6).unwrap();
        let zero = Projector::onto_basis(6, []).unwrap();
        let rank1 = Projector::onto_basis(6, [basis_index(&[0, 2], &d).unwrap()]).unwrap();
        assert_eq!(project_weight(&id, &psi).unwrap(), 1.0);
        assert_eq!(project_weight(&zero, &psi).unwrap(), 0.0);
        assert_eq!(project_weight(&rank1, &psi).unwrap(), 1.0);
    }

    #[test]
    fn projector_rejects_non_idempotent() {
        let op = LinearOperator::from_fn(2, |_, _| c(1.0, 0.0));
        assert!(Projector::new(op).is_err());
        let half = LinearOperator::from_fn(2, |_, _| c(0.5, 0.0));
        assert!(Projector::new(half).is_ok());
    }

    #[test]
    fn unitary_rejects_non_unitary() {
        let mut op = LinearOperator::identity(3);
        op.set(0, 0, c(0.5, 0.0));
        assert!(UnitaryOperator::new(op).is_err());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let had = LinearOperator::new(2, vec![c(h, 0.), c(h, 0.), c(h, 0.), c(-h, 0.)]).unwrap();
        assert!(UnitaryOperator::new(had).is_ok());
    }

    #[test]
    fn operator_rejects_nan() {
        assert!(LinearOperator::new(1, vec![c(f64::NAN, 0.0)]).is_err());
        assert!(LinearOperator::new(2, vec![ONE; 3]).is_err());
    }

    #[test]
    fn partial_trace_product_state() {
        let a = StateVector::new(dims(&[2]), vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let b = StateVector::new(dims(&[3]), vec![c(0.0, 0.0), c(0.8, 0.0), c(0.6, 0.0)]).unwrap();
        let rho = partial_trace(&tensor_state(&a, &b).unwrap(), &[0]).unwrap();
        rho.validate().unwrap();
        for r in 0..2 {
            for col in 0..2 {
                let want = a.amplitudes()[r] * a.amplitudes()[col].conj();
                assert!((rho.get(r, col) - want).norm() < 1e-15);
            }
        }
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_bell_state() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = StateVector::new(dims(&[2, 2]), vec![c(h, 0.), ZERO, ZERO, c(h, 0.)]).unwrap();
        let rho = partial_trace(&bell, &[0]).unwrap();
        assert!((rho.get(0, 0).re - 0.5).abs() < 1e-15);
        assert!((rho.get(1, 1).re - 0.5).abs() < 1e-15);
        assert_eq!(rho.get(0, 1), ZERO);
        let ev = rho.eigenvalues();
        assert!((ev[0] - 0.5).abs() < 1e-12 && (ev[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_rejects_empty_keep() {
        let psi = StateVector::basis(dims(&[2, 2]), &[0, 0]).unwrap();
        assert!(matches!(partial_trace(&psi, &[]), Err(Error::Argument(_))));
        assert!(partial_trace(&psi, &[2]).is_err());
    }

    #[test]
    fn partial_trace_all_factors_is_pure_projector() {
        let psi = StateVector::new(
            dims(&[2, 2]),
            vec![c(0.5, 0.0), c(0.0, 0.5), c(-0.5, 0.0), c(0.5, 0.0)],
        )
        .unwrap();
        let ev = partial_trace(&psi, &[0, 1]).unwrap().eigenvalues();
        assert!((ev[3] - 1.0).abs() < 1e-10);
        for e in &ev[..3] {
            assert!(e.abs() < 1e-10);
        }
    }

    #[test]
    fn density_rejects_negative_eigenvalue() {
        let op = LinearOperator::new(2, vec![c(1.5, 0.), ZERO, ZERO, c(-0.5, 0.)]).unwrap();
        assert!(DensityOperator::new(op).is_err());
    }

    #[test]
    fn lift_matches_kron_with_identity() {
        let u = LinearOperator::from_permutation(&[2, 0, 1]);
        let d = dims(&[3, 2]);
        let lifted = lift(&u, &[0], &d).unwrap();
        let kron = tensor_op(&u, &LinearOperator::identity(2)).unwrap();
        assert_eq!(lifted, kron);
        let lifted = lift(&u, &[1], &dims(&[2, 3])).unwrap();
        let kron = tensor_op(&LinearOperator::identity(2), &u).unwrap();
        assert_eq!(lifted, kron);
    }
}
