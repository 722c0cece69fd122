//! Completions of a partially specified unitary.
//!
//! A calibration constraint fixes the image of a few basis kets. Everything
//! else about the operator is a free choice; this module builds the choices
//! the crate supports: explicit permutations of the basis and Haar-random
//! unitaries between the orthogonal complements of the fixed domain and image.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{LinearOperator, UnitaryOperator};

/// How a measurement or environment unitary is extended off its calibration subspace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CompletionSpec {
    /// Modular pointer shift controlled by the system (or record) label.
    PointerShift,
    /// An explicit basis permutation, given as flat index images.
    Permutation { table: PermutationTable },
    /// Haar-distributed unitary on the complement, expanded from a 64-bit seed.
    HaarRandom { seed: u64 },
    /// A unitary supplied directly by the caller; calibration is checked on use.
    Explicit,
}

impl CompletionSpec {
    pub fn name(&self) -> &'static str {
        match self {
            CompletionSpec::PointerShift => "pointer_shift",
            CompletionSpec::Permutation { .. } => "permutation",
            CompletionSpec::HaarRandom { .. } => "haar_random",
            CompletionSpec::Explicit => "explicit",
        }
    }
}

/// A map on flat basis indices: basis ket `c` goes to basis ket `images[c]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PermutationTable {
    images: Vec<usize>,
}

impl PermutationTable {
    pub fn from_images(images: Vec<usize>) -> Self {
        Self { images }
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// Checks that the table is a bijection on `0..dim` and fixes every
    /// `(column, row)` calibration pair.
    pub fn validate(&self, dim: usize, calibration: &[(usize, usize)]) -> Result<()> {
        if self.images.len() != dim {
            return Err(Error::Completion(format!(
                "table has {} entries, expected {dim}",
                self.images.len()
            )));
        }
        let mut hit = vec![None; dim];
        for (src, &dst) in self.images.iter().enumerate() {
            if dst >= dim {
                return Err(Error::Completion(format!(
                    "image {dst} of {src} is out of range"
                )));
            }
            if let Some(prev) = hit[dst] {
                return Err(Error::Completion(format!(
                    "not a bijection: {prev} and {src} both map to {dst}"
                )));
            }
            hit[dst] = Some(src);
        }
        for &(col, row) in calibration {
            if self.images[col] != row {
                return Err(Error::Calibration {
                    residual: 2f64.sqrt(),
                });
            }
        }
        Ok(())
    }

    pub(crate) fn to_unitary(&self) -> UnitaryOperator {
        UnitaryOperator::from_permutation(&self.images)
    }
}

/// Haar-random `dim × dim` unitary.
///
/// Draws a complex Ginibre matrix and orthonormalizes its columns with
/// modified Gram-Schmidt (two passes). The resulting `R` has a positive real
/// diagonal, which is the phase fix that makes `Q` Haar-distributed.
/// Returned row-major.
pub fn haar_unitary(dim: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(re * scale, im * scale)
                })
                .collect()
        })
        .collect();

    for j in 0..dim {
        let (done, rest) = cols.split_at_mut(j);
        let v = &mut rest[0];
        for _pass in 0..2 {
            for q in done.iter() {
                let proj: Complex64 = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                for (x, a) in v.iter_mut().zip(q) {
                    *x -= proj * a;
                }
            }
        }
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for x in v.iter_mut() {
            *x /= norm;
        }
    }

    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (c, col) in cols.iter().enumerate() {
        for (r, &x) in col.iter().enumerate() {
            out[r * dim + c] = x;
        }
    }
    out
}

/// The counter-based generator used for every seeded completion.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Unitary that maps each calibration column exactly onto its row and acts as
/// a Haar-random unitary from the complement of the calibration domain onto
/// the complement of the calibration image. Complement bases are the unused
/// basis kets in ascending order.
pub fn haar_completion(
    dim: usize,
    calibration: &[(usize, usize)],
    seed: u64,
) -> Result<UnitaryOperator> {
    let mut in_domain = vec![false; dim];
    let mut in_image = vec![false; dim];
    for &(col, row) in calibration {
        if col >= dim || row >= dim || in_domain[col] || in_image[row] {
            return Err(Error::Completion(format!(
                "calibration pair ({col}, {row}) is invalid"
            )));
        }
        in_domain[col] = true;
        in_image[row] = true;
    }
    let domain: Vec<usize> = (0..dim).filter(|&c| !in_domain[c]).collect();
    let image: Vec<usize> = (0..dim).filter(|&r| !in_image[r]).collect();
    debug_assert_eq!(domain.len(), image.len());

    let m = domain.len();
    let q = haar_unitary(m, &mut seeded_rng(seed));
    let mut op = LinearOperator::zeros(dim);
    for &(col, row) in calibration {
        op.set(row, col, Complex64::new(1.0, 0.0));
    }
    for (a, &row) in image.iter().enumerate() {
        for (b, &col) in domain.iter().enumerate() {
            op.set(row, col, q[a * m + b]);
        }
    }
    UnitaryOperator::new(op)
}
