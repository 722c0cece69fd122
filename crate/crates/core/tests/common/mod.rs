//! Test-only brute-force oracle.
//!
//! States are maps from label tuples to amplitudes; operators are applied by
//! walking every basis ket. Labels: system `1..=n`, registers and environment
//! `0..=n`. Nothing here calls into the crate's tensor or analysis code; the
//! only shared inputs are raw matrix entries read through `entry`.

#![allow(dead_code)]

use std::collections::BTreeMap;

use liarlab::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type Ket = BTreeMap<Vec<usize>, Complex64>;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn add(ket: &mut Ket, labels: Vec<usize>, amp: Complex64) {
    *ket.entry(labels).or_insert(c(0.0)) += amp;
}

pub fn norm_sqr(ket: &Ket) -> f64 {
    ket.values().map(|a| a.norm_sqr()).sum()
}

/// Weight of all kets whose labels satisfy `pred`.
pub fn weight(ket: &Ket, pred: impl Fn(&[usize]) -> bool) -> f64 {
    ket.iter()
        .filter(|(l, _)| pred(l))
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

/// Applies the label map `f` to every ket (a permutation of the basis).
pub fn permute(ket: &Ket, f: impl Fn(&[usize]) -> Vec<usize>) -> Ket {
    let mut out = Ket::new();
    for (l, &a) in ket {
        add(&mut out, f(l), a);
    }
    out
}

/// `Σ_i g_i |o_i⟩ ⊗ (α|ready⟩ + Σ_k β_k |o_k⟩)`.
pub fn prepared(g: &[Complex64], alpha: Complex64, beta: &[Complex64]) -> Ket {
    let mut ket = Ket::new();
    for (i0, &gi) in g.iter().enumerate() {
        add(&mut ket, vec![i0 + 1, 0], gi * alpha);
        for (k0, &bk) in beta.iter().enumerate() {
            add(&mut ket, vec![i0 + 1, k0 + 1], gi * bk);
        }
    }
    ket
}

pub fn pointer_shift(n: usize) -> impl Fn(&[usize]) -> Vec<usize> {
    move |l| vec![l[0], (l[1] + l[0]) % (n + 1)]
}

pub fn env_shift(n: usize) -> impl Fn(&[usize]) -> Vec<usize> {
    move |l| vec![l[0], l[1], (l[2] + l[1]) % (n + 1)]
}

pub fn is_liar(l: &[usize]) -> bool {
    l[1] >= 1 && l[1] != l[0]
}

pub fn is_env_liar(l: &[usize]) -> bool {
    l[0] == l[1] && l[2] >= 1 && l[2] != l[0]
}

/// Record probabilities for labels `1..=n`, then the ready residual.
pub fn records(ket: &Ket, n: usize) -> (Vec<f64>, f64) {
    let per = (1..=n).map(|j| weight(ket, |l| l[1] == j)).collect();
    (per, weight(ket, |l| l[1] == 0))
}

pub fn born_tv(ket: &Ket, g: &[Complex64]) -> f64 {
    let n = g.len();
    let (per, ready) = records(ket, n);
    let spread: f64 = per
        .iter()
        .zip(g)
        .map(|(p, gi)| (p - gi.norm_sqr()).abs())
        .sum();
    0.5 * (spread + ready)
}

/// Appends an environment factor `Σ_m e_m |E_m⟩`.
pub fn with_env(ket: &Ket, e: &[Complex64]) -> Ket {
    let mut out = Ket::new();
    for (l, &a) in ket {
        for (m, &em) in e.iter().enumerate() {
            add(&mut out, vec![l[0], l[1], m], a * em);
        }
    }
    out
}

/// Appends a second register in the ready state.
pub fn with_ready_register(ket: &Ket) -> Ket {
    permute(ket, |l| vec![l[0], l[1], 0])
}

/// Reduced S ⊗ A density entries `ρ[(i,j),(i',j')] = Σ_m ψ(i,j,m) ψ*(i',j',m)`.
pub fn reduced_sa(ket: &Ket) -> BTreeMap<(Vec<usize>, Vec<usize>), Complex64> {
    let mut rho = BTreeMap::new();
    for (l, &a) in ket {
        for (l2, &b) in ket {
            if l[2] == l2[2] {
                *rho.entry((l[..2].to_vec(), l2[..2].to_vec()))
                    .or_insert(c(0.0)) += a * b.conj();
            }
        }
    }
    rho
}

pub fn off_diag_l1(rho: &BTreeMap<(Vec<usize>, Vec<usize>), Complex64>) -> f64 {
    rho.iter()
        .filter(|((r, col), _)| r != col)
        .map(|(_, v)| v.norm())
        .sum()
}

/// Flat row-major index of S ⊗ A labels, computed independently.
pub fn sa_flat(n: usize, i: usize, k: usize) -> usize {
    (i - 1) * (n + 1) + k
}

/// Liar budget of an arbitrary S ⊗ A matrix given by `entry(row, col)`.
pub fn liar_budget(n: usize, entry: impl Fn(usize, usize) -> Complex64) -> f64 {
    let mut total = 0.0;
    for i in 1..=n {
        for k in 1..=n {
            let col = sa_flat(n, i, k);
            for j in 1..=n {
                for m in 0..=n {
                    if is_liar(&[j, m]) {
                        total += entry(sa_flat(n, j, m), col).norm_sqr();
                    }
                }
            }
        }
    }
    total
}

/// Every bijection of `items`, in lexicographic index order.
pub fn permutations<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head.clone());
            out.push(tail);
        }
    }
    out
}

/// All 24 n = 2 completions that fix `(i, 0) ↦ (i, i)`, as label maps.
pub fn n2_completion_maps() -> Vec<BTreeMap<(usize, usize), (usize, usize)>> {
    let inputs = [(1, 1), (1, 2), (2, 1), (2, 2)];
    let outputs = [(1, 0), (1, 2), (2, 0), (2, 1)];
    permutations(&outputs)
        .into_iter()
        .map(|images| {
            let mut map: BTreeMap<_, _> = inputs.iter().copied().zip(images).collect();
            map.insert((1, 0), (1, 1));
            map.insert((2, 0), (2, 2));
            map
        })
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random unit vector with complex Gaussian entries.
pub fn random_unit(rng: &mut impl Rng, len: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..len)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / norm).collect()
}

/// Evenly spaced grid with `count` points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
        .collect()
}
