mod common;

use common::{c, is_env_liar, is_liar, liar_budget as oracle_budget, n2_completion_maps, sa_flat};
use liarlab::completion::CompletionSpec;
use liarlab::decoherence::{env_liar_budget, EnvironmentUnitary};
use liarlab::liar::liar_budget;
use liarlab::measurement::{
    build_permutation, classify_completion, permutation_table, Classification,
};

#[test]
fn all_n2_permutation_completions_generate_liars() {
    let maps = n2_completion_maps();
    assert_eq!(maps.len(), 24);
    for map in maps {
        let table = permutation_table(2, |i, k| map[&(i, k)]).unwrap();
        let m = build_permutation(2, &table).unwrap();
        let report = classify_completion(&m).unwrap();
        assert_eq!(report.classification, Classification::LiarGenerating);

        // Brute-force projector oracle straight from the label map.
        let liar: f64 = map
            .iter()
            .filter(|((_, k), _)| *k >= 1)
            .filter(|(_, &(j, mm))| is_liar(&[j, mm]))
            .count() as f64;
        assert_eq!(report.total_liar, liar);
        assert_eq!(liar_budget(&m).unwrap(), 2.0);
        for w in &report.columns {
            assert_eq!(w.coupling, 0.0);
            assert_eq!(w.coupling + w.liar + w.ready, 1.0);
        }
        let via_matrix = oracle_budget(2, |r, col| m.unitary().get(r, col));
        assert_eq!(via_matrix, 2.0);
    }
}

#[test]
fn permutation_matrices_match_label_maps() {
    for map in n2_completion_maps() {
        let table = permutation_table(2, |i, k| map[&(i, k)]).unwrap();
        let m = build_permutation(2, &table).unwrap();
        for (&(i, k), &(j, mm)) in &map {
            for row in 0..6 {
                let want = if row == sa_flat(2, j, mm) {
                    c(1.0)
                } else {
                    c(0.0)
                };
                assert_eq!(m.unitary().get(row, sa_flat(2, i, k)), want);
            }
        }
    }
}

/// Environment budget against a label-enumeration oracle over the columns
/// `|o_i, a_i, E_m⟩`, `m ≥ 1`. Not fixed a priori: only n columns are calibrated.
#[test]
fn env_budget_matches_oracle() {
    for n in 2..=3 {
        for spec in [
            CompletionSpec::PointerShift,
            CompletionSpec::HaarRandom { seed: 31 },
        ] {
            let e = EnvironmentUnitary::build(n, &spec).unwrap();
            let flat = |i: usize, j: usize, m: usize| ((i - 1) * (n + 1) + j) * (n + 1) + m;
            let mut oracle = 0.0;
            for i in 1..=n {
                for m in 1..=n {
                    for a in 1..=n {
                        for b in 0..=n {
                            for x in 0..=n {
                                if is_env_liar(&[a, b, x]) {
                                    oracle +=
                                        e.unitary().get(flat(a, b, x), flat(i, i, m)).norm_sqr();
                                }
                            }
                        }
                    }
                }
            }
            let budget = env_liar_budget(&e).unwrap();
            assert!(
                (budget - oracle).abs() <= 1e-12,
                "n={n} {spec:?}: {budget} vs {oracle}"
            );
            if spec == CompletionSpec::PointerShift {
                assert_eq!(budget, (n * (n - 1)) as f64);
            }
        }
    }
}
