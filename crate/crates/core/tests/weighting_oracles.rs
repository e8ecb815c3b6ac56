mod common;

use std::collections::BTreeMap;

use cohortweigh::weighting::{
    rank_attributes, weight_chi_squared, weight_gini_index, weight_information_gain, weight_relief,
    weight_rule, weight_uncertainty,
};
use common::*;
use proptest::prelude::*;

fn dataset() -> impl Strategy<Value = (Vec<String>, Vec<bool>)> {
    (2usize..40).prop_flat_map(|n| {
        (
            proptest::collection::vec(0u8..5, n),
            proptest::collection::vec(any::<bool>(), n),
        )
            .prop_map(|(codes, labels)| {
                (codes.iter().map(|c| format!("level{c}")).collect(), labels)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn categorical_weights_match_brute_force((values, labels) in dataset()) {
        prop_assume!(labels.iter().any(|&b| b) && labels.iter().any(|&b| !b));
        let t = table(vec![Col::Cat("a", values.clone())], &labels);
        let want = brute_force(&values, &labels);
        prop_assert!((weight_information_gain(&t, "a", None).unwrap() - want.information_gain).abs() < 1e-9);
        prop_assert!((weight_gini_index(&t, "a", None).unwrap() - want.gini_reduction).abs() < 1e-9);
        prop_assert!((weight_uncertainty(&t, "a", None).unwrap() - want.symmetrical_uncertainty).abs() < 1e-9);
        prop_assert!((weight_chi_squared(&t, "a", None).unwrap() - want.chi_squared).abs() < 1e-9);
        prop_assert!((weight_rule(&t, "a", None).unwrap() - want.one_rule_accuracy).abs() < 1e-9);
    }

    #[test]
    fn weights_ignore_row_order((values, labels) in dataset(), shift in 0usize..40) {
        prop_assume!(labels.iter().any(|&b| b) && labels.iter().any(|&b| !b));
        let n = values.len();
        let s = shift % n;
        let rv: Vec<String> = (0..n).map(|i| values[(i + s) % n].clone()).collect();
        let rl: Vec<bool> = (0..n).map(|i| labels[(i + s) % n]).collect();
        let a = table(vec![Col::Cat("a", values)], &labels);
        let b = table(vec![Col::Cat("a", rv)], &rl);
        prop_assert!((weight_information_gain(&a, "a", None).unwrap() - weight_information_gain(&b, "a", None).unwrap()).abs() < 1e-12);
        prop_assert!((weight_chi_squared(&a, "a", None).unwrap() - weight_chi_squared(&b, "a", None).unwrap()).abs() < 1e-9);
    }
}

#[test]
fn relief_matches_reference_on_mixed_data() {
    let mut rng = Lcg::new(5);
    let n = 60;
    let labels: Vec<bool> = (0..n).map(|_| rng.unit() < 0.5).collect();
    let num = vec![
        labels
            .iter()
            .map(|&y| rng.unit() + if y { 0.4 } else { 0.0 })
            .collect::<Vec<_>>(),
        (0..n).map(|_| rng.unit() * 50.0).collect(),
    ];
    let cat = vec![(0..n)
        .map(|i| format!("c{}", (i + rng.below(2)) % 3))
        .collect::<Vec<_>>()];
    let t = table(
        vec![
            Col::Num("x0", num[0].clone()),
            Col::Num("x1", num[1].clone()),
            Col::Cat("k", cat[0].clone()),
        ],
        &labels,
    );
    for k in [1, 4, 10] {
        let got = weight_relief(&t, k).unwrap();
        let (wn, wc) = relief_reference(&num, &cat, &labels, k);
        assert!((got["x0"] - wn[0]).abs() < 1e-9, "k={k}");
        assert!((got["x1"] - wn[1]).abs() < 1e-9, "k={k}");
        assert!((got["k"] - wc[0]).abs() < 1e-9, "k={k}");
    }
}

#[test]
fn published_untied_weights_reproduce_published_ranks() {
    // columns of the weights table map onto rank columns 0, 1, 4, 5
    for (w_col, r_col) in [(0, 0), (1, 1), (2, 4), (3, 5)] {
        let weights: BTreeMap<String, f64> = TABLE1_UNTIED_WEIGHTS
            .iter()
            .map(|(a, w)| (a.to_string(), w[w_col]))
            .collect();
        let ranks = rank_attributes(&weights).unwrap();
        for (attr, published) in TABLE1_RANKS {
            assert_eq!(ranks[attr], published[r_col], "{attr}, column {r_col}");
        }
    }
}
