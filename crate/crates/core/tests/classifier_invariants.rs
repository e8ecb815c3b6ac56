use cohortweigh::classifiers::{
    fit, predict, predict_table, ClassifierKind, ClassifierSpec, Fitted, Model,
};
use cohortweigh::dataio::Cell;
use cohortweigh::synth::{generate, SynthSpec};

fn cohort(n: usize, seed: u64) -> cohortweigh::dataio::Table {
    generate(&SynthSpec::default_cohort(n, seed)).unwrap().table
}

#[test]
fn fitting_ignores_row_order() {
    let t = cohort(300, 1);
    let reversed = t.select_rows(&(0..t.n_rows()).rev().collect::<Vec<_>>());
    for spec in ClassifierSpec::all_defaults(4) {
        let a = predict_table(&fit(&spec, &t).unwrap(), &t).unwrap();
        let b = predict_table(&fit(&spec, &reversed).unwrap(), &t).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9, "{}: {x} vs {y}", spec.kind);
        }
    }
}

#[test]
fn one_hot_width_counts_levels() {
    let t = cohort(200, 2);
    let model = fit(&ClassifierSpec::new(ClassifierKind::Glm, 0), &t).unwrap();
    // five numerics, four binary categoricals and nine groups
    assert_eq!(model.input_width(), 4 + 4 * 2 + 9);
}

#[test]
fn boosting_loss_never_increases() {
    let t = cohort(400, 3);
    let model = fit(&ClassifierSpec::new(ClassifierKind::Gbt, 0), &t).unwrap();
    let Fitted::Gbt(b) = &model.fitted else {
        panic!("wrong model kind")
    };
    let loss = b.train_loss();
    assert!(loss.len() > 1);
    for w in loss.windows(2) {
        assert!(w[1] <= w[0] + 1e-12, "{} -> {}", w[0], w[1]);
    }
}

#[test]
fn models_round_trip_through_json() {
    let t = cohort(250, 4);
    for spec in ClassifierSpec::all_defaults(1) {
        let model = fit(&spec, &t).unwrap();
        let back = Model::from_json(&model.to_json()).unwrap();
        assert_eq!(
            predict_table(&model, &t).unwrap(),
            predict_table(&back, &t).unwrap(),
            "{}",
            spec.kind
        );
    }
}

#[test]
fn unseen_levels_still_score() {
    let t = cohort(250, 5);
    for spec in ClassifierSpec::all_defaults(2) {
        let model = fit(&spec, &t).unwrap();
        let row: Vec<Cell> = model
            .feature_names()
            .iter()
            .map(|&n| match n {
                "ethnicity" => Cell::Cat("Unlisted".into()),
                _ => t.column(n).unwrap().cell(0),
            })
            .collect();
        let s = predict(&model, &row).unwrap();
        assert!((0.0..=1.0).contains(&s), "{}: {s}", spec.kind);
    }
}
