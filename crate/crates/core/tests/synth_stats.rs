use cohortweigh::synth::{generate, SynthSpec, DEFAULT_GROUP_SHARES};

#[test]
fn group_counts_fit_normalized_shares() {
    let n = 4000;
    let cohort = generate(&SynthSpec::default_cohort(n, 21)).unwrap();
    let total: f64 = DEFAULT_GROUP_SHARES.iter().map(|(_, s)| s).sum();
    let mut chi2 = 0.0;
    for (name, share) in DEFAULT_GROUP_SHARES {
        let expected = n as f64 * share / total;
        let observed = cohort.truth.group_counts.get(name).copied().unwrap_or(0) as f64;
        chi2 += (observed - expected).powi(2) / expected;
    }
    // 8 degrees of freedom, upper 0.1% point
    assert!(chi2 < 26.12, "chi-squared {chi2}");

    let p = 50.0 / total;
    let expected = n as f64 * p;
    let sd = (n as f64 * p * (1.0 - p)).sqrt();
    let fars = cohort.truth.group_counts["Fars"] as f64;
    assert!(
        (fars - expected).abs() <= 3.0 * sd,
        "Fars {fars}, expected {expected:.0} +- {:.0}",
        3.0 * sd
    );
}

#[test]
fn numeric_features_follow_their_moments() {
    let cohort = generate(&SynthSpec::default_cohort(5000, 3)).unwrap();
    for (name, mean, sd) in [("age", 50.0, 8.0), ("WC", 95.0, 12.0), ("LDL", 110.0, 35.0)] {
        let v = cohort.table.column(name).unwrap().as_numeric().unwrap();
        let m = v.iter().sum::<f64>() / v.len() as f64;
        let s = (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt();
        assert!(
            (m - mean).abs() < 4.0 * sd / (v.len() as f64).sqrt(),
            "{name} mean {m}"
        );
        assert!((s / sd - 1.0).abs() < 0.05, "{name} sd {s}");
    }
}

#[test]
fn realized_prevalence_tracks_target() {
    for seed in 0..3 {
        let cohort = generate(&SynthSpec::default_cohort(2000, seed)).unwrap();
        let pos = cohort.table.positive_count() as f64 / 2000.0;
        assert!((pos - 0.64).abs() < 0.04, "seed {seed}: {pos}");
        assert_eq!(pos, cohort.truth.realized_prevalence);
    }
}

#[test]
fn spec_json_round_trips_and_regenerates() {
    let spec = SynthSpec::linear_and_xor(300, 9);
    let back = SynthSpec::from_json(&spec.to_json()).unwrap();
    assert_eq!(spec, back);
    let a = generate(&spec).unwrap().table;
    let b = generate(&back).unwrap().table;
    assert_eq!(a.columns(), b.columns());
}
