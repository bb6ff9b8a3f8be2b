//! Regression tests against golden files produced once by the
//! independent straight-line reference script in `tests/golden/`
//! (`make_golden.py`). The files are committed; the script documents
//! how to regenerate them.

use std::path::PathBuf;

use essc_core::essc::{extract_features, ExtractionConfig, FeatureMode};
use essc_core::signal::SampledSignal;
use essc_core::spectral::{FilterKind, FilterSpec};

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn read_golden(name: &str) -> String {
    std::fs::read_to_string(golden_path(name))
        .unwrap_or_else(|e| panic!("cannot read golden file {name}: {e}"))
}

/// The six distinct gain profiles used across the three family banks,
/// keyed by the labels in `filter_gains.csv`.
fn labeled_filters() -> Vec<(&'static str, FilterSpec)> {
    let gstop = |nu_c| FilterSpec {
        class_id: 2,
        kind: FilterKind::GaussianStop { nu_c, sigma_nu: 2.0, delta_a: 0.4 },
    };
    let lp = |nu_c| FilterSpec { class_id: 4, kind: FilterKind::LowPass { nu_c, slew_rate: 0.5 } };
    vec![
        ("gstop_nu0", gstop(0.0)),
        ("gstop_nu3", gstop(3.0)),
        ("lp_nu2", lp(2.0)),
        ("lp_nu3", lp(3.0)),
        ("lp_nu4", lp(4.0)),
        ("lp_nu5", lp(5.0)),
    ]
}

#[test]
fn filter_gains_match_golden_curves() {
    let text = read_golden("filter_gains.csv");
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("label,nu,gain"));

    let prepared: Vec<_> = labeled_filters()
        .into_iter()
        .map(|(label, spec)| (label, spec.prepare().unwrap()))
        .collect();

    let mut rows_per_label = std::collections::HashMap::new();
    for line in lines {
        let mut parts = line.splitn(3, ',');
        let label = parts.next().unwrap();
        let nu: f64 = parts.next().unwrap().parse().unwrap();
        let expected: f64 = parts.next().unwrap().parse().unwrap();
        let (_, gain) = prepared
            .iter()
            .find(|(l, _)| *l == label)
            .unwrap_or_else(|| panic!("unknown filter label {label}"));
        let got = gain.at(nu);
        assert!(
            (got - expected).abs() < 1e-12,
            "{label} at nu={nu}: got {got}, golden {expected}"
        );
        *rows_per_label.entry(label.to_string()).or_insert(0usize) += 1;
    }
    assert_eq!(rows_per_label.len(), 6);
    assert!(rows_per_label.values().all(|&n| n == 401));
}

fn fixture_signal() -> SampledSignal {
    let samples: Vec<f64> = read_golden("fixture_waveform.csv")
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    SampledSignal::new(samples, 1.0).unwrap()
}

#[test]
fn fixture_features_match_golden_vector() {
    let text = read_golden("fixture_features.csv");
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("name,value"));
    let golden: Vec<(String, f64)> = lines
        .map(|l| {
            let (name, value) = l.split_once(',').unwrap();
            (name.to_string(), value.parse().unwrap())
        })
        .collect();
    assert_eq!(golden.len(), 30);

    let config = ExtractionConfig::default();
    let features = extract_features(&fixture_signal(), FeatureMode::Essc30, &config).unwrap();
    let names = FeatureMode::Essc30.feature_names();
    assert_eq!(names, golden.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>());

    for ((name, expected), got) in golden.iter().zip(features.values()) {
        let scale = expected.abs().max(1.0);
        assert!(
            (got - expected).abs() / scale < 1e-10,
            "{name}: got {got}, golden {expected}"
        );
    }
}

#[test]
fn fixture_ssc_projection_matches_golden_head() {
    let config = ExtractionConfig::default();
    let ssc = extract_features(&fixture_signal(), FeatureMode::Ssc4, &config).unwrap();
    let golden: Vec<f64> = read_golden("fixture_features.csv")
        .lines()
        .skip(1)
        .take(4)
        .map(|l| l.split_once(',').unwrap().1.parse().unwrap())
        .collect();
    for (got, expected) in ssc.values().iter().zip(&golden) {
        assert!((got - expected).abs() < 1e-10, "got {got}, golden {expected}");
    }
}
