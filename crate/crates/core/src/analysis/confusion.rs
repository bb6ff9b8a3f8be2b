//! Confusion matrices: classify a labeled test set and count output
//! classes per target class.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ann::{classify, MlpModel, SelectionRule};
use crate::dataset::FeatureDataset;
use crate::error::{Error, Result};
use crate::essc::FeatureMode;
use crate::spectral::NUM_CLASSES;

/// Counts of output class (columns) per target class (rows), plus the
/// noise level and feature mode the test set was built with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    counts: [[u64; NUM_CLASSES]; NUM_CLASSES],
    pub snr_db: f64,
    pub mode: FeatureMode,
}

impl ConfusionMatrix {
    /// Count at 1-based (target, output) class ids.
    pub fn count(&self, target: u8, output: u8) -> u64 {
        self.counts[target as usize - 1][output as usize - 1]
    }

    pub fn counts(&self) -> &[[u64; NUM_CLASSES]; NUM_CLASSES] {
        &self.counts
    }

    /// Number of test elements of one target class.
    pub fn row_sum(&self, target: u8) -> u64 {
        self.counts[target as usize - 1].iter().sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Fraction classified correctly.
    pub fn accuracy(&self) -> f64 {
        let trace: u64 = (0..NUM_CLASSES).map(|i| self.counts[i][i]).sum();
        trace as f64 / self.total() as f64
    }

    /// Combined confusion between two classes, both directions.
    pub fn off_diagonal_pair(&self, a: u8, b: u8) -> u64 {
        self.count(a, b) + self.count(b, a)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("target_class");
        for c in 1..=NUM_CLASSES {
            out.push_str(&format!(",out_{c}"));
        }
        out.push('\n');
        for (i, row) in self.counts.iter().enumerate() {
            out.push_str(&(i + 1).to_string());
            for v in row {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }
}

/// Classify every element of a labeled test set and accumulate counts.
pub fn evaluate_confusion(
    model: &MlpModel,
    dataset: &FeatureDataset,
    snr_db: f64,
    rule: SelectionRule,
    rng: &mut impl Rng,
) -> Result<ConfusionMatrix> {
    if dataset.mode().feature_count() != model.n_in() {
        return Err(Error::Shape(format!(
            "model takes {} inputs but the {} dataset has {}",
            model.n_in(),
            dataset.mode(),
            dataset.mode().feature_count()
        )));
    }
    let mut counts = [[0u64; NUM_CLASSES]; NUM_CLASSES];
    for (row, &target) in dataset.features().rows().into_iter().zip(dataset.labels()) {
        let output = classify(model, row.as_slice().expect("contiguous row"), rule, rng)?;
        counts[target as usize - 1][output as usize - 1] += 1;
    }
    Ok(ConfusionMatrix { counts, snr_db, mode: dataset.mode() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ann::{FeatureNorm, MlpParams};
    use crate::rng::{derive_stream, StreamDomain};
    use ndarray::{Array1, Array2};

    fn fixture_rng(index: u32) -> impl Rng {
        derive_stream(3, StreamDomain::Fixture, 6, index)
    }

    fn uniform_model(n_in: usize) -> MlpModel {
        MlpModel {
            params: MlpParams {
                w1: Array2::zeros((5, n_in)),
                b1: Array1::zeros(5),
                w2: Array2::zeros((NUM_CLASSES, 5)),
                b2: Array1::zeros(NUM_CLASSES),
            },
            norm: FeatureNorm { mean: vec![0.0; n_in], std: vec![1.0; n_in] },
        }
    }

    /// Model that routes the first 5 features straight to the outputs,
    /// so a one-hot row is classified as its hot index.
    fn indicator_model() -> MlpModel {
        let mut model = uniform_model(30);
        for h in 0..5 {
            model.params.w1[(h, h)] = 10.0;
            model.params.w2[(h, h)] = 10.0;
        }
        model
    }

    /// `per_class` one-hot rows per class, 30 columns wide.
    fn one_hot_dataset(per_class: usize) -> FeatureDataset {
        let mut features = Array2::zeros((5 * per_class, 30));
        let mut labels = Vec::new();
        for c in 0..5 {
            for i in 0..per_class {
                features[(c * per_class + i, c)] = 1.0;
                labels.push(c as u8 + 1);
            }
        }
        FeatureDataset::new(FeatureMode::Essc30, features, labels).unwrap()
    }

    #[test]
    fn oracle_model_yields_a_diagonal_matrix() {
        let dataset = one_hot_dataset(40);
        let cm = evaluate_confusion(
            &indicator_model(),
            &dataset,
            25.0,
            SelectionRule::Argmax,
            &mut fixture_rng(0),
        )
        .unwrap();
        for t in 1..=5u8 {
            for o in 1..=5u8 {
                assert_eq!(cm.count(t, o), if t == o { 40 } else { 0 });
            }
        }
        assert_eq!(cm.accuracy(), 1.0);
        assert_eq!(cm.total(), 200);
    }

    #[test]
    fn uniform_model_spreads_counts_binomially() {
        let dataset = one_hot_dataset(1000);
        let cm = evaluate_confusion(
            &uniform_model(30),
            &dataset,
            25.0,
            SelectionRule::WeightedRandom,
            &mut fixture_rng(1),
        )
        .unwrap();
        // each row is multinomial(1000, uniform); chi-square with
        // 5 rows x 4 df = 20 df, critical value 37.566 at the 1% level
        let mut chi2 = 0.0;
        for t in 1..=5u8 {
            assert_eq!(cm.row_sum(t), 1000);
            for o in 1..=5u8 {
                let diff = cm.count(t, o) as f64 - 200.0;
                chi2 += diff * diff / 200.0;
            }
        }
        assert!(chi2 < 37.566, "chi-square {chi2}");
    }

    #[test]
    fn row_sums_match_per_class_counts_for_any_model() {
        let dataset = one_hot_dataset(17);
        let mut skewed = indicator_model();
        skewed.params.b2[3] = 2.5;
        let cm = evaluate_confusion(
            &skewed,
            &dataset,
            10.0,
            SelectionRule::WeightedRandom,
            &mut fixture_rng(2),
        )
        .unwrap();
        for t in 1..=5u8 {
            assert_eq!(cm.row_sum(t), 17);
        }
    }

    #[test]
    fn mode_mismatch_is_rejected() {
        let features = Array2::zeros((5, 4));
        let dataset =
            FeatureDataset::new(FeatureMode::Ssc4, features, vec![1, 2, 3, 4, 5]).unwrap();
        let err = evaluate_confusion(
            &uniform_model(30),
            &dataset,
            25.0,
            SelectionRule::Argmax,
            &mut fixture_rng(3),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Shape(_)));
    }

    #[test]
    fn csv_lists_one_row_per_target_class() {
        let dataset = one_hot_dataset(3);
        let cm = evaluate_confusion(
            &indicator_model(),
            &dataset,
            20.0,
            SelectionRule::Argmax,
            &mut fixture_rng(4),
        )
        .unwrap();
        let csv = cm.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "target_class,out_1,out_2,out_3,out_4,out_5");
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[1], "1,3,0,0,0,0");
        assert_eq!(cm.off_diagonal_pair(1, 2), 0);
    }
}
