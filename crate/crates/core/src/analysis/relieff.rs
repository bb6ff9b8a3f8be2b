//! Multiclass ReliefF feature-relevance weights (Kononenko
//! formulation): every instance contributes its K nearest hits
//! (negative) and, per other class, its K nearest misses weighted by the
//! class prior (positive). Distances are Manhattan over range-normalized
//! features; the relevance threshold is Chebyshev's `τ = 1/√(α m)`.

use ndarray::ArrayView2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::FeatureDataset;
use crate::error::{Error, Result};
use crate::essc::FeatureMode;

pub const DEFAULT_K: usize = 10;
pub const DEFAULT_ALPHA: f64 = 0.05;

/// Chebyshev relevance threshold `τ = 1/√(α m)`.
pub fn relieff_threshold(alpha: f64, m: usize) -> Result<f64> {
    if !alpha.is_finite() || alpha <= 0.0 || alpha >= 1.0 {
        return Err(Error::Parameter(format!("alpha must be in (0, 1), got {alpha}")));
    }
    if m == 0 {
        return Err(Error::Parameter("m must be at least 1".into()));
    }
    Ok(1.0 / (alpha * m as f64).sqrt())
}

/// ReliefF weights for an arbitrary labeled feature matrix. Every
/// instance is sampled (m = all rows); neighbor ties break by dataset
/// index. Constant columns weigh exactly 0.
pub fn relieff_weights(features: ArrayView2<'_, f64>, labels: &[u8], k: usize) -> Result<Vec<f64>> {
    let m = labels.len();
    if features.nrows() != m {
        return Err(Error::Dataset(format!(
            "{} feature rows but {} labels",
            features.nrows(),
            m
        )));
    }
    if k == 0 {
        return Err(Error::Parameter("k must be at least 1".into()));
    }
    let mut counts = [0usize; 256];
    for &c in labels {
        counts[c as usize] += 1;
    }
    for (c, &n) in counts.iter().enumerate() {
        if n > 0 && n < k + 1 {
            return Err(Error::Dataset(format!(
                "class {c} has {n} instances, needs at least {}",
                k + 1
            )));
        }
    }
    let priors: Vec<f64> = counts.iter().map(|&n| n as f64 / m as f64).collect();

    // range normalization; a zero range voids the feature's diffs
    let width = features.ncols();
    let mut scale = vec![0.0; width];
    for (a, s) in scale.iter_mut().enumerate() {
        let col = features.column(a);
        let (lo, hi) = col
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        if hi > lo {
            *s = 1.0 / (hi - lo);
        }
    }
    let normalized: Vec<Vec<f64>> = features
        .rows()
        .into_iter()
        .map(|row| row.iter().zip(&scale).map(|(v, s)| v * s).collect())
        .collect();

    let neighbor_order =
        |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));

    // per-instance contribution vectors, summed in index order so the
    // result does not depend on thread scheduling
    let contributions: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|i| {
            let own = labels[i] as usize;
            let mut buckets: [Vec<(f64, usize)>; 256] = std::array::from_fn(|_| Vec::new());
            for j in 0..m {
                if j == i {
                    continue;
                }
                let dist: f64 = normalized[i]
                    .iter()
                    .zip(&normalized[j])
                    .map(|(a, b)| (a - b).abs())
                    .sum();
                buckets[labels[j] as usize].push((dist, j));
            }
            let mut w = vec![0.0; width];
            for (class, bucket) in buckets.iter_mut().enumerate() {
                if bucket.is_empty() {
                    continue;
                }
                if bucket.len() > k {
                    bucket.select_nth_unstable_by(k - 1, neighbor_order);
                    bucket.truncate(k);
                }
                let factor = if class == own {
                    -1.0
                } else {
                    priors[class] / (1.0 - priors[own])
                };
                for &(_, j) in bucket.iter() {
                    for (a, wa) in w.iter_mut().enumerate() {
                        *wa += factor * (normalized[i][a] - normalized[j][a]).abs();
                    }
                }
            }
            w
        })
        .collect();

    let mut weights = vec![0.0; width];
    for contribution in contributions {
        for (w, c) in weights.iter_mut().zip(contribution) {
            *w += c;
        }
    }
    for w in &mut weights {
        *w /= (m * k) as f64;
    }
    Ok(weights)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliefFResult {
    pub weights: Vec<f64>,
    pub k_neighbors: usize,
    pub tau: f64,
    pub alpha: f64,
    pub m: usize,
    pub mode: FeatureMode,
}

impl ReliefFResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("feature,weight\n");
        for (name, w) in self.mode.feature_names().iter().zip(&self.weights) {
            out.push_str(&format!("{name},{w}\n"));
        }
        out.push_str(&format!("tau,{}\n", self.tau));
        out.push_str(&format!("alpha,{}\n", self.alpha));
        out.push_str(&format!("k_neighbors,{}\n", self.k_neighbors));
        out.push_str(&format!("m,{}\n", self.m));
        out
    }
}

/// ReliefF over a labeled dataset, with the threshold at the default
/// confidence level.
pub fn relieff(dataset: &FeatureDataset, k: usize) -> Result<ReliefFResult> {
    let weights = relieff_weights(dataset.features(), dataset.labels(), k)?;
    let m = dataset.len();
    Ok(ReliefFResult {
        weights,
        k_neighbors: k,
        tau: relieff_threshold(DEFAULT_ALPHA, m)?,
        alpha: DEFAULT_ALPHA,
        m,
        mode: dataset.mode(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{derive_stream, StreamDomain};
    use ndarray::Array2;
    use rand::Rng;

    /// Quadratic-time reference: explicit distance matrix on the raw
    /// features, full neighbor sort per class.
    fn relieff_reference(x: &Array2<f64>, labels: &[u8], k: usize) -> Vec<f64> {
        let m = labels.len();
        let width = x.ncols();
        let mut range = vec![0.0; width];
        for a in 0..width {
            let col: Vec<f64> = x.column(a).to_vec();
            let lo = col.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            range[a] = hi - lo;
        }
        let diff = |a: usize, i: usize, j: usize| -> f64 {
            if range[a] == 0.0 {
                0.0
            } else {
                (x[(i, a)] - x[(j, a)]).abs() / range[a]
            }
        };
        let mut dist = vec![vec![0.0; m]; m];
        for i in 0..m {
            for j in 0..m {
                dist[i][j] = (0..width).map(|a| diff(a, i, j)).sum();
            }
        }
        let classes: Vec<u8> = {
            let mut c: Vec<u8> = labels.to_vec();
            c.sort_unstable();
            c.dedup();
            c
        };
        let prior = |c: u8| labels.iter().filter(|&&l| l == c).count() as f64 / m as f64;

        let mut weights = vec![0.0; width];
        for i in 0..m {
            for &class in &classes {
                let mut neighbors: Vec<(f64, usize)> = (0..m)
                    .filter(|&j| j != i && labels[j] == class)
                    .map(|j| (dist[i][j], j))
                    .collect();
                neighbors.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                neighbors.truncate(k);
                let factor = if class == labels[i] {
                    -1.0
                } else {
                    prior(class) / (1.0 - prior(labels[i]))
                };
                for (_, j) in neighbors {
                    for (a, w) in weights.iter_mut().enumerate() {
                        *w += factor * diff(a, i, j);
                    }
                }
            }
        }
        for w in &mut weights {
            *w /= (m * k) as f64;
        }
        weights
    }

    fn random_set(rows: usize, width: usize, classes: u8, index: u32) -> (Array2<f64>, Vec<u8>) {
        let mut rng = derive_stream(13, StreamDomain::Fixture, 7, index);
        let mut x = Array2::zeros((rows, width));
        let mut labels = Vec::with_capacity(rows);
        for i in 0..rows {
            // balanced labels so every class clears the K+1 floor
            labels.push((i % classes as usize) as u8 + 1);
            for a in 0..width {
                x[(i, a)] = rng.random_range(-2.0..2.0);
            }
        }
        (x, labels)
    }

    #[test]
    fn threshold_formula_and_domain() {
        assert!((relieff_threshold(0.05, 5000).unwrap() - 0.0632).abs() < 1e-4);
        assert!((relieff_threshold(0.0012, 5000).unwrap() - 0.41).abs() < 1e-2);
        assert!(relieff_threshold(0.05, 100_000_000).unwrap() < 1e-3);
        assert!(relieff_threshold(0.0, 10).is_err());
        assert!(relieff_threshold(1.0, 10).is_err());
        assert!(relieff_threshold(0.05, 0).is_err());
    }

    #[test]
    fn perfect_binary_separator_weighs_one() {
        // 6 instances, 2 classes; feature 0 separates them exactly,
        // feature 1 is constant
        let x = Array2::from_shape_vec(
            (6, 2),
            vec![0.0, 7.0, 0.0, 7.0, 0.0, 7.0, 1.0, 7.0, 1.0, 7.0, 1.0, 7.0],
        )
        .unwrap();
        let labels = vec![1, 1, 1, 2, 2, 2];
        let w = relieff_weights(x.view(), &labels, 2).unwrap();
        assert!((w[0] - 1.0).abs() < 1e-12);
        assert_eq!(w[1], 0.0);
    }

    #[test]
    fn constant_feature_weighs_exactly_zero() {
        let (mut x, labels) = random_set(40, 4, 4, 0);
        for i in 0..40 {
            x[(i, 2)] = -3.25;
        }
        let w = relieff_weights(x.view(), &labels, 3).unwrap();
        assert_eq!(w[2], 0.0);
        assert!(w.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn matches_the_quadratic_reference() {
        for index in 0..12 {
            let rows = 24 + 8 * (index as usize % 5);
            let (x, labels) = random_set(rows, 5, 2 + (index % 3) as u8, index + 10);
            let fast = relieff_weights(x.view(), &labels, 3).unwrap();
            let slow = relieff_reference(&x, &labels, 3);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() < 1e-12, "fast {a} vs reference {b}");
            }
        }
    }

    #[test]
    fn weights_stay_in_the_relieff_range() {
        let (x, labels) = random_set(60, 6, 5, 30);
        let w = relieff_weights(x.view(), &labels, 4).unwrap();
        assert!(w.iter().all(|&v| (-1.0..=1.0).contains(&v)));
    }

    #[test]
    fn invariant_under_affine_feature_rescaling() {
        let (x, labels) = random_set(50, 4, 3, 40);
        let baseline = relieff_weights(x.view(), &labels, 3).unwrap();
        let mut rescaled = x.clone();
        for i in 0..50 {
            rescaled[(i, 1)] = 1000.0 * rescaled[(i, 1)] - 3.0;
        }
        let w = relieff_weights(rescaled.view(), &labels, 3).unwrap();
        for (a, b) in w.iter().zip(&baseline) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn small_classes_are_rejected() {
        let (x, mut labels) = random_set(20, 3, 2, 50);
        labels[0] = 3; // a 1-instance class
        assert!(matches!(
            relieff_weights(x.view(), &labels, 3).unwrap_err(),
            Error::Dataset(_)
        ));
    }

    #[test]
    fn dataset_wrapper_reports_threshold_and_counts() {
        let (x, labels) = random_set(50, 4, 5, 60);
        let ds = FeatureDataset::new(FeatureMode::Ssc4, x, labels).unwrap();
        let result = relieff(&ds, 3).unwrap();
        assert_eq!(result.m, 50);
        assert_eq!(result.k_neighbors, 3);
        assert!((result.tau - relieff_threshold(DEFAULT_ALPHA, 50).unwrap()).abs() < 1e-15);
        let csv = result.to_csv();
        assert_eq!(csv.lines().count(), 1 + 4 + 4);
        assert!(csv.starts_with("feature,weight\nsig_MT,"));
    }
}
