//! Evaluation and interpretation of trained classifiers: confusion
//! matrices across noise levels, the per-parameter sensitivity scan, and
//! ReliefF feature-relevance weights with the Chebyshev threshold.

mod confusion;
mod relieff;
mod sensitivity;

pub use confusion::{evaluate_confusion, ConfusionMatrix};
pub use relieff::{relieff, relieff_threshold, relieff_weights, ReliefFResult, DEFAULT_ALPHA, DEFAULT_K};
pub use sensitivity::{
    comparability_divisor, scan_from_mean, sensitivity_a, sensitivity_k, sensitivity_scan,
    sensitivity_table, step_magnitude, ClassSensitivity, Saturation, SensitivityResult,
    SensitivityScan, SENSITIVITY_STEPS,
};
