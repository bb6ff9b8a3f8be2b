//! Feature extraction: cleanup pipeline plus assembly of the
//! 30-parameter (or 4-parameter) statistical fingerprint.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::essc::cleanup::{detect_and_normalize, mean_filter, median_filter, offset_correction};
use crate::essc::extrema::{detect_extrema, SegmentSet};
use crate::essc::params::{amplitude_moments, ssc_params, time_cumulants, TimeWeight};
use crate::signal::SampledSignal;

/// Per-source parameter names, in schema order.
pub const PARAM_NAMES: [&str; 10] =
    ["MT", "DT", "MA", "DA", "Mf1", "Df2", "Df3", "Mt1", "Dt2", "Dt3"];

/// Waveform sources, in schema order: the signal, its derivative, its
/// integral.
pub const SOURCE_NAMES: [&str; 3] = ["sig", "der", "int"];

/// Which fingerprint variant to extract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FeatureMode {
    /// All 10 parameters on all 3 sources.
    #[default]
    Essc30,
    /// The 4 segment statistics of the signal only.
    Ssc4,
}

impl FeatureMode {
    pub fn feature_count(&self) -> usize {
        match self {
            FeatureMode::Essc30 => 30,
            FeatureMode::Ssc4 => 4,
        }
    }

    /// Column names in the fixed schema order (`sig_MT`, `sig_DT`, ...).
    pub fn feature_names(&self) -> Vec<String> {
        match self {
            FeatureMode::Essc30 => SOURCE_NAMES
                .iter()
                .flat_map(|src| PARAM_NAMES.iter().map(move |p| format!("{src}_{p}")))
                .collect(),
            FeatureMode::Ssc4 => {
                PARAM_NAMES[..4].iter().map(|p| format!("sig_{p}")).collect()
            }
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "essc30" | "essc" => Ok(FeatureMode::Essc30),
            "ssc4" | "ssc" => Ok(FeatureMode::Ssc4),
            other => Err(Error::Parameter(format!(
                "unknown feature mode '{other}' (expected essc30 or ssc4)"
            ))),
        }
    }
}

impl std::fmt::Display for FeatureMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FeatureMode::Essc30 => "essc30",
            FeatureMode::Ssc4 => "ssc4",
        })
    }
}

/// Cleanup and extraction knobs. The defaults are the standard pipeline:
/// median(41), mean(101), pooled 100-sample edge offset correction, 3%
/// detection threshold, median(21) on the derivative branch, signed time
/// weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtractionConfig {
    pub median_window: usize,
    pub mean_window: usize,
    pub edge_window: usize,
    pub threshold_frac: f64,
    pub derivative_median_window: usize,
    pub time_weight: TimeWeight,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        Self {
            median_window: 41,
            mean_window: 101,
            edge_window: 100,
            threshold_frac: 0.03,
            derivative_median_window: 21,
            time_weight: TimeWeight::Signed,
        }
    }
}

impl ExtractionConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, w) in [
            ("median_window", self.median_window),
            ("mean_window", self.mean_window),
            ("derivative_median_window", self.derivative_median_window),
        ] {
            if w == 0 || w % 2 == 0 {
                return Err(Error::Parameter(format!("{name} must be odd and positive, got {w}")));
            }
        }
        if self.edge_window == 0 {
            return Err(Error::Parameter("edge_window must be at least 1".into()));
        }
        if !self.threshold_frac.is_finite() || !(0.0..1.0).contains(&self.threshold_frac) {
            return Err(Error::Parameter(format!(
                "threshold_frac must be in [0, 1), got {}",
                self.threshold_frac
            )));
        }
        Ok(())
    }
}

/// One extracted fingerprint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EsscFeatures {
    mode: FeatureMode,
    values: Vec<f64>,
}

impl EsscFeatures {
    pub fn new(mode: FeatureMode, values: Vec<f64>) -> Result<Self> {
        if values.len() != mode.feature_count() {
            return Err(Error::Shape(format!(
                "{mode} features need {} values, got {}",
                mode.feature_count(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSignal(format!(
                "feature {} is not finite: {}",
                mode.feature_names()[i],
                values[i]
            )));
        }
        Ok(Self { mode, values })
    }

    pub fn mode(&self) -> FeatureMode {
        self.mode
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Run the cleanup pipeline on a raw acquired signal: median(41) →
/// mean(101) → offset correction → pulse detection and normalization.
pub fn clean_and_normalize(raw: &SampledSignal, config: &ExtractionConfig) -> Result<SampledSignal> {
    config.validate()?;
    let s = median_filter(raw, config.median_window)?;
    let s = mean_filter(&s, config.mean_window)?;
    let s = offset_correction(&s, config.edge_window)?;
    detect_and_normalize(&s, config.threshold_frac)
}

/// The ten parameters of one waveform, in schema order.
fn branch_params(signal: &SampledSignal, weight: TimeWeight) -> Result<[f64; 10]> {
    let extrema = detect_extrema(signal);
    let segments = SegmentSet::from_extrema(&extrema, signal)?;
    let ssc = ssc_params(&segments)?;
    let amp = amplitude_moments(signal);
    let time = time_cumulants(signal, weight)?;
    Ok([
        ssc.m_t, ssc.d_t, ssc.m_a, ssc.d_a, amp.m_f1, amp.d_f2, amp.d_f3, time.m_t1, time.d_t2,
        time.d_t3,
    ])
}

/// Extract features from a signal that is already cleaned and
/// normalized (time span `[0,1]`, peak magnitude 1).
pub fn extract_from_normalized(
    normalized: &SampledSignal,
    mode: FeatureMode,
    config: &ExtractionConfig,
) -> Result<EsscFeatures> {
    config.validate()?;
    let sig = branch_params(normalized, config.time_weight)?;
    if mode == FeatureMode::Ssc4 {
        return EsscFeatures::new(mode, sig[..4].to_vec());
    }

    let mut derivative = median_filter(&normalized.derivative(), config.derivative_median_window)?;
    derivative.normalize_peak()?;
    let der = branch_params(&derivative, config.time_weight)?;

    let mut integral = normalized.integral();
    integral.normalize_peak()?;
    let int = branch_params(&integral, config.time_weight)?;

    let mut values = Vec::with_capacity(30);
    values.extend_from_slice(&sig);
    values.extend_from_slice(&der);
    values.extend_from_slice(&int);
    EsscFeatures::new(mode, values)
}

/// Full extraction from a raw acquired signal: cleanup, then the
/// statistical fingerprint of the signal, its derivative (median-filtered
/// and peak-renormalized), and its integral (peak-renormalized).
pub fn extract_features(
    raw: &SampledSignal,
    mode: FeatureMode,
    config: &ExtractionConfig,
) -> Result<EsscFeatures> {
    let normalized = clean_and_normalize(raw, config)?;
    extract_from_normalized(&normalized, mode, config)
}
