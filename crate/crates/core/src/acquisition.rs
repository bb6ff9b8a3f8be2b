//! Simulated acquisition chain: decimation with sampling jitter, spectral
//! deformation, random amplitude scaling, random DC offset, and additive
//! white Gaussian noise.
//!
//! Every stage is a pure function of its inputs and an explicit RNG
//! stream, so dataset generation parallelizes deterministically with one
//! stream per element (see [`crate::rng`]).

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::SampledSignal;
use crate::spectral::{apply_deformation, FilterSpec};

/// Acquisition-noise parameters for one simulated measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Signal-to-noise ratio in dB relative to the peak amplitude;
    /// `+inf` disables the noise stage.
    pub snr_db: f64,
    /// Maximum relative amplitude reduction: scale drawn from
    /// `[1 - scale_max, 1]`.
    #[serde(default = "default_scale_max")]
    pub scale_max: f64,
    /// Maximum relative DC offset: offset drawn from
    /// `[-offset_max, +offset_max] * max|signal|`.
    #[serde(default = "default_offset_max")]
    pub offset_max: f64,
    /// Maximum sampling jitter, in ideal samples.
    #[serde(default = "default_jitter_max")]
    pub jitter_max: usize,
    /// Decimation factor M.
    #[serde(default = "default_decimation")]
    pub decimation: usize,
    /// Draw a fresh jitter per output sample instead of one start-phase
    /// offset per acquisition.
    #[serde(default)]
    pub jitter_per_sample: bool,
    /// Deform the ideal full-resolution signal before decimating, instead
    /// of deforming the decimated signal.
    #[serde(default)]
    pub deform_before_decimation: bool,
}

fn default_scale_max() -> f64 {
    0.75
}
fn default_offset_max() -> f64 {
    0.05
}
fn default_jitter_max() -> usize {
    9
}
fn default_decimation() -> usize {
    10
}

impl NoiseSpec {
    /// The standard acquisition-noise levels at a given SNR.
    pub fn standard(snr_db: f64) -> Self {
        Self {
            snr_db,
            scale_max: default_scale_max(),
            offset_max: default_offset_max(),
            jitter_max: default_jitter_max(),
            decimation: default_decimation(),
            jitter_per_sample: false,
            deform_before_decimation: false,
        }
    }

    /// All randomness disabled; only the deterministic decimation remains.
    pub fn clean() -> Self {
        Self {
            snr_db: f64::INFINITY,
            scale_max: 0.0,
            offset_max: 0.0,
            jitter_max: 0,
            decimation: default_decimation(),
            jitter_per_sample: false,
            deform_before_decimation: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.snr_db.is_nan() || self.snr_db == f64::NEG_INFINITY {
            return Err(Error::Parameter(format!("snr_db must be finite or +inf, got {}", self.snr_db)));
        }
        if !self.scale_max.is_finite() || !(0.0..1.0).contains(&self.scale_max) {
            return Err(Error::Parameter(format!(
                "scale_max must be in [0, 1), got {}",
                self.scale_max
            )));
        }
        if !self.offset_max.is_finite() || !(0.0..1.0).contains(&self.offset_max) {
            return Err(Error::Parameter(format!(
                "offset_max must be in [0, 1), got {}",
                self.offset_max
            )));
        }
        if self.decimation == 0 {
            return Err(Error::Parameter("decimation factor must be positive".into()));
        }
        if self.jitter_max >= self.decimation {
            return Err(Error::Parameter(format!(
                "jitter_max ({}) must be smaller than the decimation factor ({})",
                self.jitter_max, self.decimation
            )));
        }
        Ok(())
    }
}

/// Keep every M-th sample, starting at a uniform-random jitter offset in
/// `[0, jitter_max]`. One offset is drawn per acquisition by default; the
/// per-sample mode re-draws for every output sample. The trailing
/// `len mod M` samples are truncated; sample spacing grows by M.
pub fn decimate_with_jitter(
    signal: &SampledSignal,
    spec: &NoiseSpec,
    rng: &mut impl Rng,
) -> Result<SampledSignal> {
    spec.validate()?;
    let m = spec.decimation;
    let count = signal.len() / m;
    if count < 2 {
        return Err(Error::InvalidSignal(format!(
            "decimating {} samples by {m} leaves fewer than 2",
            signal.len()
        )));
    }
    let samples: Vec<f64> = if spec.jitter_per_sample {
        (0..count).map(|k| signal.samples()[k * m + rng.random_range(0..=spec.jitter_max)]).collect()
    } else {
        let j = rng.random_range(0..=spec.jitter_max);
        (0..count).map(|k| signal.samples()[k * m + j]).collect()
    };
    SampledSignal::new(samples, (count - 1) as f64 * m as f64 * signal.dt())
}

/// Multiply the whole waveform by a scale drawn uniformly from
/// `[1 - scale_max, 1]`.
pub fn random_scale(signal: &SampledSignal, spec: &NoiseSpec, rng: &mut impl Rng) -> SampledSignal {
    let s = rng.random_range(1.0 - spec.scale_max..=1.0);
    let samples = signal.samples().iter().map(|v| v * s).collect();
    SampledSignal::new(samples, signal.duration()).expect("scaling preserves validity")
}

/// Add a DC level drawn uniformly from
/// `[-offset_max, +offset_max] * max|signal|`.
pub fn random_offset(signal: &SampledSignal, spec: &NoiseSpec, rng: &mut impl Rng) -> SampledSignal {
    let bound = spec.offset_max * signal.max_abs();
    let b = rng.random_range(-bound..=bound);
    let samples = signal.samples().iter().map(|v| v + b).collect();
    SampledSignal::new(samples, signal.duration()).expect("offset preserves validity")
}

/// Add i.i.d. zero-mean Gaussian noise with
/// `sigma_N = max|signal| * 10^(-snr_db / 20)`.
pub fn add_awgn(signal: &SampledSignal, spec: &NoiseSpec, rng: &mut impl Rng) -> Result<SampledSignal> {
    if spec.snr_db == f64::INFINITY {
        return Ok(signal.clone());
    }
    let peak = signal.max_abs();
    if peak == 0.0 {
        return Err(Error::InvalidSignal(
            "SNR is undefined for an all-zero signal".into(),
        ));
    }
    let sigma = peak * 10f64.powf(-spec.snr_db / 20.0);
    let normal = Normal::new(0.0, sigma).expect("sigma is positive and finite");
    let samples = signal.samples().iter().map(|v| v + normal.sample(rng)).collect();
    SampledSignal::new(samples, signal.duration())
}

/// Stage order of the acquisition block diagram.
pub const STAGE_ORDER: [&str; 5] =
    ["decimate_with_jitter", "apply_deformation", "random_scale", "random_offset", "add_awgn"];

/// Run the full acquisition chain on an ideal pulse, producing one
/// simulated "real" measurement.
pub fn simulate_acquisition(
    ideal: &SampledSignal,
    filter: &FilterSpec,
    spec: &NoiseSpec,
    rng: &mut impl Rng,
) -> Result<SampledSignal> {
    simulate_acquisition_traced(ideal, filter, spec, rng, &mut Vec::new())
}

/// Same chain, appending each executed stage name to `trace` for audit.
pub fn simulate_acquisition_traced(
    ideal: &SampledSignal,
    filter: &FilterSpec,
    spec: &NoiseSpec,
    rng: &mut impl Rng,
    trace: &mut Vec<&'static str>,
) -> Result<SampledSignal> {
    spec.validate()?;
    let deformed_then_decimated;
    if spec.deform_before_decimation {
        trace.push("apply_deformation");
        let deformed = apply_deformation(ideal, filter)?;
        trace.push("decimate_with_jitter");
        deformed_then_decimated = decimate_with_jitter(&deformed, spec, rng)?;
    } else {
        trace.push("decimate_with_jitter");
        let decimated = decimate_with_jitter(ideal, spec, rng)?;
        trace.push("apply_deformation");
        deformed_then_decimated = apply_deformation(&decimated, filter)?;
    }
    trace.push("random_scale");
    let scaled = random_scale(&deformed_then_decimated, spec, rng);
    trace.push("random_offset");
    let offset = random_offset(&scaled, spec, rng);
    trace.push("add_awgn");
    add_awgn(&offset, spec, rng)
}
