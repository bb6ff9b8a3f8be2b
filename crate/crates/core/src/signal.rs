//! Sampled pulse waveforms and the analytic shapes used to generate them.
//!
//! A [`SampledSignal`] is a uniformly sampled real waveform on `[0, duration]`
//! with `t_n = n * duration / (resolution - 1)`. The discrete derivative and
//! inclusive running-sum integral defined here are the two companion
//! waveforms characterized alongside the signal itself.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A real waveform sampled uniformly on `[0, duration]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    samples: Vec<f64>,
    duration: f64,
}

impl SampledSignal {
    /// Wrap raw samples. Requires at least two finite samples and a
    /// positive, finite duration.
    pub fn new(samples: Vec<f64>, duration: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidSignal(format!(
                "need at least 2 samples, got {}",
                samples.len()
            )));
        }
        if !duration.is_finite() || duration <= 0.0 {
            return Err(Error::InvalidSignal(format!(
                "duration must be positive and finite, got {duration}"
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSignal(format!(
                "non-finite sample {} at index {i}",
                samples[i]
            )));
        }
        Ok(Self { samples, duration })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires >= 2 samples
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    /// Sample spacing `duration / (len - 1)`.
    pub fn dt(&self) -> f64 {
        self.duration / (self.samples.len() - 1) as f64
    }

    /// Time of sample `n`.
    pub fn time_at(&self, n: usize) -> f64 {
        n as f64 * self.duration / (self.samples.len() - 1) as f64
    }

    /// Largest absolute sample value.
    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Forward difference `f(t_{n+1}) - f(t_n)`, padded with a trailing
    /// zero so the result has the same length as the input.
    pub fn derivative(&self) -> Self {
        let mut out = Vec::with_capacity(self.samples.len());
        for w in self.samples.windows(2) {
            out.push(w[1] - w[0]);
        }
        out.push(0.0);
        Self { samples: out, duration: self.duration }
    }

    /// Inclusive running sum: `out[n] = sum(f[0..=n])`.
    pub fn integral(&self) -> Self {
        let mut acc = 0.0;
        let samples = self
            .samples
            .iter()
            .map(|v| {
                acc += v;
                acc
            })
            .collect();
        Self { samples, duration: self.duration }
    }

    /// Rescale samples in place so the peak magnitude is exactly 1.
    /// Errors on an all-zero waveform.
    pub fn normalize_peak(&mut self) -> Result<()> {
        let peak = self.max_abs();
        if peak == 0.0 {
            return Err(Error::InvalidSignal("cannot normalize all-zero signal".into()));
        }
        for v in &mut self.samples {
            *v /= peak;
        }
        Ok(())
    }

    /// Consume and return the raw sample vector.
    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}

/// Envelope applied to the chirp oscillation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChirpEnvelope {
    /// Raised-cosine (Hann) window, zero at both ends.
    RaisedCosine,
    /// No taper; the oscillation fills the full interval.
    Constant,
}

/// Analytic pulse shape, before sampling and peak normalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PulseShape {
    /// `sin(x)/x` with `x = 2 pi * bandwidth * (t - duration/2)`.
    Sinc { bandwidth: f64 },
    /// `exp(-(t - center)^2 / (2 sigma^2))`.
    Gaussian { center: f64, sigma: f64 },
    /// Linear frequency sweep from `nu_lo` to `nu_hi` under an envelope.
    Chirp { nu_lo: f64, nu_hi: f64, envelope: ChirpEnvelope },
}

/// The three pulse families an experiment runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseFamily {
    Sinc,
    Gaussian,
    Chirp,
}

impl PulseFamily {
    pub const ALL: [PulseFamily; 3] = [PulseFamily::Sinc, PulseFamily::Gaussian, PulseFamily::Chirp];

    pub fn name(&self) -> &'static str {
        match self {
            PulseFamily::Sinc => "sinc",
            PulseFamily::Gaussian => "gaussian",
            PulseFamily::Chirp => "chirp",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sinc" => Ok(PulseFamily::Sinc),
            "gaussian" | "gauss" => Ok(PulseFamily::Gaussian),
            "chirp" => Ok(PulseFamily::Chirp),
            other => Err(Error::Parameter(format!(
                "unknown pulse family '{other}' (expected sinc, gaussian, or chirp)"
            ))),
        }
    }
}

impl std::fmt::Display for PulseFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Full recipe for one reference pulse: shape plus sampling grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    pub shape: PulseShape,
    pub duration: f64,
    pub resolution: usize,
}

impl PulseSpec {
    /// Default high-resolution reference pulse for a family.
    pub fn default_for(family: PulseFamily) -> Self {
        let shape = match family {
            PulseFamily::Sinc => PulseShape::Sinc { bandwidth: 4.0 },
            PulseFamily::Gaussian => PulseShape::Gaussian { center: 0.5, sigma: 0.05 },
            PulseFamily::Chirp => PulseShape::Chirp {
                nu_lo: 2.0,
                nu_hi: 8.0,
                envelope: ChirpEnvelope::RaisedCosine,
            },
        };
        Self { shape, duration: 1.0, resolution: 10_000 }
    }

    /// Sample the shape on its grid and normalize the peak magnitude to 1.
    pub fn generate(&self) -> Result<SampledSignal> {
        if self.resolution < 2 {
            return Err(Error::Parameter(format!(
                "resolution must be at least 2, got {}",
                self.resolution
            )));
        }
        if !self.duration.is_finite() || self.duration <= 0.0 {
            return Err(Error::Parameter(format!(
                "duration must be positive and finite, got {}",
                self.duration
            )));
        }
        self.validate_shape()?;
        let n = self.resolution;
        let samples: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64 * self.duration / (n - 1) as f64;
                self.eval(t)
            })
            .collect();
        let mut signal = SampledSignal::new(samples, self.duration)?;
        signal.normalize_peak()?;
        Ok(signal)
    }

    fn validate_shape(&self) -> Result<()> {
        match self.shape {
            PulseShape::Sinc { bandwidth } if bandwidth <= 0.0 => Err(Error::Parameter(
                format!("sinc bandwidth must be positive, got {bandwidth}"),
            )),
            PulseShape::Gaussian { sigma, .. } if sigma <= 0.0 => Err(Error::Parameter(
                format!("gaussian sigma must be positive, got {sigma}"),
            )),
            PulseShape::Chirp { nu_lo, nu_hi, .. } if nu_lo < 0.0 || nu_hi <= nu_lo => {
                Err(Error::Parameter(format!(
                    "chirp sweep must satisfy 0 <= nu_lo < nu_hi, got [{nu_lo}, {nu_hi}]"
                )))
            }
            _ => Ok(()),
        }
    }

    fn eval(&self, t: f64) -> f64 {
        match self.shape {
            PulseShape::Sinc { bandwidth } => {
                let x = 2.0 * std::f64::consts::PI * bandwidth * (t - self.duration / 2.0);
                if x == 0.0 {
                    1.0
                } else {
                    x.sin() / x
                }
            }
            PulseShape::Gaussian { center, sigma } => {
                let d = t - center;
                (-d * d / (2.0 * sigma * sigma)).exp()
            }
            PulseShape::Chirp { nu_lo, nu_hi, envelope } => {
                // Instantaneous frequency sweeps linearly from nu_lo to
                // nu_hi across the interval; phase is its integral.
                let sweep = (nu_hi - nu_lo) / (2.0 * self.duration);
                let phase = 2.0 * std::f64::consts::PI * (nu_lo * t + sweep * t * t);
                let env = match envelope {
                    ChirpEnvelope::RaisedCosine => {
                        let u = std::f64::consts::PI * t / self.duration;
                        u.sin().powi(2)
                    }
                    ChirpEnvelope::Constant => 1.0,
                };
                env * phase.sin()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_input() {
        assert!(SampledSignal::new(vec![1.0], 1.0).is_err());
        assert!(SampledSignal::new(vec![1.0, 2.0], 0.0).is_err());
        assert!(SampledSignal::new(vec![1.0, f64::NAN], 1.0).is_err());
        assert!(SampledSignal::new(vec![1.0, 2.0], 1.0).is_ok());
    }

    #[test]
    fn time_grid_spans_duration() {
        let s = SampledSignal::new(vec![0.0; 5], 2.0).unwrap();
        assert_eq!(s.time_at(0), 0.0);
        assert_eq!(s.time_at(4), 2.0);
        assert!((s.dt() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn derivative_is_forward_difference_with_trailing_zero() {
        let s = SampledSignal::new(vec![1.0, 3.0, 2.0, 2.0], 1.0).unwrap();
        assert_eq!(s.derivative().samples(), &[2.0, -1.0, 0.0, 0.0]);
    }

    #[test]
    fn integral_is_inclusive_running_sum() {
        let s = SampledSignal::new(vec![1.0, 1.0, 1.0, 1.0], 1.0).unwrap();
        assert_eq!(s.integral().samples(), &[1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn integral_of_derivative_reconstructs_shifted_signal() {
        let s = SampledSignal::new(vec![0.3, -1.2, 0.7, 2.0, -0.4], 1.0).unwrap();
        let rec = s.derivative().integral();
        // sum_{k<=n} (f[k+1]-f[k]) = f[n+1] - f[0]
        for n in 0..s.len() - 1 {
            assert!((rec.samples()[n] - (s.samples()[n + 1] - s.samples()[0])).abs() < 1e-12);
        }
    }

    #[test]
    fn sinc_pulse_peaks_at_center() {
        let spec = PulseSpec::default_for(PulseFamily::Sinc);
        let s = spec.generate().unwrap();
        // Odd grid point count would land exactly on the center; with
        // 10000 points the two middle samples straddle it.
        assert!((s.max_abs() - 1.0).abs() < 1e-15);
        let first_sidelobe = s.samples().iter().cloned().fold(f64::INFINITY, f64::min);
        // Known sinc first-sidelobe level (about -0.2172 of peak); the
        // peak itself is slightly off-grid so the ratio shifts a little.
        assert!((first_sidelobe - (-0.2172)).abs() < 1e-2, "got {first_sidelobe}");
    }

    #[test]
    fn gaussian_pulse_is_unit_peak_and_positive() {
        let spec = PulseSpec::default_for(PulseFamily::Gaussian);
        let s = spec.generate().unwrap();
        assert!((s.max_abs() - 1.0).abs() < 1e-15);
        assert!(s.samples().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn chirp_envelope_vanishes_at_ends() {
        let spec = PulseSpec::default_for(PulseFamily::Chirp);
        let s = spec.generate().unwrap();
        assert_eq!(s.samples()[0], 0.0);
        assert!(s.samples()[s.len() - 1].abs() < 1e-12);
        assert!((s.max_abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constant_envelope_chirp_fills_interval() {
        let spec = PulseSpec {
            shape: PulseShape::Chirp {
                nu_lo: 2.0,
                nu_hi: 8.0,
                envelope: ChirpEnvelope::Constant,
            },
            duration: 1.0,
            resolution: 10_000,
        };
        let s = spec.generate().unwrap();
        // Early samples already oscillate at full scale.
        let early_max = s.samples()[..2000].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(early_max > 0.9);
    }

    #[test]
    fn family_names_round_trip() {
        for f in PulseFamily::ALL {
            assert_eq!(PulseFamily::parse(f.name()).unwrap(), f);
        }
        assert!(PulseFamily::parse("square").is_err());
    }
}
