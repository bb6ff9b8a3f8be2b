//! Discrete Fourier transforms and parametric spectral deformation.
//!
//! Deformations are defined as real, even gain profiles over signed
//! frequency: a tanh-shoulder low-pass
//! `G_FLP(nu) = 1/2 [tanh(SR (nu + nu_c)) - tanh(SR (nu - nu_c))]`
//! and a Gaussian band-stop
//! `G_FG(nu) = 1 - (delta_a / max|G_g|) G_g(nu)` with
//! `G_g(nu) = exp(-(nu+nu_c)^2 / 2 sigma^2) + exp(-(nu-nu_c)^2 / 2 sigma^2)`.
//! A deformed signal is the inverse transform of the bin-wise product of
//! the signal spectrum with the gain profile.

use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{PulseFamily, SampledSignal};

/// Number of deformation classes (class 1 is the undeformed signal).
pub const NUM_CLASSES: usize = 5;

/// Complex spectrum of a uniformly sampled signal, in the standard
/// wrap-around bin ordering.
#[derive(Debug, Clone)]
pub struct Spectrum {
    bins: Vec<Complex<f64>>,
    dnu: f64,
}

impl Spectrum {
    pub fn new(bins: Vec<Complex<f64>>, dnu: f64) -> Result<Self> {
        if bins.len() < 2 {
            return Err(Error::InvalidSignal(format!(
                "spectrum needs at least 2 bins, got {}",
                bins.len()
            )));
        }
        if !dnu.is_finite() || dnu <= 0.0 {
            return Err(Error::InvalidSignal(format!(
                "frequency resolution must be positive, got {dnu}"
            )));
        }
        Ok(Self { bins, dnu })
    }

    pub fn bins(&self) -> &[Complex<f64>] {
        &self.bins
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires >= 2 bins
    }

    /// Frequency resolution `1 / (N * dt)`.
    pub fn dnu(&self) -> f64 {
        self.dnu
    }

    /// Signed physical frequency of bin `k`: bins up to N/2 carry the
    /// non-negative frequencies, the rest wrap around to negative ones.
    pub fn frequency_at(&self, k: usize) -> f64 {
        let n = self.bins.len();
        if k <= n / 2 {
            k as f64 * self.dnu
        } else {
            (k as f64 - n as f64) * self.dnu
        }
    }
}

/// Forward discrete Fourier transform.
pub fn dft_forward(signal: &SampledSignal) -> Spectrum {
    let n = signal.len();
    let mut bins: Vec<Complex<f64>> =
        signal.samples().iter().map(|&v| Complex::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut bins);
    Spectrum { bins, dnu: 1.0 / (n as f64 * signal.dt()) }
}

/// Inverse transform of a conjugate-symmetric spectrum back to a real
/// signal. Rejects spectra whose asymmetry exceeds 1e-9 relative to the
/// largest bin magnitude.
pub fn dft_inverse(spectrum: &Spectrum) -> Result<SampledSignal> {
    let n = spectrum.bins.len();
    let scale = spectrum.bins.iter().map(|b| b.norm()).fold(0.0, f64::max);
    let tol = 1e-9 * scale.max(f64::MIN_POSITIVE);
    for k in 0..n {
        let mirror = spectrum.bins[(n - k) % n].conj();
        if (spectrum.bins[k] - mirror).norm() > tol {
            return Err(Error::Symmetry(format!(
                "bin {k} breaks conjugate symmetry by {:.3e} (tolerance {tol:.3e})",
                (spectrum.bins[k] - mirror).norm()
            )));
        }
    }
    let mut buf = spectrum.bins.clone();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let samples: Vec<f64> = buf.iter().map(|b| b.re / n as f64).collect();
    let dt = 1.0 / (n as f64 * spectrum.dnu);
    SampledSignal::new(samples, (n - 1) as f64 * dt)
}

/// Shape and parameters of one deformation profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FilterKind {
    /// Class 1: the signal passes through unchanged.
    NoDeformation,
    /// tanh-shoulder low-pass.
    LowPass { nu_c: f64, slew_rate: f64 },
    /// Gaussian notch pair at +-nu_c, attenuating by at most `delta_a`.
    GaussianStop { nu_c: f64, sigma_nu: f64, delta_a: f64 },
}

/// A deformation class: the filter shape plus its class label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    /// Class label 1..=5; 1 is reserved for the undeformed signal.
    pub class_id: u8,
    #[serde(flatten)]
    pub kind: FilterKind,
}

impl FilterSpec {
    pub fn validate(&self) -> Result<()> {
        if !(1..=NUM_CLASSES as u8).contains(&self.class_id) {
            return Err(Error::Parameter(format!(
                "class_id must be 1..={NUM_CLASSES}, got {}",
                self.class_id
            )));
        }
        match (self.class_id, &self.kind) {
            (1, FilterKind::NoDeformation) => Ok(()),
            (1, _) => Err(Error::Parameter("class 1 must be no_deformation".into())),
            (_, FilterKind::NoDeformation) => Err(Error::Parameter(format!(
                "class {} cannot be no_deformation (only class 1)",
                self.class_id
            ))),
            (_, FilterKind::LowPass { nu_c, slew_rate }) => {
                if !nu_c.is_finite() || *nu_c < 0.0 {
                    return Err(Error::Parameter(format!("nu_c must be >= 0, got {nu_c}")));
                }
                if !slew_rate.is_finite() || *slew_rate <= 0.0 {
                    return Err(Error::Parameter(format!(
                        "slew_rate must be > 0, got {slew_rate}"
                    )));
                }
                Ok(())
            }
            (_, FilterKind::GaussianStop { nu_c, sigma_nu, delta_a }) => {
                if !nu_c.is_finite() || *nu_c < 0.0 {
                    return Err(Error::Parameter(format!("nu_c must be >= 0, got {nu_c}")));
                }
                if !sigma_nu.is_finite() || *sigma_nu <= 0.0 {
                    return Err(Error::Parameter(format!(
                        "sigma_nu must be > 0, got {sigma_nu}"
                    )));
                }
                if !delta_a.is_finite() || !(0.0..=1.0).contains(delta_a) {
                    return Err(Error::Parameter(format!(
                        "delta_a must be in [0, 1], got {delta_a}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Precompute the gain evaluator (for GaussianStop this locates
    /// `max|G_g|` once). Errors for the class-1 pass-through.
    pub fn prepare(&self) -> Result<PreparedGain> {
        self.validate()?;
        match self.kind {
            FilterKind::NoDeformation => Err(Error::NotAFilter(self.class_id)),
            FilterKind::LowPass { .. } => Ok(PreparedGain { kind: self.kind, gg_peak: 1.0 }),
            FilterKind::GaussianStop { nu_c, sigma_nu, .. } => Ok(PreparedGain {
                kind: self.kind,
                gg_peak: gaussian_sum_peak(nu_c, sigma_nu),
            }),
        }
    }
}

/// Evaluate one filter gain at one frequency. Convenience wrapper over
/// [`FilterSpec::prepare`]; hot loops should prepare once instead.
pub fn filter_gain(spec: &FilterSpec, nu: f64) -> Result<f64> {
    Ok(spec.prepare()?.at(nu))
}

/// A gain profile ready for repeated evaluation.
#[derive(Debug, Clone, Copy)]
pub struct PreparedGain {
    kind: FilterKind,
    gg_peak: f64,
}

impl PreparedGain {
    /// Gain at signed frequency `nu`. Both profiles are even in `nu`;
    /// evaluating at `|nu|` makes the symmetry exact in floating point.
    pub fn at(&self, nu: f64) -> f64 {
        let nu = nu.abs();
        match self.kind {
            FilterKind::NoDeformation => unreachable!("prepare() rejects class 1"),
            FilterKind::LowPass { nu_c, slew_rate } => {
                0.5 * ((slew_rate * (nu + nu_c)).tanh() - (slew_rate * (nu - nu_c)).tanh())
            }
            FilterKind::GaussianStop { nu_c, sigma_nu, delta_a } => {
                1.0 - delta_a / self.gg_peak * gaussian_sum(nu, nu_c, sigma_nu)
            }
        }
    }
}

fn gaussian_sum(nu: f64, nu_c: f64, sigma: f64) -> f64 {
    let a = (nu + nu_c) / sigma;
    let b = (nu - nu_c) / sigma;
    (-0.5 * a * a).exp() + (-0.5 * b * b).exp()
}

/// Global maximum of `G_g` over all frequencies. `G_g` is even with a
/// critical point at 0 and is strictly decreasing beyond `nu_c`, so the
/// maximum lies in `[0, nu_c]`: dense scan plus ternary refinement.
fn gaussian_sum_peak(nu_c: f64, sigma: f64) -> f64 {
    if nu_c == 0.0 {
        return 2.0;
    }
    const STEPS: usize = 4096;
    let g = |nu: f64| gaussian_sum(nu, nu_c, sigma);
    let x_at = |i: usize| nu_c * i as f64 / STEPS as f64;
    let mut best_i = 0;
    let mut best = f64::NEG_INFINITY;
    for i in 0..=STEPS {
        let v = g(x_at(i));
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let mut lo = x_at(best_i.saturating_sub(1));
    let mut hi = x_at((best_i + 1).min(STEPS));
    for _ in 0..160 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if g(m1) < g(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    best.max(g(0.5 * (lo + hi)))
}

/// Deform a signal: inverse transform of the bin-wise product of its
/// spectrum with the filter gain at each bin's signed frequency. The
/// class-1 spec passes the signal through untouched.
pub fn apply_deformation(signal: &SampledSignal, spec: &FilterSpec) -> Result<SampledSignal> {
    if let FilterKind::NoDeformation = spec.kind {
        spec.validate()?;
        return Ok(signal.clone());
    }
    let gain = spec.prepare()?;
    let mut spectrum = dft_forward(signal);
    for k in 0..spectrum.bins.len() {
        let nu = spectrum.frequency_at(k);
        spectrum.bins[k] *= gain.at(nu);
    }
    dft_inverse(&spectrum)
}

/// The five deformation classes studied for a pulse family. Classes 2-3
/// share the Gaussian-stop parameters across families; the low-pass
/// cutoffs 4-5 are placed per family so they cut meaningful spectral
/// content.
pub fn default_filter_bank(family: PulseFamily) -> [FilterSpec; NUM_CLASSES] {
    let (lp1, lp2) = match family {
        PulseFamily::Sinc => (2.0, 5.0),
        PulseFamily::Gaussian => (3.0, 4.0),
        PulseFamily::Chirp => (5.0, 3.0),
    };
    [
        FilterSpec { class_id: 1, kind: FilterKind::NoDeformation },
        FilterSpec {
            class_id: 2,
            kind: FilterKind::GaussianStop { nu_c: 0.0, sigma_nu: 2.0, delta_a: 0.4 },
        },
        FilterSpec {
            class_id: 3,
            kind: FilterKind::GaussianStop { nu_c: 3.0, sigma_nu: 2.0, delta_a: 0.4 },
        },
        FilterSpec { class_id: 4, kind: FilterKind::LowPass { nu_c: lp1, slew_rate: 0.5 } },
        FilterSpec { class_id: 5, kind: FilterKind::LowPass { nu_c: lp2, slew_rate: 0.5 } },
    ]
}
