//! Statistical fingerprinting and classification of pulse-like waveforms.
//!
//! The crate implements the ESSC (Extended Statistical Signal
//! Characterization) feature extractor — a 30-parameter set of segment
//! statistics, moments, and cumulants measured on a pulse, its discrete
//! derivative, and its discrete integral — together with everything needed
//! to run classification experiments on spectrally deformed test pulses:
//!
//! - [`signal`]: Sinc/Gaussian/Chirp pulse generators and elementary
//!   discrete signal operations,
//! - [`spectral`]: DFT helpers and the two parametric deformation filters
//!   (tanh low-pass and Gaussian stop-band),
//! - [`acquisition`]: the simulated acquisition chain (decimation with
//!   jitter, random scaling, offset, additive Gaussian noise),
//! - [`essc`]: signal cleanup and the 30-parameter (or 4-parameter SSC)
//!   feature extraction pipeline,
//! - [`ann`]: a single-hidden-layer feed-forward network trained by
//!   back-propagation on average cross-entropy,
//! - [`analysis`]: confusion matrices, per-parameter sensitivity scans,
//!   and ReliefF feature relevance,
//! - [`experiment`]: reproducible end-to-end experiment orchestration
//!   driven by a JSON config and a master seed.

pub mod acquisition;
pub mod analysis;
pub mod ann;
pub mod dataset;
pub mod error;
pub mod essc;
pub mod experiment;
pub mod rng;
pub mod signal;
pub mod spectral;

pub use error::{Error, Result};
