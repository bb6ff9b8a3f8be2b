//! Statistical signal characterization: cleanup, extrema segmentation,
//! and the 30-parameter (or 4-parameter baseline) feature extraction.
//!
//! The feature set characterizes a pulse by ten statistics — four
//! segment statistics between consecutive extrema, three amplitude
//! central moments, and three time cumulants — computed on the signal
//! itself, its discrete derivative, and its running-sum integral.

pub mod cleanup;
pub mod extrema;
pub mod features;
pub mod params;

pub use cleanup::{detect_and_normalize, mean_filter, median_filter, offset_correction};
pub use extrema::{detect_extrema, ExtremaSequence, SegmentSet};
pub use features::{
    clean_and_normalize, extract_features, extract_from_normalized, EsscFeatures,
    ExtractionConfig, FeatureMode, PARAM_NAMES, SOURCE_NAMES,
};
pub use params::{
    amplitude_moments, ssc_params, time_cumulants, AmplitudeMoments, SscParams, TimeCumulants,
    TimeWeight,
};
