//! Labeled feature datasets: deterministic generation through the
//! acquisition chain, per-class bookkeeping, and the CSV schema
//! `class_id,sig_MT,...` shared by all tools.
//!
//! Each element owns an RNG stream derived from `(master seed, domain,
//! lane, element index)`, so datasets are reproducible bit-for-bit and
//! independent of how generation is scheduled across threads.

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use rayon::prelude::*;

use crate::acquisition::{simulate_acquisition, NoiseSpec};
use crate::error::{Error, Result};
use crate::essc::{extract_features, EsscFeatures, ExtractionConfig, FeatureMode};
use crate::rng::{derive_stream, StreamDomain};
use crate::signal::{PulseSpec, SampledSignal};
use crate::spectral::{FilterSpec, NUM_CLASSES};

/// Feature rows plus their target classes. Width is fixed by the mode.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureDataset {
    mode: FeatureMode,
    features: Array2<f64>,
    labels: Vec<u8>,
}

impl FeatureDataset {
    pub fn new(mode: FeatureMode, features: Array2<f64>, labels: Vec<u8>) -> Result<Self> {
        if features.nrows() != labels.len() {
            return Err(Error::Dataset(format!(
                "{} feature rows but {} labels",
                features.nrows(),
                labels.len()
            )));
        }
        if features.ncols() != mode.feature_count() {
            return Err(Error::Dataset(format!(
                "{} mode expects {} features per row, got {}",
                mode,
                mode.feature_count(),
                features.ncols()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&c| c == 0 || c as usize > NUM_CLASSES) {
            return Err(Error::Dataset(format!("class id {bad} outside 1..={NUM_CLASSES}")));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::Dataset("non-finite feature value".into()));
        }
        // Canonicalize to row-major storage so row views are always
        // contiguous; column selections and transposes hand us other
        // layouts.
        let features = if features.is_standard_layout() {
            features
        } else {
            features.as_standard_layout().into_owned()
        };
        Ok(Self { mode, features, labels })
    }

    /// Concatenate datasets of one mode, keeping row order.
    pub fn concat(parts: &[FeatureDataset]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::Dataset("nothing to concatenate".into()))?;
        let mode = first.mode;
        let mut values = Vec::new();
        let mut labels = Vec::new();
        for part in parts {
            if part.mode != mode {
                return Err(Error::Dataset(format!(
                    "mixed feature modes: {} and {}",
                    mode, part.mode
                )));
            }
            values.extend(part.features.iter().copied());
            labels.extend_from_slice(&part.labels);
        }
        let features = Array2::from_shape_vec((labels.len(), mode.feature_count()), values)
            .expect("parts iterate row-major");
        Self::new(mode, features, labels)
    }

    pub fn mode(&self) -> FeatureMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn features(&self) -> ArrayView2<'_, f64> {
        self.features.view()
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.features.row(i)
    }

    /// Class ids present, ascending.
    pub fn class_ids(&self) -> Vec<u8> {
        let mut ids: Vec<u8> = Vec::new();
        for c in 1..=NUM_CLASSES as u8 {
            if self.labels.contains(&c) {
                ids.push(c);
            }
        }
        ids
    }

    pub fn class_count(&self, class_id: u8) -> usize {
        self.labels.iter().filter(|&&c| c == class_id).count()
    }

    /// Mean feature vector over the rows of one class.
    pub fn class_mean(&self, class_id: u8) -> Result<Vec<f64>> {
        let mut mean = vec![0.0; self.mode.feature_count()];
        let mut count = 0usize;
        for (row, &label) in self.features.rows().into_iter().zip(&self.labels) {
            if label == class_id {
                for (m, v) in mean.iter_mut().zip(row) {
                    *m += v;
                }
                count += 1;
            }
        }
        if count == 0 {
            return Err(Error::Dataset(format!("no rows of class {class_id}")));
        }
        for m in &mut mean {
            *m /= count as f64;
        }
        Ok(mean)
    }

    /// Rows of one class as a dense copy.
    pub fn class_rows(&self, class_id: u8) -> Array2<f64> {
        let indices: Vec<usize> = self
            .labels
            .iter()
            .enumerate()
            .filter_map(|(i, &c)| (c == class_id).then_some(i))
            .collect();
        self.features.select(Axis(0), &indices)
    }

    /// Keep only the rows of one class.
    pub fn filter_class(&self, class_id: u8) -> Result<Self> {
        let features = self.class_rows(class_id);
        let labels = vec![class_id; features.nrows()];
        Self::new(self.mode, features, labels)
    }

    /// `(min, max)` per feature column.
    pub fn feature_ranges(&self) -> Vec<(f64, f64)> {
        self.features
            .axis_iter(Axis(1))
            .map(|col| {
                col.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                    (lo.min(v), hi.max(v))
                })
            })
            .collect()
    }

    /// CSV with the shared header; floats print in shortest round-trip
    /// form so serialization is lossless and byte-stable.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("class_id");
        for name in self.mode.feature_names() {
            out.push(',');
            out.push_str(&name);
        }
        out.push('\n');
        for (row, &label) in self.features.rows().into_iter().zip(&self.labels) {
            out.push_str(&label.to_string());
            for v in row {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        // `#` lines carry provenance comments, not data
        let mut lines = text.lines().filter(|l| !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Dataset("empty CSV".into()))?;
        let mode = [FeatureMode::Essc30, FeatureMode::Ssc4]
            .into_iter()
            .find(|m| {
                let mut expected = String::from("class_id");
                for name in m.feature_names() {
                    expected.push(',');
                    expected.push_str(&name);
                }
                header == expected
            })
            .ok_or_else(|| Error::Dataset(format!("unrecognized CSV header: {header}")))?;

        let width = mode.feature_count();
        let mut labels = Vec::new();
        let mut values = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let class: u8 = fields
                .next()
                .unwrap()
                .parse()
                .map_err(|e| Error::Dataset(format!("row {}: bad class id: {e}", i + 1)))?;
            labels.push(class);
            let start = values.len();
            for field in fields {
                let v: f64 = field
                    .parse()
                    .map_err(|e| Error::Dataset(format!("row {}: bad value: {e}", i + 1)))?;
                values.push(v);
            }
            if values.len() - start != width {
                return Err(Error::Dataset(format!(
                    "row {}: expected {width} features, got {}",
                    i + 1,
                    values.len() - start
                )));
            }
        }
        let rows = labels.len();
        let features = Array2::from_shape_vec((rows, width), values)
            .map_err(|e| Error::Dataset(e.to_string()))?;
        Self::new(mode, features, labels)
    }
}

/// Everything needed to synthesize one labeled dataset.
#[derive(Debug, Clone)]
pub struct GenerationPlan {
    pub pulse: PulseSpec,
    /// One filter per class, class ids 1..=5 in order.
    pub filters: Vec<FilterSpec>,
    pub noise: NoiseSpec,
    pub extraction: ExtractionConfig,
    pub mode: FeatureMode,
    pub per_class: usize,
}

impl GenerationPlan {
    pub fn validate(&self) -> Result<()> {
        self.noise.validate()?;
        self.extraction.validate()?;
        if self.per_class == 0 {
            return Err(Error::Parameter("per_class must be positive".into()));
        }
        if self.filters.len() != NUM_CLASSES {
            return Err(Error::Parameter(format!(
                "expected {NUM_CLASSES} filters, got {}",
                self.filters.len()
            )));
        }
        for (i, filter) in self.filters.iter().enumerate() {
            filter.validate()?;
            if filter.class_id as usize != i + 1 {
                return Err(Error::Parameter(format!(
                    "filter {} carries class id {}",
                    i + 1,
                    filter.class_id
                )));
            }
        }
        Ok(())
    }
}

/// A rare noise draw can bury the pulse and fail extraction; such
/// elements are redrawn from a salted stream so the dataset stays full
/// and reproducible.
const MAX_ELEMENT_ATTEMPTS: u32 = 20;

fn generate_element(
    ideal: &SampledSignal,
    filter: &FilterSpec,
    plan: &GenerationPlan,
    domain: StreamDomain,
    lane: u32,
    master_seed: u64,
    element: u32,
) -> Result<EsscFeatures> {
    let mut last_err = None;
    for attempt in 0..MAX_ELEMENT_ATTEMPTS {
        let index = (attempt << 24) | element;
        let mut rng = derive_stream(master_seed, domain, lane, index);
        let acquired = simulate_acquisition(ideal, filter, &plan.noise, &mut rng)?;
        match extract_features(&acquired, plan.mode, &plan.extraction) {
            Ok(features) => return Ok(features),
            Err(e @ Error::NoPulse(_)) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(Error::Dataset(format!(
        "class {}: element {element} failed extraction {MAX_ELEMENT_ATTEMPTS} times: {}",
        filter.class_id,
        last_err.expect("at least one attempt")
    )))
}

/// Generate `per_class` elements for each of the 5 classes, in class
/// order. `lane_group` separates otherwise identical plans (e.g. one
/// test set per SNR level); the element streams use
/// `lane = lane_group << 8 | class_id`.
pub fn generate_dataset(
    plan: &GenerationPlan,
    domain: StreamDomain,
    lane_group: u16,
    master_seed: u64,
) -> Result<FeatureDataset> {
    plan.validate()?;
    if plan.per_class > (1 << 24) {
        return Err(Error::Parameter("per_class exceeds the element-index space".into()));
    }
    let ideal = plan.pulse.generate()?;

    let jobs: Vec<(u8, u32)> = plan
        .filters
        .iter()
        .flat_map(|f| (0..plan.per_class as u32).map(move |e| (f.class_id, e)))
        .collect();
    let rows: Vec<Result<EsscFeatures>> = jobs
        .par_iter()
        .map(|&(class_id, element)| {
            let filter = &plan.filters[class_id as usize - 1];
            let lane = (lane_group as u32) << 8 | class_id as u32;
            generate_element(&ideal, filter, plan, domain, lane, master_seed, element)
        })
        .collect();

    let width = plan.mode.feature_count();
    let mut features = Array2::zeros((jobs.len(), width));
    let mut labels = Vec::with_capacity(jobs.len());
    for ((row, outcome), &(class_id, _)) in
        features.rows_mut().into_iter().zip(rows).zip(&jobs)
    {
        let values = outcome?.into_values();
        for (slot, v) in row.into_iter().zip(values) {
            *slot = v;
        }
        labels.push(class_id);
    }
    FeatureDataset::new(plan.mode, features, labels)
}
