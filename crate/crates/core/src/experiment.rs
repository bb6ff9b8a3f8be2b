//! Experiment configuration and stage wiring: one JSON document fixes
//! the pulse family, deformation bank, noise plan, feature mode, ANN
//! hyperparameters, and dataset sizes. Every stage is deterministic
//! given the config and its master seed, and the config's SHA-256 hash
//! stamps all outputs so runs can be replayed and verified.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::acquisition::NoiseSpec;
use crate::analysis::{
    evaluate_confusion, relieff, sensitivity_table, ConfusionMatrix, ReliefFResult,
    SensitivityResult,
};
use crate::ann::{select_architecture, ArchitectureSelection, SelectionRule, TrainConfig};
use crate::dataset::{generate_dataset, FeatureDataset, GenerationPlan};
use crate::error::{Error, Result};
use crate::essc::{ExtractionConfig, FeatureMode};
use crate::rng::{derive_stream, StreamDomain};
use crate::signal::{PulseFamily, PulseSpec};
use crate::spectral::{default_filter_bank, FilterSpec, NUM_CLASSES};

/// Training noise: GWN with sigma at 5% of the peak.
pub fn default_train_snr_db() -> f64 {
    20.0 * 20.0f64.log10() // ~26.02 dB
}

fn default_train_noise() -> NoiseSpec {
    NoiseSpec::standard(default_train_snr_db())
}

fn default_test_snrs() -> Vec<f64> {
    vec![25.0, 20.0, 15.0, 10.0]
}

fn default_n_hidden_range() -> Vec<usize> {
    (1..=8).map(|i| 5 * i).collect()
}

fn default_cycles() -> usize {
    50
}

fn default_per_class() -> usize {
    1000
}

fn default_relieff_k() -> usize {
    crate::analysis::DEFAULT_K
}

fn default_sensitivity_snr_db() -> f64 {
    25.0
}

fn default_master_seed() -> u64 {
    1
}

/// Lane group of the training dataset streams.
pub const TRAIN_LANE_GROUP: u16 = 0;
/// Lane group of the shared sensitivity/ReliefF dataset; test sets use
/// their SNR index as the group.
pub const ANALYSIS_LANE_GROUP: u16 = 0xFFFF;

/// The complete, reproducible description of one recognition problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub family: PulseFamily,
    /// Pulse override; defaults to the family's standard spec.
    #[serde(default)]
    pub pulse: Option<PulseSpec>,
    /// Filter bank override; defaults to the family's standard bank.
    #[serde(default)]
    pub filters: Option<Vec<FilterSpec>>,
    #[serde(default)]
    pub mode: FeatureMode,
    #[serde(default)]
    pub extraction: ExtractionConfig,
    #[serde(default = "default_train_noise")]
    pub train_noise: NoiseSpec,
    #[serde(default = "default_test_snrs")]
    pub test_snrs_db: Vec<f64>,
    #[serde(default = "default_sensitivity_snr_db")]
    pub sensitivity_snr_db: f64,
    #[serde(default = "default_n_hidden_range")]
    pub n_hidden_range: Vec<usize>,
    #[serde(default = "default_cycles")]
    pub cycles: usize,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default = "default_per_class")]
    pub per_class_train: usize,
    #[serde(default = "default_per_class")]
    pub per_class_test: usize,
    #[serde(default)]
    pub selection: SelectionRule,
    #[serde(default = "default_relieff_k")]
    pub relieff_k: usize,
    #[serde(default = "default_master_seed")]
    pub master_seed: u64,
}

impl ExperimentConfig {
    pub fn default_for(family: PulseFamily) -> Self {
        Self {
            family,
            pulse: None,
            filters: None,
            mode: FeatureMode::default(),
            extraction: ExtractionConfig::default(),
            train_noise: default_train_noise(),
            test_snrs_db: default_test_snrs(),
            sensitivity_snr_db: default_sensitivity_snr_db(),
            n_hidden_range: default_n_hidden_range(),
            cycles: default_cycles(),
            train: TrainConfig::default(),
            per_class_train: default_per_class(),
            per_class_test: default_per_class(),
            selection: SelectionRule::default(),
            relieff_k: default_relieff_k(),
            master_seed: default_master_seed(),
        }
    }

    pub fn pulse_spec(&self) -> PulseSpec {
        self.pulse.clone().unwrap_or_else(|| PulseSpec::default_for(self.family))
    }

    pub fn filter_bank(&self) -> Vec<FilterSpec> {
        self.filters.clone().unwrap_or_else(|| default_filter_bank(self.family).to_vec())
    }

    /// Validate every key, collecting all offending keys in one error.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if let Err(e) = self.pulse_spec().generate() {
            problems.push(format!("pulse: {e}"));
        }
        let bank = self.filter_bank();
        if bank.len() != NUM_CLASSES {
            problems.push(format!("filters: expected {NUM_CLASSES}, got {}", bank.len()));
        } else {
            for (i, filter) in bank.iter().enumerate() {
                if let Err(e) = filter.validate() {
                    problems.push(format!("filters[{i}]: {e}"));
                } else if filter.class_id as usize != i + 1 {
                    problems.push(format!(
                        "filters[{i}]: carries class id {} (want {})",
                        filter.class_id,
                        i + 1
                    ));
                }
            }
        }
        if let Err(e) = self.extraction.validate() {
            problems.push(format!("extraction: {e}"));
        }
        if let Err(e) = self.train_noise.validate() {
            problems.push(format!("train_noise: {e}"));
        }
        if self.test_snrs_db.is_empty() {
            problems.push("test_snrs_db: must list at least one SNR".into());
        }
        for (i, snr) in self.test_snrs_db.iter().enumerate() {
            if snr.is_nan() {
                problems.push(format!("test_snrs_db[{i}]: NaN"));
            }
        }
        if self.sensitivity_snr_db.is_nan() {
            problems.push("sensitivity_snr_db: NaN".into());
        }
        if self.n_hidden_range.is_empty() {
            problems.push("n_hidden_range: must be non-empty".into());
        }
        for &n in &self.n_hidden_range {
            if !(5..=40).contains(&n) {
                problems.push(format!("n_hidden_range: {n} outside 5..=40"));
            }
        }
        if self.cycles == 0 {
            problems.push("cycles: must be at least 1".into());
        }
        if let Err(e) = self.train.validate() {
            problems.push(format!("train: {e}"));
        }
        if self.per_class_train == 0 {
            problems.push("per_class_train: must be positive".into());
        }
        if self.per_class_test == 0 {
            problems.push("per_class_test: must be positive".into());
        }
        if self.relieff_k == 0 {
            problems.push("relieff_k: must be at least 1".into());
        }
        if self.per_class_test < self.relieff_k + 1 {
            problems.push(format!(
                "relieff_k: needs per_class_test >= {}, have {}",
                self.relieff_k + 1,
                self.per_class_test
            ));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems.join("; ")))
        }
    }

    /// Canonical JSON (fixed field order, shortest-round-trip floats).
    pub fn to_canonical_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// SHA-256 of the canonical JSON, hex-encoded.
    pub fn config_hash(&self) -> Result<String> {
        let json = serde_json::to_string(self)?;
        Ok(hex::encode(Sha256::digest(json.as_bytes())))
    }

    fn plan(&self, noise: NoiseSpec, per_class: usize) -> GenerationPlan {
        GenerationPlan {
            pulse: self.pulse_spec(),
            filters: self.filter_bank(),
            noise,
            extraction: self.extraction.clone(),
            mode: self.mode,
            per_class,
        }
    }

    pub fn train_plan(&self) -> GenerationPlan {
        self.plan(self.train_noise.clone(), self.per_class_train)
    }

    /// Test plan at one SNR: the training noise chain with only the GWN
    /// level swapped.
    pub fn test_plan(&self, snr_db: f64) -> GenerationPlan {
        let noise = NoiseSpec { snr_db, ..self.train_noise.clone() };
        self.plan(noise, self.per_class_test)
    }
}

/// Stage: the training dataset.
pub fn generate_train_dataset(config: &ExperimentConfig) -> Result<FeatureDataset> {
    generate_dataset(
        &config.train_plan(),
        StreamDomain::TrainData,
        TRAIN_LANE_GROUP,
        config.master_seed,
    )
}

/// Stage: a fresh test dataset for the `snr_index`-th test SNR.
pub fn generate_test_dataset(config: &ExperimentConfig, snr_index: usize) -> Result<FeatureDataset> {
    let snr_db = *config
        .test_snrs_db
        .get(snr_index)
        .ok_or_else(|| Error::Parameter(format!("no test SNR at index {snr_index}")))?;
    generate_dataset(
        &config.test_plan(snr_db),
        StreamDomain::TestData,
        snr_index as u16,
        config.master_seed,
    )
}

/// Stage: the dataset shared by the sensitivity scan and ReliefF,
/// drawn at the analysis SNR on its own stream group.
pub fn generate_analysis_dataset(config: &ExperimentConfig) -> Result<FeatureDataset> {
    generate_dataset(
        &config.test_plan(config.sensitivity_snr_db),
        StreamDomain::TestData,
        ANALYSIS_LANE_GROUP,
        config.master_seed,
    )
}

/// Stage: architecture sweep + training on a generated dataset.
pub fn train_model(
    config: &ExperimentConfig,
    dataset: &FeatureDataset,
) -> Result<ArchitectureSelection> {
    let x = dataset.features().to_owned();
    select_architecture(
        &x,
        dataset.labels(),
        &config.n_hidden_range,
        config.cycles,
        &config.train,
        config.master_seed,
    )
}

/// Stage: confusion matrix of a model over one test dataset. The
/// classification stream is keyed by the SNR index.
pub fn evaluate_model(
    config: &ExperimentConfig,
    model: &crate::ann::MlpModel,
    dataset: &FeatureDataset,
    snr_db: f64,
    snr_index: usize,
) -> Result<ConfusionMatrix> {
    let mut rng =
        derive_stream(config.master_seed, StreamDomain::Classify, snr_index as u32, 0);
    evaluate_confusion(model, dataset, snr_db, config.selection, &mut rng)
}

/// Stage: full per-class, per-parameter sensitivity table.
pub fn run_sensitivity(
    model: &crate::ann::MlpModel,
    dataset: &FeatureDataset,
) -> Result<SensitivityResult> {
    sensitivity_table(model, dataset)
}

/// Stage: ReliefF relevance weights.
pub fn run_relieff(config: &ExperimentConfig, dataset: &FeatureDataset) -> Result<ReliefFResult> {
    relieff(dataset, config.relieff_k)
}
