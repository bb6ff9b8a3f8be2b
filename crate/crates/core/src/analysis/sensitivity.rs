//! Parameter sensitivity `s_p = 1 / |Δp|_90%`: perturb one feature of a
//! class-mean vector over an exponential step ladder until the model's
//! probability for that class drops below 0.9.
//!
//! Perturbations happen in a comparability-scaled space (amplitude
//! moments divided by 2^q) so that one s_p scale serves all 30
//! parameters; vectors are unscaled before every forward pass.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ann::{forward, MlpModel};
use crate::dataset::FeatureDataset;
use crate::error::{Error, Result};
use crate::essc::FeatureMode;
use crate::spectral::NUM_CLASSES;

/// Number of perturbation steps per sign.
pub const SENSITIVITY_STEPS: usize = 30;

/// Step-ladder growth rate: `k = (ln 10 - ln 0.01) / 29`.
pub fn sensitivity_k() -> f64 {
    (10.0f64 / 0.01).ln() / (SENSITIVITY_STEPS - 1) as f64
}

/// Step-ladder scale `A = 0.01 e^{-k}`, so that `|Δp|` runs from 0.01
/// (n = 1) to 10 (n = 30).
pub fn sensitivity_a() -> f64 {
    0.01 * (-sensitivity_k()).exp()
}

/// `|Δp| = A e^{k n}` for step `n` in 1..=30.
pub fn step_magnitude(n: usize) -> f64 {
    sensitivity_a() * (sensitivity_k() * n as f64).exp()
}

/// Divisor applied to a parameter before perturbing, per the 2^q
/// comparability rule for amplitude moments (M_A, D_A by 2; D_f2 by 4;
/// D_f3 by 8; time parameters and M_f1 unaltered). The rule repeats per
/// source branch.
pub fn comparability_divisor(param_index: usize) -> f64 {
    const DIVISORS: [f64; 10] = [1.0, 1.0, 2.0, 2.0, 1.0, 4.0, 8.0, 1.0, 1.0, 1.0];
    DIVISORS[param_index % 10]
}

/// Whether an s_p value was measured or pinned at a clamp bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Saturation {
    Measured,
    /// Never dropped below 0.9 even at `|Δp| = 10`; pinned to 0.1.
    Low,
    /// Dropped at (or before) the first step `|Δp| = 0.01`, or the class
    /// mean itself scores below 0.9; pinned to 100.
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityScan {
    pub s_p: f64,
    pub saturation: Saturation,
    /// First step (1..=30) at which either sign crossed below 0.9;
    /// `None` when pinned without a crossing.
    pub crossing_step: Option<usize>,
}

/// Scan one parameter starting from an explicit class-mean vector.
pub fn scan_from_mean(
    model: &MlpModel,
    mean: &[f64],
    target_class: u8,
    param_index: usize,
) -> Result<SensitivityScan> {
    if target_class == 0 || target_class as usize > NUM_CLASSES {
        return Err(Error::Parameter(format!("class id {target_class} outside 1..={NUM_CLASSES}")));
    }
    if param_index >= mean.len() {
        return Err(Error::Parameter(format!(
            "parameter index {param_index} outside 0..{}",
            mean.len()
        )));
    }
    let target = target_class as usize - 1;
    if forward(model, mean)?[target] < 0.9 {
        return Ok(SensitivityScan { s_p: 100.0, saturation: Saturation::High, crossing_step: None });
    }

    let divisor = comparability_divisor(param_index);
    let scaled_base = mean[param_index] / divisor;
    let mut probe = mean.to_vec();
    for n in 1..=SENSITIVITY_STEPS {
        let dp = step_magnitude(n);
        for sign in [1.0, -1.0] {
            probe[param_index] = (scaled_base + sign * dp) * divisor;
            if forward(model, &probe)?[target] < 0.9 {
                return Ok(if n == 1 {
                    // the true crossing may lie below the measurement floor
                    SensitivityScan {
                        s_p: 100.0,
                        saturation: Saturation::High,
                        crossing_step: Some(1),
                    }
                } else {
                    SensitivityScan {
                        s_p: (1.0 / dp).clamp(0.1, 100.0),
                        saturation: Saturation::Measured,
                        crossing_step: Some(n),
                    }
                });
            }
        }
    }
    Ok(SensitivityScan { s_p: 0.1, saturation: Saturation::Low, crossing_step: None })
}

/// Scan one parameter against the class mean of a labeled dataset.
pub fn sensitivity_scan(
    model: &MlpModel,
    dataset: &FeatureDataset,
    target_class: u8,
    param_index: usize,
) -> Result<SensitivityScan> {
    if dataset.mode().feature_count() != model.n_in() {
        return Err(Error::Shape(format!(
            "model takes {} inputs but the {} dataset has {}",
            model.n_in(),
            dataset.mode(),
            dataset.mode().feature_count()
        )));
    }
    let mean = dataset.class_mean(target_class)?;
    scan_from_mean(model, &mean, target_class, param_index)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSensitivity {
    pub class_id: u8,
    /// One scan per parameter, in schema order.
    pub scans: Vec<SensitivityScan>,
}

impl ClassSensitivity {
    /// Fraction of parameters pinned at the high bound.
    pub fn high_saturation_fraction(&self) -> f64 {
        let high = self.scans.iter().filter(|s| s.saturation == Saturation::High).count();
        high as f64 / self.scans.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityResult {
    pub mode: FeatureMode,
    pub classes: Vec<ClassSensitivity>,
}

impl SensitivityResult {
    pub fn to_csv(&self) -> String {
        let names = self.mode.feature_names();
        let mut out = String::from("class_id,source,param,s_p,saturation\n");
        for class in &self.classes {
            for (scan, name) in class.scans.iter().zip(&names) {
                let (source, param) = name.split_once('_').expect("source_param name");
                let saturation = match scan.saturation {
                    Saturation::Measured => "measured",
                    Saturation::Low => "low",
                    Saturation::High => "high",
                };
                out.push_str(&format!(
                    "{},{source},{param},{},{saturation}\n",
                    class.class_id, scan.s_p
                ));
            }
        }
        out
    }
}

/// Scan every (class, parameter) pair of a labeled dataset.
pub fn sensitivity_table(model: &MlpModel, dataset: &FeatureDataset) -> Result<SensitivityResult> {
    let width = dataset.mode().feature_count();
    let classes = dataset
        .class_ids()
        .into_iter()
        .map(|class_id| {
            let mean = dataset.class_mean(class_id)?;
            let scans: Result<Vec<SensitivityScan>> = (0..width)
                .into_par_iter()
                .map(|p| scan_from_mean(model, &mean, class_id, p))
                .collect();
            Ok(ClassSensitivity { class_id, scans: scans? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SensitivityResult { mode: dataset.mode(), classes })
}
