//! One function per subcommand. Every command resolves its config the
//! same way, stamps each CSV with the config hash and master seed,
//! writes atomically, and records a manifest so `verify` can replay the
//! whole run.

use std::fs;
use std::path::{Path, PathBuf};

use essc_core::ann::{model_from_json, model_to_json, MlpModel, ModelMeta};
use essc_core::dataset::FeatureDataset;
use essc_core::experiment::{
    evaluate_model, generate_analysis_dataset, generate_test_dataset, generate_train_dataset,
    run_relieff, run_sensitivity, train_model, ExperimentConfig,
};
use essc_core::spectral::NUM_CLASSES;
use essc_core::{Error, Result};
use serde_json::Value;

use crate::config;
use crate::io;
use crate::manifest::RunManifest;
use crate::StageArgs;

/// Replay order for `verify`; also the only commands that leave manifests.
const REPLAY_ORDER: [&str; 6] =
    ["generate", "train", "evaluate", "sensitivity", "relieff", "report"];

/// Resolved context shared by every stage: the config, its hash, and
/// where outputs go.
pub struct Stage {
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub out: PathBuf,
}

impl Stage {
    pub fn from_args(args: &StageArgs) -> Result<Self> {
        let config = config::resolve(args)?;
        let config_hash = config.config_hash()?;
        Ok(Self { config, config_hash, out: args.out.clone() })
    }

    fn manifest(&self, command: &str) -> RunManifest {
        RunManifest::new(command, &self.config, &self.config_hash)
    }

    /// Prefix a CSV body with its provenance comment.
    fn stamp(&self, body: &str) -> String {
        format!("# config {} seed {}\n{body}", self.config_hash, self.config.master_seed)
    }

    /// Write one artifact atomically and record it in the manifest.
    fn emit(&self, manifest: &mut RunManifest, name: &str, bytes: &[u8]) -> Result<()> {
        io::write_atomic(&self.out.join(name), bytes)?;
        manifest.record_output(name, bytes);
        Ok(())
    }

    /// Read one artifact and record it as an input.
    fn intake(&self, manifest: &mut RunManifest, name: &str) -> Result<String> {
        let bytes = io::read_bytes(&self.out.join(name))?;
        manifest.record_input(name, &bytes);
        String::from_utf8(bytes).map_err(|_| Error::Dataset(format!("{name}: not UTF-8")))
    }

    fn load_model(&self, manifest: &mut RunManifest) -> Result<MlpModel> {
        let text = self.intake(manifest, "model.json")?;
        let (model, meta) = model_from_json(&text)?;
        if model.n_in() != self.config.mode.feature_count() {
            return Err(Error::Validation(format!(
                "model.json takes {} inputs but the config's {} mode has {}; \
                 retrain or pass --mode",
                model.n_in(),
                self.config.mode,
                self.config.mode.feature_count()
            )));
        }
        if let Some(hash) = &meta.config_hash {
            if *hash != self.config_hash {
                eprintln!(
                    "note: model.json was trained under config {} (current {})",
                    &hash[..12.min(hash.len())],
                    &self.config_hash[..12]
                );
            }
        }
        Ok(model)
    }
}

fn snr_file(snr_db: f64) -> String {
    format!("confusion_{snr_db}dB.csv")
}

pub fn generate(stage: &Stage) -> Result<()> {
    let dataset = generate_train_dataset(&stage.config)?;
    let mut manifest = stage.manifest("generate");
    for class in 1..=NUM_CLASSES as u8 {
        let text = stage.stamp(&dataset.filter_class(class)?.to_csv());
        stage.emit(&mut manifest, &format!("train_class_{class}.csv"), text.as_bytes())?;
    }
    manifest.write(&stage.out)?;
    println!(
        "generate: {} {} rows across {NUM_CLASSES} class files in {}",
        dataset.len(),
        stage.config.mode,
        stage.out.display()
    );
    Ok(())
}

pub fn train(stage: &Stage) -> Result<()> {
    let mut manifest = stage.manifest("train");
    let mut parts = Vec::new();
    for class in 1..=NUM_CLASSES as u8 {
        let text = stage.intake(&mut manifest, &format!("train_class_{class}.csv"))?;
        parts.push(FeatureDataset::from_csv(&text)?);
    }
    let dataset = FeatureDataset::concat(&parts)?;
    if dataset.mode() != stage.config.mode {
        return Err(Error::Validation(format!(
            "dataset on disk is {} but the config wants {}; regenerate or pass --mode",
            dataset.mode(),
            stage.config.mode
        )));
    }

    let selection = train_model(&stage.config, &dataset)?;
    let meta = ModelMeta {
        family: Some(stage.config.family),
        mode: Some(stage.config.mode),
        master_seed: stage.config.master_seed,
        config_hash: Some(stage.config_hash.clone()),
    };
    stage.emit(&mut manifest, "model.json", model_to_json(&selection.model, &meta)?.as_bytes())?;

    let mut curve = String::from("n_hidden,min_ce\n");
    for row in &selection.curve {
        curve.push_str(&format!("{},{}\n", row.n_hidden, row.min_ce));
    }
    stage.emit(&mut manifest, "architecture.csv", stage.stamp(&curve).as_bytes())?;
    manifest.write(&stage.out)?;
    println!(
        "train: picked n_hidden={} (CE {:.6}) from {} candidate sizes",
        selection.n_hidden,
        selection.report.final_ce,
        selection.curve.len()
    );
    Ok(())
}

pub fn evaluate(stage: &Stage) -> Result<()> {
    let mut manifest = stage.manifest("evaluate");
    let model = stage.load_model(&mut manifest)?;
    let mut accuracy = String::from("snr_db,accuracy\n");
    for (snr_index, &snr_db) in stage.config.test_snrs_db.iter().enumerate() {
        let test = generate_test_dataset(&stage.config, snr_index)?;
        let cm = evaluate_model(&stage.config, &model, &test, snr_db, snr_index)?;
        stage.emit(&mut manifest, &snr_file(snr_db), stage.stamp(&cm.to_csv()).as_bytes())?;
        accuracy.push_str(&format!("{snr_db},{}\n", cm.accuracy()));
    }
    stage.emit(&mut manifest, "accuracy.csv", stage.stamp(&accuracy).as_bytes())?;
    manifest.write(&stage.out)?;
    println!(
        "evaluate: {} SNR points -> accuracy.csv + per-SNR confusion matrices",
        stage.config.test_snrs_db.len()
    );
    Ok(())
}

pub fn sensitivity(stage: &Stage) -> Result<()> {
    let mut manifest = stage.manifest("sensitivity");
    let model = stage.load_model(&mut manifest)?;
    let analysis = generate_analysis_dataset(&stage.config)?;
    let result = run_sensitivity(&model, &analysis)?;
    stage.emit(&mut manifest, "sensitivity.csv", stage.stamp(&result.to_csv()).as_bytes())?;
    manifest.write(&stage.out)?;
    println!(
        "sensitivity: {} classes x {} parameters at {} dB",
        result.classes.len(),
        stage.config.mode.feature_count(),
        stage.config.sensitivity_snr_db
    );
    Ok(())
}

pub fn relieff(stage: &Stage) -> Result<()> {
    let mut manifest = stage.manifest("relieff");
    let analysis = generate_analysis_dataset(&stage.config)?;
    let result = run_relieff(&stage.config, &analysis)?;
    stage.emit(&mut manifest, "relieff.csv", stage.stamp(&result.to_csv()).as_bytes())?;
    manifest.write(&stage.out)?;
    let above = result.weights.iter().filter(|&&w| w > result.tau).count();
    println!(
        "relieff: {above} of {} weights above tau {:.6}",
        result.weights.len(),
        result.tau
    );
    Ok(())
}

pub fn report(stage: &Stage) -> Result<()> {
    let mut manifest = stage.manifest("report");
    let mut bundle = serde_json::Map::new();
    bundle.insert("config_hash".into(), Value::from(stage.config_hash.clone()));
    bundle.insert("master_seed".into(), Value::from(stage.config.master_seed));
    bundle.insert("family".into(), serde_json::to_value(stage.config.family)?);
    bundle.insert("mode".into(), serde_json::to_value(stage.config.mode)?);

    let mut found = 0usize;
    let singles = [
        ("architecture", "architecture.csv"),
        ("accuracy", "accuracy.csv"),
        ("sensitivity", "sensitivity.csv"),
        ("relieff", "relieff.csv"),
    ];
    for (key, name) in singles {
        if let Some(text) = intake_optional(stage, &mut manifest, name)? {
            bundle.insert(key.into(), io::csv_to_json(&text)?);
            found += 1;
        }
    }
    let mut confusion = serde_json::Map::new();
    for &snr_db in &stage.config.test_snrs_db {
        if let Some(text) = intake_optional(stage, &mut manifest, &snr_file(snr_db))? {
            confusion.insert(format!("{snr_db}"), io::csv_to_json(&text)?);
            found += 1;
        }
    }
    if !confusion.is_empty() {
        bundle.insert("confusion".into(), Value::Object(confusion));
    }
    if found == 0 {
        return Err(Error::Dataset(format!(
            "no stage CSVs in {}; run generate/train/evaluate first",
            stage.out.display()
        )));
    }

    let mut text = serde_json::to_string_pretty(&Value::Object(bundle))?;
    text.push('\n');
    stage.emit(&mut manifest, "report.json", text.as_bytes())?;
    manifest.write(&stage.out)?;
    println!("report: merged {found} tables into report.json");
    Ok(())
}

fn intake_optional(
    stage: &Stage,
    manifest: &mut RunManifest,
    name: &str,
) -> Result<Option<String>> {
    if stage.out.join(name).exists() {
        stage.intake(manifest, name).map(Some)
    } else {
        Ok(None)
    }
}

/// Replay every manifest found in `--out` into a scratch directory and
/// require byte-identical regeneration; also flag artifacts that have
/// drifted on disk since their manifest was written.
pub fn verify(args: &StageArgs) -> Result<()> {
    if args.config.is_some()
        || args.seed.is_some()
        || args.mode.is_some()
        || args.pulse.is_some()
        || args.snr_db.is_some()
    {
        return Err(Error::Validation(
            "verify replays the recorded manifests; only --out and --jobs apply".into(),
        ));
    }
    let out = &args.out;
    let mut manifests = Vec::new();
    for command in REPLAY_ORDER {
        if let Some(m) = RunManifest::read(out, command)? {
            if m.command != command {
                return Err(Error::Verification(format!(
                    "{} claims to be '{}'",
                    RunManifest::file_name(command),
                    m.command
                )));
            }
            manifests.push(m);
        }
    }
    if manifests.is_empty() {
        return Err(Error::Verification(format!("no manifests in {}", out.display())));
    }

    let mut problems = Vec::new();
    for m in &manifests {
        for (name, want) in &m.outputs {
            match fs::read(out.join(name)) {
                Ok(bytes) if io::sha256_hex(&bytes) == *want => {}
                Ok(_) => problems.push(format!("{name}: changed on disk since {} ran", m.command)),
                Err(_) => problems.push(format!("{name}: missing from {}", out.display())),
            }
        }
    }

    let scratch = out.join(".verify");
    let _ = fs::remove_dir_all(&scratch);
    let mut replayed = true;
    for m in &manifests {
        if let Err(e) = replay(m, &scratch) {
            problems.push(format!("replaying {}: {e}", m.command));
            replayed = false;
            break;
        }
    }

    let mut artifacts = 0usize;
    if replayed {
        for m in &manifests {
            for (name, want) in &m.outputs {
                artifacts += 1;
                match fs::read(scratch.join(name)) {
                    Ok(bytes) if io::sha256_hex(&bytes) == *want => {}
                    Ok(_) => problems.push(format!("{name}: replay produced different bytes")),
                    Err(_) => problems.push(format!("{name}: replay produced no file")),
                }
            }
        }
    }
    let _ = fs::remove_dir_all(&scratch);

    if !problems.is_empty() {
        return Err(Error::Verification(format!(
            "{} problem(s):\n  {}",
            problems.len(),
            problems.join("\n  ")
        )));
    }
    println!(
        "verify: {} manifest(s), {artifacts} artifact(s) regenerated byte-identically",
        manifests.len()
    );
    Ok(())
}

fn replay(m: &RunManifest, scratch: &Path) -> Result<()> {
    m.config
        .validate()
        .map_err(|e| Error::Verification(format!("embedded config invalid: {e}")))?;
    let config_hash = m.config.config_hash()?;
    if config_hash != m.config_hash {
        return Err(Error::Verification(format!(
            "embedded config hashes to {config_hash}, manifest records {}",
            m.config_hash
        )));
    }
    let stage =
        Stage { config: m.config.clone(), config_hash, out: scratch.to_path_buf() };
    match m.command.as_str() {
        "generate" => generate(&stage),
        "train" => train(&stage),
        "evaluate" => evaluate(&stage),
        "sensitivity" => sensitivity(&stage),
        "relieff" => relieff(&stage),
        "report" => report(&stage),
        other => Err(Error::Verification(format!("unknown command '{other}'"))),
    }
}
