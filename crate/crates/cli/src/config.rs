//! Config resolution: start from the JSON config file (or an empty
//! document), overlay the command-line flag overrides, then deserialize
//! and validate. Flags therefore win over file keys, and every
//! unspecified key falls back to the library default.

use essc_core::essc::FeatureMode;
use essc_core::experiment::ExperimentConfig;
use essc_core::signal::PulseFamily;
use essc_core::{Error, Result};
use serde_json::Value;

use crate::io;
use crate::StageArgs;

/// Build the resolved experiment config for one subcommand invocation.
pub fn resolve(args: &StageArgs) -> Result<ExperimentConfig> {
    let mut doc = match &args.config {
        Some(path) => {
            let text = io::read_string(path)?;
            serde_json::from_str::<Value>(&text)
                .map_err(|e| Error::Validation(format!("{}: {e}", path.display())))?
        }
        None => Value::Object(Default::default()),
    };
    let map = doc
        .as_object_mut()
        .ok_or_else(|| Error::Validation("config root must be a JSON object".into()))?;

    if let Some(pulse) = args.pulse {
        map.insert("family".into(), to_value(PulseFamily::from(pulse))?);
    }
    if let Some(seed) = args.seed {
        map.insert("master_seed".into(), Value::from(seed));
    }
    if let Some(mode) = args.mode {
        map.insert("mode".into(), to_value(FeatureMode::from(mode))?);
    }
    if let Some(snrs) = &args.snr_db {
        map.insert("test_snrs_db".into(), to_value(snrs)?);
    }
    if !map.contains_key("family") {
        return Err(Error::Validation(
            "no pulse family: pass --pulse or a config file with a \"family\" key".into(),
        ));
    }

    let config: ExperimentConfig =
        serde_json::from_value(doc).map_err(|e| Error::Validation(format!("config: {e}")))?;
    config.validate()?;
    Ok(config)
}

fn to_value<T: serde::Serialize>(v: T) -> Result<Value> {
    serde_json::to_value(v).map_err(Error::from)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{ModeArg, PulseArg};
    use std::path::PathBuf;

    fn bare_args() -> StageArgs {
        StageArgs {
            config: None,
            seed: None,
            mode: None,
            pulse: None,
            snr_db: None,
            jobs: None,
            out: PathBuf::from("out"),
        }
    }

    #[test]
    fn pulse_flag_alone_yields_family_defaults() {
        let mut args = bare_args();
        args.pulse = Some(PulseArg::Gaussian);
        let config = resolve(&args).unwrap();
        assert_eq!(config, ExperimentConfig::default_for(PulseFamily::Gaussian));
    }

    #[test]
    fn family_is_required() {
        let err = resolve(&bare_args()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("--pulse"));
    }

    #[test]
    fn flags_override_file_keys() {
        let dir = std::env::temp_dir().join(format!("essc-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("config.json");
        std::fs::write(
            &path,
            r#"{"family":"sinc","master_seed":3,"mode":"essc30","cycles":2}"#,
        )
        .unwrap();
        let mut args = bare_args();
        args.config = Some(path);
        args.seed = Some(9);
        args.mode = Some(ModeArg::Ssc);
        args.pulse = Some(PulseArg::Chirp);
        args.snr_db = Some(vec![25.0, 12.5]);
        let config = resolve(&args).unwrap();
        assert_eq!(config.family, PulseFamily::Chirp);
        assert_eq!(config.master_seed, 9);
        assert_eq!(config.mode, FeatureMode::Ssc4);
        assert_eq!(config.test_snrs_db, vec![25.0, 12.5]);
        assert_eq!(config.cycles, 2);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn invalid_values_fail_validation_with_exit_2() {
        let dir = std::env::temp_dir().join(format!("essc-config-bad-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("config.json");
        std::fs::write(&path, r#"{"family":"sinc","cycles":0}"#).unwrap();
        let mut args = bare_args();
        args.config = Some(path.clone());
        let err = resolve(&args).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("cycles"));

        std::fs::write(&path, r#"{"family":"ringing"}"#).unwrap();
        let err = resolve(&args).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
