//! JSON configuration files and `key=value` overrides.

use std::fs;
use std::path::{Path, PathBuf};

use orgsim_core::params::NUMERIC_PARAMS;
use orgsim_core::ExperimentConfig;
use serde_json::Value;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}:{line}:{column}: {message}")]
    Parse {
        origin: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid value for `{field}`: {reason}")]
    Validation { field: String, reason: String },
}

impl From<orgsim_core::Error> for ConfigError {
    fn from(e: orgsim_core::Error) -> Self {
        match e {
            orgsim_core::Error::Config { field, reason } => ConfigError::Validation { field, reason },
            other => ConfigError::Validation {
                field: "config".into(),
                reason: other.to_string(),
            },
        }
    }
}

fn parse_error(origin: &str, e: serde_json::Error) -> ConfigError {
    ConfigError::Parse {
        origin: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// Parses JSON text into a config; missing fields take their defaults.
/// Does not validate value ranges.
pub fn from_json_str(text: &str, origin: &str) -> Result<ExperimentConfig, ConfigError> {
    serde_json::from_str(text).map_err(|e| parse_error(origin, e))
}

/// Splits override arguments into `key=value` pairs. A single argument may
/// hold several comma-separated pairs (`a=1,b=2`); commas inside a value
/// (`sweep=[...]`) stay with that value.
pub fn split_overrides<S: AsRef<str>>(args: &[S]) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out: Vec<(String, String)> = Vec::new();
    for arg in args {
        let mut pieces: Vec<String> = Vec::new();
        for piece in arg.as_ref().split(',') {
            let starts_pair = piece.split_once('=').is_some_and(|(k, _)| {
                !k.is_empty() && k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
            });
            match pieces.last_mut() {
                Some(last) if !starts_pair => {
                    last.push(',');
                    last.push_str(piece);
                }
                _ => pieces.push(piece.to_string()),
            }
        }
        for piece in pieces {
            let (k, v) = piece.split_once('=').ok_or_else(|| ConfigError::Validation {
                field: piece.clone(),
                reason: "override must look like key=value".into(),
            })?;
            out.push((k.trim().to_string(), v.trim().to_string()));
        }
    }
    Ok(out)
}

/// Applies overrides. Keys name top-level fields (`steps`), model fields
/// (`rho` or `model.rho`). Values are JSON literals; anything that does not
/// parse as JSON is taken as a string.
pub fn apply_overrides(
    config: &ExperimentConfig,
    overrides: &[(String, String)],
) -> Result<ExperimentConfig, ConfigError> {
    let mut doc = serde_json::to_value(config).expect("config serializes");
    let model_keys: Vec<String> = match &doc["model"] {
        Value::Object(m) => m.keys().cloned().collect(),
        _ => Vec::new(),
    };
    for (key, raw) in overrides {
        let value: Value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.clone()));
        let root = doc.as_object_mut().expect("config is an object");
        let (target, field) = match key.strip_prefix("model.") {
            Some(field) => (Some("model"), field),
            None if root.contains_key(key.as_str()) && key != "model" => (None, key.as_str()),
            None if model_keys.iter().any(|k| k == key) => (Some("model"), key.as_str()),
            None => {
                return Err(ConfigError::Validation {
                    field: key.clone(),
                    reason: "unknown configuration key".into(),
                })
            }
        };
        match target {
            Some(section) => {
                let model = root
                    .get_mut(section)
                    .and_then(Value::as_object_mut)
                    .expect("model section is an object");
                if !model.contains_key(field) {
                    return Err(ConfigError::Validation {
                        field: key.clone(),
                        reason: "unknown model parameter".into(),
                    });
                }
                model.insert(field.to_string(), value);
            }
            None => {
                root.insert(field.to_string(), value);
            }
        }
    }
    serde_json::from_value(doc).map_err(|e| ConfigError::Validation {
        field: "overrides".into(),
        reason: e.to_string(),
    })
}

/// Reads a config file (or the defaults when `path` is `None`), applies the
/// overrides and validates the result.
pub fn parse_config(path: Option<&Path>, overrides: &[String]) -> Result<ExperimentConfig, ConfigError> {
    let base = match path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|source| ConfigError::Io {
                path: p.to_path_buf(),
                source,
            })?;
            from_json_str(&text, &p.display().to_string())?
        }
        None => ExperimentConfig::default(),
    };
    let pairs = split_overrides(overrides)?;
    let config = apply_overrides(&base, &pairs)?;
    config.validate()?;
    Ok(config)
}

/// Pretty JSON of the default configuration.
pub fn defaults_json() -> String {
    serde_json::to_string_pretty(&ExperimentConfig::default()).expect("config serializes")
}

/// Whether `name` can be swept.
pub fn is_sweepable(name: &str) -> bool {
    NUMERIC_PARAMS.contains(&name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_default() {
        assert_eq!(from_json_str("{}", "x").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn malformed_json_reports_line() {
        let err = from_json_str("{\n  \"steps\": 5,\n  oops\n}", "cfg.json").unwrap_err();
        match err {
            ConfigError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_key_is_rejected() {
        assert!(from_json_str("{\"stepz\": 5}", "x").is_err());
        assert!(from_json_str("{\"model\": {\"rhoo\": 0.5}}", "x").is_err());
        let err = parse_config(None, &["nonsense=1".into()]).unwrap_err();
        assert!(matches!(err, ConfigError::Validation { field, .. } if field == "nonsense"));
    }

    #[test]
    fn override_out_of_range() {
        let err = parse_config(None, &["rho=1.5".into()]).unwrap_err();
        assert!(
            matches!(err, ConfigError::Validation { ref field, .. } if field == "rho"),
            "{err}"
        );
        let err = parse_config(None, &["cn_members_min=5,cn_members_max=3".into()]).unwrap_err();
        assert!(matches!(err, ConfigError::Validation { .. }));
    }

    #[test]
    fn overrides_reach_both_levels() {
        let c = parse_config(
            None,
            &[
                "steps=7".into(),
                "model.pi_cn=0.25".into(),
                "alpha=2".into(),
                "generator=er".into(),
                "n_links=50".into(),
                "sweep=[{\"param\":\"pi_same\",\"values\":[0.2,0.8]}]".into(),
            ],
        )
        .unwrap();
        assert_eq!(c.steps, 7);
        assert_eq!(c.model.pi_cn, 0.25);
        assert_eq!(c.model.alpha, 2.0);
        assert_eq!(c.n_links, 50);
        assert_eq!(c.sweep[0].values, vec![0.2, 0.8]);
        assert!(parse_config(None, &["generator=ws".into()]).is_err());
    }

    #[test]
    fn splitting_keeps_json_commas() {
        let pairs = split_overrides(&["a=1,b=[1,2,3]", "c=x"]).unwrap();
        assert_eq!(
            pairs,
            vec![
                ("a".into(), "1".into()),
                ("b".into(), "[1,2,3]".into()),
                ("c".into(), "x".into())
            ]
        );
        assert!(split_overrides(&["novalue"]).is_err());
    }

    #[test]
    fn defaults_round_trip() {
        let text = defaults_json();
        assert_eq!(from_json_str(&text, "defaults").unwrap(), ExperimentConfig::default());
        assert!(is_sweepable("pi_random"));
    }
}
