//! Persistable impairment profiles.
//!
//! Document layout (`format_version` 1):
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "global_enabled": true,
//!   "name": "P4",
//!   "notes": "",
//!   "seed": 42,
//!   "symptoms": [
//!     { "enabled": true, "params": { "cpd": 3 }, "type": "hyperopia" }
//!   ]
//! }
//! ```

use std::path::Path;

use serde_json::{json, Map, Value};

use crate::pipeline::{validate, StackEntry, SymptomStack};
use crate::symptoms::{ParamKind, ParamValue, SymptomConfig, SymptomKind};
use crate::{Error, Result};

pub mod canonical;
mod cycle;
mod presets;

pub use cycle::{interpolate, CyclePlan, Phase};
pub use presets::{preset, presets};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub name: String,
    pub stack: SymptomStack,
    pub seed: u64,
    pub notes: String,
}

fn profile_error(message: impl Into<String>) -> Error {
    Error::Profile {
        version: FORMAT_VERSION,
        message: message.into(),
    }
}

fn known_tags() -> String {
    SymptomKind::ALL
        .iter()
        .map(|k| k.tag())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Parameters of one config as a JSON object keyed by schema name.
pub fn params_to_json(config: &SymptomConfig) -> Value {
    let mut params = Map::new();
    for (spec, value) in config.kind().params().iter().zip(config.values()) {
        let v = match value {
            ParamValue::Number(n) => json!(n),
            ParamValue::Bool(b) => json!(b),
            ParamValue::Choice(c) => json!(c),
        };
        params.insert(spec.name.to_string(), v);
    }
    Value::Object(params)
}

/// Builds a config from a JSON parameter object. Missing extended
/// parameters take their defaults; unknown names are reported in `warnings`.
/// Range checks are left to validation.
pub fn params_from_json(
    kind: SymptomKind,
    params: &Map<String, Value>,
    warnings: &mut Vec<String>,
) -> Result<SymptomConfig> {
    let mut values = Vec::new();
    for spec in kind.params() {
        let Some(raw) = params.get(spec.name) else {
            if spec.extended {
                values.push(spec.default);
                continue;
            }
            return Err(profile_error(format!(
                "{}: missing parameter `{}`",
                kind.tag(),
                spec.name
            )));
        };
        let wrong = || {
            profile_error(format!(
                "{}.{}: expected {}, got {raw}",
                kind.tag(),
                spec.name,
                spec.allowed()
            ))
        };
        let value = match spec.kind {
            ParamKind::Number { .. } => ParamValue::Number(raw.as_f64().ok_or_else(wrong)?),
            ParamKind::Bool => ParamValue::Bool(raw.as_bool().ok_or_else(wrong)?),
            ParamKind::Choice { .. } => {
                ParamValue::Choice(raw.as_str().and_then(|s| spec.option(s)).ok_or_else(wrong)?)
            }
        };
        values.push(value);
    }
    for name in params.keys() {
        if !kind.params().iter().any(|p| p.name == name) {
            warnings.push(format!("{}: ignoring unknown parameter `{name}`", kind.tag()));
        }
    }
    Ok(SymptomConfig::from_values(kind, &values).expect("values follow the schema"))
}

/// One stack entry in document form.
pub fn entry_to_json(entry: &StackEntry) -> Value {
    json!({
        "type": entry.config.kind().tag(),
        "enabled": entry.enabled,
        "params": params_to_json(&entry.config),
    })
}

pub fn entry_from_json(value: &Value, warnings: &mut Vec<String>) -> Result<StackEntry> {
    let obj = value
        .as_object()
        .ok_or_else(|| profile_error("symptom entry must be an object"))?;
    let tag = obj
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| profile_error("symptom entry needs a string `type`"))?;
    let kind = SymptomKind::from_tag(tag).ok_or_else(|| {
        profile_error(format!("unknown symptom `{tag}`; known symptoms: {}", known_tags()))
    })?;
    let enabled = match obj.get("enabled") {
        None => true,
        Some(v) => v
            .as_bool()
            .ok_or_else(|| profile_error(format!("{tag}: `enabled` must be a boolean")))?,
    };
    let empty = Map::new();
    let params = match obj.get("params") {
        None => &empty,
        Some(v) => v
            .as_object()
            .ok_or_else(|| profile_error(format!("{tag}: `params` must be an object")))?,
    };
    for key in obj.keys() {
        if !matches!(key.as_str(), "type" | "enabled" | "params") {
            warnings.push(format!("{tag}: ignoring unknown field `{key}`"));
        }
    }
    Ok(StackEntry {
        config: params_from_json(kind, params, warnings)?,
        enabled,
    })
}

pub fn stack_to_json(stack: &SymptomStack) -> Value {
    Value::Array(stack.entries.iter().map(entry_to_json).collect())
}

impl Profile {
    pub fn new(name: impl Into<String>, stack: SymptomStack, seed: u64) -> Self {
        Profile {
            name: name.into(),
            stack,
            seed,
            notes: String::new(),
        }
    }

    pub fn to_value(&self) -> Value {
        json!({
            "format_version": FORMAT_VERSION,
            "name": self.name,
            "seed": self.seed,
            "notes": self.notes,
            "global_enabled": self.stack.global_enabled,
            "symptoms": stack_to_json(&self.stack),
        })
    }

    /// Canonical document text.
    pub fn to_json(&self) -> String {
        canonical::to_string(&self.to_value())
    }

    /// Parses and validates a document, returning non-fatal warnings.
    pub fn from_value_with_warnings(doc: &Value) -> Result<(Profile, Vec<String>)> {
        let obj = doc
            .as_object()
            .ok_or_else(|| profile_error("document must be a JSON object"))?;
        match obj.get("format_version").and_then(Value::as_u64) {
            Some(v) if v == FORMAT_VERSION as u64 => {}
            Some(v) => {
                return Err(profile_error(format!(
                    "unsupported format_version {v}, expected {FORMAT_VERSION}"
                )))
            }
            None => return Err(profile_error("missing integer `format_version`")),
        }
        let mut warnings = Vec::new();
        let text = |key: &str| -> Result<String> {
            match obj.get(key) {
                None => Ok(String::new()),
                Some(Value::String(s)) => Ok(s.clone()),
                Some(_) => Err(profile_error(format!("`{key}` must be a string"))),
            }
        };
        let name = text("name")?;
        let notes = text("notes")?;
        let seed = match obj.get("seed") {
            None => 0,
            Some(v) => v
                .as_u64()
                .ok_or_else(|| profile_error("`seed` must be a non-negative integer"))?,
        };
        let global_enabled = match obj.get("global_enabled") {
            None => true,
            Some(v) => v
                .as_bool()
                .ok_or_else(|| profile_error("`global_enabled` must be a boolean"))?,
        };
        let entries = match obj.get("symptoms") {
            None => Vec::new(),
            Some(Value::Array(items)) => items
                .iter()
                .map(|item| entry_from_json(item, &mut warnings))
                .collect::<Result<_>>()?,
            Some(_) => return Err(profile_error("`symptoms` must be an array")),
        };
        for key in obj.keys() {
            let known = [
                "format_version",
                "name",
                "notes",
                "seed",
                "global_enabled",
                "symptoms",
            ];
            if !known.contains(&key.as_str()) {
                warnings.push(format!("ignoring unknown field `{key}`"));
            }
        }
        let stack = SymptomStack {
            entries,
            global_enabled,
        };
        let report = validate(&stack);
        if !report.is_ok() {
            return Err(Error::Validation(report));
        }
        Ok((
            Profile {
                name,
                stack,
                seed,
                notes,
            },
            warnings,
        ))
    }

    /// Parses and validates a document; warnings go to the log.
    pub fn from_json(text: &str) -> Result<Profile> {
        let doc: Value =
            serde_json::from_str(text).map_err(|e| profile_error(format!("malformed JSON: {e}")))?;
        let (profile, warnings) = Self::from_value_with_warnings(&doc)?;
        for w in warnings {
            log::warn!("{w}");
        }
        Ok(profile)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Profile> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symptoms::{Cvd, CvdType, Hyperopia, Retinopathy};

    fn sample() -> Profile {
        let mut stack = SymptomStack::default()
            .with(Hyperopia { cpd: 3.5 })
            .with(Cvd {
                kind: CvdType::Tritan,
                severity: 40.0,
            });
        stack.entries.push(StackEntry::disabled(Retinopathy::default()));
        let mut p = Profile::new("sample", stack, 77);
        p.notes = "test".into();
        p
    }

    #[test]
    fn round_trip() {
        let p = sample();
        let text = p.to_json();
        assert_eq!(Profile::from_json(&text).unwrap(), p);
        assert_eq!(Profile::from_json(&text).unwrap().to_json(), text);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.json");
        sample().save(&path).unwrap();
        assert_eq!(Profile::load(&path).unwrap(), sample());
    }

    #[test]
    fn out_of_range_cites_interval() {
        let text = r#"{"format_version":1,"symptoms":[{"type":"hyperopia","params":{"cpd":100}}]}"#;
        let err = Profile::from_json(text).unwrap_err().to_string();
        assert!(err.contains("[0.01,30]"), "{err}");
    }

    #[test]
    fn unknown_symptom_lists_known() {
        let text = r#"{"format_version":1,"symptoms":[{"type":"xray","params":{}}]}"#;
        let err = Profile::from_json(text).unwrap_err().to_string();
        assert!(err.contains("xray") && err.contains("hyperopia") && err.contains("detail_loss"), "{err}");
        assert!(err.contains("format_version 1"), "{err}");
    }

    #[test]
    fn unknown_fields_warn() {
        let text = r#"{"format_version":1,"colour":"red","symptoms":[{"type":"hyperopia","params":{"cpd":3,"sharpness":2}}]}"#;
        let doc: Value = serde_json::from_str(text).unwrap();
        let (p, warnings) = Profile::from_value_with_warnings(&doc).unwrap();
        assert_eq!(p.stack.len(), 1);
        assert_eq!(warnings.len(), 2);
    }

    #[test]
    fn version_is_required() {
        assert!(Profile::from_json(r#"{"symptoms":[]}"#).is_err());
        assert!(Profile::from_json(r#"{"format_version":2}"#).is_err());
    }

    #[test]
    fn extended_params_are_optional() {
        let text = r#"{"format_version":1,"symptoms":[{"type":"metamorph_pointwise","params":{}}]}"#;
        let p = Profile::from_json(text).unwrap();
        assert_eq!(p.stack.entries[0].config, SymptomConfig::default_for(SymptomKind::MetamorphPointwise));
    }
}
