//! Experiment manifests: a TOML file or command-line flags, flags winning.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    PoissonF,
    #[serde(rename = "poisson-T")]
    PoissonT,
    PoissonVolume,
    Intrinsic,
    #[serde(rename = "B-constant")]
    BConstant,
    ConeLimit,
    ConicProfile,
    Buchta,
    #[serde(rename = "symmetric-T")]
    SymmetricT,
    SamplerTests,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 10] = [
        ExperimentKind::PoissonF,
        ExperimentKind::PoissonT,
        ExperimentKind::PoissonVolume,
        ExperimentKind::Intrinsic,
        ExperimentKind::BConstant,
        ExperimentKind::ConeLimit,
        ExperimentKind::ConicProfile,
        ExperimentKind::Buchta,
        ExperimentKind::SymmetricT,
        ExperimentKind::SamplerTests,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::PoissonF => "poisson-f",
            ExperimentKind::PoissonT => "poisson-T",
            ExperimentKind::PoissonVolume => "poisson-volume",
            ExperimentKind::Intrinsic => "intrinsic",
            ExperimentKind::BConstant => "B-constant",
            ExperimentKind::ConeLimit => "cone-limit",
            ExperimentKind::ConicProfile => "conic-profile",
            ExperimentKind::Buchta => "buchta",
            ExperimentKind::SymmetricT => "symmetric-T",
            ExperimentKind::SamplerTests => "sampler-tests",
        }
    }

    /// Required and optional parameter names.
    fn schema(self) -> (&'static [&'static str], &'static [&'static str]) {
        match self {
            ExperimentKind::PoissonF | ExperimentKind::PoissonVolume => (&["d", "gamma"], &["c"]),
            ExperimentKind::PoissonT | ExperimentKind::SymmetricT => (&["d", "gamma", "a", "b"], &["c"]),
            ExperimentKind::Intrinsic => (&["d", "gamma", "k"], &["c", "dirs"]),
            ExperimentKind::BConstant => (&["d", "k"], &["inner"]),
            ExperimentKind::ConeLimit => (&["d", "n_grid"], &[]),
            ExperimentKind::ConicProfile => (&["d", "n"], &[]),
            ExperimentKind::Buchta => (&["d", "n", "k"], &[]),
            ExperimentKind::SamplerTests => (&[], &["draws"]),
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown experiment kind `{s}`")))
    }
}

/// A scalar or a list parameter (`n_grid`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Number(f64),
    List(Vec<f64>),
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Number(x) => write!(f, "{x}"),
            ParamValue::List(xs) => {
                let parts: Vec<String> = xs.iter().map(f64::to_string).collect();
                write!(f, "[{}]", parts.join(" "))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(HarnessError::Config(format!("unknown format `{s}`"))),
        }
    }
}

fn default_replicates() -> usize {
    1000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub params: BTreeMap<String, ParamValue>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
    /// Worker threads; `None` uses every core.
    #[serde(default)]
    pub workers: Option<usize>,
    /// Record wall-clock times, which makes reports differ between runs.
    #[serde(default)]
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        ExperimentConfig {
            kind,
            params: BTreeMap::new(),
            replicates: default_replicates(),
            seed: 0,
            output: None,
            format: OutputFormat::Csv,
            workers: None,
            timing: false,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), ParamValue::Number(value));
        self
    }

    pub fn with_list(mut self, key: &str, values: Vec<f64>) -> Self {
        self.params.insert(key.to_string(), ParamValue::List(values));
        self
    }

    /// Checks parameter completeness for the kind, before anything runs.
    pub fn validate(&self) -> Result<()> {
        let (required, optional) = self.kind.schema();
        for key in required {
            if !self.params.contains_key(*key) {
                return Err(HarnessError::Config(format!("{} needs parameter `{key}`", self.kind)));
            }
        }
        for key in self.params.keys() {
            if !required.contains(&key.as_str()) && !optional.contains(&key.as_str()) {
                return Err(HarnessError::Config(format!("{} does not take parameter `{key}`", self.kind)));
            }
        }
        for (key, value) in &self.params {
            match (key.as_str(), value) {
                ("n_grid", ParamValue::List(xs)) => {
                    if xs.is_empty() || xs.iter().any(|x| x.fract() != 0.0 || *x < 1.0) {
                        return Err(HarnessError::Config("n_grid must list positive integers".into()));
                    }
                }
                ("n_grid", _) => return Err(HarnessError::Config("n_grid must be a list".into())),
                (_, ParamValue::List(_)) => {
                    return Err(HarnessError::Config(format!("`{key}` must be a number")))
                }
                ("d" | "k" | "n" | "dirs" | "inner" | "draws", ParamValue::Number(x))
                    if x.fract() != 0.0 || *x < 0.0 =>
                {
                    return Err(HarnessError::Config(format!("`{key}` must be a non-negative integer")))
                }
                (_, ParamValue::Number(x)) if !x.is_finite() => {
                    return Err(HarnessError::Config(format!("`{key}` must be finite")))
                }
                _ => {}
            }
        }
        if self.replicates == 0 {
            return Err(HarnessError::Config("replicates must be positive".into()));
        }
        if self.workers == Some(0) {
            return Err(HarnessError::Config("workers must be positive".into()));
        }
        Ok(())
    }

    pub fn number(&self, key: &str) -> Option<f64> {
        match self.params.get(key) {
            Some(ParamValue::Number(x)) => Some(*x),
            _ => None,
        }
    }

    pub(crate) fn float(&self, key: &str, default: f64) -> f64 {
        self.number(key).unwrap_or(default)
    }

    pub(crate) fn int(&self, key: &str, default: usize) -> usize {
        self.number(key).map_or(default, |x| x as usize)
    }

    pub(crate) fn list(&self, key: &str) -> Vec<usize> {
        match self.params.get(key) {
            Some(ParamValue::List(xs)) => xs.iter().map(|&x| x as usize).collect(),
            _ => Vec::new(),
        }
    }

    /// `key=value` pairs joined by `;`, for report rows.
    pub fn params_label(&self) -> String {
        self.params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_manifest() {
        let cfg = ExperimentConfig::from_toml(
            r#"
            kind = "cone-limit"
            replicates = 50
            seed = 3
            [params]
            d = 2
            n_grid = [5, 10, 20]
            "#,
        )
        .unwrap();
        assert_eq!(cfg.kind, ExperimentKind::ConeLimit);
        assert_eq!(cfg.list("n_grid"), vec![5, 10, 20]);
        assert_eq!(cfg.int("d", 0), 2);
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_incomplete_or_unknown_parameters() {
        let cfg = ExperimentConfig::new(ExperimentKind::PoissonT).with_param("d", 2.0);
        assert!(matches!(cfg.validate(), Err(HarnessError::Config(_))));
        let cfg = ExperimentConfig::new(ExperimentKind::PoissonF)
            .with_param("d", 2.0)
            .with_param("gamma", 2.0)
            .with_param("zeta", 1.0);
        assert!(matches!(cfg.validate(), Err(HarnessError::Config(_))));
        assert!(ExperimentConfig::from_toml("kind = \"nope\"").is_err());
        let cfg = ExperimentConfig::new(ExperimentKind::PoissonF).with_param("d", 2.5).with_param("gamma", 1.0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in ExperimentKind::ALL {
            assert_eq!(kind.name().parse::<ExperimentKind>().unwrap(), kind);
            let cfg = ExperimentConfig::from_toml(&format!("kind = \"{kind}\"")).unwrap();
            assert_eq!(cfg.kind, kind);
        }
    }
}
