//! Method evaluation records.
//!
//! Files hold one JSON object per line. A JSON array of the same objects is
//! also accepted on read. Numbers are written in shortest round-trip decimal,
//! so write -> read -> write is byte-stable.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which input information a method consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum InfoType {
    /// Structure only.
    S,
    /// Node or edge attributes.
    A,
}

impl fmt::Display for InfoType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InfoType::S => "S",
            InfoType::A => "A",
        })
    }
}

impl FromStr for InfoType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "S" | "s" => Ok(InfoType::S),
            "A" | "a" => Ok(InfoType::A),
            other => Err(Error::schema("info_type", format!("expected S or A, got `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Accuracy,
    #[serde(alias = "auc")]
    AucRoc,
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricKind::Accuracy => "accuracy",
            MetricKind::AucRoc => "auc_roc",
        })
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "accuracy" | "acc" => Ok(MetricKind::Accuracy),
            "auc" | "auc_roc" | "auc-roc" => Ok(MetricKind::AucRoc),
            other => Err(Error::schema("metric", format!("unknown metric `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodRole {
    Baseline,
    Graph,
}

impl MethodRole {
    /// Role implied by a method name when a record does not state one.
    pub fn infer(method: &str) -> Self {
        if method.to_ascii_lowercase().contains("baseline") {
            MethodRole::Baseline
        } else {
            MethodRole::Graph
        }
    }
}

/// Score of one method on one dataset, always on the fractional [0, 1] scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub dataset: String,
    pub method: String,
    pub info_type: InfoType,
    pub metric: MetricKind,
    pub mean: f64,
    pub std: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<MethodRole>,
}

impl ResultRecord {
    pub fn new(
        dataset: impl Into<String>,
        method: impl Into<String>,
        info_type: InfoType,
        role: MethodRole,
        mean: f64,
        std: f64,
    ) -> Self {
        Self {
            dataset: dataset.into(),
            method: method.into(),
            info_type,
            metric: MetricKind::Accuracy,
            mean,
            std,
            role: Some(role),
        }
    }

    pub fn with_metric(mut self, metric: MetricKind) -> Self {
        self.metric = metric;
        self
    }

    pub fn role(&self) -> MethodRole {
        self.role.unwrap_or_else(|| MethodRole::infer(&self.method))
    }

    pub fn validate(&self) -> Result<()> {
        if self.dataset.is_empty() {
            return Err(Error::schema("dataset", "must not be empty"));
        }
        if self.method.is_empty() {
            return Err(Error::schema("method", "must not be empty"));
        }
        if !(0.0..=1.0).contains(&self.mean) {
            return Err(Error::schema(
                "mean",
                format!("{} is outside [0, 1] (use the percent option for 0-100 inputs)", self.mean),
            ));
        }
        if !self.std.is_finite() || self.std < 0.0 {
            return Err(Error::schema("std", format!("{} must be finite and >= 0", self.std)));
        }
        Ok(())
    }

    fn from_percent(mut self) -> Self {
        self.mean /= 100.0;
        self.std /= 100.0;
        self
    }
}

/// Parses records from text. With `percent`, means and stds are divided by
/// 100 before validation.
pub fn parse_results(text: &str, percent: bool) -> Result<Vec<ResultRecord>> {
    let trimmed = text.trim_start();
    let raw: Vec<ResultRecord> = if trimmed.starts_with('[') {
        serde_json::from_str(trimmed).map_err(schema_error)?
    } else {
        text.lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                serde_json::from_str(l).map_err(|e| {
                    let Error::Schema { field, detail } = schema_error(e) else {
                        unreachable!()
                    };
                    Error::schema(field, format!("line {}: {detail}", i + 1))
                })
            })
            .collect::<Result<_>>()?
    };
    raw.into_iter()
        .map(|r| {
            let r = if percent { r.from_percent() } else { r };
            r.validate()?;
            Ok(r)
        })
        .collect()
}

fn schema_error(e: serde_json::Error) -> Error {
    let msg = e.to_string();
    let field = msg
        .split('`')
        .nth(1)
        .filter(|_| msg.contains("field"))
        .unwrap_or("record")
        .to_string();
    Error::schema(field, msg)
}

pub fn read_results(path: &Path, percent: bool) -> Result<Vec<ResultRecord>> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    parse_results(&fs::read_to_string(path)?, percent)
}

pub fn results_to_string(records: &[ResultRecord]) -> Result<String> {
    let mut out = String::new();
    for r in records {
        r.validate()?;
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn write_results(records: &[ResultRecord], path: &Path) -> Result<()> {
    fs::write(path, results_to_string(records)?)?;
    Ok(())
}
