use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetSource {
    TuFile,
    Synthetic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub name: String,
    pub graph_count: usize,
    pub class_count: usize,
    pub has_attributes: bool,
    pub source: DatasetSource,
    /// Generator inputs for synthetic datasets, kept as opaque JSON.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generation_spec: Option<serde_json::Value>,
}

impl DatasetManifest {
    pub fn validate(&self) -> Result<()> {
        if self.graph_count < 1 {
            return Err(Error::schema("graph_count", "must be at least 1"));
        }
        if self.class_count < 2 {
            return Err(Error::schema("class_count", "must be at least 2"));
        }
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let manifest: Self = serde_json::from_str(&fs::read_to_string(path)?)?;
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        self.validate()?;
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }
}
