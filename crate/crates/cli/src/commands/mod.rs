pub mod corr;
pub mod effectiveness;
pub mod evaluate;
pub mod generate;
pub mod regress;

use std::fs;
use std::path::Path;

use effbench_core::eval::EvalDataset;
use effbench_core::io::read_tu;
use effbench_core::{Error, Result};
use serde::de::DeserializeOwned;

pub fn load_dataset(path: &Path) -> Result<EvalDataset> {
    let tu = read_tu(path)?;
    let classes = tu.label_values.len().max(2);
    EvalDataset::new(tu.name, tu.graphs, tu.labels, classes)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    serde_json::from_str(&fs::read_to_string(path)?)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}
