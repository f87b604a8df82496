use std::fs;
use std::io::BufWriter;
use std::path::PathBuf;

use clap::Args;
use effbench_core::regression::{run_pipeline, RegressionConfig};
use effbench_core::{Error, Result};

use super::{load_dataset, read_json};
use crate::output::{default_out_dir, render, Output};

#[derive(Debug, Args)]
pub struct RegressArgs {
    /// Directory with one sub-directory per dataset.
    #[arg(long)]
    datasets: PathBuf,

    /// Regression settings as JSON.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Where `regression.csv` and `regression_summary.json` go. Defaults to $EFFBENCH_OUT or `.`.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: RegressArgs, seed: u64, out: &Output) -> Result<()> {
    let config: RegressionConfig = match &args.config {
        Some(p) => read_json(p)?,
        None => RegressionConfig::default(),
    };
    if !args.datasets.is_dir() {
        return Err(Error::MissingFile(args.datasets.clone()));
    }
    let mut dirs: Vec<PathBuf> = fs::read_dir(&args.datasets)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();
    let datasets = dirs.iter().map(|d| load_dataset(d)).collect::<Result<Vec<_>>>()?;
    if datasets.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let run = run_pipeline(&datasets, &config, seed)?;
    let root = args.out.unwrap_or_else(default_out_dir);
    fs::create_dir_all(&root)?;
    run.write_csv(BufWriter::new(fs::File::create(root.join("regression.csv"))?))?;
    fs::write(
        root.join("regression_summary.json"),
        serde_json::to_string_pretty(&run.summary)? + "\n",
    )?;

    out.plot(
        "target,prediction",
        run.samples
            .iter()
            .zip(&run.first_predictions)
            .map(|(s, p)| format!("{},{p}", s.target_effectiveness)),
    )?;
    let s = &run.summary;
    out.emit(s, || {
        let rows = vec![vec![
            s.regressor.clone(),
            format!("{:.3} ± {:.3}", s.pearson_mean, s.pearson_std),
            format!("{:.4}", s.p_value_mean),
            format!("{:.3} ± {:.3}", s.spearman_mean, s.spearman_std),
        ]];
        format!(
            "{} samples from {} datasets, {} repeats\n{}",
            s.samples,
            datasets.len(),
            s.repeats.len(),
            render(&["regressor", "pearson", "p_value", "spearman"], &rows)
        )
    })
}
