use std::path::PathBuf;

use clap::Args;
use effbench_core::eval::{measure_gaps, EvalConfig, HyperGrid, ModelKind};
use effbench_core::io::{write_results, MetricKind};
use effbench_core::metrics::render_table;
use effbench_core::Result;

use super::{load_dataset, read_json};
use crate::output::{fmt_opt, render, Output};

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// TU dataset prefix, or a directory holding one dataset.
    #[arg(long)]
    dataset: PathBuf,

    /// Comma-separated models: degree-baseline, degree-mlp, property-features, wl-kernel, sp-kernel.
    #[arg(long, value_delimiter = ',')]
    roster: Option<Vec<ModelKind>>,

    /// Outer folds.
    #[arg(long)]
    k: Option<usize>,

    /// Hyperparameter grid as JSON.
    #[arg(long)]
    grid: Option<PathBuf>,

    /// Full evaluation settings as JSON; other flags override it.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Metric the effectiveness report uses.
    #[arg(long)]
    metric: Option<MetricKind>,

    /// Write the result records (JSON lines) here.
    #[arg(long)]
    records: Option<PathBuf>,
}

pub fn run(args: EvaluateArgs, seed: u64, out: &Output) -> Result<()> {
    let mut config: EvalConfig = match &args.config {
        Some(p) => read_json(p)?,
        None => EvalConfig::default(),
    };
    if let Some(roster) = args.roster {
        config.roster = roster;
    }
    if let Some(k) = args.k {
        config.k = k;
    }
    if let Some(p) = &args.grid {
        config.grid = read_json::<HyperGrid>(p)?;
    }
    if let Some(m) = args.metric {
        config.metric = m;
    }
    config.validate()?;

    let data = load_dataset(&args.dataset)?;
    let m = measure_gaps(&data, &config, seed)?;
    if let Some(path) = &args.records {
        write_results(&m.records, path)?;
    }
    out.plot(
        "model,mean,std",
        m.results.iter().map(|r| format!("{},{},{}", r.model, r.mean, r.std)),
    )?;
    out.emit(&m, || {
        let rows: Vec<Vec<String>> = m
            .results
            .iter()
            .map(|r| {
                vec![
                    r.model.to_string(),
                    format!("{:.4}", r.mean),
                    format!("{:.4}", r.std),
                    fmt_opt(r.auc_mean),
                ]
            })
            .collect();
        format!(
            "{} ({}-fold, {} graphs)\n{}\n{}",
            m.dataset,
            config.k,
            data.labels.len(),
            render(&["model", "accuracy", "std", "auc"], &rows),
            render_table(std::slice::from_ref(&m.report))
        )
    })
}
