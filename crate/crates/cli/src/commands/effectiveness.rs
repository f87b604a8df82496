use std::path::PathBuf;

use clap::Args;
use effbench_core::io::{read_results, MetricKind};
use effbench_core::metrics::{effectiveness_by_dataset, render_table};
use effbench_core::{Error, Result};

use crate::output::Output;

#[derive(Debug, Args)]
pub struct EffectivenessArgs {
    /// Result records as a JSON array or JSON lines.
    #[arg(long)]
    results: PathBuf,

    /// Number of label classes of the dataset(s).
    #[arg(long)]
    classes: usize,

    /// Which records to use: accuracy or auc.
    #[arg(long, default_value = "accuracy")]
    metric: MetricKind,

    /// Scores are percentages (0-100).
    #[arg(long)]
    percent: bool,
}

pub fn run(args: EffectivenessArgs, out: &Output) -> Result<()> {
    if args.classes < 2 {
        return Err(Error::InvalidClassCount(args.classes));
    }
    let records: Vec<_> = read_results(&args.results, args.percent)?
        .into_iter()
        .filter(|r| r.metric == args.metric)
        .collect();
    if records.is_empty() {
        return Err(Error::Config(format!(
            "{} holds no {} records",
            args.results.display(),
            args.metric
        )));
    }
    let reports = effectiveness_by_dataset(&records, |_| args.classes)?;
    out.plot(
        "dataset,effectiveness",
        reports.iter().map(|r| format!("{},{}", r.dataset, r.total_effectiveness)),
    )?;
    out.emit(&reports, || {
        let mut text = render_table(&reports);
        for r in &reports {
            for note in &r.notes {
                text.push_str(&format!("note ({}): {note}\n", r.dataset));
            }
        }
        text
    })
}
