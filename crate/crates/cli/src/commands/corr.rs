use std::path::PathBuf;

use clap::Args;
use effbench_core::metrics::{correlations_from_vectors, PropertyCorrelations};
use effbench_core::seed;
use effbench_core::Result;
use rand::seq::SliceRandom;
use serde::Serialize;

use super::load_dataset;
use crate::output::{fmt_opt, render, Output};

const SHUFFLE_TAG: u64 = 0x5348_5546;

#[derive(Debug, Args)]
pub struct CorrArgs {
    /// TU dataset prefix, or a directory holding one dataset.
    #[arg(long)]
    dataset: PathBuf,

    /// Permute the labels first (a no-signal control).
    #[arg(long)]
    shuffle_labels: bool,
}

#[derive(Serialize)]
struct Report {
    dataset: String,
    seed: u64,
    shuffled: bool,
    graphs: usize,
    correlations: PropertyCorrelations,
}

pub fn run(args: CorrArgs, seed: u64, out: &Output) -> Result<()> {
    let data = load_dataset(&args.dataset)?;
    let mut labels = data.labels.clone();
    if args.shuffle_labels {
        labels.shuffle(&mut seed::rng_for(seed, SHUFFLE_TAG, 0));
    }
    let report = Report {
        dataset: data.name.clone(),
        seed,
        shuffled: args.shuffle_labels,
        graphs: labels.len(),
        correlations: correlations_from_vectors(&data.properties, &labels)?,
    };
    out.plot(
        "property,pearson",
        report
            .correlations
            .iter()
            .map(|(p, r)| format!("{p},{}", r.map_or(String::from("NA"), |v| v.to_string()))),
    )?;
    out.emit(&report, || {
        let rows: Vec<Vec<String>> = report
            .correlations
            .iter()
            .map(|(p, r)| vec![p.to_string(), fmt_opt(*r)])
            .collect();
        format!(
            "{} ({} graphs{})\n{}",
            report.dataset,
            report.graphs,
            if report.shuffled { ", labels shuffled" } else { "" },
            render(&["property", "pearson"], &rows)
        )
    })
}
