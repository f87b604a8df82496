use std::fs;
use std::path::PathBuf;

use clap::Args;
use effbench_core::io::write_dataset;
use effbench_core::synth::{build_synthetic_dataset, verify_realized_correlation, GeneratorConfig, SynKind};
use effbench_core::Result;
use serde::Serialize;

use super::read_json;
use crate::output::{default_out_dir, fmt_opt, render, Output};

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// syn-degree or syn-cc.
    #[arg(long)]
    kind: SynKind,

    /// Target correlations: `start:end:step`, `start..end` (step 0.1) or a comma list.
    #[arg(long, value_parser = parse_r_list, default_value = "0.1:0.9:0.1")]
    r_list: RList,

    /// Graphs per dataset.
    #[arg(long, default_value_t = 4096)]
    n: usize,

    #[arg(long, default_value_t = 2)]
    classes: usize,

    /// Output directory; one sub-directory per dataset. Defaults to $EFFBENCH_OUT or `.`.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Generator settings as JSON; fields left out keep their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct RList(pub Vec<f64>);

fn number(s: &str) -> std::result::Result<f64, String> {
    s.trim().parse::<f64>().map_err(|_| format!("`{s}` is not a number"))
}

fn snap(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}

pub fn parse_r_list(s: &str) -> std::result::Result<RList, String> {
    let range = |a: f64, b: f64, step: f64| -> std::result::Result<RList, String> {
        if !(step > 0.0) || b < a {
            return Err(format!("bad range `{s}`"));
        }
        let count = ((b - a) / step + 1e-9).floor() as usize;
        Ok(RList((0..=count).map(|i| snap(a + i as f64 * step)).collect()))
    };
    if let Some((a, b)) = s.split_once("..") {
        return range(number(a)?, number(b)?, 0.1);
    }
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, step] => range(number(a)?, number(b)?, number(step)?),
        [single] => {
            let values = single.split(',').map(number).collect::<std::result::Result<Vec<_>, _>>()?;
            Ok(RList(values))
        }
        _ => Err(format!("cannot parse r-list `{s}`")),
    }
}

#[derive(Serialize)]
struct Row {
    dataset: String,
    path: String,
    target_r: f64,
    realized_r: Option<f64>,
    attenuation: Option<f64>,
    realization_misses: usize,
}

#[derive(Serialize)]
struct Summary {
    seed: u64,
    kind: SynKind,
    graphs: usize,
    classes: usize,
    datasets: Vec<Row>,
}

pub fn run(args: GenerateArgs, seed: u64, out: &Output) -> Result<()> {
    let mut config: GeneratorConfig = match &args.config {
        Some(p) => read_json(p)?,
        None => GeneratorConfig::default(),
    };
    config.seed = seed;
    let root = args.out.unwrap_or_else(default_out_dir);
    let property = args.kind.controlled_property();

    let mut rows = Vec::new();
    for &r in &args.r_list.0 {
        let ds = build_synthetic_dataset(args.kind, r, args.n, args.classes, &config)?;
        let name = ds.name();
        let prefix = root.join(&name).join(&name);
        write_dataset(&ds.graphs, &ds.labels, &ds.manifest(), &prefix)?;
        let check = verify_realized_correlation(&ds, property.as_str())?;
        log::info!("wrote {}", prefix.display());
        rows.push(Row {
            dataset: name,
            path: prefix.display().to_string(),
            target_r: r,
            realized_r: check.realized_r,
            attenuation: check.attenuation,
            realization_misses: ds.realization_misses,
        });
    }
    let summary = Summary {
        seed,
        kind: args.kind,
        graphs: args.n,
        classes: args.classes,
        datasets: rows,
    };
    fs::create_dir_all(&root)?;
    fs::write(root.join("sweep.json"), serde_json::to_string_pretty(&summary)? + "\n")?;

    out.plot(
        "target_r,realized_r",
        summary
            .datasets
            .iter()
            .map(|r| format!("{},{}", r.target_r, r.realized_r.map_or(String::from("NA"), |v| v.to_string()))),
    )?;
    out.emit(&summary, || {
        let table: Vec<Vec<String>> = summary
            .datasets
            .iter()
            .map(|r| {
                vec![
                    r.dataset.clone(),
                    format!("{}", r.target_r),
                    fmt_opt(r.realized_r),
                    fmt_opt(r.attenuation),
                    r.realization_misses.to_string(),
                ]
            })
            .collect();
        format!(
            "{} realised Pearson(labels, {property}); datasets in {}\n{}",
            args.kind.as_str(),
            root.display(),
            render(&["dataset", "target_r", "realized_r", "attenuation", "misses"], &table)
        )
    })
}
