//! TU flat-file datasets.
//!
//! A dataset `DS` is a set of sibling files:
//!
//! * `DS_A.txt`: one `i, j` line per directed edge, 1-based global node ids.
//! * `DS_graph_indicator.txt`: line `i` holds the 1-based graph id of node `i`.
//! * `DS_graph_labels.txt`: line `g` holds the class label of graph `g`.
//! * `DS_node_labels.txt` (optional): line `i` holds the label of node `i`.
//!
//! Writers emit every undirected edge in both directions, sorted, so output
//! is byte-stable for a given dataset.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::io::manifest::{DatasetManifest, DatasetSource};

#[derive(Debug, Clone, PartialEq)]
pub struct TuDataset {
    pub name: String,
    pub graphs: Vec<Graph>,
    /// Remapped to `0..class_count`, preserving the order of the original labels.
    pub labels: Vec<usize>,
    /// Original label values, indexed by remapped label.
    pub label_values: Vec<i64>,
    /// Per graph, per node; parsed when present but not used by the models.
    pub node_labels: Option<Vec<Vec<i64>>>,
    pub manifest: DatasetManifest,
}

fn file(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.file_name().unwrap_or_default().to_os_string();
    name.push(format!("_{suffix}.txt"));
    prefix.with_file_name(name)
}

/// Accepts either the prefix `dir/DS` or a directory holding exactly one
/// `*_A.txt` file.
pub fn resolve_prefix(path: &Path) -> Result<PathBuf> {
    if !path.is_dir() {
        return Ok(path.to_path_buf());
    }
    let mut found = Vec::new();
    for entry in fs::read_dir(path)? {
        let name = entry?.file_name().to_string_lossy().into_owned();
        if let Some(ds) = name.strip_suffix("_A.txt") {
            found.push(ds.to_string());
        }
    }
    found.sort();
    match found.as_slice() {
        [one] => Ok(path.join(one)),
        [] => Err(Error::MissingFile(path.join("<DS>_A.txt"))),
        _ => Err(Error::Config(format!(
            "{} holds several datasets ({}); pass a prefix",
            path.display(),
            found.join(", ")
        ))),
    }
}

fn read_required(path: &Path) -> Result<String> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    Ok(fs::read_to_string(path)?)
}

/// Non-blank lines with their 1-based line numbers.
fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_int(path: &Path, line: usize, token: &str) -> Result<i64> {
    token.trim().parse::<i64>().map_err(|_| Error::MalformedLine {
        path: path.to_path_buf(),
        line,
        detail: format!("`{}` is not an integer", token.trim()),
    })
}

fn parse_id(path: &Path, line: usize, token: &str) -> Result<usize> {
    let v = parse_int(path, line, token)?;
    if v < 1 {
        return Err(Error::MalformedLine {
            path: path.to_path_buf(),
            line,
            detail: format!("ids are 1-based, got {v}"),
        });
    }
    Ok(v as usize)
}

fn parse_column(path: &Path, text: &str) -> Result<Vec<i64>> {
    numbered_lines(text)
        .map(|(line, l)| {
            let first = l.split(',').next().unwrap_or(l);
            parse_int(path, line, first)
        })
        .collect()
}

pub fn read_tu(path: &Path) -> Result<TuDataset> {
    let prefix = resolve_prefix(path)?;
    let name = prefix
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();

    let indicator_path = file(&prefix, "graph_indicator");
    let labels_path = file(&prefix, "graph_labels");
    let edges_path = file(&prefix, "A");
    let indicator_text = read_required(&indicator_path)?;
    let labels_text = read_required(&labels_path)?;
    let edges_text = read_required(&edges_path)?;

    let raw_labels = parse_column(&labels_path, &labels_text)?;
    let graph_count = raw_labels.len();
    if graph_count == 0 {
        return Err(Error::EmptyDataset);
    }

    // node_graph[i] = 0-based graph of 0-based node i; graph nodes must be contiguous.
    let mut node_graph = Vec::new();
    for (line, l) in numbered_lines(&indicator_text) {
        let g = parse_id(&indicator_path, line, l)?;
        if g > graph_count {
            return Err(Error::InconsistentIndicator(format!(
                "line {line}: graph id {g} but only {graph_count} graph labels"
            )));
        }
        if let Some(&prev) = node_graph.last() {
            if g - 1 < prev {
                return Err(Error::InconsistentIndicator(format!(
                    "line {line}: graph id {g} after {}; nodes of a graph must be contiguous",
                    prev + 1
                )));
            }
        }
        node_graph.push(g - 1);
    }
    let total_nodes = node_graph.len();
    let mut offsets = vec![usize::MAX; graph_count];
    let mut sizes = vec![0usize; graph_count];
    for (node, &g) in node_graph.iter().enumerate() {
        if offsets[g] == usize::MAX {
            offsets[g] = node;
        }
        sizes[g] += 1;
    }
    if let Some(g) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::InconsistentIndicator(format!("graph {} has no nodes", g + 1)));
    }

    let mut edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); graph_count];
    let mut self_loops = 0usize;
    for (line, l) in numbered_lines(&edges_text) {
        let mut parts = l.split(',');
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::MalformedLine {
                path: edges_path.clone(),
                line,
                detail: "expected `i, j`".into(),
            });
        };
        let (a, b) = (parse_id(&edges_path, line, a)?, parse_id(&edges_path, line, b)?);
        for node in [a, b] {
            if node > total_nodes {
                return Err(Error::DanglingNode {
                    path: edges_path.clone(),
                    line,
                    node,
                });
            }
        }
        let (a, b) = (a - 1, b - 1);
        let g = node_graph[a];
        if node_graph[b] != g {
            return Err(Error::InconsistentIndicator(format!(
                "{}:{line}: edge joins graphs {} and {}",
                edges_path.display(),
                g + 1,
                node_graph[b] + 1
            )));
        }
        if a == b {
            self_loops += 1;
            continue;
        }
        edges[g].push((a - offsets[g], b - offsets[g]));
    }
    if self_loops > 0 {
        log::warn!("{name}: dropped {self_loops} self-loop lines");
    }

    let graphs = edges
        .into_iter()
        .zip(&sizes)
        .map(|(e, &n)| Graph::new_dedup(n, e))
        .collect::<Result<Vec<_>>>()?;

    let label_values: Vec<i64> = raw_labels.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let labels: Vec<usize> = raw_labels
        .iter()
        .map(|v| label_values.binary_search(v).expect("value collected above"))
        .collect();

    let node_labels_path = file(&prefix, "node_labels");
    let node_labels = if node_labels_path.exists() {
        let column = parse_column(&node_labels_path, &fs::read_to_string(&node_labels_path)?)?;
        if column.len() != total_nodes {
            return Err(Error::InconsistentIndicator(format!(
                "{} node labels for {total_nodes} nodes",
                column.len()
            )));
        }
        Some(
            offsets
                .iter()
                .zip(&sizes)
                .map(|(&o, &s)| column[o..o + s].to_vec())
                .collect(),
        )
    } else {
        None
    };

    let manifest_path = manifest_path(&prefix);
    let manifest = if manifest_path.exists() {
        DatasetManifest::read(&manifest_path)?
    } else {
        DatasetManifest {
            name: name.clone(),
            graph_count,
            class_count: label_values.len(),
            has_attributes: node_labels.is_some(),
            source: DatasetSource::TuFile,
            generation_spec: None,
        }
    };
    if manifest.graph_count != graph_count {
        return Err(Error::InconsistentIndicator(format!(
            "manifest lists {} graphs, files hold {graph_count}",
            manifest.graph_count
        )));
    }

    Ok(TuDataset {
        name,
        graphs,
        labels,
        label_values,
        node_labels,
        manifest,
    })
}

pub fn manifest_path(prefix: &Path) -> PathBuf {
    let mut name = prefix.file_name().unwrap_or_default().to_os_string();
    name.push("_manifest.json");
    prefix.with_file_name(name)
}

/// Renders the three TU files as `(A, graph_indicator, graph_labels)`.
pub fn render_tu(graphs: &[Graph], labels: &[usize]) -> Result<(String, String, String)> {
    if graphs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if graphs.len() != labels.len() {
        return Err(Error::MismatchedRecords(format!(
            "{} graphs but {} labels",
            graphs.len(),
            labels.len()
        )));
    }
    let classes = labels.iter().collect::<BTreeSet<_>>().len();
    if classes < 2 {
        return Err(Error::InvalidClassCount(classes));
    }
    let mut a = String::new();
    let mut indicator = String::new();
    let mut graph_labels = String::new();
    let mut offset = 0;
    for (gi, (g, label)) in graphs.iter().zip(labels).enumerate() {
        for _ in 0..g.node_count() {
            let _ = writeln!(indicator, "{}", gi + 1);
        }
        let mut directed: Vec<(usize, usize)> =
            g.edges().iter().flat_map(|&(u, v)| [(u, v), (v, u)]).collect();
        directed.sort_unstable();
        for (u, v) in directed {
            let _ = writeln!(a, "{}, {}", u + offset + 1, v + offset + 1);
        }
        let _ = writeln!(graph_labels, "{label}");
        offset += g.node_count();
    }
    Ok((a, indicator, graph_labels))
}

/// Writes the TU files for `prefix`, creating the parent directory.
pub fn write_tu(graphs: &[Graph], labels: &[usize], prefix: &Path) -> Result<()> {
    let (a, indicator, graph_labels) = render_tu(graphs, labels)?;
    if let Some(parent) = prefix.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(file(prefix, "A"), a)?;
    fs::write(file(prefix, "graph_indicator"), indicator)?;
    fs::write(file(prefix, "graph_labels"), graph_labels)?;
    Ok(())
}

/// TU files plus `<prefix>_manifest.json`.
pub fn write_dataset(
    graphs: &[Graph],
    labels: &[usize],
    manifest: &DatasetManifest,
    prefix: &Path,
) -> Result<()> {
    manifest.validate()?;
    write_tu(graphs, labels, prefix)?;
    manifest.write(&manifest_path(prefix))
}
