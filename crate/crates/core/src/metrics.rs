//! Performance gaps, the complexity factor, dataset effectiveness, and the
//! correlation statistics used to relate graph properties to labels.
//!
//! For one information type with gap `delta`, worst score `r_star` and `c`
//! classes the effectiveness contribution is
//!
//! ```text
//! |delta| / (r_star * (c - 1)) * (1 - r_star) / (1 - 1/c)
//! ```
//!
//! where the second factor is the complexity factor `lambda`. The dataset's
//! effectiveness sums the contributions of the types that have results.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{extract_all, Graph, PropertyName, PropertyVector};
use crate::io::results::{InfoType, MethodRole, MetricKind, ResultRecord};

/// Gap comparisons treat deltas closer than this as tied.
const TIE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRecord {
    pub info_type: InfoType,
    pub graph_method: ResultRecord,
    pub baseline: ResultRecord,
    /// Graph-method score minus baseline score; negative when the graph
    /// method is worse.
    pub delta: f64,
    pub r_star: f64,
}

/// Gap between a graph-aware method and a baseline of the same type.
pub fn performance_gap(graph: &ResultRecord, baseline: &ResultRecord) -> Result<GapRecord> {
    if graph.dataset != baseline.dataset {
        return Err(Error::MismatchedRecords(format!(
            "datasets differ: `{}` vs `{}`",
            graph.dataset, baseline.dataset
        )));
    }
    if graph.info_type != baseline.info_type {
        return Err(Error::MismatchedRecords(format!(
            "information types differ: {} vs {}",
            graph.info_type, baseline.info_type
        )));
    }
    if graph.metric != baseline.metric {
        return Err(Error::MismatchedRecords(format!(
            "metrics differ: {} vs {}",
            graph.metric, baseline.metric
        )));
    }
    Ok(GapRecord {
        info_type: graph.info_type,
        graph_method: graph.clone(),
        baseline: baseline.clone(),
        delta: graph.mean - baseline.mean,
        r_star: graph.mean.min(baseline.mean),
    })
}

/// Picks the best graph-aware method of the type (largest signed gap against
/// the type's single baseline). Ties go to the higher graph-method score, then
/// to the lexicographically smaller method name.
pub fn select_best_gap(records: &[ResultRecord], info_type: InfoType) -> Result<GapRecord> {
    let of_type: Vec<&ResultRecord> = records.iter().filter(|r| r.info_type == info_type).collect();
    let baselines: Vec<&&ResultRecord> =
        of_type.iter().filter(|r| r.role() == MethodRole::Baseline).collect();
    let baseline = match baselines.as_slice() {
        [] => return Err(Error::NoBaseline(info_type.to_string())),
        [one] => **one,
        _ => {
            return Err(Error::MismatchedRecords(format!(
                "{} baselines for type {info_type}, expected exactly one",
                baselines.len()
            )))
        }
    };
    let mut best: Option<GapRecord> = None;
    for candidate in of_type.iter().filter(|r| r.role() == MethodRole::Graph) {
        let gap = performance_gap(candidate, baseline)?;
        let better = match &best {
            None => true,
            Some(cur) => {
                let (a, b) = (gap.delta, cur.delta);
                if (a - b).abs() > TIE_EPS {
                    a > b
                } else if gap.graph_method.mean != cur.graph_method.mean {
                    gap.graph_method.mean > cur.graph_method.mean
                } else {
                    gap.graph_method.method < cur.graph_method.method
                }
            }
        };
        if better {
            best = Some(gap);
        }
    }
    best.ok_or_else(|| Error::NoGraphMethod(info_type.to_string()))
}

/// `lambda = (1 - r_star) / (1 - 1/classes)`.
pub fn complexity_factor(r_star: f64, classes: usize) -> Result<f64> {
    if classes < 2 {
        return Err(Error::InvalidClassCount(classes));
    }
    if !(0.0..=1.0).contains(&r_star) {
        return Err(Error::schema("r_star", format!("{r_star} is outside [0, 1]")));
    }
    Ok((1.0 - r_star) / (1.0 - 1.0 / classes as f64))
}

/// Effectiveness contribution of a single gap.
pub fn effectiveness_term(delta: f64, r_star: f64, classes: usize) -> Result<f64> {
    let lambda = complexity_factor(r_star, classes)?;
    if r_star <= 0.0 {
        return Err(Error::ZeroRStar);
    }
    Ok(delta.abs() / (r_star * (classes as f64 - 1.0)) * lambda)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeEffectiveness {
    pub graph_method: String,
    pub baseline: String,
    pub delta: f64,
    pub r_star: f64,
    pub lambda: f64,
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectivenessReport {
    pub dataset: String,
    pub class_count: usize,
    pub metric: MetricKind,
    pub per_type: BTreeMap<InfoType, TypeEffectiveness>,
    pub total_effectiveness: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl EffectivenessReport {
    pub fn contribution(&self, info_type: InfoType) -> Option<f64> {
        self.per_type.get(&info_type).map(|t| t.contribution)
    }
}

/// Sums per-type contributions. Types without a gap contribute nothing and
/// are noted in the report.
pub fn effectiveness(gaps: &[GapRecord], classes: usize) -> Result<EffectivenessReport> {
    let first = gaps.first().ok_or(Error::EmptyDataset)?;
    let dataset = first.graph_method.dataset.clone();
    let metric = first.graph_method.metric;
    let mut per_type = BTreeMap::new();
    for gap in gaps {
        if gap.graph_method.dataset != dataset || gap.graph_method.metric != metric {
            return Err(Error::MismatchedRecords(
                "gaps must share one dataset and metric".into(),
            ));
        }
        if per_type.contains_key(&gap.info_type) {
            return Err(Error::MismatchedRecords(format!(
                "more than one gap for type {}",
                gap.info_type
            )));
        }
        let contribution = effectiveness_term(gap.delta, gap.r_star, classes)?;
        per_type.insert(
            gap.info_type,
            TypeEffectiveness {
                graph_method: gap.graph_method.method.clone(),
                baseline: gap.baseline.method.clone(),
                delta: gap.delta,
                r_star: gap.r_star,
                lambda: complexity_factor(gap.r_star, classes)?,
                contribution,
            },
        );
    }
    let mut notes = Vec::new();
    for t in [InfoType::A, InfoType::S] {
        if !per_type.contains_key(&t) {
            notes.push(format!("no results for type {t}; it contributes 0"));
        }
    }
    if per_type.values().any(|t| t.delta < 0.0) {
        notes.push("a graph method scored below its baseline; |delta| still counts".into());
    }
    let total_effectiveness = per_type.values().map(|t| t.contribution).sum();
    Ok(EffectivenessReport {
        dataset,
        class_count: classes,
        metric,
        per_type,
        total_effectiveness,
        notes,
    })
}

/// Best gap per information type found in `records`, then [`effectiveness`].
pub fn effectiveness_from_records(
    records: &[ResultRecord],
    classes: usize,
) -> Result<EffectivenessReport> {
    let mut gaps = Vec::new();
    for t in [InfoType::A, InfoType::S] {
        if records.iter().any(|r| r.info_type == t) {
            gaps.push(select_best_gap(records, t)?);
        }
    }
    if gaps.is_empty() {
        return Err(Error::EmptyDataset);
    }
    effectiveness(&gaps, classes)
}

/// Effectiveness of one explicit pair of methods per type.
pub fn effectiveness_two_methods(
    pairs: &[(ResultRecord, ResultRecord)],
    classes: usize,
) -> Result<EffectivenessReport> {
    let gaps = pairs
        .iter()
        .map(|(g, b)| performance_gap(g, b))
        .collect::<Result<Vec<_>>>()?;
    effectiveness(&gaps, classes)
}

/// Groups records by dataset (in first-seen order) and reports each.
pub fn effectiveness_by_dataset(
    records: &[ResultRecord],
    classes: impl Fn(&str) -> usize,
) -> Result<Vec<EffectivenessReport>> {
    let mut order: Vec<&str> = Vec::new();
    for r in records {
        if !order.contains(&r.dataset.as_str()) {
            order.push(&r.dataset);
        }
    }
    order
        .into_iter()
        .map(|name| {
            let subset: Vec<ResultRecord> =
                records.iter().filter(|r| r.dataset == name).cloned().collect();
            effectiveness_from_records(&subset, classes(name))
        })
        .collect()
}

/// Plain-text table with the attributed and structural contributions side by
/// side.
pub fn render_table(reports: &[EffectivenessReport]) -> String {
    let width = reports.iter().map(|r| r.dataset.len()).max().unwrap_or(7).max(7);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<width$}  {:>3}  {:>8}  {:>8}  {:>8}  {:>8}  {:>8}",
        "dataset", "|Y|", "delta_A", "E_A", "delta_S", "E_S", "E"
    );
    let cell = |r: &EffectivenessReport, t: InfoType, delta: bool| match r.per_type.get(&t) {
        Some(v) if delta => format!("{:+.4}", v.delta),
        Some(v) => format!("{:.4}", v.contribution),
        None => "NA".to_string(),
    };
    for r in reports {
        let _ = writeln!(
            out,
            "{:<width$}  {:>3}  {:>8}  {:>8}  {:>8}  {:>8}  {:>8.4}",
            r.dataset,
            r.class_count,
            cell(r, InfoType::A, true),
            cell(r, InfoType::A, false),
            cell(r, InfoType::S, true),
            cell(r, InfoType::S, false),
            r.total_effectiveness
        );
    }
    out
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::MismatchedRecords(format!(
            "sequence lengths differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::TooSmall("correlation needs at least two samples".into()));
    }
    Ok(())
}

/// Sample Pearson correlation; undefined when either sequence is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation("a sequence is constant".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// 1-based ranks; tied values share the mean of their positions.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = rank;
        }
        i = j + 1;
    }
    ranks
}

pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Pearson correlation of each property sequence with the labels, `None`
/// where the property (or the label sequence) is constant.
pub type PropertyCorrelations = BTreeMap<PropertyName, Option<f64>>;

pub fn property_label_correlations(graphs: &[Graph], labels: &[usize]) -> Result<PropertyCorrelations> {
    if graphs.len() != labels.len() {
        return Err(Error::MismatchedRecords(format!(
            "{} graphs but {} labels",
            graphs.len(),
            labels.len()
        )));
    }
    correlations_from_vectors(&extract_all(graphs), labels)
}

pub fn correlations_from_vectors(
    vectors: &[PropertyVector],
    labels: &[usize],
) -> Result<PropertyCorrelations> {
    if vectors.len() != labels.len() {
        return Err(Error::MismatchedRecords(format!(
            "{} property vectors but {} labels",
            vectors.len(),
            labels.len()
        )));
    }
    let y: Vec<f64> = labels.iter().map(|&l| l as f64).collect();
    PropertyName::ALL
        .iter()
        .map(|&p| {
            let x: Vec<f64> = vectors.iter().map(|v| v.get(p)).collect();
            match pearson(&x, &y) {
                Ok(r) => Ok((p, Some(r))),
                Err(Error::UndefinedCorrelation(_)) => Ok((p, None)),
                Err(e) => Err(e),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(method: &str, t: InfoType, role: MethodRole, mean: f64) -> ResultRecord {
        ResultRecord::new("MUTAG", method, t, role, mean, 0.0)
    }

    #[test]
    fn gap_examples() {
        let g = performance_gap(
            &rec("GIN", InfoType::S, MethodRole::Graph, 0.8671),
            &rec("baseline", InfoType::S, MethodRole::Baseline, 0.7918),
        )
        .unwrap();
        assert!((g.delta - 0.0753).abs() < 1e-12);
        assert_eq!(g.r_star, 0.7918);

        let g = performance_gap(
            &rec("GIN", InfoType::A, MethodRole::Graph, 0.7097),
            &rec("baseline", InfoType::A, MethodRole::Baseline, 0.7424),
        )
        .unwrap();
        assert!((g.delta + 0.0327).abs() < 1e-12);
        assert_eq!(g.r_star, 0.7097);

        let same = performance_gap(
            &rec("x", InfoType::S, MethodRole::Graph, 0.6),
            &rec("b", InfoType::S, MethodRole::Baseline, 0.6),
        )
        .unwrap();
        assert_eq!(same.delta, 0.0);

        let err = performance_gap(
            &rec("x", InfoType::S, MethodRole::Graph, 0.6),
            &rec("b", InfoType::A, MethodRole::Baseline, 0.6),
        );
        assert!(matches!(err, Err(Error::MismatchedRecords(_))));
    }

    #[test]
    fn best_gap_selection() {
        let records = vec![
            rec("baseline", InfoType::S, MethodRole::Baseline, 0.7918),
            rec("WL-GK", InfoType::S, MethodRole::Graph, 0.8623),
            rec("GIN", InfoType::S, MethodRole::Graph, 0.8671),
            rec("GCN", InfoType::S, MethodRole::Graph, 0.8286),
        ];
        let best = select_best_gap(&records, InfoType::S).unwrap();
        assert_eq!(best.graph_method.method, "GIN");
        assert!((best.delta - 0.0753).abs() < 1e-12);

        let single = select_best_gap(&records[..2], InfoType::S).unwrap();
        assert_eq!(single.graph_method.method, "WL-GK");

        let tie = vec![
            rec("baseline", InfoType::S, MethodRole::Baseline, 0.5),
            rec("below", InfoType::S, MethodRole::Graph, 0.25),
            rec("above", InfoType::S, MethodRole::Graph, 0.75),
        ];
        assert_eq!(select_best_gap(&tie, InfoType::S).unwrap().graph_method.method, "above");
        let named = vec![
            rec("baseline", InfoType::S, MethodRole::Baseline, 0.5),
            rec("zeta", InfoType::S, MethodRole::Graph, 0.75),
            rec("alpha", InfoType::S, MethodRole::Graph, 0.75),
        ];
        assert_eq!(select_best_gap(&named, InfoType::S).unwrap().graph_method.method, "alpha");
        let worse = vec![
            rec("baseline", InfoType::A, MethodRole::Baseline, 0.7424),
            rec("GIN", InfoType::A, MethodRole::Graph, 0.7097),
            rec("GCN", InfoType::A, MethodRole::Graph, 0.7328),
        ];
        let best = select_best_gap(&worse, InfoType::A).unwrap();
        assert_eq!(best.graph_method.method, "GCN");
        assert!(best.delta < 0.0);

        assert!(matches!(select_best_gap(&records[1..], InfoType::S), Err(Error::NoBaseline(_))));
        assert!(matches!(select_best_gap(&records[..1], InfoType::S), Err(Error::NoGraphMethod(_))));
    }

    #[test]
    fn complexity_factor_examples() {
        assert_eq!(complexity_factor(1.0, 2).unwrap(), 0.0);
        assert_eq!(complexity_factor(0.5, 2).unwrap(), 1.0);
        assert!((complexity_factor(0.55, 10).unwrap() - 0.5).abs() < 1e-12);
        assert!(matches!(complexity_factor(0.5, 1), Err(Error::InvalidClassCount(1))));
    }

    #[test]
    fn effectiveness_examples() {
        let records = vec![
            rec("baseline_A", InfoType::A, MethodRole::Baseline, 0.837),
            rec("GIN_A", InfoType::A, MethodRole::Graph, 0.8407),
            rec("GCN_A", InfoType::A, MethodRole::Graph, 0.707),
            rec("baseline_S", InfoType::S, MethodRole::Baseline, 0.7918),
            rec("GIN_S", InfoType::S, MethodRole::Graph, 0.8671),
        ];
        // GCN_A is further from the baseline but GIN_A is the best attributed method.
        let report = effectiveness_from_records(&records, 2).unwrap();
        assert_eq!(report.per_type[&InfoType::A].graph_method, "GIN_A");
        assert!((report.total_effectiveness - 0.0410).abs() <= 0.0005);

        let pairs = vec![
            (records[1].clone(), records[0].clone()),
            (records[4].clone(), records[3].clone()),
        ];
        let report = effectiveness_two_methods(&pairs, 2).unwrap();
        assert!((report.total_effectiveness - 0.0410).abs() <= 0.0005);

        let zero = effectiveness_two_methods(
            &[(
                rec("g", InfoType::S, MethodRole::Graph, 0.7),
                rec("b", InfoType::S, MethodRole::Baseline, 0.7),
            )],
            2,
        )
        .unwrap();
        assert_eq!(zero.total_effectiveness, 0.0);
        assert!(zero.notes.iter().any(|n| n.contains("type A")));

        let e2 = effectiveness_term(0.1, 0.6, 2).unwrap();
        let e10 = effectiveness_term(0.1, 0.6, 10).unwrap();
        assert!(e2 > e10);

        assert!(matches!(effectiveness_term(0.1, 0.0, 2), Err(Error::ZeroRStar)));
    }

    #[test]
    fn pearson_examples() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert!((pearson(&x, &x).unwrap() - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson(&x, &neg).unwrap() + 1.0).abs() < 1e-12);
        // sxy = 11, sxx = 5, syy = 26.
        let r = pearson(&x, &[2.0, 4.0, 5.0, 9.0]).unwrap();
        assert!((r - 11.0 / 130f64.sqrt()).abs() <= 1e-12, "{r}");
        assert!((r - 0.9648).abs() <= 1e-4, "{r}");
        assert!(matches!(pearson(&x, &[1.0; 4]), Err(Error::UndefinedCorrelation(_))));
        assert!(pearson(&x, &x[..3]).is_err());
    }

    #[test]
    fn spearman_examples() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y = [1.0, 8.0, 27.0, 64.0, 125.0];
        assert!((spearman(&x, &y).unwrap() - 1.0).abs() < 1e-12);
        let rev: Vec<f64> = y.iter().rev().copied().collect();
        assert!((spearman(&x, &rev).unwrap() + 1.0).abs() < 1e-12);
        let r = spearman(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap();
        assert!((r - 0.5).abs() < 1e-12);
        assert_eq!(average_ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn table_marks_missing_types() {
        let report = effectiveness_two_methods(
            &[(
                rec("g", InfoType::S, MethodRole::Graph, 0.8),
                rec("b", InfoType::S, MethodRole::Baseline, 0.7),
            )],
            2,
        )
        .unwrap();
        let table = render_table(&[report]);
        assert!(table.lines().nth(1).unwrap().contains("NA"));
    }
}
