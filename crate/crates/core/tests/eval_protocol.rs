use effbench_core::eval::{measure_gaps, run_risk_assessment, EvalConfig, EvalDataset, ModelKind};
use effbench_core::synth::{build_synthetic_dataset, GeneratorConfig, SynKind};
use effbench_core::{seed, Graph};
use rand::seq::SliceRandom;

fn syn_cc(r: f64, n: usize) -> EvalDataset {
    let d = build_synthetic_dataset(SynKind::SynCc, r, n, 2, &GeneratorConfig::default().with_seed(21)).unwrap();
    EvalDataset::with_properties(d.name(), d.graphs, d.labels, 2, d.realized).unwrap()
}

#[test]
fn trees_vs_complete_graphs() {
    let mut graphs = Vec::new();
    let mut labels = Vec::new();
    for i in 0..60 {
        let n = 6 + i % 7;
        if i % 2 == 0 {
            graphs.push(Graph::new(n, (1..n).map(|v| (v / 2, v))).unwrap());
            labels.push(0);
        } else {
            graphs.push(Graph::complete(n).unwrap());
            labels.push(1);
        }
    }
    let data = EvalDataset::new("toy", graphs, labels, 2).unwrap();
    for model in ModelKind::ALL {
        let r = run_risk_assessment(&data, model, &EvalConfig::default(), 5).unwrap();
        assert!(r.mean >= 0.99, "{model}: {}", r.mean);
    }
}

#[test]
fn shuffled_labels_carry_no_signal() {
    let mut data = syn_cc(0.9, 1000);
    data.labels.shuffle(&mut seed::rng(99));
    for model in [ModelKind::DegreeBaseline, ModelKind::PropertyFeatures] {
        let r = run_risk_assessment(&data, model, &EvalConfig::default(), 1).unwrap();
        assert!((r.mean - 0.5).abs() <= 0.05, "{model}: {}", r.mean);
    }
}

#[test]
fn property_classifier_beats_baseline_on_strong_syn_cc() {
    let data = syn_cc(0.9, 1024);
    let m = measure_gaps(&data, &EvalConfig::fast(), 2).unwrap();
    let base = m.result(ModelKind::DegreeBaseline).unwrap().mean;
    let prop = m.result(ModelKind::PropertyFeatures).unwrap().mean;
    assert!(prop >= 0.75, "property classifier {prop}");
    assert!(base <= 0.55, "baseline {base}");
    assert!(m.report.total_effectiveness > 0.0);
}

#[test]
fn weak_syn_cc_stays_near_chance() {
    let data = syn_cc(0.1, 1024);
    let r = run_risk_assessment(&data, ModelKind::PropertyFeatures, &EvalConfig::default(), 2).unwrap();
    assert!(r.mean <= 0.60, "{}", r.mean);
}

#[test]
fn risk_assessment_is_deterministic() {
    let data = syn_cc(0.5, 300);
    let config = EvalConfig::default();
    for model in [ModelKind::PropertyFeatures, ModelKind::WlKernel] {
        let a = run_risk_assessment(&data, model, &config, 4).unwrap();
        let b = run_risk_assessment(&data, model, &config, 4).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn mlp_baseline_matches_logistic_on_one_feature() {
    let data = syn_cc(0.9, 400);
    let config = EvalConfig::default();
    let lr = run_risk_assessment(&data, ModelKind::DegreeBaseline, &config, 3).unwrap();
    let mlp = run_risk_assessment(&data, ModelKind::DegreeMlp, &config, 3).unwrap();
    assert!((lr.mean - mlp.mean).abs() < 0.08, "{} vs {}", lr.mean, mlp.mean);
}
