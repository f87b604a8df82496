use effbench_core::metrics::pearson;
use effbench_core::sampler::{
    discretize_labels, generate_correlated_table, sample_latents, CorrelationSpec, Family, LatentFamily,
    PropertySpec,
};
use proptest::prelude::*;

fn three_property_spec(n: usize) -> CorrelationSpec {
    CorrelationSpec {
        properties: vec![
            PropertySpec { family: Family::Uniform { low: 0.0, high: 1.0 }, target_r: -0.7 },
            PropertySpec { family: Family::Uniform { low: 2.0, high: 8.0 }, target_r: 0.1 },
            PropertySpec { family: Family::Gaussian { mean: 10.0, std: 3.0 }, target_r: 0.7 },
        ],
        label_classes: 2,
        sigma_y: 1.0,
        sample_count: n,
        noise: LatentFamily::Gaussian,
    }
}

#[test]
fn target_correlations_over_seeds() {
    let spec = three_property_spec(4096);
    let mut good = 0;
    for seed in 0..20 {
        let t = generate_correlated_table(&spec, seed).unwrap();
        let ok = spec.properties.iter().zip(&t.property_targets).all(|(p, x)| {
            (pearson(x, &t.continuous_label).unwrap() - p.target_r).abs() <= 0.05
        });
        good += usize::from(ok);
    }
    assert!(good >= 19, "{good} of 20 seeds within tolerance");
}

#[test]
fn latents_are_uncorrelated() {
    let spec = three_property_spec(4096);
    for seed in 0..5 {
        let l = sample_latents(&spec, seed).unwrap();
        let mut all = vec![l.noise.clone()];
        all.extend(l.properties.clone());
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                assert!(pearson(&all[i], &all[j]).unwrap().abs() <= 0.05);
            }
        }
    }
}

#[test]
fn property_marginals_follow_family() {
    let spec = three_property_spec(20000);
    let t = generate_correlated_table(&spec, 3).unwrap();
    let u = &t.property_targets[1];
    assert!(u.iter().all(|&x| (2.0..=8.0).contains(&x)));
    let mean = u.iter().sum::<f64>() / u.len() as f64;
    assert!((mean - 5.0).abs() < 0.05);
    let g = &t.property_targets[2];
    let m = g.iter().sum::<f64>() / g.len() as f64;
    let sd = (g.iter().map(|x| (x - m).powi(2)).sum::<f64>() / g.len() as f64).sqrt();
    assert!((m - 10.0).abs() < 0.1 && (sd - 3.0).abs() < 0.1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn labels_cover_range(y in proptest::collection::vec(-1e3f64..1e3, 2..200), c in 2usize..8) {
        prop_assume!(y.iter().any(|&v| v != y[0]));
        let labels = discretize_labels(&y, c).unwrap();
        prop_assert!(labels.iter().all(|&l| l < c));
        let imax = y.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        let imin = y.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        prop_assert_eq!(labels[imax], c - 1);
        prop_assert_eq!(labels[imin], 0);
    }

    #[test]
    fn labels_are_monotone(y in proptest::collection::vec(-5f64..5.0, 2..100)) {
        prop_assume!(y.iter().any(|&v| v != y[0]));
        let labels = discretize_labels(&y, 4).unwrap();
        for i in 0..y.len() {
            for j in 0..y.len() {
                if y[i] <= y[j] {
                    prop_assert!(labels[i] <= labels[j]);
                }
            }
        }
    }

    #[test]
    fn admissibility(r1 in -1f64..1.0, r2 in -1f64..1.0) {
        let mut spec = three_property_spec(16);
        spec.properties[0].target_r = r1;
        spec.properties[1].target_r = r2;
        spec.properties.truncate(2);
        let ok = generate_correlated_table(&spec, 0).is_ok();
        prop_assert_eq!(ok, r1 * r1 + r2 * r2 <= 1.0 + 1e-12);
    }
}
