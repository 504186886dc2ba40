mod common;

use netmob_core::estimator::mple_with;
use netmob_core::gof::{
    auxiliary, csv_path, gof_at, gof_run, quantile_sorted, read_report, render, svg_path, Family, GofError,
};
use netmob_core::sampler::simulate;
use netmob_core::{DirectedGraph, Model, ModelSpec, NodeTable, SamplerConfig, TermSpec};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn model(n: usize) -> Model {
    let spec = ModelSpec::new(vec![TermSpec::Edges, TermSpec::GwespOtp { decay: 0.5 }]);
    Model::new(&spec, &NodeTable::ordinary(n)).unwrap()
}

#[test]
fn quantiles_are_type_seven() {
    let xs = [1.0, 2.0, 3.0, 4.0, 10.0];
    assert_eq!(quantile_sorted(&xs, 0.5), 3.0);
    assert_eq!(quantile_sorted(&xs, 0.25), 2.0);
    assert!((quantile_sorted(&xs, 0.975) - 9.4).abs() < 1e-12);
    assert_eq!(quantile_sorted(&xs, 0.0), 1.0);
}

#[test]
fn render_and_read_back() {
    let n = 15;
    let m = model(n);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let g = common::random_graph(n, 0.12, &mut rng);
    let fit = mple_with(&g, &m, &Default::default()).unwrap();
    let config = SamplerConfig {
        sample_size: 30,
        ..SamplerConfig::for_nodes(n)
    };
    let report = gof_run(&g, &m, &fit, &config).unwrap();
    assert_eq!(report.families.len(), 5);
    let dir = tempfile::tempdir().unwrap();
    let written = render(&report, dir.path()).unwrap();
    assert_eq!(written.len(), 10);
    for family in Family::ALL {
        assert!(csv_path(dir.path(), family).exists());
        let svg = std::fs::read_to_string(svg_path(dir.path(), family)).unwrap();
        assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    }
    let back = read_report(dir.path()).unwrap();
    assert_eq!(back, report);

    let again = gof_run(&g, &m, &fit, &config).unwrap();
    assert_eq!(again, report);
}

#[test]
fn unconverged_fit_is_refused() {
    let n = 10;
    let m = model(n);
    let g = common::random_graph(n, 0.2, &mut ChaCha8Rng::seed_from_u64(3));
    let mut fit = mple_with(&g, &m, &Default::default()).unwrap();
    fit.converged = false;
    let config = SamplerConfig::for_nodes(n);
    assert!(matches!(gof_run(&g, &m, &fit, &config), Err(GofError::NotConverged)));
}

#[test]
fn missing_csv_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(read_report(dir.path()).is_err());
}

#[test]
fn distance_bucket_includes_unreachable() {
    let n = 6;
    let report = gof_at(&DirectedGraph::empty(n), &model(n), &[-2.0, 0.0], &SamplerConfig {
        sample_size: 10,
        ..SamplerConfig::for_nodes(n)
    })
    .unwrap();
    let dist = report.family(Family::Distance).unwrap();
    assert_eq!(dist.coordinates.last().map(String::as_str), Some("inf"));
    assert_eq!(*dist.observed.last().unwrap(), 30.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn auxiliary_totals(seed in any::<u64>(), n in 3usize..12, t0 in -2.5f64..0.0) {
        let m = model(n);
        let config = SamplerConfig { sample_size: 10, seed, ..SamplerConfig::for_nodes(n) };
        for (g, _) in simulate(&m, &[t0, 0.3], &config, &DirectedGraph::empty(n)).unwrap() {
            let a = auxiliary(&g, &m).unwrap();
            prop_assert_eq!(a.in_degree.iter().sum::<usize>(), n);
            prop_assert_eq!(a.out_degree.iter().sum::<usize>(), n);
            prop_assert_eq!(a.esp.iter().sum::<usize>(), g.edge_count());
            prop_assert_eq!(a.distance.iter().sum::<usize>() + a.unreachable, n * (n - 1));
        }
    }
}
