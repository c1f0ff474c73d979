mod common;

use cayley_spectra::generators::interval_cayley;
use cayley_spectra::rng::SplitMix64;
use cayley_spectra::witness::{components, eta_samples, sample_witness_sets, verify_ident};
use cayley_spectra::{
    check_disc, extract_disc_violator, CayleyGraph, Error, ExtractionConfig, ExtractionResult, Graph, Group, Rational,
    Strategy, VertexSet,
};

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn empirical_pair_counts_match_the_convolution() {
    let mut rng = SplitMix64::new(21);
    for _ in 0..6 {
        let g = common::random_cayley(&mut rng, 64);
        let t = g.group().element_at(1 + rng.below(g.order() as u64 - 1) as usize);
        let expected = verify_ident(&g, &t).unwrap().pair_lhs;
        let na = (g.order() * g.degree()) as f64;
        let pairs: Vec<f64> = eta_samples(&g, &t, 99, 2000).unwrap().iter().map(|&e4| (e4 as f64 + na) / 4.0).collect();
        let (mean, se) = mean_and_se(&pairs);
        assert!(
            (mean - expected).abs() <= 5.0 * se.max(1e-9),
            "{:?} t={t}: mean {mean}, expected {expected}, se {se}",
            g.group().moduli()
        );
    }
}

#[test]
fn eta_mean_is_bounded_below_by_the_character_sum() {
    let eps = 0.5;
    for (n, k) in [(64, 8), (48, 5), (60, 4)] {
        let g = interval_cayley(n, k).unwrap();
        let t = g.group().element_at(1);
        let inner = components(g.group(), &t).unwrap().0.on_connection_set(&g);
        let a = g.degree() as f64;
        let n = g.order() as f64;
        assert!(inner.abs() >= eps * a);
        let etas: Vec<f64> = eta_samples(&g, &t, 5, 2000).unwrap().iter().map(|&e4| e4 as f64 / 4.0).collect();
        let (mean, se) = mean_and_se(&etas);
        assert!(mean.abs() >= inner.abs() * n / 8.0 - 5.0 * se, "mean η {mean}, ⟨A,c⟩ {inner}");
    }
}

fn brute_decomposition(g: &CayleyGraph, x: &VertexSet, y: &VertexSet) {
    let e = |s: &VertexSet| g.edge_count_within(s) as i64;
    let lhs = g.pair_edge_count(x, y) as i64;
    let rhs = e(&x.union(y)) + e(&x.intersection(y)) - e(&x.difference(y)) - e(&y.difference(x));
    assert_eq!(lhs, rhs, "X = {x:?}, Y = {y:?}");
}

#[test]
fn corrected_decomposition_on_small_groups() {
    let mut rng = SplitMix64::new(8);
    for moduli in [vec![2], vec![3], vec![4], vec![2, 2], vec![5], vec![6], vec![7], vec![8], vec![2, 4], vec![2, 2, 2]]
    {
        let g = common::random_cayley_on(&mut rng, &moduli);
        let n = g.order();
        for xm in 0u64..1 << n {
            for ym in 0u64..1 << n {
                brute_decomposition(&g, &VertexSet::from_mask(n, xm), &VertexSet::from_mask(n, ym));
            }
        }
    }
}

#[test]
fn corrected_decomposition_on_random_sets() {
    let mut rng = SplitMix64::new(9);
    for _ in 0..1000 {
        let g = common::random_cayley(&mut rng, 256);
        let n = g.order();
        let x = VertexSet::from_indices(n, (0..n).filter(|_| rng.below(2) == 1)).unwrap();
        let y = VertexSet::from_indices(n, (0..n).filter(|_| rng.below(2) == 1)).unwrap();
        brute_decomposition(&g, &x, &y);
    }
}

#[test]
fn returned_violators_are_confirmed() {
    for (n, k, seed) in [(512u64, 32u64, 1u64), (1024, 64, 2), (1000, 40, 3), (600, 50, 4)] {
        let g = interval_cayley(n, k).unwrap();
        let cfg = ExtractionConfig::new(Rational::new(1, 2), seed);
        let outcome = extract_disc_violator(&g, &cfg).unwrap();
        let w = outcome.witness().expect("interval graphs have a large eigenvalue");
        let again = check_disc(&g, w.delta_used, Strategy::Guided(vec![w.violator_set.clone()])).unwrap();
        assert!(again.is_violated());
        assert_eq!(
            w.violator_edges,
            g.edge_count_within(&w.violator_set),
            "reported edge count differs from a recount"
        );
    }
}

#[test]
fn extraction_is_deterministic_across_thread_counts() {
    let g = interval_cayley(512, 32).unwrap();
    let mut cfg = ExtractionConfig::new(Rational::new(1, 2), 11);
    cfg.slack = Rational::new(1, 100);
    cfg.max_tries = 40;
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| serde_json::to_string(&extract_disc_violator(&g, &cfg).map_err(|e| e.to_string())).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(8));
}

#[test]
fn sample_sizes_concentrate() {
    let g = CayleyGraph::new(
        Group::cyclic(4096).unwrap(),
        cayley_spectra::ConnectionSet::from_residues(&Group::cyclic(4096).unwrap(), &[1, -1]).unwrap(),
    );
    let (x, y) = sample_witness_sets(&g, &g.group().element_at(1), 42).unwrap();
    for s in [x, y] {
        assert!((0.45..=0.55).contains(&(s.len() as f64 / 4096.0)), "{}", s.len());
    }
}

#[test]
fn failure_reports_the_best_trial() {
    let g = interval_cayley(16, 2).unwrap();
    let mut cfg = ExtractionConfig::new(Rational::new(1, 2), 3);
    cfg.slack = Rational::from(0);
    cfg.max_tries = 7;
    match extract_disc_violator(&g, &cfg) {
        Err(Error::ExtractionFailed { tries, best }) => {
            assert_eq!(tries, 7);
            assert!(best.unwrap().index < 7);
        }
        Ok(ExtractionResult::Witness(w)) => panic!("zero slack should not accept a trial on ℤ/16: {w:?}"),
        other => panic!("{other:?}"),
    }
}
