mod common;

use cayley_spectra::generators::{blowup, gnp_plus_clique, random_cyclic_cayley};
use cayley_spectra::rng::SplitMix64;
use cayley_spectra::spectrum::eigenvalues_adjacency;
use cayley_spectra::{eigenvalues_character, Graph, Rational};
use common::sorted;

#[test]
fn random_cyclic_sets_are_always_valid() {
    for seed in 0..1000 {
        let g = random_cyclic_cayley(37, Rational::new(2, 5), seed).unwrap();
        let group = g.group();
        for &a in g.connection_indices() {
            assert_ne!(a, 0);
            assert!(g.contains_index(group.neg_index(a)));
        }
    }
}

#[test]
fn random_cyclic_degree_is_near_pn() {
    let n = 4096u64;
    let ln = (n as f64).ln();
    let p = Rational::new((ln * ln / n as f64 * 1e6).floor() as i128, 1_000_000);
    let g = random_cyclic_cayley(n, p, 1).unwrap();
    let pn = ln * ln;
    assert!((0.7 * pn..=1.3 * pn).contains(&(g.degree() as f64)), "|A| = {}, pn = {pn}", g.degree());
}

#[test]
fn blowup_spectrum_law() {
    let mut rng = SplitMix64::new(50);
    for _ in 0..30 {
        let g = common::random_cayley(&mut rng, 16);
        let k = 1 + rng.below(3);
        if g.order() as u64 * k > 48 {
            continue;
        }
        let b = blowup(&g, k).unwrap();
        assert_eq!(b.degree(), k as usize * g.degree());
        let dense = sorted(eigenvalues_adjacency(&b.adjacency_matrix().unwrap()).unwrap());
        let mut expected: Vec<f64> = eigenvalues_character(&g).unwrap().values().iter().map(|l| l * k as f64).collect();
        expected.extend(std::iter::repeat_n(0.0, g.order() * (k as usize - 1)));
        let expected = sorted(expected);
        assert_eq!(dense.len(), expected.len());
        for (x, y) in dense.iter().zip(&expected) {
            assert!((x - y).abs() < 1e-8, "{x} vs {y}");
        }
    }
}

#[test]
fn clique_block_is_isolated() {
    for seed in 0..5 {
        let h = gnp_plus_clique(200, Rational::new(3, 20), Rational::new(1, 3), seed).unwrap();
        let g = &h.graph;
        let n = 200;
        assert_eq!(h.clique_size, 10);
        for u in 0..g.order() {
            assert!(!g.adjacent_index(u, u));
            for v in 0..g.order() {
                assert_eq!(g.adjacent_index(u, v), g.adjacent_index(v, u));
                if (u < n) != (v < n) {
                    assert!(!g.adjacent_index(u, v));
                } else if u >= n && u != v {
                    assert!(g.adjacent_index(u, v));
                }
            }
        }
    }
}

#[test]
fn generators_are_seeded() {
    let a = gnp_plus_clique(150, Rational::new(1, 10), Rational::new(1, 2), 8).unwrap();
    let b = gnp_plus_clique(150, Rational::new(1, 10), Rational::new(1, 2), 8).unwrap();
    let c = gnp_plus_clique(150, Rational::new(1, 10), Rational::new(1, 2), 9).unwrap();
    assert_eq!(a.graph, b.graph);
    assert_ne!(a.graph, c.graph);
}
