#![allow(dead_code)]

use cayley_spectra::rng::SplitMix64;
use cayley_spectra::{CayleyGraph, ConnectionSet, Group};

/// Moduli with product in `2..=max_order`, chosen at random.
pub fn random_moduli(rng: &mut SplitMix64, max_order: u64) -> Vec<u64> {
    loop {
        let rank = 1 + rng.below(3);
        let mut moduli = Vec::new();
        let mut order = 1;
        for _ in 0..rank {
            let room = max_order / order;
            if room < 2 {
                break;
            }
            let m = 2 + rng.below(room - 1);
            order *= m;
            moduli.push(m);
        }
        if order >= 2 {
            return moduli;
        }
    }
}

/// Each pair `{a, -a}` of nonzero elements joins `A` with probability 1/2;
/// resampled until `A` is nonempty.
pub fn random_connection_set(rng: &mut SplitMix64, group: &Group) -> ConnectionSet {
    loop {
        let mut picked = vec![false; group.order()];
        for i in 1..group.order() {
            let j = group.neg_index(i);
            if j >= i && rng.below(2) == 1 {
                picked[i] = true;
                picked[j] = true;
            }
        }
        let elems: Vec<_> = (0..group.order()).filter(|&i| picked[i]).map(|i| group.element_at(i)).collect();
        if !elems.is_empty() {
            return ConnectionSet::new(group, elems).unwrap();
        }
    }
}

pub fn random_cayley(rng: &mut SplitMix64, max_order: u64) -> CayleyGraph {
    let group = Group::new(&random_moduli(rng, max_order)).unwrap();
    let conn = random_connection_set(rng, &group);
    CayleyGraph::new(group, conn)
}

pub fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

pub fn random_cayley_on(rng: &mut SplitMix64, moduli: &[u64]) -> CayleyGraph {
    let group = Group::new(moduli).unwrap();
    let conn = random_connection_set(rng, &group);
    CayleyGraph::new(group, conn)
}
