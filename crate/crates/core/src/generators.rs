//! Graph families: random cyclic Cayley graphs, blowups, interval and
//! complete Cayley graphs, and the non-Cayley `G(n, p)` plus clique.

use serde::Serialize;

use crate::cayley::{CayleyGraph, ConnectionSet, Graph, VertexSet};
use crate::error::{invalid, Result};
use crate::group::Group;
use crate::rational::{floor_int, Rational};
use crate::rng::SplitMix64;

/// Largest vertex count accepted for a [`GenericGraph`].
pub const MAX_GENERIC_ORDER: usize = 4096;

/// A simple undirected graph stored as adjacency bitsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericGraph {
    rows: Vec<VertexSet>,
    edges: u64,
}

impl GenericGraph {
    /// Builds a graph on `0..n`; repeated edges are merged, loops rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n > MAX_GENERIC_ORDER {
            return Err(invalid(format!("generic graphs are limited to {MAX_GENERIC_ORDER} vertices")));
        }
        let mut rows = vec![VertexSet::empty(n); n];
        let mut count = 0;
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(invalid(format!("edge ({u}, {v}) leaves the vertex range 0..{n}")));
            }
            if u == v {
                return Err(invalid(format!("loop at vertex {u}")));
            }
            if rows[u].insert(v) {
                rows[v].insert(u);
                count += 1;
            }
        }
        Ok(Self { rows, edges: count })
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.iter().filter(move |&v| v > u).map(move |v| (u, v)))
            .collect()
    }

    pub fn neighbours(&self, u: usize) -> &VertexSet {
        &self.rows[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.rows[u].len()
    }
}

impl Graph for GenericGraph {
    fn order(&self) -> usize {
        self.rows.len()
    }

    fn edge_count(&self) -> u64 {
        self.edges
    }

    fn adjacent_index(&self, u: usize, v: usize) -> bool {
        self.rows[u].contains(v)
    }

    fn edge_count_within(&self, u: &VertexSet) -> u64 {
        let twice: usize = u.iter().map(|x| self.rows[x].intersection_len(u)).sum();
        twice as u64 / 2
    }

    fn ordered_pair_count(&self, u: &VertexSet, w: &VertexSet) -> u64 {
        u.iter().map(|x| self.rows[x].intersection_len(w) as u64).sum()
    }

    fn adjacency_rows(&self) -> Vec<VertexSet> {
        self.rows.clone()
    }
}

/// The random cyclic Cayley graph `C_{n,p}`.
///
/// Every `a ∈ 1..n` gets its own Bernoulli(p/2) trial, drawn in ascending
/// order, and `±a` joins `A` when the trial for `a` or for `-a` succeeds.
/// A pair therefore enters with probability `1 - (1 - p/2)²`.
pub fn random_cyclic_cayley(n: u64, p: Rational, seed: u64) -> Result<CayleyGraph> {
    if n < 3 {
        return Err(invalid("random cyclic Cayley graphs need n ≥ 3"));
    }
    open_unit("p", p)?;
    let group = Group::cyclic(n)?;
    let mut rng = SplitMix64::new(seed);
    let trials: Vec<bool> =
        std::iter::once(false).chain((1..n).map(|_| rng.bernoulli_ratio(*p.numer(), 2 * p.denom()))).collect();
    let residues: Vec<i64> =
        (1..n).filter(|&a| trials[a as usize] || trials[(n - a) as usize]).map(|a| a as i64).collect();
    Ok(CayleyGraph::new(group.clone(), ConnectionSet::from_residues(&group, &residues)?))
}

/// Cayley graph on `Γ × ℤ/k` with connection set `A × ℤ/k`.
pub fn blowup(g: &CayleyGraph, k: u64) -> Result<CayleyGraph> {
    if k == 0 {
        return Err(invalid("blowup factor must be at least 1"));
    }
    let mut moduli = g.group().moduli().to_vec();
    moduli.push(k);
    let group = Group::new(&moduli)?;
    let mut elems = Vec::with_capacity(g.degree() * k as usize);
    for a in g.connection_set().elements() {
        for j in 0..k {
            let mut r: Vec<i64> = a.residues().iter().map(|&x| x as i64).collect();
            r.push(j as i64);
            elems.push(group.element(&r)?);
        }
    }
    Ok(CayleyGraph::new(group.clone(), ConnectionSet::new(&group, elems)?))
}

/// `ℤ/n` with `A = ±{1, …, k}`.
pub fn interval_cayley(n: u64, k: u64) -> Result<CayleyGraph> {
    if k < 1 || 2 * k >= n {
        return Err(invalid(format!("interval graphs need 1 ≤ k < n/2, got n = {n}, k = {k}")));
    }
    let residues: Vec<i64> = (1..=k as i64).flat_map(|a| [a, -a]).collect();
    let group = Group::cyclic(n)?;
    Ok(CayleyGraph::new(group.clone(), ConnectionSet::from_residues(&group, &residues)?))
}

/// `K_n` as the Cayley graph of `ℤ/n` with every nonzero element.
pub fn complete(n: u64) -> Result<CayleyGraph> {
    let group = Group::cyclic(n)?;
    let residues: Vec<i64> = (1..n as i64).collect();
    Ok(CayleyGraph::new(group.clone(), ConnectionSet::from_residues(&group, &residues)?))
}

/// The cycle `C_n`, `n ≥ 3`.
pub fn cycle(n: u64) -> Result<CayleyGraph> {
    if n < 3 {
        return Err(invalid("cycles need n ≥ 3"));
    }
    let group = Group::cyclic(n)?;
    Ok(CayleyGraph::new(group.clone(), ConnectionSet::from_residues(&group, &[1, -1])?))
}

#[derive(Debug, Clone, Serialize)]
pub struct CliqueGraph {
    #[serde(skip)]
    pub graph: GenericGraph,
    pub clique_size: usize,
}

/// `G(n, p)` on `0..n` plus a disjoint clique on `⌊αpn⌋` further vertices.
/// Pairs `u < v` are visited in lexicographic order, one trial each.
pub fn gnp_plus_clique(n: usize, p: Rational, alpha: Rational, seed: u64) -> Result<CliqueGraph> {
    open_unit("p", p)?;
    if alpha < Rational::from(0) {
        return Err(invalid("alpha must be nonnegative"));
    }
    let clique = floor_int(alpha * p * Rational::from(n as i128));
    let total = n as i128 + clique;
    if total > MAX_GENERIC_ORDER as i128 {
        return Err(invalid(format!("n + ⌊αpn⌋ = {total} exceeds {MAX_GENERIC_ORDER}")));
    }
    let clique = clique as usize;
    let mut rng = SplitMix64::new(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.bernoulli_ratio(*p.numer(), *p.denom()) {
                edges.push((u, v));
            }
        }
    }
    for u in n..n + clique {
        for v in u + 1..n + clique {
            edges.push((u, v));
        }
    }
    Ok(CliqueGraph { graph: GenericGraph::new(n + clique, edges)?, clique_size: clique })
}

fn open_unit(name: &str, p: Rational) -> Result<()> {
    if p <= Rational::from(0) || p >= Rational::from(1) {
        return Err(invalid(format!("{name} must lie in (0, 1), got {p}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{eigenvalues_adjacency, eigenvalues_character};

    #[test]
    fn interval_family() {
        let c8 = interval_cayley(8, 1).unwrap();
        assert_eq!(c8, cycle(8).unwrap());
        assert_eq!(interval_cayley(16, 4).unwrap().degree(), 8);
        assert!(interval_cayley(8, 4).is_err());
        assert!(interval_cayley(8, 0).is_err());
        assert_eq!(complete(7).unwrap().degree(), 6);
    }

    #[test]
    fn random_cyclic_is_seeded_and_valid() {
        let p = Rational::new(255, 256);
        let g = random_cyclic_cayley(16, p, 1).unwrap();
        assert!(g.degree() > 0 && g.degree() <= 15);
        for seed in 0..50 {
            let g = random_cyclic_cayley(31, Rational::new(1, 3), seed).unwrap();
            assert_eq!(g, random_cyclic_cayley(31, Rational::new(1, 3), seed).unwrap());
        }
        assert!(random_cyclic_cayley(2, Rational::new(1, 2), 0).is_err());
        assert!(random_cyclic_cayley(10, Rational::from(1), 0).is_err());
        let tiny = random_cyclic_cayley(10, Rational::new(1, 1i128 << 80), 0).unwrap();
        assert!(tiny.connection_set().is_empty());
    }

    #[test]
    fn blowup_spectrum() {
        let c4 = cycle(4).unwrap();
        let b = blowup(&c4, 2).unwrap();
        assert_eq!(b.group().moduli(), &[4, 2]);
        assert_eq!(b.degree(), 4);
        let mut vals = eigenvalues_character(&b).unwrap().values();
        vals.sort_by(f64::total_cmp);
        let expected = [-4.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 4.0];
        for (x, y) in vals.iter().zip(expected) {
            assert!((x - y).abs() < 1e-9);
        }
        let one = blowup(&c4, 1).unwrap();
        let mut a = eigenvalues_character(&one).unwrap().values();
        let mut c = eigenvalues_character(&c4).unwrap().values();
        a.sort_by(f64::total_cmp);
        c.sort_by(f64::total_cmp);
        assert_eq!(a.len(), c.len());
        assert!(a.iter().zip(&c).all(|(x, y)| (x - y).abs() < 1e-9));
        assert!(blowup(&c4, 0).is_err());
    }

    #[test]
    fn gnp_clique_structure() {
        let g = gnp_plus_clique(60, Rational::new(1, 5), Rational::new(1, 2), 9).unwrap();
        assert_eq!(g.clique_size, 6);
        let h = &g.graph;
        assert_eq!(h.order(), 66);
        for u in 60..66 {
            assert_eq!(h.degree(u), 5);
            assert!(h.neighbours(u).iter().all(|v| v >= 60));
        }
        for (u, v) in h.edges() {
            assert!(u < v && h.adjacent_index(v, u));
        }
        let vals = eigenvalues_adjacency(&h.adjacency_matrix().unwrap()).unwrap();
        assert!(vals.iter().any(|&l| l >= 5.0 - 1e-9));
        let plain = gnp_plus_clique(60, Rational::new(1, 5), Rational::from(0), 9).unwrap();
        assert_eq!(plain.clique_size, 0);
        assert_eq!(plain.graph.edges(), h.edges().into_iter().filter(|&(u, _)| u < 60).collect::<Vec<_>>());
        assert!(gnp_plus_clique(4000, Rational::new(1, 2), Rational::new(1, 2), 0).is_err());
    }

    #[test]
    fn generic_graph_validation() {
        assert!(GenericGraph::new(3, [(0, 0)]).is_err());
        assert!(GenericGraph::new(3, [(0, 3)]).is_err());
        let g = GenericGraph::new(4, [(0, 1), (1, 0), (2, 3)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        let all = VertexSet::full(4);
        assert_eq!(g.edge_count_within(&all), 2);
    }
}
