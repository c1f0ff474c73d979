//! Connection sets, Cayley graphs and the edge-counting primitives.

use std::fmt;
use std::sync::OnceLock;

use serde::{Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::group::{Element, Group};

/// Largest order for which a dense adjacency matrix is materialized.
pub const MAX_DENSE_ORDER: usize = 512;

// Bitset rows cost n²/8 bytes: 2 MiB at n = 4096, 32 MiB at the limit.
const ROW_CACHE_LIMIT: usize = 1 << 14;

/// A subset of `{0, …, n-1}` stored as a bitset over the enumeration order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    n: usize,
    words: Vec<u64>,
    len: usize,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        Self { n, words: vec![0; n.div_ceil(64)], len: 0 }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for (i, w) in s.words.iter_mut().enumerate() {
            let hi = ((i + 1) * 64).min(n);
            let bits = hi - i * 64;
            *w = if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
        }
        s.len = n;
        s
    }

    pub fn from_indices(n: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut s = Self::empty(n);
        for i in indices {
            if i >= n {
                return Err(invalid(format!("vertex {i} is out of range for order {n}")));
            }
            s.insert(i);
        }
        Ok(s)
    }

    /// Set whose members are the low `n` bits of `mask`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        debug_assert!(n <= 64);
        let mut s = Self::empty(n);
        if n > 0 {
            let keep = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            s.words[0] = mask & keep;
            s.len = s.words[0].count_ones() as usize;
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.n && self.words[i >> 6] >> (i & 63) & 1 == 1
    }

    pub fn insert(&mut self, i: usize) -> bool {
        assert!(i < self.n, "vertex {i} out of range {}", self.n);
        let w = &mut self.words[i >> 6];
        let bit = 1u64 << (i & 63);
        let fresh = *w & bit == 0;
        *w |= bit;
        self.len += fresh as usize;
        fresh
    }

    pub fn remove(&mut self, i: usize) -> bool {
        if i >= self.n {
            return false;
        }
        let w = &mut self.words[i >> 6];
        let bit = 1u64 << (i & 63);
        let present = *w & bit != 0;
        *w &= !bit;
        self.len -= present as usize;
        present
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    fn zip_with(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        assert_eq!(self.n, other.n, "vertex sets over different universes");
        let words: Vec<u64> = self.words.iter().zip(&other.words).map(|(&a, &b)| f(a, b)).collect();
        let len = words.iter().map(|w| w.count_ones() as usize).sum();
        Self { n: self.n, words, len }
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> Self {
        Self::full(self.n).difference(self)
    }

    pub fn intersection_len(&self, other: &Self) -> usize {
        assert_eq!(self.n, other.n, "vertex sets over different universes");
        self.words.iter().zip(&other.words).map(|(&a, &b)| (a & b).count_ones() as usize).sum()
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.intersection_len(other) == 0
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VertexSet(n={}, ", self.n)?;
        f.debug_set().entries(self.iter()).finish()?;
        write!(f, ")")
    }
}

/// Serialized as the sorted list of member indices.
impl Serialize for VertexSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

/// The queries every checker needs from a simple undirected graph on
/// vertices `0..order()`.
pub trait Graph: Sync {
    fn order(&self) -> usize;

    fn edge_count(&self) -> u64;

    fn adjacent_index(&self, u: usize, v: usize) -> bool;

    /// `e(G[U])`.
    fn edge_count_within(&self, u: &VertexSet) -> u64;

    /// `|E(U, W)|` without checking disjointness; for overlapping inputs
    /// this counts ordered pairs `(x, y) ∈ U × W` with `x ~ y`.
    fn ordered_pair_count(&self, u: &VertexSet, w: &VertexSet) -> u64;

    /// `e(G[U, W])` for disjoint `U` and `W`.
    fn edge_count_between(&self, u: &VertexSet, w: &VertexSet) -> Result<u64> {
        if !u.is_disjoint(w) {
            return Err(invalid("edge_count_between needs disjoint vertex sets"));
        }
        Ok(self.ordered_pair_count(u, w))
    }

    /// Neighbourhood of every vertex, as bitsets.
    fn adjacency_rows(&self) -> Vec<VertexSet> {
        let n = self.order();
        (0..n)
            .map(|u| {
                let mut row = VertexSet::empty(n);
                for v in 0..n {
                    if self.adjacent_index(u, v) {
                        row.insert(v);
                    }
                }
                row
            })
            .collect()
    }

    /// Dense 0/1 adjacency matrix; refused above [`MAX_DENSE_ORDER`].
    fn adjacency_matrix(&self) -> Result<Vec<Vec<u8>>> {
        let n = self.order();
        if n > MAX_DENSE_ORDER {
            return Err(Error::SizeLimit { what: "dense adjacency matrix", size: n, limit: MAX_DENSE_ORDER });
        }
        Ok(self.adjacency_rows().iter().map(|row| (0..n).map(|v| row.contains(v) as u8).collect()).collect())
    }

    fn average_degree(&self) -> f64 {
        if self.order() == 0 {
            return 0.0;
        }
        2.0 * self.edge_count() as f64 / self.order() as f64
    }
}

/// Symmetric, zero-free subset `A` of a group, kept sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectionSet {
    elements: Vec<Element>,
}

impl ConnectionSet {
    pub fn new(group: &Group, elems: impl IntoIterator<Item = Element>) -> Result<Self> {
        let mut elements: Vec<Element> = elems.into_iter().collect();
        for a in &elements {
            group.check(a).map_err(|e| Error::InvalidConnectionSet(e.to_string()))?;
        }
        elements.sort();
        elements.dedup();
        if elements.iter().any(Element::is_zero) {
            return Err(Error::InvalidConnectionSet("0 must not belong to the connection set".into()));
        }
        for a in &elements {
            let neg = group.negate(a)?;
            if elements.binary_search(&neg).is_err() {
                return Err(Error::InvalidConnectionSet(format!(
                    "not symmetric: {a} is present but {neg} = -{a} is missing"
                )));
            }
        }
        Ok(Self { elements })
    }

    /// Connection set of a cyclic group from integer residues.
    pub fn from_residues(group: &Group, residues: &[i64]) -> Result<Self> {
        let elems = residues.iter().map(|&r| group.cyclic_element(r)).collect::<Result<Vec<_>>>()?;
        Self::new(group, elems)
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// `G(Γ, A)`: vertices are group elements, `u ~ v` iff `v - u ∈ A`.
#[derive(Debug, Clone)]
pub struct CayleyGraph {
    group: Group,
    conn: ConnectionSet,
    // enumeration indices of A, ascending
    conn_indices: Vec<usize>,
    membership: Vec<bool>,
    rows: OnceLock<Vec<VertexSet>>,
}

impl PartialEq for CayleyGraph {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.conn == other.conn
    }
}

impl Eq for CayleyGraph {}

impl CayleyGraph {
    pub fn new(group: Group, conn: ConnectionSet) -> Self {
        let mut membership = vec![false; group.order()];
        let mut conn_indices: Vec<usize> = conn.elements().iter().map(|a| group.index_of(a)).collect();
        conn_indices.sort_unstable();
        for &i in &conn_indices {
            membership[i] = true;
        }
        Self { group, conn, conn_indices, membership, rows: OnceLock::new() }
    }

    /// Convenience constructor from moduli and residue vectors.
    pub fn from_parts(moduli: &[u64], connection_set: &[Vec<i64>]) -> Result<Self> {
        let group = Group::new(moduli)?;
        let elems = connection_set.iter().map(|r| group.element(r)).collect::<Result<Vec<_>>>()?;
        let conn = ConnectionSet::new(&group, elems)?;
        Ok(Self::new(group, conn))
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn connection_set(&self) -> &ConnectionSet {
        &self.conn
    }

    /// Enumeration indices of the members of `A`, ascending.
    pub fn connection_indices(&self) -> &[usize] {
        &self.conn_indices
    }

    /// `|A|`, the common degree.
    pub fn degree(&self) -> usize {
        self.conn_indices.len()
    }

    pub fn contains_index(&self, i: usize) -> bool {
        self.membership[i]
    }

    pub fn adjacent(&self, u: &Element, v: &Element) -> Result<bool> {
        let diff = self.group.sub(v, u)?;
        Ok(self.membership[self.group.index_of(&diff)])
    }

    /// `|{(x, y) ∈ X × Y : y - x ∈ A}|`, which equals `⟨A, (-X) * Y⟩`.
    pub fn pair_edge_count(&self, x: &VertexSet, y: &VertexSet) -> u64 {
        self.ordered_pair_count(x, y)
    }

    /// The vertex set `-X`.
    pub fn negate_set(&self, x: &VertexSet) -> VertexSet {
        let mut out = VertexSet::empty(self.group.order());
        for i in x.iter() {
            out.insert(self.group.neg_index(i));
        }
        out
    }
}

impl Graph for CayleyGraph {
    fn order(&self) -> usize {
        self.group.order()
    }

    fn edge_count(&self) -> u64 {
        (self.order() as u64 * self.degree() as u64) / 2
    }

    fn adjacent_index(&self, u: usize, v: usize) -> bool {
        self.membership[self.group.sub_index(v, u)]
    }

    fn edge_count_within(&self, u: &VertexSet) -> u64 {
        self.ordered_pair_count(u, u) / 2
    }

    fn ordered_pair_count(&self, x: &VertexSet, y: &VertexSet) -> u64 {
        let n = self.order();
        // Dense connection sets are cheaper through cached bitset rows.
        if self.degree() > n / 64 + 8 && n <= ROW_CACHE_LIMIT {
            let rows = self.rows.get_or_init(|| self.build_rows());
            return x.iter().map(|i| rows[i].intersection_len(y) as u64).sum();
        }
        let mut count = 0u64;
        for i in x.iter() {
            for &a in &self.conn_indices {
                count += y.contains(self.group.add_index(i, a)) as u64;
            }
        }
        count
    }

    fn adjacency_rows(&self) -> Vec<VertexSet> {
        match self.rows.get() {
            Some(rows) => rows.clone(),
            None => self.build_rows(),
        }
    }
}

impl CayleyGraph {
    fn build_rows(&self) -> Vec<VertexSet> {
        let n = self.order();
        (0..n)
            .map(|u| {
                let mut row = VertexSet::empty(n);
                for &a in &self.conn_indices {
                    row.insert(self.group.add_index(u, a));
                }
                row
            })
            .collect()
    }
}
