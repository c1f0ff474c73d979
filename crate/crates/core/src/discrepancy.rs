//! DISC(δ) and DISC₂(δ′) checkers.
//!
//! A set `U` with `|U| ≥ δn` satisfies the density condition when
//! `e(U) ∼_δ e(G)·C(|U|,2)/C(n,2)`; pairs of disjoint sets use
//! `e(U,W) ∼_δ′ e(G)·|U||W|/C(n,2)`. All comparisons are done on integers after
//! clearing denominators.

use rayon::prelude::*;
use serde::Serialize;

use crate::cayley::{Graph, VertexSet};
use crate::error::{invalid, Error, Result};
use crate::rational::{ceil_int, require_unit_interval, Rational};
use crate::rng::SplitMix64;

pub const MAX_EXHAUSTIVE_ORDER: usize = 22;
pub const MAX_EXHAUSTIVE_PAIR_ORDER: usize = 14;

/// How the candidate sets are produced.
#[derive(Debug, Clone)]
pub enum Strategy<C> {
    /// Every admissible candidate, in ascending bitmask order.
    Exhaustive,
    /// Uniform random candidates among the admissible ones.
    Sampled { count: u64, seed: u64 },
    /// Exactly the supplied candidates, in order.
    Guided(Vec<C>),
}

pub type PairCandidate = (VertexSet, VertexSet);

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    /// Every admissible candidate was examined (possibly none exist).
    VerifiedExhaustive { checked: u64 },
    /// One-sided: nothing was found, which proves nothing.
    NoViolationFound { samples: u64, seed: Option<u64> },
    Violated {
        sets: Vec<VertexSet>,
        edges: u64,
        #[serde(serialize_with = "crate::rational::serialize")]
        deviation: Rational,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscReport {
    #[serde(serialize_with = "crate::rational::serialize")]
    pub delta: Rational,
    /// Minimum admissible set size, `⌈δn⌉`.
    pub threshold: usize,
    pub verdict: Verdict,
}

impl DiscReport {
    pub fn is_violated(&self) -> bool {
        matches!(self.verdict, Verdict::Violated { .. })
    }

    pub fn violating_sets(&self) -> Option<&[VertexSet]> {
        match &self.verdict {
            Verdict::Violated { sets, .. } => Some(sets),
            _ => None,
        }
    }
}

/// Exact comparison data for one graph: `n`, `C(n,2)` and `e(G)`.
#[derive(Debug, Clone, Copy)]
pub struct Density {
    pub n: usize,
    pub pairs: i128,
    pub edges: i128,
}

impl Density {
    pub fn of<G: Graph + ?Sized>(g: &G) -> Result<Self> {
        let n = g.order();
        let edges = g.edge_count() as i128;
        if edges == 0 {
            return Err(invalid("discrepancy is undefined for a graph without edges"));
        }
        let n128 = n as i128;
        Ok(Self { n, pairs: n128 * (n128 - 1) / 2, edges })
    }

    /// `(|e·C(n,2) - e(G)·possible|, e(G)·possible)`: numerator and
    /// denominator of `|e - E| / E` where `E = e(G)·possible/C(n,2)`.
    pub fn deviation(&self, e: u64, possible: u128) -> Result<(i128, i128)> {
        let overflow = || invalid("graph too large for exact discrepancy arithmetic");
        let possible = i128::try_from(possible).map_err(|_| overflow())?;
        let lhs = (e as i128).checked_mul(self.pairs).ok_or_else(overflow)?;
        let rhs = self.edges.checked_mul(possible).ok_or_else(overflow)?;
        Ok(((lhs - rhs).abs(), rhs))
    }

    /// Deviation of `e(U)` for `|U| = u`.
    pub fn within(&self, e: u64, u: usize) -> Result<(i128, i128)> {
        let u = u as u128;
        self.deviation(e, u * u.saturating_sub(1) / 2)
    }

    /// Deviation of `e(U, W)` for `|U| = u`, `|W| = w`.
    pub fn between(&self, e: u64, u: usize, w: usize) -> Result<(i128, i128)> {
        self.deviation(e, u as u128 * w as u128)
    }
}

/// Whether `num/den > δ`; a zero denominator means the expectation vanished,
/// which is a violation only if edges were nevertheless found.
pub fn exceeds(num: i128, den: i128, delta: Rational) -> Result<bool> {
    if den == 0 {
        return Ok(num > 0);
    }
    let overflow = || invalid("tolerance too fine for exact discrepancy arithmetic");
    let lhs = num.checked_mul(*delta.denom()).ok_or_else(overflow)?;
    let rhs = den.checked_mul(*delta.numer()).ok_or_else(overflow)?;
    Ok(lhs > rhs)
}

fn ratio(num: i128, den: i128) -> Rational {
    if den == 0 {
        Rational::from(0)
    } else {
        Rational::new(num, den)
    }
}

fn threshold(delta: Rational, n: usize) -> usize {
    ceil_int(delta * Rational::from(n as i128)).max(0) as usize
}

/// DISC(δ).
pub fn check_disc<G: Graph + ?Sized>(g: &G, delta: Rational, strategy: Strategy<VertexSet>) -> Result<DiscReport> {
    require_unit_interval("delta", delta)?;
    let dens = Density::of(g)?;
    let n = dens.n;
    let k = threshold(delta, n);
    let verdict = match strategy {
        Strategy::Exhaustive => exhaustive_disc(g, &dens, delta, k)?,
        Strategy::Sampled { count, seed } => sampled_disc(g, &dens, delta, k, count, seed)?,
        Strategy::Guided(candidates) => {
            let mut checked = 0;
            let mut found = None;
            for u in candidates {
                if u.universe() != n {
                    return Err(invalid(format!("candidate set is over {} vertices, graph has {n}", u.universe())));
                }
                if u.len() < k {
                    continue;
                }
                checked += 1;
                if let Some(v) = test_within(g, &dens, delta, u)? {
                    found = Some(v);
                    break;
                }
            }
            found.unwrap_or(Verdict::NoViolationFound { samples: checked, seed: None })
        }
    };
    Ok(DiscReport { delta, threshold: k, verdict })
}

fn test_within<G: Graph + ?Sized>(g: &G, dens: &Density, delta: Rational, u: VertexSet) -> Result<Option<Verdict>> {
    let e = g.edge_count_within(&u);
    let (num, den) = dens.within(e, u.len())?;
    Ok(exceeds(num, den, delta)?.then(|| Verdict::Violated { sets: vec![u], edges: e, deviation: ratio(num, den) }))
}

fn test_between<G: Graph + ?Sized>(
    g: &G,
    dens: &Density,
    delta: Rational,
    u: VertexSet,
    w: VertexSet,
) -> Result<Option<Verdict>> {
    let e = g.edge_count_between(&u, &w)?;
    let (num, den) = dens.between(e, u.len(), w.len())?;
    Ok(exceeds(num, den, delta)?.then(|| Verdict::Violated { sets: vec![u, w], edges: e, deviation: ratio(num, den) }))
}

fn binomial_tail(n: usize, k: usize) -> u64 {
    let mut c = 1u64;
    let mut total = 0u64;
    for s in 0..=n {
        if s >= k {
            total += c;
        }
        c = c * (n - s) as u64 / (s as u64 + 1);
    }
    total
}

fn row_masks<G: Graph + ?Sized>(g: &G) -> Vec<u32> {
    g.adjacency_rows().iter().map(|r| r.words().first().copied().unwrap_or(0) as u32).collect()
}

const CHUNK_BITS: u32 = 14;

fn exhaustive_disc<G: Graph + ?Sized>(g: &G, dens: &Density, delta: Rational, k: usize) -> Result<Verdict> {
    let n = dens.n;
    if n > MAX_EXHAUSTIVE_ORDER {
        return Err(Error::SizeLimit { what: "exhaustive DISC", size: n, limit: MAX_EXHAUSTIVE_ORDER });
    }
    let rows = row_masks(g);
    let total: u64 = 1 << n;
    let chunks = total.div_ceil(1 << CHUNK_BITS);
    let scan = |chunk: u64| -> Result<Option<(u32, u64, i128, i128)>> {
        let lo = chunk << CHUNK_BITS;
        let hi = (lo + (1 << CHUNK_BITS)).min(total);
        for mask in lo.max(1)..hi {
            let mask = mask as u32;
            let u = mask.count_ones() as usize;
            if u < k {
                continue;
            }
            let mut twice = 0u64;
            let mut rest = mask;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                twice += (rows[v] & mask).count_ones() as u64;
            }
            let e = twice / 2;
            let (num, den) = dens.within(e, u)?;
            if exceeds(num, den, delta)? {
                return Ok(Some((mask, e, num, den)));
            }
        }
        Ok(None)
    };
    let first = (0..chunks).into_par_iter().map(scan).find_map_first(|r| match r {
        Ok(None) => None,
        other => Some(other),
    });
    match first {
        None => Ok(Verdict::VerifiedExhaustive { checked: binomial_tail(n, k.max(1)) }),
        Some(Err(e)) => Err(e),
        Some(Ok(None)) => unreachable!(),
        Some(Ok(Some((mask, e, num, den)))) => Ok(Verdict::Violated {
            sets: vec![VertexSet::from_mask(n, mask as u64)],
            edges: e,
            deviation: ratio(num, den),
        }),
    }
}

/// `ln(i!)` for `i = 0..=n`.
fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..=n {
        acc += (i as f64).ln();
        out.push(acc);
    }
    out
}

/// Draws an index with probability proportional to `exp(log_weights[i])`.
fn draw_log_weighted(rng: &mut SplitMix64, log_weights: &[f64]) -> usize {
    let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let cumulative: Vec<f64> = log_weights
        .iter()
        .scan(0.0, |acc, &w| {
            *acc += (w - max).exp();
            Some(*acc)
        })
        .collect();
    let r = rng.next_f64() * cumulative[cumulative.len() - 1];
    cumulative.partition_point(|&c| c <= r).min(cumulative.len() - 1)
}

/// Partial Fisher–Yates: after the call, `perm[..s]` is a uniform `s`-subset.
fn shuffle_prefix(rng: &mut SplitMix64, perm: &mut [usize], s: usize) {
    let n = perm.len();
    for i in 0..s {
        let j = i + rng.below((n - i) as u64) as usize;
        perm.swap(i, j);
    }
}

const SAMPLE_BATCH: usize = 256;

/// Subsets of size `≥ k`, uniform over all such subsets: the size `s` is
/// drawn with weight `C(n, s)`, then a uniform `s`-subset is taken.
fn sampled_disc<G: Graph + ?Sized>(
    g: &G,
    dens: &Density,
    delta: Rational,
    k: usize,
    count: u64,
    seed: u64,
) -> Result<Verdict> {
    let n = dens.n;
    if k > n {
        return Ok(Verdict::VerifiedExhaustive { checked: 0 });
    }
    let lf = ln_factorials(n);
    let weights: Vec<f64> = (k..=n).map(|s| lf[n] - lf[s] - lf[n - s]).collect();
    let mut rng = SplitMix64::new(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut drawn = 0u64;
    while drawn < count {
        let batch = (count - drawn).min(SAMPLE_BATCH as u64) as usize;
        let sets: Vec<VertexSet> = (0..batch)
            .map(|_| {
                let s = k + draw_log_weighted(&mut rng, &weights);
                shuffle_prefix(&mut rng, &mut perm, s);
                VertexSet::from_indices(n, perm[..s].iter().copied()).expect("indices in range")
            })
            .collect();
        let hit = sets.into_par_iter().map(|u| test_within(g, dens, delta, u)).find_map_first(|r| r.transpose());
        if let Some(v) = hit {
            return v;
        }
        drawn += batch as u64;
    }
    Ok(Verdict::NoViolationFound { samples: count, seed: Some(seed) })
}

/// DISC₂(δ′).
pub fn check_disc2<G: Graph + ?Sized>(g: &G, delta: Rational, strategy: Strategy<PairCandidate>) -> Result<DiscReport> {
    require_unit_interval("delta", delta)?;
    let dens = Density::of(g)?;
    let n = dens.n;
    let k = threshold(delta, n);
    let verdict = match strategy {
        Strategy::Exhaustive => exhaustive_disc2(g, &dens, delta, k)?,
        Strategy::Sampled { count, seed } => sampled_disc2(g, &dens, delta, k, count, seed)?,
        Strategy::Guided(candidates) => {
            let mut checked = 0;
            let mut found = None;
            for (u, w) in candidates {
                if u.universe() != n || w.universe() != n {
                    return Err(invalid("candidate set is over the wrong number of vertices"));
                }
                if !u.is_disjoint(&w) {
                    return Err(invalid("DISC₂ candidates must be disjoint"));
                }
                if u.len() < k || w.len() < k {
                    continue;
                }
                checked += 1;
                if let Some(v) = test_between(g, &dens, delta, u, w)? {
                    found = Some(v);
                    break;
                }
            }
            found.unwrap_or(Verdict::NoViolationFound { samples: checked, seed: None })
        }
    };
    Ok(DiscReport { delta, threshold: k, verdict })
}

/// `(U mask, W mask, e(U, W), deviation numerator, denominator)`.
type PairHit = (u32, u32, u64, i128, i128);

fn exhaustive_disc2<G: Graph + ?Sized>(g: &G, dens: &Density, delta: Rational, k: usize) -> Result<Verdict> {
    let n = dens.n;
    if n > MAX_EXHAUSTIVE_PAIR_ORDER {
        return Err(Error::SizeLimit { what: "exhaustive DISC₂", size: n, limit: MAX_EXHAUSTIVE_PAIR_ORDER });
    }
    let rows = row_masks(g);
    let full: u32 = if n == 0 { 0 } else { (1u32 << n) - 1 };
    let k = k.max(1);
    let scan = |umask: u32| -> Result<(u64, Option<PairHit>)> {
        let u = umask.count_ones() as usize;
        if u < k {
            return Ok((0, None));
        }
        let comp = full & !umask;
        let mut checked = 0u64;
        let mut w = 0u32;
        loop {
            w = w.wrapping_sub(comp) & comp;
            if w == 0 {
                break;
            }
            let wl = w.count_ones() as usize;
            if wl < k {
                continue;
            }
            checked += 1;
            let mut e = 0u64;
            let mut rest = umask;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                e += (rows[v] & w).count_ones() as u64;
            }
            let (num, den) = dens.between(e, u, wl)?;
            if exceeds(num, den, delta)? {
                return Ok((checked, Some((umask, w, e, num, den))));
            }
        }
        Ok((checked, None))
    };
    let results: Vec<Result<(u64, Option<_>)>> = (1..=full).into_par_iter().map(scan).collect();
    let mut checked = 0;
    for r in results {
        let (c, hit) = r?;
        checked += c;
        if let Some((um, wm, e, num, den)) = hit {
            return Ok(Verdict::Violated {
                sets: vec![VertexSet::from_mask(n, um as u64), VertexSet::from_mask(n, wm as u64)],
                edges: e,
                deviation: ratio(num, den),
            });
        }
    }
    Ok(Verdict::VerifiedExhaustive { checked })
}

fn log_sum_exp(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + v.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Disjoint pairs with both sizes `≥ k`, uniform over all such pairs: sizes
/// are drawn first (`u` from its marginal, then `w` given `u`), then a uniform
/// arrangement of the vertices.
fn sampled_disc2<G: Graph + ?Sized>(
    g: &G,
    dens: &Density,
    delta: Rational,
    k: usize,
    count: u64,
    seed: u64,
) -> Result<Verdict> {
    let n = dens.n;
    let k = k.max(1);
    if 2 * k > n {
        return Ok(Verdict::VerifiedExhaustive { checked: 0 });
    }
    let lf = ln_factorials(n);
    let ln_choose = |a: usize, b: usize| lf[a] - lf[b] - lf[a - b];
    // ln Σ_{w=k}^{r} C(r, w), for the remaining r = n - u vertices
    let ln_tail: Vec<f64> = (0..=n)
        .map(|r| if r < k { f64::NEG_INFINITY } else { log_sum_exp((k..=r).map(|w| ln_choose(r, w))) })
        .collect();
    let u_weights: Vec<f64> = (k..=n - k).map(|u| ln_choose(n, u) + ln_tail[n - u]).collect();
    let mut rng = SplitMix64::new(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut drawn = 0u64;
    while drawn < count {
        let batch = (count - drawn).min(SAMPLE_BATCH as u64) as usize;
        let pairs: Vec<PairCandidate> = (0..batch)
            .map(|_| {
                let u = k + draw_log_weighted(&mut rng, &u_weights);
                let w_weights: Vec<f64> = (k..=n - u).map(|w| ln_choose(n - u, w)).collect();
                let w = k + draw_log_weighted(&mut rng, &w_weights);
                shuffle_prefix(&mut rng, &mut perm, u + w);
                let us = VertexSet::from_indices(n, perm[..u].iter().copied()).expect("in range");
                let ws = VertexSet::from_indices(n, perm[u..u + w].iter().copied()).expect("in range");
                (us, ws)
            })
            .collect();
        let hit =
            pairs.into_par_iter().map(|(u, w)| test_between(g, dens, delta, u, w)).find_map_first(|r| r.transpose());
        if let Some(v) = hit {
            return v;
        }
        drawn += batch as u64;
    }
    Ok(Verdict::NoViolationFound { samples: count, seed: Some(seed) })
}
