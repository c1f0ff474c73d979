//! Audits of the appendix lemmas on concrete graphs.
//!
//! Each lemma is instantiated at a grid of parameter points. At every point
//! the hypotheses are evaluated first and the conclusion is evaluated
//! regardless; an entry whose hypotheses hold but whose conclusion fails is a
//! bug in either this crate or the lemma.
//!
//! DISC and DISC₂ hypotheses are evaluated on the sets the proofs actually
//! use, which are all unions of `ρ`-fibers. Their edge counts come from the
//! fiber counts through the quotient graph, so no vertex sets are built.

use num_traits::Signed;
use rayon::prelude::*;
use serde::Serialize;

use crate::cayley::{CayleyGraph, Graph};
use crate::discrepancy::{exceeds, Density};
use crate::error::{invalid, Result};
use crate::group::CharacterIndex;
use crate::interval::{check_s1_arc_disc, check_z_int_disc, IntervalProfile};
use crate::rational::{ceil_int, floor_int, rational_below, sim, to_f64, Rational};
use crate::spectrum::character_sum;

/// Parameter values tried for each lemma.
#[derive(Debug, Clone)]
pub struct AuditGrid {
    pub delta_primes: Vec<Rational>,
    pub deltas: Vec<Rational>,
    pub etas: Vec<Rational>,
    pub sigmas: Vec<Rational>,
    pub epsilons: Vec<Rational>,
    /// Upper bound on entries per lemma; larger tuple sets are thinned with a
    /// fixed stride.
    pub cap: usize,
}

impl Default for AuditGrid {
    fn default() -> Self {
        let r = |p, q| Rational::new(p, q);
        Self {
            delta_primes: vec![r(1, 3), r(1, 4), r(1, 6), r(1, 8), r(1, 12), r(1, 16), r(1, 24), r(1, 32)],
            deltas: vec![r(1, 3), r(1, 4), r(1, 6), r(1, 8)],
            etas: vec![r(1, 8), r(1, 4), r(1, 2), r(1, 1)],
            sigmas: vec![r(1, 4), r(1, 2), r(1, 1)],
            epsilons: vec![r(1, 4), r(1, 2), r(3, 4), r(1, 1)],
            cap: 32,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaAuditEntry {
    pub lemma: &'static str,
    pub params: String,
    pub hypotheses_met: bool,
    pub conclusion_holds: bool,
    /// Relative margin of the conclusion, `(bound - value)/bound`; negative
    /// when the conclusion fails.
    pub slack: Option<f64>,
}

impl LemmaAuditEntry {
    pub fn is_failure(&self) -> bool {
        self.hypotheses_met && !self.conclusion_holds
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaAuditReport {
    pub character: CharacterIndex,
    pub m: u64,
    pub entries: Vec<LemmaAuditEntry>,
}

impl LemmaAuditReport {
    pub fn failures(&self) -> impl Iterator<Item = &LemmaAuditEntry> {
        self.entries.iter().filter(|e| e.is_failure())
    }

    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }

    /// Entries whose hypotheses held.
    pub fn applicable(&self) -> usize {
        self.entries.iter().filter(|e| e.hypotheses_met).count()
    }
}

pub const LEMMAS: [&str; 9] =
    ["A.4", "distribution_of_A", "rewriting", "initial_interval", "final_interval", "A.5", "A.6", "A.7", "claim"];

/// Edge counts between unions of consecutive fibers, read off the profile.
struct Quotient<'a> {
    p: &'a IntervalProfile,
    density: Density,
}

impl<'a> Quotient<'a> {
    fn fiber(&self) -> u64 {
        self.p.fiber_size()
    }

    /// `e(ρ⁻¹[a, a+la), ρ⁻¹[b, b+lb))` for disjoint cyclic ranges.
    fn between(&self, a: i64, la: u64, b: i64, lb: u64) -> u64 {
        let s: u64 = (0..la as i64).map(|i| self.p.cyclic_count(b - (a + i), lb)).sum();
        self.fiber() * s
    }

    /// `e(G[ρ⁻¹[a, a+len)])`.
    fn within(&self, a: i64, len: u64) -> u64 {
        let s: u64 = (0..len as i64).map(|i| self.p.cyclic_count(a - (a + i), len)).sum();
        self.fiber() * s / 2
    }

    fn large(&self, fibers: u64, delta: Rational) -> bool {
        Rational::from((fibers * self.fiber()) as i128) >= delta * Rational::from(self.p.n as i128)
    }

    /// The DISC₂(δ′) requirement on one pair; vacuous for small sets.
    fn disc2_pair(&self, a: i64, la: u64, b: i64, lb: u64, delta: Rational) -> Result<bool> {
        if !self.large(la, delta) || !self.large(lb, delta) {
            return Ok(true);
        }
        let e = self.between(a, la, b, lb);
        let (num, den) = self.density.between(e, (la * self.fiber()) as usize, (lb * self.fiber()) as usize)?;
        Ok(!exceeds(num, den, delta)?)
    }

    /// The DISC(δ) requirement on one set; vacuous for small sets.
    fn disc_set(&self, a: i64, len: u64, delta: Rational) -> Result<bool> {
        if !self.large(len, delta) {
            return Ok(true);
        }
        let e = self.within(a, len);
        let (num, den) = self.density.within(e, (len * self.fiber()) as usize)?;
        Ok(!exceeds(num, den, delta)?)
    }

    /// The three pairs used to bound `|A ∩ ρ⁻¹[t-s-ℓ, t-s+ℓ)|`.
    fn distribution_pairs(&self, d: u64, l: u64, s: u64, t: u64, delta: Rational) -> Result<bool> {
        let (d, l, s, t) = (d as i64, l as i64, s as i64, t as i64);
        Ok(self.disc2_pair(s, l as u64, t, l as u64, delta)?
            && self.disc2_pair(s - d, (l + d) as u64, t - d, (l + d) as u64, delta)?
            && self.disc2_pair(s + d, (l - d) as u64, t + d, (l - d) as u64, delta)?)
    }

    /// Hypotheses of the rewriting corollary beyond the numeric shape: the
    /// distribution lemma instances for every even-length interval used.
    fn rewriting_pairs(&self, d: u64, d1: u64, d2: u64, delta: Rational) -> Result<bool> {
        let ends: Vec<u64> = if (d2 - d1).is_multiple_of(2) { vec![d2] } else { vec![d2 - 1, d2 + 1] };
        for e in ends {
            let l = (e - d1) / 2;
            if !self.distribution_pairs(d, l, d, d + l + d1, delta)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Up to `k` evenly spread integers in `[lo, hi]`, always including both ends.
fn spread(lo: i128, hi: i128, k: usize) -> Vec<u64> {
    if hi < lo || hi < 0 {
        return Vec::new();
    }
    let lo = lo.max(0);
    let span = hi - lo;
    let mut out: Vec<u64> =
        (0..k as i128).map(|i| if k == 1 { lo } else { lo + span * i / (k as i128 - 1) }).map(|x| x as u64).collect();
    out.dedup();
    out
}

fn thin<T>(items: Vec<T>, cap: usize) -> Vec<T> {
    let len = items.len();
    if len <= cap || cap == 0 {
        return items;
    }
    let keep: Vec<usize> = (0..cap).map(|i| i * len / cap).collect();
    items.into_iter().enumerate().filter(|(i, _)| keep.binary_search(i).is_ok()).map(|(_, x)| x).collect()
}

fn r(x: i128) -> Rational {
    Rational::from(x)
}

/// Margin of `value ≤ bound`.
fn margin(value: Rational, bound: Rational) -> Option<f64> {
    if bound == r(0) {
        return Some(if value <= bound { 0.0 } else { -1.0 });
    }
    Some(to_f64((bound - value) / bound))
}

fn entry(
    lemma: &'static str,
    params: String,
    hypotheses_met: bool,
    holds: bool,
    slack: Option<f64>,
) -> LemmaAuditEntry {
    LemmaAuditEntry { lemma, params, hypotheses_met, conclusion_holds: holds, slack }
}

/// Runs every lemma audit for one nontrivial character.
pub fn audit_appendix_lemmas(g: &CayleyGraph, t: &CharacterIndex, grid: &AuditGrid) -> Result<LemmaAuditReport> {
    if t.is_zero() {
        return Err(invalid("lemma audits need a nontrivial character"));
    }
    let p = IntervalProfile::new(g, t)?;
    let q = Quotient { p: &p, density: Density::of(g)? };
    let n = g.order() as i128;
    let m = p.m as i128;
    let h = m / 2;
    let a = r(p.total() as i128);
    let lambda = character_sum(g, g.group().index_of(t)).0;
    let sim_n = |dp: Rational| sim(r(n), r(n - 1), dp / 2);
    let count = |lo: i128, hi: i128| r(p.count(lo as u64, hi as u64) as i128);
    let cap = grid.cap;
    let mut entries = Vec::new();

    // A.4: small m.
    for &dp in &grid.delta_primes {
        let mut met = dp * r(m) <= r(1) && sim_n(dp);
        for f in 1..m as i64 {
            met = met && q.disc2_pair(f, 1, 0, 1, dp)?;
        }
        let bound = 2.0 * to_f64(dp) * to_f64(a);
        let holds = lambda.abs() <= bound + 1e-9 * to_f64(a).max(1.0);
        let slack = if bound > 0.0 { Some((bound - lambda.abs()) / bound) } else { None };
        entries.push(entry("A.4", format!("delta'={dp}"), met, holds, slack));
    }

    // distribution_of_A
    let mut tuples = Vec::new();
    for &dp in &grid.delta_primes {
        let lmin_extra = ceil_int(dp * r(m));
        for d in spread(1, h, 3) {
            let d = d as i128;
            for l in spread(d + lmin_extra, h, 3) {
                let l = l as i128;
                for s in spread(d, h, 3) {
                    let s = s as i128;
                    for tt in spread(s + l + d, h - l, 3) {
                        tuples.push((dp, d, l, s, tt as i128));
                    }
                }
            }
        }
    }
    for (dp, d, l, s, tt) in thin(tuples, cap) {
        let met = sim_n(dp) && q.distribution_pairs(d as u64, l as u64, s as u64, tt as u64, dp)?;
        let (d1, d2) = (tt - s - l, tt - s + l);
        let lhs = (r(d * m) * count(d1, d2) - r(2 * l * d) * a).abs();
        let rhs = a * (r(d * d) + r(2) * dp * r((l + d) * (l + d) + l * l));
        entries.push(entry(
            "distribution_of_A",
            format!("delta'={dp} d={d} l={l} s={s} t={tt}"),
            met,
            lhs <= rhs,
            margin(lhs, rhs),
        ));
    }

    // Corollary rewriting the distribution bound in terms of d₁, d₂.
    let mut tuples = Vec::new();
    for &dp in &grid.delta_primes {
        let gap = ceil_int(r(2) * dp * r(m));
        for d in spread(1, h, 3) {
            let d = d as i128;
            let d2max = h - 1 - d;
            for d1 in spread(d, d2max, 3) {
                let d1 = d1 as i128;
                for d2 in spread(d1 + 1 + 2 * d + gap, d2max, 3) {
                    let d2 = d2 as i128;
                    if 2 * (d2 + 1 + d) <= m && d1 < d2 - 1 {
                        tuples.push((dp, d, d1, d2));
                    }
                }
            }
        }
    }
    for (dp, d, d1, d2) in thin(tuples, cap) {
        let met = sim_n(dp) && q.rewriting_pairs(d as u64, d1 as u64, d2 as u64, dp)?;
        let lhs = (r(m) * count(d1, d2) - r(d2 - d1) * a).abs();
        let rhs = a * (r(d + 1) + dp * r(m * m) / r(4 * d));
        entries.push(entry(
            "rewriting",
            format!("delta'={dp} d={d} d1={d1} d2={d2}"),
            met,
            lhs <= rhs,
            margin(lhs, rhs),
        ));
    }

    // initial_interval
    let mut tuples = Vec::new();
    for &delta in &grid.deltas {
        for d in spread(ceil_int(delta * r(m) / r(2)).max(1), h, 4) {
            tuples.push((delta, d as i128));
        }
    }
    for (delta, d) in thin(tuples, cap) {
        let met = delta <= Rational::new(1, 3) && n >= 4 && q.disc_set(0, 2 * d as u64, delta)?;
        let lhs = r(m) * count(0, d);
        let rhs = r(4 * d) * a;
        entries.push(entry("initial_interval", format!("delta={delta} d={d}"), met, lhs <= rhs, margin(lhs, rhs)));
    }

    // final_interval
    let mut tuples = Vec::new();
    for &dp in &grid.delta_primes {
        for d in spread(ceil_int(dp * r(m)).max(1), (h - 1) / 2, 4) {
            tuples.push((dp, d as i128));
        }
    }
    for (dp, d) in thin(tuples, cap) {
        let met = dp <= Rational::new(1, 3)
            && n >= 4
            && q.disc2_pair(0, d as u64, (h - d - 1) as i64, (2 * d + 1) as u64, dp)?;
        let lhs = r(m) * count(h - d - 1, h + 1);
        let rhs = r(4 * (d + 1)) * a;
        entries.push(entry("final_interval", format!("delta'={dp} d={d}"), met, lhs <= rhs, margin(lhs, rhs)));
    }

    // A.5, A.6 over (η, σ).
    let mut pairs = Vec::new();
    for &eta in &grid.etas {
        for &sigma in &grid.sigmas {
            pairs.push((eta, sigma));
        }
    }
    for &(eta, sigma) in &thin(pairs.clone(), cap) {
        let es = eta * sigma;
        let dp = es * es / r(240);
        let mut met = es <= Rational::new(1, 2) && dp * r(m) > r(1) && sim_n(dp) && n >= 4;
        if met {
            let d = floor_int(es * r(m) / r(60));
            met = d >= 1
                && q.disc_set(0, 2 * d as u64, dp)?
                && q.disc2_pair(0, d as u64, (h - d - 1) as i64, (2 * d + 1) as u64, dp)?;
            let eta_m = eta * r(m);
            'outer: for big1 in 0..=h {
                for big2 in big1 + 1..=h + 1 {
                    if !met {
                        break 'outer;
                    }
                    if r(big2 - big1) < eta_m {
                        continue;
                    }
                    let (d1, d2) = (big1.max(d), big2.min(h - d - 1));
                    if d1 < d2 - 1 && 2 * (d2 + 1 + d) <= m {
                        met = q.rewriting_pairs(d as u64, d1 as u64, d2 as u64, dp)?;
                    }
                }
            }
        }
        let report = check_z_int_disc(&p, eta, sigma)?;
        entries.push(entry("A.5", format!("eta={eta} sigma={sigma}"), met, report.holds(), None));
    }
    for &(eta, sigma) in &thin(pairs, cap) {
        let met = r(m) * eta * sigma >= r(3) && check_z_int_disc(&p, eta / r(2), sigma / r(3))?.holds();
        let report = check_s1_arc_disc(&p, eta, sigma)?;
        entries.push(entry("A.6", format!("eta={eta} sigma={sigma}"), met, report.holds(), None));
    }

    // A.7 and the arc claim inside its proof.
    for &eps in &thin(grid.epsilons.clone(), cap) {
        let eta = rational_below(to_f64(eps) / (8.0 * std::f64::consts::PI), 1_000_000_000);
        let sigma = eps / r(8);
        let arc = eta > r(0) && check_s1_arc_disc(&p, eta, sigma)?.holds();
        let bound = to_f64(eps) * to_f64(a);
        let holds = lambda.abs() <= bound + 1e-9 * to_f64(a).max(1.0);
        let slack = if bound > 0.0 { Some((bound - lambda.abs()) / bound) } else { None };
        entries.push(entry("A.7", format!("eps={eps} eta={eta} sigma={sigma}"), arc, holds, slack));

        let k = if eta > r(0) { floor_int(r(1) / (r(8) * eta)) } else { 0 };
        let (holds, slack) = claim_arcs(&p, k, sigma);
        entries.push(entry("claim", format!("eps={eps} k={k}"), arc && k >= 1, holds, slack));
    }

    Ok(LemmaAuditReport { character: t.clone(), m: p.m, entries })
}

/// Every arc `I_j^±` of angle `π/2k` holds `∼_{2σ} |A|/4k` elements.
fn claim_arcs(p: &IntervalProfile, k: i128, sigma: Rational) -> (bool, Option<f64>) {
    if k < 1 {
        return (true, None);
    }
    let m = p.m as i128;
    let expected = Rational::new(p.total() as i128, 4 * k);
    let tol = r(2) * sigma;
    let mut holds = true;
    let mut worst = f64::INFINITY;
    let half = m / 2;
    for j in 1..=k {
        let plus = (0..=half).filter(|&f| (j - 1) * m <= 4 * k * f && 4 * k * f < j * m);
        let minus = (0..=half).filter(|&f| (2 * k - j) * m < 4 * k * f && 4 * k * f <= (2 * k - j + 1) * m);
        for fibers in [plus.collect::<Vec<_>>(), minus.collect::<Vec<_>>()] {
            let c = r(fibers.iter().map(|&f| p.fiber_counts[f as usize] as i128).sum());
            holds &= sim(c, expected, tol);
            if expected > r(0) {
                let dev = to_f64(((c - expected) / expected).abs());
                worst = worst.min(to_f64(tol) - dev);
            }
        }
    }
    (holds, worst.is_finite().then_some(worst))
}

/// Audits every nontrivial character of `g`, in character order.
pub fn audit_all_characters(g: &CayleyGraph, grid: &AuditGrid) -> Result<Vec<LemmaAuditReport>> {
    let group = g.group();
    (1..group.order()).into_par_iter().map(|i| audit_appendix_lemmas(g, &group.element_at(i), grid)).collect()
}
