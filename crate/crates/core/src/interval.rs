//! Fiber counts of `ρ_t` on the connection set and the interval/arc
//! discrepancy properties built from them.
//!
//! For a nontrivial character `t` with image order `m`, the fiber count
//! `c_f = |A ∩ ρ⁻¹(f)|` determines everything here: interval counts are prefix
//! sums of `c`, and the quotient graph on `ℤ/m` has weights `(n/m)·c_{r-s}`.

use std::collections::HashMap;

use serde::Serialize;

use num_traits::Signed;

use crate::cayley::{CayleyGraph, Graph, VertexSet};
use crate::error::{invalid, Error, Result};
use crate::group::{cos_fraction, CharacterIndex};
use crate::rational::{require_unit_interval, Rational};

#[derive(Debug, Clone, Serialize)]
pub struct IntervalProfile {
    pub character: Option<CharacterIndex>,
    pub m: u64,
    /// Group order `n`; a multiple of `m`.
    pub n: usize,
    pub fiber_counts: Vec<u64>,
    #[serde(skip)]
    prefix: Vec<u64>,
}

impl IntervalProfile {
    pub fn new(g: &CayleyGraph, t: &CharacterIndex) -> Result<Self> {
        let group = g.group();
        let rho = group.rho_map(t)?;
        let m = rho.image_order();
        let mut fibers = vec![0u64; m as usize];
        for &a in g.connection_indices() {
            fibers[rho.apply_index(a) as usize] += 1;
        }
        let mut p = Self::from_fibers(group.order(), fibers)?;
        p.character = Some(t.clone());
        Ok(p)
    }

    /// Profile from explicit fiber counts, `m = fibers.len()`.
    pub fn from_fibers(n: usize, fibers: Vec<u64>) -> Result<Self> {
        let m = fibers.len();
        if m < 2 {
            return Err(invalid("a profile needs m ≥ 2"));
        }
        if !n.is_multiple_of(m) {
            return Err(invalid(format!("m = {m} does not divide n = {n}")));
        }
        let mut prefix = Vec::with_capacity(m + 1);
        prefix.push(0);
        for &c in &fibers {
            prefix.push(prefix.last().unwrap() + c);
        }
        Ok(Self { character: None, m: m as u64, n, fiber_counts: fibers, prefix })
    }

    /// `|A| = Σ_f c_f`.
    pub fn total(&self) -> u64 {
        self.prefix[self.m as usize]
    }

    /// `n/m`, the common size of the fibers `ρ⁻¹(f)` in the group.
    pub fn fiber_size(&self) -> u64 {
        self.n as u64 / self.m
    }

    /// `|A ∩ ρ⁻¹([d1, d2))|` for `0 ≤ d1 < d2 ≤ m`.
    pub fn interval_count(&self, d1: u64, d2: u64) -> Result<u64> {
        if d1 >= d2 || d2 > self.m {
            return Err(invalid(format!("need 0 ≤ D1 < D2 ≤ m, got [{d1}, {d2}) with m = {}", self.m)));
        }
        Ok(self.count(d1, d2))
    }

    /// Unchecked `Σ_{d1 ≤ f < d2} c_f` for `d1 ≤ d2 ≤ m`.
    pub(crate) fn count(&self, d1: u64, d2: u64) -> u64 {
        self.prefix[d2 as usize] - self.prefix[d1 as usize]
    }

    /// `Σ c_f` over the cyclic range `[start, start + len)` of `ℤ/m`.
    pub(crate) fn cyclic_count(&self, start: i64, len: u64) -> u64 {
        let m = self.m;
        let len = len.min(m);
        let a = start.rem_euclid(m as i64) as u64;
        if a + len <= m {
            self.count(a, a + len)
        } else {
            self.count(a, m) + self.count(0, a + len - m)
        }
    }

    /// `c_f = c_{-f}`, which holds for every symmetric connection set.
    pub fn is_symmetric(&self) -> bool {
        let m = self.m as usize;
        (0..m).all(|f| self.fiber_counts[f] == self.fiber_counts[(m - f) % m])
    }

    /// `λ^(χ_t) = Σ_f c_f cos(2πf/m)`.
    pub fn lambda(&self) -> f64 {
        self.fiber_counts.iter().enumerate().map(|(f, &c)| c as f64 * cos_fraction(f as u64, self.m)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Deviation {
    /// More elements than `(1 + σ)` times the proportional share.
    Over,
    /// Fewer elements than `(1 - σ)` times the proportional share.
    Under,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntervalViolation {
    /// `D₁` (or the first grid index of an arc).
    pub lower: u64,
    /// `D₂` exclusive for intervals; for arcs, the last grid index covered.
    /// An arc with `lower > upper` covers no grid point.
    pub upper: u64,
    pub count: u64,
    /// Length as a fraction of the whole circle `ℤ/m` or `S¹`.
    #[serde(serialize_with = "crate::rational::serialize")]
    pub length: Rational,
    /// For arcs: the length is a supremum that is approached but not attained.
    pub open: bool,
    pub kind: Deviation,
    #[serde(serialize_with = "crate::rational::serialize")]
    pub deviation: Rational,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntervalReport {
    #[serde(serialize_with = "crate::rational::serialize")]
    pub eta: Rational,
    #[serde(serialize_with = "crate::rational::serialize")]
    pub sigma: Rational,
    pub checked: u64,
    pub violation: Option<IntervalViolation>,
}

impl IntervalReport {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

fn rel_deviation(count: u64, expected: Rational) -> Rational {
    let c = Rational::from(count as i128);
    if expected == Rational::from(0) {
        return Rational::from(0);
    }
    ((c - expected) / expected).abs()
}

/// `count ∼_σ length·|A|`, with `length` a fraction of the circle.
fn classify(count: u64, length: Rational, total: u64, sigma: Rational) -> Option<Deviation> {
    let expected = length * Rational::from(total as i128);
    let c = Rational::from(count as i128);
    let one = Rational::from(1);
    if c > (one + sigma) * expected {
        Some(Deviation::Over)
    } else if c < (one - sigma) * expected {
        Some(Deviation::Under)
    } else {
        None
    }
}

/// ℤ-INT-DISC(ρ; η, σ): every `0 ≤ D₁ < D₂ ≤ ⌊m/2⌋+1` with `D₂ - D₁ ≥ ηm`
/// has `|A ∩ ρ⁻¹([D₁, D₂))| ∼_σ ((D₂ - D₁)/m)|A|`. Pairs are scanned in
/// lexicographic order and the first failure is reported.
pub fn check_z_int_disc(p: &IntervalProfile, eta: Rational, sigma: Rational) -> Result<IntervalReport> {
    require_unit_interval("eta", eta)?;
    require_unit_interval("sigma", sigma)?;
    let m = p.m;
    let top = (m / 2 + 1).min(m);
    let total = p.total();
    let eta_m = eta * Rational::from(m as i128);
    let mut checked = 0;
    for d1 in 0..top {
        for d2 in d1 + 1..=top {
            if Rational::from((d2 - d1) as i128) < eta_m {
                continue;
            }
            checked += 1;
            let count = p.count(d1, d2);
            let length = Rational::new((d2 - d1) as i128, m as i128);
            if let Some(kind) = classify(count, length, total, sigma) {
                let deviation = rel_deviation(count, length * Rational::from(total as i128));
                return Ok(IntervalReport {
                    eta,
                    sigma,
                    checked,
                    violation: Some(IntervalViolation {
                        lower: d1,
                        upper: d2,
                        count,
                        length,
                        open: false,
                        kind,
                        deviation,
                    }),
                });
            }
        }
    }
    Ok(IntervalReport { eta, sigma, checked, violation: None })
}

/// S¹-ARC-DISC(χ_arg; η, σ) over all real arcs `[θ₁, θ₂] ⊆ [0, π]` with
/// `θ₂ - θ₁ ≥ 2πη`.
///
/// Every value of `χ_arg` on the group lies on the grid `2πf/m`, so an arc is
/// determined, as far as counts go, by the grid range `[F₁, F₂]` it covers.
/// For each range the achievable arc lengths (in units of `2π`) form an
/// interval from `(F₂ - F₁)/m` up to a supremum that may or may not be
/// attained; the condition fails on that range iff it fails at one of the two
/// ends. Arcs between consecutive grid points, covering nothing, exist iff
/// `η < 1/m`.
pub fn check_s1_arc_disc(p: &IntervalProfile, eta: Rational, sigma: Rational) -> Result<IntervalReport> {
    require_unit_interval("eta", eta)?;
    require_unit_interval("sigma", sigma)?;
    let m = p.m as i128;
    let half = p.m / 2;
    let total = p.total();
    let one = Rational::from(1);
    let mut checked = 0;

    if eta < Rational::new(1, m) {
        checked += 1;
        if sigma < one && total > 0 {
            return Ok(IntervalReport {
                eta,
                sigma,
                checked,
                violation: Some(IntervalViolation {
                    lower: 1,
                    upper: 0,
                    count: 0,
                    length: eta,
                    open: false,
                    kind: Deviation::Under,
                    deviation: one,
                }),
            });
        }
    }

    for f1 in 0..=half {
        for f2 in f1..=half {
            let xmin = Rational::new((f2 - f1) as i128, m);
            // sup of θ₂/2π given the last covered grid point is f2
            let (x2max, x2_open) = if 2 * (f2 + 1) > p.m {
                (Rational::new(1, 2), false)
            } else {
                (Rational::new(f2 as i128 + 1, m), true)
            };
            // inf of θ₁/2π given the first covered grid point is f1
            let (x1min, x1_open) =
                if f1 == 0 { (Rational::from(0), false) } else { (Rational::new(f1 as i128 - 1, m), true) };
            let xmax = x2max - x1min;
            let open = x2_open || x1_open;
            let lo = xmin.max(eta);
            let admissible = if open { lo < xmax } else { lo <= xmax };
            if !admissible {
                continue;
            }
            checked += 1;
            let count = p.count(f1, f2 + 1);
            let c = Rational::from(count as i128);
            let a = Rational::from(total as i128);
            let violation = if c > (one + sigma) * lo * a {
                Some((lo, false, Deviation::Over))
            } else if c < (one - sigma) * xmax * a {
                Some((xmax, open, Deviation::Under))
            } else {
                None
            };
            if let Some((length, open, kind)) = violation {
                let deviation = rel_deviation(count, length * a);
                return Ok(IntervalReport {
                    eta,
                    sigma,
                    checked,
                    violation: Some(IntervalViolation { lower: f1, upper: f2, count, length, open, kind, deviation }),
                });
            }
        }
    }
    Ok(IntervalReport { eta, sigma, checked, violation: None })
}

/// Weights of the quotient graph on `ℤ/m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientWeights {
    pub m: u64,
    /// `w_between[f] = w({r, s})` whenever `r - s = f`; entry 0 is unused.
    pub w_between: Vec<u64>,
    /// `w(r)`, the number of edges inside one fiber.
    pub w_loop: u64,
}

/// Closed-form quotient weights, cross-checked against a direct count of
/// the edges between and inside the fibers of `ρ_t`.
pub fn quotient_weights(g: &CayleyGraph, t: &CharacterIndex) -> Result<QuotientWeights> {
    let p = IntervalProfile::new(g, t)?;
    let m = p.m;
    let fiber = p.fiber_size();
    let twice_loop = fiber * p.fiber_counts[0];
    if twice_loop % 2 != 0 {
        return Err(Error::InternalConsistency(format!("(n/m)·c₀ = {twice_loop} is odd")));
    }
    let closed = QuotientWeights {
        m,
        w_between: (0..m as usize).map(|f| if f == 0 { 0 } else { fiber * p.fiber_counts[f] }).collect(),
        w_loop: twice_loop / 2,
    };

    // Direct count: every ordered pair (γ, γ + a) lands in fibers (r, s).
    let group = g.group();
    let rho = group.rho_map(t)?;
    let table = rho.table();
    let mut direct: HashMap<(u64, u64), u64> = HashMap::new();
    for gamma in 0..group.order() {
        for &a in g.connection_indices() {
            let key = (table[gamma], table[group.add_index(gamma, a)]);
            *direct.entry(key).or_insert(0) += 1;
        }
    }
    for r in 0..m {
        for s in 0..m {
            let seen = direct.get(&(r, s)).copied().unwrap_or(0);
            let expected = if r == s { 2 * closed.w_loop } else { closed.w_between[((r + m - s) % m) as usize] };
            if seen != expected {
                return Err(Error::InternalConsistency(format!(
                    "quotient weight for fibers ({r}, {s}): closed form {expected}, direct count {seen}"
                )));
            }
        }
    }
    Ok(closed)
}

/// `ρ⁻¹([lo, hi))` as a vertex set.
pub fn rho_preimage(g: &CayleyGraph, t: &CharacterIndex, lo: u64, hi: u64) -> Result<VertexSet> {
    let table = g.group().rho_map(t)?.table();
    VertexSet::from_indices(g.order(), (0..table.len()).filter(|&i| (lo..hi).contains(&table[i])))
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityAudit {
    pub lhs: i128,
    pub rhs: i128,
    pub holds: bool,
}

/// `m·e(ρ⁻¹[s, s+ℓ), ρ⁻¹[tt, tt+ℓ)) = n·(Σ_{d₁<f<tt-s} (f-d₁)c_f + Σ_{tt-s≤f<d₂} (d₂-f)c_f)`
/// with `d₁ = tt-s-ℓ`, `d₂ = tt-s+ℓ`. The left side counts edges directly.
pub fn audit_interval_identity(g: &CayleyGraph, t: &CharacterIndex, s: u64, l: u64, tt: u64) -> Result<IdentityAudit> {
    let p = IntervalProfile::new(g, t)?;
    let m = p.m;
    if !(l >= 1 && s + l <= tt && 2 * (tt + l) <= m) {
        return Err(invalid(format!("need 0 ≤ s < s+ℓ ≤ t < t+ℓ ≤ m/2, got s={s} ℓ={l} t={tt} m={m}")));
    }
    let u = rho_preimage(g, t, s, s + l)?;
    let w = rho_preimage(g, t, tt, tt + l)?;
    let lhs = m as i128 * g.edge_count_between(&u, &w)? as i128;
    let (d1, d2, mid) = ((tt - s - l) as i128, (tt - s + l) as i128, (tt - s) as i128);
    let c = |f: i128| p.fiber_counts[f as usize] as i128;
    let rising: i128 = (d1 + 1..mid).map(|f| (f - d1) * c(f)).sum();
    let falling: i128 = (mid..d2).map(|f| (d2 - f) * c(f)).sum();
    let rhs = p.n as i128 * (rising + falling);
    Ok(IdentityAudit { lhs, rhs, holds: lhs == rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::ConnectionSet;
    use crate::group::Group;
    use proptest::prelude::*;

    fn cyclic(n: u64, residues: &[i64]) -> CayleyGraph {
        let g = Group::cyclic(n).unwrap();
        CayleyGraph::new(g.clone(), ConnectionSet::from_residues(&g, residues).unwrap())
    }

    fn interval(n: u64, k: i64) -> CayleyGraph {
        cyclic(n, &(1..=k).flat_map(|a| [a, -a]).collect::<Vec<_>>())
    }

    fn t(g: &CayleyGraph, r: i64) -> CharacterIndex {
        g.group().cyclic_element(r).unwrap()
    }

    #[test]
    fn interval_counts() {
        let g = interval(16, 4);
        let p = IntervalProfile::new(&g, &t(&g, 1)).unwrap();
        assert_eq!(p.m, 16);
        assert_eq!(p.interval_count(0, 16).unwrap(), 8);
        assert_eq!(p.interval_count(1, 5).unwrap(), 4);
        assert!(p.interval_count(3, 3).is_err());
        assert!(p.interval_count(0, 17).is_err());
        assert!(p.is_symmetric());
        assert_eq!(p.cyclic_count(-4, 9), 8);
    }

    #[test]
    fn z_int_examples() {
        let uniform = IntervalProfile::from_fibers(64, vec![3; 16]).unwrap();
        for (e, s) in [(Rational::new(1, 10), Rational::new(1, 100)), (Rational::new(1, 64), Rational::new(1, 1000))] {
            assert!(check_z_int_disc(&uniform, e, s).unwrap().holds());
        }

        let g = interval(64, 8);
        let p = IntervalProfile::new(&g, &t(&g, 1)).unwrap();
        let r = check_z_int_disc(&p, Rational::new(1, 10), Rational::new(1, 2)).unwrap();
        let v = r.violation.unwrap();
        assert_eq!((v.lower, v.upper, v.count), (0, 7, 6));
        assert_eq!(v.kind, Deviation::Over);

        // ηm > ⌊m/2⌋ + 1 leaves nothing to check
        let r = check_z_int_disc(&p, Rational::new(3, 4), Rational::new(1, 100)).unwrap();
        assert!(r.holds());
        assert_eq!(r.checked, 0);
    }

    #[test]
    fn s1_arc_examples() {
        let uniform = IntervalProfile::from_fibers(64, vec![1; 64]).unwrap();
        assert!(check_s1_arc_disc(&uniform, Rational::new(1, 4), Rational::new(1, 2)).unwrap().holds());

        let g = interval(64, 8);
        let p = IntervalProfile::new(&g, &t(&g, 1)).unwrap();
        assert!(!check_s1_arc_disc(&p, Rational::new(1, 10), Rational::new(1, 2)).unwrap().holds());

        // The whole half circle [0, π]: fibers 0..=32 hold |A|/2 + c₀/2 + c₃₂/2 = 8.
        let r = check_s1_arc_disc(&p, Rational::new(1, 2), Rational::new(1, 100)).unwrap();
        assert_eq!(r.checked, 1);
        assert!(r.holds());

        // Arcs shorter than the grid spacing can miss every point.
        let r = check_s1_arc_disc(&uniform, Rational::new(1, 128), Rational::new(1, 2)).unwrap();
        assert_eq!(r.violation.unwrap().count, 0);
        assert!(check_s1_arc_disc(&uniform, Rational::new(1, 128), Rational::from(1)).unwrap().holds());
    }

    /// Brute force over arcs whose endpoints lie on a grid 6 times finer
    /// than `1/m`, including both endpoint conventions.
    fn brute_s1(p: &IntervalProfile, eta: Rational, sigma: Rational) -> bool {
        let m = p.m as i128;
        let steps = 6 * m / 2;
        let den = 6 * m;
        let total = Rational::from(p.total() as i128);
        for i in 0..=steps {
            for j in i + 1..=steps {
                let len = Rational::new(j - i, den);
                if len < eta {
                    continue;
                }
                let count: u64 = (0..=p.m / 2)
                    .filter(|&f| {
                        let x = Rational::new(f as i128, m);
                        Rational::new(i, den) <= x && x <= Rational::new(j, den)
                    })
                    .map(|f| p.fiber_counts[f as usize])
                    .sum();
                let c = Rational::from(count as i128);
                let one = Rational::from(1);
                if c > (one + sigma) * len * total || c < (one - sigma) * len * total {
                    return false;
                }
            }
        }
        true
    }

    proptest! {
        #[test]
        fn s1_checker_catches_every_brute_force_violation(
            fibers in prop::collection::vec(0u64..5, 2..14),
            eta_num in 1i128..10,
            sigma_num in 1i128..10,
        ) {
            let m = fibers.len();
            let mut sym = fibers.clone();
            for f in 1..m {
                sym[f] = sym[f].max(fibers[m - f]);
            }
            let p = IntervalProfile::from_fibers(m, sym).unwrap();
            prop_assume!(p.total() > 0);
            let eta = Rational::new(eta_num, 20);
            let sigma = Rational::new(sigma_num, 10);
            let fast = check_s1_arc_disc(&p, eta, sigma).unwrap();
            if !brute_s1(&p, eta, sigma) {
                prop_assert!(!fast.holds());
            }
        }

        #[test]
        fn fibers_are_symmetric_and_weights_consistent(n in 2u64..40, picks in prop::collection::vec(any::<bool>(), 20), ti in 1i64..40) {
            let residues: Vec<i64> = (1..n as i64).filter(|&a| picks[(a.min(n as i64 - a) as usize) % 20]).collect();
            let g = cyclic(n, &residues);
            let t = t(&g, ti % n as i64);
            prop_assume!(!t.is_zero());
            let p = IntervalProfile::new(&g, &t).unwrap();
            prop_assert!(p.is_symmetric());
            prop_assert_eq!(p.total() as usize, g.degree());
            let w = quotient_weights(&g, &t).unwrap();
            prop_assert_eq!(w.w_loop * 2, p.fiber_size() * p.fiber_counts[0]);
        }
    }

    #[test]
    fn quotient_weight_examples() {
        let g = interval(16, 4);
        let w = quotient_weights(&g, &t(&g, 1)).unwrap();
        assert_eq!(w.w_between[1], 1);
        assert_eq!(w.w_between[15], 1);
        assert_eq!(w.w_between[5], 0);
        assert_eq!(w.w_loop, 0);

        let g = cyclic(12, &[3, 9]);
        let w = quotient_weights(&g, &t(&g, 4)).unwrap();
        assert_eq!(w.m, 3);
        assert_eq!(w.w_loop, 4);
        assert!(w.w_between[1..].iter().all(|&x| x == 0));
    }

    #[test]
    fn interval_identity_examples() {
        let g = interval(64, 8);
        let r = audit_interval_identity(&g, &t(&g, 1), 0, 4, 8).unwrap();
        assert_eq!((r.lhs, r.rhs), (640, 640));
        assert!(r.holds);
        // ℓ = 1 reduces to a single fiber: m·w({s},{tt}) = n·c_{tt-s}
        let r = audit_interval_identity(&g, &t(&g, 1), 2, 1, 7).unwrap();
        assert!(r.holds);
        assert_eq!(r.rhs, 64);
        assert!(audit_interval_identity(&g, &t(&g, 1), 0, 4, 2).is_err());
        assert!(audit_interval_identity(&g, &t(&g, 1), 0, 4, 30).is_err());
    }
}
