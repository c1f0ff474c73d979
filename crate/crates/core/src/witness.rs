//! From a large nontrivial eigenvalue to an explicit DISC violation.
//!
//! Given a character `χ` with `|λ^(χ)| ≥ ε|A|`, put `c = Re χ` and
//! `p = (1 + c)/2`. Drawing `-X` and `Y` independently with `P(γ ∈ ·) = p(γ)`
//! gives `E⟨A, (-X) * Y⟩ = ⟨A, p * p⟩`, which is `¼n|A|` shifted by a multiple
//! of `⟨A, c⟩ = λ^(χ)`. A trial whose statistic `η = e(X, Y) - ¼n|A|` is far
//! from zero certifies that one of `X∖Y`, `Y∖X`, `X∩Y`, `X∪Y` has the wrong
//! edge count, since
//!
//! `e(X, Y) = e(X∪Y) + e(X∩Y) - e(X∖Y) - e(Y∖X)`.

use num_traits::Signed;
use rayon::prelude::*;
use serde::Serialize;

use crate::cayley::{CayleyGraph, Graph, VertexSet};
use crate::discrepancy::{check_disc, Strategy, Verdict};
use crate::error::{invalid, Error, Result};
use crate::group::{cos_fraction, sin_fraction, CharacterIndex, Group};
use crate::rational::{require_unit_interval, to_f64, Rational};
use crate::rng::{derive_seed, SplitMix64};
use crate::spectrum::{eigenvalues_character, EIG_TOLERANCE};

/// A real function on the group, indexed in enumeration order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupFunction {
    pub values: Vec<f64>,
}

impl GroupFunction {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn constant(n: usize, v: f64) -> Self {
        Self { values: vec![v; n] }
    }

    /// Indicator function of a vertex set.
    pub fn indicator(set: &VertexSet) -> Self {
        let mut values = vec![0.0; set.universe()];
        for i in set.iter() {
            values[i] = 1.0;
        }
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// `Σ_γ f(γ) h(γ)`.
    pub fn dot(&self, other: &Self) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum()
    }

    /// `⟨A, f⟩ = Σ_{a∈A} f(a)`.
    pub fn on_connection_set(&self, g: &CayleyGraph) -> f64 {
        g.connection_indices().iter().map(|&a| self.values[a]).sum()
    }
}

/// `c = Re χ_t` and `s = Im χ_t`, with exact values on the axes.
pub fn components(group: &Group, t: &CharacterIndex) -> Result<(GroupFunction, GroupFunction)> {
    group.check(t)?;
    if t.is_zero() {
        let n = group.order();
        return Ok((GroupFunction::constant(n, 1.0), GroupFunction::constant(n, 0.0)));
    }
    let rho = group.rho_map(t)?;
    let m = rho.image_order();
    let table = rho.table();
    let c = table.iter().map(|&f| cos_fraction(f, m)).collect();
    let s = table.iter().map(|&f| sin_fraction(f, m)).collect();
    Ok((GroupFunction::new(c), GroupFunction::new(s)))
}

/// `(f * h)(α) = Σ_γ f(α - γ) h(γ)`, computed directly.
pub fn convolve(group: &Group, f: &GroupFunction, h: &GroupFunction) -> Result<GroupFunction> {
    let n = group.order();
    if f.len() != n || h.len() != n {
        return Err(invalid(format!("convolution needs functions of length {n}, got {} and {}", f.len(), h.len())));
    }
    let values = (0..n)
        .into_par_iter()
        .map(|alpha| (0..n).map(|gamma| f.values[group.sub_index(alpha, gamma)] * h.values[gamma]).sum())
        .collect();
    Ok(GroupFunction::new(values))
}

/// Both sides of each identity and the worst residual relative to `n·|A|`.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub m: u64,
    pub sum_c: f64,
    pub sum_s: f64,
    pub sum_c_squared: f64,
    /// `n` when `m = 2`, `n/2` otherwise.
    pub expected_c_squared: f64,
    pub sum_sc: f64,
    /// `max_a |(c * c)(a) - κ c(a)|` with `κ` the expected `Σ c²`.
    pub convolution_residual: f64,
    /// `⟨A, p * p⟩`.
    pub pair_lhs: f64,
    /// `¼n|A| + (n/8)⟨A, c⟩`, or `(n/4)⟨A, c⟩` in the second term when `m = 2`.
    pub pair_rhs: f64,
    pub residual: f64,
    pub holds: bool,
}

pub const IDENTITY_TOLERANCE: f64 = 1e-7;

pub fn verify_ident(g: &CayleyGraph, t: &CharacterIndex) -> Result<IdentityReport> {
    if t.is_zero() {
        return Err(invalid("identities need a nontrivial character"));
    }
    let group = g.group();
    let n = group.order() as f64;
    let m = group.character_image_order(t)?;
    let (c, s) = components(group, t)?;
    let kappa = if m == 2 { n } else { n / 2.0 };
    let cc = convolve(group, &c, &c)?;
    let convolution_residual = cc.values.iter().zip(&c.values).map(|(x, y)| (x - kappa * y).abs()).fold(0.0, f64::max);
    let p = GroupFunction::new(c.values.iter().map(|x| (1.0 + x) / 2.0).collect());
    let pp = convolve(group, &p, &p)?;
    let a = g.degree() as f64;
    let a_c = c.on_connection_set(g);
    let pair_lhs = pp.on_connection_set(g);
    let pair_rhs = n * a / 4.0 + if m == 2 { n / 4.0 } else { n / 8.0 } * a_c;
    let report = IdentityReport {
        m,
        sum_c: c.sum(),
        sum_s: s.sum(),
        sum_c_squared: c.dot(&c),
        expected_c_squared: kappa,
        sum_sc: s.dot(&c),
        convolution_residual,
        pair_lhs,
        pair_rhs,
        residual: 0.0,
        holds: false,
    };
    let scale = n * a.max(1.0);
    let residual = [
        report.sum_c.abs(),
        report.sum_s.abs(),
        (report.sum_c_squared - kappa).abs(),
        report.sum_sc.abs(),
        convolution_residual,
        (pair_lhs - pair_rhs).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
        / scale;
    Ok(IdentityReport { residual, holds: residual <= IDENTITY_TOLERANCE, ..report })
}

/// One draw of `(X, Y)`: first `-X` then `Y`, one uniform per element each,
/// from a single stream seeded with `seed`.
pub fn sample_witness_sets(g: &CayleyGraph, t: &CharacterIndex, seed: u64) -> Result<(VertexSet, VertexSet)> {
    if t.is_zero() {
        return Err(invalid("witness sampling needs a nontrivial character"));
    }
    let (c, _) = components(g.group(), t)?;
    let p: Vec<f64> = c.values.iter().map(|x| (1.0 + x) / 2.0).collect();
    Ok(sample_with(g, &p, seed))
}

fn sample_with(g: &CayleyGraph, p: &[f64], seed: u64) -> (VertexSet, VertexSet) {
    let n = p.len();
    let mut rng = SplitMix64::new(seed);
    let mut draw = || {
        let mut s = VertexSet::empty(n);
        for (i, &pi) in p.iter().enumerate() {
            if rng.next_f64() < pi {
                s.insert(i);
            }
        }
        s
    };
    let neg_x = draw();
    let y = draw();
    (g.negate_set(&neg_x), y)
}

/// `4η = 4⟨A, (-X) * Y⟩ - n|A|`, exact.
pub fn eta4(g: &CayleyGraph, x: &VertexSet, y: &VertexSet) -> i128 {
    4 * g.pair_edge_count(x, y) as i128 - (g.order() * g.degree()) as i128
}

/// `η = e(X, Y) - ¼n|A|`.
pub fn eta(g: &CayleyGraph, x: &VertexSet, y: &VertexSet) -> f64 {
    eta4(g, x, y) as f64 / 4.0
}

/// `4η` for trials `0..count`, each drawn with seed `derive_seed(seed, i)`.
pub fn eta_samples(g: &CayleyGraph, t: &CharacterIndex, seed: u64, count: usize) -> Result<Vec<i128>> {
    let (c, _) = components(g.group(), t)?;
    let p: Vec<f64> = c.values.iter().map(|x| (1.0 + x) / 2.0).collect();
    Ok((0..count)
        .into_par_iter()
        .map(|i| {
            let (x, y) = sample_with(g, &p, derive_seed(seed, i as u64));
            eta4(g, &x, &y)
        })
        .collect())
}

/// `|η| ≥ (1/16)εn|A|`, exact.
pub fn eta_is_large(eta4: i128, eps: Rational, n: usize, degree: usize) -> bool {
    4 * eta4.abs() * eps.denom() >= eps.numer() * (n * degree) as i128
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SetKind {
    XMinusY,
    YMinusX,
    XCapY,
    XCupY,
}

impl SetKind {
    pub const ALL: [SetKind; 4] = [SetKind::XMinusY, SetKind::YMinusX, SetKind::XCapY, SetKind::XCupY];

    pub fn name(self) -> &'static str {
        match self {
            SetKind::XMinusY => "X\\Y",
            SetKind::YMinusX => "Y\\X",
            SetKind::XCapY => "X&Y",
            SetKind::XCupY => "X|Y",
        }
    }

    fn build(self, x: &VertexSet, y: &VertexSet) -> VertexSet {
        match self {
            SetKind::XMinusY => x.difference(y),
            SetKind::YMinusX => y.difference(x),
            SetKind::XCapY => x.intersection(y),
            SetKind::XCupY => x.union(y),
        }
    }
}

/// Expected fractions of `|X|`, `|Y|`, `|X∩Y|`, `|X∪Y|`.
fn size_targets(m: u64) -> [Rational; 4] {
    let r = Rational::new;
    if m == 2 {
        [r(1, 2); 4]
    } else {
        [r(1, 2), r(1, 2), r(3, 8), r(5, 8)]
    }
}

/// What one trial looked like; kept for diagnostics when extraction fails.
#[derive(Debug, Clone, Serialize)]
pub struct TrialSummary {
    pub index: usize,
    pub seed: u64,
    pub eta: f64,
    pub eta_large: bool,
    /// `|X|`, `|Y|`, `|X∩Y|`, `|X∪Y|`.
    pub sizes: [usize; 4],
    pub sizes_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessOutcome {
    pub character: CharacterIndex,
    pub m: u64,
    pub lambda: f64,
    #[serde(serialize_with = "crate::rational::serialize")]
    pub eps: Rational,
    #[serde(serialize_with = "crate::rational::serialize")]
    pub delta_used: Rational,
    pub x: VertexSet,
    pub y: VertexSet,
    pub eta: f64,
    pub tries_used: usize,
    pub trial_seed: u64,
    pub violator: SetKind,
    pub violator_set: VertexSet,
    pub violator_edges: u64,
    #[serde(serialize_with = "crate::rational::serialize")]
    pub deviation: Rational,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExtractionResult {
    Witness(Box<WitnessOutcome>),
    /// Every nontrivial `|λ|` is below `ε|A|`; reports the largest ratio.
    NoLargeEigenvalue {
        max_ratio: f64,
    },
}

#[derive(Debug, Clone)]
pub struct ExtractionConfig {
    pub eps: Rational,
    pub seed: u64,
    pub max_tries: usize,
    pub slack: Rational,
    /// Replaces `ε/5` (or `ε/10` when `m = 2`).
    pub delta: Option<Rational>,
}

impl ExtractionConfig {
    pub fn new(eps: Rational, seed: u64) -> Self {
        Self { eps, seed, max_tries: 20, slack: Rational::new(1, 20), delta: None }
    }
}

/// The character with the largest `|λ|`, lowest index on ties, provided
/// `|λ| ≥ ε|A|`; otherwise the largest ratio `|λ|/|A|`.
pub fn select_character(g: &CayleyGraph, eps: Rational) -> Result<std::result::Result<(CharacterIndex, f64), f64>> {
    let spectrum = eigenvalues_character(g)?;
    let a = g.degree() as f64;
    let best = spectrum
        .entries
        .iter()
        .filter(|e| e.index != 0)
        .min_by(|p, q| q.lambda.abs().total_cmp(&p.lambda.abs()).then(p.index.cmp(&q.index)));
    let Some(best) = best else { return Ok(Err(0.0)) };
    if a > 0.0 && best.lambda.abs() >= to_f64(eps) * a - EIG_TOLERANCE * a {
        Ok(Ok((best.character.clone(), best.lambda)))
    } else {
        Ok(Err(if a > 0.0 { best.lambda.abs() / a } else { 0.0 }))
    }
}

enum Trial {
    Success(Box<WitnessOutcome>),
    Failure(TrialSummary),
}

pub fn extract_disc_violator(g: &CayleyGraph, cfg: &ExtractionConfig) -> Result<ExtractionResult> {
    require_unit_interval("eps", cfg.eps)?;
    if cfg.slack < Rational::from(0) {
        return Err(invalid("slack must be nonnegative"));
    }
    if let Some(d) = cfg.delta {
        require_unit_interval("delta", d)?;
    }
    let (t, lambda) = match select_character(g, cfg.eps)? {
        Ok(found) => found,
        Err(max_ratio) => return Ok(ExtractionResult::NoLargeEigenvalue { max_ratio }),
    };
    let group = g.group();
    let m = group.character_image_order(&t)?;
    let delta = cfg.delta.unwrap_or(if m == 2 { cfg.eps / Rational::from(10) } else { cfg.eps / Rational::from(5) });
    let (c, _) = components(group, &t)?;
    let p: Vec<f64> = c.values.iter().map(|x| (1.0 + x) / 2.0).collect();

    let run = |index: usize| -> Result<Trial> {
        let seed = derive_seed(cfg.seed, index as u64);
        let (x, y) = sample_with(g, &p, seed);
        let e4 = eta4(g, &x, &y);
        let n = g.order();
        let sets: Vec<VertexSet> = SetKind::ALL.iter().map(|k| k.build(&x, &y)).collect();
        let sizes = [x.len(), y.len(), sets[2].len(), sets[3].len()];
        let sizes_ok = sizes
            .iter()
            .zip(size_targets(m))
            .all(|(&s, target)| (Rational::new(s as i128, n as i128) - target).abs() <= cfg.slack);
        let eta_large = eta_is_large(e4, cfg.eps, n, g.degree());
        let summary = TrialSummary { index, seed, eta: e4 as f64 / 4.0, eta_large, sizes, sizes_ok };
        if !(eta_large && sizes_ok) {
            return Ok(Trial::Failure(summary));
        }
        for (kind, set) in SetKind::ALL.into_iter().zip(sets) {
            let report = check_disc(g, delta, Strategy::Guided(vec![set.clone()]))?;
            if let Verdict::Violated { edges, deviation, .. } = report.verdict {
                return Ok(Trial::Success(Box::new(WitnessOutcome {
                    character: t.clone(),
                    m,
                    lambda,
                    eps: cfg.eps,
                    delta_used: delta,
                    x,
                    y,
                    eta: summary.eta,
                    tries_used: index + 1,
                    trial_seed: seed,
                    violator: kind,
                    violator_set: set,
                    violator_edges: edges,
                    deviation,
                })));
            }
        }
        Ok(Trial::Failure(summary))
    };

    let chunk = (2 * rayon::current_num_threads()).max(1);
    let mut best: Option<TrialSummary> = None;
    let mut start = 0;
    while start < cfg.max_tries {
        let end = (start + chunk).min(cfg.max_tries);
        let trials: Vec<Trial> = (start..end).into_par_iter().map(run).collect::<Result<_>>()?;
        for trial in trials {
            match trial {
                Trial::Success(outcome) => return Ok(ExtractionResult::Witness(outcome)),
                Trial::Failure(s) => {
                    if best.as_ref().is_none_or(|b| s.eta.abs() > b.eta.abs()) {
                        best = Some(s);
                    }
                }
            }
        }
        start = end;
    }
    Err(Error::ExtractionFailed { tries: cfg.max_tries, best: best.map(Box::new) })
}

impl ExtractionResult {
    pub fn witness(&self) -> Option<&WitnessOutcome> {
        match self {
            ExtractionResult::Witness(w) => Some(w),
            ExtractionResult::NoLargeEigenvalue { .. } => None,
        }
    }
}
