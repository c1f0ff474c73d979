//! Closed-form spectra of Cayley graphs, a dense Jacobi oracle, and EIG(ε).

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use crate::cayley::{CayleyGraph, MAX_DENSE_ORDER};
use crate::error::{invalid, Error, Result};
use crate::group::{cos_fraction, sin_fraction, CharacterIndex, Element};
use crate::rational::{require_unit_interval, to_f64, Rational};

/// Relative tolerance used when EIG compares floating eigenvalues against
/// `ε·d̄`; verdicts within `1e-9·d̄` of the boundary count as holding.
pub const EIG_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumEntry {
    pub index: usize,
    pub character: CharacterIndex,
    pub lambda: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Spectrum {
    pub entries: Vec<SpectrumEntry>,
    /// Largest imaginary part discarded while summing characters over `A`.
    pub residual: f64,
    pub degree: usize,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.lambda).collect()
    }

    pub fn lambda1(&self) -> f64 {
        self.entries[0].lambda
    }

    /// `max_{i ≥ 2} |λ_i|`, or 0 for a one-vertex graph.
    pub fn second_abs(&self) -> f64 {
        self.entries.get(1).map_or(0.0, |e| e.lambda.abs())
    }

    /// Entry for a given character.
    pub fn entry_for(&self, t: &Element) -> Option<&SpectrumEntry> {
        self.entries.iter().find(|e| &e.character == t)
    }
}

/// `|λ|` descending, then `λ` descending, then by key ascending.
fn spectral_order(a: f64, b: f64) -> Ordering {
    b.abs().total_cmp(&a.abs()).then(b.total_cmp(&a))
}

/// `λ^(χ_t)` as `(Re, Im)` from the fibers of `ρ_t` on `A`.
pub(crate) fn character_sum(g: &CayleyGraph, t_index: usize) -> (f64, f64) {
    if t_index == 0 {
        return (g.degree() as f64, 0.0);
    }
    let group = g.group();
    let rho = group.rho_map(&group.element_at(t_index)).expect("nontrivial character");
    let m = rho.image_order();
    let mut images: Vec<u64> = g.connection_indices().iter().map(|&a| rho.apply_index(a)).collect();
    images.sort_unstable();
    let (mut re, mut im) = (0.0, 0.0);
    let mut i = 0;
    while i < images.len() {
        let f = images[i];
        let mut j = i;
        while j < images.len() && images[j] == f {
            j += 1;
        }
        let c = (j - i) as f64;
        re += c * cos_fraction(f, m);
        im += c * sin_fraction(f, m);
        i = j;
    }
    (re, im)
}

/// All `n` eigenvalues `λ^(χ_t) = Σ_f c_f cos(2πf/m)`, one per character.
///
/// The trivial character is pinned to `|A|` and listed first; the rest follow
/// by decreasing `|λ|`, then decreasing `λ`, then character index.
pub fn eigenvalues_character(g: &CayleyGraph) -> Result<Spectrum> {
    let group = g.group();
    let n = group.order();
    let sums: Vec<(f64, f64)> = (0..n).into_par_iter().map(|t| character_sum(g, t)).collect();
    let residual = sums.iter().map(|&(_, im)| im.abs()).fold(0.0, f64::max);
    let degree = g.degree();
    if residual > 1e-9 * degree.max(1) as f64 {
        return Err(Error::InternalConsistency(format!(
            "imaginary residual {residual:e} exceeds 1e-9·|A| for |A| = {degree}"
        )));
    }
    let mut order: Vec<usize> = (1..n).collect();
    order.sort_by(|&a, &b| spectral_order(sums[a].0, sums[b].0).then(a.cmp(&b)));
    let mut entries = Vec::with_capacity(n);
    entries.push(SpectrumEntry { index: 0, character: group.zero(), lambda: degree as f64 });
    entries.extend(order.into_iter().map(|t| SpectrumEntry {
        index: t,
        character: group.element_at(t),
        lambda: sums[t].0,
    }));
    Ok(Spectrum { entries, residual, degree })
}

/// Eigenvalues of a dense real symmetric matrix by cyclic Jacobi rotations,
/// sorted by decreasing absolute value (ties: larger signed value first).
pub fn eigenvalues_dense(matrix: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = matrix.len();
    if n > MAX_DENSE_ORDER {
        return Err(Error::SizeLimit { what: "dense eigensolver", size: n, limit: MAX_DENSE_ORDER });
    }
    if matrix.iter().any(|row| row.len() != n) {
        return Err(invalid("matrix is not square"));
    }
    let mut a = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            if matrix[i][j] != matrix[j][i] {
                return Err(invalid(format!("matrix is not symmetric at ({i}, {j})")));
            }
            a[i * n + j] = matrix[i][j];
        }
    }
    jacobi_in_place(&mut a, n);
    let mut values: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    values.sort_by(|&x, &y| spectral_order(x, y));
    Ok(values)
}

/// Dense eigenvalues of a 0/1 adjacency matrix.
pub fn eigenvalues_adjacency(adjacency: &[Vec<u8>]) -> Result<Vec<f64>> {
    let m: Vec<Vec<f64>> = adjacency.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
    eigenvalues_dense(&m)
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    s.sqrt()
}

fn jacobi_in_place(a: &mut [f64], n: usize) {
    if n < 2 {
        return;
    }
    let frob = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    // Stop well below the 1e-10·n requirement; Jacobi converges quadratically
    // once the off-diagonal mass is small, so the extra sweeps are cheap.
    let target = (1e-13 * frob.max(1.0)).min(1e-10 * n as f64);
    for _sweep in 0..100 {
        if off_diagonal_norm(a, n) <= target {
            return;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EigReport {
    #[serde(serialize_with = "crate::rational::serialize")]
    pub eps: Rational,
    pub lambda1: f64,
    pub second: f64,
    pub average_degree: f64,
    pub holds: bool,
    pub failing_character: Option<CharacterIndex>,
}

/// EIG(ε) on a character spectrum, with `d̄ = |A|`.
pub fn check_eig(spectrum: &Spectrum, eps: Rational) -> Result<EigReport> {
    if spectrum.is_empty() {
        return Err(invalid("empty spectrum"));
    }
    let mut report = check_eig_values(&spectrum.values(), eps, spectrum.degree as f64)?;
    if !report.holds {
        let lambda1_ok = lambda1_within(report.lambda1, report.average_degree, to_f64(eps));
        report.failing_character = Some(if lambda1_ok {
            spectrum.entries[1].character.clone()
        } else {
            spectrum.entries[0].character.clone()
        });
    }
    Ok(report)
}

fn lambda1_within(lambda1: f64, dbar: f64, eps: f64) -> bool {
    let tol = EIG_TOLERANCE * dbar.max(1.0);
    (1.0 - eps) * dbar - tol <= lambda1 && lambda1 <= (1.0 + eps) * dbar + tol
}

/// EIG(ε) on a list sorted as by [`eigenvalues_dense`].
pub fn check_eig_values(values: &[f64], eps: Rational, average_degree: f64) -> Result<EigReport> {
    require_unit_interval("eps", eps)?;
    if values.is_empty() {
        return Err(invalid("empty spectrum"));
    }
    let e = to_f64(eps);
    let lambda1 = values[0];
    let second = values.get(1).map_or(0.0, |v| v.abs());
    let tol = EIG_TOLERANCE * average_degree.max(1.0);
    let holds = lambda1_within(lambda1, average_degree, e) && second <= e * average_degree + tol;
    Ok(EigReport { eps, lambda1, second, average_degree, holds, failing_character: None })
}
