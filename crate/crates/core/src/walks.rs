//! Closed walks and the CIRCUIT_ℓ property.

use rayon::prelude::*;
use serde::Serialize;

use crate::cayley::{CayleyGraph, Graph};
use crate::error::{invalid, Error, Result};
use crate::rational::{to_f64, Rational};
use crate::spectrum::eigenvalues_character;

/// Largest order accepted by the exact matrix method.
pub const MAX_MATRIX_ORDER: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkMethod {
    Spectral,
    Matrix,
    Both,
}

#[derive(Debug, Clone, Serialize)]
pub struct WalkReport {
    pub length: u32,
    /// `Σ_i λ_i^ℓ`.
    pub count_spectral: Option<f64>,
    /// `tr(A^ℓ)`, exact.
    pub count_matrix: Option<i128>,
    pub average_degree: f64,
    pub dbar_power: f64,
    /// `count / d̄^ℓ`, using the exact count when available.
    pub deviation: f64,
}

impl WalkReport {
    pub fn count(&self) -> f64 {
        self.count_matrix.map(|c| c as f64).or(self.count_spectral).unwrap_or(0.0)
    }

    fn new(length: u32, spectral: Option<f64>, matrix: Option<i128>, dbar: f64) -> Self {
        let dbar_power = dbar.powi(length as i32);
        let mut r = Self {
            length,
            count_spectral: spectral,
            count_matrix: matrix,
            average_degree: dbar,
            dbar_power,
            deviation: 0.0,
        };
        r.deviation = if dbar_power > 0.0 { r.count() / dbar_power } else { f64::INFINITY };
        r
    }
}

/// `tr(A^ℓ)` by integer matrix powers with 128-bit entries.
pub fn trace_power<G: Graph + ?Sized>(g: &G, length: u32) -> Result<i128> {
    let n = g.order();
    if n > MAX_MATRIX_ORDER {
        return Err(Error::SizeLimit { what: "matrix walk count", size: n, limit: MAX_MATRIX_ORDER });
    }
    if length == 0 {
        return Ok(n as i128);
    }
    let neighbours: Vec<Vec<usize>> = g.adjacency_rows().iter().map(|r| r.to_vec()).collect();
    let times_a = |p: &[Vec<i128>]| -> Vec<Vec<i128>> {
        p.par_iter().map(|row| (0..n).map(|j| neighbours[j].iter().map(|&k| row[k]).sum()).collect()).collect()
    };
    // tr(A^ℓ) = Σ_{i,j} (A^a)_{ij} (A^b)_{ji} with a = ⌊ℓ/2⌋, b = ℓ - a.
    let a = length / 2;
    let b = length - a;
    let mut p: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect();
    for _ in 0..a {
        p = times_a(&p);
    }
    let mut q = p.clone();
    if b > a {
        q = times_a(&q);
    }
    Ok((0..n).map(|i| (0..n).map(|j| p[i][j] * q[j][i]).sum::<i128>()).sum())
}

/// Closed walks of length `ℓ` in a Cayley graph.
pub fn closed_walk_count(g: &CayleyGraph, length: u32, method: WalkMethod) -> Result<WalkReport> {
    if length == 0 {
        return Err(invalid("walk length must be at least 1"));
    }
    let spectral = match method {
        WalkMethod::Matrix => None,
        _ => Some(eigenvalues_character(g)?.values().iter().map(|l| l.powi(length as i32)).sum::<f64>()),
    };
    let matrix = match method {
        WalkMethod::Spectral => None,
        _ => Some(trace_power(g, length)?),
    };
    if let (Some(s), Some(m)) = (spectral, matrix) {
        if (s - m as f64).abs() > 1e-6 * (m as f64).abs().max(1.0) {
            return Err(Error::InternalConsistency(format!("spectral walk count {s} disagrees with trace {m}")));
        }
    }
    Ok(WalkReport::new(length, spectral, matrix, g.degree() as f64))
}

/// Closed walks of length `ℓ` in any graph, by the exact matrix method.
pub fn closed_walk_count_matrix<G: Graph + ?Sized>(g: &G, length: u32) -> Result<WalkReport> {
    if length == 0 {
        return Err(invalid("walk length must be at least 1"));
    }
    Ok(WalkReport::new(length, None, Some(trace_power(g, length)?), g.average_degree()))
}

#[derive(Debug, Clone, Serialize)]
pub struct CircuitReport {
    pub walks: WalkReport,
    #[serde(serialize_with = "crate::rational::serialize")]
    pub tol: Rational,
    pub holds: bool,
}

/// CIRCUIT_ℓ at tolerance `tol`: `|count/d̄^ℓ - 1| ≤ tol`.
/// The walk count uses both methods when the order allows it.
pub fn check_circuit(g: &CayleyGraph, length: u32, tol: Rational) -> Result<CircuitReport> {
    let method = if g.order() <= MAX_MATRIX_ORDER { WalkMethod::Both } else { WalkMethod::Spectral };
    check_circuit_with(g, length, tol, method)
}

pub fn check_circuit_with(g: &CayleyGraph, length: u32, tol: Rational, method: WalkMethod) -> Result<CircuitReport> {
    check_length(length, tol)?;
    circuit_verdict(closed_walk_count(g, length, method)?, tol)
}

/// CIRCUIT_ℓ for a generic graph through the matrix method.
pub fn check_circuit_matrix<G: Graph + ?Sized>(g: &G, length: u32, tol: Rational) -> Result<CircuitReport> {
    check_length(length, tol)?;
    circuit_verdict(closed_walk_count_matrix(g, length)?, tol)
}

fn check_length(length: u32, tol: Rational) -> Result<()> {
    if length < 4 || !length.is_multiple_of(2) {
        return Err(invalid(format!("CIRCUIT needs an even length of at least 4, got {length}")));
    }
    if tol < Rational::from(0) {
        return Err(invalid("tolerance must be nonnegative"));
    }
    Ok(())
}

fn circuit_verdict(walks: WalkReport, tol: Rational) -> Result<CircuitReport> {
    let holds = (walks.deviation - 1.0).abs() <= to_f64(tol);
    Ok(CircuitReport { walks, tol, holds })
}
