//! Finite abelian groups `ℤ/n₁ × … × ℤ/n_k` and their characters.
//!
//! Elements are enumerated lexicographically on their residue vectors; the
//! position of an element in that order is its *index* and is stable public
//! contract (bitsets, adjacency matrices and CLI vertex lists all use it).
//!
//! The character attached to `t ∈ Γ` is `χ_t(γ) = exp(2πi Σ_j t_j γ_j / n_j)`.
//! Its image is the group of `m`-th roots of unity with
//! `m = lcm_j n_j / gcd(t_j, n_j)`, and `ρ_t: Γ → ℤ/m` is the integer
//! homomorphism with `χ_t(γ) = exp(2πi ρ_t(γ) / m)`, computed exactly.

use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Upper bound on the group order accepted by [`Group::new`].
pub const MAX_ORDER: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Element(Vec<u64>);

impl Element {
    pub fn residues(&self) -> &[u64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&r| r == 0)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return write!(f, "{}", self.0[0]);
        }
        write!(f, "(")?;
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

/// Index of a character in the dual group, identified with `Γ` itself.
pub type CharacterIndex = Element;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    moduli: Vec<u64>,
    order: usize,
    // strides[j] = Π_{i > j} n_i
    strides: Vec<usize>,
    exponent: u64,
}

impl Group {
    pub fn new(moduli: &[u64]) -> Result<Self> {
        if moduli.is_empty() {
            return Err(invalid("a group needs at least one cyclic factor"));
        }
        if moduli.contains(&0) {
            return Err(invalid("moduli must be positive"));
        }
        let mut order: usize = 1;
        for &n in moduli {
            order = usize::try_from(n)
                .ok()
                .and_then(|n| order.checked_mul(n))
                .filter(|&o| o <= MAX_ORDER)
                .ok_or_else(|| invalid(format!("group order exceeds {MAX_ORDER}")))?;
        }
        let mut strides = vec![1usize; moduli.len()];
        for j in (0..moduli.len().saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * moduli[j + 1] as usize;
        }
        let exponent = moduli.iter().fold(1u64, |acc, &n| acc.lcm(&n));
        Ok(Self { moduli: moduli.to_vec(), order, strides, exponent })
    }

    /// The cyclic group `ℤ/n`.
    pub fn cyclic(n: u64) -> Result<Self> {
        Self::new(&[n])
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    /// Least common multiple of the moduli.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn zero(&self) -> Element {
        Element(vec![0; self.rank()])
    }

    /// Builds an element, reducing each residue into canonical range.
    pub fn element(&self, residues: &[i64]) -> Result<Element> {
        if residues.len() != self.rank() {
            return Err(invalid(format!("element has {} residues, group has {} factors", residues.len(), self.rank())));
        }
        Ok(Element(residues.iter().zip(&self.moduli).map(|(&r, &n)| r.rem_euclid(n as i64) as u64).collect()))
    }

    /// Element of a cyclic group from a single residue.
    pub fn cyclic_element(&self, r: i64) -> Result<Element> {
        self.element(&[r])
    }

    pub fn check(&self, a: &Element) -> Result<()> {
        if a.0.len() != self.rank() {
            return Err(invalid(format!("element {a} has {} residues, group has {} factors", a.0.len(), self.rank())));
        }
        if a.0.iter().zip(&self.moduli).any(|(&r, &n)| r >= n) {
            return Err(invalid(format!("element {a} is not in canonical range for {:?}", self.moduli)));
        }
        Ok(())
    }

    pub fn index_of(&self, a: &Element) -> usize {
        a.0.iter().zip(&self.strides).map(|(&r, &s)| r as usize * s).sum()
    }

    pub fn element_at(&self, index: usize) -> Element {
        debug_assert!(index < self.order);
        Element(self.moduli.iter().zip(&self.strides).map(|(&n, &s)| ((index / s) % n as usize) as u64).collect())
    }

    /// All elements in enumeration (lexicographic) order.
    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.order).map(move |i| self.element_at(i))
    }

    pub fn add(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        Ok(Element(a.0.iter().zip(&b.0).zip(&self.moduli).map(|((&x, &y), &n)| (x + y) % n).collect()))
    }

    pub fn negate(&self, a: &Element) -> Result<Element> {
        self.check(a)?;
        Ok(Element(a.0.iter().zip(&self.moduli).map(|(&x, &n)| (n - x) % n).collect()))
    }

    pub fn sub(&self, a: &Element, b: &Element) -> Result<Element> {
        let nb = self.negate(b)?;
        self.add(a, &nb)
    }

    /// Index of `element_at(i) + element_at(j)`.
    pub fn add_index(&self, i: usize, j: usize) -> usize {
        if self.rank() == 1 {
            let n = self.order;
            let s = i + j;
            return if s >= n { s - n } else { s };
        }
        let mut out = 0;
        for (&n, &s) in self.moduli.iter().zip(&self.strides) {
            let n = n as usize;
            let x = (i / s) % n;
            let y = (j / s) % n;
            let z = x + y;
            out += if z >= n { z - n } else { z } * s;
        }
        out
    }

    /// Index of `element_at(i) - element_at(j)`.
    pub fn sub_index(&self, i: usize, j: usize) -> usize {
        self.add_index(i, self.neg_index(j))
    }

    pub fn neg_index(&self, i: usize) -> usize {
        if self.rank() == 1 {
            return if i == 0 { 0 } else { self.order - i };
        }
        let mut out = 0;
        for (&n, &s) in self.moduli.iter().zip(&self.strides) {
            let n = n as usize;
            let x = (i / s) % n;
            out += ((n - x) % n) * s;
        }
        out
    }

    /// `χ_t(γ)`.
    pub fn character_value(&self, t: &CharacterIndex, gamma: &Element) -> Result<Complex64> {
        self.check(t)?;
        self.check(gamma)?;
        // Reduce the phase exactly modulo the exponent before going to floats.
        let e = self.exponent as u128;
        let mut phase: u128 = 0;
        for ((&tj, &gj), &nj) in t.0.iter().zip(&gamma.0).zip(&self.moduli) {
            let scale = e / nj as u128;
            phase = (phase + (tj as u128 * gj as u128 % nj as u128) * scale) % e;
        }
        Ok(root_of_unity(phase as u64, self.exponent))
    }

    /// `m = |χ_t(Γ)|`, the order of the character's image.
    pub fn character_image_order(&self, t: &CharacterIndex) -> Result<u64> {
        self.check(t)?;
        Ok(image_order(&self.moduli, &t.0))
    }

    /// Exact `ρ_t` evaluator for a nontrivial character.
    pub fn rho_map(&self, t: &CharacterIndex) -> Result<RhoMap> {
        self.check(t)?;
        if t.is_zero() {
            return Err(invalid("ρ is only defined for nontrivial characters"));
        }
        let m = image_order(&self.moduli, &t.0);
        let coefficients =
            t.0.iter()
                .zip(&self.moduli)
                .map(|(&tj, &nj)| {
                    // m·t_j/n_j is an integer because n_j/gcd(t_j, n_j) divides m.
                    let g = tj.gcd(&nj);
                    (m / (nj / g)) * (tj / g) % m
                })
                .collect();
        Ok(RhoMap { group: self.clone(), m, coefficients })
    }

    /// `ρ_t(γ)` for a nontrivial character `t`.
    pub fn rho(&self, t: &CharacterIndex, gamma: &Element) -> Result<u64> {
        self.check(gamma)?;
        Ok(self.rho_map(t)?.apply(gamma))
    }
}

fn image_order(moduli: &[u64], t: &[u64]) -> u64 {
    t.iter().zip(moduli).map(|(&tj, &nj)| nj / tj.gcd(&nj)).fold(1u64, |acc, k| acc.lcm(&k))
}

/// `exp(2πi k/m)`.
pub fn root_of_unity(k: u64, m: u64) -> Complex64 {
    let angle = std::f64::consts::TAU * (k % m) as f64 / m as f64;
    Complex64::new(angle.cos(), angle.sin())
}

/// `cos(2πk/m)` with exact values on the axes.
pub fn cos_fraction(k: u64, m: u64) -> f64 {
    let k = k % m;
    if 4 * k == m || 4 * k == 3 * m {
        return 0.0;
    }
    if k == 0 {
        return 1.0;
    }
    if 2 * k == m {
        return -1.0;
    }
    (std::f64::consts::TAU * k as f64 / m as f64).cos()
}

/// `sin(2πk/m)` with exact values on the axes.
pub fn sin_fraction(k: u64, m: u64) -> f64 {
    let k = k % m;
    if k == 0 || 2 * k == m {
        return 0.0;
    }
    if 4 * k == m {
        return 1.0;
    }
    if 4 * k == 3 * m {
        return -1.0;
    }
    (std::f64::consts::TAU * k as f64 / m as f64).sin()
}

/// `ρ_t` for a fixed nontrivial character, with its coefficients precomputed:
/// `ρ_t(γ) = Σ_j (m t_j / n_j) γ_j mod m`.
#[derive(Debug, Clone)]
pub struct RhoMap {
    group: Group,
    m: u64,
    coefficients: Vec<u64>,
}

impl RhoMap {
    pub fn image_order(&self) -> u64 {
        self.m
    }

    pub fn apply(&self, gamma: &Element) -> u64 {
        let m = self.m as u128;
        let mut acc: u128 = 0;
        for (&c, &g) in self.coefficients.iter().zip(&gamma.0) {
            acc = (acc + c as u128 * g as u128) % m;
        }
        acc as u64
    }

    pub fn apply_index(&self, index: usize) -> u64 {
        if self.group.rank() == 1 {
            return (self.coefficients[0] as u128 * index as u128 % self.m as u128) as u64;
        }
        let m = self.m as u128;
        let mut acc: u128 = 0;
        for ((&c, &n), &s) in self.coefficients.iter().zip(&self.group.moduli).zip(&self.group.strides) {
            let g = ((index / s) % n as usize) as u128;
            acc = (acc + c as u128 * g) % m;
        }
        acc as u64
    }

    /// `ρ` of every element, in enumeration order.
    pub fn table(&self) -> Vec<u64> {
        (0..self.group.order()).map(|i| self.apply_index(i)).collect()
    }
}
