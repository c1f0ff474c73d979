//! Spectra and discrepancy of Cayley graphs on finite abelian groups.
//!
//! A Cayley graph `Cay(Γ, A)` on `Γ = ℤ/n₁ × … × ℤ/n_k` has one eigenvalue
//! per character, `λ^(χ_t) = Σ_{a∈A} χ_t(a)`. This crate computes those
//! values, checks the edge-distribution properties DISC and DISC₂ exactly,
//! and, when a large nontrivial eigenvalue exists, extracts an explicit pair
//! of sets with the wrong edge count.

pub mod audit;
pub mod cayley;
pub mod discrepancy;
pub mod error;
pub mod generators;
pub mod group;
pub mod interval;
pub mod rational;
pub mod rng;
pub mod spectrum;
pub mod walks;
pub mod witness;

pub use cayley::{CayleyGraph, ConnectionSet, Graph, VertexSet};
pub use discrepancy::{check_disc, check_disc2, DiscReport, Strategy, Verdict};
pub use error::{Error, Result};
pub use group::{CharacterIndex, Element, Group};
pub use rational::{parse_rational, Rational};
pub use spectrum::{check_eig, eigenvalues_character, EigReport, Spectrum};
pub use walks::{check_circuit, closed_walk_count, WalkMethod, WalkReport};
pub use witness::{extract_disc_violator, ExtractionConfig, ExtractionResult, WitnessOutcome};
