//! Combinatorial toolkit for affine tasks of fair adversaries: chromatic
//! complexes, the standard chromatic subdivision, adversaries and their
//! agreement functions, the affine tasks `R_{k-OF}`, `R_{t-res}` and `R_A`,
//! the leader map `μ_Q`, and a model checker for the protocol solving `R_A`.

pub mod adversary;
pub mod affine;
pub mod complex;
pub mod export;
pub mod leader;
pub mod procset;
pub mod simulate;
pub mod subdivision;
pub mod svg;

pub use adversary::{Adversary, AdversaryError, AdversarySpec, AgreementFunction, FairAdversary};
pub use affine::{AffineError, AffineTask, CombineForm};
pub use complex::{ChromaticComplex, ChromaticVertex, ComplexError, Simplex};
pub use procset::{Color, ProcSet, MAX_PROCESSES};
pub use subdivision::{Chr2Vertex, ChrVertex, SubVertex};
