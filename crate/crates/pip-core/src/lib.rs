//! Computational kernel for the partial dual inverse symmetric monoid.
//!
//! The crate provides four layers:
//!
//! - [`diagram`]: exact arithmetic on partition diagrams (product via the
//!   anchor embedding, mirror involution, the concrete generators) together
//!   with [`perm`] for the group of units;
//! - [`presentation`]: generator words, the full defining-relation catalog,
//!   derived generators by conjugation, and the evaluation map onto diagrams;
//! - [`canonical`] and [`rewrite`]: canonical words, their direct evaluation,
//!   equivalence modulo the stabilizer group, extraction from diagrams, and
//!   the staged normalizer rewriting arbitrary words to canonical form;
//! - [`verify`]: brute-force enumeration, closed-form counting, generator
//!   closure, and exhaustive relation audits at small rank.
//!
//! All types are immutable values and all operations are pure, so everything
//! here is safe to use from many threads. With the default `parallel`
//! feature, the audits and closures in [`verify`] fan out with rayon;
//! sequential variants are always available.

pub mod canonical;
pub mod diagram;
pub mod error;
pub mod perm;
pub mod presentation;
pub mod rewrite;
pub mod verify;

pub use canonical::{CanonicalFactor, CanonicalWord, StabilizerSpec};
pub use diagram::Diagram;
pub use error::{Error, Result};
pub use perm::Perm;
pub use presentation::{GenKind, GenLetter, RelationInstance, Word};
pub use rewrite::{normalize, FactorForm};
pub use verify::VerificationReport;
