//! Feedback semantics for quantum Turing automata.
//!
//! * [`linalg`]: dense complex operators, structural permutations and the
//!   Moore-Penrose inverse.
//! * [`trace`]: feedback on isometries `U ⊕ K -> U ⊕ L` via the Schur
//!   I-complement, the Kleene limit and the kernel-image trace.
//! * [`dqta`]: directed quantum Turing automata with cascade, Turing tensor and
//!   feedback.
//! * [`intcat`]: the self-dual part of the Int construction over unitary
//!   automata, names, and the bidirectionalizing functor.
//! * [`axioms`]: seeded numerical checks of every categorical law.

pub mod error;
pub mod linalg;
pub mod trace;
pub mod dqta;
pub mod intcat;
pub mod axioms;

pub use error::{Error, Result};
