//! Computational tools for congruence n-permutability of finite algebras.
//!
//! The crate decides whether the variety generated by a finite algebra admits
//! Hagemann–Mitschke terms, extracts and verifies such terms, and provides a
//! small relation calculus with constructive chain transformations that
//! check the relational characterizations of n-permutability on concrete
//! finite instances.

pub mod algebra;
pub mod term;
pub mod subpower;
pub mod format;
pub mod relation;
pub mod relcheck;
pub mod congruence;
pub mod hm;
pub mod chain;
pub mod cli;
