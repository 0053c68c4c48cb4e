//! Exact arithmetic for classes of upper k-gap balancing numbers.
//!
//! An upper k-gap balancing number `B` with balancer `r` satisfies
//! `T(B-k) + T(B) = T(B+r)` where `T(i) = i(i+1)/2`. Solutions organize
//! into finitely many classes per gap size `k`, each generated from a
//! seed by a fixed affine step map. This crate computes seeds, classes,
//! companion sequences (Lucas-balancing numbers, balancers, Lucas-balancers,
//! counterbalancers), transition maps between classes, generating
//! functions, identity checks, and large-range surveys over `k`.

pub mod arith;
pub mod classes;
pub mod identities;
pub mod oeis;
pub mod pairs;
pub mod series;
pub mod survey;
pub mod transitions;

pub use arith::{count_divisors, is_perfect_square, isqrt, triangular, Rational};
pub use classes::{BalancerClass, BalancingClass, Seed};
pub use pairs::{BalancerPair, BalancingPair, GapContext, PellPoint};
pub use transitions::TransitionMap;

/// Errors produced across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
