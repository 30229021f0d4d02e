//! Second cohomology and extensions of the linear cycle sets
//! `H = (Z_{p^eta}, +, ·)` with `i·j = (1 - p^nu i) j`, by trivial finite abelian
//! coefficient groups.
//!
//! Closed-form constructions live in [`cohomology`] and [`classify`]; the
//! double-complex oracle in [`complex`] shares none of that code.

pub mod abgroup;
pub mod actions;
pub mod classify;
pub mod cli;
pub mod cohomology;
pub mod complex;
pub mod cycleset;
pub mod extensions;

use serde::Serialize;

/// One violated instance of an identity, with a human-readable witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: String,
    pub witness: String,
}

impl Violation {
    pub fn new(rule: impl Into<String>, witness: impl Into<String>) -> Self {
        Violation {
            rule: rule.into(),
            witness: witness.into(),
        }
    }
}

/// Violations are data, not errors: an empty report means every check passed.
pub type Report = Vec<Violation>;
