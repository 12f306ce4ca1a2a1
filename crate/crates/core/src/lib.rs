//! Growth-function calculus for CKS-spaces in white noise analysis.
//!
//! A positive growth function `u` on `[0, ∞)` determines, through its
//! Legendre transform `ℓ_u(t) = inf_{r>0} u(r)/r^t`, a weight sequence
//! `α(n) = 1/(ℓ_u(n) n!)`. This crate evaluates the transforms, the
//! generating functions built from them, and checks the sequence conditions
//! (A1) through (C3) on finite prefixes, producing witnesses and estimated
//! constants rather than proofs.
//!
//! Module map:
//!
//! - [`numerics`]: log-domain values, series summation, scalar search
//! - [`growth`]: growth-function catalog, expression parser, class checks
//! - [`legendre`]: Legendre and dual Legendre transforms, L- and L#-functions
//! - [`sequences`]: weight sequences, Bell numbers, generating functions
//! - [`conditions`]: the condition engine and full reports
//! - [`equivalence`]: function equivalence certificates and example checks
//! - [`cli`] and [`report`]: command-line front end and JSON/CSV emission

pub mod cli;
pub mod conditions;
pub mod equivalence;
pub mod growth;
pub mod legendre;
pub mod numerics;
pub mod report;
pub mod sequences;
mod verdict;

pub use conditions::{check_condition, full_report, ConditionId, ConditionReport, Subject};
pub use equivalence::{find_equivalence, growth_bound, verify_examples, verify_thm27, EquivalenceCertificate};
pub use growth::{check_class, check_u_conditions, parse_growth, ClassEvidence, ClassTag, GridSpec, GrowthFunction};
pub use legendre::{
    dual_legendre_at, l_function_at, l_sharp_at, legendre_at, legendre_table, reconstruct_at, LegendreTable,
};
pub use numerics::{logsumexp_series, optimize_scalar, LogValue, Mode, OptimResult, SeriesResult};
pub use sequences::{alpha_from_growth, bell_numbers, egf_eval, log_shape, sequences_equivalent, AlphaSequence};
pub use verdict::{Status, Verdict};
