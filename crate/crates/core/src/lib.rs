//! Word calculus, moment formulas and L_p norm certification for spin
//! algebras with mixed commutation relations and for free group algebras.
//!
//! Modules:
//! - [`spin`]: generators, sign functions, normal ordering, trace, OU semigroup
//! - [`partition`]: pair partitions, crossings, weighted limit moments
//! - [`gns`]: left-regular matrices, spectral and quadrature L_p norms
//! - [`group`]: reduced words in `𝔽_n` and `𝔾_n`, Poisson semigroup, `Φ`, `Λ`, `π`
//! - [`clt`]: Monte Carlo random-sign experiments
//! - [`hyperbench`]: inequality checks and suites
//! - [`cli`]: command-line driver

pub mod cli;
pub mod clt;
pub mod gns;
pub mod group;
pub mod hyperbench;
pub mod partition;
pub mod report;
pub mod scalar;
pub mod spin;
pub mod suites;
