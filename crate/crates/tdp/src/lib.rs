//! Solvers and metaheuristics for the template design problem (TDP).
//!
//! A TDP instance asks for `t` printing templates with `s` slots each, where
//! every slot carries one of `v` product variations. Pressing template `j`
//! `R_j` times produces, for each variation, the sum of its slot counts times
//! the pressings. The goal is to meet per-variation demands within tolerance
//! bands while minimising total waste (under- plus overproduction).
//!
//! The crate splits the problem into:
//!
//! - [`instance`]: problem instances (three classic built-ins plus a JSON
//!   format) and tolerance-band arithmetic.
//! - [`encoding`]: the two genotype representations (per-variation counts vs.
//!   per-slot assignments), conversions, symmetry-breaking canonical forms and
//!   genotypic distance.
//! - [`pressing`]: the pressing-count subproblem. Given a fixed template
//!   design, finds non-negative integer pressings minimising
//!   (violation, waste) lexicographically. Also hosts the brute-force oracle.
//! - [`algspec`]: the compact algorithm-notation grammar
//!   (`"Ma.Hc.P*.A2.Ux"`, `"Bc5(Ts.D,Ga.D*.A4.Gd)RD"`, ...).
//! - [`localsearch`]: neighbourhood moves, hill climbing and tabu search.
//! - [`evolution`]: steady-state genetic and memetic engines.
//! - [`cooperative`]: island-style agent teams with ring/broadcast/random
//!   exchange topologies and migration/acceptance policies.
//! - [`harness`]: experiment orchestration, CSV/JSON result persistence,
//!   ranking and the nonparametric test battery (Friedman, Iman-Davenport,
//!   Holm, rank-sum).
//!
//! Runs are deterministic given a seed; independent runs can execute in
//! parallel. See the `examples/` directory for one runnable program per
//! capability and the `tdp` binary for the command-line front end.

pub mod algspec;
pub mod bestknown;
pub mod cooperative;
pub mod encoding;
pub mod error;
pub mod evolution;
pub mod harness;
pub mod instance;
pub mod localsearch;
pub mod pressing;

pub use error::{Error, Result};
pub use instance::ProblemInstance;
