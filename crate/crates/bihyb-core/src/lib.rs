//! Lower-level heuristics and bi-level graph-modification environments for three
//! combinatorial problems: resource-constrained DAG scheduling, graph edit
//! distance, and Hamiltonian cycle search phrased as binary-weight TSP.
//!
//! The upper level edits a working copy of the instance graph (add a precedence
//! edge, toggle an edge, penalize a tour edge); the lower level re-solves the
//! modified instance with a cheap heuristic; the objective of the resulting
//! solution is always evaluated against the untouched original instance. Rewards
//! are differences of consecutive objectives, so their sum telescopes to the
//! total improvement exactly. All objectives are integers (DAG durations are
//! fixed-point microseconds), which keeps that telescoping bit-exact.
//!
//! The crate is `no_std` + `alloc`; parsing, file formats, and the wire protocol
//! live in the companion `bihyb-cli` crate.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod dag;
pub mod env;
pub mod error;
pub mod ged;
pub mod graph;
pub mod hcp;
pub mod policy;
pub mod rng;

pub use error::CoreError;
