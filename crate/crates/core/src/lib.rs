//! Exact-arithmetic engine for local generalized Donaldson-Thomas invariants
//! of one-cycles on nodal rational curve configurations.
//!
//! Invariants of a class γ with Euler characteristic n are computed by
//! unwinding the configuration's dual graph through cyclic covers until only
//! trees remain, where closed-form base values apply, then reassembling via
//! the multiple cover formula. The crate also verifies the generating-series
//! identities relating these invariants to parabolic stable pair counts, and
//! evaluates the analogous Hilbert-scheme formulas on K3 surfaces.

pub mod certificate;
pub mod config;
pub mod cover;
pub mod error;
pub mod graph;
pub mod invariants;
pub mod k3;
pub mod parabolic;
pub mod rational;
pub mod series;
