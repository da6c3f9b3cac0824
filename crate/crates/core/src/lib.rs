//! Certified lower and upper bounds for porous exponential domination on
//! torus graphs C_m x C_n.
//!
//! A vertex u assigns weight (1/2)^(dist(u,v)-1) to every vertex v; a set
//! dominates when every vertex collects at least 1. This crate verifies
//! candidate sets exactly, finds exact minima on small tori by brute force,
//! builds the diagonal-tiling construction behind the 1/13 density upper
//! bound, and certifies density lower bounds by assembling and solving a
//! window linear program with an embedded exact simplex and branch-and-bound
//! engine.

pub mod bounds;
pub mod cli;
pub mod domination;
pub mod dyadic;
pub mod lpmodel;
pub mod solver;
pub mod torus;

pub use dyadic::DyadicRational;
pub use torus::{TorusDims, Vertex};
