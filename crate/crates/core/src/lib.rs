//! Sparse effective ideal membership: Newton polytopes, toric hypotheses,
//! support bound certificates and exact solutions of the membership identity.

#![allow(clippy::needless_range_loop)]
pub mod lattice;
pub mod poly;
pub mod polytope;
pub mod toric;
pub mod cox;
pub mod ideals;
pub mod solver;
pub mod bounds;
pub mod cli;
