//! Exact solver for the stacker crane problem on graphs whose topology has
//! small cycle rank and few branch vertices.
//!
//! The pipeline computes a minimum-cost circulation, enumerates every
//! circulation within L-infinity distance `r` of it through the fundamental
//! cycle basis, and for each candidate builds the cheapest tour in its
//! homology class via a Steiner tree on the contracted support.

pub mod acceptance;
pub mod circulation;
mod dsu;
pub mod enumeration;
pub mod graph;
pub mod homology_tour;
pub mod io;
pub mod oracle;
pub mod solver;
