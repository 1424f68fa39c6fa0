//! Cyclic permutations, their Markov graphs and GF(2) transition matrices,
//! and exact piecewise-linear covering systems of the line.

pub mod conv;
pub mod f2;
pub mod interval;
pub mod lab;
pub mod perm;
