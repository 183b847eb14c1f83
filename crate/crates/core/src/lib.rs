//! Solvers for single-machine scheduling with sequence-dependent setup times.
//!
//! A schedule for `1|s_vu|C_max` is a permutation of the job set; its setup
//! cost is the sum of the setup times between consecutive jobs, which makes
//! the problem equivalent to finding a shortest Hamiltonian path in a complete
//! directed graph. This crate provides:
//!
//! * [`instance`] — instances, schedules and a TSPLIB `FULL_MATRIX` parser;
//! * [`recombination`] — an exact optimal-recombination operator that crosses
//!   two parent permutations position-wise, built on the block decomposition
//!   of the position–job bipartite graph and a Gray-code sweep with constant
//!   per-block objective updates;
//! * [`ga`] — a steady-state genetic algorithm whose crossover is the optimal
//!   recombination operator;
//! * [`exact`] — a Held–Karp dynamic program for small instances and an
//!   assignment-based 0/1 programming model (LP-format export plus subtour
//!   cut generation) for large ones.
//!
//! The crate is `no_std`-compatible (requires `alloc`); disable the default
//! `std` feature for embedded or wasm targets. File IO, timing and the
//! experiment harness live in the companion CLI crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]
#![warn(missing_docs)]

extern crate alloc;

pub mod exact;
pub mod ga;
pub mod instance;
pub mod recombination;
mod weight;

pub use weight::Weight;
