//! Stable matchings of agents into triples under additively separable
//! preferences.
//!
//! Each agent values every other agent with an integer; an agent's utility
//! for a triple is the sum of its values for the other two members. A
//! matching is stable when no three agents would all strictly gain by
//! forming a triple together.
//!
//! * [`model`]: instances, matchings, utilities and the cubic stability check.
//! * [`solver`]: a stable matching for every binary-symmetric instance in
//!   `O(n^3)`, built on [`triangles`] and [`repair`].
//! * [`welfare_approx`]: a stable matching with at least half the maximum
//!   stable welfare.
//! * [`oracle`]: exhaustive search for small instances, used to cross-check
//!   everything else.
//! * [`hardness`]: the reduction from partition into triangles.
//! * [`io`], [`generate`], [`bench`] and [`cli`]: file formats, seeded
//!   generators, timing harness and command-line front end.
//!
//! ```
//! use stable_triples::{fixtures, model::is_stable, solver::find_stable};
//!
//! let inst = fixtures::path(6);
//! let m = find_stable(&inst, false).unwrap();
//! assert!(is_stable(&inst, &m).unwrap());
//! ```

pub mod bench;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod generate;
pub mod hardness;
pub mod io;
pub mod matching2d;
pub mod model;
pub mod oracle;
pub mod repair;
pub mod solver;
pub mod triangles;
pub mod welfare_approx;

pub use error::{Error, Result};
