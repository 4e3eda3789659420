//! List-colouring laboratory.
//!
//! * [`graph`]: graphs, part structures, complete multipartite graphs,
//!   exact chromatic number and saturation.
//! * [`matching`]: Hopcroft–Karp matching, Hall witnesses, distinct
//!   representatives.
//! * [`lists`], [`solver`], [`choose`]: list assignments, exact
//!   acceptable-colouring search and exact choosability.
//! * [`compress`]: shrinking the colour universe of a bad assignment.
//! * [`pipeline`]: reductions, biclique extraction and the randomized
//!   Hall-completion colouring with weight diagnostics.
//! * [`lab`]: instance files, generators, Monte Carlo experiments and the
//!   small-graph sweep.

pub mod choose;
pub mod compress;
pub mod error;
pub mod graph;
pub mod lab;
pub mod lists;
pub mod matching;
pub mod pipeline;
pub mod solver;

pub use error::{LabError, Result};
