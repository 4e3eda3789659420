//! Instance files, generators, Monte Carlo experiments and the
//! small-graph sweep.

mod generate;
mod instance;
mod montecarlo;
mod sweep;

pub use generate::{
    erdos_parts2, k33, lemma3, lemma3_layout, ohba_counterexample, random_multipartite, Lemma3Layout, Lemma3Params,
    RandomMultipartiteParams,
};
pub use instance::{InstanceFile, Metadata, SCHEMA_VERSION};
pub use montecarlo::{
    montecarlo_color_tail, montecarlo_expected_weight, wilson_interval, ExperimentReport, TailSummary, Threshold,
};
pub use sweep::{ohba_sweep, partitions, SweepReport, SweepRow, SweepVerdict};
