use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::lists::Color;
use crate::pipeline::{plan_split, BicliqueSystem, MultipartiteInstance, RandomizedEngine, SplitPlan};

/// Number of standard errors within which an estimate must land.
pub const TOLERANCE_SE: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailSummary {
    pub color: Color,
    pub threshold: f64,
    pub exceedances: usize,
    pub frequency: f64,
    /// 95% Wilson score interval.
    pub wilson_low: f64,
    pub wilson_high: f64,
}

/// Per-trial values and their summary. The summary fields are always
/// recomputable from `values`; see [`ExperimentReport::is_consistent`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub trials: usize,
    pub seed: u64,
    pub values: Vec<f64>,
    pub mean: f64,
    pub standard_error: f64,
    pub target: Option<f64>,
    pub tolerance_se: f64,
    pub within_tolerance: Option<bool>,
    pub tail: Option<TailSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u128>,
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// 95% Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let n = n as f64;
    let p = k as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * ((p * (1.0 - p) + z * z / (4.0 * n)) / n).sqrt() / denom;
    let lo = if k == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if k as f64 == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

impl ExperimentReport {
    fn build(experiment: &str, seed: u64, values: Vec<f64>, target: Option<f64>) -> Self {
        let (mean, standard_error) = mean_and_se(&values);
        let within_tolerance = target.map(|t| (mean - t).abs() <= TOLERANCE_SE * standard_error);
        ExperimentReport {
            experiment: experiment.to_string(),
            trials: values.len(),
            seed,
            values,
            mean,
            standard_error,
            target,
            tolerance_se: TOLERANCE_SE,
            within_tolerance,
            tail: None,
            runtime_ms: None,
        }
    }

    /// Recomputes every summary field from `values` and compares exactly.
    pub fn is_consistent(&self) -> bool {
        let (mean, se) = mean_and_se(&self.values);
        let verdict = self.target.map(|t| (mean - t).abs() <= self.tolerance_se * se);
        let tail_ok = self.tail.as_ref().is_none_or(|t| {
            let k = self.values.iter().filter(|&&x| x > t.threshold).count();
            let (lo, hi) = wilson_interval(k, self.values.len());
            k == t.exceedances
                && t.frequency == k as f64 / self.values.len() as f64
                && lo == t.wilson_low
                && hi == t.wilson_high
        });
        self.trials == self.values.len()
            && mean.to_bits() == self.mean.to_bits()
            && se.to_bits() == self.standard_error.to_bits()
            && verdict == self.within_tolerance
            && tail_ok
    }

    pub fn without_timing(&self) -> Self {
        ExperimentReport {
            runtime_ms: None,
            ..self.clone()
        }
    }
}

fn trial_values(
    engine: &RandomizedEngine,
    trials: usize,
    seed: u64,
    f: impl Fn(&crate::pipeline::RoundSample) -> f64 + Sync,
) -> Vec<f64> {
    (0..trials)
        .into_par_iter()
        .map(|i| f(&engine.sample_round(seed, i)))
        .collect()
}

/// Mean of `W(V')` over independent single-process rounds against the
/// closed form `(n - S) / C`.
pub fn montecarlo_expected_weight(
    inst: &MultipartiteInstance,
    system: &BicliqueSystem,
    trials: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    if trials == 0 {
        return Err(LabError::invalid("trials must be positive"));
    }
    let clock = Instant::now();
    let plan = SplitPlan::single_process(inst, system);
    let engine = RandomizedEngine::new(inst, system, &plan, 0.5).map_err(structure_error)?;
    let values = trial_values(&engine, trials, seed, |s| engine.total_weight(s));
    let mut report = ExperimentReport::build("expected_weight", seed, values, Some(engine.expected_total()));
    report.runtime_ms = Some(clock.elapsed().as_millis());
    Ok(report)
}

fn structure_error(e: LabError) -> LabError {
    match e {
        LabError::Precondition(v) => LabError::invalid(format!("instance lacks the block structure: {}", v.join("; "))),
        other => other,
    }
}

/// Threshold for the tail experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Threshold {
    Absolute(f64),
    /// Empirical mean of the same trials plus the offset.
    MeanPlus(f64),
}

/// Frequency with which `W(V'' ∩ {v : c ∈ L'(v), |L'(v)| >= n / ln n})`
/// exceeds the threshold, with `V''` the uncoloured vertices outside the
/// big parts of the split chosen for `delta`. Measured only; no bound is
/// asserted.
pub fn montecarlo_color_tail(
    inst: &MultipartiteInstance,
    system: &BicliqueSystem,
    color: Color,
    threshold: Threshold,
    trials: usize,
    seed: u64,
    delta: f64,
) -> Result<ExperimentReport> {
    if trials == 0 {
        return Err(LabError::invalid("trials must be positive"));
    }
    let clock = Instant::now();
    let plan = plan_split(inst, system, delta);
    let engine = RandomizedEngine::new(inst, system, &plan, delta).map_err(structure_error)?;
    let values = trial_values(&engine, trials, seed, |s| engine.tail_statistic(s, color));
    let mut report = ExperimentReport::build("color_tail", seed, values, None);
    let cut = match threshold {
        Threshold::Absolute(x) => x,
        Threshold::MeanPlus(d) => report.mean + d,
    };
    let k = report.values.iter().filter(|&&x| x > cut).count();
    let (lo, hi) = wilson_interval(k, trials);
    report.tail = Some(TailSummary {
        color,
        threshold: cut,
        exceedances: k,
        frequency: k as f64 / trials as f64,
        wilson_low: lo,
        wilson_high: hi,
    });
    report.runtime_ms = Some(clock.elapsed().as_millis());
    Ok(report)
}
