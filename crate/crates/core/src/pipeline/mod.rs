//! Constructive colouring of complete multipartite graphs with lists of
//! size at least the chromatic number.
//!
//! [`solve_via_theorem1`] saturates the input to a complete multipartite
//! graph, strips parts that can be coloured with a shared colour, extracts a
//! biclique system among singleton parts, pre-colours a few singletons and
//! runs the randomized Hall-completion procedure. Any stage that cannot
//! proceed hands the instance to the exact solver when fallback is enabled.

mod biclique;
mod random;
mod reduce;

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use biclique::{check_lemma3, extract_bicliques, ConditionReport, ConditionViolation, Extraction};
pub use random::{
    bracket_b, plan_split, run_randomized_coloring, weight_report, HallFailure, Lemma4Report, RandomizedEngine,
    RetryOutcome, RoundSample, SplitPlan, SplitWeights, WeightDiagnostics,
};
pub use reduce::{choose_w_and_t, remove_common_color_parts, Reduction, Removal, Residual};

use crate::error::{LabError, Result};
use crate::graph::{chromatic_number_exact, saturate, Graph, PartStructure};
use crate::lists::{verify_coloring, Color, Coloring, ListAssignment};
use crate::solver::{find_acceptable_coloring_with, SolverOptions};

/// A complete multipartite graph together with its parts and lists.
#[derive(Debug, Clone)]
pub struct MultipartiteInstance {
    parts: PartStructure,
    lists: ListAssignment,
    graph: Graph,
}

impl MultipartiteInstance {
    pub fn new(parts: PartStructure, lists: ListAssignment) -> Result<Self> {
        if parts.vertex_count() != lists.vertex_count() {
            return Err(LabError::invalid(format!(
                "{} vertices in parts but {} lists",
                parts.vertex_count(),
                lists.vertex_count()
            )));
        }
        Ok(Self::from_parts_unchecked(parts, lists))
    }

    /// Parts of the given sizes numbered consecutively.
    pub fn complete(part_sizes: &[usize], lists: ListAssignment) -> Result<Self> {
        let (_, parts) = crate::graph::complete_multipartite(part_sizes)?;
        Self::new(parts, lists)
    }

    pub(crate) fn from_parts_unchecked(parts: PartStructure, lists: ListAssignment) -> Self {
        let graph = parts.to_graph();
        MultipartiteInstance { parts, lists, graph }
    }

    pub fn parts(&self) -> &PartStructure {
        &self.parts
    }

    pub fn lists(&self) -> &ListAssignment {
        &self.lists
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn vertex_count(&self) -> usize {
        self.parts.vertex_count()
    }

    pub fn part_count(&self) -> usize {
        self.parts.part_count()
    }
}

/// Disjoint pairs of singleton blocks `S_i` (size `t`) and colour blocks
/// `C_i` (size `m`) with every colour of `C_i` in every list of `S_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BicliqueSystem {
    pub m: usize,
    pub t: usize,
    pub color_blocks: Vec<Vec<Color>>,
    pub singleton_blocks: Vec<Vec<usize>>,
}

impl BicliqueSystem {
    pub fn k(&self) -> usize {
        self.color_blocks.len()
    }

    /// `C = km`.
    pub fn color_count(&self) -> usize {
        self.k() * self.m
    }

    /// `S = kt`.
    pub fn singleton_count(&self) -> usize {
        self.k() * self.t
    }

    pub fn colors(&self) -> impl Iterator<Item = Color> + '_ {
        self.color_blocks.iter().flatten().copied()
    }

    pub fn singletons(&self) -> impl Iterator<Item = usize> + '_ {
        self.singleton_blocks.iter().flatten().copied()
    }

    /// Structural violations against `inst`; empty when the system is valid.
    pub fn violations(&self, inst: &MultipartiteInstance) -> Vec<String> {
        self.numbered_violations(inst).into_iter().map(|(_, s)| s).collect()
    }

    /// Violations tagged 2 (singleton side) or 4 (colour side).
    pub(crate) fn numbered_violations(&self, inst: &MultipartiteInstance) -> Vec<(u8, String)> {
        let mut out = Vec::new();
        if self.singleton_blocks.len() != self.color_blocks.len() {
            out.push((
                2,
                format!(
                    "{} colour blocks but {} singleton blocks",
                    self.color_blocks.len(),
                    self.singleton_blocks.len()
                ),
            ));
        }
        if !(2 * self.t > self.m && self.t + 2 <= self.m) {
            out.push((2, format!("t = {} outside (m/2, m-2] for m = {}", self.t, self.m)));
        }
        for (i, b) in self.color_blocks.iter().enumerate() {
            if b.len() != self.m {
                out.push((
                    4,
                    format!("colour block {i} has {} colours, expected {}", b.len(), self.m),
                ));
            }
        }
        for (i, b) in self.singleton_blocks.iter().enumerate() {
            if b.len() != self.t {
                out.push((
                    2,
                    format!("singleton block {i} has {} vertices, expected {}", b.len(), self.t),
                ));
            }
        }
        let mut colors: Vec<Color> = self.colors().collect();
        colors.sort_unstable();
        if colors.windows(2).any(|w| w[0] == w[1]) {
            out.push((4, "colour blocks are not disjoint".into()));
        }
        let mut verts: Vec<usize> = self.singletons().collect();
        verts.sort_unstable();
        if verts.windows(2).any(|w| w[0] == w[1]) {
            out.push((2, "singleton blocks are not disjoint".into()));
        }
        for &v in &verts {
            if v >= inst.vertex_count() {
                out.push((2, format!("vertex {v} out of range")));
            } else if inst.parts().parts()[inst.parts().part_of(v)].len() != 1 {
                out.push((2, format!("vertex {v} is not a singleton part")));
            }
        }
        for (i, (cb, sb)) in self.color_blocks.iter().zip(&self.singleton_blocks).enumerate() {
            for &s in sb.iter().filter(|&&s| s < inst.vertex_count()) {
                if let Some(c) = cb.iter().find(|&&c| !inst.lists().contains(s, c)) {
                    out.push((
                        4,
                        format!("colour {c} of block {i} missing from the list of vertex {s}"),
                    ));
                }
            }
        }
        out
    }
}

/// Parameters of the constructive pipeline. `delta` is always
/// `epsilon / 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub epsilon: f64,
    pub m: usize,
    pub retry_limit: usize,
    pub seed: u64,
    pub solver_fallback: bool,
    pub chromatic_budget: usize,
    pub parallel: bool,
    #[serde(skip)]
    pub solver: SolverOptions,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            epsilon: 0.5,
            m: 10,
            retry_limit: 1000,
            seed: 0,
            solver_fallback: true,
            chromatic_budget: crate::graph::DEFAULT_CHROMATIC_BUDGET,
            parallel: true,
            solver: SolverOptions::default(),
        }
    }
}

impl PipelineConfig {
    pub fn delta(&self) -> f64 {
        self.epsilon / 2.0
    }

    /// Rejects unusable values and returns warnings for hypotheses that
    /// only matter asymptotically.
    pub fn validate(&self) -> Result<Vec<String>> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(LabError::invalid(format!(
                "epsilon = {} must lie in (0, 1)",
                self.epsilon
            )));
        }
        if self.m < 5 {
            return Err(LabError::invalid(format!("m = {} leaves no t in (m/2, m-2]", self.m)));
        }
        if self.retry_limit == 0 {
            return Err(LabError::invalid("retry_limit must be positive"));
        }
        let mut warnings = Vec::new();
        if (self.m as f64) <= 6.0 / self.delta() {
            warnings.push(format!(
                "m = {} does not exceed 6/delta = {:.3}; proceeding outside the asymptotic hypothesis",
                self.m,
                6.0 / self.delta()
            ));
        }
        Ok(warnings)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolvePath {
    /// Every part was removed with a shared colour.
    Reduction,
    Randomized,
    ExactFallback,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub micros: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FallbackRecord {
    pub stage: String,
    pub reason: String,
}

/// How the complete multipartite supergraph was obtained.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaturationInfo {
    /// `true` when the input already was complete multipartite.
    pub detected: bool,
    pub chromatic_number: usize,
    /// Class per vertex of the optimal colouring that was saturated.
    pub classes: Vec<usize>,
}

/// Derived parameters, filled in as far as the run got.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PipelineParameters {
    pub n: usize,
    pub chi: usize,
    pub reduced_n: Option<usize>,
    pub reduced_chi: Option<usize>,
    pub singletons: Option<usize>,
    pub m: usize,
    pub t: Option<usize>,
    pub k: Option<usize>,
    pub r: Option<usize>,
    pub residual_n: Option<usize>,
    pub b: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineReport {
    pub path: SolvePath,
    pub coloring: Coloring,
    pub parameters: PipelineParameters,
    pub saturation: Option<SaturationInfo>,
    pub removals: Vec<Removal>,
    pub system: Option<BicliqueSystem>,
    pub split: Option<SplitPlan>,
    pub rounds: usize,
    pub hall_failures: Vec<HallFailure>,
    pub fallback: Option<FallbackRecord>,
    pub warnings: Vec<String>,
    pub diagnostics: Option<WeightDiagnostics>,
    pub timings: Vec<StageTiming>,
}

impl PipelineReport {
    /// The report minus wall-clock data, for reproducibility comparisons.
    pub fn without_timings(&self) -> PipelineReport {
        PipelineReport {
            timings: Vec::new(),
            ..self.clone()
        }
    }
}

struct Run {
    report: PipelineReport,
    clock: Instant,
}

impl Run {
    fn lap(&mut self, stage: &str) {
        let now = Instant::now();
        self.report.timings.push(StageTiming {
            stage: stage.to_string(),
            micros: now.duration_since(self.clock).as_micros(),
        });
        self.clock = now;
    }
}

enum Flow {
    Done(Vec<Color>, SolvePath),
    Fallback(FallbackRecord),
}

fn fallback(stage: &str, reason: impl Into<String>) -> Flow {
    Flow::Fallback(FallbackRecord {
        stage: stage.into(),
        reason: reason.into(),
    })
}

/// Colours `graph` from `lists` through the constructive pipeline, falling
/// back to exact search when a stage cannot proceed. The returned colouring
/// is always verified against the input.
pub fn solve_via_theorem1(graph: &Graph, lists: &ListAssignment, config: &PipelineConfig) -> Result<PipelineReport> {
    if graph.vertex_count() != lists.vertex_count() {
        return Err(LabError::invalid(format!(
            "list assignment covers {} vertices, graph has {}",
            lists.vertex_count(),
            graph.vertex_count()
        )));
    }
    let warnings = config.validate()?;
    let mut run = Run {
        report: PipelineReport {
            path: SolvePath::ExactFallback,
            coloring: Coloring(Vec::new()),
            parameters: PipelineParameters {
                n: graph.vertex_count(),
                m: config.m,
                ..Default::default()
            },
            saturation: None,
            removals: Vec::new(),
            system: None,
            split: None,
            rounds: 0,
            hall_failures: Vec::new(),
            fallback: None,
            warnings,
            diagnostics: None,
            timings: Vec::new(),
        },
        clock: Instant::now(),
    };
    let flow = constructive(graph, lists, config, &mut run)?;
    let colors = match flow {
        Flow::Done(colors, path) => {
            run.report.path = path;
            colors
        }
        Flow::Fallback(record) => {
            if !config.solver_fallback {
                return Err(LabError::StageFailed {
                    stage: record.stage,
                    reason: record.reason,
                });
            }
            run.report.fallback = Some(record);
            run.report.path = SolvePath::ExactFallback;
            let found = find_acceptable_coloring_with(graph, lists, &config.solver)?;
            run.lap("exact-fallback");
            match found {
                Some(c) => c.0,
                None => {
                    let state = serde_json::json!({
                        "vertex_count": graph.vertex_count(),
                        "edges": graph.edges(),
                        "lists": lists.lists(),
                        "report": &run.report,
                    });
                    return Err(LabError::CounterexampleCandidate {
                        state: state.to_string(),
                    });
                }
            }
        }
    };
    let coloring = Coloring(colors);
    let verdict = verify_coloring(graph, lists, &coloring)?;
    if !verdict.is_acceptable() {
        return Err(LabError::InternalInconsistency {
            message: format!("pipeline produced an unacceptable colouring: {verdict:?}"),
            state: serde_json::to_string(&run.report)?,
        });
    }
    run.lap("verify");
    run.report.coloring = coloring;
    Ok(run.report)
}

fn constructive(graph: &Graph, lists: &ListAssignment, config: &PipelineConfig, run: &mut Run) -> Result<Flow> {
    let n = graph.vertex_count();
    let (parts, info) = match graph.multipartite_parts() {
        Some(parts) => {
            let classes = (0..n).map(|v| parts.part_of(v)).collect();
            let chi = parts.part_count();
            (
                parts,
                SaturationInfo {
                    detected: true,
                    chromatic_number: chi,
                    classes,
                },
            )
        }
        None => {
            let (chi, coloring) = match chromatic_number_exact(graph, config.chromatic_budget) {
                Ok(x) => x,
                Err(e @ LabError::ResourceLimit { .. }) => return Ok(fallback("saturate", e.to_string())),
                Err(e) => return Err(e),
            };
            let (_, parts) = saturate(graph, &coloring)?;
            (
                parts,
                SaturationInfo {
                    detected: false,
                    chromatic_number: chi,
                    classes: coloring.classes().to_vec(),
                },
            )
        }
    };
    let chi = info.chromatic_number;
    run.report.parameters.chi = chi;
    run.report.saturation = Some(info);
    run.lap("saturate");

    if lists.min_list_len() < chi {
        return Ok(fallback(
            "hypothesis",
            format!(
                "shortest list has {} colours, chromatic number is {chi}",
                lists.min_list_len()
            ),
        ));
    }
    if n as f64 > (2.0 - config.epsilon) * chi as f64 {
        return Ok(fallback(
            "hypothesis",
            format!(
                "n = {n} exceeds (2 - epsilon) chi = {:.3}",
                (2.0 - config.epsilon) * chi as f64
            ),
        ));
    }

    let inst = MultipartiteInstance::new(parts, lists.clone())?;
    let (reduction, removals) = remove_common_color_parts(&inst);
    run.report.removals = removals.clone();
    run.lap("remove-common-colour-parts");
    let Some(reduction) = reduction else {
        let mut colors = vec![0; n];
        for r in &removals {
            for &v in &r.part {
                colors[v] = r.color;
            }
        }
        return Ok(Flow::Done(colors, SolvePath::Reduction));
    };
    let reduced = &reduction.reduced;
    let chi_r = reduced.part_count();
    let singles = reduced.parts().singletons();
    {
        let p = &mut run.report.parameters;
        p.reduced_n = Some(reduced.vertex_count());
        p.reduced_chi = Some(chi_r);
        p.singletons = Some(singles.len());
    }
    if reduced.lists().min_list_len() == 0 {
        return Ok(fallback("remove-common-colour-parts", "a reduced list became empty"));
    }

    let m = config.m;
    let Some(t) = (m * singles.len() / chi_r).checked_sub(1) else {
        return Ok(fallback("parameters", "no singleton parts after reduction"));
    };
    run.report.parameters.t = Some(t);
    if !(2 * t > m && t + 2 <= m) {
        return Ok(fallback(
            "parameters",
            format!(
                "t = {t} from {} singletons among {chi_r} parts lies outside (m/2, m-2] for m = {m}",
                singles.len()
            ),
        ));
    }

    let extraction = extract_bicliques(reduced, m, t);
    run.report.parameters.k = Some(extraction.system.k());
    run.lap("extract-bicliques");
    if extraction.system.k() == 0 {
        return Ok(fallback("extract-bicliques", "no biclique found"));
    }

    let residual = match choose_w_and_t(reduced, &extraction.system) {
        Ok(r) => r,
        Err(LabError::Precondition(v)) => return Ok(fallback("choose-w-and-t", v.join("; "))),
        Err(e) => return Err(e),
    };
    run.report.parameters.r = Some(residual.w.len());
    run.report.parameters.residual_n = Some(residual.instance.vertex_count());
    run.report.system = Some(residual.system.clone());
    run.lap("choose-w-and-t");

    let delta = config.delta();
    let plan = plan_split(&residual.instance, &residual.system, delta);
    run.report.parameters.b = Some(plan.b);
    if let Some(reason) = &plan.degenerate {
        run.report
            .warnings
            .push(format!("split plan degenerate (b = 0): {reason}"));
    }
    run.report.split = Some(plan.clone());
    run.lap("plan-split");

    let conditions = check_lemma3(&residual.instance, &residual.system, delta);
    for v in conditions.violations.iter().filter(|v| !v.is_hard()) {
        run.report
            .warnings
            .push(format!("condition {}: {}", v.condition, v.detail));
    }
    run.report.warnings.extend(conditions.hypotheses.iter().cloned());
    let outcome = match run_randomized_coloring(&residual.instance, &residual.system, &plan, config) {
        Ok(o) => o,
        Err(LabError::Precondition(v)) => return Ok(fallback("randomized-colouring", v.join("; "))),
        Err(e) => return Err(e),
    };
    run.report.rounds = outcome.rounds;
    run.report.hall_failures = outcome.hall_failures;
    run.report.diagnostics = Some(outcome.diagnostics);
    run.lap("randomized-colouring");
    let Some(colors) = outcome.coloring else {
        return Ok(fallback(
            "randomized-colouring",
            format!("no round out of {} completed", config.retry_limit),
        ));
    };
    let reduced_colors = residual.extend(&colors, reduced.vertex_count());
    let full = reduction.extend(&reduced_colors);
    run.lap("extend");
    Ok(Flow::Done(full, SolvePath::Randomized))
}
