//! Shrinking the colour universe of a bad list assignment below `|V|`.
//!
//! While the universe has at least `|V|` colours, take the colour–vertex
//! incidence graph `H`. A bad assignment has no vertex-saturating matching,
//! so some colour set `B` is not matchable; pick a minimum one. A matching
//! `M` of size `|B| - 1` covers all of `B` but one colour, and its vertex
//! endpoints `W` are exactly the vertices whose lists meet `B`. Replacing
//! every list in `W` by the list of a vertex `x` outside `W` removes `B`
//! from the universe and keeps the assignment bad: a colouring of the new
//! instance colours `G - W` from the old lists without touching `B`, and
//! `M` then colours `W` with colours used nowhere else.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::graph::Graph;
use crate::lists::{Color, ListAssignment};
use crate::matching::{max_matching, minimal_deficient_set, sdr_coloring, BipartiteIncidence, DEFAULT_DEFICIENT_CAP};
use crate::solver::{find_acceptable_coloring_with, SolverOptions};

/// One rewrite of the universe.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompressionStep {
    /// Minimum unmatchable colour set `B`.
    pub deficient_colors: Vec<Color>,
    /// `(colour, vertex)` pairs of a matching of size `|B| - 1` inside `B`.
    pub matching: Vec<(Color, usize)>,
    /// Vertex endpoints of the matching, sorted.
    pub replaced: Vec<usize>,
    /// Vertex outside `replaced` whose list is copied.
    pub donor: usize,
    pub universe_before: usize,
    pub universe_after: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BadnessCheck {
    /// Exact solver confirmed no acceptable colouring before and after.
    Exhaustive,
    /// Instance beyond solver budget; only the step invariants were checked.
    Unverified,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompressionTrace {
    pub vertex_count: usize,
    pub initial_lists: Vec<Vec<Color>>,
    pub final_lists: Vec<Vec<Color>>,
    pub initial_universe: usize,
    pub final_universe: usize,
    pub steps: Vec<CompressionStep>,
    pub badness: BadnessCheck,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompressionOptions {
    pub solver: SolverOptions,
    pub deficient_cap: usize,
}

impl Default for CompressionOptions {
    fn default() -> Self {
        CompressionOptions {
            solver: SolverOptions::default(),
            deficient_cap: DEFAULT_DEFICIENT_CAP,
        }
    }
}

/// Colour-side incidence: colour index (into `universe`) -> vertices.
fn color_incidence(lists: &ListAssignment) -> BipartiteIncidence {
    let universe = lists.universe();
    let mut adjacency = vec![Vec::new(); universe.len()];
    for v in 0..lists.vertex_count() {
        for c in lists.list(v) {
            adjacency[universe.binary_search(c).unwrap()].push(v);
        }
    }
    BipartiteIncidence::new(lists.vertex_count(), adjacency).expect("vertex ids in range")
}

/// One rewrite step, or `None` when the lists admit distinct
/// representatives (so the instance is colourable).
pub fn deficiency_step(g: &Graph, lists: &ListAssignment) -> Result<Option<CompressionStep>> {
    deficiency_step_with(g, lists, DEFAULT_DEFICIENT_CAP)
}

fn deficiency_step_with(g: &Graph, lists: &ListAssignment, cap: usize) -> Result<Option<CompressionStep>> {
    let n = g.vertex_count();
    if lists.vertex_count() != n {
        return Err(LabError::invalid("list assignment and graph sizes differ"));
    }
    let universe = lists.universe().to_vec();
    if universe.len() < n {
        return Err(LabError::Precondition(vec![format!(
            "universe has {} colours, fewer than the {n} vertices",
            universe.len()
        )]));
    }
    let vertices: Vec<usize> = (0..n).collect();
    if sdr_coloring(&vertices, |v| lists.list(v)).colors.is_some() {
        return Ok(None);
    }
    let h = color_incidence(lists);
    let dump = || format!("lists = {:?}", lists.lists());
    let b = minimal_deficient_set(&h, cap)?.ok_or_else(|| LabError::InternalInconsistency {
        message: "no vertex-saturating matching, yet every colour set is matchable".into(),
        state: dump(),
    })?;
    let restricted = h.restrict_left(&b);
    let m = max_matching(&restricted);
    if m.size() + 1 != b.len() {
        return Err(LabError::InternalInconsistency {
            message: format!(
                "minimum deficient set of size {} has matching number {}",
                b.len(),
                m.size()
            ),
            state: dump(),
        });
    }
    let matching: Vec<(Color, usize)> = m.pairs.iter().map(|&(i, v)| (universe[b[i]], v)).collect();
    let mut replaced: Vec<usize> = matching.iter().map(|&(_, v)| v).collect();
    replaced.sort_unstable();
    let deficient_colors: Vec<Color> = b.iter().map(|&i| universe[i]).collect();
    for v in 0..n {
        if replaced.binary_search(&v).is_err() && lists.list(v).iter().any(|c| deficient_colors.contains(c)) {
            return Err(LabError::InternalInconsistency {
                message: format!("vertex {v} outside W meets the deficient colour set"),
                state: dump(),
            });
        }
    }
    let donor = (0..n)
        .find(|v| replaced.binary_search(v).is_err())
        .ok_or_else(|| LabError::InternalInconsistency {
            message: "matching covers every vertex".into(),
            state: dump(),
        })?;
    let after = apply_rewrite(lists, &replaced, donor);
    Ok(Some(CompressionStep {
        deficient_colors,
        matching,
        replaced,
        donor,
        universe_before: universe.len(),
        universe_after: after.universe().len(),
    }))
}

fn apply_rewrite(lists: &ListAssignment, replaced: &[usize], donor: usize) -> ListAssignment {
    let mut next = lists.lists().to_vec();
    for &v in replaced {
        next[v] = lists.list(donor).to_vec();
    }
    ListAssignment::from_sorted(next)
}

/// Rewrites `bad` until its universe has fewer than `|V|` colours.
///
/// Badness is checked with the exact solver before and after when the
/// instance is within budget; otherwise the trace is marked unverified.
pub fn compress_universe(g: &Graph, bad: &ListAssignment) -> Result<(ListAssignment, CompressionTrace)> {
    compress_universe_with(g, bad, &CompressionOptions::default())
}

pub fn compress_universe_with(
    g: &Graph,
    bad: &ListAssignment,
    opts: &CompressionOptions,
) -> Result<(ListAssignment, CompressionTrace)> {
    let n = g.vertex_count();
    if bad.vertex_count() != n {
        return Err(LabError::invalid("list assignment and graph sizes differ"));
    }
    let verifiable = opts.solver.budget.admits(bad);
    if verifiable && find_acceptable_coloring_with(g, bad, &opts.solver)?.is_some() {
        return Err(LabError::invalid(
            "input list assignment admits an acceptable colouring",
        ));
    }
    let mut lists = bad.clone();
    let mut steps = Vec::new();
    while lists.universe().len() >= n {
        let Some(step) = deficiency_step_with(g, &lists, opts.deficient_cap)? else {
            return Err(LabError::invalid(
                "input list assignment admits an acceptable colouring with distinct colours",
            ));
        };
        lists = apply_rewrite(&lists, &step.replaced, step.donor);
        if lists.universe().len() >= step.universe_before {
            return Err(LabError::InternalInconsistency {
                message: "rewrite did not shrink the universe".into(),
                state: format!("{step:?}"),
            });
        }
        steps.push(step);
    }
    let badness = if verifiable && opts.solver.budget.admits(&lists) {
        if find_acceptable_coloring_with(g, &lists, &opts.solver)?.is_some() {
            return Err(LabError::InternalInconsistency {
                message: "compressed assignment became colourable".into(),
                state: format!("{:?}", lists.lists()),
            });
        }
        BadnessCheck::Exhaustive
    } else {
        BadnessCheck::Unverified
    };
    let trace = CompressionTrace {
        vertex_count: n,
        initial_lists: bad.lists().to_vec(),
        final_lists: lists.lists().to_vec(),
        initial_universe: bad.universe().len(),
        final_universe: lists.universe().len(),
        steps,
        badness,
    };
    Ok((lists, trace))
}

/// Re-applies every step of `trace` from its initial lists, checking each
/// step's invariants, and returns the final assignment.
pub fn replay_trace(trace: &CompressionTrace) -> Result<ListAssignment> {
    let fail = |i: usize, msg: String| LabError::InvalidArgument(format!("trace step {i}: {msg}"));
    if trace.initial_lists.len() != trace.vertex_count {
        return Err(LabError::invalid("trace initial lists do not cover every vertex"));
    }
    let mut lists = ListAssignment::new(trace.initial_lists.clone())?;
    if lists.universe().len() != trace.initial_universe {
        return Err(LabError::invalid(
            "trace initial universe size does not match its lists",
        ));
    }
    for (i, step) in trace.steps.iter().enumerate() {
        let before = lists.universe().len();
        if before != step.universe_before {
            return Err(fail(
                i,
                format!("universe is {before}, trace says {}", step.universe_before),
            ));
        }
        if before < trace.vertex_count {
            return Err(fail(i, "step taken although universe already below |V|".into()));
        }
        let b = &step.deficient_colors;
        if b.len() < 2 || step.matching.len() + 1 != b.len() {
            return Err(fail(i, format!("|B| = {} with |M| = {}", b.len(), step.matching.len())));
        }
        let mut colors: Vec<Color> = step.matching.iter().map(|&(c, _)| c).collect();
        let mut verts: Vec<usize> = step.matching.iter().map(|&(_, v)| v).collect();
        colors.sort_unstable();
        colors.dedup();
        verts.sort_unstable();
        verts.dedup();
        if colors.len() != step.matching.len() || verts.len() != step.matching.len() {
            return Err(fail(i, "matching reuses an endpoint".into()));
        }
        if verts != step.replaced {
            return Err(fail(i, "replaced set differs from matching endpoints".into()));
        }
        for &(c, v) in &step.matching {
            if !b.contains(&c) || v >= trace.vertex_count || !lists.contains(v, c) {
                return Err(fail(i, format!("pair ({c}, {v}) is not an edge inside B")));
            }
        }
        for v in 0..trace.vertex_count {
            if step.replaced.binary_search(&v).is_err() && lists.list(v).iter().any(|c| b.contains(c)) {
                return Err(fail(i, format!("vertex {v} outside W has a colour of B")));
            }
        }
        if step.replaced.binary_search(&step.donor).is_ok() || step.donor >= trace.vertex_count {
            return Err(fail(i, format!("donor {} lies in W", step.donor)));
        }
        lists = apply_rewrite(&lists, &step.replaced, step.donor);
        let after = lists.universe().len();
        if after != step.universe_after || after >= before {
            return Err(fail(
                i,
                format!("universe went {before} -> {after}, trace says {}", step.universe_after),
            ));
        }
    }
    if lists.lists() != trace.final_lists.as_slice() || lists.universe().len() != trace.final_universe {
        return Err(LabError::invalid("replayed lists differ from the trace's final lists"));
    }
    if trace.final_universe >= trace.vertex_count {
        return Err(LabError::invalid("final universe is not below the vertex count"));
    }
    Ok(lists)
}
