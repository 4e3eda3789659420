//! Exact choosability and randomized search for bad list assignments.
//!
//! [`is_choosable`] enumerates every assignment of `k`-lists drawn from a
//! universe of `n - 1` colours. Any bad assignment can be rewritten into one
//! over fewer than `n` colours (see [`crate::compress`]), and shrinking
//! lists only makes colouring harder, so this decides `k`-choosability.
//!
//! Assignments are enumerated up to symmetry. Reading lists in a fixed
//! vertex order as sorted sequences, the lexicographically least member of
//! each orbit under colour permutations and twin/part swaps satisfies:
//!
//! * colours first appear in increasing order, and the colours new at a
//!   vertex are the next unused labels;
//! * lists of interchangeable vertices (false or true twins) are
//!   nondecreasing along the order;
//! * for complete multipartite inputs, blocks of equal-size parts are
//!   nondecreasing.
//!
//! Each condition follows from one transposition not decreasing the least
//! member, so all three can be imposed together.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::graph::{chromatic_number_exact, Graph, DEFAULT_CHROMATIC_BUDGET};
use crate::lists::{Color, ListAssignment};
use crate::solver::{adjacency_masks, colorable_small, find_acceptable_coloring_with, SolverOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChoosabilityOptions {
    /// Cap on complete assignments checked.
    pub max_assignments: u64,
    pub canonical_colors: bool,
    pub vertex_symmetry: bool,
    pub parallel: bool,
    pub chromatic_budget: usize,
}

impl Default for ChoosabilityOptions {
    fn default() -> Self {
        ChoosabilityOptions {
            max_assignments: 500_000_000,
            canonical_colors: true,
            vertex_symmetry: true,
            parallel: true,
            chromatic_budget: DEFAULT_CHROMATIC_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Choosability {
    pub choosable: bool,
    /// A bad `k`-list assignment when not choosable.
    pub witness: Option<ListAssignment>,
    pub assignments_checked: u64,
    pub universe_size: usize,
}

/// Decides whether every `k`-list assignment of `g` has an acceptable
/// colouring.
pub fn is_choosable(g: &Graph, k: usize, opts: &ChoosabilityOptions) -> Result<Choosability> {
    let n = g.vertex_count();
    if k == 0 {
        return Err(LabError::invalid("list size must be positive"));
    }
    let universe = n - 1;
    if k > universe {
        // lists of size n always admit distinct representatives
        return Ok(Choosability {
            choosable: true,
            witness: None,
            assignments_checked: 0,
            universe_size: universe,
        });
    }
    if n > 64 {
        return Err(LabError::limit("choosability vertex count", 64, n as u64));
    }
    let plan = Enumeration::new(g, k, universe, opts);
    plan.run(opts)
}

struct Enumeration {
    k: usize,
    universe: usize,
    /// position -> vertex
    order: Vec<usize>,
    /// adjacency over positions
    adj: Vec<u64>,
    /// previous position in the same twin class
    twin_prev: Vec<Option<usize>>,
    /// for positions inside a part block: (offset of the matching position
    /// in the previous equal-size block, whether this is the block start)
    block_prev: Vec<Option<(usize, bool)>>,
    canonical: bool,
}

impl Enumeration {
    fn new(g: &Graph, k: usize, universe: usize, opts: &ChoosabilityOptions) -> Self {
        let n = g.vertex_count();
        let parts = g.multipartite_parts().filter(|_| opts.vertex_symmetry);
        let mut twin_prev = vec![None; n];
        let mut block_prev = vec![None; n];
        let order: Vec<usize> = match &parts {
            Some(ps) => {
                let mut idx: Vec<usize> = (0..ps.part_count()).collect();
                idx.sort_by_key(|&i| (ps.parts()[i].len(), i));
                let mut order = Vec::with_capacity(n);
                let mut prev_block: Option<(usize, usize)> = None;
                for &i in &idx {
                    let part = &ps.parts()[i];
                    let start = order.len();
                    if let Some((pstart, plen)) = prev_block {
                        if plen == part.len() {
                            for j in 0..part.len() {
                                block_prev[start + j] = Some((pstart + j, j == 0));
                            }
                        }
                    }
                    for (j, &v) in part.iter().enumerate() {
                        if j > 0 {
                            twin_prev[start + j] = Some(start + j - 1);
                        }
                        order.push(v);
                    }
                    prev_block = Some((start, part.len()));
                }
                order
            }
            None => {
                let classes = if opts.vertex_symmetry {
                    twin_classes(g)
                } else {
                    (0..n).map(|v| vec![v]).collect()
                };
                let mut order = Vec::with_capacity(n);
                for class in classes {
                    let start = order.len();
                    for (j, &v) in class.iter().enumerate() {
                        if j > 0 {
                            twin_prev[start + j] = Some(start + j - 1);
                        }
                        order.push(v);
                    }
                }
                order
            }
        };
        let mut pos = vec![0; n];
        for (p, &v) in order.iter().enumerate() {
            pos[v] = p;
        }
        let adj = order
            .iter()
            .map(|&v| g.neighbors(v).iter().fold(0u64, |m, &u| m | 1 << pos[u]))
            .collect();
        Enumeration {
            k,
            universe,
            order,
            adj,
            twin_prev,
            block_prev,
            canonical: opts.canonical_colors,
        }
    }

    fn n(&self) -> usize {
        self.order.len()
    }

    /// Candidate lists at a position given `used` colours so far (only
    /// meaningful under canonical enumeration).
    fn candidates(&self, used: usize) -> Vec<u64> {
        let k = self.k;
        let mut out = Vec::new();
        if !self.canonical {
            for_each_subset(self.universe, k, |m| out.push(m));
            return out;
        }
        for fresh in 0..=k {
            let old = k - fresh;
            if old > used || used + fresh > self.universe {
                continue;
            }
            let fresh_mask = ((1u64 << fresh) - 1) << used;
            for_each_subset(used, old, |m| out.push(m | fresh_mask));
        }
        out
    }

    fn admissible(&self, p: usize, list: u64, lists: &[u64], tied: &[bool]) -> Option<bool> {
        if let Some(q) = self.twin_prev[p] {
            if lex_less(list, lists[q]) {
                return None;
            }
        }
        match self.block_prev[p] {
            Some((q, start)) => {
                let still_tied = start || tied[p - 1];
                if still_tied {
                    if lex_less(list, lists[q]) {
                        return None;
                    }
                    Some(list == lists[q])
                } else {
                    Some(false)
                }
            }
            None => Some(false),
        }
    }

    /// Prefixes of length `depth` satisfying all constraints.
    fn prefixes(&self, depth: usize) -> Vec<(Vec<u64>, Vec<bool>, usize)> {
        let mut out = Vec::new();
        let mut lists = vec![0u64; self.n()];
        let mut tied = vec![false; self.n()];
        self.collect_prefixes(0, depth, 0, &mut lists, &mut tied, &mut out);
        out
    }

    fn collect_prefixes(
        &self,
        p: usize,
        depth: usize,
        used: usize,
        lists: &mut [u64],
        tied: &mut [bool],
        out: &mut Vec<(Vec<u64>, Vec<bool>, usize)>,
    ) {
        if p == depth {
            out.push((lists[..p].to_vec(), tied[..p].to_vec(), used));
            return;
        }
        for list in self.candidates(used) {
            let Some(t) = self.admissible(p, list, lists, tied) else {
                continue;
            };
            lists[p] = list;
            tied[p] = t;
            let next_used = used.max(64 - list.leading_zeros() as usize);
            self.collect_prefixes(p + 1, depth, next_used, lists, tied, out);
        }
    }

    fn run(&self, opts: &ChoosabilityOptions) -> Result<Choosability> {
        let n = self.n();
        let depth = n.min(3);
        let prefixes = self.prefixes(depth);
        let checked = AtomicU64::new(0);
        let best = AtomicUsize::new(usize::MAX);
        let over_budget = AtomicBool::new(false);

        let work = |(i, (prefix, tied, used)): (usize, &(Vec<u64>, Vec<bool>, usize))| -> Option<Vec<u64>> {
            if best.load(Ordering::Relaxed) < i || over_budget.load(Ordering::Relaxed) {
                return None;
            }
            let mut lists = vec![0u64; n];
            let mut tie = vec![false; n];
            lists[..prefix.len()].copy_from_slice(prefix);
            tie[..tied.len()].copy_from_slice(tied);
            let mut doms = vec![0u64; n];
            let mut ctx = Walk {
                e: self,
                checked: &checked,
                over_budget: &over_budget,
                best: &best,
                index: i,
                limit: opts.max_assignments,
                doms: &mut doms,
            };
            if ctx.walk(prefix.len(), *used, &mut lists, &mut tie) {
                best.fetch_min(i, Ordering::Relaxed);
                Some(lists)
            } else {
                None
            }
        };

        let found: Vec<(usize, Vec<u64>)> = if opts.parallel {
            prefixes
                .par_iter()
                .enumerate()
                .filter_map(|(i, p)| work((i, p)).map(|l| (i, l)))
                .collect()
        } else {
            let mut out = Vec::new();
            for (i, p) in prefixes.iter().enumerate() {
                if let Some(l) = work((i, p)) {
                    out.push((i, l));
                    break;
                }
            }
            out
        };
        let checked = checked.load(Ordering::Relaxed);
        let witness = found.into_iter().min_by_key(|(i, _)| *i).map(|(_, l)| l);
        if witness.is_none() && over_budget.load(Ordering::Relaxed) {
            return Err(LabError::limit(
                "choosability assignments",
                opts.max_assignments,
                checked,
            ));
        }
        let witness = witness.map(|masks| {
            let mut lists = vec![Vec::new(); n];
            for (p, m) in masks.iter().enumerate() {
                lists[self.order[p]] = mask_colors(*m);
            }
            ListAssignment::new(lists).expect("k-lists are nonempty")
        });
        Ok(Choosability {
            choosable: witness.is_none(),
            witness,
            assignments_checked: checked,
            universe_size: self.universe,
        })
    }
}

struct Walk<'a> {
    e: &'a Enumeration,
    checked: &'a AtomicU64,
    over_budget: &'a AtomicBool,
    best: &'a AtomicUsize,
    index: usize,
    limit: u64,
    doms: &'a mut Vec<u64>,
}

impl Walk<'_> {
    fn walk(&mut self, p: usize, used: usize, lists: &mut [u64], tied: &mut [bool]) -> bool {
        let e = self.e;
        if p == e.n() {
            let seen = self.checked.fetch_add(1, Ordering::Relaxed) + 1;
            if seen > self.limit {
                self.over_budget.store(true, Ordering::Relaxed);
                return false;
            }
            self.doms.copy_from_slice(lists);
            return !colorable_small(&e.adj, self.doms);
        }
        for list in e.candidates(used) {
            if self.over_budget.load(Ordering::Relaxed) || self.best.load(Ordering::Relaxed) < self.index {
                return false;
            }
            let Some(t) = e.admissible(p, list, lists, tied) else {
                continue;
            };
            lists[p] = list;
            tied[p] = t;
            let next_used = used.max(64 - list.leading_zeros() as usize);
            if self.walk(p + 1, next_used, lists, tied) {
                return true;
            }
        }
        false
    }
}

/// `a` precedes `b` as sorted sequences of equal length.
#[inline]
fn lex_less(a: u64, b: u64) -> bool {
    let d = a ^ b;
    d != 0 && a & d & d.wrapping_neg() != 0
}

fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(u64)) {
    if k > n {
        return;
    }
    if k == 0 {
        f(0);
        return;
    }
    // Gosper's hack walks k-subsets of 0..n in increasing numeric order
    let mut m: u64 = (1u64 << k) - 1;
    let limit: u64 = if n == 64 { u64::MAX } else { 1u64 << n };
    while m < limit {
        f(m);
        let c = m & m.wrapping_neg();
        let r = m.wrapping_add(c);
        if r == 0 {
            break;
        }
        m = (((r ^ m) >> 2) / c) | r;
    }
}

fn mask_colors(mut m: u64) -> Vec<Color> {
    let mut out = Vec::new();
    while m != 0 {
        out.push(m.trailing_zeros() as Color);
        m &= m - 1;
    }
    out
}

/// Partition into classes of false twins (equal open neighbourhoods) and
/// true twins (equal closed neighbourhoods), ordered by smallest member.
pub(crate) fn twin_classes(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let masks = adjacency_masks(g);
    let mut class = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        if class[v] != usize::MAX {
            continue;
        }
        let id = classes.len();
        class[v] = id;
        let mut members = vec![v];
        for u in v + 1..n {
            if class[u] != usize::MAX {
                continue;
            }
            let false_twin = !g.adjacent(u, v) && masks[u] == masks[v];
            let true_twin = g.adjacent(u, v) && masks[u] | 1 << u == masks[v] | 1 << v;
            if false_twin || true_twin {
                class[u] = id;
                members.push(u);
            }
        }
        classes.push(members);
    }
    classes
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChiList {
    pub chromatic_number: usize,
    pub list_chromatic_number: usize,
    /// Bad assignment with lists of size `list_chromatic_number - 1`.
    #[serde(skip)]
    pub witness: Option<ListAssignment>,
    pub assignments_checked: u64,
}

/// Least `k` such that `g` is `k`-choosable, searching upward from the
/// chromatic number.
pub fn chi_list_exact(g: &Graph, opts: &ChoosabilityOptions) -> Result<ChiList> {
    let (chi, _) = chromatic_number_exact(g, opts.chromatic_budget)?;
    let mut witness = None;
    let mut total = 0;
    for k in chi..=g.vertex_count() {
        let r = is_choosable(g, k, opts)?;
        total += r.assignments_checked;
        if r.choosable {
            return Ok(ChiList {
                chromatic_number: chi,
                list_chromatic_number: k,
                witness,
                assignments_checked: total,
            });
        }
        witness = r.witness;
    }
    unreachable!("every graph is n-choosable")
}

/// Seeded random search for a `k`-list assignment with no acceptable
/// colouring.
///
/// Trial `i` draws from `ChaCha8Rng` seeded with `seed` on stream `i`. Half
/// of the trials use a universe of `min(2k, n - 1)` colours and the rest a
/// uniformly drawn size in `k..=n - 1`. The first (lowest-index) bad
/// assignment is re-verified by the exact solver before being returned.
pub fn find_bad_assignment(g: &Graph, k: usize, trials: u64, seed: u64) -> Result<Option<ListAssignment>> {
    let n = g.vertex_count();
    if k == 0 {
        return Err(LabError::invalid("list size must be positive"));
    }
    if k >= n {
        return Ok(None);
    }
    if n > 64 {
        return Err(LabError::limit("bad-assignment search vertex count", 64, n as u64));
    }
    let top = (n - 1).max(k).min(64);
    let focus = (2 * k).clamp(k, top);
    let adj = adjacency_masks(g);
    let draw = |i: u64| -> Option<Vec<u64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i);
        let u = if rng.gen_bool(0.5) {
            focus
        } else {
            rng.gen_range(k..=top)
        };
        let lists: Vec<u64> = (0..n)
            .map(|_| sample(&mut rng, u, k).iter().fold(0u64, |m, c| m | 1 << c))
            .collect();
        let mut doms = lists.clone();
        (!colorable_small(&adj, &mut doms)).then_some(lists)
    };
    let hit = (0..trials).into_par_iter().find_map_first(draw);
    let Some(masks) = hit else { return Ok(None) };
    let lists = ListAssignment::new(masks.into_iter().map(mask_colors).collect())?;
    let check = find_acceptable_coloring_with(g, &lists, &SolverOptions::default())?;
    if check.is_some() {
        return Err(LabError::InternalInconsistency {
            message: "bitmask search reported a bad assignment the exact solver colours".into(),
            state: format!("{:?}", lists.lists()),
        });
    }
    Ok(Some(lists))
}
