//! Exact acceptable-colouring search.
//!
//! Backtracking picks the uncoloured vertex with the fewest remaining
//! colours (ties: shorter original list, higher degree, lower id), tries
//! colours in increasing order and forward-checks neighbours. Before
//! branching, a greedy clique of uncoloured vertices must admit distinct
//! representatives from the remaining domains.

use crate::error::{LabError, Result};
use crate::graph::Graph;
use crate::lists::{Coloring, ListAssignment};

/// Limits for [`find_acceptable_coloring`]. An instance is accepted when
/// it has at most `max_vertices` vertices *or* its list-product is at most
/// `max_product`; `max_nodes` bounds the search tree either way.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverBudget {
    pub max_vertices: usize,
    pub max_product: f64,
    pub max_nodes: u64,
}

impl Default for SolverBudget {
    fn default() -> Self {
        SolverBudget {
            max_vertices: 24,
            max_product: 1e9,
            max_nodes: 2_000_000_000,
        }
    }
}

impl SolverBudget {
    pub fn admits(&self, lists: &ListAssignment) -> bool {
        let product: f64 = lists.lists().iter().map(|l| l.len() as f64).product();
        lists.vertex_count() <= self.max_vertices || product <= self.max_product
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub budget: SolverBudget,
    pub hall_prune: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            budget: SolverBudget::default(),
            hall_prune: true,
        }
    }
}

/// Returns an acceptable colouring iff one exists.
pub fn find_acceptable_coloring(g: &Graph, lists: &ListAssignment) -> Result<Option<Coloring>> {
    find_acceptable_coloring_with(g, lists, &SolverOptions::default())
}

pub fn find_acceptable_coloring_with(
    g: &Graph,
    lists: &ListAssignment,
    opts: &SolverOptions,
) -> Result<Option<Coloring>> {
    if lists.vertex_count() != g.vertex_count() {
        return Err(LabError::invalid(format!(
            "list assignment covers {} vertices, graph has {}",
            lists.vertex_count(),
            g.vertex_count()
        )));
    }
    if !opts.budget.admits(lists) {
        return Err(LabError::limit(
            "exact solver instance size",
            opts.budget.max_vertices as u64,
            g.vertex_count() as u64,
        ));
    }
    let universe = lists.universe();
    let width = universe.len().div_ceil(64).max(1);
    match width {
        1 => Search::<1>::run(g, lists, opts),
        2 => Search::<2>::run(g, lists, opts),
        3..=4 => Search::<4>::run(g, lists, opts),
        5..=8 => Search::<8>::run(g, lists, opts),
        9..=16 => Search::<16>::run(g, lists, opts),
        _ => Err(LabError::limit(
            "exact solver colour universe",
            1024,
            universe.len() as u64,
        )),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
struct Bits<const W: usize>([u64; W]);

impl<const W: usize> Bits<W> {
    const EMPTY: Self = Bits([0; W]);

    #[inline]
    fn has(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    #[inline]
    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }

    #[inline]
    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                (w != 0).then(|| {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    wi * 64 + b
                })
            })
        })
    }
}

struct Search<'g, const W: usize> {
    g: &'g Graph,
    rank: Vec<usize>,
    domains: Vec<Bits<W>>,
    assigned: Vec<usize>,
    trail: Vec<(usize, usize)>,
    nodes: u64,
    opts: SolverOptions,
}

const FREE: usize = usize::MAX;

impl<'g, const W: usize> Search<'g, W> {
    fn run(g: &'g Graph, lists: &ListAssignment, opts: &SolverOptions) -> Result<Option<Coloring>> {
        let universe = lists.universe();
        let n = g.vertex_count();
        let domains: Vec<Bits<W>> = (0..n)
            .map(|v| {
                let mut b = Bits::EMPTY;
                for c in lists.list(v) {
                    b.set(universe.binary_search(c).unwrap());
                }
                b
            })
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| (lists.list(v).len(), std::cmp::Reverse(g.degree(v)), v));
        let mut rank = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            rank[v] = i;
        }
        let mut s = Search {
            g,
            rank,
            domains,
            assigned: vec![FREE; n],
            trail: Vec::new(),
            nodes: 0,
            opts: *opts,
        };
        if s.domains.iter().any(Bits::is_empty) {
            return Ok(None);
        }
        if s.dfs(n)? {
            Ok(Some(Coloring(s.assigned.iter().map(|&i| universe[i]).collect())))
        } else {
            Ok(None)
        }
    }

    fn pick(&self) -> Option<usize> {
        (0..self.g.vertex_count())
            .filter(|&v| self.assigned[v] == FREE)
            .min_by_key(|&v| (self.domains[v].count(), self.rank[v]))
    }

    fn dfs(&mut self, remaining: usize) -> Result<bool> {
        if remaining == 0 {
            return Ok(true);
        }
        self.nodes += 1;
        if self.nodes > self.opts.budget.max_nodes {
            return Err(LabError::limit(
                "exact solver search nodes",
                self.opts.budget.max_nodes,
                self.nodes,
            ));
        }
        let v = self.pick().expect("uncoloured vertex remains");
        if self.opts.hall_prune && remaining > 2 && !self.clique_hall_ok(v) {
            return Ok(false);
        }
        let domain = self.domains[v];
        for c in domain.iter() {
            let mark = self.trail.len();
            self.assigned[v] = c;
            let mut ok = true;
            for &u in self.g.neighbors(v) {
                if self.assigned[u] == FREE && self.domains[u].has(c) {
                    self.domains[u].clear(c);
                    self.trail.push((u, c));
                    if self.domains[u].is_empty() {
                        ok = false;
                        break;
                    }
                }
            }
            if ok && self.dfs(remaining - 1)? {
                return Ok(true);
            }
            for (u, c) in self.trail.drain(mark..) {
                self.domains[u].set(c);
            }
            self.assigned[v] = FREE;
        }
        Ok(false)
    }

    /// Distinct representatives for a greedy clique of uncoloured vertices
    /// seeded at `seed`.
    fn clique_hall_ok(&self, seed: usize) -> bool {
        let mut free: Vec<usize> = (0..self.g.vertex_count())
            .filter(|&u| self.assigned[u] == FREE && u != seed)
            .collect();
        free.sort_by_key(|&u| (self.domains[u].count(), self.rank[u]));
        let mut clique = vec![seed];
        for u in free {
            if clique.iter().all(|&w| self.g.adjacent(u, w)) {
                clique.push(u);
            }
        }
        if clique.len() < 2 {
            return true;
        }
        let mut union = Bits::<W>::EMPTY;
        for &u in &clique {
            for (a, b) in union.0.iter_mut().zip(self.domains[u].0.iter()) {
                *a |= b;
            }
        }
        if (union.count() as usize) < clique.len() {
            return false;
        }
        // Kuhn's augmenting paths over colour indices
        let mut owner = std::collections::HashMap::<usize, usize>::new();
        for i in 0..clique.len() {
            let mut seen = Bits::<W>::EMPTY;
            if !self.kuhn(i, &clique, &mut owner, &mut seen) {
                return false;
            }
        }
        true
    }

    fn kuhn(
        &self,
        i: usize,
        clique: &[usize],
        owner: &mut std::collections::HashMap<usize, usize>,
        seen: &mut Bits<W>,
    ) -> bool {
        for c in self.domains[clique[i]].iter() {
            if seen.has(c) {
                continue;
            }
            seen.set(c);
            let free = match owner.get(&c) {
                None => true,
                Some(&j) => self.kuhn(j, clique, owner, seen),
            };
            if free {
                owner.insert(c, i);
                return true;
            }
        }
        false
    }
}

/// Colourability of a graph with at most 64 vertices and 64 colours,
/// given as neighbour bitmasks and colour-domain bitmasks.
///
/// Used in the inner loop of choosability enumeration and bad-assignment
/// search.
pub(crate) fn colorable_small(adj: &[u64], domains: &mut [u64]) -> bool {
    fn go(adj: &[u64], domains: &mut [u64], free: u64) -> bool {
        if free == 0 {
            return true;
        }
        let mut best = usize::MAX;
        let mut best_count = u32::MAX;
        let mut f = free;
        while f != 0 {
            let v = f.trailing_zeros() as usize;
            f &= f - 1;
            let c = domains[v].count_ones();
            if c < best_count {
                best_count = c;
                best = v;
                if c <= 1 {
                    break;
                }
            }
        }
        if best_count == 0 {
            return false;
        }
        let v = best;
        let rest = free & !(1 << v);
        let nbrs = adj[v] & rest;
        let mut dom = domains[v];
        while dom != 0 {
            let bit = dom & dom.wrapping_neg();
            dom &= dom - 1;
            let mut touched = 0u64;
            let mut dead = false;
            let mut nb = nbrs;
            while nb != 0 {
                let u = nb.trailing_zeros() as usize;
                nb &= nb - 1;
                if domains[u] & bit != 0 {
                    domains[u] &= !bit;
                    touched |= 1 << u;
                    if domains[u] == 0 {
                        dead = true;
                        break;
                    }
                }
            }
            let ok = !dead && go(adj, domains, rest);
            let mut t = touched;
            while t != 0 {
                let u = t.trailing_zeros() as usize;
                t &= t - 1;
                domains[u] |= bit;
            }
            if ok {
                return true;
            }
        }
        false
    }
    let n = adj.len();
    debug_assert!(n <= 64);
    let free = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    go(adj, domains, free)
}

pub(crate) fn adjacency_masks(g: &Graph) -> Vec<u64> {
    (0..g.vertex_count())
        .map(|v| g.neighbors(v).iter().fold(0u64, |m, &u| m | 1 << u))
        .collect()
}
