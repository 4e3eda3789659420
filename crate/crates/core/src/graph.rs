//! Simple undirected graphs, part structures and complete multipartite
//! construction.
//!
//! Vertices are dense ids `0..n`. The empty graph is rejected everywhere:
//! chromatic and list-chromatic numbers are undefined on it.

use crate::error::{LabError, Result};

/// Default vertex budget for [`chromatic_number_exact`].
pub const DEFAULT_CHROMATIC_BUDGET: usize = 16;

/// Simple undirected graph on vertices `0..vertex_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adjacency: Vec<bool>,
    neighbors: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate edges (in either
    /// orientation) and out-of-range endpoints.
    pub fn new(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if vertex_count == 0 {
            return Err(LabError::invalid("graph must have at least one vertex"));
        }
        let mut g = Graph {
            n: vertex_count,
            adjacency: vec![false; vertex_count * vertex_count],
            neighbors: vec![Vec::new(); vertex_count],
            edge_count: 0,
        };
        for &(u, v) in edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(LabError::invalid(format!(
                    "edge ({u}, {v}) has an endpoint outside 0..{vertex_count}"
                )));
            }
            if u == v {
                return Err(LabError::invalid(format!("self-loop at vertex {u}")));
            }
            if g.adjacent(u, v) {
                return Err(LabError::invalid(format!("duplicate edge ({u}, {v})")));
            }
            g.insert(u, v);
        }
        g.sort_neighbors();
        Ok(g)
    }

    pub fn edgeless(vertex_count: usize) -> Result<Self> {
        Self::new(vertex_count, &[])
    }

    pub fn complete(vertex_count: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for u in 0..vertex_count {
            for v in u + 1..vertex_count {
                edges.push((u, v));
            }
        }
        Self::new(vertex_count, &edges)
    }

    pub fn cycle(vertex_count: usize) -> Result<Self> {
        if vertex_count < 3 {
            return Err(LabError::invalid("a cycle needs at least 3 vertices"));
        }
        let edges: Vec<_> = (0..vertex_count).map(|i| (i, (i + 1) % vertex_count)).collect();
        Self::new(vertex_count, &edges)
    }

    fn insert(&mut self, u: usize, v: usize) {
        self.adjacency[u * self.n + v] = true;
        self.adjacency[v * self.n + u] = true;
        self.neighbors[u].push(v);
        self.neighbors[v].push(u);
        self.edge_count += 1;
    }

    fn sort_neighbors(&mut self) {
        for list in &mut self.neighbors {
            list.sort_unstable();
        }
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adjacency[u * self.n + v]
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for u in 0..self.n {
            for &v in &self.neighbors[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn is_independent(&self, vertices: &[usize]) -> bool {
        vertices
            .iter()
            .enumerate()
            .all(|(i, &u)| vertices[i + 1..].iter().all(|&v| !self.adjacent(u, v)))
    }

    /// True when every edge of `self` is also an edge of `other`.
    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.n == other.n && self.edges().into_iter().all(|(u, v)| other.adjacent(u, v))
    }

    /// Recovers the part structure if the graph is complete multipartite.
    ///
    /// Non-adjacency is an equivalence relation exactly on complete
    /// multipartite graphs; parts are ordered by their smallest vertex.
    pub fn multipartite_parts(&self) -> Option<PartStructure> {
        let mut part_of = vec![usize::MAX; self.n];
        let mut parts: Vec<Vec<usize>> = Vec::new();
        for v in 0..self.n {
            if part_of[v] != usize::MAX {
                continue;
            }
            let id = parts.len();
            let mut part = vec![v];
            part_of[v] = id;
            for u in v + 1..self.n {
                if !self.adjacent(u, v) {
                    if part_of[u] != usize::MAX {
                        return None;
                    }
                    part_of[u] = id;
                    part.push(u);
                }
            }
            parts.push(part);
        }
        let structure = PartStructure { parts, part_of };
        structure.is_complete_multipartite_of(self).then_some(structure)
    }
}

/// Ordered partition of the vertex set into nonempty parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartStructure {
    parts: Vec<Vec<usize>>,
    part_of: Vec<usize>,
}

impl PartStructure {
    /// Validates that `parts` are disjoint, nonempty and cover `0..n`.
    /// Vertices inside each part are kept in the given order.
    pub fn new(vertex_count: usize, parts: Vec<Vec<usize>>) -> Result<Self> {
        if vertex_count == 0 {
            return Err(LabError::invalid("part structure over an empty vertex set"));
        }
        let mut part_of = vec![usize::MAX; vertex_count];
        for (i, part) in parts.iter().enumerate() {
            if part.is_empty() {
                return Err(LabError::invalid(format!("part {i} is empty")));
            }
            for &v in part {
                if v >= vertex_count {
                    return Err(LabError::invalid(format!(
                        "vertex {v} in part {i} is outside 0..{vertex_count}"
                    )));
                }
                if part_of[v] != usize::MAX {
                    return Err(LabError::invalid(format!("vertex {v} appears in two parts")));
                }
                part_of[v] = i;
            }
        }
        if let Some(v) = part_of.iter().position(|&p| p == usize::MAX) {
            return Err(LabError::invalid(format!("vertex {v} is in no part")));
        }
        Ok(PartStructure { parts, part_of })
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn part_count(&self) -> usize {
        self.parts.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.part_of.len()
    }

    pub fn part_of(&self, v: usize) -> usize {
        self.part_of[v]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.parts.iter().map(Vec::len).collect()
    }

    /// Vertices lying in singleton parts.
    pub fn singletons(&self) -> Vec<usize> {
        self.parts.iter().filter(|p| p.len() == 1).map(|p| p[0]).collect()
    }

    /// Number of parts with at least two vertices.
    pub fn non_singleton_count(&self) -> usize {
        self.parts.iter().filter(|p| p.len() > 1).count()
    }

    /// Full scan: every part independent and every cross-part pair adjacent.
    pub fn is_complete_multipartite_of(&self, g: &Graph) -> bool {
        if g.vertex_count() != self.vertex_count() {
            return false;
        }
        let n = g.vertex_count();
        (0..n).all(|u| (u + 1..n).all(|v| g.adjacent(u, v) == (self.part_of[u] != self.part_of[v])))
    }

    /// The complete multipartite graph on this partition.
    pub fn to_graph(&self) -> Graph {
        let n = self.vertex_count();
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if self.part_of[u] != self.part_of[v] {
                    edges.push((u, v));
                }
            }
        }
        Graph::new(n, &edges).expect("cross-part edges are valid")
    }
}

/// Complete multipartite graph with parts of the given sizes, vertices
/// numbered consecutively part by part.
pub fn complete_multipartite(part_sizes: &[usize]) -> Result<(Graph, PartStructure)> {
    if part_sizes.is_empty() {
        return Err(LabError::invalid("part size list is empty"));
    }
    if let Some(i) = part_sizes.iter().position(|&s| s == 0) {
        return Err(LabError::invalid(format!("part {i} has size 0")));
    }
    let mut parts = Vec::with_capacity(part_sizes.len());
    let mut next = 0;
    for &size in part_sizes {
        parts.push((next..next + size).collect());
        next += size;
    }
    let structure = PartStructure::new(next, parts)?;
    Ok((structure.to_graph(), structure))
}

/// A proper vertex colouring into classes `0..class_count`, every class used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProperColoring {
    classes: Vec<usize>,
    class_count: usize,
}

impl ProperColoring {
    /// Relabels class indices densely in order of first appearance and
    /// checks that no edge is monochromatic.
    pub fn new(g: &Graph, assignment: &[usize]) -> Result<Self> {
        if assignment.len() != g.vertex_count() {
            return Err(LabError::invalid(format!(
                "colouring covers {} vertices, graph has {}",
                assignment.len(),
                g.vertex_count()
            )));
        }
        for (u, v) in g.edges() {
            if assignment[u] == assignment[v] {
                return Err(LabError::invalid(format!(
                    "edge ({u}, {v}) is monochromatic in class {}",
                    assignment[u]
                )));
            }
        }
        let mut relabel = std::collections::HashMap::new();
        let classes = assignment
            .iter()
            .map(|&c| {
                let next = relabel.len();
                *relabel.entry(c).or_insert(next)
            })
            .collect();
        Ok(ProperColoring {
            classes,
            class_count: relabel.len(),
        })
    }

    pub fn class_of(&self, v: usize) -> usize {
        self.classes[v]
    }

    pub fn classes(&self) -> &[usize] {
        &self.classes
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    /// Vertex sets of each class, in class order.
    pub fn class_sets(&self) -> Vec<Vec<usize>> {
        let mut sets = vec![Vec::new(); self.class_count];
        for (v, &c) in self.classes.iter().enumerate() {
            sets[c].push(v);
        }
        sets
    }
}

/// Exact chromatic number by branch and bound, with a witness colouring.
///
/// The search starts at a greedy clique lower bound and stops below a
/// DSATUR upper bound. Graphs above `budget` vertices are refused.
pub fn chromatic_number_exact(g: &Graph, budget: usize) -> Result<(usize, ProperColoring)> {
    let n = g.vertex_count();
    if n > budget {
        return Err(LabError::limit(
            "chromatic number vertex budget",
            budget as u64,
            n as u64,
        ));
    }
    let lower = greedy_clique(g).len().max(1);
    let upper = dsatur_greedy(g);
    let upper_classes = upper.iter().copied().max().map_or(1, |c| c + 1);
    for k in lower..upper_classes {
        if let Some(assignment) = k_coloring(g, k) {
            return Ok((k, ProperColoring::new(g, &assignment)?));
        }
    }
    Ok((upper_classes, ProperColoring::new(g, &upper)?))
}

/// Greedy clique: repeatedly add the highest-degree vertex adjacent to all
/// chosen ones.
pub(crate) fn greedy_clique(g: &Graph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.vertex_count()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let mut clique: Vec<usize> = Vec::new();
    for v in order {
        if clique.iter().all(|&u| g.adjacent(u, v)) {
            clique.push(v);
        }
    }
    clique
}

fn dsatur_greedy(g: &Graph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut color = vec![usize::MAX; n];
    for _ in 0..n {
        let v = next_dsatur_vertex(g, &color).expect("uncoloured vertex remains");
        let used: Vec<usize> = g.neighbors(v).iter().map(|&u| color[u]).collect();
        color[v] = (0..).find(|c| !used.contains(c)).unwrap();
    }
    color
}

fn saturation(g: &Graph, color: &[usize], v: usize) -> usize {
    let mut seen: Vec<usize> = g
        .neighbors(v)
        .iter()
        .map(|&u| color[u])
        .filter(|&c| c != usize::MAX)
        .collect();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

fn next_dsatur_vertex(g: &Graph, color: &[usize]) -> Option<usize> {
    (0..g.vertex_count())
        .filter(|&v| color[v] == usize::MAX)
        .max_by_key(|&v| (saturation(g, color, v), g.degree(v), std::cmp::Reverse(v)))
}

fn k_coloring(g: &Graph, k: usize) -> Option<Vec<usize>> {
    fn go(g: &Graph, k: usize, color: &mut Vec<usize>, used: usize) -> bool {
        let Some(v) = next_dsatur_vertex(g, color) else {
            return true;
        };
        // a fresh class is interchangeable with any other unused one
        let limit = (used + 1).min(k);
        for c in 0..limit {
            if g.neighbors(v).iter().any(|&u| color[u] == c) {
                continue;
            }
            color[v] = c;
            if go(g, k, color, used.max(c + 1)) {
                return true;
            }
            color[v] = usize::MAX;
        }
        false
    }
    let mut color = vec![usize::MAX; g.vertex_count()];
    go(g, k, &mut color, 0).then_some(color)
}

/// Adds every edge between distinct colour classes, producing the complete
/// multipartite supergraph whose parts are the classes of `coloring`.
pub fn saturate(g: &Graph, coloring: &ProperColoring) -> Result<(Graph, PartStructure)> {
    // re-validate: the colouring may have been built for another graph
    let checked = ProperColoring::new(g, coloring.classes())?;
    let parts = PartStructure::new(g.vertex_count(), checked.class_sets())?;
    let saturated = parts.to_graph();
    debug_assert!(g.is_subgraph_of(&saturated));
    Ok((saturated, parts))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multipartite_edge_counts() {
        let (g, p) = complete_multipartite(&[2, 2, 2]).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count(), p.part_count()), (6, 12, 3));
        let (g, _) = complete_multipartite(&[3, 3]).unwrap();
        assert_eq!(g.edge_count(), 9);
        let (g, _) = complete_multipartite(&[2, 2, 4]).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (8, 20));
    }

    #[test]
    fn multipartite_rejects_bad_sizes() {
        assert!(matches!(complete_multipartite(&[]), Err(LabError::InvalidArgument(_))));
        assert!(matches!(
            complete_multipartite(&[2, 0]),
            Err(LabError::InvalidArgument(_))
        ));
    }

    #[test]
    fn single_part_is_edgeless_and_unit_parts_complete() {
        let (g, _) = complete_multipartite(&[5]).unwrap();
        assert_eq!(g.edge_count(), 0);
        let (g, _) = complete_multipartite(&[1; 5]).unwrap();
        assert_eq!(g, Graph::complete(5).unwrap());
    }

    #[test]
    fn graph_validation() {
        assert!(Graph::new(0, &[]).is_err());
        assert!(Graph::new(2, &[(0, 0)]).is_err());
        assert!(Graph::new(2, &[(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(2, &[(0, 2)]).is_err());
    }

    #[test]
    fn chromatic_numbers() {
        let (c, _) = chromatic_number_exact(&Graph::edgeless(5).unwrap(), 16).unwrap();
        assert_eq!(c, 1);
        let (g, _) = complete_multipartite(&[3, 3]).unwrap();
        assert_eq!(chromatic_number_exact(&g, 16).unwrap().0, 2);
        let (g, _) = complete_multipartite(&[2, 2, 4]).unwrap();
        let (c, w) = chromatic_number_exact(&g, 16).unwrap();
        assert_eq!(c, 3);
        assert_eq!(w.class_count(), 3);
        assert_eq!(chromatic_number_exact(&Graph::cycle(5).unwrap(), 16).unwrap().0, 3);
        assert_eq!(chromatic_number_exact(&Graph::complete(6).unwrap(), 16).unwrap().0, 6);
    }

    #[test]
    fn chromatic_budget() {
        let g = Graph::edgeless(17).unwrap();
        assert!(matches!(
            chromatic_number_exact(&g, DEFAULT_CHROMATIC_BUDGET),
            Err(LabError::ResourceLimit { .. })
        ));
    }

    #[test]
    fn saturate_five_cycle() {
        let c5 = Graph::cycle(5).unwrap();
        // classes {0,2}, {1,3}, {4}
        let coloring = ProperColoring::new(&c5, &[0, 1, 0, 1, 2]).unwrap();
        let (sat, parts) = saturate(&c5, &coloring).unwrap();
        assert_eq!(parts.sizes(), vec![2, 2, 1]);
        assert!(c5.is_subgraph_of(&sat));
        // relabel class-by-class and compare with the constructor's graph
        let (target, _) = complete_multipartite(&[2, 2, 1]).unwrap();
        let order: Vec<usize> = parts.parts().concat();
        for a in 0..5 {
            for b in 0..5 {
                if a != b {
                    assert_eq!(sat.adjacent(order[a], order[b]), target.adjacent(a, b));
                }
            }
        }
        assert_eq!(chromatic_number_exact(&sat, 16).unwrap().0, 3);
    }

    #[test]
    fn saturate_fixpoint_and_edgeless() {
        let (g, parts) = complete_multipartite(&[2, 3, 1]).unwrap();
        let classes: Vec<usize> = (0..g.vertex_count()).map(|v| parts.part_of(v)).collect();
        let coloring = ProperColoring::new(&g, &classes).unwrap();
        let (sat, _) = saturate(&g, &coloring).unwrap();
        assert_eq!(sat, g);

        let e = Graph::edgeless(3).unwrap();
        let one = ProperColoring::new(&e, &[0, 0, 0]).unwrap();
        let (sat, parts) = saturate(&e, &one).unwrap();
        assert_eq!(sat.edge_count(), 0);
        assert_eq!(parts.sizes(), vec![3]);
    }

    #[test]
    fn improper_colouring_rejected() {
        let g = Graph::new(2, &[(0, 1)]).unwrap();
        assert!(matches!(
            ProperColoring::new(&g, &[4, 4]),
            Err(LabError::InvalidArgument(_))
        ));
    }

    #[test]
    fn recognises_multipartite() {
        let (g, parts) = complete_multipartite(&[1, 3, 2]).unwrap();
        assert_eq!(g.multipartite_parts().unwrap().sizes(), parts.sizes());
        assert!(Graph::cycle(5).unwrap().multipartite_parts().is_none());
    }
}
