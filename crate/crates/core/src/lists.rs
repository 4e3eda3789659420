//! List assignments, colourings and acceptability checks.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::graph::Graph;

/// Colours are small nonnegative integers.
pub type Color = u32;

/// One nonempty, sorted list of colours per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ListAssignment {
    lists: Vec<Vec<Color>>,
    universe: Vec<Color>,
}

impl ListAssignment {
    /// Sorts and deduplicates every list; rejects empty lists.
    pub fn new(lists: Vec<Vec<Color>>) -> Result<Self> {
        if lists.is_empty() {
            return Err(LabError::invalid("list assignment over zero vertices"));
        }
        let mut lists = lists;
        for (v, list) in lists.iter_mut().enumerate() {
            list.sort_unstable();
            list.dedup();
            if list.is_empty() {
                return Err(LabError::invalid(format!("vertex {v} has an empty list")));
            }
        }
        Ok(Self::from_sorted(lists))
    }

    /// Every vertex gets `0..k`.
    pub fn uniform(vertex_count: usize, k: usize) -> Result<Self> {
        Self::new(vec![(0..k as Color).collect(); vertex_count])
    }

    /// Lists must already be sorted and deduplicated; empty lists are
    /// tolerated for intermediate pipeline states.
    pub(crate) fn from_sorted(lists: Vec<Vec<Color>>) -> Self {
        debug_assert!(lists.iter().all(|l| l.windows(2).all(|w| w[0] < w[1])));
        let mut universe: Vec<Color> = lists.iter().flatten().copied().collect();
        universe.sort_unstable();
        universe.dedup();
        ListAssignment { lists, universe }
    }

    pub fn vertex_count(&self) -> usize {
        self.lists.len()
    }

    pub fn list(&self, v: usize) -> &[Color] {
        &self.lists[v]
    }

    pub fn lists(&self) -> &[Vec<Color>] {
        &self.lists
    }

    pub fn into_lists(self) -> Vec<Vec<Color>> {
        self.lists
    }

    /// Sorted union of all lists.
    pub fn universe(&self) -> &[Color] {
        &self.universe
    }

    pub fn contains(&self, v: usize, c: Color) -> bool {
        self.lists[v].binary_search(&c).is_ok()
    }

    pub fn min_list_len(&self) -> usize {
        self.lists.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// Applies `f` to every colour; lists are re-sorted.
    pub fn map_colors(&self, f: impl Fn(Color) -> Color) -> Result<Self> {
        Self::new(self.lists.iter().map(|l| l.iter().map(|&c| f(c)).collect()).collect())
    }
}

/// A total colouring, one colour per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Coloring(pub Vec<Color>);

impl Coloring {
    pub fn color(&self, v: usize) -> Color {
        self.0[v]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Outcome of [`verify_coloring`]: the first violation found, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    Acceptable,
    ColorNotInList { vertex: usize, color: Color },
    MonochromaticEdge { u: usize, v: usize, color: Color },
}

impl Verdict {
    pub fn is_acceptable(&self) -> bool {
        matches!(self, Verdict::Acceptable)
    }
}

/// Checks list membership vertex by vertex, then edges in lexicographic
/// order. A colouring of the wrong length is a partial colouring and is
/// rejected as an argument error.
pub fn verify_coloring(g: &Graph, lists: &ListAssignment, coloring: &Coloring) -> Result<Verdict> {
    let n = g.vertex_count();
    if lists.vertex_count() != n {
        return Err(LabError::invalid(format!(
            "list assignment covers {} vertices, graph has {n}",
            lists.vertex_count()
        )));
    }
    if coloring.len() != n {
        return Err(LabError::invalid(format!(
            "partial colouring: {} of {n} vertices coloured",
            coloring.len()
        )));
    }
    for v in 0..n {
        let c = coloring.color(v);
        if !lists.contains(v, c) {
            return Ok(Verdict::ColorNotInList { vertex: v, color: c });
        }
    }
    for (u, v) in g.edges() {
        if coloring.color(u) == coloring.color(v) {
            return Ok(Verdict::MonochromaticEdge {
                u,
                v,
                color: coloring.color(u),
            });
        }
    }
    Ok(Verdict::Acceptable)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    #[test]
    fn single_vertex_ok() {
        let g = Graph::edgeless(1).unwrap();
        let l = ListAssignment::new(vec![vec![1]]).unwrap();
        assert_eq!(
            verify_coloring(&g, &l, &Coloring(vec![1])).unwrap(),
            Verdict::Acceptable
        );
    }

    #[test]
    fn edge_violation_reported() {
        let g = Graph::new(2, &[(0, 1)]).unwrap();
        let l = ListAssignment::new(vec![vec![1, 2], vec![1]]).unwrap();
        assert_eq!(
            verify_coloring(&g, &l, &Coloring(vec![1, 1])).unwrap(),
            Verdict::MonochromaticEdge { u: 0, v: 1, color: 1 }
        );
        assert_eq!(
            verify_coloring(&g, &l, &Coloring(vec![3, 1])).unwrap(),
            Verdict::ColorNotInList { vertex: 0, color: 3 }
        );
    }

    #[test]
    fn partial_colouring_rejected() {
        let g = Graph::new(2, &[(0, 1)]).unwrap();
        let l = ListAssignment::uniform(2, 2).unwrap();
        assert!(matches!(
            verify_coloring(&g, &l, &Coloring(vec![0])),
            Err(LabError::InvalidArgument(_))
        ));
    }

    #[test]
    fn universe_is_union() {
        let l = ListAssignment::new(vec![vec![3, 1, 1], vec![2, 7]]).unwrap();
        assert_eq!(l.universe(), &[1, 2, 3, 7]);
        assert_eq!(l.list(0), &[1, 3]);
        assert!(ListAssignment::new(vec![vec![]]).is_err());
    }
}
