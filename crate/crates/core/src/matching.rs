//! Maximum bipartite matching with Hall-condition witnesses.
//!
//! Left and right entities are dense indices; callers keep their own
//! mapping to vertices or colours.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::lists::Color;

/// Default cap on the cardinality searched by [`minimal_deficient_set`].
pub const DEFAULT_DEFICIENT_CAP: usize = 20;

const UNMATCHED: usize = usize::MAX;

/// Bipartite graph given by left-side adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteIncidence {
    right_count: usize,
    adjacency: Vec<Vec<usize>>,
}

impl BipartiteIncidence {
    /// Neighbour lists are sorted and deduplicated; every right id must be
    /// below `right_count`.
    pub fn new(right_count: usize, adjacency: Vec<Vec<usize>>) -> Result<Self> {
        let mut adjacency = adjacency;
        for (l, nbrs) in adjacency.iter_mut().enumerate() {
            nbrs.sort_unstable();
            nbrs.dedup();
            if let Some(&r) = nbrs.last() {
                if r >= right_count {
                    return Err(LabError::invalid(format!(
                        "left {l} adjacent to right {r} outside 0..{right_count}"
                    )));
                }
            }
        }
        Ok(BipartiteIncidence { right_count, adjacency })
    }

    pub fn left_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn right_count(&self) -> usize {
        self.right_count
    }

    pub fn neighbors(&self, left: usize) -> &[usize] {
        &self.adjacency[left]
    }

    /// Sorted union of the neighbourhoods of `left`.
    pub fn neighborhood(&self, left: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = left.iter().flat_map(|&l| self.adjacency[l].iter().copied()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// The incidence restricted to the given left ids (renumbered in order).
    pub fn restrict_left(&self, left: &[usize]) -> BipartiteIncidence {
        BipartiteIncidence {
            right_count: self.right_count,
            adjacency: left.iter().map(|&l| self.adjacency[l].clone()).collect(),
        }
    }
}

/// A left subset `X` with `|N(X)| < |X|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HallWitness {
    pub left: Vec<usize>,
    pub neighborhood: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingResult {
    /// `(left, right)` pairs sorted by left id.
    pub pairs: Vec<(usize, usize)>,
    /// Present exactly when the matching does not saturate the left side.
    pub deficiency_witness: Option<HallWitness>,
    mate_left: Vec<usize>,
}

impl MatchingResult {
    pub fn size(&self) -> usize {
        self.pairs.len()
    }

    pub fn mate_of_left(&self, left: usize) -> Option<usize> {
        let r = self.mate_left[left];
        (r != UNMATCHED).then_some(r)
    }

    pub fn saturates_left(&self) -> bool {
        self.deficiency_witness.is_none()
    }
}

/// Hopcroft–Karp maximum matching.
///
/// When the left side is not saturated the witness is the set of left
/// vertices reachable from unmatched left vertices by alternating paths,
/// together with its neighbourhood (all matched, to vertices inside the
/// set), so `|N(X)| = |X| - deficiency`.
pub fn max_matching(h: &BipartiteIncidence) -> MatchingResult {
    let nl = h.left_count();
    let mut mate_left = vec![UNMATCHED; nl];
    let mut mate_right = vec![UNMATCHED; h.right_count];
    let mut dist = vec![0usize; nl];

    loop {
        // layered BFS from free left vertices
        let mut queue = VecDeque::new();
        for l in 0..nl {
            if mate_left[l] == UNMATCHED {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(l) = queue.pop_front() {
            for &r in h.neighbors(l) {
                let next = mate_right[r];
                if next == UNMATCHED {
                    found = true;
                } else if dist[next] == usize::MAX {
                    dist[next] = dist[l] + 1;
                    queue.push_back(next);
                }
            }
        }
        if !found {
            break;
        }
        let mut augmented = false;
        for l in 0..nl {
            if mate_left[l] == UNMATCHED && augment(h, l, &mut mate_left, &mut mate_right, &mut dist) {
                augmented = true;
            }
        }
        if !augmented {
            break;
        }
    }

    let pairs: Vec<(usize, usize)> = mate_left
        .iter()
        .enumerate()
        .filter(|&(_, &r)| r != UNMATCHED)
        .map(|(l, &r)| (l, r))
        .collect();
    let deficiency_witness = (pairs.len() < nl).then(|| alternating_witness(h, &mate_left, &mate_right));
    MatchingResult {
        pairs,
        deficiency_witness,
        mate_left,
    }
}

fn augment(
    h: &BipartiteIncidence,
    l: usize,
    mate_left: &mut [usize],
    mate_right: &mut [usize],
    dist: &mut [usize],
) -> bool {
    for &r in h.neighbors(l) {
        let next = mate_right[r];
        if next == UNMATCHED || (dist[next] == dist[l].wrapping_add(1) && augment(h, next, mate_left, mate_right, dist))
        {
            mate_left[l] = r;
            mate_right[r] = l;
            return true;
        }
    }
    dist[l] = usize::MAX;
    false
}

fn alternating_witness(h: &BipartiteIncidence, mate_left: &[usize], mate_right: &[usize]) -> HallWitness {
    let mut seen_left = vec![false; h.left_count()];
    let mut seen_right = vec![false; h.right_count];
    let mut queue: VecDeque<usize> = (0..h.left_count()).filter(|&l| mate_left[l] == UNMATCHED).collect();
    for &l in &queue {
        seen_left[l] = true;
    }
    while let Some(l) = queue.pop_front() {
        for &r in h.neighbors(l) {
            if !seen_right[r] {
                seen_right[r] = true;
                let next = mate_right[r];
                debug_assert!(next != UNMATCHED, "maximum matching has no augmenting path");
                if !seen_left[next] {
                    seen_left[next] = true;
                    queue.push_back(next);
                }
            }
        }
    }
    HallWitness {
        left: (0..h.left_count()).filter(|&l| seen_left[l]).collect(),
        neighborhood: (0..h.right_count).filter(|&r| seen_right[r]).collect(),
    }
}

/// Smallest left subset admitting no saturating matching, lexicographically
/// least among those of minimum size; `None` when the left side is
/// saturable.
///
/// A minimum-size unsaturable set `B` has `|N(B)| <= |B| - 1`, and every
/// proper subset of it is saturable. Candidates of degree `>= |B|` are
/// skipped. The search is exponential and refuses sizes above `cap`.
pub fn minimal_deficient_set(h: &BipartiteIncidence, cap: usize) -> Result<Option<Vec<usize>>> {
    let matching = max_matching(h);
    let Some(witness) = matching.deficiency_witness else {
        return Ok(None);
    };
    let words = h.right_count.div_ceil(64).max(1);
    // the alternating witness itself is deficient, so the search ends by its size
    for size in 1..=witness.left.len() {
        if size > cap {
            return Err(LabError::limit("deficient set cardinality", cap as u64, size as u64));
        }
        let candidates: Vec<usize> = (0..h.left_count()).filter(|&l| h.neighbors(l).len() < size).collect();
        if candidates.len() < size {
            continue;
        }
        let mut chosen = Vec::with_capacity(size);
        let mut union = vec![vec![0u64; words]; size + 1];
        if search_deficient(h, &candidates, 0, size, &mut chosen, &mut union) {
            return Ok(Some(chosen));
        }
    }
    Err(LabError::InternalInconsistency {
        message: "alternating witness is deficient but no deficient subset was found".into(),
        state: format!("{witness:?}"),
    })
}

fn search_deficient(
    h: &BipartiteIncidence,
    candidates: &[usize],
    start: usize,
    size: usize,
    chosen: &mut Vec<usize>,
    union: &mut [Vec<u64>],
) -> bool {
    let depth = chosen.len();
    let covered: u32 = union[depth].iter().map(|w| w.count_ones()).sum();
    if covered as usize >= size {
        return false;
    }
    if depth == size {
        return true;
    }
    let remaining = size - depth;
    for i in start..=candidates.len().saturating_sub(remaining) {
        let l = candidates[i];
        let (lower, upper) = union.split_at_mut(depth + 1);
        upper[0].copy_from_slice(&lower[depth]);
        for &r in h.neighbors(l) {
            upper[0][r / 64] |= 1 << (r % 64);
        }
        chosen.push(l);
        if search_deficient(h, candidates, i + 1, size, chosen, union) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Result of a distinct-representatives colouring attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SdrOutcome {
    /// Colour per entry of the input vertex slice, all distinct.
    pub colors: Option<Vec<Color>>,
    /// Hall witness in vertex and colour terms when no SDR exists.
    pub witness: Option<SdrWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SdrWitness {
    pub vertices: Vec<usize>,
    pub colors: Vec<Color>,
}

/// Assigns pairwise distinct colours to `vertices`, each from its own list,
/// via a left-saturating matching in the vertex–colour incidence graph.
pub fn sdr_coloring<'a>(vertices: &[usize], list_of: impl Fn(usize) -> &'a [Color]) -> SdrOutcome {
    let mut palette: Vec<Color> = vertices.iter().flat_map(|&v| list_of(v).iter().copied()).collect();
    palette.sort_unstable();
    palette.dedup();
    let adjacency = vertices
        .iter()
        .map(|&v| {
            list_of(v)
                .iter()
                .map(|c| palette.binary_search(c).expect("colour is in palette"))
                .collect()
        })
        .collect();
    let h = BipartiteIncidence::new(palette.len(), adjacency).expect("palette indices in range");
    let m = max_matching(&h);
    match m.deficiency_witness {
        None => SdrOutcome {
            colors: Some(
                (0..vertices.len())
                    .map(|i| palette[m.mate_of_left(i).unwrap()])
                    .collect(),
            ),
            witness: None,
        },
        Some(w) => SdrOutcome {
            colors: None,
            witness: Some(SdrWitness {
                vertices: w.left.iter().map(|&i| vertices[i]).collect(),
                colors: w.neighborhood.iter().map(|&r| palette[r]).collect(),
            }),
        },
    }
}
