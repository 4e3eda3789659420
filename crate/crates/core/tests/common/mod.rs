//! Brute-force oracles shared by the property and acceptance suites.
//! Deliberately naive: nothing here reuses library search code.
#![allow(dead_code)]

use std::collections::HashMap;

use ohba_lab::graph::Graph;
use ohba_lab::lists::Color;

/// Maximum matching size by exhaustive recursion over left vertices,
/// memoised on (vertex, used right set). Needs `right <= 64`.
pub fn matching_size(adj: &[Vec<usize>]) -> usize {
    fn go(i: usize, used: u64, adj: &[Vec<usize>], memo: &mut HashMap<(usize, u64), usize>) -> usize {
        if i == adj.len() {
            return 0;
        }
        if let Some(&v) = memo.get(&(i, used)) {
            return v;
        }
        let mut best = go(i + 1, used, adj, memo);
        for &r in &adj[i] {
            if used & (1 << r) == 0 {
                best = best.max(1 + go(i + 1, used | (1 << r), adj, memo));
            }
        }
        memo.insert((i, used), best);
        best
    }
    go(0, 0, adj, &mut HashMap::new())
}

pub fn neighborhood(adj: &[Vec<usize>], set: &[usize]) -> Vec<usize> {
    let mut n: Vec<usize> = set.iter().flat_map(|&l| adj[l].iter().copied()).collect();
    n.sort_unstable();
    n.dedup();
    n
}

/// Every `size`-subset of `0..n` in lexicographic order.
pub fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            cur.push(x);
            go(x + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, size, &mut Vec::new(), &mut out);
    out
}

/// Lexicographically least among the smallest `X` with `|N(X)| < |X|`.
pub fn least_deficient_set(adj: &[Vec<usize>]) -> Option<Vec<usize>> {
    (1..=adj.len()).find_map(|size| {
        combinations(adj.len(), size)
            .into_iter()
            .find(|x| neighborhood(adj, x).len() < x.len())
    })
}

/// Whether some choice from the lists is proper, by enumerating the full
/// product of the lists in odometer order.
pub fn colorable_by_product(g: &Graph, lists: &[Vec<Color>]) -> bool {
    let n = lists.len();
    let mut idx = vec![0usize; n];
    loop {
        let proper = g.edges().iter().all(|&(u, v)| lists[u][idx[u]] != lists[v][idx[v]]);
        if proper {
            return true;
        }
        let mut i = 0;
        loop {
            if i == n {
                return false;
            }
            idx[i] += 1;
            if idx[i] < lists[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// Whether every `k`-subset assignment from `0..universe` is colourable.
/// Exponential; only for tiny graphs.
pub fn choosable_by_enumeration(g: &Graph, k: usize, universe: usize) -> bool {
    let subsets: Vec<Vec<Color>> = combinations(universe, k)
        .into_iter()
        .map(|s| s.into_iter().map(|c| c as Color).collect())
        .collect();
    let n = g.vertex_count();
    let mut idx = vec![0usize; n];
    loop {
        let lists: Vec<Vec<Color>> = idx.iter().map(|&i| subsets[i].clone()).collect();
        if !colorable_by_product(g, &lists) {
            return false;
        }
        let mut i = 0;
        loop {
            if i == n {
                return true;
            }
            idx[i] += 1;
            if idx[i] < subsets.len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// Chromatic number by trying every assignment of `0..k` for increasing `k`.
pub fn chromatic_by_enumeration(g: &Graph) -> usize {
    let n = g.vertex_count();
    (1..=n.max(1))
        .find(|&k| colorable_by_product(g, &vec![(0..k as Color).collect(); n]))
        .unwrap()
}
