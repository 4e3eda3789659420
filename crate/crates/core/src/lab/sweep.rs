use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::choose::{chi_list_exact, ChoosabilityOptions};
use crate::error::{LabError, Result};
use crate::graph::complete_multipartite;

/// All partitions of `n` as nonincreasing part-size vectors, in
/// colexicographic order (compared from the last entry backwards).
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(prefix.clone());
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            prefix.push(p);
            go(rest - p, p, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        go(n, n, &mut Vec::new(), &mut out);
    }
    out.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()).then(a.len().cmp(&b.len())));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVerdict {
    Equal,
    Greater,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Part sizes, nonincreasing, joined with `-` (e.g. `2-2-1`).
    pub parts: String,
    pub n: usize,
    pub chi: usize,
    pub chi_list: Option<usize>,
    pub verdict: SweepVerdict,
    pub assignments_checked: u64,
    pub note: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub micros: Option<u128>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub max_n: usize,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn all_equal(&self) -> bool {
        self.rows.iter().all(|r| r.verdict == SweepVerdict::Equal)
    }

    pub fn without_timing(&self) -> Self {
        SweepReport {
            max_n: self.max_n,
            rows: self
                .rows
                .iter()
                .map(|r| SweepRow {
                    micros: None,
                    ..r.clone()
                })
                .collect(),
        }
    }
}

/// Computes the list-chromatic number of every complete multipartite graph
/// with `n <= max_n` vertices and `n <= 2 chi + 1`, by increasing `n`.
/// Entries that exceed the budget are marked skipped.
pub fn ohba_sweep(max_n: usize, opts: &ChoosabilityOptions) -> Result<SweepReport> {
    if max_n == 0 {
        return Err(LabError::invalid("max_n must be positive"));
    }
    let mut rows = Vec::new();
    for n in 1..=max_n {
        for sizes in partitions(n) {
            let chi = sizes.len();
            if n > 2 * chi + 1 {
                continue;
            }
            let (g, _) = complete_multipartite(&sizes)?;
            let label = sizes.iter().map(usize::to_string).collect::<Vec<_>>().join("-");
            let clock = Instant::now();
            let row = match chi_list_exact(&g, opts) {
                Ok(r) => SweepRow {
                    parts: label,
                    n,
                    chi,
                    chi_list: Some(r.list_chromatic_number),
                    verdict: if r.list_chromatic_number == chi {
                        SweepVerdict::Equal
                    } else {
                        SweepVerdict::Greater
                    },
                    assignments_checked: r.assignments_checked,
                    note: String::new(),
                    micros: Some(clock.elapsed().as_micros()),
                },
                Err(e @ LabError::ResourceLimit { .. }) => SweepRow {
                    parts: label,
                    n,
                    chi,
                    chi_list: None,
                    verdict: SweepVerdict::Skipped,
                    assignments_checked: 0,
                    note: e.to_string(),
                    micros: Some(clock.elapsed().as_micros()),
                },
                Err(e) => return Err(e),
            };
            rows.push(row);
        }
    }
    Ok(SweepReport { max_n, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_counts_and_order() {
        let counts: Vec<usize> = (1..=8).map(|n| partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 3, 5, 7, 11, 15, 22]);
        assert_eq!(partitions(3), vec![vec![1, 1, 1], vec![2, 1], vec![3]]);
    }

    #[test]
    fn sweep_up_to_five_is_all_equal() {
        let r = ohba_sweep(5, &ChoosabilityOptions::default()).unwrap();
        assert!(r.all_equal());
        // [2,2,1] is among the rows, [4,1] (n = 5 = 2*2+1) too, [5] is not
        let labels: Vec<&str> = r.rows.iter().map(|r| r.parts.as_str()).collect();
        assert!(labels.contains(&"2-2-1") && labels.contains(&"4-1") && !labels.contains(&"5"));
    }
}
