use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{BicliqueSystem, MultipartiteInstance};
use crate::lists::Color;

/// Greedy biclique extraction result.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extraction {
    pub system: BicliqueSystem,
    /// Singleton vertices not placed in any block.
    pub leftover_singletons: usize,
}

fn intersect(a: &[Color], b: &[Color]) -> Vec<Color> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn intersect_len(a: &[Color], b: &[Color]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Greedily extracts disjoint blocks of `t` singleton vertices sharing `m`
/// unused colours, stopping when no block is found or when another block
/// would give more than one colour per part.
///
/// Each candidate block grows from a seed singleton by repeatedly adding
/// the singleton that keeps the common list largest; the seed with the
/// largest final common list wins. Its `m` colours are those least present
/// among the remaining singletons, then lowest.
pub fn extract_bicliques(inst: &MultipartiteInstance, m: usize, t: usize) -> Extraction {
    let mut available: Vec<usize> = inst.parts().singletons();
    available.sort_unstable();
    let total = available.len();
    let mut used: HashSet<Color> = HashSet::new();
    let mut color_blocks = Vec::new();
    let mut singleton_blocks = Vec::new();
    let max_k = inst.part_count() / m.max(1);
    while t > 0 && m > 0 && color_blocks.len() < max_k && available.len() >= t {
        let free: Vec<Vec<Color>> = available
            .iter()
            .map(|&v| {
                inst.lists()
                    .list(v)
                    .iter()
                    .copied()
                    .filter(|c| !used.contains(c))
                    .collect()
            })
            .collect();
        let mut best: Option<(Vec<usize>, Vec<Color>)> = None;
        for seed in 0..available.len() {
            let mut members = vec![seed];
            let mut common = free[seed].clone();
            while members.len() < t && common.len() >= m {
                let next = (0..available.len())
                    .filter(|i| !members.contains(i))
                    .max_by_key(|&i| (intersect_len(&common, &free[i]), std::cmp::Reverse(i)))
                    .expect("enough available singletons");
                common = intersect(&common, &free[next]);
                members.push(next);
            }
            if members.len() == t && common.len() >= m && best.as_ref().is_none_or(|(_, c)| common.len() > c.len()) {
                best = Some((members, common));
            }
        }
        let Some((members, common)) = best else { break };
        let mut ranked: Vec<(usize, Color)> = common
            .iter()
            .map(|&c| {
                let others = (0..available.len())
                    .filter(|i| !members.contains(i) && free[*i].binary_search(&c).is_ok())
                    .count();
                (others, c)
            })
            .collect();
        ranked.sort_unstable();
        let mut block: Vec<Color> = ranked[..m].iter().map(|&(_, c)| c).collect();
        block.sort_unstable();
        let mut verts: Vec<usize> = members.iter().map(|&i| available[i]).collect();
        verts.sort_unstable();
        used.extend(block.iter().copied());
        available.retain(|v| !verts.contains(v));
        color_blocks.push(block);
        singleton_blocks.push(verts);
    }
    let placed: usize = singleton_blocks.iter().map(Vec::len).sum();
    Extraction {
        system: BicliqueSystem {
            m,
            t,
            color_blocks,
            singleton_blocks,
        },
        leftover_singletons: total - placed,
    }
}

/// One failed condition of the randomized procedure's hypothesis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionViolation {
    /// 1 to 5 for the numbered conditions, 0 for the part count `C = km`.
    pub condition: u8,
    pub detail: String,
}

impl ConditionViolation {
    /// Violations of conditions 0, 2 and 4 make the procedure undefined;
    /// the others only weaken its success guarantee.
    pub fn is_hard(&self) -> bool {
        matches!(self.condition, 0 | 2 | 4)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub violations: Vec<ConditionViolation>,
    /// Failed numeric hypotheses (list sizes, `n < (2 - delta) C`,
    /// `m > 6/delta`).
    pub hypotheses: Vec<String>,
}

impl ConditionReport {
    pub fn holds(&self, condition: u8) -> bool {
        self.violations.iter().all(|v| v.condition != condition)
    }

    pub fn all_conditions_hold(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn hard_violations(&self) -> Vec<String> {
        self.violations
            .iter()
            .filter(|v| v.is_hard())
            .map(|v| format!("condition {}: {}", v.condition, v.detail))
            .collect()
    }
}

/// Direct scan of the five conditions plus the numeric hypotheses.
pub fn check_lemma3(inst: &MultipartiteInstance, system: &BicliqueSystem, delta: f64) -> ConditionReport {
    let mut report = ConditionReport::default();
    let mut fail = |condition: u8, detail: String| report.violations.push(ConditionViolation { condition, detail });
    let n = inst.vertex_count();
    let c_total = system.color_count();
    let k = system.k();
    let parts = inst.parts().parts();

    if inst.part_count() != c_total {
        fail(0, format!("{} parts but C = km = {c_total}", inst.part_count()));
    }
    for (i, part) in parts.iter().enumerate().filter(|(_, p)| p.len() > 1) {
        let common = part[1..].iter().fold(inst.lists().list(part[0]).to_vec(), |acc, &v| {
            intersect(&acc, inst.lists().list(v))
        });
        if let Some(c) = common.first() {
            fail(1, format!("colour {c} lies in every list of part {i}"));
        }
    }
    for (condition, detail) in system.numbered_violations(inst) {
        fail(condition, detail);
    }
    if let Some(i) = parts.iter().position(|p| p.len() == 2) {
        fail(3, format!("part {i} has size two"));
    }
    let in_s: HashSet<usize> = system.singletons().collect();
    let extra = inst
        .parts()
        .singletons()
        .into_iter()
        .filter(|v| !in_s.contains(v))
        .count();
    if extra > 3 * k {
        fail(
            3,
            format!("{extra} singleton parts outside the blocks exceed 3k = {}", 3 * k),
        );
    }
    let universe = inst.lists().universe().len();
    if universe >= n {
        fail(5, format!("{universe} colours in total, not fewer than n = {n}"));
    }

    if let Some(v) = (0..n).find(|&v| inst.lists().list(v).len() != c_total) {
        report.hypotheses.push(format!(
            "vertex {v} has {} colours, not C = {c_total}",
            inst.lists().list(v).len()
        ));
    }
    if n as f64 >= (2.0 - delta) * c_total as f64 {
        report.hypotheses.push(format!(
            "n = {n} is not below (2 - delta) C = {:.3}",
            (2.0 - delta) * c_total as f64
        ));
    }
    if system.m as f64 <= 6.0 / delta {
        report
            .hypotheses
            .push(format!("m = {} does not exceed 6/delta = {:.3}", system.m, 6.0 / delta));
    }
    report
}
