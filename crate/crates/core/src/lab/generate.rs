use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::instance::{InstanceFile, Metadata};
use crate::error::{LabError, Result};
use crate::lists::{Color, ListAssignment};
use crate::pipeline::{check_lemma3, BicliqueSystem, MultipartiteInstance};

/// `K_{3,3}` with the lists `{1,2}, {1,3}, {2,3}` on both sides, which
/// admit no acceptable colouring.
pub fn k33() -> InstanceFile {
    let side = [vec![1, 2], vec![1, 3], vec![2, 3]];
    let lists = ListAssignment::new(side.iter().chain(side.iter()).cloned().collect()).expect("nonempty lists");
    let inst = MultipartiteInstance::complete(&[3, 3], lists).expect("sizes match");
    InstanceFile::from_multipartite(&inst, Metadata::new("k33"))
}

fn uniform_instance(sizes: &[usize], k: usize, name: &str) -> Result<InstanceFile> {
    let n = sizes.iter().sum();
    let inst = MultipartiteInstance::complete(sizes, ListAssignment::uniform(n, k)?)?;
    Ok(InstanceFile::from_multipartite(
        &inst,
        Metadata::new(name).param("k", k),
    ))
}

/// `k` parts of size two, every list `0..k`.
pub fn erdos_parts2(k: usize) -> Result<InstanceFile> {
    if k == 0 {
        return Err(LabError::invalid("k must be positive"));
    }
    uniform_instance(&vec![2; k], k, "erdos_parts2")
}

/// `k - 1` parts of size two and one of size four, every list `0..k`.
pub fn ohba_counterexample(k: usize) -> Result<InstanceFile> {
    if k < 2 {
        return Err(LabError::invalid("k must be at least 2"));
    }
    let mut sizes = vec![2; k - 1];
    sizes.push(4);
    uniform_instance(&sizes, k, "ohba_counterexample")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomMultipartiteParams {
    pub parts: usize,
    pub max_part_size: usize,
    pub list_size: usize,
    pub universe: usize,
}

/// Part sizes uniform in `1..=max_part_size`, lists uniform `list_size`
/// subsets of `0..universe`.
pub fn random_multipartite(params: RandomMultipartiteParams, seed: u64) -> Result<InstanceFile> {
    let RandomMultipartiteParams {
        parts,
        max_part_size,
        list_size,
        universe,
    } = params;
    if parts == 0 || max_part_size == 0 || list_size == 0 || list_size > universe {
        return Err(LabError::invalid(
            "need parts, max_part_size, list_size >= 1 and list_size <= universe",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sizes: Vec<usize> = (0..parts).map(|_| rng.gen_range(1..=max_part_size)).collect();
    let n = sizes.iter().sum();
    let lists = (0..n)
        .map(|_| {
            sample(&mut rng, universe, list_size)
                .iter()
                .map(|c| c as Color)
                .collect()
        })
        .collect();
    let inst = MultipartiteInstance::complete(&sizes, ListAssignment::new(lists)?)?;
    let meta = Metadata {
        seed: Some(seed),
        ..Metadata::new("random_multipartite")
    }
    .param("parts", parts)
    .param("max_part_size", max_part_size)
    .param("list_size", list_size)
    .param("universe", universe);
    Ok(InstanceFile::from_multipartite(&inst, meta))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma3Params {
    pub c: usize,
    pub m: usize,
    pub t: usize,
    pub delta: f64,
    pub seed: u64,
    /// Vertex count; chosen automatically when absent.
    pub n: Option<usize>,
}

/// Shape of a generated instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma3Layout {
    pub n: usize,
    pub k: usize,
    pub s: usize,
    pub extra_singletons: usize,
    /// Sizes of the parts with at least three vertices.
    pub part_sizes: Vec<usize>,
    /// Colours `0..universe` are used; `universe = n - 1`.
    pub universe: usize,
}

fn layout_for(c: usize, k: usize, s: usize, n: usize) -> Option<Lemma3Layout> {
    let outside = c - s;
    if n <= c + 1 || n < s + outside {
        return None;
    }
    let universe = n - 1;
    (0..=(3 * k).min(outside)).find_map(|extra| {
        let a = outside - extra;
        let rest = n.checked_sub(s + extra)?;
        if a == 0 {
            return (rest == 0).then(|| Lemma3Layout {
                n,
                k,
                s,
                extra_singletons: extra,
                part_sizes: Vec::new(),
                universe,
            });
        }
        let small = rest / a;
        // a part of size p with lists of size C from `universe` colours can
        // avoid a common colour only if p (universe - C) >= universe
        if small < 3 || small * (universe - c) < universe {
            return None;
        }
        let mut sizes = vec![small; a];
        for size in sizes.iter_mut().take(rest % a) {
            *size += 1;
        }
        Some(Lemma3Layout {
            n,
            k,
            s,
            extra_singletons: extra,
            part_sizes: sizes,
            universe,
        })
    })
}

/// Picks part sizes for a generated instance. Among layouts with `n`
/// vertices the one with the fewest extra singletons wins. Without an
/// explicit `n`, the smallest feasible `n >= S + 2(C - S)` is used, or the
/// largest feasible one below it.
pub fn lemma3_layout(c: usize, m: usize, t: usize, delta: f64, n: Option<usize>) -> Result<Lemma3Layout> {
    if m == 0 || t == 0 || c == 0 {
        return Err(LabError::invalid("C, m and t must be positive"));
    }
    if !c.is_multiple_of(m) {
        return Err(LabError::invalid(format!(
            "condition 4: C = {c} is not a multiple of m = {m}"
        )));
    }
    if !(2 * t > m && t + 2 <= m) {
        return Err(LabError::invalid(format!("t = {t} outside (m/2, m-2] for m = {m}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(LabError::invalid(format!("delta = {delta} outside (0, 1)")));
    }
    let k = c / m;
    let s = k * t;
    let bound = (2.0 - delta) * c as f64;
    let below = |n: usize| (n as f64) < bound;
    match n {
        Some(n) => {
            if !below(n) {
                return Err(LabError::invalid(format!(
                    "n = {n} is not below (2 - delta) C = {bound}"
                )));
            }
            layout_for(c, k, s, n).ok_or_else(|| {
                LabError::invalid(format!(
                    "no layout with {n} vertices satisfies conditions 1, 3 and 5 with lists of size C = {c}"
                ))
            })
        }
        None => {
            let anchor = s + 2 * (c - s);
            let mut top = bound.ceil() as usize;
            while top > 0 && !below(top) {
                top -= 1;
            }
            (anchor..=top)
                .find_map(|n| layout_for(c, k, s, n))
                .or_else(|| (0..anchor.min(top + 1)).rev().find_map(|n| layout_for(c, k, s, n)))
                .ok_or_else(|| {
                    LabError::invalid(format!(
                        "no vertex count below (2 - delta) C = {bound} admits conditions 1, 3 and 5"
                    ))
                })
        }
    }
}

fn random_subset(rng: &mut ChaCha8Rng, pool: &[Color], size: usize) -> Vec<Color> {
    sample(rng, pool.len(), size).iter().map(|i| pool[i]).collect()
}

/// Instance with planted blocks satisfying the five conditions with lists
/// of size exactly `C`.
///
/// Colours `0..C` form the blocks `C_i = [im, (i+1)m)`; the remaining
/// colours up to `n - 1` are free. Vertices are numbered block singletons
/// first (`S_i = [it, (i+1)t)`), then extra singletons, then the larger
/// parts. A block singleton gets `C_i` plus random colours; an extra
/// singleton gets a random list; in a larger part the missing colours of
/// its vertices are chosen to cover every colour, so no colour is common to
/// the part.
pub fn lemma3(params: Lemma3Params) -> Result<InstanceFile> {
    let Lemma3Params {
        c,
        m,
        t,
        delta,
        seed,
        n,
    } = params;
    let layout = lemma3_layout(c, m, t, delta, n)?;
    let k = layout.k;
    let universe: Vec<Color> = (0..layout.universe as Color).collect();
    let missing = layout.universe - c;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lists: Vec<Vec<Color>> = Vec::with_capacity(layout.n);
    let color_blocks: Vec<Vec<Color>> = (0..k)
        .map(|i| ((i * m) as Color..((i + 1) * m) as Color).collect())
        .collect();
    for block in &color_blocks {
        let pool: Vec<Color> = universe.iter().copied().filter(|c| !block.contains(c)).collect();
        for _ in 0..t {
            let mut l = block.clone();
            l.extend(random_subset(&mut rng, &pool, c - m));
            lists.push(l);
        }
    }
    for _ in 0..layout.extra_singletons {
        lists.push(random_subset(&mut rng, &universe, c));
    }
    for &size in &layout.part_sizes {
        let mut perm = universe.clone();
        perm.shuffle(&mut rng);
        for j in 0..size {
            let mut out: Vec<Color> = perm.iter().skip(j).step_by(size).copied().collect();
            let pool: Vec<Color> = universe.iter().copied().filter(|c| !out.contains(c)).collect();
            let pad = missing - out.len();
            out.extend(random_subset(&mut rng, &pool, pad));
            lists.push(universe.iter().copied().filter(|c| !out.contains(c)).collect());
        }
    }
    let mut sizes = vec![1; layout.s + layout.extra_singletons];
    sizes.extend(&layout.part_sizes);
    let inst = MultipartiteInstance::complete(&sizes, ListAssignment::new(lists)?)?;
    let system = BicliqueSystem {
        m,
        t,
        color_blocks,
        singleton_blocks: (0..k).map(|i| (i * t..(i + 1) * t).collect()).collect(),
    };
    let report = check_lemma3(&inst, &system, delta);
    if !report.all_conditions_hold() {
        return Err(LabError::InternalInconsistency {
            message: "generated instance violates a condition".into(),
            state: serde_json::to_string(&report)?,
        });
    }
    let meta = Metadata {
        seed: Some(seed),
        warnings: report.hypotheses,
        ..Metadata::new("lemma3")
    }
    .param("C", c)
    .param("m", m)
    .param("t", t)
    .param("delta", delta)
    .param("n", layout.n)
    .param("k", k)
    .param("S", layout.s)
    .param("extra_singletons", layout.extra_singletons);
    let mut file = InstanceFile::from_multipartite(&inst, meta);
    file.planted = Some(system);
    Ok(file)
}
