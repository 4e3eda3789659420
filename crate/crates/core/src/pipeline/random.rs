use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_lemma3, BicliqueSystem, MultipartiteInstance, PipelineConfig};
use crate::error::{LabError, Result};
use crate::lists::Color;
use crate::matching::{sdr_coloring, SdrWitness};

/// Partition of the parts outside the singleton blocks into big and small
/// ones. `b = 0` means a single process colours every part.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub b: usize,
    /// Part indices, largest first (ties: lower index).
    pub big_parts: Vec<usize>,
    pub small_parts: Vec<usize>,
    /// Why the bracket could not be met, when `b = 0`.
    pub degenerate: Option<String>,
}

impl SplitPlan {
    /// `b = 0`: every part outside the singleton blocks is small and one
    /// uniform process assigns all leftover colours.
    pub fn single_process(inst: &MultipartiteInstance, system: &BicliqueSystem) -> SplitPlan {
        let mut plan = plan_split(inst, system, 0.0);
        plan.degenerate = Some("single process requested".into());
        plan
    }
}

/// Smallest `b` with `b * gap >= delta^2 C / 40`, provided it also keeps
/// `b * gap <= delta^2 C / 20`.
pub fn bracket_b(c: usize, delta: f64, gap: usize) -> Option<usize> {
    if gap == 0 || c == 0 {
        return None;
    }
    let lo = delta * delta * c as f64 / 40.0;
    let hi = delta * delta * c as f64 / 20.0;
    let b = (lo / gap as f64).ceil().max(1.0) as usize;
    ((b * gap) as f64 <= hi).then_some(b)
}

/// Chooses `b` and marks the `b(m - t)` largest parts outside the singleton
/// blocks as big. Falls back to `b = 0` when `m > delta^2 C / 40`,
/// `m - t < delta m`, the bracket is empty or `b > k`.
pub fn plan_split(inst: &MultipartiteInstance, system: &BicliqueSystem, delta: f64) -> SplitPlan {
    let in_s: std::collections::HashSet<usize> = system.singletons().collect();
    let mut outside: Vec<usize> = (0..inst.part_count())
        .filter(|&p| {
            let part = &inst.parts().parts()[p];
            !(part.len() == 1 && in_s.contains(&part[0]))
        })
        .collect();
    outside.sort_by_key(|&p| (std::cmp::Reverse(inst.parts().parts()[p].len()), p));
    let c = system.color_count();
    let (m, t, k) = (system.m, system.t, system.k());
    let gap = m.saturating_sub(t);
    let lo = delta * delta * c as f64 / 40.0;
    let reason = if m as f64 > lo {
        Some(format!("m = {m} exceeds delta^2 C / 40 = {lo:.3}"))
    } else if (gap as f64) < delta * m as f64 {
        Some(format!("m - t = {gap} is below delta m = {:.3}", delta * m as f64))
    } else {
        match bracket_b(c, delta, gap) {
            None => Some(format!("no b puts b(m - t) in [{lo:.3}, {:.3}]", 2.0 * lo)),
            Some(b) if b > k => Some(format!("b = {b} exceeds k = {k}")),
            Some(b) if b * gap > outside.len() => Some(format!("only {} parts outside the blocks", outside.len())),
            Some(_) => None,
        }
    };
    match reason {
        Some(r) => SplitPlan {
            b: 0,
            big_parts: Vec::new(),
            small_parts: outside,
            degenerate: Some(r),
        },
        None => {
            let b = bracket_b(c, delta, gap).expect("checked above");
            let small_parts = outside.split_off(b * gap);
            SplitPlan {
                b,
                big_parts: outside,
                small_parts,
                degenerate: None,
            }
        }
    }
}

/// Outcome of the random choices of one round before the matching step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundSample {
    /// Colour per vertex, `None` for the vertices left to the matching.
    pub colors: Vec<Option<Color>>,
    /// Colour assigned to each part outside the singleton blocks.
    pub part_color: Vec<Option<Color>>,
    /// Uncoloured vertices in increasing order.
    pub v_prime: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma4Report {
    /// `delta^3 C / 80`.
    pub threshold: f64,
    /// Small non-singleton parts with fewer than two vertices whose reduced
    /// list exceeds the threshold.
    pub violating_parts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitWeights {
    /// `W(V' - Big)`.
    pub small_total: f64,
    /// `W(V' ∩ Big)`.
    pub big_total: f64,
    /// `|Big| / C`.
    pub big_expected: f64,
}

/// Weights `w(v) = 1 / |L'(v)|` of one round, `L'(v) = L(v) - C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightDiagnostics {
    pub weights: BTreeMap<usize, f64>,
    pub total: f64,
    pub per_color: BTreeMap<Color, f64>,
    /// `(n - S) / C`, from the instance parameters alone.
    pub expected_total: f64,
    pub hall_witness: Option<Vec<usize>>,
    pub witness_weight: Option<f64>,
    /// `n <= S + C`: the expectation alone guarantees a good round.
    pub fast_path: bool,
    pub lemma4: Lemma4Report,
    pub split: Option<SplitWeights>,
}

/// A round whose matching step failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HallFailure {
    pub round: usize,
    pub vertices: Vec<usize>,
    pub colors: Vec<Color>,
    pub witness_weight: f64,
    pub total_weight: f64,
}

/// Precomputed state for repeated rounds on one instance.
#[derive(Debug, Clone)]
pub struct RandomizedEngine<'a> {
    inst: &'a MultipartiteInstance,
    system: &'a BicliqueSystem,
    plan: &'a SplitPlan,
    delta: f64,
    reduced: Vec<Vec<Color>>,
    big_vertex: Vec<bool>,
    lemma4: Lemma4Report,
}

impl<'a> RandomizedEngine<'a> {
    /// Fails with a precondition error when the part count, singleton
    /// blocks or colour blocks are unusable.
    pub fn new(
        inst: &'a MultipartiteInstance,
        system: &'a BicliqueSystem,
        plan: &'a SplitPlan,
        delta: f64,
    ) -> Result<Self> {
        let hard = check_lemma3(inst, system, delta).hard_violations();
        if !hard.is_empty() {
            return Err(LabError::Precondition(hard));
        }
        let expected_parts = system.color_count() - system.singleton_count();
        if plan.big_parts.len() + plan.small_parts.len() != expected_parts
            || plan.big_parts.len() != plan.b * (system.m - system.t)
        {
            return Err(LabError::Precondition(vec![format!(
                "split plan covers {} + {} parts, expected {expected_parts}",
                plan.big_parts.len(),
                plan.small_parts.len()
            )]));
        }
        let mut in_c = std::collections::HashSet::new();
        in_c.extend(system.colors());
        let reduced: Vec<Vec<Color>> = inst
            .lists()
            .lists()
            .iter()
            .map(|l| l.iter().copied().filter(|c| !in_c.contains(c)).collect())
            .collect();
        let mut big_vertex = vec![false; inst.vertex_count()];
        for &p in &plan.big_parts {
            for &v in &inst.parts().parts()[p] {
                big_vertex[v] = true;
            }
        }
        let threshold = delta.powi(3) * system.color_count() as f64 / 80.0;
        let violating_parts = plan
            .small_parts
            .iter()
            .copied()
            .filter(|&p| {
                let part = &inst.parts().parts()[p];
                part.len() > 1 && part.iter().filter(|&&v| reduced[v].len() as f64 > threshold).count() < 2
            })
            .collect();
        Ok(RandomizedEngine {
            inst,
            system,
            plan,
            delta,
            reduced,
            big_vertex,
            lemma4: Lemma4Report {
                threshold,
                violating_parts,
            },
        })
    }

    pub fn instance(&self) -> &MultipartiteInstance {
        self.inst
    }

    pub fn system(&self) -> &BicliqueSystem {
        self.system
    }

    /// `L'(v)`.
    pub fn reduced_list(&self, v: usize) -> &[Color] {
        &self.reduced[v]
    }

    pub fn weight(&self, v: usize) -> f64 {
        1.0 / self.reduced[v].len() as f64
    }

    /// `(n - S) / C`.
    pub fn expected_total(&self) -> f64 {
        (self.inst.vertex_count() - self.system.singleton_count()) as f64 / self.system.color_count() as f64
    }

    /// The first and second processes: split every colour block, match the
    /// leftover colours with big parts and then with small parts, colour the
    /// singleton blocks and every vertex whose list holds its part's colour.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> RoundSample {
        let (k, t) = (self.system.k(), self.system.t);
        let first: Vec<usize> = if self.plan.b > 0 {
            sample(rng, k, self.plan.b).into_vec()
        } else {
            Vec::new()
        };
        let mut in_first = vec![false; k];
        for &i in &first {
            in_first[i] = true;
        }
        let mut a_blocks: Vec<Vec<Color>> = vec![Vec::new(); k];
        let mut split = |i: usize, rng: &mut R, leftover: &mut Vec<Color>| {
            let mut cs = self.system.color_blocks[i].clone();
            cs.shuffle(rng);
            leftover.extend_from_slice(&cs[t..]);
            cs.truncate(t);
            cs.sort_unstable();
            a_blocks[i] = cs;
        };
        let mut part_color = vec![None; self.inst.part_count()];
        let mut big_colors = Vec::new();
        for &i in &first {
            split(i, rng, &mut big_colors);
        }
        big_colors.shuffle(rng);
        for (&p, &c) in self.plan.big_parts.iter().zip(&big_colors) {
            part_color[p] = Some(c);
        }
        let mut small_colors = Vec::new();
        for i in (0..k).filter(|&i| !in_first[i]) {
            split(i, rng, &mut small_colors);
        }
        small_colors.shuffle(rng);
        for (&p, &c) in self.plan.small_parts.iter().zip(&small_colors) {
            part_color[p] = Some(c);
        }

        let mut colors = vec![None; self.inst.vertex_count()];
        for (block, verts) in a_blocks.iter().zip(&self.system.singleton_blocks) {
            for (&c, &v) in block.iter().zip(verts) {
                colors[v] = Some(c);
            }
        }
        for (p, part) in self.inst.parts().parts().iter().enumerate() {
            if let Some(c) = part_color[p] {
                for &v in part {
                    if self.inst.lists().contains(v, c) {
                        colors[v] = Some(c);
                    }
                }
            }
        }
        let v_prime = (0..colors.len()).filter(|&v| colors[v].is_none()).collect();
        RoundSample {
            colors,
            part_color,
            v_prime,
        }
    }

    /// Matches the uncoloured vertices with distinct colours outside the
    /// blocks. Returns the full colouring or the Hall witness.
    pub fn complete(&self, s: &RoundSample) -> std::result::Result<Vec<Color>, SdrWitness> {
        let out = sdr_coloring(&s.v_prime, |v| &self.reduced[v]);
        match out.colors {
            Some(cs) => {
                let mut colors = s.colors.clone();
                for (&v, c) in s.v_prime.iter().zip(cs) {
                    colors[v] = Some(c);
                }
                Ok(colors.into_iter().map(|c| c.expect("every vertex coloured")).collect())
            }
            None => Err(out.witness.expect("witness accompanies failure")),
        }
    }

    /// `W(V')`.
    pub fn total_weight(&self, s: &RoundSample) -> f64 {
        s.v_prime.iter().map(|&v| self.weight(v)).sum()
    }

    /// `W(V' ∩ {v : c ∈ L'(v)})`.
    pub fn color_weight(&self, s: &RoundSample, c: Color) -> f64 {
        s.v_prime
            .iter()
            .filter(|&&v| self.reduced[v].binary_search(&c).is_ok())
            .map(|&v| self.weight(v))
            .sum()
    }

    /// `W(V'' ∩ {v : c ∈ L'(v), |L'(v)| >= n / ln n})`, with `V''` the
    /// uncoloured vertices outside big parts.
    pub fn tail_statistic(&self, s: &RoundSample, c: Color) -> f64 {
        let n = self.inst.vertex_count() as f64;
        let floor = n / n.ln();
        s.v_prime
            .iter()
            .filter(|&&v| {
                !self.big_vertex[v]
                    && self.reduced[v].len() as f64 >= floor
                    && self.reduced[v].binary_search(&c).is_ok()
            })
            .map(|&v| self.weight(v))
            .sum()
    }

    fn round_rng(seed: u64, round: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(round as u64);
        rng
    }

    /// Samples round `round` of the stream determined by `seed`.
    pub fn sample_round(&self, seed: u64, round: usize) -> RoundSample {
        self.sample(&mut Self::round_rng(seed, round))
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// Diagnostics of one executed round; `witness` is the Hall witness when
/// the matching step failed.
pub fn weight_report(engine: &RandomizedEngine, s: &RoundSample, witness: Option<&SdrWitness>) -> WeightDiagnostics {
    let weights: BTreeMap<usize, f64> = s.v_prime.iter().map(|&v| (v, engine.weight(v))).collect();
    let total = weights.values().sum();
    let mut per_color: BTreeMap<Color, f64> = BTreeMap::new();
    for &v in &s.v_prime {
        for &c in engine.reduced_list(v) {
            *per_color.entry(c).or_insert(0.0) += engine.weight(v);
        }
    }
    let inst = engine.instance();
    let system = engine.system();
    let split = (engine.plan.b > 0).then(|| {
        let big_total = s
            .v_prime
            .iter()
            .filter(|&&v| engine.big_vertex[v])
            .map(|&v| engine.weight(v))
            .sum::<f64>();
        let big_size = engine.big_vertex.iter().filter(|&&b| b).count();
        SplitWeights {
            small_total: total - big_total,
            big_total,
            big_expected: big_size as f64 / system.color_count() as f64,
        }
    });
    WeightDiagnostics {
        weights,
        total,
        per_color,
        expected_total: engine.expected_total(),
        hall_witness: witness.map(|w| w.vertices.clone()),
        witness_weight: witness.map(|w| w.vertices.iter().map(|&v| engine.weight(v)).sum()),
        fast_path: inst.vertex_count() <= system.singleton_count() + system.color_count(),
        lemma4: engine.lemma4.clone(),
        split,
    }
}

/// Result of the retry loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetryOutcome {
    pub coloring: Option<Vec<Color>>,
    /// Rounds executed up to and including the successful one.
    pub rounds: usize,
    pub hall_failures: Vec<HallFailure>,
    /// Diagnostics of the last executed round.
    pub diagnostics: WeightDiagnostics,
}

/// Runs rounds `0, 1, ...` with independent streams derived from
/// `config.seed` until one completes or `config.retry_limit` rounds fail.
/// Rounds may be evaluated in parallel batches; the reported success is
/// always the lowest successful round, so the outcome does not depend on
/// scheduling.
///
/// Every failure must carry a Hall witness of weight above one; anything
/// else is reported as an internal inconsistency.
pub fn run_randomized_coloring(
    inst: &MultipartiteInstance,
    system: &BicliqueSystem,
    plan: &SplitPlan,
    config: &PipelineConfig,
) -> Result<RetryOutcome> {
    let engine = RandomizedEngine::new(inst, system, plan, config.delta())?;
    let batch = if config.parallel { 64 } else { 1 };
    let run = |r: usize| {
        let s = engine.sample_round(config.seed, r);
        let done = engine.complete(&s);
        (r, s, done)
    };
    let mut failures = Vec::new();
    let mut start = 0;
    let mut last = None;
    while start < config.retry_limit {
        let end = (start + batch).min(config.retry_limit);
        let results: Vec<_> = if config.parallel {
            (start..end).into_par_iter().map(run).collect()
        } else {
            (start..end).map(run).collect()
        };
        for (r, s, done) in results {
            match done {
                Ok(colors) => {
                    return Ok(RetryOutcome {
                        coloring: Some(colors),
                        rounds: r + 1,
                        hall_failures: failures,
                        diagnostics: weight_report(&engine, &s, None),
                    });
                }
                Err(w) => {
                    let witness_weight: f64 = w.vertices.iter().map(|&v| engine.weight(v)).sum();
                    if witness_weight.partial_cmp(&1.0) != Some(std::cmp::Ordering::Greater) {
                        return Err(LabError::InternalInconsistency {
                            message: format!("Hall witness of round {r} has weight {witness_weight}, not above 1"),
                            state: serde_json::to_string(&w)?,
                        });
                    }
                    failures.push(HallFailure {
                        round: r,
                        vertices: w.vertices.clone(),
                        colors: w.colors.clone(),
                        witness_weight,
                        total_weight: engine.total_weight(&s),
                    });
                    last = Some((s, w));
                }
            }
        }
        start = end;
    }
    let (s, w) = last.expect("retry_limit is positive");
    Ok(RetryOutcome {
        coloring: None,
        rounds: config.retry_limit,
        hall_failures: failures,
        diagnostics: weight_report(&engine, &s, Some(&w)),
    })
}
