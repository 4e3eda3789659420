use std::collections::BTreeMap;

use ohba_lab::lab::{lemma3, random_multipartite, Lemma3Params, RandomMultipartiteParams};
use ohba_lab::lists::{verify_coloring, Coloring};
use ohba_lab::pipeline::{
    extract_bicliques, plan_split, remove_common_color_parts, solve_via_theorem1, MultipartiteInstance, PipelineConfig,
    RandomizedEngine,
};
use proptest::prelude::*;

fn generated(seed: u64) -> (MultipartiteInstance, ohba_lab::pipeline::BicliqueSystem) {
    let f = lemma3(Lemma3Params {
        c: 60,
        m: 10,
        t: 6,
        delta: 0.5,
        seed,
        n: None,
    })
    .unwrap();
    (f.multipartite().unwrap(), f.planted.unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn successful_rounds_respect_part_colours(seed in any::<u64>(), round in 0usize..1000) {
        let (inst, system) = generated(seed % 1000);
        let plan = plan_split(&inst, &system, 0.5);
        let engine = RandomizedEngine::new(&inst, &system, &plan, 0.5).unwrap();
        let s = engine.sample_round(seed, round);
        let Ok(colors) = engine.complete(&s) else { return Ok(()) };
        let coloring = Coloring(colors.clone());
        prop_assert!(verify_coloring(inst.graph(), inst.lists(), &coloring).unwrap().is_acceptable());

        let part_colors: Vec<u32> = s.part_color.iter().flatten().copied().collect();
        let mut users: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (v, &c) in colors.iter().enumerate() {
            users.entry(c).or_default().push(v);
        }
        for (c, vs) in &users {
            if part_colors.contains(c) {
                let part = inst.parts().part_of(vs[0]);
                prop_assert!(vs.iter().all(|&v| inst.parts().part_of(v) == part));
                prop_assert_eq!(s.part_color[part], Some(*c));
            } else {
                prop_assert_eq!(vs.len(), 1, "colour {} outside the part colours used {} times", c, vs.len());
            }
        }
        for (v, c) in s.colors.iter().enumerate() {
            prop_assert_eq!(c.is_none(), s.v_prime.binary_search(&v).is_ok());
        }
    }

    #[test]
    fn common_colour_removal_leaves_no_shared_colour(seed in any::<u64>(), parts in 2usize..10, list in 2usize..5) {
        let f = random_multipartite(RandomMultipartiteParams { parts, max_part_size: 4, list_size: list, universe: list + 3 }, seed).unwrap();
        let inst = f.multipartite().unwrap();
        let (reduction, removals) = remove_common_color_parts(&inst);
        let mut used = Vec::new();
        for r in &removals {
            let part = &r.part;
            prop_assert!(part.len() >= 2);
            prop_assert!(part.iter().all(|&v| inst.lists().contains(v, r.color)));
            prop_assert!(!used.contains(&r.color));
            used.push(r.color);
        }
        if let Some(red) = reduction {
            let reduced = &red.reduced;
            for part in reduced.parts().parts().iter().filter(|p| p.len() >= 2) {
                let first = reduced.lists().list(part[0]);
                prop_assert!(first.iter().all(|&c| !part.iter().all(|&v| reduced.lists().contains(v, c))));
            }
            for (v, &o) in red.origin.iter().enumerate() {
                let kept = reduced.lists().list(v);
                prop_assert!(kept.iter().all(|&c| inst.lists().contains(o, c) && !used.contains(&c)));
            }
        }
    }

    #[test]
    fn extracted_blocks_are_bicliques(seed in 0u64..1000, t in 6usize..=8) {
        let (inst, _) = generated(seed);
        let system = extract_bicliques(&inst, 10, t).system;
        prop_assert!(system.violations(&inst).is_empty());
        let mut seen_c = Vec::new();
        let mut seen_s = Vec::new();
        for (block, singles) in system.color_blocks.iter().zip(&system.singleton_blocks) {
            prop_assert_eq!(block.len(), 10);
            prop_assert_eq!(singles.len(), t);
            for &s in singles {
                prop_assert_eq!(inst.parts().parts()[inst.parts().part_of(s)].len(), 1);
                prop_assert!(block.iter().all(|&c| inst.lists().contains(s, c)));
            }
            seen_c.extend(block.iter().copied());
            seen_s.extend(singles.iter().copied());
        }
        let (nc, ns) = (seen_c.len(), seen_s.len());
        seen_c.sort_unstable();
        seen_c.dedup();
        seen_s.sort_unstable();
        seen_s.dedup();
        prop_assert_eq!((seen_c.len(), seen_s.len()), (nc, ns));
    }
}

#[test]
fn extraction_recovers_planted_blocks() {
    for seed in 0..50 {
        let (inst, planted) = generated(seed);
        let found = extract_bicliques(&inst, planted.m, planted.t).system;
        assert!(
            found.k() + 1 >= planted.k(),
            "seed {seed}: {} of {} blocks",
            found.k(),
            planted.k()
        );
    }
}

#[test]
fn pipeline_is_reproducible() {
    let (inst, _) = generated(7);
    let config = PipelineConfig {
        seed: 11,
        ..PipelineConfig::default()
    };
    let a = solve_via_theorem1(inst.graph(), inst.lists(), &config).unwrap();
    let b = solve_via_theorem1(
        inst.graph(),
        inst.lists(),
        &PipelineConfig {
            parallel: false,
            ..config
        },
    )
    .unwrap();
    assert_eq!(a.without_timings(), b.without_timings());
    assert!(verify_coloring(inst.graph(), inst.lists(), &a.coloring)
        .unwrap()
        .is_acceptable());
}

/// Per-colour means of `W(V')` against `1 - delta/2` plus three standard
/// errors, on instances inside the generator's regime.
#[test]
fn per_colour_weight_means_stay_below_bound() {
    let trials = 2000;
    for seed in 0..3 {
        let (inst, system) = generated(seed);
        let plan = plan_split(&inst, &system, 0.5);
        let engine = RandomizedEngine::new(&inst, &system, &plan, 0.5).unwrap();
        let rounds: Vec<_> = (0..trials).map(|r| engine.sample_round(seed, r)).collect();
        for &c in inst.lists().universe() {
            let xs: Vec<f64> = rounds.iter().map(|s| engine.color_weight(s, c)).collect();
            let mean = xs.iter().sum::<f64>() / trials as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
            let se = (var / trials as f64).sqrt();
            assert!(mean <= 0.75 + 3.0 * se, "seed {seed} colour {c}: mean {mean} se {se}");
        }
    }
}

#[test]
fn bad_witness_is_reported_as_counterexample_candidate() {
    use ohba_lab::choose::find_bad_assignment;
    use ohba_lab::graph::complete_multipartite;
    use ohba_lab::LabError;
    let (g, _) = complete_multipartite(&[2, 4]).unwrap();
    let bad = find_bad_assignment(&g, 2, 10_000, 0).unwrap().unwrap();
    match solve_via_theorem1(&g, &bad, &PipelineConfig::default()) {
        Err(LabError::CounterexampleCandidate { state }) => {
            let v: serde_json::Value = serde_json::from_str(&state).unwrap();
            assert!(v.is_object());
        }
        other => panic!("expected a counterexample candidate, got {other:?}"),
    }
}
