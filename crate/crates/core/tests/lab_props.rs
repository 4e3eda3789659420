use ohba_lab::lab::{
    erdos_parts2, k33, lemma3, montecarlo_color_tail, montecarlo_expected_weight, ohba_counterexample,
    random_multipartite, InstanceFile, Lemma3Params, RandomMultipartiteParams, Threshold,
};
use ohba_lab::pipeline::check_lemma3;
use proptest::prelude::*;
use rayon::prelude::*;

fn params(seed: u64) -> Lemma3Params {
    Lemma3Params {
        c: 60,
        m: 10,
        t: 6,
        delta: 0.5,
        seed,
        n: None,
    }
}

fn reserialises_identically(f: &InstanceFile) -> bool {
    let text = f.to_json().unwrap();
    let back = InstanceFile::from_json(&text).unwrap();
    back == *f && back.to_json().unwrap() == text
}

#[test]
fn generator_passes_condition_checker_on_1000_seeds() {
    let failures: Vec<u64> = (0..1000u64)
        .into_par_iter()
        .filter(|&seed| {
            let f = lemma3(params(seed)).unwrap();
            let inst = f.multipartite().unwrap();
            let sizes = inst.parts().sizes();
            let report = check_lemma3(&inst, f.planted.as_ref().unwrap(), 0.5);
            !(report.all_conditions_hold()
                && sizes.iter().all(|&s| s == 1 || s >= 3)
                && inst.lists().universe().len() < inst.vertex_count())
        })
        .collect();
    assert!(failures.is_empty(), "seeds failing the checker: {failures:?}");
}

#[test]
fn fixed_generators_round_trip() {
    let mut files = vec![k33()];
    for k in 2..6 {
        files.push(erdos_parts2(k).unwrap());
        files.push(ohba_counterexample(k).unwrap());
    }
    assert!(files.iter().all(reserialises_identically));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn generated_instances_round_trip(seed in any::<u64>(), parts in 1usize..12, size in 1usize..5, list in 1usize..6, extra in 0usize..6) {
        let f = random_multipartite(RandomMultipartiteParams { parts, max_part_size: size, list_size: list, universe: list + extra }, seed).unwrap();
        prop_assert!(reserialises_identically(&f));
        let g = lemma3(params(seed)).unwrap();
        prop_assert!(reserialises_identically(&g));
    }

    #[test]
    fn reports_recompute_from_their_values(seed in any::<u64>(), trials in 2usize..300) {
        let f = lemma3(params(seed % 100)).unwrap();
        let inst = f.multipartite().unwrap();
        let sys = f.planted.unwrap();
        let w = montecarlo_expected_weight(&inst, &sys, trials, seed).unwrap();
        prop_assert!(w.is_consistent());
        let back: ohba_lab::lab::ExperimentReport = serde_json::from_str(&serde_json::to_string(&w).unwrap()).unwrap();
        prop_assert!(back.is_consistent());
        let tail = montecarlo_color_tail(&inst, &sys, sys.color_blocks[0][0], Threshold::MeanPlus(0.025), trials, seed, 0.5).unwrap();
        prop_assert!(tail.is_consistent());
    }
}

#[test]
fn tail_thresholds_at_the_extremes() {
    let f = lemma3(params(1)).unwrap();
    let inst = f.multipartite().unwrap();
    let sys = f.planted.unwrap();
    let c = sys.color_blocks[0][0];
    let hi = montecarlo_color_tail(&inst, &sys, c, Threshold::Absolute(f64::INFINITY), 500, 1, 0.5).unwrap();
    assert_eq!(hi.tail.unwrap().frequency, 0.0);
    let lo = montecarlo_color_tail(&inst, &sys, c, Threshold::Absolute(-1.0), 500, 1, 0.5).unwrap();
    assert_eq!(lo.tail.unwrap().frequency, 1.0);
}
