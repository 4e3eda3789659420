mod common;

use ohba_lab::compress::{compress_universe, replay_trace, BadnessCheck};
use ohba_lab::graph::{complete_multipartite, Graph};
use ohba_lab::lists::{Color, ListAssignment};
use proptest::prelude::*;

/// A bad core (graph, lists) on vertices `0..n`.
fn core(kind: usize) -> (Vec<(usize, usize)>, usize, Vec<Vec<Color>>) {
    match kind {
        0 => {
            let (g, _) = complete_multipartite(&[3, 3]).unwrap();
            let side = [vec![1, 2], vec![1, 3], vec![2, 3]];
            (g.edges(), 6, side.iter().chain(side.iter()).cloned().collect())
        }
        1 => (Graph::cycle(5).unwrap().edges(), 5, vec![vec![0, 1]; 5]),
        _ => (Graph::complete(4).unwrap().edges(), 4, vec![vec![0, 1, 2]; 4]),
    }
}

/// Bad core plus pendant vertices with fresh colours, then a random
/// injective relabelling of every colour.
fn inflated() -> impl Strategy<Value = (Graph, ListAssignment)> {
    (
        0usize..3,
        prop::collection::vec((prop::collection::btree_set(0u32..12, 1..=3), any::<bool>()), 1..=4),
        any::<u64>(),
    )
        .prop_map(|(kind, extras, shuffle)| {
            let (mut edges, n0, mut lists) = core(kind);
            for (i, (fresh, attach)) in extras.into_iter().enumerate() {
                let v = n0 + i;
                if attach {
                    edges.push((0, v));
                }
                lists.push(fresh.into_iter().map(|c| 100 + c).collect());
            }
            let n = lists.len();
            // affine relabelling c -> a*c + b with odd a is injective
            let a = (shuffle % 7) as u32 * 2 + 1;
            let b = (shuffle >> 8) as u32 % 50;
            let lists: Vec<Vec<Color>> = lists
                .into_iter()
                .map(|l| l.into_iter().map(|c| a * c + b).collect())
                .collect();
            (Graph::new(n, &edges).unwrap(), ListAssignment::new(lists).unwrap())
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn compression_ends_below_vertex_count_and_stays_bad((g, lists) in inflated()) {
        let n = g.vertex_count();
        prop_assert!(!common::colorable_by_product(&g, lists.lists()));
        let (out, trace) = compress_universe(&g, &lists).unwrap();
        prop_assert!(out.universe().len() < n);
        prop_assert!(!common::colorable_by_product(&g, out.lists()));
        prop_assert_eq!(trace.badness, BadnessCheck::Exhaustive);
        let initial = lists.universe().len();
        prop_assert!(trace.steps.len() <= (initial + 1).saturating_sub(n));

        // independent re-application of every step
        let mut cur: Vec<Vec<Color>> = lists.lists().to_vec();
        let mut universe = initial;
        for step in &trace.steps {
            let b = &step.deficient_colors;
            for v in (0..n).filter(|v| !step.replaced.contains(v)) {
                prop_assert!(cur[v].iter().all(|c| !b.contains(c)));
            }
            prop_assert!(!step.replaced.contains(&step.donor));
            let donor = cur[step.donor].clone();
            for &v in &step.replaced {
                cur[v] = donor.clone();
            }
            let mut u: Vec<Color> = cur.iter().flatten().copied().collect();
            u.sort_unstable();
            u.dedup();
            prop_assert!(u.len() < universe);
            universe = u.len();
        }
        prop_assert_eq!(&cur, out.lists());
        prop_assert_eq!(replay_trace(&trace).unwrap(), out);
    }
}
