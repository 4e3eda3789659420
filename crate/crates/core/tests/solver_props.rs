mod common;

use ohba_lab::choose::{chi_list_exact, is_choosable, ChoosabilityOptions};
use ohba_lab::graph::{chromatic_number_exact, Graph};
use ohba_lab::lists::{verify_coloring, ListAssignment};
use ohba_lab::solver::find_acceptable_coloring;
use proptest::prelude::*;

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
            let edges: Vec<(usize, usize)> = pairs
                .into_iter()
                .zip(bits)
                .filter(|&(_, b)| b)
                .map(|(e, _)| e)
                .collect();
            Graph::new(n, &edges).unwrap()
        })
    })
}

fn graph_with_lists() -> impl Strategy<Value = (Graph, Vec<Vec<u32>>)> {
    graph(6).prop_flat_map(|g| {
        let n = g.vertex_count();
        (
            Just(g),
            prop::collection::vec(prop::collection::btree_set(0u32..4, 1..=3), n)
                .prop_map(|v| v.into_iter().map(|s| s.into_iter().collect()).collect()),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn solver_agrees_with_product_enumeration((g, lists) in graph_with_lists()) {
        let la = ListAssignment::new(lists.clone()).unwrap();
        let found = find_acceptable_coloring(&g, &la).unwrap();
        prop_assert_eq!(found.is_some(), common::colorable_by_product(&g, &lists));
        if let Some(c) = found {
            prop_assert!(verify_coloring(&g, &la, &c).unwrap().is_acceptable());
        }
    }

    #[test]
    fn enlarging_lists_keeps_colourability((g, lists) in graph_with_lists(), extra in prop::collection::vec(0u32..6, 6)) {
        let small = ListAssignment::new(lists.clone()).unwrap();
        let big: Vec<Vec<u32>> = lists.iter().zip(&extra).map(|(l, &c)| {
            let mut l = l.clone();
            l.push(c);
            l.sort_unstable();
            l.dedup();
            l
        }).collect();
        let big = ListAssignment::new(big).unwrap();
        if find_acceptable_coloring(&g, &small).unwrap().is_some() {
            prop_assert!(find_acceptable_coloring(&g, &big).unwrap().is_some());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn choosability_matches_enumeration_over_wider_universe(g in graph(4), k in 1usize..=3) {
        let n = g.vertex_count();
        let lib = is_choosable(&g, k, &ChoosabilityOptions::default()).unwrap();
        // the library restricts to n - 1 colours; the oracle does not
        prop_assert_eq!(lib.choosable, common::choosable_by_enumeration(&g, k, (n + 1).max(k)));
        if let Some(w) = lib.witness {
            prop_assert!(w.lists().iter().all(|l| l.len() == k));
            prop_assert!(!common::colorable_by_product(&g, w.lists()));
        }
    }

    #[test]
    fn choosability_is_monotone_in_k(g in graph(5), k in 1usize..=3) {
        let opts = ChoosabilityOptions::default();
        if is_choosable(&g, k, &opts).unwrap().choosable {
            prop_assert!(is_choosable(&g, k + 1, &opts).unwrap().choosable);
        }
    }

    #[test]
    fn canonical_pruning_does_not_change_verdicts(g in graph(5)) {
        let pruned = ChoosabilityOptions::default();
        let plain = ChoosabilityOptions { canonical_colors: false, vertex_symmetry: false, ..pruned };
        let a = is_choosable(&g, 2, &pruned).unwrap();
        let b = is_choosable(&g, 2, &plain).unwrap();
        prop_assert_eq!(a.choosable, b.choosable);
        prop_assert!(a.assignments_checked <= b.assignments_checked);
    }

    #[test]
    fn chromatic_at_most_list_chromatic(g in graph(5)) {
        let r = chi_list_exact(&g, &ChoosabilityOptions::default()).unwrap();
        let (chi, coloring) = chromatic_number_exact(&g, 16).unwrap();
        prop_assert_eq!(chi, common::chromatic_by_enumeration(&g));
        prop_assert_eq!(coloring.class_count(), chi);
        prop_assert_eq!(r.chromatic_number, chi);
        prop_assert!(chi <= r.list_chromatic_number);
        let max_degree = (0..g.vertex_count()).map(|v| g.degree(v)).max().unwrap();
        prop_assert!(r.list_chromatic_number <= max_degree + 1);
    }
}
