use proptest::prelude::*;

use mids_core::csp::{self, Constraint, CspInstance, Literal};
use mids_core::instances::gen_clique_union;
use mids_core::oracle::{check_ids, exhaustive_mids};

fn instance() -> impl Strategy<Value = CspInstance> {
    prop::collection::vec(1usize..=4, 1..=7).prop_flat_map(|sizes| {
        let n = sizes.len();
        let literal = (0..n, 0u8..4).prop_map(|(v, x)| (v, x));
        let constraint = prop::collection::vec(literal, 1..=4);
        let s = sizes.clone();
        prop::collection::vec(constraint, 0..=2 * n).prop_map(move |cs| {
            let constraints = cs
                .into_iter()
                .map(|lits| {
                    Constraint::new(
                        lits.into_iter()
                            .map(|(v, x)| Literal::new(v, x % s[v] as u8)),
                    )
                })
                .collect();
            CspInstance::new(&s, constraints).unwrap()
        })
    })
}

fn assignments(instance: &CspInstance) -> Vec<Vec<u8>> {
    instance.domains().iter().fold(vec![Vec::new()], |acc, d| {
        acc.into_iter()
            .flat_map(|prefix| {
                d.values().map(move |v| {
                    let mut next = prefix.clone();
                    next.push(v);
                    next
                })
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn split_preserves_the_solution_set(inst in instance()) {
        let original: Vec<Vec<u8>> = assignments(&inst)
            .into_iter()
            .filter(|a| inst.is_solution(a))
            .collect();
        let parts = csp::split_to_binary(&inst);
        prop_assert!(parts.iter().all(|p| p.domains().iter().all(|d| d.len() <= 2)));
        // every solution lies in exactly one part, and parts add none
        let mut from_parts: Vec<Vec<u8>> = parts
            .iter()
            .flat_map(|p| assignments(p).into_iter().filter(|a| p.is_solution(a)).collect::<Vec<_>>())
            .collect();
        from_parts.sort();
        let mut expected = original.clone();
        expected.sort();
        prop_assert_eq!(from_parts, expected);
    }

    #[test]
    fn binary_solver_is_complete(inst in instance()) {
        let satisfiable = assignments(&inst).iter().any(|a| inst.is_solution(a));
        let mut found = false;
        for part in csp::split_to_binary(&inst) {
            if let Some(a) = csp::solve_binary(&part).unwrap() {
                prop_assert!(part.is_solution(&a));
                prop_assert!(inst.is_solution(&a));
                found = true;
            }
        }
        prop_assert_eq!(found, satisfiable);
    }

    #[test]
    fn endgame_matches_exhaustive(free in 0usize..=12, marked in 0usize..=6, seed: u64) {
        let g = gen_clique_union(free, marked, seed);
        let got = csp::solve_clique_union(&g).unwrap();
        prop_assert_eq!(got.size(), exhaustive_mids(&g).unwrap().size());
        if let Some(w) = got.witness() {
            prop_assert!(check_ids(&g, w));
        }
    }
}
