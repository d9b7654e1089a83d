use proptest::prelude::*;

use mids_core::analysis::{
    audit_weights, branching_factor, csp_endgame_base, measure, optimize_weights, Catalog, Delta,
    GridSchedule, Recurrence, WeightVector,
};
use mids_core::instances::{gen_random, mark_random};

/// The recurrences re-typed from the proof, independent of the asset and
/// its parser: (label, [(copies, a, b, c)]).
type Row = (&'static str, &'static [(u32, i32, i32, i32)]);

const TABLE: &[Row] = &[
    ("2", &[(6, 0, 0, 6)]),
    ("3", &[(1, 0, 0, 5), (1, 0, 0, 1)]),
    ("6", &[(2, 2, 1, 0)]),
    ("7.1", &[(1, 1, 2, 1), (1, -1, 2, 1)]),
    ("7.2", &[(1, 0, 3, 1), (1, -2, 2, 1)]),
    ("8.1a", &[(1, 0, 2, 0), (1, 1, 2, 0)]),
    ("8.1b", &[(1, 1, 1, 0), (1, 1, 1, 1)]),
    ("8.2", &[(1, 1, 0, 1), (1, 2, 1, 1)]),
    ("9.1", &[(2, -2, 5, 0), (1, 0, 5, 0)]),
    ("9.2", &[(1, 0, 2, 1), (1, 0, 3, 0), (1, 0, 5, 1)]),
    ("9.3a", &[(1, 0, 1, 2), (1, 0, 3, 1), (1, 0, 3, 2)]),
    ("9.3(b)i", &[(1, -1, 2, 2), (2, 0, 2, 2)]),
    ("9.3(b)ii", &[(1, 0, 1, 2), (2, 0, 1, 3)]),
    ("10", &[(1, 0, 1, 2), (2, 0, 5, 1)]),
    ("11(|N²|=2)", &[(1, -2, 0, 6), (1, 0, -3, 4)]),
    ("11(|N²|=4)", &[(1, 0, -4, 8), (1, 0, -3, 4)]),
    ("12", &[(1, 0, 0, 5), (1, 0, -1, 2)]),
    ("13", &[(1, 0, 0, 4), (1, 0, 0, 6), (1, 0, 0, 2)]),
    ("14", &[(1, 0, 0, 7), (1, 0, -3, 4)]),
    (
        "15.1",
        &[(1, 0, 0, 4), (1, -1, 0, 5), (1, 0, 0, 5), (1, 0, 0, 7)],
    ),
    ("15.2", &[(3, 0, 0, 4), (1, 0, 0, 8)]),
    ("16", &[(2, 0, 0, 4), (2, 0, 0, 7)]),
    ("17", &[(1, 0, 0, 5), (1, 0, 0, 1)]),
    ("18", &[(6, 0, 0, 6)]),
];

/// Newton's method in `x = log τ`, where `Σ c·e^{-Δx} - 1` is convex and
/// decreasing, so iterates from the left never overshoot.
fn oracle_factor(terms: &[(u32, i32, i32, i32)], w1: f64, w2: f64) -> Option<f64> {
    let drops: Vec<(f64, f64)> = terms
        .iter()
        .map(|&(n, a, b, c)| (n as f64, a as f64 * w1 + b as f64 * w2 + c as f64))
        .collect();
    if drops.iter().any(|&(_, d)| d <= 0.0) {
        return None;
    }
    if drops.iter().map(|&(n, _)| n).sum::<f64>() <= 1.0 {
        return Some(1.0);
    }
    let mut x = 0.0f64;
    for _ in 0..200 {
        let f: f64 = drops.iter().map(|&(n, d)| n * (-d * x).exp()).sum::<f64>() - 1.0;
        let df: f64 = drops.iter().map(|&(n, d)| -n * d * (-d * x).exp()).sum();
        let step = f / df;
        x -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    Some(x.exp())
}

fn oracle_max(w1: f64, w2: f64) -> Option<f64> {
    TABLE
        .iter()
        .map(|(_, t)| oracle_factor(t, w1, w2))
        .try_fold(1.0f64, |m, f| f.map(|f| m.max(f)))
}

fn admissible(w1: f64, w2: f64) -> bool {
    w1 <= w2 && w2 <= 1.0 && w1 >= w2 - w1 && w2 - w1 >= 1.0 - w2
}

#[test]
fn asset_matches_retyped_table() {
    let catalog = Catalog::builtin();
    assert_eq!(catalog.len(), TABLE.len());
    for (label, terms) in TABLE {
        let r = catalog
            .get(label)
            .unwrap_or_else(|| panic!("missing {label}"));
        let mut expanded: Vec<Delta> = Vec::new();
        for &(n, a, b, c) in *terms {
            let copies = if r.multiplicity.is_some() { 1 } else { n };
            expanded.extend((0..copies).map(|_| Delta::new(a, b, c)));
        }
        assert_eq!(r.branches, expanded, "{label}");
        assert_eq!(
            r.branch_count() as u32,
            terms.iter().map(|t| t.0).sum::<u32>(),
            "{label}"
        );
    }
}

#[test]
fn factors_agree_with_independent_root_finder() {
    let catalog = Catalog::builtin();
    for (w1, w2) in [(0.8482, 0.9685), (1.0, 1.0), (0.84, 0.96), (0.7, 0.9)] {
        let w = WeightVector::new(w1, w2).unwrap();
        for (label, terms) in TABLE {
            let r = catalog.get(label).unwrap();
            match (branching_factor(r, &w), oracle_factor(terms, w1, w2)) {
                (Ok(a), Some(b)) => {
                    assert!((a - b).abs() < 2e-9, "{label} at ({w1},{w2}): {a} vs {b}")
                }
                (Err(_), None) => {}
                (a, b) => panic!("{label} at ({w1},{w2}): {a:?} vs {b:?}"),
            }
        }
    }
}

#[test]
fn optimizer_against_independent_grid() {
    // exhaustive step-1e-3 grid over a box around the published weights
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 800..=900 {
        for j in 940..=1000 {
            let (w1, w2) = (i as f64 * 1e-3, j as f64 * 1e-3);
            if !admissible(w1, w2) {
                continue;
            }
            if let Some(m) = oracle_max(w1, w2) {
                if m < best.0 {
                    best = (m, w1, w2);
                }
            }
        }
    }
    let found = optimize_weights(&Catalog::builtin(), &GridSchedule::default()).unwrap();
    let standard = oracle_max(0.8482, 0.9685).unwrap();
    assert!(
        found.max_factor <= best.0 + 1e-9,
        "{found:?} vs grid {best:?}"
    );
    assert!(found.max_factor <= standard + 1e-3);
    assert!(found.max_factor <= 1.3569);
    assert!((found.weights.w1() - 0.8482).abs() <= 0.02, "{found:?}");
    assert!((found.weights.w2() - 0.9685).abs() <= 0.02, "{found:?}");
    let check = oracle_max(found.weights.w1(), found.weights.w2()).unwrap();
    assert!((check - found.max_factor).abs() < 1e-8);
}

#[test]
fn standard_weights_reach_the_stated_bases() {
    let audit = audit_weights(&Catalog::builtin(), &WeightVector::standard()).unwrap();
    let oracle = oracle_max(0.8482, 0.9685).unwrap();
    assert!((audit.max_factor - oracle).abs() < 1e-8);
    assert!(audit.max_factor <= 1.35684 + 1e-4);
    assert!(csp_endgame_base(&WeightVector::standard()) < audit.max_factor);
}

#[test]
fn catalog_loads_from_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("catalog.txt");
    std::fs::write(&path, mids_core::analysis::BUILTIN_CATALOG).unwrap();
    assert_eq!(Catalog::from_path(&path).unwrap(), Catalog::builtin());
    assert!(Catalog::from_path(dir.path().join("missing.txt")).is_err());
}

fn recurrence() -> impl Strategy<Value = Recurrence> {
    prop::collection::vec((0i32..3, 0i32..3, 1i32..6), 2..6).prop_map(|ts| Recurrence {
        label: "r".into(),
        branches: ts
            .into_iter()
            .map(|(a, b, c)| Delta::new(a, b, c))
            .collect(),
        multiplicity: None,
    })
}

proptest! {
    #[test]
    fn factor_is_antitone_in_each_delta(r in recurrence(), pick in 0usize..6, bump in 1i32..4) {
        let w = WeightVector::standard();
        let before = branching_factor(&r, &w).unwrap();
        let mut bigger = r.clone();
        let i = pick % bigger.branches.len();
        bigger.branches[i].c += bump;
        let after = branching_factor(&bigger, &w).unwrap();
        prop_assert!(after <= before + 1e-9, "{} -> {}", before, after);
    }

    #[test]
    fn measure_is_bounded_by_free_count(n in 0usize..25, p in 0.0..1.0f64, f in 0.0..0.5f64, seed: u64) {
        let g = mark_random(&gen_random(n, p, seed), f, seed);
        let w = WeightVector::standard();
        let k = measure(&g, &w);
        prop_assert!(k >= 0.0 && k <= g.free().len() as f64 + 1e-12);
    }
}
