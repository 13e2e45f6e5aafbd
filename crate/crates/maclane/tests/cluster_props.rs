mod common;

use common::*;
use maclane::arith::BaseField;
use maclane::clusters::{build_cluster_tree, normalize_input, BuildOptions, ClusterTree, ResidueMode};
use maclane::fibre::assemble;
use maclane::invariants::{compute_records, compute_records_with_ell_shift};
use proptest::prelude::*;

fn distinct_roots(p: i64) -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::btree_set(-(p.pow(4))..p.pow(4), 2..=8)
        .prop_map(move |s| s.into_iter().map(|a| a * p).collect())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn degree_one_trees_match_pairwise_distances(
        (p, roots) in prop::sample::select(vec![3i64, 5, 7]).prop_flat_map(|p| (Just(p), distinct_roots(p)))
    ) {
        let k = rational(p as u64);
        let f = product_of_linears(&k, &roots);
        let (g, c) = normalize_input(&k, &f).unwrap();
        prop_assert_eq!(c, 0);
        prop_assert_eq!(&g, &f);
        let t = build_cluster_tree(&k, &f, &BuildOptions::default()).unwrap();
        check_records(&t)?;
        let geo = build_cluster_tree(&k, &f, &BuildOptions { mode: ResidueMode::Geometric, ..Default::default() }).unwrap();
        check_records(&geo)?;
        let got = tree_clusters(&t).expect("exact linear leaves");
        prop_assert_eq!(got, rational_clusters(p, &roots));
    }
}

/// Products of Eisenstein-like and generic small factors with p-divisible
/// lower coefficients.
fn structured_poly(p: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    let factor = (1usize..=3).prop_flat_map(move |d| {
        proptest::collection::vec((0i64..3, 1u32..4), d).prop_map(move |cs| {
            let mut f: Vec<i64> = cs.iter().map(|&(c, e)| (c - 1) * p.pow(e)).collect();
            f.push(1);
            f
        })
    });
    proptest::collection::vec(factor, 1..=4)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, max_global_rejects: 4096, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn trees_pass_internal_checks(
        (p, factors) in prop::sample::select(vec![3i64, 5]).prop_flat_map(|p| (Just(p), structured_poly(p)))
    ) {
        let k = rational(p as u64);
        let mut f = k.poly_i64(&[1]);
        for g in &factors {
            f = k.pmul(&f, &k.poly_i64(g));
        }
        prop_assume!(k.is_separable(&f));
        let (g, _) = normalize_input(&k, &f).unwrap();
        let t = build_cluster_tree(&k, &g, &BuildOptions::default());
        prop_assert!(t.is_ok(), "{:?} on {}", t.err(), k.fmt_poly(&g, "x"));
        let t = t.unwrap();
        check_records(&t)?;
        let total: usize = t.leaves().map(|l| l.size).sum();
        prop_assert_eq!(total, g.len() - 1);
        let opts = BuildOptions { mode: ResidueMode::Geometric, ..Default::default() };
        let geo = build_cluster_tree(&k, &g, &opts);
        prop_assert!(geo.is_ok(), "{:?} on {}", geo.err(), k.fmt_poly(&g, "x"));
        let geo = geo.unwrap();
        check_records(&geo)?;
        prop_assert!(geo.proper_nodes().count() >= t.proper_nodes().count());
    }

    #[test]
    fn unramified_base_trees_pass_internal_checks(
        (p, factors) in prop::sample::select(vec![3i64, 5]).prop_flat_map(|p| (Just(p), structured_poly(p)))
    ) {
        let k = BaseField::unramified_default(p as u64, 2).unwrap();
        let mut f = k.poly_i64(&[1]);
        for g in &factors {
            f = k.pmul(&f, &k.poly_i64(g));
        }
        prop_assume!(k.is_separable(&f));
        let (g, _) = normalize_input(&k, &f).unwrap();
        let t = build_cluster_tree(&k, &g, &BuildOptions::default());
        prop_assert!(t.is_ok(), "{:?} on {}", t.err(), k.fmt_poly(&g, "x"));
        check_records(&t.unwrap())?;
    }
}

fn check_records(t: &ClusterTree) -> Result<(), TestCaseError> {
    let poly = t.k.fmt_poly(&t.f, "x");
    let r = compute_records(t);
    prop_assert!(r.is_ok(), "{:?} on {}", r.err(), poly);
    let r = r.unwrap();
    let shifted = compute_records_with_ell_shift(t, 1).unwrap();
    let fib = assemble(t, &r, 0);
    prop_assert!(fib.is_ok(), "{:?} on {}", fib.err(), poly);
    let fib = fib.unwrap();
    let fib1 = assemble(t, &shifted, 0).unwrap();
    if t.mode == ResidueMode::Geometric {
        prop_assert!(fib.dual_graph().unwrap().is_isomorphic(&fib1.dual_graph().unwrap()), "{}", poly);
    } else {
        prop_assert_eq!(&fib.chains, &fib1.chains);
        prop_assert_eq!(&fib.open_p1, &fib1.open_p1);
    }
    for (a, b) in r.iter().zip(&shifted) {
        prop_assert_eq!((&a.fbar, a.genus, a.ubereven), (&b.fbar, b.genus, b.ubereven), "{}", poly);
        if a.n == 2 {
            prop_assert_eq!((&a.vtilde, a.c0, &a.ftilde), (&b.vtilde, b.c0, &b.ftilde), "{}", poly);
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn degree_one_fibres_match_oracle(
        (p, roots) in prop::sample::select(vec![3i64, 5]).prop_flat_map(|p| (Just(p), distinct_roots(p)))
    ) {
        let k = rational(p as u64);
        let f = product_of_linears(&k, &roots);
        let t = build_cluster_tree(&k, &f, &BuildOptions { mode: ResidueMode::Geometric, ..Default::default() }).unwrap();
        let r = compute_records(&t).unwrap();
        let got = assemble(&t, &r, 0).unwrap().dual_graph().unwrap();
        let want = degree_one_fibre(p, &roots, 0);
        prop_assert!(got.is_isomorphic(&want), "roots {:?}\n got {:?}\nwant {:?}", roots, got, want);
    }
}

#[test]
fn normalised_six_root_fibre_matches_oracle() {
    for p in [3i64, 5, 7] {
        let k = rational(p as u64);
        let roots = [p, -p, 1 + p, -1 - p, 2 + p, -2 - p];
        let (g, c) = normalize_input(&k, &product_of_linears(&k, &roots)).unwrap();
        assert_eq!(c, 1);
        let t =
            build_cluster_tree(&k, &g, &BuildOptions { mode: ResidueMode::Geometric, ..Default::default() }).unwrap();
        let r = compute_records(&t).unwrap();
        let got = assemble(&t, &r, 0).unwrap().dual_graph().unwrap();
        let scaled: Vec<i64> = roots.iter().map(|a| a * p).collect();
        let want = degree_one_fibre(p, &scaled, -6);
        assert!(got.is_isomorphic(&want), "p = {p}\n got {got:?}\nwant {want:?}");
    }
}
