//! Acceptance harness: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Time limits are wall-clock and pinned below.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use maclane::arith::ext::qf;
use maclane::arith::{BaseField, ExtRat, KPoly, K, Q};
use maclane::clusters::{build_cluster_tree, BuildOptions, ClusterTree, ResidueMode};
use maclane::fibre::{assemble, FibreGraph};
use maclane::invariants::{compute_records, InvariantRecord};
use maclane::newton::reduction;
use maclane::selfcheck;
use maclane::valuation::MacLaneVal;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TREE_LIMIT: Duration = Duration::from_secs(1);
const FIGURE_LIMIT: Duration = Duration::from_secs(2);
const ORACLE_LIMIT: Duration = Duration::from_secs(30);
const ORACLE_INSTANCES: usize = 100;
const SEXTIC_PRIMES: [i64; 4] = [3, 5, 7, 11];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn sextic(p: i64) -> (K, KPoly) {
    let k = BaseField::rational(p as u64).unwrap();
    let phi = k.poly_i64(&[-p, 0, 1]);
    let f = k.psub(&k.ppow(&phi, 3), &k.poly_i64(&[p.pow(5)]));
    (k, f)
}

fn ext(q: Q) -> ExtRat {
    ExtRat::Fin(q)
}

fn check_sextic_tree(t: &ClusterTree, p: i64) -> Result<(), String> {
    let proper: Vec<_> = t.proper_nodes().collect();
    let leaves: Vec<_> = t.leaves().collect();
    let shape = proper.len() == 2
        && proper[0].parent.is_none()
        && proper[1].parent == Some(proper[0].id)
        && (proper[0].degree, &proper[0].radius, proper[0].size) == (1, &ext(qf(1, 2)), 6)
        && (proper[1].degree, &proper[1].radius, proper[1].size) == (2, &ext(qf(5, 3)), 6)
        && leaves.len() == 1
        && leaves[0].degree == 6
        && leaves[0].parent == Some(proper[1].id);
    if shape {
        Ok(())
    } else {
        Err(format!(
            "p = {p}: unexpected tree {:?}",
            proper.iter().map(|n| (n.degree, n.radius.to_string(), n.size)).collect::<Vec<_>>()
        ))
    }
}

fn criterion_tree() -> Outcome {
    let mut worst = Duration::ZERO;
    for p in SEXTIC_PRIMES {
        let (k, f) = sextic(p);
        let start = Instant::now();
        let t = build_cluster_tree(&k, &f, &BuildOptions::default()).map_err(|e| format!("p = {p}: {e}"))?;
        let took = start.elapsed();
        check_sextic_tree(&t, p)?;
        if took >= TREE_LIMIT {
            return Err(format!("p = {p}: {took:?} >= {TREE_LIMIT:?}"));
        }
        worst = worst.max(took);
    }
    Ok(format!("p in {SEXTIC_PRIMES:?}, slowest {worst:.2?} < {TREE_LIMIT:?}"))
}

fn columns(r: &InvariantRecord) -> [i64; 11] {
    [r.b, r.e, r.n, r.m, r.i_v as i64, r.p, r.gamma, r.delta, r.p0, r.gamma0, r.genus as i64]
}

fn criterion_table() -> Outcome {
    let want = [[2, 2, 2, 2, 6, 2, 1, 1, 2, 2, 0], [3, 6, 2, 6, 3, 1, 1, 1, 2, 1, 0]];
    for p in SEXTIC_PRIMES {
        let (k, f) = sextic(p);
        let t = build_cluster_tree(&k, &f, &BuildOptions::default()).map_err(|e| e.to_string())?;
        let recs = compute_records(&t).map_err(|e| e.to_string())?;
        let got: Vec<[i64; 11]> = recs.iter().map(columns).collect();
        if got != want {
            return Err(format!("p = {p}: columns {got:?}"));
        }
        for r in &recs {
            let s = (qf(r.i_v as i64, 1) * &r.lambda + qf(r.p, 1) * &r.lambda - &r.nu) / qf(2, 1);
            if r.s != s {
                return Err(format!("p = {p}: s = {} but (i lambda + p lambda - nu)/2 = {s}", r.s));
            }
            let d = qf(r.degree as i64, 1);
            let s_table = (qf(r.i_v as i64, 1) * &r.lambda + qf(r.p, 1) * &r.lambda - &r.nu_table) / qf(2, 1);
            if r.nu_table != &r.nu * &d || r.s_table != s_table {
                return Err(format!("p = {p}: table normalization of cluster {} inconsistent", r.cluster));
            }
        }
    }
    Ok("(b,e,n,m,i,p,gamma,delta,p0,gamma0,g) exact for both clusters; s formula exact in both normalizations".into())
}

fn sextic_graph() -> FibreGraph {
    let mut g = FibreGraph::default();
    let two = g.add(2, 0);
    let six = g.add(6, 0);
    let link = g.add(4, 0);
    g.join(two, link);
    g.join(link, six);
    for _ in 0..2 {
        let a = g.add(4, 0);
        let b = g.add(2, 0);
        g.join(six, a);
        g.join(a, b);
        let c = g.add(1, 0);
        g.join(two, c);
    }
    g
}

fn criterion_graph() -> Outcome {
    let opts = BuildOptions { mode: ResidueMode::Geometric, ..Default::default() };
    let mut worst = Duration::ZERO;
    for p in SEXTIC_PRIMES {
        let (k, f) = sextic(p);
        let start = Instant::now();
        let t = build_cluster_tree(&k, &f, &opts).map_err(|e| e.to_string())?;
        let recs = compute_records(&t).map_err(|e| e.to_string())?;
        let fib = assemble(&t, &recs, 0).map_err(|e| e.to_string())?;
        let g = fib.dual_graph().map_err(|e| e.to_string())?;
        let took = start.elapsed();
        if !g.is_isomorphic(&sextic_graph()) {
            return Err(format!("p = {p}: graph {g:?} is not the expected graph"));
        }
        if took >= FIGURE_LIMIT {
            return Err(format!("p = {p}: {took:?} >= {FIGURE_LIMIT:?}"));
        }
        worst = worst.max(took);
    }
    Ok(format!("isomorphic for p in {SEXTIC_PRIMES:?}, slowest {worst:.2?} < {FIGURE_LIMIT:?}"))
}

fn criterion_reduction() -> Outcome {
    for p in [3i64, 5, 7] {
        let k = BaseField::rational(p as u64).unwrap();
        let phi = k.poly_i64(&[-2 * p, 0, 0, 1]);
        let v = MacLaneVal::from_steps(&k, &[(k.x(), ext(qf(1, 3))), (phi.clone(), ext(qf(5, 3)))])
            .map_err(|e| e.to_string())?;
        let f = k.psub(&k.pmul(&phi, &phi), &k.pmul(&k.poly_i64(&[0, 0, p]), &phi));
        let red = reduction(&v, &f).map_err(|e| e.to_string())?;
        let fp = v.residue_field();
        let want = vec![fp.neg(&fp.inv(&fp.from_i64(2))), fp.one()];
        if red != want {
            return Err(format!("p = {p}: f|_v has coefficients {red:?}"));
        }
    }
    Ok("f|_v = X - 1/2 in F_p for p in [3, 5, 7]".into())
}

fn criterion_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0AC1E);
    let start = Instant::now();
    for i in 0..ORACLE_INSTANCES {
        let p: i64 = *[3, 5].choose(&mut rng).unwrap();
        let n = rng.gen_range(1..=8);
        let bound = p.pow(4);
        let mut roots: Vec<i64> = vec![];
        while roots.len() < n {
            let a = p * rng.gen_range(-bound..=bound);
            if a != 0 && !roots.contains(&a) {
                roots.push(a);
            }
        }
        let k = common::rational(p as u64);
        let f = common::product_of_linears(&k, &roots);
        let t = build_cluster_tree(&k, &f, &BuildOptions::default()).map_err(|e| format!("instance {i}: {e}"))?;
        let got = common::tree_clusters(&t).ok_or_else(|| format!("instance {i}: non-linear or inexact leaf"))?;
        let want = common::rational_clusters(p, &roots);
        if got != want {
            return Err(format!("instance {i}, p = {p}, roots {roots:?}: tree {got:?}, oracle {want:?}"));
        }
        if t.proper_nodes().any(|c| c.size != t.leaves_below(c.id).len()) {
            return Err(format!("instance {i}: size disagrees with the number of roots below"));
        }
    }
    let took = start.elapsed();
    if took >= ORACLE_LIMIT {
        return Err(format!("{took:?} >= {ORACLE_LIMIT:?}"));
    }
    Ok(format!("{ORACLE_INSTANCES} instances, p in {{3, 5}}, {took:.2?} < {ORACLE_LIMIT:?}"))
}

fn criterion_properties() -> Outcome {
    let lines = selfcheck::run_corpus(0, 64);
    let failed: Vec<String> = lines.iter().filter(|l| !l.passed).map(|l| format!("{}: {}", l.name, l.detail)).collect();
    if failed.is_empty() {
        Ok(format!(
            "{} checks over {} corpus polynomials, 500 chain triples, 200 reduction pairs per base field",
            lines.len(),
            selfcheck::CORPUS.len()
        ))
    } else {
        Err(failed.join("; "))
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 6] = [
        ("1 cluster tree of (x^2-p)^3 - p^5", criterion_tree),
        ("2 invariant table columns", criterion_table),
        ("3 geometric fibre graph", criterion_graph),
        ("4 reduction X - 1/2", criterion_reduction),
        ("5 degree-one oracle", criterion_oracle),
        ("6 property suites", criterion_properties),
    ];
    let mut failures = 0;
    for (name, run) in criteria {
        match run() {
            Ok(msg) => println!("PASS  {name}: {msg}"),
            Err(msg) => {
                failures += 1;
                println!("FAIL  {name}: {msg}");
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
