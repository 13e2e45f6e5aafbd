//! Cross-validation suites shared by `maclane selfcheck` and the acceptance
//! harness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::ext::qf;
use crate::arith::{ffpoly, BaseField, ExtRat, KPoly, K, Q};
use crate::clusters::{build_cluster_tree, BuildOptions, ResidueMode};
use crate::error::Result;
use crate::fibre::{farey_chain, is_minimal, is_unimodular};
use crate::invariants::check_record;
use crate::newton::reduction_with_edge;
use crate::parse::parse_poly;
use crate::report::{analyse, ell_invariance_holds};
use crate::valuation::MacLaneVal;

/// (p, unramified degree, expression).
pub const CORPUS: &[(u64, usize, &str)] = &[
    (3, 1, "(x^2-3)^3 - 3^5"),
    (5, 1, "(x^2-5)^3 - 5^5"),
    (7, 1, "(x^2-7)^3 - 7^5"),
    (11, 1, "(x^2-11)^3 - 11^5"),
    (7, 1, "(x^3-2*7)^2 - 7*x^2*(x^3-2*7)"),
    (3, 1, "x^3 - 3"),
    (3, 1, "(x-3)*(x-30)*(x-6)*(x-33)*(x^2-243)"),
    (5, 1, "(x-5)*(x-10)*(x-35)*(x-60)*(x-25)"),
    (3, 1, "(x^2+9)^2 - 3^7"),
    (5, 1, "(x^2-2*25)*(x^2-2*25-5^5)*(x-5)"),
    (3, 2, "x^2 - 3*theta"),
    (3, 2, "(x^2-3*theta)*(x^2-3*theta-27)"),
];

#[derive(Clone, Debug)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckLine {
    fn new(name: impl Into<String>, r: Result<String>) -> Self {
        match r {
            Ok(detail) => CheckLine { name: name.into(), passed: true, detail },
            Err(e) => CheckLine { name: name.into(), passed: false, detail: e.to_string() },
        }
    }

    fn fail(name: impl Into<String>, detail: String) -> Self {
        CheckLine { name: name.into(), passed: false, detail }
    }
}

pub fn corpus_entry(i: usize) -> Result<(K, KPoly)> {
    let (p, m, text) = CORPUS[i];
    let k = BaseField::unramified_default(p, m)?;
    let f = parse_poly(&k, text)?;
    Ok((k, f))
}

/// Tree, record, fibre and ℓ-invariance checks for one polynomial in both
/// residue modes. A geometric-mode budget overflow is reported as skipped.
pub fn check_polynomial(label: &str, k: &K, f: &KPoly, seed: u64, budget: usize) -> Vec<CheckLine> {
    let mut out = vec![];
    for mode in [ResidueMode::Exact, ResidueMode::Geometric] {
        let tag = match mode {
            ResidueMode::Exact => "exact",
            ResidueMode::Geometric => "geometric",
        };
        let opts = BuildOptions { mode, extension_budget: budget, seed };
        let a = match analyse(k, f, &opts) {
            Ok(a) => a,
            Err(e @ crate::Error::ResidueModeOverflow { .. }) => {
                out.push(CheckLine { name: format!("{label} [{tag}]"), passed: true, detail: format!("skipped: {e}") });
                continue;
            }
            Err(e) => {
                out.push(CheckLine::fail(format!("{label} [{tag}] analysis"), e.to_string()));
                continue;
            }
        };
        out.push(CheckLine::new(
            format!("{label} [{tag}] nu, sizes, ord, degree-minimality"),
            a.tree.check().map(|_| format!("{} proper clusters", a.records.len())),
        ));
        out.push(CheckLine::new(
            format!("{label} [{tag}] genus cross-check"),
            a.records.iter().try_for_each(check_record).map(|_| {
                let g: Vec<String> = a.records.iter().map(|r| r.genus.to_string()).collect();
                format!("genera [{}]", g.join(", "))
            }),
        ));
        let name = format!("{label} [{tag}] ell-invariance of the fibre");
        out.push(match ell_invariance_holds(&a, seed) {
            Ok(true) => CheckLine { name, passed: true, detail: String::new() },
            Ok(false) => CheckLine::fail(name, "fibre changed under ell -> ell + b".into()),
            Err(e) => CheckLine::fail(name, e.to_string()),
        });
    }
    out
}

fn random_q<R: Rng>(rng: &mut R) -> Q {
    qf(rng.gen_range(-40..=40), rng.gen_range(1..=12))
}

/// Unimodularity, minimality and integer-translation invariance of
/// P¹(α, a, b) on random triples.
pub fn farey_suite(trials: usize, seed: u64) -> CheckLine {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    while done < trials {
        let alpha = rng.gen_range(1..=6i64);
        let (x, y) = (random_q(&mut rng), random_q(&mut rng));
        if x == y {
            continue;
        }
        let (a, b) = if x > y { (x, y) } else { (y, x) };
        let c = match farey_chain(alpha, &a, &b) {
            Ok(c) => c,
            Err(e) => return CheckLine::fail("farey_chain", format!("P1({alpha}, {a}, {b}): {e}")),
        };
        let ends =
            c.fractions.first() == Some(&(&a * qf(alpha, 1))) && c.fractions.last() == Some(&(&b * qf(alpha, 1)));
        if !ends || !is_unimodular(&c) || !is_minimal(&c) {
            return CheckLine::fail("farey_chain", format!("P1({alpha}, {a}, {b}) = {:?}", c.fractions));
        }
        let t = qf(rng.gen_range(-5..=5), 1);
        let moved = match farey_chain(alpha, &(&a + &t), &(&b + &t)) {
            Ok(m) => m,
            Err(e) => return CheckLine::fail("farey_chain", e.to_string()),
        };
        let shift = &t * qf(alpha, 1);
        let expect: Vec<Q> = c.fractions.iter().map(|q| q + &shift).collect();
        if moved.fractions != expect || moved.mults != c.mults {
            return CheckLine::fail("farey_chain", format!("translation by {t} changes P1({alpha}, {a}, {b})"));
        }
        done += 1;
    }
    CheckLine { name: "farey_chain".into(), passed: true, detail: format!("{trials} random triples") }
}

fn random_poly<R: Rng>(k: &K, rng: &mut R) -> KPoly {
    let bound = (k.p() as i64).pow(4);
    let theta = (k.degree() > 1).then(|| k.theta(1));
    loop {
        let deg = rng.gen_range(1..=6);
        let mut g: KPoly = (0..=deg)
            .map(|_| {
                let mut c = k.from_i64(rng.gen_range(-bound..=bound));
                if let Some(t) = &theta {
                    c = k.add(&c, &k.mul(&k.from_i64(rng.gen_range(-bound..=bound)), t));
                }
                c
            })
            .collect();
        k.trim(&mut g);
        if g.len() > 1 {
            return g;
        }
    }
}

/// Every cluster valuation of the corpus over `k`, with its prefixes.
fn corpus_valuations(k: &K) -> Result<Vec<MacLaneVal>> {
    let mut vals = vec![MacLaneVal::gauss(k)];
    for (i, &(p, m, _)) in CORPUS.iter().enumerate() {
        if p != k.p() || m != k.degree() {
            continue;
        }
        let (k2, f) = corpus_entry(i)?;
        let (g, _) = crate::clusters::normalize_input(&k2, &f)?;
        let tree = build_cluster_tree(&k2, &g, &BuildOptions::default())?;
        for n in tree.proper_nodes() {
            let v = &n.valuation;
            for d in 1..=v.depth() {
                let mut steps = v.prefix(d).steps();
                for s in &mut steps {
                    s.0 = s.0.iter().map(|c| tree.k.embed_into(c, k)).collect::<Result<_>>()?;
                }
                vals.push(MacLaneVal::from_steps(k, &steps)?);
            }
        }
    }
    Ok(vals)
}

/// (gh)|_v = g|_v·h|_v, v(gh) = v(g) + v(h), and deg g|_v = (i₁ − i₀)/e on
/// random pairs and valuations taken from the corpus.
pub fn reduction_suite(k: &K, pairs: usize, seed: u64) -> CheckLine {
    let name = format!("reduction multiplicativity p={} m={}", k.p(), k.degree());
    let vals = match corpus_valuations(k) {
        Ok(v) => v,
        Err(e) => return CheckLine::fail(name, e.to_string()),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..pairs {
        let v = &vals[rng.gen_range(0..vals.len())];
        let (g, h) = (random_poly(k, &mut rng), random_poly(k, &mut rng));
        let gh = k.pmul(&g, &h);
        let run = || -> Result<Option<String>> {
            let (vg, vh, vgh) = (v.eval(&g), v.eval(&h), v.eval(&gh));
            if let (ExtRat::Fin(a), ExtRat::Fin(b)) = (&vg, &vh) {
                if vgh != ExtRat::Fin(a + b) {
                    return Ok(Some(format!("v(gh) = {vgh}, v(g) + v(h) = {}", a + b)));
                }
            }
            let (rg, eg) = reduction_with_edge(v, &g)?;
            let (rh, _) = reduction_with_edge(v, &h)?;
            let (rgh, _) = reduction_with_edge(v, &gh)?;
            if let Some(edge) = eg {
                let e = v.level(v.depth()).e as usize;
                if (rg.len() - 1) * e != edge.i1 - edge.i0 {
                    return Ok(Some("degree law fails".into()));
                }
            }
            if rgh != ffpoly::mul(v.residue_field(), &rg, &rh) {
                return Ok(Some("(gh)|_v differs from g|_v·h|_v".into()));
            }
            Ok(None)
        };
        match run() {
            Ok(None) => {}
            Ok(Some(msg)) => {
                return CheckLine::fail(
                    name,
                    format!("{msg} at v = {}, g = {}, h = {}", v.fmt_chain(), k.fmt_poly(&g, "x"), k.fmt_poly(&h, "x")),
                )
            }
            Err(e) => return CheckLine::fail(name, e.to_string()),
        }
    }
    CheckLine { name, passed: true, detail: format!("{pairs} random pairs, {} valuations", vals.len()) }
}

/// Every corpus-wide suite: the corpus polynomials, 500 Farey triples and
/// 200 reduction pairs per corpus base field.
pub fn run_corpus(seed: u64, budget: usize) -> Vec<CheckLine> {
    let mut out = vec![];
    let mut fields: Vec<(u64, usize)> = vec![];
    for (i, &(p, m, text)) in CORPUS.iter().enumerate() {
        match corpus_entry(i) {
            Ok((k, f)) => out.extend(check_polynomial(&format!("corpus p={p} m={m} {text}"), &k, &f, seed, budget)),
            Err(e) => out.push(CheckLine::fail(format!("corpus {text}"), e.to_string())),
        }
        if !fields.contains(&(p, m)) {
            fields.push((p, m));
        }
    }
    out.push(farey_suite(500, seed));
    for (p, m) in fields {
        match BaseField::unramified_default(p, m) {
            Ok(k) => out.push(reduction_suite(&k, 200, seed ^ p ^ ((m as u64) << 8))),
            Err(e) => out.push(CheckLine::fail(format!("base field p={p} m={m}"), e.to_string())),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_passes() {
        let lines = run_corpus(0, 64);
        for l in &lines {
            eprintln!("{} {} {}", l.passed, l.name, l.detail);
        }
        assert!(lines.iter().all(|l| l.passed));
    }
}
