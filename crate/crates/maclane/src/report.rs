//! End-to-end analysis of one input and its serializations.

use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::arith::ext::fmt_q;
use crate::arith::{ffpoly, FFPoly, Fq, KPoly, K, Q};
use crate::clusters::{build_cluster_tree, normalize_input, BuildOptions, ClusterTree, ResidueMode};
use crate::error::Result;
use crate::fibre::{assemble, Attach, ChainKind, Side, SpecialFibre};
use crate::invariants::{compute_records, compute_records_with_ell_shift, InvariantRecord};

pub struct Analysis {
    /// The base field as given (before any geometric-mode extension).
    pub k: K,
    pub input: KPoly,
    /// The tree is built for f(p^{−shift}·x).
    pub shift: u32,
    pub tree: ClusterTree,
    pub records: Vec<InvariantRecord>,
    pub fibre: SpecialFibre,
}

pub fn analyse(k: &K, f: &KPoly, opts: &BuildOptions) -> Result<Analysis> {
    let (g, shift) = normalize_input(k, f)?;
    let tree = build_cluster_tree(k, &g, opts)?;
    let records = compute_records(&tree)?;
    let fibre = assemble(&tree, &records, opts.seed)?;
    Ok(Analysis { k: k.clone(), input: f.clone(), shift, tree, records, fibre })
}

/// Recomputes the fibre with ℓ_v + b_v in place of ℓ_v and compares.
pub fn ell_invariance_holds(a: &Analysis, seed: u64) -> Result<bool> {
    let shifted = compute_records_with_ell_shift(&a.tree, 1)?;
    let other = assemble(&a.tree, &shifted, seed)?;
    Ok(match a.tree.mode {
        ResidueMode::Geometric => a.fibre.dual_graph()?.is_isomorphic(&other.dual_graph()?),
        ResidueMode::Exact => a.fibre.chains == other.chains && a.fibre.open_p1 == other.open_p1,
    })
}

fn fpoly(fld: &Fq, g: &FFPoly, var: &str) -> String {
    if g.is_empty() {
        "0".into()
    } else {
        ffpoly::fmt_poly(fld, g, var)
    }
}

fn field_name(fld: &Fq) -> String {
    if fld.deg() == 1 {
        format!("F_{}", fld.p())
    } else {
        format!("F_{}^{}", fld.p(), fld.deg())
    }
}

fn mode_name(m: ResidueMode) -> &'static str {
    match m {
        ResidueMode::Exact => "arithmetic",
        ResidueMode::Geometric => "geometric",
    }
}

fn attach_json(a: &Attach) -> Value {
    match a {
        Attach::Open => json!("open"),
        Attach::Component { cluster, side } => json!({
            "cluster": cluster,
            "side": match side { Side::Whole => "whole", Side::Minus => "minus", Side::Plus => "plus" },
        }),
    }
}

fn kind_name(k: ChainKind) -> &'static str {
    match k {
        ChainKind::Connector => "connector",
        ChainKind::DegreeMinimal => "degree_minimal",
        ChainKind::Maximal => "maximal",
    }
}

fn record_json(r: &InvariantRecord, mode: ResidueMode) -> Value {
    let q = |x: &Q| json!(fmt_q(x));
    let fld = &r.k_v;
    let mut v = json!({
        "epsilon": r.epsilon, "b": r.b, "ell": r.ell, "f": r.f, "k_v": field_name(fld),
        "lambda": q(&r.lambda), "nu": q(&r.nu), "s": q(&r.s), "s0": q(&r.s0),
        "e": r.e, "n": r.n, "m": r.m, "i": r.i_v, "i0": r.i0_v, "p": r.p, "gamma": r.gamma,
        "delta": r.delta, "p0": r.p0, "gamma0": r.gamma0, "c0": r.c0,
        "vtilde": r.vtilde.iter().collect::<Vec<_>>(), "u": q(&r.u), "genus": r.genus,
        "ubereven": r.ubereven,
        "gbar": fpoly(fld, &r.gbar, "y"),
        "gbar0": r.gbar0.as_ref().map(|g| fpoly(fld, g, "y")),
        "reduction": fpoly(fld, &r.fred, "x"),
        "fbar": fpoly(fld, &r.fbar, "x"), "ftilde": fpoly(fld, &r.ftilde, "x"),
        "table_normalization": { "nu": q(&r.nu_table), "s": q(&r.s_table), "s0": q(&r.s0_table) },
    });
    if mode == ResidueMode::Geometric {
        let d = r.degree as i64;
        v["annotation"] = json!({ "d_gamma": d * r.gamma, "d_gamma0": d * r.gamma0 });
    }
    v
}

pub fn to_json(a: &Analysis) -> Value {
    let t = &a.tree;
    let rec = |id: usize| a.records.iter().find(|r| r.cluster == id);
    let clusters: Vec<Value> = t
        .nodes
        .iter()
        .map(|n| {
            json!({
                "id": n.id, "degree": n.degree, "radius": n.radius.to_string(), "size": n.size,
                "centre": t.k.fmt_poly(&n.centre, "x"), "parent": n.parent, "proper": n.is_proper,
                "degree_minimal": n.degree_minimal, "exact_leaf": !n.is_proper && n.exact,
                "chain": n.valuation.fmt_chain(),
                "invariants": rec(n.id).map(|r| record_json(r, t.mode)),
            })
        })
        .collect();
    let f = &a.fibre;
    let components: Vec<Value> = f
        .components
        .iter()
        .map(|c| {
            json!({
                "cluster": c.cluster, "multiplicity": c.multiplicity, "genus": c.genus, "split": c.split,
                "geometric_count": c.geometric_count,
            })
        })
        .collect();
    let chains: Vec<Value> = f
        .chains
        .iter()
        .map(|c| {
            json!({
                "kind": kind_name(c.kind), "cluster": c.cluster, "alpha": c.spec.alpha,
                "a": fmt_q(&c.spec.a), "b": fmt_q(&c.spec.b), "mults": c.spec.mults,
                "from": attach_json(&c.from), "to": attach_json(&c.to), "count": c.count,
                "point_degree": c.point.len() - 1,
            })
        })
        .collect();
    let open: Vec<Value> = f
        .open_p1
        .iter()
        .map(|o| json!({ "cluster": o.cluster, "multiplicity": o.multiplicity, "count": o.count }))
        .collect();
    json!({
        "base_field": { "p": a.k.p(), "m": a.k.degree() },
        "residue_field_degree": t.k.degree(),
        "input": a.k.fmt_poly(&a.input, "x"),
        "normalization_shift": a.shift,
        "clusters": clusters,
        "fibre": { "components": components, "chains": chains, "open_p1": open },
        "mode": mode_name(t.mode),
    })
}

pub fn invariants_json(a: &Analysis) -> Value {
    let records: Vec<Value> = a
        .records
        .iter()
        .map(|r| {
            let mut v = record_json(r, a.tree.mode);
            v["cluster"] = json!(r.cluster);
            v["degree"] = json!(r.degree);
            v
        })
        .collect();
    json!({
        "base_field": { "p": a.k.p(), "m": a.k.degree() },
        "input": a.k.fmt_poly(&a.input, "x"),
        "normalization_shift": a.shift,
        "mode": mode_name(a.tree.mode),
        "records": records,
    })
}

fn cluster_line(t: &ClusterTree, id: usize) -> String {
    let n = t.node(id);
    if n.is_proper {
        format!(
            "cluster {id}: degree {}, radius {}, size {}, centre {}",
            n.degree,
            n.radius,
            n.size,
            t.k.fmt_poly(&n.centre, "x")
        )
    } else {
        let how = if n.exact { "root orbit" } else { "root orbit (approximate centre)" };
        format!("{how} of degree {}: {}", n.degree, t.k.fmt_poly(&n.centre, "x"))
    }
}

pub fn picture_ascii(a: &Analysis) -> String {
    let t = &a.tree;
    let mut out = String::new();
    let _ = writeln!(out, "f = {}", a.k.fmt_poly(&a.input, "x"));
    if a.shift > 0 {
        let _ = writeln!(out, "normalised to f(p^-{}*x) = {}", a.shift, t.k.fmt_poly(&t.f, "x"));
    }
    fn walk(t: &ClusterTree, id: usize, depth: usize, out: &mut String) {
        let _ = writeln!(out, "{}{}", "  ".repeat(depth), cluster_line(t, id));
        for &c in &t.node(id).children {
            walk(t, c, depth + 1, out);
        }
    }
    walk(t, t.root, 0, &mut out);
    out
}

pub fn picture_json(a: &Analysis) -> Value {
    let mut v = to_json(a);
    if let Some(o) = v.as_object_mut() {
        o.remove("fibre");
    }
    v
}

pub fn picture_tikz(a: &Analysis) -> String {
    let t = &a.tree;
    fn walk(t: &ClusterTree, id: usize, depth: usize, out: &mut String) {
        let n = t.node(id);
        let pad = "  ".repeat(depth + 1);
        let label = if n.is_proper {
            format!("$\\deg {}$, $\\lambda={}$", n.degree, n.radius)
        } else {
            format!("$\\bullet_{{{}}}$", n.degree)
        };
        let _ = write!(out, "{pad}node {{{label}}}");
        for &c in &n.children {
            let _ = writeln!(out);
            let _ = write!(out, "{pad}child {{ ");
            walk(t, c, depth + 1, out);
            let _ = write!(out, " }}");
        }
    }
    let mut out = String::from("\\begin{tikzpicture}[level distance=14mm, sibling distance=24mm]\n\\");
    walk(t, t.root, 0, &mut out);
    out.push_str(";\n\\end{tikzpicture}\n");
    out
}

pub fn invariants_table(a: &Analysis) -> String {
    let cols = [
        "id", "deg", "lambda", "b", "e", "n", "m", "i", "p", "gamma", "delta", "p0", "gamma0", "c0", "u", "g", "nu",
        "s", "s0", "nu*", "s*", "s0*", "vtilde",
    ];
    let mut rows = vec![cols.iter().map(|s| s.to_string()).collect::<Vec<_>>()];
    for r in &a.records {
        let vt: Vec<String> = r.vtilde.iter().map(|x| x.to_string()).collect();
        rows.push(vec![
            r.cluster.to_string(),
            r.degree.to_string(),
            fmt_q(&r.lambda),
            r.b.to_string(),
            r.e.to_string(),
            r.n.to_string(),
            r.m.to_string(),
            r.i_v.to_string(),
            r.p.to_string(),
            r.gamma.to_string(),
            r.delta.to_string(),
            r.p0.to_string(),
            r.gamma0.to_string(),
            r.c0.to_string(),
            fmt_q(&r.u),
            r.genus.to_string(),
            fmt_q(&r.nu),
            fmt_q(&r.s),
            fmt_q(&r.s0),
            fmt_q(&r.nu_table),
            fmt_q(&r.s_table),
            fmt_q(&r.s0_table),
            if vt.is_empty() { "-".into() } else { vt.join(",") },
        ]);
    }
    let widths: Vec<usize> =
        (0..cols.len()).map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap()).collect();
    let mut out = String::new();
    for r in &rows {
        let line: Vec<String> = r.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
        let _ = writeln!(out, "{}", line.join(" ").trim_end());
    }
    let _ = writeln!(out, "(nu*, s*, s0*: nu scaled by deg v, with s and s0 recomputed from it)");
    for r in &a.records {
        let fld = &r.k_v;
        let _ = writeln!(
            out,
            "cluster {}: k_v = {}, f|_v = {}, fbar = {}, ftilde = {}, gbar = {}{}",
            r.cluster,
            field_name(fld),
            fpoly(fld, &r.fred, "x"),
            fpoly(fld, &r.fbar, "x"),
            fpoly(fld, &r.ftilde, "x"),
            fpoly(fld, &r.gbar, "y"),
            r.gbar0.as_ref().map(|g| format!(", gbar0 = {}", fpoly(fld, g, "y"))).unwrap_or_default()
        );
    }
    out
}

fn attach_name(a: &Attach) -> String {
    match a {
        Attach::Open => "open".into(),
        Attach::Component { cluster, side: Side::Whole } => format!("G{cluster}"),
        Attach::Component { cluster, side: Side::Minus } => format!("G{cluster}-"),
        Attach::Component { cluster, side: Side::Plus } => format!("G{cluster}+"),
    }
}

pub fn fibre_ascii(a: &Analysis) -> String {
    let f = &a.fibre;
    let mut out = String::new();
    let _ = writeln!(out, "special fibre ({} mode)", mode_name(f.mode));
    for c in &f.components {
        let sides = if c.sides == 2 { " (two components G-, G+)" } else { "" };
        let _ = writeln!(
            out,
            "  G{}: multiplicity {}, genus {}, over closure x{}{}",
            c.cluster, c.multiplicity, c.genus, c.geometric_count, sides
        );
    }
    for o in &f.open_p1 {
        let _ = writeln!(out, "  {} open P1 of multiplicity {} on G{}", o.count, o.multiplicity, o.cluster);
    }
    for c in &f.chains {
        let what = match c.kind {
            ChainKind::Connector => "chain",
            ChainKind::DegreeMinimal => "tail (degree-minimal)",
            ChainKind::Maximal => "tail (maximal)",
        };
        let _ = writeln!(
            out,
            "  {what} {} -> {}: {}{}",
            attach_name(&c.from),
            attach_name(&c.to),
            if c.spec.mults.is_empty() { "no components".to_string() } else { format!("{:?}", c.spec.mults) },
            if c.count > 1 { format!(" x{}", c.count) } else { String::new() }
        );
    }
    out
}

/// Graphviz rendering. In geometric mode one node per component over the
/// closure; in arithmetic mode chains over closed points of degree > 1 carry
/// a "xN" edge label.
pub fn fibre_dot(a: &Analysis) -> Result<String> {
    let mut out = String::from("graph fibre {\n  node [shape=box];\n");
    if a.fibre.mode == ResidueMode::Geometric {
        let g = a.fibre.dual_graph()?;
        for (i, (m, gen)) in g.labels.iter().enumerate() {
            let _ = writeln!(out, "  v{i} [label=\"mult={m}, genus={gen}\"];");
        }
        for (x, y) in &g.edges {
            let _ = writeln!(out, "  v{x} -- v{y};");
        }
    } else {
        let f = &a.fibre;
        for c in &f.components {
            let names: Vec<String> = if c.sides == 2 {
                vec![format!("G{}m", c.cluster), format!("G{}p", c.cluster)]
            } else {
                vec![format!("G{}", c.cluster)]
            };
            for n in names {
                let _ = writeln!(out, "  {n} [label=\"mult={}, genus={}\"];", c.multiplicity, c.genus);
            }
        }
        let id = |a: &Attach| match a {
            Attach::Open => None,
            Attach::Component { cluster, side: Side::Whole } => Some(format!("G{cluster}")),
            Attach::Component { cluster, side: Side::Minus } => Some(format!("G{cluster}m")),
            Attach::Component { cluster, side: Side::Plus } => Some(format!("G{cluster}p")),
        };
        let mut fresh = 0;
        for o in &f.open_p1 {
            let _ = writeln!(out, "  o{fresh} [shape=plaintext, label=\"mult={}, genus=0 (open)\"];", o.multiplicity);
            let _ = writeln!(out, "  G{} -- o{fresh} [label=\"x{}\"];", o.cluster, o.count);
            fresh += 1;
        }
        for c in &f.chains {
            let label = if c.count > 1 { format!(" [label=\"x{}\"]", c.count) } else { String::new() };
            let mut prev = id(&c.from);
            for m in &c.spec.mults {
                let n = format!("c{fresh}");
                fresh += 1;
                let _ = writeln!(out, "  {n} [shape=ellipse, label=\"mult={m}, genus=0\"];");
                if let Some(p) = prev {
                    let _ = writeln!(out, "  {p} -- {n}{label};");
                }
                prev = Some(n);
            }
            if let (Some(p), Some(q)) = (prev, id(&c.to)) {
                let _ = writeln!(out, "  {p} -- {q}{label};");
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::BaseField;
    use crate::parse::parse_poly;

    fn sextic(mode: ResidueMode) -> Analysis {
        let k = BaseField::rational(5).unwrap();
        let f = parse_poly(&k, "(x^2-5)^3 - 5^5").unwrap();
        analyse(&k, &f, &BuildOptions { mode, ..Default::default() }).unwrap()
    }

    #[test]
    fn json_is_deterministic_and_parses() {
        let a = serde_json::to_string(&to_json(&sextic(ResidueMode::Geometric))).unwrap();
        let b = serde_json::to_string(&to_json(&sextic(ResidueMode::Geometric))).unwrap();
        assert_eq!(a, b);
        let v: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["mode"], "geometric");
        assert_eq!(v["fibre"]["components"].as_array().unwrap().len(), 2);
        assert_eq!(v["base_field"]["p"], 5);
    }

    #[test]
    fn renderings() {
        for mode in [ResidueMode::Exact, ResidueMode::Geometric] {
            let a = sextic(mode);
            let dot = fibre_dot(&a).unwrap();
            assert!(dot.starts_with("graph fibre {") && dot.trim_end().ends_with('}'));
            assert!(dot.contains("mult=6, genus=0"));
            assert_eq!(fibre_ascii(&a), fibre_ascii(&sextic(mode)));
            assert!(picture_ascii(&a).contains("radius 5/3"));
            assert!(picture_tikz(&a).contains("\\lambda=5/3"));
            assert!(invariants_table(&a).lines().count() >= 4);
            assert!(ell_invariance_holds(&a, 0).unwrap());
        }
    }
}
