//! The special fibre of the regular SNC model: components Γ_v, open-ended
//! P¹ families, chains of P¹s with multiplicities from unimodular fraction
//! sequences, and the dual graph.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use petgraph::algo::is_isomorphic_matching;
use petgraph::graph::UnGraph;

use crate::arith::ext::{floor_q, qi};
use crate::arith::{ffpoly, FFPoly, Q};
use crate::clusters::{ClusterTree, ResidueMode};
use crate::error::{ensure, Error, Result};
use crate::invariants::InvariantRecord;

/// P¹(α, a, b): α·a = n_0/d_0 > … > n_{r+1}/d_{r+1} = α·b, consecutive
/// determinants 1, r minimal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainSpec {
    pub alpha: i64,
    pub a: Q,
    pub b: Q,
    /// n_0/d_0, …, n_{r+1}/d_{r+1}.
    pub fractions: Vec<Q>,
    /// d_1, …, d_r.
    pub dens: Vec<i64>,
    /// α·d_1, …, α·d_r.
    pub mults: Vec<i64>,
}

fn det(x: &Q, y: &Q) -> BigInt {
    x.numer() * y.denom() - y.numer() * x.denom()
}

/// The next fraction after `x` in the minimal unimodular descent towards `y`.
fn step_down(x: &Q, y: &Q) -> Q {
    let (n, d) = (x.numer(), x.denom());
    // D ≡ n⁻¹ (mod d), least positive
    let d0 = if d.is_one() {
        BigInt::one()
    } else {
        let g = n.extended_gcd(d);
        let r = g.x.mod_floor(d);
        if r.is_zero() {
            d.clone()
        } else {
            r
        }
    };
    // x − 1/(dD) ≥ y  ⇔  D ≥ 1/(d(x − y))
    let bound = Q::one() / (Q::from_integer(d.clone()) * (x - y));
    let need = bound.ceil().to_integer();
    let big_d = if d0 >= need {
        d0
    } else {
        let t = (&need - &d0 + d - BigInt::one()).div_floor(d);
        &d0 + t * d
    };
    let big_n = (n * &big_d - BigInt::one()) / d;
    Q::new(big_n, big_d)
}

/// P¹(α, a, b).
pub fn farey_chain(alpha: i64, a: &Q, b: &Q) -> Result<ChainSpec> {
    if a <= b {
        return Err(Error::DegenerateRange);
    }
    ensure!(alpha > 0, "chain with α = {alpha}");
    let top = a * qi(alpha);
    let bottom = b * qi(alpha);
    let mut fractions = vec![top.clone()];
    let mut cur = top;
    while cur != bottom {
        let next = step_down(&cur, &bottom);
        ensure!(next >= bottom && next < cur, "unimodular descent overshot");
        ensure!(det(&cur, &next).is_one(), "non-unimodular step");
        fractions.push(next.clone());
        cur = next;
        ensure!(fractions.len() < 1 << 16, "unimodular descent does not terminate");
    }
    let dens: Vec<i64> = fractions[1..fractions.len() - 1]
        .iter()
        .map(|q| q.denom().to_i64().ok_or_else(|| Error::Input("denominator overflow".into())))
        .collect::<Result<_>>()?;
    let mults = dens.iter().map(|d| d * alpha).collect();
    Ok(ChainSpec { alpha, a: a.clone(), b: b.clone(), fractions, dens, mults })
}

/// ⌊α·a − 1⌋/α, the lower end of P¹(α, a).
pub fn open_chain_bound(alpha: i64, a: &Q) -> Q {
    Q::from_integer(floor_q(&(a * qi(alpha) - Q::one()))) / qi(alpha)
}

/// P¹(α, a).
pub fn open_chain(alpha: i64, a: &Q) -> Result<ChainSpec> {
    farey_chain(alpha, a, &open_chain_bound(alpha, a))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Whole,
    Minus,
    Plus,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Attach {
    Component { cluster: usize, side: Side },
    Open,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainKind {
    /// Y_v × P¹(ε_vγ_v, s_v, …) from Γ_v to the parent component.
    Connector,
    /// Y⁰_v × P¹(ε_vγ⁰_v, −s⁰_v), open-ended.
    DegreeMinimal,
    /// Y_v × P¹(ε_vγ_v, s_v) at the maximal cluster, open-ended.
    Maximal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlacedChain {
    pub kind: ChainKind,
    pub cluster: usize,
    pub spec: ChainSpec,
    pub from: Attach,
    pub to: Attach,
    /// The closed point of Y_v (or Y⁰_v) carrying this chain, as a monic
    /// irreducible factor over k_v.
    pub point: FFPoly,
    /// Number of chains over the algebraic closure this entry stands for.
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub cluster: usize,
    pub multiplicity: i64,
    pub n: i64,
    pub genus: usize,
    pub split: bool,
    pub f: usize,
    pub ftilde: FFPoly,
    /// Irreducible components over the algebraic closure.
    pub geometric_count: usize,
    /// 2 when attachment points are routed to two sides.
    pub sides: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenFamily {
    pub cluster: usize,
    pub multiplicity: i64,
    /// X_v = {f̄_v = 0}.
    pub scheme: FFPoly,
    /// Closed points of X_v with their degrees over k_v.
    pub points: Vec<(FFPoly, usize)>,
    /// Open-ended P¹s over the algebraic closure.
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialFibre {
    pub mode: ResidueMode,
    pub components: Vec<Component>,
    pub open_p1: Vec<OpenFamily>,
    pub chains: Vec<PlacedChain>,
}

fn closed_points(rec: &InvariantRecord, g: &FFPoly, seed: u64) -> Vec<(FFPoly, usize)> {
    let fld = &rec.k_v;
    ffpoly::factor(fld, &ffpoly::monic(fld, g), seed)
        .into_iter()
        .map(|(h, _)| {
            let d = h.len() - 1;
            (h, d)
        })
        .collect()
}

fn radical_degree(rec: &InvariantRecord, g: &FFPoly) -> usize {
    let fld = &rec.k_v;
    ffpoly::squarefree(fld, g).iter().map(|(h, _)| h.len() - 1).sum()
}

/// Chains over the points of `g`, one entry per closed point (arithmetic) or
/// per geometric point (geometric). Returns (point, count, side) triples.
fn route(
    rec: &InvariantRecord,
    g: &FFPoly,
    sides: usize,
    mode: ResidueMode,
    seed: u64,
) -> Result<Vec<(FFPoly, usize, Side)>> {
    let pts = closed_points(rec, g, seed);
    let mut out = vec![];
    match mode {
        ResidueMode::Exact => {
            for (h, d) in pts {
                out.push((h, d * rec.f, Side::Whole));
            }
        }
        ResidueMode::Geometric => {
            for (h, d) in pts {
                for _ in 0..d * rec.f {
                    out.push((h.clone(), 1, Side::Whole));
                }
            }
        }
    }
    if sides == 2 {
        ensure!(
            out.len() == 2 && out.iter().all(|o| o.1 == 1),
            "split component Γ_{} with {} attachment points",
            rec.cluster,
            out.len()
        );
        out[0].2 = Side::Minus;
        out[1].2 = Side::Plus;
    }
    Ok(out)
}

/// Assembles the special fibre from a frozen tree and its records.
pub fn assemble(tree: &ClusterTree, records: &[InvariantRecord], seed: u64) -> Result<SpecialFibre> {
    let mode = tree.mode;
    let by_id: BTreeMap<usize, &InvariantRecord> = records.iter().map(|r| (r.cluster, r)).collect();
    ensure!(by_id.len() == tree.proper_nodes().count(), "records do not cover the proper clusters");
    let mut components = vec![];
    let mut sides = BTreeMap::new();
    for r in records {
        if mode == ResidueMode::Geometric {
            ensure!(r.f == 1, "geometric-mode cluster {} with residue degree {}", r.cluster, r.f);
        }
        let split = r.split();
        let geometric_count = r.f * if r.ubereven { 2 } else { 1 };
        let s = if split || (mode == ResidueMode::Geometric && r.ubereven) { 2 } else { 1 };
        sides.insert(r.cluster, s);
        components.push(Component {
            cluster: r.cluster,
            multiplicity: r.m,
            n: r.n,
            genus: r.genus,
            split,
            f: r.f,
            ftilde: r.ftilde.clone(),
            geometric_count,
            sides: s,
        });
    }

    let mut open_p1 = vec![];
    for r in records.iter().filter(|r| r.n == 1) {
        let points = closed_points(r, &r.fbar, seed);
        let count = r.f * radical_degree(r, &r.fbar);
        let node = tree.node(r.cluster);
        let sum_t: usize = tree.proper_children(r.cluster).map(|w| w.size).sum();
        let expected = qi(node.size as i64 - sum_t as i64 + node.degree as i64 * (r.p0 - 2)) / qi(r.e);
        ensure!(
            qi(count as i64) == expected,
            "open P¹ count {count} at cluster {} disagrees with (|s| − Σ|t| + d(p⁰ − 2))/e = {expected}",
            r.cluster
        );
        open_p1.push(OpenFamily { cluster: r.cluster, multiplicity: r.e, scheme: r.fbar.clone(), points, count });
    }

    let mut chains = vec![];
    for r in records {
        let node = tree.node(r.cluster);
        let alpha = r.epsilon * r.gamma;
        let here = |side| Attach::Component { cluster: r.cluster, side };
        let pts = route(r, &r.gbar, sides[&r.cluster], mode, seed)?;
        match node.parent {
            Some(w) => {
                let pw = tree.node(w);
                let drop = qi(r.p) / qi(2) * (&r.lambda - qi(r.degree as i64) / qi(pw.degree as i64) * pw.radius.q());
                let spec = farey_chain(alpha, &r.s, &(&r.s - drop))?;
                let parent_sides = sides[&w];
                if parent_sides == 2 {
                    ensure!(pts.len() == 2, "two-sided parent Γ_{w} met by {} points of Y_{}", pts.len(), r.cluster);
                }
                for (k, (pt, count, side)) in pts.into_iter().enumerate() {
                    let to_side = match (parent_sides, k) {
                        (2, 0) => Side::Minus,
                        (2, _) => Side::Plus,
                        _ => Side::Whole,
                    };
                    chains.push(PlacedChain {
                        kind: ChainKind::Connector,
                        cluster: r.cluster,
                        spec: spec.clone(),
                        from: here(side),
                        to: Attach::Component { cluster: w, side: to_side },
                        point: pt,
                        count,
                    });
                }
            }
            None => {
                let spec = open_chain(alpha, &r.s)?;
                for (pt, count, side) in pts {
                    chains.push(PlacedChain {
                        kind: ChainKind::Maximal,
                        cluster: r.cluster,
                        spec: spec.clone(),
                        from: here(side),
                        to: Attach::Open,
                        point: pt,
                        count,
                    });
                }
            }
        }
        if let Some(g0) = &r.gbar0 {
            let spec = open_chain(r.epsilon * r.gamma0, &-&r.s0)?;
            for (pt, count, side) in route(r, g0, sides[&r.cluster], mode, seed)? {
                chains.push(PlacedChain {
                    kind: ChainKind::DegreeMinimal,
                    cluster: r.cluster,
                    spec: spec.clone(),
                    from: here(side),
                    to: Attach::Open,
                    point: pt,
                    count,
                });
            }
        }
    }
    let fibre = SpecialFibre { mode, components, open_p1, chains };
    fibre.check()?;
    Ok(fibre)
}

impl SpecialFibre {
    fn check(&self) -> Result<()> {
        let comps: BTreeMap<usize, &Component> = self.components.iter().map(|c| (c.cluster, c)).collect();
        for ch in &self.chains {
            for end in [&ch.from, &ch.to] {
                if let Attach::Component { cluster, side } = end {
                    let c = comps.get(cluster);
                    ensure!(c.is_some(), "chain attached to a missing component {cluster}");
                    let two = c.unwrap().sides == 2;
                    ensure!(
                        two == (*side != Side::Whole),
                        "side {side:?} on a component with {} sides",
                        c.unwrap().sides
                    );
                }
            }
            let s = &ch.spec;
            for w in s.fractions.windows(2) {
                ensure!(det(&w[0], &w[1]).is_one(), "non-unimodular chain");
            }
        }
        Ok(())
    }

    /// The dual graph over the algebraic closure (geometric mode only).
    pub fn dual_graph(&self) -> Result<FibreGraph> {
        ensure!(self.mode == ResidueMode::Geometric, "dual graph requested in arithmetic mode");
        let mut g = FibreGraph::default();
        let mut at = BTreeMap::new();
        for c in &self.components {
            if c.sides == 2 {
                at.insert((c.cluster, Side::Minus), g.add(c.multiplicity, 0));
                at.insert((c.cluster, Side::Plus), g.add(c.multiplicity, 0));
            } else {
                at.insert((c.cluster, Side::Whole), g.add(c.multiplicity, c.genus));
            }
        }
        let vertex = |a: &Attach| match a {
            Attach::Component { cluster, side } => Some(at[&(*cluster, *side)]),
            Attach::Open => None,
        };
        for o in &self.open_p1 {
            let base = at[&(o.cluster, Side::Whole)];
            for _ in 0..o.count {
                let x = g.add(o.multiplicity, 0);
                g.join(base, x);
            }
        }
        for ch in &self.chains {
            for _ in 0..ch.count {
                let mut prev = vertex(&ch.from);
                for &m in &ch.spec.mults {
                    let x = g.add(m, 0);
                    if let Some(p) = prev {
                        g.join(p, x);
                    }
                    prev = Some(x);
                }
                if let (Some(p), Some(q)) = (prev, vertex(&ch.to)) {
                    g.join(p, q);
                }
            }
        }
        Ok(g)
    }
}

/// A multigraph with (multiplicity, genus) labels.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FibreGraph {
    pub labels: Vec<(i64, usize)>,
    pub edges: Vec<(usize, usize)>,
}

impl FibreGraph {
    pub fn add(&mut self, mult: i64, genus: usize) -> usize {
        self.labels.push((mult, genus));
        self.labels.len() - 1
    }

    pub fn join(&mut self, a: usize, b: usize) {
        self.edges.push((a.min(b), a.max(b)));
    }

    /// Parallel edges collapsed into one edge weighted by their number.
    fn simple(&self) -> UnGraph<(i64, usize), usize> {
        let mut g = UnGraph::new_undirected();
        let ids: Vec<_> = self.labels.iter().map(|l| g.add_node(*l)).collect();
        let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for e in &self.edges {
            *counts.entry(*e).or_default() += 1;
        }
        for ((a, b), c) in counts {
            g.add_edge(ids[a], ids[b], c);
        }
        g
    }

    /// Isomorphism preserving (multiplicity, genus) labels and edge counts.
    pub fn is_isomorphic(&self, other: &FibreGraph) -> bool {
        is_isomorphic_matching(&self.simple(), &other.simple(), |a, b| a == b, |a, b| a == b)
    }
}

/// Whether every interior fraction of the chain is needed (deleting one
/// breaks unimodularity).
pub fn is_minimal(spec: &ChainSpec) -> bool {
    let f = &spec.fractions;
    (1..f.len().saturating_sub(1)).all(|i| !det(&f[i - 1], &f[i + 1]).is_one())
}

pub fn is_unimodular(spec: &ChainSpec) -> bool {
    spec.fractions.windows(2).all(|w| det(&w[0], &w[1]).is_one() && w[0] > w[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ext::qf;
    use crate::arith::BaseField;
    use crate::clusters::{build_cluster_tree, BuildOptions};
    use crate::invariants::compute_records;

    #[test]
    fn farey_examples() {
        let c = farey_chain(2, &qf(-5, 3), &qi(-2)).unwrap();
        assert_eq!(c.fractions, vec![qf(-10, 3), qf(-7, 2), qi(-4)]);
        assert_eq!(c.mults, vec![4]);
        let c = farey_chain(2, &qf(5, 6), &qi(0)).unwrap();
        assert_eq!(c.fractions, vec![qf(5, 3), qf(3, 2), qi(1), qi(0)]);
        assert_eq!(c.mults, vec![4, 2]);
        assert!(farey_chain(1, &qi(4), &qi(3)).unwrap().mults.is_empty());
        assert_eq!(farey_chain(1, &qi(3), &qi(3)), Err(Error::DegenerateRange));
        assert_eq!(farey_chain(1, &qi(2), &qi(3)), Err(Error::DegenerateRange));
    }

    #[test]
    fn open_bounds() {
        assert_eq!(open_chain_bound(2, &qf(5, 6)), qi(0));
        assert_eq!(open_chain_bound(1, &qf(1, 2)), qi(-1));
        assert_eq!(open_chain_bound(2, &qi(1)), qf(1, 2));
        assert_eq!(open_chain(1, &qf(1, 2)).unwrap().mults, vec![1]);
        assert!(open_chain(2, &qi(1)).unwrap().mults.is_empty());
    }

    pub(crate) fn sextic_graph() -> FibreGraph {
        let mut g = FibreGraph::default();
        let a = g.add(2, 0);
        let b = g.add(6, 0);
        let c = g.add(4, 0);
        g.join(a, c);
        g.join(c, b);
        for _ in 0..2 {
            let x = g.add(4, 0);
            let y = g.add(2, 0);
            g.join(b, x);
            g.join(x, y);
            let z = g.add(1, 0);
            g.join(a, z);
        }
        g
    }

    #[test]
    fn sextic_fibre_graph() {
        for p in [3i64, 5, 7, 11] {
            let k = BaseField::rational(p as u64).unwrap();
            let phi = k.poly_i64(&[-p, 0, 1]);
            let f = k.psub(&k.ppow(&phi, 3), &k.poly_i64(&[p.pow(5)]));
            for mode in [ResidueMode::Exact, ResidueMode::Geometric] {
                let t = build_cluster_tree(&k, &f, &BuildOptions { mode, ..Default::default() }).unwrap();
                let r = compute_records(&t).unwrap();
                let fib = assemble(&t, &r, 0).unwrap();
                assert_eq!(fib.components.len(), 2);
                assert!(fib.open_p1.is_empty());
                if mode == ResidueMode::Geometric {
                    let g = fib.dual_graph().unwrap();
                    assert!(g.is_isomorphic(&sextic_graph()), "p = {p}: {g:?}");
                }
            }
        }
    }

    #[test]
    fn isomorphism_distinguishes_attachment() {
        let mut g = sextic_graph();
        assert!(g.is_isomorphic(&sextic_graph()));
        // move one [1] tail from the multiplicity-2 component to the 6
        let last = g.edges.len() - 1;
        g.edges[last] = (1, g.edges[last].1);
        assert!(!g.is_isomorphic(&sextic_graph()));
        let mut two = FibreGraph::default();
        let (x, y) = (two.add(2, 0), two.add(2, 0));
        two.join(x, y);
        let one = two.clone();
        two.join(y, x);
        assert!(!two.is_isomorphic(&one));
        assert!(two.is_isomorphic(&two.clone()));
    }
}
