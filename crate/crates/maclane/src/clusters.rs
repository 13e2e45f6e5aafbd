//! The tree of MacLane clusters of a separable polynomial: construction by
//! Newton polygon and residual polynomial refinement, centre assignment and
//! cluster chains.

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::arith::ext::{qi, ExtRat, Q};
use crate::arith::ffpoly;
use crate::arith::{KPoly, K};
use crate::error::{ensure, Error, Result};
use crate::newton::{self, newton_polygon, ord_factor, reduction, reduction_with_edge};
use crate::valuation::MacLaneVal;

/// Residue handling: `Exact` works over k itself, `Geometric` enlarges K by
/// unramified extensions until every multiple residual factor is linear.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ResidueMode {
    Exact,
    Geometric,
}

#[derive(Clone, Debug)]
pub struct BuildOptions {
    pub mode: ResidueMode,
    /// Largest residue degree [k' : F_p] geometric mode may reach.
    pub extension_budget: usize,
    pub seed: u64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { mode: ResidueMode::Exact, extension_budget: 64, seed: 0 }
    }
}

#[derive(Clone, Debug)]
pub struct ClusterNode {
    pub id: usize,
    pub parent: Option<usize>,
    /// The cluster chain; for leaves a pseudo-valuation [.., φ = ∞].
    pub valuation: MacLaneVal,
    pub centre: KPoly,
    pub degree: usize,
    pub radius: ExtRat,
    /// Number of roots of f in the discoid.
    pub size: usize,
    /// Endpoints i⁰_v ≤ i_v of the edge L_v(f).
    pub i_v: usize,
    pub i0_v: usize,
    pub children: Vec<usize>,
    pub is_proper: bool,
    pub degree_minimal: bool,
    /// Smallest degree of a leaf orbit directly below.
    pub min_orbit_degree: Option<usize>,
    /// Leaves only: the centre divides f, so it is the orbit's minimal
    /// polynomial rather than an approximant.
    pub exact: bool,
}

#[derive(Clone, Debug)]
pub struct ClusterTree {
    pub k: K,
    /// The (normalised) polynomial the tree describes.
    pub f: KPoly,
    pub nodes: Vec<ClusterNode>,
    pub root: usize,
    pub mode: ResidueMode,
}

/// f(p^{−c}·x), with c ≥ 0 minimal such that every root has positive valuation.
pub fn normalize_input(k: &K, f: &KPoly) -> Result<(KPoly, u32)> {
    if !k.is_separable(f) {
        return Err(Error::NotSeparable);
    }
    let gauss = MacLaneVal::gauss(k);
    let poly = newton_polygon(&gauss, &k.x(), f);
    let Some(min_val): Option<Q> = poly.edges().iter().map(|e| e.lambda.clone()).min() else {
        return Ok((f.clone(), 0));
    };
    if min_val > Q::zero() {
        return Ok((f.clone(), 0));
    }
    let c: num_bigint::BigInt = (-min_val).floor().to_integer() + 1;
    let c = c.to_u32().ok_or_else(|| Error::Input("normalisation shift too large".into()))?;
    Ok((k.psubst_scale(f, &k.p_pow(-(c as i64))), c))
}

const LEAF_REFINE_STEPS: usize = 24;

/// A node before flattening.
struct Cand {
    val: MacLaneVal,
    size: usize,
    proper: bool,
    exact: bool,
    children: Vec<Cand>,
}

enum Stop {
    Fail(Error),
    Extend(usize),
}

impl From<Error> for Stop {
    fn from(e: Error) -> Self {
        Stop::Fail(e)
    }
}

type Step<T> = std::result::Result<T, Stop>;

struct Builder<'a> {
    k: &'a K,
    f: &'a KPoly,
    mode: ResidueMode,
    seed: u64,
    max_depth: usize,
}

impl Builder<'_> {
    /// The clusters whose roots r satisfy v_K(φ(r)) > v(φ), nested along the
    /// principal polygon N⁻_{v,φ}(f); `None` if there are none.
    fn explore(&self, v: &MacLaneVal, phi: &KPoly, depth: usize) -> Step<Option<Cand>> {
        if depth > self.max_depth {
            return Err(Error::InternalInconsistency(format!("refinement depth exceeded {}", self.max_depth)).into());
        }
        let poly = newton_polygon(v, phi, self.f);
        let ord = poly.leftmost().0;
        ensure!(ord <= 1, "centre {} divides f {ord} times", self.k.fmt_poly(phi, "x"));
        let mut inner = if ord == 1 {
            let val = v.augment(phi, ExtRat::Inf)?;
            Some(Cand { size: val.degree(), val, proper: false, exact: true, children: vec![] })
        } else {
            None
        };
        for edge in poly.principal_part(&v.eval(phi)).edges() {
            let w = v.augment(phi, ExtRat::Fin(edge.lambda.clone()))?;
            inner = Some(self.process(w, inner, depth)?);
        }
        Ok(inner)
    }

    /// Sharpens the centre of a leaf orbit by same-degree augmentations until
    /// it divides f or the step budget runs out.
    fn refine_leaf(&self, w: &MacLaneVal, mut phi: KPoly) -> Result<(KPoly, bool)> {
        let k = self.k;
        let mut cur = w.clone();
        for _ in 0..LEAF_REFINE_STEPS {
            if k.prem(self.f, &phi).is_empty() {
                return Ok((phi, true));
            }
            let poly = newton_polygon(&cur, &phi, self.f);
            let edges = poly.principal_part(&cur.eval(&phi)).edges();
            ensure!(
                edges.len() == 1 && edges[0].left.0 == 0 && edges[0].right.0 == 1,
                "leaf approximant {} does not isolate one orbit",
                k.fmt_poly(&phi, "x")
            );
            cur = cur.augment(&phi, ExtRat::Fin(edges[0].lambda.clone()))?;
            let red = reduction(&cur, self.f)?;
            phi = newton::lift_key(&cur, &ffpoly::monic(cur.residue_field(), &red))?;
        }
        let exact = k.prem(self.f, &phi).is_empty();
        Ok((phi, exact))
    }

    /// Children of the candidate w from its residual polynomial, then the
    /// collapse rule for a single same-degree child.
    fn process(&self, w: MacLaneVal, deeper: Option<Cand>, depth: usize) -> Step<Cand> {
        let (red, edge) = reduction_with_edge(&w, self.f)?;
        let edge = edge.expect("candidate above the Gauss valuation");
        let size = edge.i1 * w.degree();
        let fld = w.residue_field().clone();
        let mut children: Vec<Cand> = deeper.into_iter().collect();
        for (h, m) in ffpoly::factor(&fld, &ffpoly::monic(&fld, &red), self.seed) {
            let hdeg = h.len() - 1;
            let phi_h = newton::lift_key(&w, &h)?;
            if m == 1 {
                let (phi_h, exact) = self.refine_leaf(&w, phi_h)?;
                let val = w.augment(&phi_h, ExtRat::Inf)?;
                children.push(Cand { size: val.degree(), val, proper: false, exact, children: vec![] });
                continue;
            }
            if self.mode == ResidueMode::Geometric && hdeg > 1 {
                return Err(Stop::Extend(fld.deg() * hdeg));
            }
            let child = self.explore(&w, &phi_h, depth + 1)?;
            let child = child.ok_or_else(|| {
                Error::InternalInconsistency("multiple residual factor without roots beyond it".into())
            })?;
            ensure!(
                child.size == m * (phi_h.len() - 1),
                "child of {} has {} roots, expected {m}·{}",
                w,
                child.size,
                phi_h.len() - 1
            );
            children.push(child);
        }
        let total: usize = children.iter().map(|c| c.size).sum();
        ensure!(total == size, "children of {w} hold {total} roots, the edge predicts {size}");
        if children.len() == 1 && children[0].val.degree() == w.degree() {
            return Ok(children.pop().unwrap());
        }
        Ok(Cand { val: w, size, proper: true, exact: false, children })
    }
}

fn depth_bound(k: &K, f: &KPoly) -> usize {
    let d = f.len() - 1;
    let disc = match k.disc_val(f) {
        ExtRat::Fin(q) => q.ceil().to_integer().to_usize().unwrap_or(0),
        ExtRat::Inf => 0,
    };
    2 * disc + d
}

fn flatten(c: Cand, parent: Option<usize>, nodes: &mut Vec<ClusterNode>) -> usize {
    let id = nodes.len();
    nodes.push(ClusterNode {
        id,
        parent,
        centre: c.val.centre().clone(),
        degree: c.val.degree(),
        radius: c.val.radius(),
        valuation: c.val,
        size: c.size,
        i_v: 1,
        i0_v: 0,
        children: vec![],
        is_proper: c.proper,
        degree_minimal: false,
        min_orbit_degree: None,
        exact: c.exact,
    });
    let kids: Vec<usize> = c.children.into_iter().map(|ch| flatten(ch, Some(id), nodes)).collect();
    nodes[id].children = kids;
    id
}

/// The tree of all MacLane clusters of a normalised separable f, with
/// centres assigned, cluster chains attached and every node checked.
pub fn build_cluster_tree(k: &K, f: &KPoly, opts: &BuildOptions) -> Result<ClusterTree> {
    if !k.is_separable(f) {
        return Err(Error::NotSeparable);
    }
    let mut k = k.clone();
    let mut f = f.clone();
    loop {
        let b = Builder { k: &k, f: &f, mode: opts.mode, seed: opts.seed, max_depth: depth_bound(&k, &f) };
        let gauss = MacLaneVal::gauss(&k);
        match b.explore(&gauss, &k.x(), 0) {
            Ok(Some(root)) => {
                let mut nodes = vec![];
                let root = flatten(root, None, &mut nodes);
                let mut tree = ClusterTree { k: k.clone(), f: f.clone(), nodes, root, mode: opts.mode };
                tree.fill_structure()?;
                tree.assign_centres();
                tree.attach_cluster_chains()?;
                tree.check()?;
                return Ok(tree);
            }
            Ok(None) => return Err(Error::Input("f has a root of non-positive valuation; normalise it first".into())),
            Err(Stop::Fail(e)) => return Err(e),
            Err(Stop::Extend(need)) => {
                let target = k.degree().lcm(&need);
                if target > opts.extension_budget {
                    return Err(Error::ResidueModeOverflow { needed: target, budget: opts.extension_budget });
                }
                let k2 = k.extend_to_degree(target, opts.seed)?;
                f = f.iter().map(|c| k.embed_into(c, &k2)).collect::<Result<_>>()?;
                k = k2;
            }
        }
    }
}

impl ClusterTree {
    pub fn node(&self, id: usize) -> &ClusterNode {
        &self.nodes[id]
    }

    pub fn root(&self) -> &ClusterNode {
        &self.nodes[self.root]
    }

    /// Proper clusters in construction (pre-)order.
    pub fn proper_nodes(&self) -> impl Iterator<Item = &ClusterNode> {
        self.nodes.iter().filter(|n| n.is_proper)
    }

    pub fn leaves(&self) -> impl Iterator<Item = &ClusterNode> {
        self.nodes.iter().filter(|n| !n.is_proper)
    }

    pub fn proper_children(&self, id: usize) -> impl Iterator<Item = &ClusterNode> {
        self.nodes[id].children.iter().map(|&c| &self.nodes[c]).filter(|n| n.is_proper)
    }

    pub fn leaf_children(&self, id: usize) -> impl Iterator<Item = &ClusterNode> {
        self.nodes[id].children.iter().map(|&c| &self.nodes[c]).filter(|n| !n.is_proper)
    }

    /// `id` and its ancestors, innermost first.
    pub fn ancestors(&self, id: usize) -> Vec<usize> {
        let mut out = vec![id];
        let mut cur = id;
        while let Some(p) = self.nodes[cur].parent {
            out.push(p);
            cur = p;
        }
        out
    }

    pub fn is_below(&self, id: usize, anc: usize) -> bool {
        self.ancestors(id).contains(&anc)
    }

    /// The smallest cluster containing both.
    pub fn lca(&self, a: usize, b: usize) -> usize {
        let pa = self.ancestors(a);
        *self.ancestors(b).iter().find(|x| pa.contains(x)).expect("common root")
    }

    pub fn leaves_below(&self, id: usize) -> Vec<usize> {
        self.leaves().filter(|l| self.is_below(l.id, id)).map(|l| l.id).collect()
    }

    /// The cluster chain of a node.
    pub fn cluster_chain(&self, id: usize) -> &MacLaneVal {
        &self.nodes[id].valuation
    }

    /// p⁰_v: 1 for a degree-minimal cluster with a root of K-degree deg v.
    pub fn p0_flag(&self, id: usize) -> u8 {
        let n = &self.nodes[id];
        if n.degree_minimal && n.min_orbit_degree == Some(n.degree) {
            1
        } else {
            2
        }
    }

    /// v_K(c_f) + Σ_r λ_{v∧v_r}/deg(v∧v_r), the meets read off the tree.
    pub fn nu_from_leaves(&self, id: usize) -> ExtRat {
        let lc = self.k.val(self.f.last().unwrap());
        let mut acc = lc.q().clone();
        for leaf in self.leaves() {
            let m = if self.is_below(leaf.id, id) { id } else { self.lca(leaf.id, id) };
            let m = &self.nodes[m];
            acc += m.radius.q() * qi(leaf.size as i64) / qi(m.degree as i64);
        }
        ExtRat::Fin(acc)
    }

    fn fill_structure(&mut self) -> Result<()> {
        for id in 0..self.nodes.len() {
            let (proper, deg) = (self.nodes[id].is_proper, self.nodes[id].degree);
            if proper {
                let e = newton::selected_edge_of(&self.nodes[id].valuation, &self.f)?;
                self.nodes[id].i_v = e.i1;
                self.nodes[id].i0_v = e.i0;
            }
            let dm = proper && !self.proper_children(id).any(|c| c.degree == deg);
            let mo = self.leaf_children(id).map(|c| c.degree).min();
            self.nodes[id].degree_minimal = dm;
            self.nodes[id].min_orbit_degree = mo;
        }
        Ok(())
    }

    /// Degree-minimal clusters take the minimal polynomial of a root of their
    /// own degree when one lies directly below; the others inherit the centre
    /// of a same-degree proper child.
    fn assign_centres(&mut self) {
        for id in (0..self.nodes.len()).rev() {
            let n = &self.nodes[id];
            if !n.is_proper {
                continue;
            }
            let d = n.degree;
            let centre = if n.degree_minimal {
                let mut leaves: Vec<&ClusterNode> = self.leaf_children(id).filter(|l| l.degree == d).collect();
                leaves.sort_by_key(|l| !l.exact);
                leaves.first().map(|l| l.centre.clone())
            } else {
                self.proper_children(id).find(|c| c.degree == d).map(|c| c.centre.clone())
            };
            if let Some(c) = centre {
                self.nodes[id].centre = c;
            }
        }
    }

    /// Rebuilds every valuation as its cluster chain: the parent's chain with
    /// the node's centre appended, or with the last radius raised when the
    /// centre is shared.
    fn attach_cluster_chains(&mut self) -> Result<()> {
        let gauss = MacLaneVal::gauss(&self.k);
        for id in 0..self.nodes.len() {
            let n = &self.nodes[id];
            let (base, parent_centre) = match n.parent {
                None => (gauss.clone(), None),
                Some(p) => (self.nodes[p].valuation.clone(), Some(self.nodes[p].centre.clone())),
            };
            let base = if parent_centre.as_ref() == Some(&n.centre) { base.prefix(base.depth() - 1) } else { base };
            let chain = base.extend(&n.centre, n.radius.clone()).map_err(|e| {
                Error::InternalInconsistency(format!(
                    "cluster chain step {} = {} over {base}: {e}",
                    self.k.fmt_poly(&n.centre, "x"),
                    n.radius
                ))
            })?;
            ensure!(
                chain.same(&n.valuation),
                "cluster chain {chain} differs from the constructed valuation {}",
                n.valuation
            );
            if n.is_proper {
                let e = newton::selected_edge_of(&chain, &self.f)?;
                ensure!(e.i1 == n.i_v, "right endpoint moved from {} to {} on the cluster chain", n.i_v, e.i1);
                self.nodes[id].i0_v = e.i0;
            }
            self.nodes[id].valuation = chain;
        }
        Ok(())
    }

    /// Structural assertions on every node and parent/child pair.
    pub fn check(&self) -> Result<()> {
        let root = self.root();
        ensure!(root.parent.is_none() && root.degree == 1, "root must have degree 1");
        ensure!(root.radius > ExtRat::zero(), "root radius must be positive");
        let total: usize = self.leaves().map(|l| l.size).sum();
        ensure!(total == self.f.len() - 1, "leaf orbits hold {total} roots, f has degree {}", self.f.len() - 1);
        for n in &self.nodes {
            ensure!(n.radius == n.valuation.eval(&n.centre), "radius of node {} is not v(centre)", n.id);
            ensure!(
                n.valuation.centre() == &n.centre && n.valuation.radius() == n.radius,
                "chain of node {} ends elsewhere",
                n.id
            );
            if !n.is_proper {
                ensure!(n.size == n.degree && n.radius.is_inf() && n.children.is_empty(), "malformed leaf {}", n.id);
                continue;
            }
            ensure!(n.size > n.degree, "proper node {} has {} roots and degree {}", n.id, n.size, n.degree);
            ensure!(n.i_v * n.degree == n.size, "node {}: i_v·deg v = {} but |s| = {}", n.id, n.i_v * n.degree, n.size);
            let below: usize = n.children.iter().map(|&c| self.nodes[c].size).sum();
            ensure!(below == n.size, "node {}: children hold {below} of {} roots", n.id, n.size);
            let leaves: usize = self.leaves_below(n.id).iter().map(|&l| self.nodes[l].size).sum();
            ensure!(leaves == n.size, "node {}: leaf orbits below hold {leaves} of {} roots", n.id, n.size);
            let nu = n.valuation.eval(&self.f);
            let nu2 = self.nu_from_leaves(n.id);
            ensure!(nu == nu2, "node {}: v(f) = {nu} but the leaf sum gives {nu2}", n.id);
            self.check_chain(n)?;
            self.check_children(n)?;
            self.check_degree_minimality(n)?;
        }
        Ok(())
    }

    fn check_chain(&self, n: &ClusterNode) -> Result<()> {
        let v = &n.valuation;
        let mut centres: Vec<&KPoly> = self.ancestors(n.id).iter().map(|&a| &self.nodes[a].centre).collect();
        centres.dedup();
        let steps = v.steps();
        ensure!(
            steps.len() == centres.len(),
            "node {}: chain length {} for {} centres",
            n.id,
            steps.len(),
            centres.len()
        );
        for (s, c) in steps.iter().zip(centres.iter().rev()) {
            ensure!(&s.0 == *c, "node {}: chain centres differ from ancestral centres", n.id);
        }
        for i in 1..v.depth() {
            let (a, b) = (&v.level(i).phi, &v.level(i + 1).phi);
            ensure!(!v.prefix(i).equiv(b, a), "node {}: consecutive chain centres are equivalent", n.id);
        }
        Ok(())
    }

    fn check_children(&self, n: &ClusterNode) -> Result<()> {
        let fred = reduction(&n.valuation, &self.f)?;
        let fld = n.valuation.residue_field();
        for &c in &n.children {
            let c = &self.nodes[c];
            ensure!(
                n.valuation.leq(&c.valuation) && !c.valuation.leq(&n.valuation),
                "child {} not above parent {}",
                c.id,
                n.id
            );
            ensure!(
                c.radius > n.radius && c.degree >= n.degree,
                "child {} radius/degree not above parent {}",
                c.id,
                n.id
            );
            if !c.is_proper {
                continue;
            }
            let r = reduction(&n.valuation, &c.centre)?;
            if c.centre == n.centre {
                ensure!(r.len() == 1, "shared centre of {} reduces to a non-unit", c.id);
                continue;
            }
            let r = ffpoly::monic(fld, &r);
            ensure!(ffpoly::is_irreducible(fld, &r), "centre of child {} has reducible reduction", c.id);
            let m = ord_factor(fld, &fred, &r);
            ensure!(
                m * c.degree == c.size,
                "child {}: ord of its residual factor is {m}, |t|/deg w = {}/{}",
                c.id,
                c.size,
                c.degree
            );
        }
        Ok(())
    }

    /// δ_v = 0 iff b_v = 1 and f|_v has a multiple linear factor, for nodes
    /// whose radius gives the steepest principal slope along their centre.
    fn check_degree_minimality(&self, n: &ClusterNode) -> Result<()> {
        let v = &n.valuation;
        let prev = v.prefix(v.depth() - 1);
        let poly = newton_polygon(&prev, &n.centre, &self.f).principal_part(&prev.eval(&n.centre));
        let steepest = poly.edges().first().map(|e| ExtRat::Fin(e.lambda.clone()));
        if steepest != Some(n.radius.clone()) {
            return Ok(());
        }
        let fld = v.residue_field();
        let fred = reduction(v, &self.f)?;
        let linear_multiple =
            ffpoly::factor(fld, &ffpoly::monic(fld, &fred), 0).iter().any(|(h, m)| h.len() == 2 && *m > 1);
        let predicted = v.level(v.depth()).e == 1 && linear_multiple;
        ensure!(
            predicted == !n.degree_minimal,
            "node {}: degree-minimality {} but the residual test predicts {}",
            n.id,
            n.degree_minimal,
            !predicted
        );
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::BaseField;

    fn sextic(p: u64) -> (K, KPoly) {
        let k = BaseField::rational(p).unwrap();
        let pp = p as i64;
        let phi = k.poly_i64(&[-pp, 0, 1]);
        let f = k.psub(&k.ppow(&phi, 3), &k.poly_i64(&[pp.pow(5)]));
        (k, f)
    }

    #[test]
    fn sextic_tree() {
        for p in [3, 5, 7, 11] {
            let (k, f) = sextic(p);
            let (g, c) = normalize_input(&k, &f).unwrap();
            assert_eq!(c, 0);
            assert_eq!(g, f);
            let t = build_cluster_tree(&k, &f, &BuildOptions::default()).unwrap();
            let proper: Vec<_> = t.proper_nodes().collect();
            assert_eq!(proper.len(), 2);
            let (v1, v2) = (proper[0], proper[1]);
            assert_eq!((v1.degree, v1.radius.clone(), v1.size), (1, ExtRat::frac(1, 2), 6));
            assert_eq!((v2.degree, v2.radius.clone(), v2.size), (2, ExtRat::frac(5, 3), 6));
            assert_eq!(v2.parent, Some(v1.id));
            let leaves: Vec<_> = t.leaves().collect();
            assert_eq!(leaves.len(), 1);
            assert_eq!(leaves[0].degree, 6);
            assert_eq!(leaves[0].parent, Some(v2.id));
            assert_eq!(t.p0_flag(v1.id), 2);
            assert_eq!(t.p0_flag(v2.id), 2);
            assert_eq!(k.fmt_poly(&v1.centre, "x"), "x");
            assert_eq!(k.fmt_poly(&v2.centre, "x"), format!("x^2 - {p}"));
            assert_eq!(t.cluster_chain(v2.id).depth(), 2);
            assert_eq!(t.cluster_chain(v1.id).depth(), 1);
        }
    }

    #[test]
    fn normalisation_shifts() {
        let k = BaseField::rational(5).unwrap();
        let f = k.poly_q(&[Q::new((-1).into(), 5.into()), Q::zero(), qi(1)]);
        assert_eq!(normalize_input(&k, &f).unwrap().1, 1);
        let f = k.poly_i64(&[0, -1, 1]);
        let (g, c) = normalize_input(&k, &f).unwrap();
        assert_eq!(c, 1);
        assert_eq!(g, k.poly_q(&[Q::zero(), Q::new((-1).into(), 5.into()), Q::new(1.into(), 25.into())]));
        let f = k.poly_i64(&[1, 0, 1, 0]);
        assert!(matches!(normalize_input(&k, &k.pmul(&f, &f)), Err(Error::NotSeparable)));
    }

    #[test]
    fn single_quadratic() {
        let k = BaseField::rational(3).unwrap();
        let f = k.poly_i64(&[-3, 0, 1]);
        let t = build_cluster_tree(&k, &f, &BuildOptions::default()).unwrap();
        assert_eq!(t.proper_nodes().count(), 1);
        let r = t.root();
        assert_eq!((r.degree, r.radius.clone(), r.size), (1, ExtRat::frac(1, 2), 2));
        assert!(r.degree_minimal);
        assert_eq!(t.p0_flag(r.id), 2);
        assert_eq!(t.leaves().next().unwrap().degree, 2);
        assert_eq!(r.valuation.eval(&f), ExtRat::int(1));
    }

    #[test]
    fn rational_roots() {
        let k = BaseField::rational(3).unwrap();
        let f = k.pmul(&k.poly_i64(&[-3, 1]), &k.poly_i64(&[-6, 1]));
        let t = build_cluster_tree(&k, &f, &BuildOptions::default()).unwrap();
        let r = t.root();
        assert_eq!((r.radius.clone(), r.size), (ExtRat::int(1), 2));
        assert_eq!(t.p0_flag(r.id), 1);
        assert!(t.leaves().all(|l| l.exact && l.degree == 1));
    }

    #[test]
    fn collapse_to_same_degree_child() {
        // Both roots near p; the top candidate D(x, 1) is not minimal.
        let k = BaseField::rational(3).unwrap();
        let f = k.pmul(&k.poly_i64(&[-3, 1]), &k.poly_i64(&[-12, 1]));
        let t = build_cluster_tree(&k, &f, &BuildOptions::default()).unwrap();
        assert_eq!(t.proper_nodes().count(), 1);
        let r = t.root();
        assert_eq!(r.radius, ExtRat::int(2));
        assert_eq!(r.valuation.depth(), 1);
    }

    #[test]
    fn shared_centre_chain() {
        // Roots 3, 12 (distance 2) and 6 (distance 1 from both): two
        // degree-1 clusters sharing a centre.
        let k = BaseField::rational(3).unwrap();
        let mut f = k.poly_i64(&[1]);
        for a in [3, 12, 6] {
            f = k.pmul(&f, &k.poly_i64(&[-a, 1]));
        }
        let t = build_cluster_tree(&k, &f, &BuildOptions::default()).unwrap();
        let proper: Vec<_> = t.proper_nodes().collect();
        assert_eq!(proper.len(), 2);
        assert_eq!(proper[0].radius, ExtRat::int(1));
        assert_eq!(proper[1].radius, ExtRat::int(2));
        assert!(!proper[0].degree_minimal);
        assert_eq!(proper[0].centre, proper[1].centre);
        assert_eq!(t.cluster_chain(proper[1].id).depth(), 1);
    }

    #[test]
    fn geometric_mode_extends() {
        // (x² − 2·9)(x² − 2·9 − 27): over F_3 the residual factor X² − 2 is
        // irreducible and repeated.
        let k = BaseField::rational(3).unwrap();
        let f = k.pmul(&k.poly_i64(&[-18, 0, 1]), &k.poly_i64(&[-45, 0, 1]));
        let exact = build_cluster_tree(&k, &f, &BuildOptions::default()).unwrap();
        let opts = BuildOptions { mode: ResidueMode::Geometric, ..Default::default() };
        let geo = build_cluster_tree(&k, &f, &opts).unwrap();
        assert_eq!(geo.k.degree(), 2);
        assert!(geo.proper_nodes().count() > exact.proper_nodes().count());
        let small = BuildOptions { mode: ResidueMode::Geometric, extension_budget: 1, seed: 0 };
        assert!(matches!(build_cluster_tree(&k, &f, &small), Err(Error::ResidueModeOverflow { .. })));
    }
}
