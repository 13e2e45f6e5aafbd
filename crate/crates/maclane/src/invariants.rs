//! Per-cluster invariants: the numeric data attached to each proper cluster,
//! the residual constants ḡ_v, ḡ⁰_v and the residual polynomials f̄_v, f̃_v.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::ext::{floor_q, in_2z, is_odd_integer, qi};
use crate::arith::{ffpoly, ExtRat, FFElem, FFPoly, Fq, Q};
use crate::clusters::ClusterTree;
use crate::error::{ensure, Error, Result};
use crate::newton;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantRecord {
    pub cluster: usize,
    pub epsilon: i64,
    pub b: i64,
    pub ell: i64,
    pub f: usize,
    pub k_v: Fq,
    pub degree: usize,
    pub lambda: Q,
    pub nu: Q,
    pub s: Q,
    pub s0: Q,
    pub e: i64,
    pub n: i64,
    pub m: i64,
    pub p: i64,
    pub gamma: i64,
    pub delta: i64,
    pub p0: i64,
    pub gamma0: i64,
    pub c0: i64,
    pub i_v: usize,
    pub i0_v: usize,
    pub size: usize,
    /// Proper children in ṽ.
    pub vtilde: BTreeSet<usize>,
    pub u: Q,
    pub genus: usize,
    pub ubereven: bool,
    /// y^{p/γ} − c, coefficients from the constant term.
    pub gbar: FFPoly,
    /// Present exactly for degree-minimal clusters.
    pub gbar0: Option<FFPoly>,
    pub fred: FFPoly,
    pub fbar: FFPoly,
    pub ftilde: FFPoly,
    /// ν·deg v, with s and s⁰ recomputed from it.
    pub nu_table: Q,
    pub s_table: Q,
    pub s0_table: Q,
}

impl InvariantRecord {
    pub fn split(&self) -> bool {
        self.ubereven && self.ftilde.len() == 1 && self.k_v.is_square(&self.ftilde[0])
    }
}

/// ν_v = v(f), checked against the sum over leaf meets.
pub fn nu(tree: &ClusterTree, id: usize) -> Result<Q> {
    let v = tree.cluster_chain(id);
    let by_eval = v.eval(&tree.f);
    let by_leaves = tree.nu_from_leaves(id);
    ensure!(by_eval == by_leaves, "ν by evaluation {by_eval} differs from the leaf sum {by_leaves}");
    match by_eval {
        ExtRat::Fin(q) => Ok(q),
        ExtRat::Inf => Err(Error::InternalInconsistency("infinite ν on a proper cluster".into())),
    }
}

fn q_i64(q: &Q) -> Result<i64> {
    ensure!(q.is_integer(), "expected an integer, got {q}");
    q.to_integer().to_i64().ok_or_else(|| Error::Input("integer overflow".into()))
}

/// Genus of the smooth projective model of y^n = ftilde over the closure.
pub fn genus_double_cover(fld: &Fq, ftilde: &FFPoly, n: i64) -> usize {
    if n != 2 || ftilde.is_empty() {
        return 0;
    }
    let odd: usize = ffpoly::squarefree(fld, ftilde).iter().filter(|(_, k)| k % 2 == 1).map(|(g, _)| g.len() - 1).sum();
    // branch points: odd roots, plus ∞ when the degree is odd
    let branch = odd + odd % 2;
    (branch / 2).saturating_sub(1)
}

fn residual_constant(tree: &ClusterTree, id: usize, idx: usize) -> Result<FFElem> {
    let v = tree.cluster_chain(id);
    let k = &tree.k;
    let m = v.depth();
    let expansion = k.phi_expand(&tree.f, &v.level(m).phi);
    let a = expansion.get(idx).cloned().unwrap_or_default();
    ensure!(!a.is_empty(), "zero expansion coefficient at the polygon endpoint {idx}");
    let ExtRat::Fin(alpha) = v.eval_at(m - 1, &a) else {
        return Err(Error::InternalInconsistency("infinite endpoint coefficient".into()));
    };
    let h = newton::graded_h(v, m - 1, &alpha, &a)?;
    newton::evaluate_at_generator(v, m, &h)
}

fn y_poly(fld: &Fq, deg: i64, c: &FFElem) -> FFPoly {
    let mut g = ffpoly::monomial(fld, fld.one(), deg as usize);
    g[0] = fld.sub(&g[0], c);
    g
}

/// ḡ_v and ḡ⁰_v from the φ_v-expansion coefficients at the two endpoints of
/// the selected edge.
pub fn residual_constants(tree: &ClusterTree, id: usize, rec: &InvariantRecord) -> Result<(FFPoly, Option<FFPoly>)> {
    let fld = &rec.k_v;
    let c = residual_constant(tree, id, rec.i_v)?;
    ensure!(!fld.is_zero(&c), "zero residual constant");
    ensure!(rec.fred.last() == Some(&c), "residual constant disagrees with the leading coefficient of f|_v");
    let gbar = y_poly(fld, rec.p / rec.gamma, &c);
    let gbar0 = if rec.delta == 1 {
        let c0 = residual_constant(tree, id, rec.i0_v)?;
        ensure!(rec.fred.first() == Some(&c0), "ḡ⁰ constant disagrees with f|_v(0)");
        Some(y_poly(fld, rec.p0 / rec.gamma0, &c0))
    } else {
        None
    };
    Ok((gbar, gbar0))
}

fn ell_terms(tree: &ClusterTree, id: usize, ell: i64, nu: &Q) -> (BTreeSet<usize>, i64) {
    let v = tree.cluster_chain(id);
    let inv = v.invariants();
    let node = tree.node(id);
    let mut vt = BTreeSet::new();
    for w in tree.proper_children(id) {
        let wi = w.valuation.invariants();
        let t =
            qi((inv.f * w.size) as i64) / qi(wi.f as i64 * inv.b * node.degree as i64) - qi(ell) * nu * qi(wi.epsilon);
        if !in_2z(&t) {
            vt.insert(w.id);
        }
    }
    let p0 = tree.p0_flag(id) as i64;
    let c = qi(2 - p0) / qi(inv.b) - qi(ell) * nu * qi(inv.epsilon);
    (vt, if in_2z(&c) { 0 } else { 1 })
}

/// The record for one proper cluster, with ℓ_v replaced by ℓ_v + shift·b_v.
pub fn compute_record_with_ell_shift(tree: &ClusterTree, id: usize, shift: i64) -> Result<InvariantRecord> {
    let node = tree.node(id);
    ensure!(node.is_proper, "invariants requested for a leaf");
    let v = tree.cluster_chain(id);
    let inv = v.invariants();
    let fld = v.residue_field().clone();
    let d = node.degree;
    let lambda = node.radius.q().clone();
    let nu = nu(tree, id)?;
    let e = inv.e;
    let n = if q_i64(&(qi(e) * &nu))?.is_odd() { 1 } else { 2 };
    let m = 2 * e / n;
    let i = node.i_v;
    ensure!(i * d == node.size, "|s| = {} but i_v·deg v = {}", node.size, i * d);
    let p = if i % 2 == 1 { 1 } else { 2 };
    let s = (qi(i as i64) * &lambda + qi(p) * &lambda - &nu) / qi(2);
    let eps = inv.epsilon;
    let gamma = if p == 2 && is_odd_integer(&(qi(eps) * (&nu - qi(i as i64) * &lambda))) { 2 } else { 1 };
    let delta = node.degree_minimal as i64;
    let p0 = tree.p0_flag(id) as i64;
    let s0 = -&nu / qi(2) + &lambda;
    let gamma0 = if p0 == 2 && is_odd_integer(&(qi(eps) * &nu)) { 2 } else { 1 };
    let ell = inv.ell + shift * inv.b;
    let (vtilde, c0) = ell_terms(tree, id, ell, &nu);

    let sum_t: usize = tree.proper_children(id).map(|w| w.size).sum();
    let rest = node.size as i64 - sum_t as i64 - (2 - p0) * d as i64;
    ensure!(rest >= 0, "negative count of unattached roots at cluster {id}");
    let mut u = qi(rest) / qi(inv.b * d as i64);
    for w in &vtilde {
        u += qi(tree.node(*w).valuation.invariants().f as i64) / qi(inv.f as i64);
    }
    u += qi(delta * c0);
    ensure!(u.is_integer() && !u.is_negative(), "u_v = {u} is not a nonnegative integer");
    let genus = if n == 1 {
        0
    } else {
        let g = floor_q(&((&u - qi(1)) / qi(2)));
        g.to_usize().unwrap_or(0)
    };
    let ubereven = n == 2 && u.is_zero();

    let fred = newton::reduction(v, &tree.f)?;
    let mut divisor = ffpoly::one(&fld);
    let mut twist = ffpoly::one(&fld);
    for w in tree.proper_children(id) {
        let r = if w.centre == node.centre {
            ffpoly::x(&fld)
        } else {
            let r = newton::reduction(v, &w.centre)?;
            ensure!(
                newton::ord_factor(&fld, &fred, &r) == w.size / w.degree,
                "ord of the child factor in f|_v differs from |t|/deg w at child {}",
                w.id
            );
            divisor = ffpoly::mul(&fld, &divisor, &ffpoly::pow(&fld, &r, w.size / w.degree));
            r
        };
        if vtilde.contains(&w.id) {
            twist = ffpoly::mul(&fld, &twist, &r);
        }
    }
    let (fbar, rem) = ffpoly::divrem(&fld, &fred, &divisor);
    if !rem.is_empty() {
        return Err(Error::InexactDivision);
    }
    let xpow = ffpoly::monomial(&fld, fld.one(), (delta * c0) as usize);
    let ftilde = ffpoly::mul(&fld, &ffpoly::mul(&fld, &fbar, &xpow), &twist);
    ensure!(qi(ftilde.len() as i64 - 1) == u, "deg f̃ = {} but u_v = {u} at cluster {id}", ftilde.len() - 1);

    let nu_table = &nu * qi(d as i64);
    let s_table = (qi(i as i64) * &lambda + qi(p) * &lambda - &nu_table) / qi(2);
    let s0_table = -&nu_table / qi(2) + &lambda;

    let mut rec = InvariantRecord {
        cluster: id,
        epsilon: eps,
        b: inv.b,
        ell,
        f: inv.f,
        k_v: fld.clone(),
        degree: d,
        lambda,
        nu,
        s,
        s0,
        e,
        n,
        m,
        p,
        gamma,
        delta,
        p0,
        gamma0,
        c0,
        i_v: i,
        i0_v: node.i0_v,
        size: node.size,
        vtilde,
        u,
        genus,
        ubereven,
        gbar: vec![],
        gbar0: None,
        fred,
        fbar,
        ftilde,
        nu_table,
        s_table,
        s0_table,
    };
    let (gbar, gbar0) = residual_constants(tree, id, &rec)?;
    rec.gbar = gbar;
    rec.gbar0 = gbar0;
    check_record(&rec)?;
    Ok(rec)
}

pub fn compute_record(tree: &ClusterTree, id: usize) -> Result<InvariantRecord> {
    compute_record_with_ell_shift(tree, id, 0)
}

/// Records for every proper cluster, in tree order.
pub fn compute_records(tree: &ClusterTree) -> Result<Vec<InvariantRecord>> {
    compute_records_with_ell_shift(tree, 0)
}

pub fn compute_records_with_ell_shift(tree: &ClusterTree, shift: i64) -> Result<Vec<InvariantRecord>> {
    tree.proper_nodes().map(|n| compute_record_with_ell_shift(tree, n.id, shift)).collect()
}

pub fn check_record(r: &InvariantRecord) -> Result<()> {
    ensure!(r.n == 1 || r.n == 2, "n_v = {}", r.n);
    ensure!(r.m * r.n == 2 * r.e, "m_v·n_v ≠ 2e_v");
    ensure!(r.b * r.epsilon == r.e, "b_v·ε_v ≠ e_v");
    ensure!(r.degree as i64 == r.epsilon * r.f as i64, "deg v ≠ ε_v·f_v");
    for (num, den) in [(r.p, r.gamma), (r.p0, r.gamma0)] {
        ensure!(num % den == 0 && (1..=2).contains(&(num / den)), "ratio {num}/{den} outside {{1, 2}}");
    }
    ensure!(r.s == (qi(r.i_v as i64) * &r.lambda + qi(r.p) * &r.lambda - &r.nu) / qi(2), "s_v formula");
    ensure!(r.n == 2 || r.genus == 0, "genus on a component with n_v = 1");
    ensure!(!r.ubereven || r.n == 2, "übereven with n_v = 1");
    let g = genus_double_cover(&r.k_v, &r.ftilde, r.n);
    ensure!(g == r.genus, "genus of y² = f̃ is {g}, formula gives {}", r.genus);
    if r.delta == 1 {
        ensure!(r.i0_v as i64 == 2 - r.p0, "degree-minimal cluster with i⁰ = {} and p⁰ = {}", r.i0_v, r.p0);
    }
    Ok(())
}
