//! Newton polygons, graded reductions H_{i,α}, residual polynomials f|_v and
//! lifting of residual polynomials back to key polynomials.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::arith::ext::{qi, ExtRat, Q};
use crate::arith::ff::FFElem;
use crate::arith::ffpoly::{self, FFPoly};
use crate::arith::KPoly;
use crate::error::{ensure, Error, Result};
use crate::valuation::MacLaneVal;

/// Lower convex hull of the points (i, u) with u finite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub vertices: Vec<(usize, Q)>,
}

/// The part of a polygon touched by the line of slope −λ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeData {
    pub lambda: ExtRat,
    pub i0: usize,
    pub i1: usize,
    pub u0: ExtRat,
    pub u1: ExtRat,
}

/// An edge between consecutive vertices, with λ the negative slope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub lambda: Q,
    pub left: (usize, Q),
    pub right: (usize, Q),
}

impl NewtonPolygon {
    pub fn from_points(mut pts: Vec<(usize, Q)>) -> Self {
        pts.sort_by_key(|a| a.0);
        let mut hull: Vec<(usize, Q)> = vec![];
        for pt in pts {
            while hull.len() >= 2 {
                let (a, b) = (&hull[hull.len() - 2], &hull[hull.len() - 1]);
                let s_ab = (&b.1 - &a.1) / qi((b.0 - a.0) as i64);
                let s_bp = (&pt.1 - &b.1) / qi((pt.0 - b.0) as i64);
                if s_ab >= s_bp {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(pt);
        }
        NewtonPolygon { vertices: hull }
    }

    pub fn edges(&self) -> Vec<Edge> {
        self.vertices
            .windows(2)
            .map(|w| Edge {
                lambda: (&w[0].1 - &w[1].1) / qi((w[1].0 - w[0].0) as i64),
                left: w[0].clone(),
                right: w[1].clone(),
            })
            .collect()
    }

    pub fn leftmost(&self) -> &(usize, Q) {
        &self.vertices[0]
    }

    pub fn rightmost(&self) -> &(usize, Q) {
        self.vertices.last().unwrap()
    }

    /// The sub-polygon formed by the edges of slope < −vφ.
    pub fn principal_part(&self, v_phi: &ExtRat) -> NewtonPolygon {
        let mut vertices = vec![self.vertices[0].clone()];
        for e in self.edges() {
            if ExtRat::Fin(e.lambda.clone()) > *v_phi {
                vertices.push(e.right.clone());
            } else {
                break;
            }
        }
        NewtonPolygon { vertices }
    }

    /// The touching set of the line of slope −λ (λ = ∞ picks the leftmost vertex
    /// and reports i⁰ = 0, u⁰ = ∞).
    pub fn selected_edge(&self, lambda: &ExtRat) -> EdgeData {
        match lambda {
            ExtRat::Inf => {
                let (i, u) = self.leftmost().clone();
                EdgeData { lambda: ExtRat::Inf, i0: 0, i1: i, u0: ExtRat::Inf, u1: ExtRat::Fin(u) }
            }
            ExtRat::Fin(l) => {
                let val = |(i, u): &(usize, Q)| u + l * qi(*i as i64);
                let m = self.vertices.iter().map(val).min().unwrap();
                let touching: Vec<&(usize, Q)> = self.vertices.iter().filter(|pt| val(pt) == m).collect();
                let a = touching[0];
                let b = touching[touching.len() - 1];
                EdgeData {
                    lambda: lambda.clone(),
                    i0: a.0,
                    i1: b.0,
                    u0: ExtRat::Fin(a.1.clone()),
                    u1: ExtRat::Fin(b.1.clone()),
                }
            }
        }
    }

    /// Length of the projection to the i-axis.
    pub fn width(&self) -> usize {
        self.rightmost().0 - self.leftmost().0
    }
}

/// N_{v,φ}(f) from the φ-expansion of f, valued by v.
pub fn newton_polygon(v: &MacLaneVal, phi: &KPoly, f: &KPoly) -> NewtonPolygon {
    let k = v.base();
    let coeffs = k.phi_expand(f, phi);
    let pts =
        coeffs.iter().enumerate().filter(|(_, a)| !a.is_empty()).map(|(i, a)| (i, v.eval(a).q().clone())).collect();
    NewtonPolygon::from_points(pts)
}

/// The edge L_v(f) of N_{v_{n-1},φ_n}(f) of slope −λ_n.
pub fn selected_edge_of(v: &MacLaneVal, f: &KPoly) -> Result<EdgeData> {
    let n = v.depth();
    ensure!(n >= 1, "selected edge needs at least one augmentation");
    let lev = v.level(n);
    let prev = v.prefix(n - 1);
    Ok(newton_polygon(&prev, &lev.phi, f).selected_edge(&lev.lambda))
}

/// Σ_j coeffs[j] X^{shift + j} over the field of the relevant level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Laurent {
    pub shift: i64,
    pub coeffs: FFPoly,
}

/// (ι, u, c) with u e_i + ι h_i = e_{v_i}α, 0 ≤ ι < e_i, c = ℓ'_i ι − ℓ_i u.
pub fn level_split(v: &MacLaneVal, i: usize, alpha: &Q) -> Result<(i64, BigInt, i64)> {
    let lev = v.level(i);
    let n = v.scaled(i, alpha)?;
    let e = BigInt::from(lev.e);
    let iota = (&n * BigInt::from(lev.l)).mod_floor(&e);
    let u = (&n - &iota * BigInt::from(lev.h)) / &e;
    let iota = iota.to_i64().unwrap();
    let c = BigInt::from(lev.lp) * BigInt::from(iota) - BigInt::from(lev.l) * &u;
    let c = c.to_i64().ok_or_else(|| Error::Input("exponent overflow".into()))?;
    Ok((iota, u, c))
}

fn z_pow(v: &MacLaneVal, i: usize, k: i64) -> Result<FFElem> {
    let lev = v.level(i);
    if k == 0 {
        return Ok(lev.field.one());
    }
    ensure!(!lev.field.is_zero(&lev.z), "negative or positive power of a zero generator at level {i}");
    Ok(lev.field.pow_i64(&lev.z, k))
}

/// Maps a Laurent polynomial over k_{i-1} into k_i by X_{i-1} ↦ z_i.
pub fn evaluate_at_generator(v: &MacLaneVal, i: usize, l: &Laurent) -> Result<FFElem> {
    let lev = v.level(i);
    let fld = &lev.field;
    let mut acc = fld.zero();
    for (t, c) in l.coeffs.iter().enumerate() {
        if v.level(i - 1).field.is_zero(c) {
            continue;
        }
        let zt = z_pow(v, i, l.shift + t as i64)?;
        acc = fld.add(&acc, &fld.mul(&lev.emb.apply(c), &zt));
    }
    Ok(acc)
}

/// H_{i,α}(g) as a Laurent polynomial in X_i over k_i.
pub fn graded_h(v: &MacLaneVal, i: usize, alpha: &Q, g: &KPoly) -> Result<Laurent> {
    let k = v.base();
    let fld = v.field_at(i).clone();
    if g.is_empty() {
        return Ok(Laurent { shift: 0, coeffs: vec![] });
    }
    let val = v.eval_at(i, g);
    if val < ExtRat::Fin(alpha.clone()) {
        return Err(Error::InternalInconsistency(format!(
            "graded reduction at level {i}: value {val} below {}",
            crate::arith::ext::fmt_q(alpha)
        )));
    }
    if i == 0 {
        ensure!(alpha.is_integer(), "non-integral α at the Gauss level");
        let a = alpha.to_integer().to_i64().unwrap();
        let scale = k.p_pow(-a);
        let mut coeffs: FFPoly = g.iter().map(|c| k.residue(&k.mul(c, &scale))).collect::<Result<_>>()?;
        ffpoly::trim(&fld, &mut coeffs);
        return Ok(Laurent { shift: 0, coeffs });
    }
    let lev = v.level(i);
    ensure!(!lev.lambda.is_inf(), "graded reduction on an infinite level");
    let lam = lev.lambda.q().clone();
    let (iota, _, c) = level_split(v, i, alpha)?;
    let expansion = k.phi_expand(g, &lev.phi);
    let mut coeffs = vec![];
    let mut s = iota as usize;
    while s < expansion.len() {
        let a = &expansion[s];
        let alpha_s = alpha - &lam * qi(s as i64);
        let coef = if a.is_empty() || v.eval_at(i - 1, a) > ExtRat::Fin(alpha_s.clone()) {
            fld.zero()
        } else {
            let inner = graded_h(v, i - 1, &alpha_s, a)?;
            evaluate_at_generator(v, i, &inner)?
        };
        coeffs.push(coef);
        s += lev.e as usize;
    }
    ffpoly::trim(&fld, &mut coeffs);
    Ok(Laurent { shift: c, coeffs })
}

/// f|_v together with the edge L_v(f) it was read from (None for Gauss).
pub fn reduction_with_edge(v: &MacLaneVal, f: &KPoly) -> Result<(FFPoly, Option<EdgeData>)> {
    ensure!(!f.is_empty(), "reduction of the zero polynomial");
    let n = v.depth();
    let alpha = v.eval(f);
    let ExtRat::Fin(alpha) = alpha else {
        return Err(Error::InternalInconsistency("reduction at infinite value".into()));
    };
    let h = graded_h(v, n, &alpha, f)?;
    if n == 0 {
        return Ok((h.coeffs, None));
    }
    let edge = selected_edge_of(v, f)?;
    let e = v.level(n).e as usize;
    let strip = edge.i0 / e;
    let fld = v.residue_field();
    ensure!(
        h.coeffs.len() > strip && h.coeffs[..strip].iter().all(|c| fld.is_zero(c)),
        "reduction: expected X^{strip} to divide f|_(v,alpha)"
    );
    let red: FFPoly = h.coeffs[strip..].to_vec();
    ensure!(!fld.is_zero(&red[0]), "reduction with zero constant term");
    ensure!(
        (red.len() - 1) * e == edge.i1 - edge.i0,
        "reduction degree {} disagrees with edge ({}, {}) / {e}",
        red.len() - 1,
        edge.i0,
        edge.i1
    );
    Ok((red, Some(edge)))
}

/// The residual polynomial f|_v in k_v[X].
pub fn reduction(v: &MacLaneVal, f: &KPoly) -> Result<FFPoly> {
    reduction_with_edge(v, f).map(|r| r.0)
}

/// A polynomial A of degree < deg φ_{i+1} with v_i(A) = α whose graded
/// reduction at level i, evaluated at z_{i+1}, equals c ∈ k_{i+1}.
pub fn lift_residue(v: &MacLaneVal, i: usize, alpha: &Q, c: &FFElem) -> Result<KPoly> {
    let k = v.base();
    let target = v.field_at(i + 1);
    if target.is_zero(c) {
        return Ok(vec![]);
    }
    if i == 0 {
        ensure!(alpha.is_integer(), "non-integral α at the Gauss level");
        let a = alpha.to_integer().to_i64().unwrap();
        let q = v.decompose(1, c);
        let mut out: KPoly = q.iter().map(|qt| k.mul(&k.lift(qt), &k.p_pow(a))).collect();
        k.trim(&mut out);
        return Ok(out);
    }
    let lev = v.level(i);
    let lam = lev.lambda.q().clone();
    let (iota, _, ci) = level_split(v, i, alpha)?;
    let shifted = target.mul(c, &z_pow(v, i + 1, -ci)?);
    let q = v.decompose(i + 1, &shifted);
    let mut out: KPoly = vec![];
    for (t, qt) in q.iter().enumerate() {
        if v.field_at(i).is_zero(qt) {
            continue;
        }
        let s = iota as usize + t * lev.e as usize;
        let piece = lift_residue(v, i - 1, &(alpha - &lam * qi(s as i64)), qt)?;
        out = k.padd(&out, &k.pmul(&piece, &k.ppow(&lev.phi, s)));
    }
    Ok(out)
}

/// A key polynomial φ over v with φ|_v = h, for h monic irreducible over k_v
/// and different from X.
pub fn lift_key(v: &MacLaneVal, h: &FFPoly) -> Result<KPoly> {
    let k = v.base();
    let fld = v.residue_field();
    if !ffpoly::is_irreducible(fld, h) {
        return Err(Error::NotIrreducible);
    }
    let h = ffpoly::monic(fld, h);
    if h.len() == 2 && fld.is_zero(&h[0]) {
        return Err(Error::HEqualsX);
    }
    let n = v.depth();
    let phi = if n == 0 {
        k.lift_poly(&h)
    } else {
        let lev = v.level(n);
        let e = lev.e as usize;
        let lam = lev.lambda.q().clone();
        let d = h.len() - 1;
        let mut phi = k.ppow(&lev.phi, d * e);
        for (j, hj) in h.iter().enumerate().take(d) {
            let alpha = &lam * qi(((d - j) * e) as i64);
            let piece = lift_residue(v, n - 1, &alpha, hj)?;
            phi = k.padd(&phi, &k.pmul(&piece, &k.ppow(&lev.phi, j * e)));
        }
        phi
    };
    ensure!(v.is_key(&phi), "lifted polynomial is not a key polynomial");
    let back = reduction(v, &phi)?;
    ensure!(back == h, "lifted key polynomial does not reduce to the residual factor");
    Ok(phi)
}

/// Multiplicity of the irreducible `h` in `g` over a finite field.
pub fn ord_factor(fld: &crate::arith::FField, g: &FFPoly, h: &FFPoly) -> usize {
    let mut g = g.clone();
    let mut m = 0;
    loop {
        let (q, r) = ffpoly::divrem(fld, &g, h);
        if !r.is_empty() {
            return m;
        }
        g = q;
        m += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::BaseField;

    fn fr(n: i64, d: i64) -> ExtRat {
        ExtRat::frac(n, d)
    }

    #[test]
    fn polygon_of_sextic() {
        let k = BaseField::rational(5).unwrap();
        let g = MacLaneVal::gauss(&k);
        let phi = k.poly_i64(&[-5, 0, 1]);
        let f = k.psub(&k.ppow(&phi, 3), &k.poly_i64(&[3125]));
        let n = newton_polygon(&g, &k.x(), &f);
        assert_eq!(n.vertices, vec![(0, qi(3)), (6, qi(0))]);
        assert_eq!(n.edges()[0].lambda, Q::new(1.into(), 2.into()));
        let e = n.selected_edge(&fr(1, 2));
        assert_eq!((e.i0, e.i1), (0, 6));
        let vtx = n.selected_edge(&ExtRat::int(1));
        assert_eq!((vtx.i0, vtx.i1), (0, 0));
        let inf = n.selected_edge(&ExtRat::Inf);
        assert_eq!((inf.i0, inf.i1, inf.u0), (0, 0, ExtRat::Inf));
        let lin = newton_polygon(&g, &k.x(), &k.poly_i64(&[-5, 1]));
        assert_eq!(lin.vertices, vec![(0, qi(1)), (1, qi(0))]);
    }

    #[test]
    fn principal_parts() {
        let k = BaseField::rational(5).unwrap();
        let g = MacLaneVal::gauss(&k);
        let f = k.poly_i64(&[25, 5, 1]);
        let n = newton_polygon(&g, &k.x(), &f);
        assert_eq!(n.principal_part(&ExtRat::zero()).vertices.len(), n.vertices.len());
        assert_eq!(n.principal_part(&ExtRat::int(5)).vertices.len(), 1);
    }

    #[test]
    fn cubic_centre_reduction() {
        for p in [3u64, 5, 7] {
            let pi = p as i64;
            let k = BaseField::rational(p).unwrap();
            let phi = k.poly_i64(&[-2 * pi, 0, 0, 1]);
            let v = MacLaneVal::gauss(&k).augment(&k.x(), fr(1, 3)).unwrap().augment(&phi, fr(5, 3)).unwrap();
            let px2 = k.poly_i64(&[0, 0, pi]);
            let f = k.psub(&k.pmul(&phi, &phi), &k.pmul(&px2, &phi));
            let red = reduction(&v, &f).unwrap();
            let fp = v.residue_field();
            let half = fp.inv(&fp.from_i64(2));
            assert_eq!(red, vec![fp.neg(&half), fp.one()]);
            let prev = v.prefix(1);
            let n = newton_polygon(&prev, &phi, &f);
            assert_eq!(n.vertices, vec![(1, Q::new(5.into(), 3.into())), (2, qi(0))]);
        }
    }

    #[test]
    fn sextic_reduction() {
        let k = BaseField::rational(5).unwrap();
        let v1 = MacLaneVal::gauss(&k).augment(&k.x(), fr(1, 2)).unwrap();
        let phi = k.poly_i64(&[-5, 0, 1]);
        let f = k.psub(&k.ppow(&phi, 3), &k.poly_i64(&[3125]));
        let red = reduction(&v1, &f).unwrap();
        let fp = v1.residue_field();
        let want: FFPoly = [-1i64, 3, -3, 1].iter().map(|&c| fp.from_i64(c)).collect();
        assert_eq!(red, want);
        let key = lift_key(&v1, &vec![fp.from_i64(-1), fp.one()]).unwrap();
        assert!(v1.augment(&key, fr(5, 3)).is_ok());
        assert_eq!(reduction(&v1, &phi).unwrap(), vec![fp.from_i64(-1), fp.one()]);
    }

    #[test]
    fn lift_rejects_x() {
        let k = BaseField::rational(3).unwrap();
        let v1 = MacLaneVal::gauss(&k).augment(&k.x(), fr(1, 2)).unwrap();
        let fp = v1.residue_field();
        assert_eq!(lift_key(&v1, &vec![fp.zero(), fp.one()]), Err(Error::HEqualsX));
    }
}
