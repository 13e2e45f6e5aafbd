//! The base field K: a tower of unramified extensions of Q (inside Q_p),
//! its elements, polynomials over it, and the reduction to the residue field.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ext::{fmt_q, qi, vp_q, ExtRat, Q};
use super::ff::{from_columns, invmod, is_prime, mat_inverse, mat_vec, FFElem, FField, Fq};
use super::ffpoly::{self, ff_extend, FFPoly};
use crate::error::{Error, Result};

/// One step of the tower: a monic generator polynomial with coefficients in
/// the previous level (the leading 1 is implicit).
#[derive(Clone, Debug, PartialEq, Eq)]
struct Level {
    deg: usize,
    g: Vec<KElem>,
}

/// An element of K by its coordinates in the tower power basis. The flat
/// index of θ_1^{a_1}⋯θ_t^{a_t} is a_1 + d_1(a_2 + d_2(⋯)).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KElem(pub Vec<Q>);

/// Coefficients from the constant term upwards; no trailing zeros.
pub type KPoly = Vec<KElem>;

#[derive(Debug)]
pub struct BaseField {
    p: u64,
    levels: Vec<Level>,
    dims: Vec<usize>,
    k0: Fq,
    basis_img: Vec<FFElem>,
    lift_mat: Vec<Vec<u64>>,
}

pub type K = Arc<BaseField>;

fn check_prime(p: u64) -> Result<()> {
    if p < 3 || !is_prime(p) {
        return Err(Error::Input(format!("{p} is not an odd prime")));
    }
    Ok(())
}

impl BaseField {
    /// K = Q with the p-adic valuation.
    pub fn rational(p: u64) -> Result<K> {
        check_prime(p)?;
        Self::build(p, vec![])
    }

    /// K = Q(θ) with θ a root of the given monic integer polynomial, which must
    /// stay irreducible mod p.
    pub fn unramified(p: u64, minpoly: &[i64]) -> Result<K> {
        check_prime(p)?;
        if minpoly.last() != Some(&1) || minpoly.len() < 2 {
            return Err(Error::Input("generator polynomial must be monic of degree >= 1".into()));
        }
        if minpoly.len() == 2 {
            return Self::build(p, vec![]);
        }
        let g = minpoly[..minpoly.len() - 1].iter().map(|&c| KElem(vec![qi(c)])).collect();
        Self::build(p, vec![Level { deg: minpoly.len() - 1, g }])
    }

    /// The unramified extension of degree m, generated by the first monic
    /// polynomial (coefficients in [0, p), ordered by the base-p integer they
    /// spell) that is irreducible mod p.
    pub fn unramified_default(p: u64, m: usize) -> Result<K> {
        check_prime(p)?;
        if m == 0 {
            return Err(Error::Input("unramified degree must be positive".into()));
        }
        if m == 1 {
            return Self::rational(p);
        }
        Self::unramified(p, &Self::default_minpoly(p, m))
    }

    pub fn default_minpoly(p: u64, m: usize) -> Vec<i64> {
        let fp = FField::prime(p);
        let mut n: u64 = 0;
        loop {
            let mut coeffs = vec![];
            let mut k = n;
            for _ in 0..m {
                coeffs.push((k % p) as i64);
                k /= p;
            }
            coeffs.push(1);
            let poly: FFPoly = coeffs.iter().map(|&c| vec![c as u64]).collect();
            if ffpoly::is_irreducible(&fp, &poly) {
                return coeffs;
            }
            n += 1;
        }
    }

    fn build(p: u64, levels: Vec<Level>) -> Result<K> {
        let mut k: Fq = FField::prime(p);
        let mut basis_img: Vec<FFElem> = vec![k.one()];
        let mut dims = vec![1usize];
        for lev in &levels {
            let dim = *dims.last().unwrap();
            let partial = BaseField {
                p,
                levels: vec![],
                dims: vec![dim],
                k0: k.clone(),
                basis_img: basis_img.clone(),
                lift_mat: vec![],
            };
            let mut gbar: FFPoly = lev.g.iter().map(|c| partial.residue_raw(c)).collect::<Result<_>>()?;
            gbar.push(k.one());
            let (k2, emb, r) = ff_extend(&k, &gbar)?;
            let mut new_basis = Vec::with_capacity(dim * lev.deg);
            let mut rp = k2.one();
            for _ in 0..lev.deg {
                for b in &basis_img {
                    new_basis.push(k2.mul(&emb.apply(b), &rp));
                }
                rp = k2.mul(&rp, &r);
            }
            basis_img = new_basis;
            k = k2;
            dims.push(dim * lev.deg);
        }
        let lift_mat = mat_inverse(&from_columns(&basis_img), p)
            .ok_or_else(|| Error::InternalInconsistency("residue images of the power basis are dependent".into()))?;
        Ok(Arc::new(BaseField { p, levels, dims, k0: k, basis_img, lift_mat }))
    }

    /// The tower extended by a root of a lift of `h`, a monic irreducible
    /// polynomial over the residue field.
    pub fn extend(&self, h: &FFPoly) -> Result<K> {
        if !ffpoly::is_irreducible(&self.k0, h) {
            return Err(Error::NotIrreducible);
        }
        let h = ffpoly::monic(&self.k0, h);
        let deg = h.len() - 1;
        if deg == 1 {
            return Self::build(self.p, self.levels.clone());
        }
        let g = h[..deg].iter().map(|c| self.lift(c)).collect();
        let mut levels = self.levels.clone();
        levels.push(Level { deg, g });
        Self::build(self.p, levels)
    }

    /// An extension of the tower whose residue field has degree `n` over F_p;
    /// `n` must be a multiple of the current residue degree.
    pub fn extend_to_degree(&self, n: usize, seed: u64) -> Result<K> {
        let d = self.degree();
        if !n.is_multiple_of(d) {
            return Err(Error::Input(format!("residue degree {n} is not a multiple of {d}")));
        }
        let rel = n / d;
        if rel == 1 {
            return Self::build(self.p, self.levels.clone());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let mut h: FFPoly = (0..rel).map(|_| self.k0.random(&mut rng)).collect();
            h.push(self.k0.one());
            if ffpoly::is_irreducible(&self.k0, &h) {
                return self.extend(&h);
            }
        }
    }

    /// The image of `a` in a field built from this one by `extend`.
    pub fn embed_into(&self, a: &KElem, target: &BaseField) -> Result<KElem> {
        if target.p != self.p
            || target.levels.len() < self.levels.len()
            || target.levels[..self.levels.len()] != self.levels[..]
        {
            return Err(Error::InternalInconsistency("target field does not extend the source tower".into()));
        }
        let mut c = a.0.clone();
        c.resize(target.degree(), Q::zero());
        Ok(KElem(c))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// [K : Q], equal to the residue degree over F_p.
    pub fn degree(&self) -> usize {
        *self.dims.last().unwrap()
    }

    pub fn residue_field(&self) -> &Fq {
        &self.k0
    }

    pub fn tower_degrees(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.deg).collect()
    }

    /// The generator polynomials of the tower levels with integer
    /// coordinates, for reporting.
    pub fn describe(&self) -> String {
        if self.levels.is_empty() {
            return "Q".into();
        }
        self.levels
            .iter()
            .enumerate()
            .map(|(j, l)| {
                let mut g = l.g.clone();
                g.push(self.one_at(j));
                let name = level_name(j);
                format!("{name}: {} = 0", self.fmt_poly_at(j, &g, &name))
            })
            .collect::<Vec<_>>()
            .join(", ")
    }

    // ----- elements -----

    pub fn zero(&self) -> KElem {
        KElem(vec![Q::zero(); self.degree()])
    }

    pub fn one(&self) -> KElem {
        self.from_q(Q::one())
    }

    fn one_at(&self, level: usize) -> KElem {
        let mut v = vec![Q::zero(); self.dims[level]];
        v[0] = Q::one();
        KElem(v)
    }

    pub fn from_q(&self, q: Q) -> KElem {
        let mut v = vec![Q::zero(); self.degree()];
        v[0] = q;
        KElem(v)
    }

    pub fn from_i64(&self, n: i64) -> KElem {
        self.from_q(qi(n))
    }

    /// p^k for any integer k.
    pub fn p_pow(&self, k: i64) -> KElem {
        let pk = BigInt::from(self.p).pow(k.unsigned_abs() as u32);
        let q = if k >= 0 { Q::from_integer(pk) } else { Q::new(BigInt::one(), pk) };
        self.from_q(q)
    }

    /// The generator θ_j of level `j` (1-based).
    pub fn theta(&self, j: usize) -> KElem {
        let mut v = vec![Q::zero(); self.degree()];
        v[self.dims[j - 1]] = Q::one();
        KElem(v)
    }

    pub fn is_zero(&self, a: &KElem) -> bool {
        a.0.iter().all(|c| c.is_zero())
    }

    /// The rational value of an element lying in Q, if it does.
    pub fn as_rational(&self, a: &KElem) -> Option<Q> {
        if a.0[1..].iter().all(|c| c.is_zero()) {
            Some(a.0[0].clone())
        } else {
            None
        }
    }

    pub fn add(&self, a: &KElem, b: &KElem) -> KElem {
        KElem(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, a: &KElem, b: &KElem) -> KElem {
        KElem(a.0.iter().zip(&b.0).map(|(x, y)| x - y).collect())
    }

    pub fn neg(&self, a: &KElem) -> KElem {
        KElem(a.0.iter().map(|x| -x).collect())
    }

    pub fn scale(&self, a: &KElem, q: &Q) -> KElem {
        KElem(a.0.iter().map(|x| x * q).collect())
    }

    pub fn mul(&self, a: &KElem, b: &KElem) -> KElem {
        if self.levels.is_empty() {
            return KElem(vec![&a.0[0] * &b.0[0]]);
        }
        KElem(self.mul_at(self.levels.len(), &a.0, &b.0))
    }

    fn mul_at(&self, level: usize, a: &[Q], b: &[Q]) -> Vec<Q> {
        if level == 0 {
            return vec![&a[0] * &b[0]];
        }
        let lev = &self.levels[level - 1];
        let sub = self.dims[level - 1];
        let d = lev.deg;
        let zero_chunk = || vec![Q::zero(); sub];
        let is_zero = |c: &[Q]| c.iter().all(|x| x.is_zero());
        let mut c: Vec<Vec<Q>> = (0..2 * d - 1).map(|_| zero_chunk()).collect();
        for i in 0..d {
            let ai = &a[i * sub..(i + 1) * sub];
            if is_zero(ai) {
                continue;
            }
            for k in 0..d {
                let bk = &b[k * sub..(k + 1) * sub];
                if is_zero(bk) {
                    continue;
                }
                let prod = self.mul_at(level - 1, ai, bk);
                for (x, y) in c[i + k].iter_mut().zip(prod) {
                    *x += y;
                }
            }
        }
        for k in (d..2 * d - 1).rev() {
            let t = std::mem::replace(&mut c[k], zero_chunk());
            if is_zero(&t) {
                continue;
            }
            for (s, gs) in lev.g.iter().enumerate() {
                let prod = self.mul_at(level - 1, &t, &gs.0);
                for (x, y) in c[k - d + s].iter_mut().zip(prod) {
                    *x -= y;
                }
            }
        }
        c.truncate(d);
        c.concat()
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self, a: &KElem) -> KElem {
        assert!(!self.is_zero(a), "inverse of zero in K");
        let n = self.degree();
        if n == 1 {
            return KElem(vec![a.0[0].recip()]);
        }
        let cols: Vec<Vec<Q>> = (0..n)
            .map(|i| {
                let mut e = vec![Q::zero(); n];
                e[i] = Q::one();
                self.mul(a, &KElem(e)).0
            })
            .collect();
        let rows: Vec<Vec<Q>> = (0..n).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
        let mut rhs = vec![Q::zero(); n];
        rhs[0] = Q::one();
        KElem(solve_q(rows, rhs).expect("multiplication matrix of a nonzero element is invertible"))
    }

    pub fn div(&self, a: &KElem, b: &KElem) -> KElem {
        self.mul(a, &self.inv(b))
    }

    pub fn pow(&self, a: &KElem, e: u32) -> KElem {
        let mut r = self.one();
        for _ in 0..e {
            r = self.mul(&r, a);
        }
        r
    }

    /// v_K, normalized so that v_K(p) = 1.
    pub fn val(&self, a: &KElem) -> ExtRat {
        a.0.iter().filter_map(|c| vp_q(c, self.p)).min().map_or(ExtRat::Inf, ExtRat::int)
    }

    fn q_mod_p(&self, q: &Q) -> u64 {
        let p = BigInt::from(self.p);
        let n = q.numer().mod_floor(&p).to_u64().unwrap();
        let d = q.denom().mod_floor(&p).to_u64().unwrap();
        super::ff::mulmod(n, invmod(d, self.p), self.p)
    }

    fn residue_raw(&self, a: &KElem) -> Result<FFElem> {
        if a.0.iter().any(|c| vp_q(c, self.p).is_some_and(|v| v < 0)) {
            return Err(Error::NegativeValuation);
        }
        let mut out = self.k0.zero();
        for (c, b) in a.0.iter().zip(&self.basis_img) {
            let r = self.q_mod_p(c);
            if r != 0 {
                out = self.k0.add(&out, &self.k0.scale(b, r));
            }
        }
        Ok(out)
    }

    /// Reduction O_K → k.
    pub fn residue(&self, a: &KElem) -> Result<FFElem> {
        self.residue_raw(a)
    }

    /// The lift with coordinates in (−p/2, p/2).
    pub fn lift(&self, c: &FFElem) -> KElem {
        let p = self.p;
        KElem(
            mat_vec(&self.lift_mat, c, p)
                .into_iter()
                .map(|x| if x > p / 2 { qi(x as i64 - p as i64) } else { qi(x as i64) })
                .collect(),
        )
    }

    // ----- polynomials -----

    pub fn trim(&self, a: &mut KPoly) {
        while a.last().is_some_and(|c| self.is_zero(c)) {
            a.pop();
        }
    }

    pub fn x(&self) -> KPoly {
        vec![self.zero(), self.one()]
    }

    pub fn pconst(&self, c: KElem) -> KPoly {
        let mut v = vec![c];
        self.trim(&mut v);
        v
    }

    /// Polynomial with rational coefficients.
    pub fn poly_q(&self, coeffs: &[Q]) -> KPoly {
        let mut v: KPoly = coeffs.iter().map(|c| self.from_q(c.clone())).collect();
        self.trim(&mut v);
        v
    }

    pub fn poly_i64(&self, coeffs: &[i64]) -> KPoly {
        let q: Vec<Q> = coeffs.iter().map(|&c| qi(c)).collect();
        self.poly_q(&q)
    }

    pub fn padd(&self, a: &KPoly, b: &KPoly) -> KPoly {
        let n = a.len().max(b.len());
        let z = self.zero();
        let mut out: KPoly = (0..n).map(|i| self.add(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z))).collect();
        self.trim(&mut out);
        out
    }

    pub fn psub(&self, a: &KPoly, b: &KPoly) -> KPoly {
        let n = a.len().max(b.len());
        let z = self.zero();
        let mut out: KPoly = (0..n).map(|i| self.sub(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z))).collect();
        self.trim(&mut out);
        out
    }

    pub fn pscale(&self, a: &KPoly, c: &KElem) -> KPoly {
        let mut out: KPoly = a.iter().map(|x| self.mul(x, c)).collect();
        self.trim(&mut out);
        out
    }

    pub fn pmul(&self, a: &KPoly, b: &KPoly) -> KPoly {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![self.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if self.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if self.is_zero(y) {
                    continue;
                }
                out[i + j] = self.add(&out[i + j], &self.mul(x, y));
            }
        }
        self.trim(&mut out);
        out
    }

    pub fn ppow(&self, a: &KPoly, k: usize) -> KPoly {
        let mut r = self.pconst(self.one());
        for _ in 0..k {
            r = self.pmul(&r, a);
        }
        r
    }

    /// Division with remainder by a nonzero polynomial.
    pub fn pdivrem(&self, a: &KPoly, b: &KPoly) -> (KPoly, KPoly) {
        let db = b.len().checked_sub(1).expect("division by zero polynomial");
        let lead = &b[db];
        let monic = lead.0[0].is_one() && lead.0[1..].iter().all(|c| c.is_zero());
        let inv = if monic { None } else { Some(self.inv(lead)) };
        let mut r = a.clone();
        if r.len() <= db {
            return (vec![], r);
        }
        let mut q = vec![self.zero(); r.len() - db];
        while r.len() > db {
            let k = r.len() - 1 - db;
            let top = r.last().unwrap();
            let c = match &inv {
                None => top.clone(),
                Some(i) => self.mul(top, i),
            };
            for (j, bj) in b.iter().enumerate().take(db) {
                if !self.is_zero(bj) {
                    r[k + j] = self.sub(&r[k + j], &self.mul(&c, bj));
                }
            }
            q[k] = c;
            r.pop();
            self.trim(&mut r);
        }
        self.trim(&mut q);
        (q, r)
    }

    pub fn prem(&self, a: &KPoly, b: &KPoly) -> KPoly {
        self.pdivrem(a, b).1
    }

    /// Exact quotient, or `InexactDivision`.
    pub fn pdiv_exact(&self, a: &KPoly, b: &KPoly) -> Result<KPoly> {
        let (q, r) = self.pdivrem(a, b);
        if r.is_empty() {
            Ok(q)
        } else {
            Err(Error::InexactDivision)
        }
    }

    pub fn pmonic(&self, a: &KPoly) -> KPoly {
        match a.last() {
            None => vec![],
            Some(l) => self.pscale(a, &self.inv(l)),
        }
    }

    pub fn pgcd(&self, a: &KPoly, b: &KPoly) -> KPoly {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_empty() {
            let r = self.prem(&x, &y);
            x = y;
            y = self.pmonic(&r);
        }
        self.pmonic(&x)
    }

    pub fn pderiv(&self, a: &KPoly) -> KPoly {
        let mut out: KPoly = a.iter().enumerate().skip(1).map(|(i, c)| self.scale(c, &qi(i as i64))).collect();
        self.trim(&mut out);
        out
    }

    pub fn peval(&self, a: &KPoly, x: &KElem) -> KElem {
        a.iter().rev().fold(self.zero(), |acc, c| self.add(&self.mul(&acc, x), c))
    }

    /// f(c·x).
    pub fn psubst_scale(&self, a: &KPoly, c: &KElem) -> KPoly {
        let mut cp = self.one();
        let mut out = Vec::with_capacity(a.len());
        for coef in a {
            out.push(self.mul(coef, &cp));
            cp = self.mul(&cp, c);
        }
        self.trim(&mut out);
        out
    }

    /// Res(a, b) by the Euclidean remainder sequence.
    pub fn presultant(&self, a: &KPoly, b: &KPoly) -> KElem {
        if a.is_empty() || b.is_empty() {
            return self.zero();
        }
        let (da, db) = (a.len() - 1, b.len() - 1);
        if db == 0 {
            return self.pow(&b[0], da as u32);
        }
        if da < db {
            let r = self.presultant(b, a);
            return if da * db % 2 == 1 { self.neg(&r) } else { r };
        }
        let r = self.prem(a, b);
        if r.is_empty() {
            return self.zero();
        }
        let dr = r.len() - 1;
        let mut out = self.mul(&self.pow(&b[db], (da - dr) as u32), &self.presultant(b, &r));
        if da * db % 2 == 1 {
            out = self.neg(&out);
        }
        out
    }

    /// v_K of Res(a, a′).
    pub fn disc_val(&self, a: &KPoly) -> ExtRat {
        self.val(&self.presultant(a, &self.pderiv(a)))
    }

    pub fn is_separable(&self, a: &KPoly) -> bool {
        a.len() >= 2 && self.pgcd(a, &self.pderiv(a)).len() == 1
    }

    /// The φ-adic expansion g = Σ a_i φ^i with deg a_i < deg φ.
    pub fn phi_expand(&self, g: &KPoly, phi: &KPoly) -> Vec<KPoly> {
        let mut out = vec![];
        let mut rest = g.clone();
        if phi.len() == 2 && self.is_zero(&phi[0]) {
            return rest.into_iter().map(|c| self.pconst(c)).collect();
        }
        while !rest.is_empty() {
            let (q, r) = self.pdivrem(&rest, phi);
            out.push(r);
            rest = q;
        }
        out
    }

    pub fn phi_assemble(&self, coeffs: &[KPoly], phi: &KPoly) -> KPoly {
        coeffs.iter().rev().fold(vec![], |acc, c| self.padd(&self.pmul(&acc, phi), c))
    }

    /// Gauss valuation of a polynomial.
    pub fn pval(&self, a: &KPoly) -> ExtRat {
        a.iter().map(|c| self.val(c)).min().unwrap_or(ExtRat::Inf)
    }

    pub fn is_integral(&self, a: &KPoly) -> bool {
        self.pval(a) >= ExtRat::zero()
    }

    pub fn is_monic(&self, a: &KPoly) -> bool {
        a.last().is_some_and(|l| *l == self.one())
    }

    pub fn reduce_poly(&self, a: &KPoly) -> Result<FFPoly> {
        let mut out: FFPoly = a.iter().map(|c| self.residue(c)).collect::<Result<_>>()?;
        ffpoly::trim(&self.k0, &mut out);
        Ok(out)
    }

    pub fn lift_poly(&self, h: &FFPoly) -> KPoly {
        let mut out: KPoly = h.iter().map(|c| self.lift(c)).collect();
        self.trim(&mut out);
        out
    }

    // ----- formatting -----

    pub fn fmt_elem(&self, a: &KElem) -> String {
        self.fmt_elem_at(self.levels.len(), a)
    }

    fn fmt_elem_at(&self, level: usize, a: &KElem) -> String {
        let mut terms = vec![];
        for (idx, c) in a.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut mono = vec![];
            let mut k = idx;
            for j in 0..level {
                let d = self.levels[j].deg;
                let e = k % d;
                k /= d;
                match e {
                    0 => {}
                    1 => mono.push(level_name(j)),
                    _ => mono.push(format!("{}^{e}", level_name(j))),
                }
            }
            let cs = fmt_q(c);
            terms.push(match (mono.is_empty(), cs.as_str()) {
                (true, _) => cs,
                (false, "1") => mono.join("*"),
                (false, "-1") => format!("-{}", mono.join("*")),
                _ if c.is_integer() => format!("{cs}*{}", mono.join("*")),
                _ => format!("({cs})*{}", mono.join("*")),
            });
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ").replace("+ -", "- ")
        }
    }

    pub fn fmt_poly(&self, a: &KPoly, var: &str) -> String {
        self.fmt_poly_at(self.levels.len(), a, var)
    }

    fn fmt_poly_at(&self, level: usize, a: &KPoly, var: &str) -> String {
        if a.is_empty() {
            return "0".into();
        }
        let single = |c: &KElem| c.0.iter().filter(|x| !x.is_zero()).count() <= 1;
        let mut terms: Vec<String> = vec![];
        for (i, c) in a.iter().enumerate().rev() {
            if self.is_zero(c) {
                continue;
            }
            let mut cs = self.fmt_elem_at(level, c);
            let pw = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            let t = if i == 0 {
                if single(c) {
                    cs
                } else {
                    format!("({cs})")
                }
            } else if cs == "1" {
                pw
            } else if cs == "-1" {
                format!("-{pw}")
            } else {
                if !single(c) || cs.contains('/') {
                    cs = format!("({cs})");
                }
                format!("{cs}*{pw}")
            };
            terms.push(t);
        }
        let mut s = terms[0].clone();
        for t in &terms[1..] {
            if let Some(rest) = t.strip_prefix('-') {
                s.push_str(" - ");
                s.push_str(rest);
            } else {
                s.push_str(" + ");
                s.push_str(t);
            }
        }
        s
    }
}

fn level_name(j: usize) -> String {
    if j == 0 {
        "theta".into()
    } else {
        format!("theta{}", j + 1)
    }
}

/// Solves a square linear system over Q by Gauss–Jordan elimination.
pub fn solve_q(mut rows: Vec<Vec<Q>>, mut rhs: Vec<Q>) -> Option<Vec<Q>> {
    let n = rows.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !rows[r][col].is_zero())?;
        rows.swap(col, piv);
        rhs.swap(col, piv);
        let inv = rows[col][col].recip();
        for x in rows[col].iter_mut() {
            *x *= &inv;
        }
        rhs[col] *= &inv;
        let pivot = rows[col].clone();
        for r in 0..n {
            if r != col && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                for (x, y) in rows[r].iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
                let s = &f * &rhs[col];
                rhs[r] -= s;
            }
        }
    }
    Some(rhs)
}
