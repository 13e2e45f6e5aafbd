//! MacLane valuations given by augmentation chains over the Gauss valuation.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::arith::ext::{q_to_i64, qi};
use crate::arith::ff::{from_columns, mat_inverse, mat_vec, Embedding, FFElem, Fq};
use crate::arith::ffpoly::{self, ff_extend, FFPoly};
use crate::arith::{ExtRat, KPoly, K, Q};
use crate::error::{Error, Result};
use crate::newton;

/// Data attached to one level of a chain. Level 0 is the Gauss valuation
/// with the conventions φ_0 = x, λ_0 = 0, e_0 = 1, h_0 = 0, ℓ_0 = 0, ℓ'_0 = 1.
#[derive(Clone, Debug)]
pub struct ChainLevel {
    pub phi: KPoly,
    pub lambda: ExtRat,
    /// e_{v_i}, the index of Z in the value group of v_i.
    pub e_v: i64,
    pub e: i64,
    pub h: i64,
    pub l: i64,
    pub lp: i64,
    /// k_i and the embedding k_{i-1} → k_i.
    pub field: Fq,
    pub emb: Embedding,
    /// Image of X_{i-1} in k_i: a root of ψ_i.
    pub z: FFElem,
    /// ψ_i = φ_i|_{v_{i-1}}, monic over k_{i-1}.
    pub psi: FFPoly,
    decomp: Vec<Vec<u64>>,
}

impl ChainLevel {
    /// [k_i : k_{i-1}].
    pub fn rel_deg(&self) -> usize {
        self.psi.len() - 1
    }
}

#[derive(Clone, Debug)]
pub struct MacLaneVal {
    k: K,
    levels: Vec<ChainLevel>,
}

/// The numeric invariants of a chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainInvariants {
    pub degree: usize,
    pub radius: ExtRat,
    pub e: i64,
    pub epsilon: i64,
    pub b: i64,
    pub h: i64,
    pub ell: i64,
    pub ell_prime: i64,
    /// [k_i : k_{i-1}] for i = 1..n.
    pub residue_degrees: Vec<usize>,
    /// [k_v : k].
    pub f: usize,
}

fn lcm(a: i64, b: i64) -> i64 {
    a / a.gcd(&b) * b
}

/// ℓ with ℓh ≡ 1 mod e, 0 ≤ ℓ < e, and ℓ' = (1 − ℓh)/e.
fn bezout(h: i64, e: i64) -> (i64, i64) {
    if e == 1 {
        return (0, 1);
    }
    let hm = h.rem_euclid(e);
    let l = (0..e).find(|&l| (l * hm) % e == 1).expect("h and e coprime");
    (l, (1 - l * h) / e)
}

impl MacLaneVal {
    pub fn gauss(k: &K) -> Self {
        let k0 = k.residue_field().clone();
        let level = ChainLevel {
            phi: k.x(),
            lambda: ExtRat::zero(),
            e_v: 1,
            e: 1,
            h: 0,
            l: 0,
            lp: 1,
            field: k0.clone(),
            emb: Embedding::identity(&k0),
            z: k0.zero(),
            psi: ffpoly::x(&k0),
            decomp: (0..k0.deg()).map(|i| (0..k0.deg()).map(|j| u64::from(i == j)).collect()).collect(),
        };
        MacLaneVal { k: k.clone(), levels: vec![level] }
    }

    /// Builds [v_0, v_1(φ_1)=λ_1, …] checking every augmentation.
    pub fn from_steps(k: &K, steps: &[(KPoly, ExtRat)]) -> Result<Self> {
        let mut v = Self::gauss(k);
        for (phi, lambda) in steps {
            v = v.augment(phi, lambda.clone())?;
        }
        Ok(v)
    }

    pub fn base(&self) -> &K {
        &self.k
    }

    /// Number of augmentation steps n.
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, i: usize) -> &ChainLevel {
        &self.levels[i]
    }

    pub fn levels(&self) -> &[ChainLevel] {
        &self.levels
    }

    pub fn is_gauss(&self) -> bool {
        self.depth() == 0
    }

    pub fn is_pseudo(&self) -> bool {
        self.radius().is_inf()
    }

    pub fn centre(&self) -> &KPoly {
        &self.levels.last().unwrap().phi
    }

    pub fn radius(&self) -> ExtRat {
        self.levels.last().unwrap().lambda.clone()
    }

    pub fn degree(&self) -> usize {
        self.centre().len() - 1
    }

    /// The truncation v_i.
    pub fn prefix(&self, i: usize) -> MacLaneVal {
        MacLaneVal { k: self.k.clone(), levels: self.levels[..=i].to_vec() }
    }

    pub fn steps(&self) -> Vec<(KPoly, ExtRat)> {
        self.levels[1..].iter().map(|l| (l.phi.clone(), l.lambda.clone())).collect()
    }

    /// k_v.
    pub fn residue_field(&self) -> &Fq {
        &self.levels.last().unwrap().field
    }

    pub fn field_at(&self, i: usize) -> &Fq {
        &self.levels[i].field
    }

    /// e_v.
    #[allow(clippy::misnamed_getters)]
    pub fn e(&self) -> i64 {
        self.levels.last().unwrap().e_v
    }

    pub fn eval(&self, g: &KPoly) -> ExtRat {
        self.eval_at(self.depth(), g)
    }

    /// The value of g under the truncation v_i.
    pub fn eval_at(&self, i: usize, g: &KPoly) -> ExtRat {
        if g.is_empty() {
            return ExtRat::Inf;
        }
        if i == 0 {
            return self.k.pval(g);
        }
        let lev = &self.levels[i];
        if g.len() < lev.phi.len() {
            return self.eval_at(i - 1, g);
        }
        let coeffs = self.k.phi_expand(g, &lev.phi);
        if lev.lambda.is_inf() {
            return self.eval_at(i - 1, &coeffs[0]);
        }
        let lam = lev.lambda.q();
        coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_empty())
            .map(|(s, a)| &self.eval_at(i - 1, a) + &(lam * qi(s as i64)))
            .min()
            .unwrap_or(ExtRat::Inf)
    }

    /// g ≡_v h, i.e. v(g − h) > v(g).
    pub fn equiv(&self, g: &KPoly, h: &KPoly) -> bool {
        self.eval(&self.k.psub(g, h)) > self.eval(g)
    }

    /// Whether φ is a key polynomial over this valuation.
    pub fn is_key(&self, phi: &KPoly) -> bool {
        let k = &self.k;
        if !k.is_monic(phi) || phi.len() < 2 || !k.is_integral(phi) {
            return false;
        }
        if self.is_pseudo() {
            return false;
        }
        if self.is_gauss() {
            return match k.reduce_poly(phi) {
                Ok(r) => ffpoly::is_irreducible(k.residue_field(), &r),
                Err(_) => false,
            };
        }
        let n = self.depth();
        let phin = &self.levels[n].phi;
        if phi.len() == phin.len() {
            return self.eval(&k.psub(phi, phin)) >= self.levels[n].lambda;
        }
        let Ok(edge) = newton::selected_edge_of(self, phi) else {
            return false;
        };
        if edge.i0 != 0 || (phi.len() - 1) != edge.i1 * self.degree() {
            return false;
        }
        match newton::reduction(self, phi) {
            Ok(r) => ffpoly::is_irreducible(self.residue_field(), &r),
            Err(_) => false,
        }
    }

    /// [v, v(φ) = λ]. A centre of the same degree as v replaces the last step.
    pub fn augment(&self, phi: &KPoly, lambda: ExtRat) -> Result<MacLaneVal> {
        if !self.is_key(phi) {
            return Err(Error::NotAKeyPolynomial);
        }
        if lambda <= self.eval(phi) {
            return Err(Error::RadiusNotAboveCentreValue);
        }
        let base = if !self.is_gauss() && phi.len() == self.centre().len() {
            self.prefix(self.depth() - 1)
        } else {
            self.clone()
        };
        base.push_level(phi.clone(), lambda)
    }

    /// [v, v(φ) = λ] keeping every existing step, so the result may be a
    /// non-minimal chain.
    pub fn extend(&self, phi: &KPoly, lambda: ExtRat) -> Result<MacLaneVal> {
        if !self.is_key(phi) {
            return Err(Error::NotAKeyPolynomial);
        }
        if lambda <= self.eval(phi) {
            return Err(Error::RadiusNotAboveCentreValue);
        }
        self.push_level(phi.clone(), lambda)
    }

    /// Appends a step without the key-polynomial check; φ must be a key
    /// polynomial over `self` and λ > v(φ).
    pub(crate) fn push_level(&self, phi: KPoly, lambda: ExtRat) -> Result<MacLaneVal> {
        let k = &self.k;
        let prev = self.levels.last().unwrap();
        let psi = if self.is_gauss() { k.reduce_poly(&phi)? } else { newton::reduction(self, &phi)? };
        let psi = ffpoly::monic(&prev.field, &psi);
        let (field, emb, z) = ff_extend(&prev.field, &psi)?;
        let fdeg = psi.len() - 1;
        let mut cols = vec![];
        let mut zt = field.one();
        for _ in 0..fdeg {
            for r in 0..prev.field.deg() {
                let mut e = prev.field.zero();
                e[r] = 1;
                cols.push(field.mul(&emb.apply(&e), &zt));
            }
            zt = field.mul(&zt, &z);
        }
        let decomp = mat_inverse(&from_columns(&cols), k.p())
            .ok_or_else(|| Error::InternalInconsistency("residue tower basis is dependent".into()))?;
        let (e_v, e, h, l, lp) = match &lambda {
            ExtRat::Inf => (prev.e_v, 1, 0, 0, 1),
            ExtRat::Fin(q) => {
                let den = q.denom().to_i64().ok_or_else(|| Error::Input("radius denominator too large".into()))?;
                let e_v = lcm(prev.e_v, den);
                let e = e_v / prev.e_v;
                let h = q_to_i64(&(q * qi(e_v))).ok_or_else(|| Error::Input("radius too large".into()))?;
                let (l, lp) = bezout(h, e);
                (e_v, e, h, l, lp)
            }
        };
        let mut levels = self.levels.clone();
        levels.push(ChainLevel { phi, lambda, e_v, e, h, l, lp, field, emb, z, psi, decomp });
        Ok(MacLaneVal { k: k.clone(), levels })
    }

    /// Writes c ∈ k_i as Σ_t q_t z_i^t with q_t ∈ k_{i-1}, t < [k_i : k_{i-1}].
    pub fn decompose(&self, i: usize, c: &FFElem) -> Vec<FFElem> {
        let lev = &self.levels[i];
        let sub = self.levels[i - 1].field.deg();
        let coords = mat_vec(&lev.decomp, c, self.k.p());
        coords.chunks(sub).map(|ch| ch.to_vec()).collect()
    }

    /// v ≤ w: every value of v is at most the corresponding value of w.
    pub fn leq(&self, w: &MacLaneVal) -> bool {
        if self.is_gauss() {
            return true;
        }
        let last = self.levels.last().unwrap();
        w.eval(&last.phi) >= last.lambda
    }

    pub fn same(&self, w: &MacLaneVal) -> bool {
        self.leq(w) && w.leq(self)
    }

    /// Removes steps followed by a step of the same degree.
    pub fn minimal_chain(&self) -> Result<MacLaneVal> {
        let n = self.depth();
        let mut v = MacLaneVal::gauss(&self.k);
        for i in 1..=n {
            if i < n && self.levels[i].phi.len() == self.levels[i + 1].phi.len() {
                continue;
            }
            let lev = &self.levels[i];
            v = v.push_level(lev.phi.clone(), lev.lambda.clone())?;
        }
        Ok(v)
    }

    /// The greatest valuation below both.
    pub fn meet(&self, w: &MacLaneVal) -> Result<MacLaneVal> {
        let v = self.minimal_chain()?;
        let n = v.depth();
        let mut j = 0;
        while j < n && v.prefix(j + 1).leq(w) {
            j += 1;
        }
        if j == n {
            return Ok(v);
        }
        let vj = v.prefix(j);
        let next = &v.levels[j + 1];
        let mu = ExtRat::min(next.lambda.clone(), w.eval(&next.phi));
        if mu > vj.eval(&next.phi) {
            vj.push_level(next.phi.clone(), mu)
        } else {
            Ok(vj)
        }
    }

    pub fn invariants(&self) -> ChainInvariants {
        let n = self.depth();
        let last = &self.levels[n];
        let residue_degrees: Vec<usize> = self.levels[1..].iter().map(|l| l.rel_deg()).collect();
        ChainInvariants {
            degree: self.degree(),
            radius: last.lambda.clone(),
            e: last.e_v,
            epsilon: if n == 0 { 1 } else { self.levels[n - 1].e_v },
            b: last.e,
            h: last.h,
            ell: last.l,
            ell_prime: last.lp,
            f: residue_degrees.iter().product(),
            residue_degrees,
        }
    }

    /// e_{v_i}·α as an integer, if α lies in the value group of v_i.
    pub fn scaled(&self, i: usize, alpha: &Q) -> Result<BigInt> {
        let t = alpha * qi(self.levels[i].e_v);
        if t.is_integer() {
            Ok(t.to_integer())
        } else {
            Err(Error::AlphaNotInValueGroup)
        }
    }

    pub fn fmt_chain(&self) -> String {
        let mut s = String::from("[v0");
        for (i, l) in self.levels.iter().enumerate().skip(1) {
            s.push_str(&format!(", v{i}({}) = {}", self.k.fmt_poly(&l.phi, "x"), l.lambda));
        }
        s.push(']');
        s
    }
}

impl fmt::Display for MacLaneVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_chain())
    }
}
