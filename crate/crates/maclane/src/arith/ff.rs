//! Finite fields F_q represented absolutely as F_p[t]/(m(t)).

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;

use crate::error::{Error, Result};

pub type FFElem = Vec<u64>;

#[inline]
pub fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

pub fn invmod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    powmod(a, p - 2, p)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Inverse of a square matrix over F_p (rows), or `None` when singular.
pub fn mat_inverse(m: &[Vec<u64>], p: u64) -> Option<Vec<Vec<u64>>> {
    let n = m.len();
    let mut a: Vec<Vec<u64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| u64::from(i == j)));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| a[r][col] != 0)?;
        a.swap(col, piv);
        let inv = invmod(a[col][col], p);
        for x in a[col].iter_mut() {
            *x = mulmod(*x, inv, p);
        }
        let pivot = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != col && row[col] != 0 {
                let f = row[col];
                for (x, &y) in row.iter_mut().zip(&pivot) {
                    *x = (*x + p - mulmod(f, y, p)) % p;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_vec(m: &[Vec<u64>], v: &[u64], p: u64) -> Vec<u64> {
    m.iter().map(|row| row.iter().zip(v).fold(0u64, |acc, (a, b)| (acc + mulmod(*a, *b, p)) % p)).collect()
}

/// Matrix whose columns are the given vectors.
pub fn from_columns(cols: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let n = cols.first().map_or(0, |c| c.len());
    (0..n).map(|i| cols.iter().map(|c| c[i]).collect()).collect()
}

/// A finite field F_p[t]/(m(t)) with a fixed monic irreducible modulus.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FField {
    p: u64,
    modulus: Vec<u64>,
}

pub type Fq = Arc<FField>;

impl FField {
    /// The prime field F_p, presented with modulus `t`.
    pub fn prime(p: u64) -> Fq {
        Arc::new(FField { p, modulus: vec![0, 1] })
    }

    /// Field with the given monic modulus; irreducibility is checked.
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Fq> {
        let fp = FField::prime(p);
        let poly: Vec<FFElem> = modulus.iter().map(|&c| vec![c % p]).collect();
        if modulus.last() != Some(&1) || !crate::arith::ffpoly::is_irreducible(&fp, &poly) {
            return Err(Error::NotIrreducible);
        }
        Ok(Arc::new(FField { p, modulus }))
    }

    pub(crate) fn with_modulus_unchecked(p: u64, modulus: Vec<u64>) -> Fq {
        Arc::new(FField { p, modulus })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn deg(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn order(&self) -> BigUint {
        BigUint::from(self.p).pow(self.deg() as u32)
    }

    pub fn zero(&self) -> FFElem {
        vec![0; self.deg()]
    }

    pub fn one(&self) -> FFElem {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> FFElem {
        let mut v = self.zero();
        v[0] = n.rem_euclid(self.p as i64) as u64;
        v
    }

    /// The class of `t`; zero for the prime field.
    pub fn gen(&self) -> FFElem {
        if self.deg() == 1 {
            vec![(self.p - self.modulus[0]) % self.p]
        } else {
            let mut v = self.zero();
            v[1] = 1;
            v
        }
    }

    pub fn is_zero(&self, a: &FFElem) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &FFElem, b: &FFElem) -> FFElem {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.p).collect()
    }

    pub fn sub(&self, a: &FFElem, b: &FFElem) -> FFElem {
        a.iter().zip(b).map(|(x, y)| (x + self.p - y) % self.p).collect()
    }

    pub fn neg(&self, a: &FFElem) -> FFElem {
        a.iter().map(|x| (self.p - x) % self.p).collect()
    }

    pub fn scale(&self, a: &FFElem, k: u64) -> FFElem {
        a.iter().map(|x| mulmod(*x, k % self.p, self.p)).collect()
    }

    pub fn mul(&self, a: &FFElem, b: &FFElem) -> FFElem {
        let d = self.deg();
        let p = self.p;
        if d == 1 {
            return vec![mulmod(a[0], b[0], p)];
        }
        let mut prod = vec![0u64; 2 * d - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + mulmod(x, y, p)) % p;
            }
        }
        for k in (d..prod.len()).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            for (j, &mj) in self.modulus[..d].iter().enumerate() {
                let s = mulmod(c, mj, p);
                prod[k - d + j] = (prod[k - d + j] + p - s) % p;
            }
            prod[k] = 0;
        }
        prod.truncate(d);
        prod
    }

    pub fn pow(&self, a: &FFElem, e: &BigUint) -> FFElem {
        let mut r = self.one();
        for i in (0..e.bits()).rev() {
            r = self.mul(&r, &r);
            if e.bit(i) {
                r = self.mul(&r, a);
            }
        }
        r
    }

    pub fn pow_i64(&self, a: &FFElem, e: i64) -> FFElem {
        if e >= 0 {
            self.pow(a, &BigUint::from(e as u64))
        } else {
            let inv = self.inv(a);
            self.pow(&inv, &BigUint::from(e.unsigned_abs()))
        }
    }

    /// Inverse via the extended Euclidean algorithm in F_p[t]; panics on zero.
    pub fn inv(&self, a: &FFElem) -> FFElem {
        assert!(!self.is_zero(a), "inverse of zero");
        let p = self.p;
        if self.deg() == 1 {
            return vec![invmod(a[0], p)];
        }
        let trim = |v: &mut Vec<u64>| {
            while v.len() > 1 && *v.last().unwrap() == 0 {
                v.pop();
            }
        };
        let mut r0 = self.modulus.clone();
        let mut r1 = a.clone();
        trim(&mut r1);
        let mut s0: Vec<u64> = vec![0];
        let mut s1: Vec<u64> = vec![1];
        while !(r1.len() == 1 && r1[0] == 0) {
            let mut rem = r0.clone();
            let lead_inv = invmod(*r1.last().unwrap(), p);
            let mut quot = vec![0u64; rem.len().saturating_sub(r1.len()) + 1];
            while rem.len() >= r1.len() && !(rem.len() == 1 && rem[0] == 0) {
                let shift = rem.len() - r1.len();
                let c = mulmod(*rem.last().unwrap(), lead_inv, p);
                quot[shift] = c;
                for (j, &b) in r1.iter().enumerate() {
                    let s = mulmod(c, b, p);
                    rem[shift + j] = (rem[shift + j] + p - s) % p;
                }
                rem.pop();
                trim(&mut rem);
                if rem.is_empty() {
                    rem.push(0);
                }
            }
            let mut prod = vec![0u64; quot.len() + s1.len()];
            for (i, &q) in quot.iter().enumerate() {
                for (j, &s) in s1.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + mulmod(q, s, p)) % p;
                }
            }
            let n = prod.len().max(s0.len());
            let mut s2: Vec<u64> = (0..n)
                .map(|i| {
                    let a0 = s0.get(i).copied().unwrap_or(0);
                    let b0 = prod.get(i).copied().unwrap_or(0);
                    (a0 + p - b0) % p
                })
                .collect();
            trim(&mut s2);
            r0 = std::mem::replace(&mut r1, rem);
            s0 = std::mem::replace(&mut s1, s2);
        }
        let c = invmod(r0[0], p);
        let mut out = self.zero();
        for (i, &s) in s0.iter().enumerate() {
            if i < out.len() {
                out[i] = mulmod(s, c, p);
            }
        }
        out
    }

    pub fn div(&self, a: &FFElem, b: &FFElem) -> FFElem {
        self.mul(a, &self.inv(b))
    }

    pub fn is_square(&self, a: &FFElem) -> bool {
        if self.is_zero(a) {
            return true;
        }
        let e = (self.order() - BigUint::one()) >> 1;
        self.pow(a, &e) == self.one()
    }

    /// The unique p-th root (Frobenius is bijective on a finite field).
    pub fn pth_root(&self, a: &FFElem) -> FFElem {
        let e = BigUint::from(self.p).pow(self.deg() as u32 - 1);
        self.pow(a, &e)
    }

    pub fn random<R: Rng>(&self, rng: &mut R) -> FFElem {
        (0..self.deg()).map(|_| rng.gen_range(0..self.p)).collect()
    }

    /// Enumerates all elements for small fields (used by brute-force checks).
    pub fn elements(&self) -> Vec<FFElem> {
        let q = self.p.pow(self.deg() as u32);
        (0..q)
            .map(|mut n| {
                (0..self.deg())
                    .map(|_| {
                        let c = n % self.p;
                        n /= self.p;
                        c
                    })
                    .collect()
            })
            .collect()
    }

    pub fn fmt_elem(&self, a: &FFElem) -> String {
        if self.deg() == 1 {
            return a[0].to_string();
        }
        let terms: Vec<String> = a
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "t".to_string(),
                (1, c) => format!("{c}*t"),
                (i, 1) => format!("t^{i}"),
                (i, c) => format!("{c}*t^{i}"),
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }
}

/// An explicit ring injection between two finite fields, stored as the images
/// of the power basis of the source.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub src: Fq,
    pub dst: Fq,
    images: Vec<FFElem>,
}

impl Embedding {
    pub fn identity(f: &Fq) -> Self {
        let images = (0..f.deg())
            .map(|i| {
                let mut v = f.zero();
                v[i] = 1;
                v
            })
            .collect();
        Embedding { src: f.clone(), dst: f.clone(), images }
    }

    /// Embedding determined by the image of the generator `t`.
    pub fn from_gen_image(src: &Fq, dst: &Fq, g: &FFElem) -> Self {
        let mut images = Vec::with_capacity(src.deg());
        let mut cur = dst.one();
        for _ in 0..src.deg() {
            images.push(cur.clone());
            cur = dst.mul(&cur, g);
        }
        Embedding { src: src.clone(), dst: dst.clone(), images }
    }

    pub fn apply(&self, a: &FFElem) -> FFElem {
        let mut out = self.dst.zero();
        for (c, img) in a.iter().zip(&self.images) {
            if *c != 0 {
                out = self.dst.add(&out, &self.dst.scale(img, *c));
            }
        }
        out
    }

    pub fn compose(&self, next: &Embedding) -> Embedding {
        debug_assert_eq!(self.dst, next.src);
        Embedding {
            src: self.src.clone(),
            dst: next.dst.clone(),
            images: self.images.iter().map(|i| next.apply(i)).collect(),
        }
    }
}
