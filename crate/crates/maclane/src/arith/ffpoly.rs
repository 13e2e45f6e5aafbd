//! Dense univariate polynomials over a finite field and their factorization
//! (squarefree decomposition, distinct-degree and equal-degree splitting).

use num_bigint::BigUint;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ff::{from_columns, mat_inverse, mat_vec, Embedding, FFElem, FField, Fq};
use crate::error::{Error, Result};

/// Coefficients from the constant term upwards; no trailing zeros.
pub type FFPoly = Vec<FFElem>;

pub fn trim(f: &FField, a: &mut FFPoly) {
    while a.last().is_some_and(|c| f.is_zero(c)) {
        a.pop();
    }
}

pub fn degree(a: &FFPoly) -> Option<usize> {
    a.len().checked_sub(1)
}

pub fn constant(f: &FField, c: FFElem) -> FFPoly {
    let mut v = vec![c];
    trim(f, &mut v);
    v
}

pub fn monomial(f: &FField, c: FFElem, k: usize) -> FFPoly {
    let mut v = vec![f.zero(); k];
    v.push(c);
    trim(f, &mut v);
    v
}

pub fn x(f: &FField) -> FFPoly {
    monomial(f, f.one(), 1)
}

pub fn one(f: &FField) -> FFPoly {
    vec![f.one()]
}

pub fn add(f: &FField, a: &FFPoly, b: &FFPoly) -> FFPoly {
    let n = a.len().max(b.len());
    let z = f.zero();
    let mut out: FFPoly = (0..n).map(|i| f.add(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z))).collect();
    trim(f, &mut out);
    out
}

pub fn sub(f: &FField, a: &FFPoly, b: &FFPoly) -> FFPoly {
    let n = a.len().max(b.len());
    let z = f.zero();
    let mut out: FFPoly = (0..n).map(|i| f.sub(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z))).collect();
    trim(f, &mut out);
    out
}

pub fn scale(f: &FField, a: &FFPoly, c: &FFElem) -> FFPoly {
    let mut out: FFPoly = a.iter().map(|x| f.mul(x, c)).collect();
    trim(f, &mut out);
    out
}

pub fn mul(f: &FField, a: &FFPoly, b: &FFPoly) -> FFPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if f.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = f.add(&out[i + j], &f.mul(x, y));
        }
    }
    trim(f, &mut out);
    out
}

pub fn pow(f: &FField, a: &FFPoly, k: usize) -> FFPoly {
    let mut r = one(f);
    for _ in 0..k {
        r = mul(f, &r, a);
    }
    r
}

/// Division with remainder; `b` must be nonzero.
pub fn divrem(f: &FField, a: &FFPoly, b: &FFPoly) -> (FFPoly, FFPoly) {
    let db = degree(b).expect("division by zero polynomial");
    let inv = f.inv(&b[db]);
    let mut r = a.clone();
    if r.len() <= db {
        return (vec![], r);
    }
    let mut q = vec![f.zero(); r.len() - db];
    while r.len() > db {
        let k = r.len() - 1 - db;
        let c = f.mul(r.last().unwrap(), &inv);
        for (j, bj) in b.iter().enumerate() {
            r[k + j] = f.sub(&r[k + j], &f.mul(&c, bj));
        }
        q[k] = c;
        r.pop();
        trim(f, &mut r);
    }
    trim(f, &mut q);
    (q, r)
}

pub fn rem(f: &FField, a: &FFPoly, b: &FFPoly) -> FFPoly {
    divrem(f, a, b).1
}

pub fn monic(f: &FField, a: &FFPoly) -> FFPoly {
    match a.last() {
        None => vec![],
        Some(l) => scale(f, a, &f.inv(l)),
    }
}

pub fn gcd(f: &FField, a: &FFPoly, b: &FFPoly) -> FFPoly {
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_empty() {
        let r = rem(f, &x, &y);
        x = y;
        y = r;
    }
    monic(f, &x)
}

pub fn derivative(f: &FField, a: &FFPoly) -> FFPoly {
    let mut out: FFPoly = a.iter().enumerate().skip(1).map(|(i, c)| f.scale(c, i as u64)).collect();
    trim(f, &mut out);
    out
}

pub fn eval(f: &FField, a: &FFPoly, x: &FFElem) -> FFElem {
    a.iter().rev().fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
}

pub fn powmod(f: &FField, base: &FFPoly, e: &BigUint, m: &FFPoly) -> FFPoly {
    let b = rem(f, base, m);
    let mut r = rem(f, &one(f), m);
    for i in (0..e.bits()).rev() {
        r = rem(f, &mul(f, &r, &r), m);
        if e.bit(i) {
            r = rem(f, &mul(f, &r, &b), m);
        }
    }
    r
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = vec![];
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's irreducibility test.
pub fn is_irreducible(f: &FField, a: &FFPoly) -> bool {
    let n = match degree(a) {
        None | Some(0) => return false,
        Some(1) => return true,
        Some(n) => n,
    };
    let m = monic(f, a);
    let q = f.order();
    let xp = x(f);
    let frob_iter = |k: usize| -> FFPoly {
        let mut h = xp.clone();
        for _ in 0..k {
            h = powmod(f, &h, &q, &m);
        }
        h
    };
    if frob_iter(n) != rem(f, &xp, &m) {
        return false;
    }
    prime_factors(n).into_iter().all(|r| {
        let h = sub(f, &frob_iter(n / r), &xp);
        degree(&gcd(f, &h, &m)) == Some(0)
    })
}

fn pth_root_poly(f: &FField, a: &FFPoly) -> FFPoly {
    let p = f.p() as usize;
    let mut out: FFPoly = a.iter().step_by(p).map(|c| f.pth_root(c)).collect();
    trim(f, &mut out);
    out
}

/// Squarefree decomposition of a monic polynomial: pairs (g_i, i) with
/// a = ∏ g_i^i and each g_i squarefree, pairwise coprime.
pub fn squarefree(f: &FField, a: &FFPoly) -> Vec<(FFPoly, usize)> {
    let a = monic(f, a);
    let mut out = vec![];
    if degree(&a).unwrap_or(0) == 0 {
        return out;
    }
    let mut c = gcd(f, &a, &derivative(f, &a));
    let mut w = divrem(f, &a, &c).0;
    let mut i = 1;
    while degree(&w).unwrap_or(0) > 0 {
        let y = gcd(f, &w, &c);
        let z = divrem(f, &w, &y).0;
        if degree(&z).unwrap_or(0) > 0 {
            out.push((z, i));
        }
        i += 1;
        c = divrem(f, &c, &y).0;
        w = y;
    }
    if degree(&c).unwrap_or(0) > 0 {
        let root = pth_root_poly(f, &c);
        let p = f.p() as usize;
        for (g, k) in squarefree(f, &root) {
            out.push((g, k * p));
        }
    }
    out
}

/// Distinct-degree factorization of a monic squarefree polynomial.
pub fn distinct_degree(f: &FField, a: &FFPoly) -> Vec<(FFPoly, usize)> {
    let mut out = vec![];
    let mut rest = monic(f, a);
    let q = f.order();
    let xp = x(f);
    let mut h = xp.clone();
    let mut d = 0;
    while degree(&rest).unwrap_or(0) >= 2 * (d + 1) {
        d += 1;
        h = powmod(f, &h, &q, &rest);
        let g = gcd(f, &sub(f, &h, &xp), &rest);
        if degree(&g).unwrap_or(0) > 0 {
            rest = divrem(f, &rest, &g).0;
            h = rem(f, &h, &rest);
            out.push((g, d));
        }
    }
    if let Some(n) = degree(&rest) {
        if n > 0 {
            out.push((rest, n));
        }
    }
    out
}

/// Cantor–Zassenhaus splitting of a monic squarefree product of irreducibles
/// of common degree `d` (odd characteristic).
pub fn equal_degree(f: &FField, a: &FFPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<FFPoly> {
    let n = degree(a).unwrap_or(0);
    if n == d {
        return vec![a.clone()];
    }
    let e = (f.order().pow(d as u32) - BigUint::one()) >> 1;
    loop {
        let mut r: FFPoly = (0..n).map(|_| f.random(rng)).collect();
        trim(f, &mut r);
        if degree(&r).unwrap_or(0) == 0 {
            continue;
        }
        let b = sub(f, &powmod(f, &r, &e, a), &one(f));
        let g = gcd(f, &b, a);
        let dg = degree(&g).unwrap_or(0);
        if dg > 0 && dg < n {
            let h = divrem(f, a, &g).0;
            let mut out = equal_degree(f, &g, d, rng);
            out.extend(equal_degree(f, &monic(f, &h), d, rng));
            return out;
        }
    }
}

/// Complete factorization into monic irreducibles with multiplicities, in a
/// canonical order (by degree, then coefficients). The leading coefficient is
/// not part of the output.
pub fn factor(f: &FField, a: &FFPoly, seed: u64) -> Vec<(FFPoly, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![];
    for (g, mult) in squarefree(f, a) {
        for (h, d) in distinct_degree(f, &g) {
            for irr in equal_degree(f, &h, d, &mut rng) {
                out.push((irr, mult));
            }
        }
    }
    out.sort_by(|(a, _), (b, _)| a.len().cmp(&b.len()).then_with(|| a.iter().rev().cmp(b.iter().rev())));
    out
}

/// Adjoins a root of the monic irreducible `h` to `base`. Returns the new
/// field, the embedding of `base` into it and the image of the root.
pub fn ff_extend(base: &Fq, h: &FFPoly) -> Result<(Fq, Embedding, FFElem)> {
    let f = base.as_ref();
    if !is_irreducible(f, h) {
        return Err(Error::NotIrreducible);
    }
    let h = monic(f, h);
    let dh = h.len() - 1;
    if dh == 1 {
        return Ok((base.clone(), Embedding::identity(base), f.neg(&h[0])));
    }
    let p = f.p();
    if f.deg() == 1 {
        let modulus: Vec<u64> = h.iter().map(|c| c[0]).collect();
        let dst = FField::with_modulus_unchecked(p, modulus);
        let emb = Embedding::from_gen_image(base, &dst, &dst.one());
        let root = dst.gen();
        return Ok((dst, emb, root));
    }
    // F[y]/(h) as a vector space over F_p, flattened coefficientwise.
    let big = f.deg() * dh;
    let flatten = |a: &FFPoly| -> Vec<u64> {
        let mut v = vec![0u64; big];
        for (i, c) in a.iter().enumerate() {
            v[i * f.deg()..(i + 1) * f.deg()].copy_from_slice(c);
        }
        v
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d61_636c);
    loop {
        let mut w: FFPoly = (0..dh).map(|_| f.random(&mut rng)).collect();
        trim(f, &mut w);
        if degree(&w).unwrap_or(0) == 0 {
            continue;
        }
        let mut powers = vec![one(f)];
        for _ in 0..big {
            let next = rem(f, &mul(f, powers.last().unwrap(), &w), &h);
            powers.push(next);
        }
        let cols: Vec<Vec<u64>> = powers[..big].iter().map(&flatten).collect();
        let Some(inv) = mat_inverse(&from_columns(&cols), p) else {
            continue;
        };
        let top = mat_vec(&inv, &flatten(&powers[big]), p);
        let mut modulus: Vec<u64> = top.iter().map(|c| (p - c) % p).collect();
        modulus.push(1);
        let dst = FField::with_modulus_unchecked(p, modulus);
        let to_dst = |a: &FFPoly| mat_vec(&inv, &flatten(a), p);
        let emb = Embedding::from_gen_image(base, &dst, &to_dst(&constant(f, f.gen())));
        let root = to_dst(&x(f));
        return Ok((dst, emb, root));
    }
}

pub fn fmt_poly(f: &FField, a: &FFPoly, var: &str) -> String {
    if a.is_empty() {
        return "0".into();
    }
    let mut terms = vec![];
    for (i, c) in a.iter().enumerate().rev() {
        if f.is_zero(c) {
            continue;
        }
        let cs = f.fmt_elem(c);
        let cs = if cs.contains('+') { format!("({cs})") } else { cs };
        let t = match (i, cs.as_str()) {
            (0, _) => cs.clone(),
            (_, "1") => var_pow(var, i),
            _ => format!("{cs}*{}", var_pow(var, i)),
        };
        terms.push(t);
    }
    terms.join(" + ")
}

fn var_pow(var: &str, i: usize) -> String {
    if i == 1 {
        var.to_string()
    } else {
        format!("{var}^{i}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp_poly(p: u64, c: &[i64]) -> FFPoly {
        let f = FField::prime(p);
        let mut v: FFPoly = c.iter().map(|&x| f.from_i64(x)).collect();
        trim(&f, &mut v);
        v
    }

    fn minpoly_over(f: &FField, e: &Embedding, root: &FFElem, h: &FFPoly) -> bool {
        let img: FFPoly = h.iter().map(|c| e.apply(c)).collect();
        f.is_zero(&eval(f, &img, root))
    }

    #[test]
    fn extend_trivial() {
        let f = FField::prime(5);
        let (g, _, r) = ff_extend(&f, &fp_poly(5, &[-1, 1])).unwrap();
        assert_eq!(g.deg(), 1);
        assert_eq!(r, vec![1]);
    }

    #[test]
    fn extend_f3_by_i() {
        let f = FField::prime(3);
        let h = fp_poly(3, &[1, 0, 1]);
        let (g, e, r) = ff_extend(&f, &h).unwrap();
        assert_eq!(g.deg(), 2);
        assert_eq!(g.mul(&r, &r), g.from_i64(-1));
        assert!(minpoly_over(&g, &e, &r, &h));
    }

    #[test]
    fn extend_f9_to_f81() {
        let f3 = FField::prime(3);
        let (f9, _, i) = ff_extend(&f3, &fp_poly(3, &[1, 0, 1])).unwrap();
        // y^2 - (1+i) is irreducible over F_9 iff 1+i is a nonsquare
        let c = f9.add(&f9.one(), &i);
        assert!(!f9.is_square(&c));
        let h = vec![f9.neg(&c), f9.zero(), f9.one()];
        let (f81, e, r) = ff_extend(&f9, &h).unwrap();
        assert_eq!(f81.deg(), 4);
        assert!(minpoly_over(&f81, &e, &r, &h));
        assert_eq!(e.apply(&f9.mul(&i, &i)), f81.mul(&e.apply(&i), &e.apply(&i)));
    }

    #[test]
    fn extend_rejects_reducible() {
        let f = FField::prime(7);
        assert!(ff_extend(&f, &fp_poly(7, &[-1, 0, 1])).is_err());
    }

    #[test]
    fn cube_of_linear_over_f5() {
        let f = FField::prime(5);
        let a = fp_poly(5, &[-1, 3, -3, 1]);
        assert_eq!(factor(&f, &a, 1), vec![(fp_poly(5, &[-1, 1]), 3)]);
    }

    #[test]
    fn split_quadratic_over_f7() {
        let f = FField::prime(7);
        let a = fp_poly(7, &[-1, 0, 1]);
        assert_eq!(factor(&f, &a, 1), vec![(fp_poly(7, &[1, 1]), 1), (fp_poly(7, &[-1, 1]), 1)]);
    }

    #[test]
    fn irreducible_quadratic_over_f3() {
        let f = FField::prime(3);
        let a = fp_poly(3, &[1, 0, 1]);
        assert_eq!(factor(&f, &a, 1), vec![(a.clone(), 1)]);
        assert!(is_irreducible(&f, &a));
    }

    #[test]
    fn pth_power_input() {
        let f = FField::prime(3);
        // (x+1)^3 (x^2+1)^2 = x^3 + 1 times square
        let a = mul(&f, &pow(&f, &fp_poly(3, &[1, 1]), 3), &pow(&f, &fp_poly(3, &[1, 0, 1]), 2));
        assert_eq!(factor(&f, &a, 9), vec![(fp_poly(3, &[1, 1]), 3), (fp_poly(3, &[1, 0, 1]), 2)]);
    }
}
