use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Largest integer not exceeding `a`.
pub fn floor_q(a: &Q) -> BigInt {
    a.numer().div_floor(a.denom())
}

/// True when `a` is an integer divisible by 2.
pub fn in_2z(a: &Q) -> bool {
    a.is_integer() && a.numer().is_even()
}

/// True when `a` is an odd integer.
pub fn is_odd_integer(a: &Q) -> bool {
    a.is_integer() && a.numer().is_odd()
}

pub fn q_to_i64(a: &Q) -> Option<i64> {
    if a.is_integer() {
        a.numer().to_i64()
    } else {
        None
    }
}

/// A rational number or `+∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtRat {
    Fin(Q),
    Inf,
}

impl ExtRat {
    pub fn int(n: i64) -> Self {
        ExtRat::Fin(qi(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        ExtRat::Fin(qf(n, d))
    }

    pub fn zero() -> Self {
        ExtRat::Fin(Q::zero())
    }

    pub fn is_inf(&self) -> bool {
        matches!(self, ExtRat::Inf)
    }

    pub fn fin(&self) -> Option<&Q> {
        match self {
            ExtRat::Fin(q) => Some(q),
            ExtRat::Inf => None,
        }
    }

    /// Panics on `∞`; only for values known to be finite.
    pub fn q(&self) -> &Q {
        self.fin().expect("finite value expected")
    }

    pub fn mul_int(&self, k: i64) -> ExtRat {
        match self {
            ExtRat::Inf if k == 0 => ExtRat::zero(),
            ExtRat::Inf => ExtRat::Inf,
            ExtRat::Fin(q) => ExtRat::Fin(q * qi(k)),
        }
    }

    pub fn min(a: ExtRat, b: ExtRat) -> ExtRat {
        if a <= b {
            a
        } else {
            b
        }
    }
}

impl From<Q> for ExtRat {
    fn from(q: Q) -> Self {
        ExtRat::Fin(q)
    }
}

impl PartialOrd for ExtRat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtRat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtRat::Inf, ExtRat::Inf) => Ordering::Equal,
            (ExtRat::Inf, _) => Ordering::Greater,
            (_, ExtRat::Inf) => Ordering::Less,
            (ExtRat::Fin(a), ExtRat::Fin(b)) => a.cmp(b),
        }
    }
}

impl Add for &ExtRat {
    type Output = ExtRat;
    fn add(self, o: &ExtRat) -> ExtRat {
        match (self, o) {
            (ExtRat::Fin(a), ExtRat::Fin(b)) => ExtRat::Fin(a + b),
            _ => ExtRat::Inf,
        }
    }
}

impl Add for ExtRat {
    type Output = ExtRat;
    fn add(self, o: ExtRat) -> ExtRat {
        &self + &o
    }
}

impl Add<&Q> for &ExtRat {
    type Output = ExtRat;
    fn add(self, o: &Q) -> ExtRat {
        match self {
            ExtRat::Fin(a) => ExtRat::Fin(a + o),
            ExtRat::Inf => ExtRat::Inf,
        }
    }
}

impl Sub<&Q> for &ExtRat {
    type Output = ExtRat;
    fn sub(self, o: &Q) -> ExtRat {
        match self {
            ExtRat::Fin(a) => ExtRat::Fin(a - o),
            ExtRat::Inf => ExtRat::Inf,
        }
    }
}

impl Neg for &ExtRat {
    type Output = Option<ExtRat>;
    fn neg(self) -> Option<ExtRat> {
        self.fin().map(|q| ExtRat::Fin(-q))
    }
}

impl fmt::Display for ExtRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRat::Inf => write!(f, "inf"),
            ExtRat::Fin(q) => write!(f, "{}", fmt_q(q)),
        }
    }
}

pub fn fmt_q(q: &Q) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// p-adic valuation of a nonzero integer.
pub fn vp_int(n: &BigInt, p: u64) -> i64 {
    debug_assert!(!n.is_zero());
    let pb = BigInt::from(p);
    let mut n = n.abs();
    let mut k = 0;
    loop {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            return k;
        }
        n = q;
        k += 1;
    }
}

/// p-adic valuation of a rational, `None` for zero.
pub fn vp_q(a: &Q, p: u64) -> Option<i64> {
    if a.is_zero() {
        None
    } else {
        Some(vp_int(a.numer(), p) - vp_int(a.denom(), p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_and_sum() {
        assert!(ExtRat::int(5) < ExtRat::Inf);
        assert_eq!(&ExtRat::Inf + &ExtRat::frac(1, 2), ExtRat::Inf);
        assert_eq!(&ExtRat::frac(1, 2) + &ExtRat::frac(1, 3), ExtRat::frac(5, 6));
    }

    #[test]
    fn padic_valuation() {
        assert_eq!(vp_q(&qf(50, 3), 5), Some(2));
        assert_eq!(vp_q(&qf(3, 50), 5), Some(-2));
        assert_eq!(vp_q(&Q::zero(), 5), None);
    }

    #[test]
    fn floor_and_parity() {
        assert_eq!(floor_q(&qf(-1, 2)), BigInt::from(-1));
        assert_eq!(floor_q(&qf(5, 3)), BigInt::from(1));
        assert!(in_2z(&qi(-4)));
        assert!(!in_2z(&qf(1, 2)));
        assert!(is_odd_integer(&qi(-3)));
        assert!(!is_odd_integer(&qf(3, 2)));
    }
}
