//! Exact arithmetic shared by every module: dyadic rationals, small rationals,
//! and comparisons of the form `N^b` against `2^E` that never touch floats.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Small exact rational used for exponents, densities and parameters.
pub type Q = Ratio<i64>;

/// Parses `a/b` or `a` into a [`Q`].
pub fn parse_q(text: &str) -> Result<Q> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: i64 = num
        .parse()
        .map_err(|_| Error::parse(format!("bad rational numerator in {text:?}")))?;
    let den: i64 = den
        .parse()
        .map_err(|_| Error::parse(format!("bad rational denominator in {text:?}")))?;
    if den == 0 {
        return Err(Error::parse(format!("zero denominator in {text:?}")));
    }
    Ok(Q::new(num, den))
}

pub fn q_to_big(q: &Q) -> BigRational {
    BigRational::new(BigInt::from(*q.numer()), BigInt::from(*q.denom()))
}

/// Renders an exact big rational as `num/den`.
pub fn fmt_big_ratio(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// A non-negative dyadic rational `num / 2^log2_den`, kept normalized
/// (odd numerator or zero).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dyadic {
    num: BigUint,
    log2_den: u64,
}

impl Dyadic {
    pub fn new(num: BigUint, log2_den: u64) -> Self {
        let mut d = Dyadic { num, log2_den };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic {
            num: BigUint::zero(),
            log2_den: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            num: BigUint::one(),
            log2_den: 0,
        }
    }

    /// `2^-k`.
    pub fn pow2_neg(k: u64) -> Self {
        Dyadic {
            num: BigUint::one(),
            log2_den: k,
        }
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.log2_den = 0;
            return;
        }
        let tz = self.num.trailing_zeros().unwrap_or(0).min(self.log2_den);
        if tz > 0 {
            self.num >>= tz;
            self.log2_den -= tz;
        }
    }

    pub fn numer(&self) -> &BigUint {
        &self.num
    }

    pub fn log2_den(&self) -> u64 {
        self.log2_den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn half(&self) -> Self {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic::new(self.num.clone(), self.log2_den + 1)
    }

    /// `Some(e)` when the value equals `2^-e` exactly.
    pub fn neg_log2_exact(&self) -> Option<i64> {
        if self.num.is_one() {
            Some(self.log2_den as i64)
        } else if !self.num.is_zero() && is_power_of_two(&self.num) {
            Some(self.log2_den as i64 - (self.num.bits() as i64 - 1))
        } else {
            None
        }
    }

    pub fn to_big_rational(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.num.clone()),
            BigInt::from(BigUint::one() << self.log2_den),
        )
    }

    /// Compares `self` with `c * 2^-e` where `c = num/den` is a small
    /// positive rational and `e` a rational exponent, i.e. tests
    /// `mass ? c * 2^(-e)`; exact via integer powers.
    pub fn cmp_scaled_pow2(&self, c: &Q, e: &Q) -> Ordering {
        // mass = M / 2^L; compare M * den * 2^e  vs  num * 2^L
        // with e = a/b: raise both sides to the b-th power:
        // (M*den)^b * 2^a  vs  num^b * 2^(L*b)
        assert!(*c.numer() > 0 && *c.denom() > 0, "scale must be positive");
        if self.is_zero() {
            return Ordering::Less;
        }
        let b = *e.denom() as u64;
        let a = *e.numer();
        let lhs_base = &self.num * BigUint::from(*c.denom() as u64);
        let rhs_base = BigUint::from(*c.numer() as u64);
        // lhs = lhs_base^b * 2^a ; rhs = rhs_base^b * 2^(L*b)
        let shift = BigInt::from(self.log2_den) * BigInt::from(b) - BigInt::from(a);
        // compare lhs_base^b vs rhs_base^b * 2^shift
        cmp_products(&lhs_base, &rhs_base, b, &shift)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let l = self.log2_den.max(other.log2_den);
        let a = &self.num << (l - self.log2_den);
        let b = &other.num << (l - other.log2_den);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let l = self.log2_den.max(rhs.log2_den);
        let a = &self.num << (l - self.log2_den);
        let b = &rhs.num << (l - rhs.log2_den);
        Dyadic::new(a + b, l)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.num * &rhs.num, self.log2_den + rhs.log2_den)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.log2_den == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.log2_den)
        }
    }
}

pub fn is_power_of_two(n: &BigUint) -> bool {
    !n.is_zero() && n.count_ones() == 1
}

/// `floor(log2 n)` and whether it is exact. `n` must be positive.
pub fn log2_floor(n: &BigUint) -> (u64, bool) {
    assert!(!n.is_zero(), "log2 of zero");
    (n.bits() - 1, is_power_of_two(n))
}

/// Compares `n^b` with `2^e`. Uses bit-length brackets first so huge
/// exponents never get materialized.
pub fn cmp_pow_pow2(n: &BigUint, b: u64, e: &BigInt) -> Ordering {
    cmp_products(n, &BigUint::one(), b, e)
}

/// Compares `x^b` with `y^b * 2^shift` for positive `x`, `y`.
pub(crate) fn cmp_products(x: &BigUint, y: &BigUint, b: u64, shift: &BigInt) -> Ordering {
    if x.is_zero() {
        return if y.is_zero() {
            Ordering::Equal
        } else {
            Ordering::Less
        };
    }
    if b == 0 {
        // 1 vs 2^shift
        return BigInt::zero().cmp(shift);
    }
    // log2(x^b) in [b(bx-1), b*bx), log2(y^b 2^s) in [b(by-1)+s, b*by+s)
    let bx = BigInt::from(x.bits());
    let by = BigInt::from(y.bits());
    let bb = BigInt::from(b);
    let lx_lo = &bb * (&bx - 1u32);
    let lx_hi = &bb * &bx;
    let ly_lo = &bb * (&by - 1u32) + shift;
    let ly_hi = &bb * &by + shift;
    if lx_hi <= ly_lo {
        return Ordering::Less;
    }
    if ly_hi <= lx_lo {
        return Ordering::Greater;
    }
    // The two brackets overlap, so |shift| is at most about b*(bx+by) bits:
    // small enough to evaluate exactly.
    let bu = b as u32;
    let xb = num_traits::pow(x.clone(), bu as usize);
    let yb = num_traits::pow(y.clone(), bu as usize);
    let s = shift.to_i64().expect("shift bounded by bracket overlap");
    if s >= 0 {
        xb.cmp(&(yb << (s as u64)))
    } else {
        (xb << ((-s) as u64)).cmp(&yb)
    }
}

/// Sign-aware comparison of `log2(n)` against the rational `r`:
/// returns the ordering of `log2 n` relative to `r`.
pub fn cmp_log2_q(n: &BigUint, r: &BigRational) -> Ordering {
    assert!(!n.is_zero(), "log2 of zero");
    // log2 n ? a/b  <=>  n^b ? 2^a   (b > 0)
    let b = r.denom().to_u64().expect("denominator fits u64");
    cmp_pow_pow2(n, b, r.numer())
}

/// Converts a nonnegative `BigInt` to `BigUint`; panics on negatives.
pub fn to_biguint(x: &BigInt) -> BigUint {
    assert!(x.sign() != Sign::Minus, "negative value");
    x.magnitude().clone()
}

/// Floor of a big rational.
pub fn floor_big(r: &BigRational) -> BigInt {
    r.floor().to_integer()
}

pub fn abs_diff_q(a: &BigRational, b: &BigRational) -> BigRational {
    (a - b).abs()
}

/// Serializers writing exact numbers as decimal text (`n` or `n/d`) so
/// records never carry limb arrays or floats.
pub mod text {
    use num_bigint::BigUint;
    use num_rational::BigRational;
    use serde::ser::SerializeSeq;
    use serde::Serializer;

    pub fn big<S: Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(x)
    }

    pub fn ratio<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&format_args!("{}/{}", x.numer(), x.denom()))
    }

    pub fn display<T: std::fmt::Display, S: Serializer>(x: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(x)
    }

    pub fn big_pairs<S: Serializer>(v: &[(BigUint, BigUint)], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for (a, b) in v {
            seq.serialize_element(&[a.to_string(), b.to_string()])?;
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_normalizes_and_adds() {
        let a = Dyadic::new(BigUint::from(2u32), 3); // 1/4
        assert_eq!(a, Dyadic::pow2_neg(2));
        let s = &Dyadic::pow2_neg(2) + &Dyadic::pow2_neg(2);
        assert_eq!(s, Dyadic::pow2_neg(1));
        assert_eq!(&s + &s, Dyadic::one());
        assert_eq!(Dyadic::pow2_neg(3).neg_log2_exact(), Some(3));
        assert_eq!(Dyadic::new(BigUint::from(3u32), 2).neg_log2_exact(), None);
        assert!(Dyadic::pow2_neg(3) < Dyadic::pow2_neg(2));
    }

    #[test]
    fn pow_comparisons_match_direct_evaluation() {
        for n in 1u32..40 {
            for b in 1u64..5 {
                for e in -3i64..30 {
                    let lhs = BigRational::from_integer(BigInt::from(n).pow(b as u32));
                    let rhs = if e >= 0 {
                        BigRational::from_integer(BigInt::from(1) << e as u64)
                    } else {
                        BigRational::new(BigInt::from(1), BigInt::from(1) << (-e) as u64)
                    };
                    assert_eq!(
                        cmp_pow_pow2(&BigUint::from(n), b, &BigInt::from(e)),
                        lhs.cmp(&rhs),
                        "n={n} b={b} e={e}"
                    );
                }
            }
        }
    }

    #[test]
    fn huge_exponents_use_brackets() {
        let e = BigInt::from(1u32) << 200u32;
        assert_eq!(cmp_pow_pow2(&BigUint::from(7u32), 3, &e), Ordering::Less);
        assert_eq!(
            cmp_pow_pow2(&BigUint::from(7u32), 3, &(-e)),
            Ordering::Greater
        );
    }

    #[test]
    fn scaled_pow2_comparison() {
        // 1/4 vs (1/2) * 2^(-1/2) = 0.3535..
        let m = Dyadic::pow2_neg(2);
        assert_eq!(
            m.cmp_scaled_pow2(&Q::new(1, 2), &Q::new(1, 2)),
            Ordering::Less
        );
        // 1/2 vs 1 * 2^-1
        assert_eq!(
            Dyadic::pow2_neg(1).cmp_scaled_pow2(&Q::new(1, 1), &Q::new(1, 1)),
            Ordering::Equal
        );
        // 3/4 vs 1 * 2^(-1/2) = 0.7071
        let m = Dyadic::new(BigUint::from(3u32), 2);
        assert_eq!(
            m.cmp_scaled_pow2(&Q::new(1, 1), &Q::new(1, 2)),
            Ordering::Greater
        );
        // negative exponent: 1 vs (1/3) * 2^(2) = 4/3
        assert_eq!(
            Dyadic::one().cmp_scaled_pow2(&Q::new(1, 3), &Q::new(-2, 1)),
            Ordering::Less
        );
    }

    #[test]
    fn log2_against_rationals() {
        let eight = BigUint::from(8u32);
        assert_eq!(
            cmp_log2_q(&eight, &BigRational::from_integer(3.into())),
            Ordering::Equal
        );
        let r = BigRational::new(5.into(), 2.into()); // 2.5 < 3
        assert_eq!(cmp_log2_q(&eight, &r), Ordering::Greater);
        assert_eq!(parse_q("2/3").unwrap(), Q::new(2, 3));
        assert!(parse_q("1/0").is_err());
    }
}
