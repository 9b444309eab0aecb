//! Exact arithmetic on the dense subring Z[1/p] of Q_p.
//!
//! A point is stored as `m * p^{-e}` with an arbitrary-precision mantissa
//! and a nonnegative exponent, kept reduced so that norms, valuations and
//! fractional parts are exact. Balls carry a canonical center, which makes
//! ball equality a plain field comparison and gives every ball an exact
//! Haar measure `p^{-k}` under the normalization `mu(Z_p) = 1`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// p-adic valuation of a point, with an explicit sentinel for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    /// True when the valuation is at least `k`, i.e. `|x|_p <= p^{-k}`.
    pub fn at_least(&self, k: i64) -> bool {
        match self {
            Valuation::Finite(v) => *v >= k,
            Valuation::Infinite => true,
        }
    }

    pub fn finite(&self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(*v),
            Valuation::Infinite => None,
        }
    }
}

/// An element of Z[1/p]: `mantissa * prime^{-exponent}`.
///
/// Reduced form: `mantissa = 0` forces `exponent = 0`, and a positive
/// exponent forces `p` not to divide the mantissa.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PAdicRational {
    prime: u64,
    mantissa: BigInt,
    exponent: u32,
}

impl PAdicRational {
    pub fn new(prime: u64, mantissa: BigInt, exponent: u32) -> Self {
        assert!(prime >= 2, "prime must be >= 2");
        let mut x = PAdicRational {
            prime,
            mantissa,
            exponent,
        };
        x.reduce();
        x
    }

    pub fn zero(prime: u64) -> Self {
        PAdicRational::new(prime, BigInt::zero(), 0)
    }

    pub fn one(prime: u64) -> Self {
        PAdicRational::new(prime, BigInt::one(), 0)
    }

    pub fn from_integer(prime: u64, n: i64) -> Self {
        PAdicRational::new(prime, BigInt::from(n), 0)
    }

    /// `c * p^k` for any integer k (negative k raises the denominator).
    pub fn monomial(prime: u64, c: i64, k: i64) -> Self {
        let big_p = BigInt::from(prime);
        if k >= 0 {
            PAdicRational::new(prime, BigInt::from(c) * big_p.pow(k as u32), 0)
        } else {
            PAdicRational::new(prime, BigInt::from(c), (-k) as u32)
        }
    }

    fn reduce(&mut self) {
        if self.mantissa.is_zero() {
            self.exponent = 0;
            return;
        }
        let big_p = BigInt::from(self.prime);
        while self.exponent > 0 {
            let (q, r) = self.mantissa.div_rem(&big_p);
            if r.is_zero() {
                self.mantissa = q;
                self.exponent -= 1;
            } else {
                break;
            }
        }
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    /// The exponent gamma with `|x|_p = p^{-gamma}`; infinite for x = 0.
    pub fn valuation(&self) -> Valuation {
        if self.mantissa.is_zero() {
            return Valuation::Infinite;
        }
        let big_p = BigInt::from(self.prime);
        let mut v: i64 = -(self.exponent as i64);
        let mut m = self.mantissa.clone();
        loop {
            let (q, r) = m.div_rem(&big_p);
            if r.is_zero() {
                v += 1;
                m = q;
            } else {
                break;
            }
        }
        Valuation::Finite(v)
    }

    /// `|x|_p = p^{-valuation}` as an exact rational; 0 for x = 0.
    pub fn norm(&self) -> BigRational {
        match self.valuation() {
            Valuation::Infinite => BigRational::zero(),
            Valuation::Finite(v) => rational_pow(self.prime, -v),
        }
    }

    /// The p-adic fractional part, an exact rational in [0, 1).
    ///
    /// Equals the sum of the negative-position digits of the expansion;
    /// for negative mantissas the representative is still taken in
    /// `[0, p^e)`, which matches the eventually-(p-1)-periodic tail.
    pub fn frac(&self) -> BigRational {
        if self.exponent == 0 {
            return BigRational::zero();
        }
        let den = BigInt::from(self.prime).pow(self.exponent);
        let num = self.mantissa.mod_floor(&den);
        BigRational::new(num, den)
    }

    /// The additive character `chi(x) = exp(2 pi i {x}_p)`.
    ///
    /// Exact at the quarter points, the only nontrivial values on the
    /// unit circle that doubles can represent exactly.
    pub fn character(&self) -> Complex64 {
        let f = self.frac();
        if f.is_zero() {
            return Complex64::new(1.0, 0.0);
        }
        let four = &f * BigRational::from_integer(BigInt::from(4));
        if four.is_integer() {
            match four.to_integer().to_i64() {
                Some(1) => return Complex64::new(0.0, 1.0),
                Some(2) => return Complex64::new(-1.0, 0.0),
                Some(3) => return Complex64::new(0.0, -1.0),
                _ => {}
            }
        }
        let angle = 2.0 * std::f64::consts::PI * f.to_f64().unwrap_or(0.0);
        Complex64::from_polar(1.0, angle)
    }

    /// Value as an ordinary rational number.
    pub fn to_rational(&self) -> BigRational {
        BigRational::new(
            self.mantissa.clone(),
            BigInt::from(self.prime).pow(self.exponent),
        )
    }

    /// Base-p digits of the expansion, as pairs `(position, digit)`.
    ///
    /// Terminates for a nonnegative mantissa. For a negative mantissa the
    /// expansion is infinite; `periodic_from` reports the position from
    /// which every digit equals p-1 (closed-form consumers handle the tail
    /// separately).
    pub fn digits(&self) -> Digits {
        let p = BigInt::from(self.prime);
        let start = -(self.exponent as i64);
        if self.mantissa.is_negative() {
            // choose T with p^T >= |m|, digits below T come from m mod p^T
            let mut t = 0u32;
            let mut pw = BigInt::one();
            let abs = self.mantissa.abs();
            while pw < abs {
                pw *= &p;
                t += 1;
            }
            let rep = self.mantissa.mod_floor(&pw);
            Digits {
                entries: digit_list(&rep, self.prime, start),
                periodic_from: start + t as i64,
            }
        } else {
            Digits {
                entries: digit_list(&self.mantissa, self.prime, start),
                periodic_from: i64::MAX,
            }
        }
    }

    fn assert_same_prime(&self, other: &Self) {
        assert_eq!(
            self.prime, other.prime,
            "cannot combine values over different primes"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_prime(other);
        let p = BigInt::from(self.prime);
        let e = self.exponent.max(other.exponent);
        let m =
            &self.mantissa * p.pow(e - self.exponent) + &other.mantissa * p.pow(e - other.exponent);
        PAdicRational::new(self.prime, m, e)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        PAdicRational {
            prime: self.prime,
            mantissa: -&self.mantissa,
            exponent: self.exponent,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same_prime(other);
        PAdicRational::new(
            self.prime,
            &self.mantissa * &other.mantissa,
            self.exponent + other.exponent,
        )
    }

    /// Multiply by `p^k`, the only division ever needed in Z[1/p].
    pub fn mul_monomial(&self, k: i64) -> Self {
        if self.mantissa.is_zero() {
            return self.clone();
        }
        let p = BigInt::from(self.prime);
        if k >= 0 {
            PAdicRational::new(self.prime, &self.mantissa * p.pow(k as u32), self.exponent)
        } else {
            PAdicRational::new(
                self.prime,
                self.mantissa.clone(),
                self.exponent + (-k) as u32,
            )
        }
    }

    /// Parse `"m/p^e"` (or a bare integer) against an expected prime.
    pub fn parse(s: &str, prime: u64) -> Result<Self> {
        let s = s.trim();
        if let Some((m_str, pe_str)) = s.split_once('/') {
            let (p_str, e_str) = pe_str
                .split_once('^')
                .ok_or_else(|| Error::Parse(format!("expected m/p^e, got {s:?}")))?;
            let m: BigInt = m_str
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad mantissa in {s:?}")))?;
            let p: u64 = p_str
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad base in {s:?}")))?;
            let e: u32 = e_str
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?;
            if p != prime {
                return Err(Error::PrimeMismatch(p, prime));
            }
            Ok(PAdicRational::new(prime, m, e))
        } else {
            let m: BigInt = s
                .parse()
                .map_err(|_| Error::Parse(format!("bad integer {s:?}")))?;
            Ok(PAdicRational::new(prime, m, 0))
        }
    }
}

impl fmt::Display for PAdicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}^{}", self.mantissa, self.prime, self.exponent)
    }
}

impl PartialOrd for PAdicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PAdicRational {
    /// Order by rational value (points with distinct values compare as
    /// ordinary numbers; equal values are identical after reduction).
    fn cmp(&self, other: &Self) -> Ordering {
        let p = BigInt::from(self.prime);
        let lhs = &self.mantissa * p.pow(other.exponent);
        let rhs = &other.mantissa * p.pow(self.exponent);
        lhs.cmp(&rhs)
    }
}

/// Digit expansion view; see [`PAdicRational::digits`].
#[derive(Debug, Clone)]
pub struct Digits {
    /// `(position i, digit a_i)` with digit in 0..p, positions ascending.
    pub entries: Vec<(i64, u64)>,
    /// Position from which every digit is p-1 (i64::MAX when terminating).
    pub periodic_from: i64,
}

fn digit_list(m: &BigInt, prime: u64, start: i64) -> Vec<(i64, u64)> {
    debug_assert!(!m.is_negative());
    let p = BigInt::from(prime);
    let mut out = Vec::new();
    let mut cur = m.clone();
    let mut pos = start;
    while !cur.is_zero() {
        let (q, r) = cur.div_rem(&p);
        let d = r.to_u64().expect("digit fits u64");
        if d != 0 {
            out.push((pos, d));
        }
        cur = q;
        pos += 1;
    }
    out
}

/// `p^k` as an exact rational, for any integer k.
pub fn rational_pow(prime: u64, k: i64) -> BigRational {
    let p = BigInt::from(prime);
    if k >= 0 {
        BigRational::from_integer(p.pow(k as u32))
    } else {
        BigRational::new(BigInt::one(), p.pow((-k) as u32))
    }
}

/// `p^k` in double precision.
pub fn float_pow(prime: u64, k: i64) -> f64 {
    (prime as f64).powi(k as i32)
}

/// Relation between two balls of the same prime; the ultrametric allows
/// nothing besides these four cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BallRelation {
    Disjoint,
    /// left is a proper subset of right
    Subset,
    /// right is a proper subset of left
    Superset,
    Equal,
}

/// The disc `{x : |x - center|_p <= p^{-radius_exp}}` with exact Haar
/// measure `p^{-radius_exp}`.
///
/// The stored center is canonical: reduced modulo `p^{radius_exp} Z_p` to
/// the representative with terminating expansion supported on positions
/// below `radius_exp`. Every member of the ball canonicalizes to the same
/// center, so equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ball {
    prime: u64,
    center: PAdicRational,
    radius_exp: i64,
}

impl Ball {
    pub fn new(center: PAdicRational, radius_exp: i64) -> Self {
        let prime = center.prime();
        let center = canonical_center(&center, radius_exp);
        Ball {
            prime,
            center,
            radius_exp,
        }
    }

    /// The unit ball Z_p.
    pub fn unit(prime: u64) -> Self {
        Ball::new(PAdicRational::zero(prime), 0)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn center(&self) -> &PAdicRational {
        &self.center
    }

    pub fn radius_exp(&self) -> i64 {
        self.radius_exp
    }

    /// Exact Haar measure `p^{-radius_exp}`.
    pub fn measure(&self) -> BigRational {
        rational_pow(self.prime, -self.radius_exp)
    }

    pub fn contains(&self, x: &PAdicRational) -> bool {
        self.center.sub(x).valuation().at_least(self.radius_exp)
    }

    pub fn relation(&self, other: &Ball) -> BallRelation {
        assert_eq!(self.prime, other.prime, "balls over different primes");
        let d = self.center.sub(&other.center).valuation();
        match self.radius_exp.cmp(&other.radius_exp) {
            Ordering::Equal => {
                if d.at_least(self.radius_exp) {
                    BallRelation::Equal
                } else {
                    BallRelation::Disjoint
                }
            }
            Ordering::Greater => {
                // self is the smaller ball
                if d.at_least(other.radius_exp) {
                    BallRelation::Subset
                } else {
                    BallRelation::Disjoint
                }
            }
            Ordering::Less => {
                if d.at_least(self.radius_exp) {
                    BallRelation::Superset
                } else {
                    BallRelation::Disjoint
                }
            }
        }
    }

    pub fn is_subset_of(&self, other: &Ball) -> bool {
        matches!(
            self.relation(other),
            BallRelation::Subset | BallRelation::Equal
        )
    }

    /// The p maximal proper subballs, pairwise disjoint, union = self.
    pub fn children(&self) -> Vec<Ball> {
        (0..self.prime)
            .map(|r| {
                let offset = PAdicRational::monomial(self.prime, r as i64, self.radius_exp);
                Ball::new(self.center.add(&offset), self.radius_exp + 1)
            })
            .collect()
    }

    /// The unique ball one level coarser that contains self.
    pub fn parent(&self) -> Ball {
        Ball::new(self.center.clone(), self.radius_exp - 1)
    }

    /// Smallest ball containing both.
    pub fn join(&self, other: &Ball) -> Ball {
        match self.relation(other) {
            BallRelation::Subset | BallRelation::Equal => other.clone(),
            BallRelation::Superset => self.clone(),
            BallRelation::Disjoint => {
                let d = self
                    .center
                    .sub(&other.center)
                    .valuation()
                    .finite()
                    .expect("disjoint balls have distinct centers");
                Ball::new(
                    self.center.clone(),
                    d.min(self.radius_exp).min(other.radius_exp),
                )
            }
        }
    }

    /// Smallest ball containing self and the point.
    pub fn join_point(&self, x: &PAdicRational) -> Ball {
        if self.contains(x) {
            return self.clone();
        }
        let d = self
            .center
            .sub(x)
            .valuation()
            .finite()
            .expect("point outside the ball differs from the center");
        Ball::new(self.center.clone(), d.min(self.radius_exp))
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B({}, {})", self.center, self.radius_exp)
    }
}

impl PartialOrd for Ball {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ball {
    fn cmp(&self, other: &Self) -> Ordering {
        self.center
            .cmp(&other.center)
            .then(self.radius_exp.cmp(&other.radius_exp))
    }
}

/// Reduce a center modulo `p^k Z_p` to the terminating representative
/// with all digits at positions >= k equal to zero.
fn canonical_center(c: &PAdicRational, radius_exp: i64) -> PAdicRational {
    let e = c.exponent() as i64;
    let cut = e + radius_exp;
    if cut <= 0 {
        // the whole point lies inside p^k Z_p
        return PAdicRational::zero(c.prime());
    }
    let modulus = BigInt::from(c.prime()).pow(cut as u32);
    let m = c.mantissa().mod_floor(&modulus);
    PAdicRational::new(c.prime(), m, c.exponent())
}
