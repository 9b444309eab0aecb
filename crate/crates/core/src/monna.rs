//! The change of variables rho: Q_p -> R_+, sending the digit at
//! position i to weight p^{-i-1}.
//!
//! On Z[1/p] the value is an exact rational: terminating expansions give
//! finite sums, and negative mantissas (whose expansions end in the
//! repeating digit p-1) pick up the geometric tail `p^{e-T}` in closed
//! form, never by truncation. rho carries the Haar measure onto Lebesgue
//! measure; balls map onto half-open intervals of equal length.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::padic::{rational_pow, Ball, PAdicRational};

/// Exact digit-reversal value of a point of Z[1/p].
pub fn rho(x: &PAdicRational) -> BigRational {
    if x.is_zero() {
        return BigRational::zero();
    }
    let p = x.prime();
    let e = x.exponent() as i64;
    if !x.mantissa().is_negative() {
        return rho_of_mantissa(x.mantissa(), p, e);
    }
    // digits below position T come from m mod p^T; from T on they are
    // all p-1 and sum to exactly p^{e-T}
    let big_p = BigInt::from(p);
    let mut t: i64 = 0;
    let mut pw = BigInt::one();
    let abs = x.mantissa().abs();
    while pw < abs {
        pw *= &big_p;
        t += 1;
    }
    let rep = x.mantissa().mod_floor(&pw);
    rho_of_mantissa(&rep, p, e) + rational_pow(p, e - t)
}

/// `sum_t d_t p^{e-1-t}` over the base-p digits d_t of a nonnegative m.
fn rho_of_mantissa(m: &BigInt, prime: u64, e: i64) -> BigRational {
    let p = BigInt::from(prime);
    let mut acc = BigRational::zero();
    let mut cur = m.clone();
    let mut t: i64 = 0;
    while !cur.is_zero() {
        let (q, r) = cur.div_rem(&p);
        if !r.is_zero() {
            acc += BigRational::from_integer(r) * rational_pow(prime, e - 1 - t);
        }
        cur = q;
        t += 1;
    }
    acc
}

/// The bijection Q_p/Z_p -> N: rho restricted to canonical
/// representatives, always a natural number.
pub fn rho_nat(n: &PAdicRational) -> Result<BigUint> {
    if n.is_zero() {
        return Ok(BigUint::zero());
    }
    let ell = n.exponent();
    let bound = BigInt::from(n.prime()).pow(ell);
    if ell == 0 || n.mantissa().is_negative() || n.mantissa() >= &bound {
        return Err(Error::NonCanonical(n.to_string()));
    }
    let r = rho(n);
    debug_assert!(r.is_integer());
    Ok(r.to_integer().to_biguint().expect("rho_nat is nonnegative"))
}

/// Canonical right inverse of rho on nonnegative p-ary rationals:
/// returns the preimage with terminating expansion, so
/// `rho(rho_section(r)) = r` exactly. The second preimage of a p-ary
/// rational (the one ending in repeating p-1) is never produced.
pub fn rho_section(prime: u64, r: &BigRational) -> Result<PAdicRational> {
    if r.is_negative() {
        return Err(Error::Parse(format!("rho_section needs r >= 0, got {r}")));
    }
    let big_p = BigInt::from(prime);
    let mut den = r.denom().clone();
    let mut s: i64 = 0;
    while (&den % &big_p).is_zero() {
        den /= &big_p;
        s += 1;
    }
    if !den.is_one() {
        return Err(Error::NotPAry(r.to_string(), prime));
    }
    // r = a p^{-s}: reflect the digits of a around position s-1
    let mut x = PAdicRational::zero(prime);
    let mut cur = r.numer().clone();
    let mut t: i64 = 0;
    while !cur.is_zero() {
        let (q, d) = cur.div_rem(&big_p);
        if !d.is_zero() {
            let digit = i64::try_from(&d).expect("digit below p");
            x = x.add(&PAdicRational::monomial(prime, digit, s - 1 - t));
        }
        cur = q;
        t += 1;
    }
    Ok(x)
}

/// Half-open interval `[left, left + length)`.
///
/// Closed intervals would overlap at endpoints (a measure-zero set);
/// half-open intervals turn the image family of a ball partition into
/// an exact partition of the half-line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    left: BigRational,
    length: BigRational,
}

impl Interval {
    pub fn new(left: BigRational, length: BigRational) -> Self {
        assert!(length.is_positive(), "interval length must be positive");
        Interval { left, length }
    }

    pub fn left(&self) -> &BigRational {
        &self.left
    }

    pub fn length(&self) -> &BigRational {
        &self.length
    }

    pub fn right(&self) -> BigRational {
        &self.left + &self.length
    }

    pub fn contains(&self, r: &BigRational) -> bool {
        r >= &self.left && r < &self.right()
    }

    /// Membership including the right endpoint. Ball members whose
    /// expansions end in the repeating digit p-1 map exactly onto the
    /// right endpoint (the finite exception set of the image statement),
    /// so membership tests use the closed interval.
    pub fn contains_closed(&self, r: &BigRational) -> bool {
        r >= &self.left && r <= &self.right()
    }

    /// Length of the intersection with another interval, exact.
    pub fn overlap_length(&self, other: &Interval) -> BigRational {
        let lo = self.left.clone().max(other.left.clone());
        let hi = self.right().min(other.right());
        if hi > lo {
            hi - lo
        } else {
            BigRational::zero()
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.left, self.right())
    }
}

/// Image of the ball `p^m n + p^k Z_p`: the interval
/// `[p^{-m} rho(n), p^{-m} rho(n) + p^{-k})`.
pub fn ball_image(prime: u64, m: i64, n: &PAdicRational, k: i64) -> Interval {
    let left = rational_pow(prime, -m) * rho(n);
    Interval::new(left, rational_pow(prime, -k))
}

/// Image of an arbitrary ball. The canonical center has no digits at
/// positions >= radius_exp, so its rho value is the left endpoint.
pub fn ball_image_of(b: &Ball) -> Interval {
    Interval::new(rho(b.center()), rational_pow(b.prime(), -b.radius_exp()))
}

/// The pair `(|rho(x) - rho(y)|, |x - y|_p)`, both exact; the first
/// never exceeds the second.
pub fn holder_gap(x: &PAdicRational, y: &PAdicRational) -> (BigRational, BigRational) {
    let gap = (rho(x) - rho(y)).abs();
    let dist = x.sub(y).norm();
    (gap, dist)
}

/// `(mu(b), length(ball_image(b)))`: equal exact rationals.
pub fn measure_preservation_check(b: &Ball) -> (BigRational, BigRational) {
    (b.measure(), ball_image_of(b).length().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn q(prime: u64, m: i64, e: u32) -> PAdicRational {
        PAdicRational::new(prime, BigInt::from(m), e)
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho(&PAdicRational::zero(2)), BigRational::zero());
        assert_eq!(rho(&q(2, 1, 1)), rat(1, 1));
        // rho(n - 1) = rho(n) + 1 for n = 1/2
        assert_eq!(rho(&q(2, -1, 1)), rat(2, 1));
        assert_eq!(rho(&q(2, -1, 0)), rat(1, 1));
        // hand expansion: -3 = 1 + 4 + 8 + ... so rho = 1/2 + 1/4
        assert_eq!(rho(&q(2, -3, 0)), rat(3, 4));
        assert_eq!(rho(&q(2, 3, 2)), rat(3, 1));
        assert_eq!(rho(&q(3, 2, 1)), rat(2, 1));
    }

    #[test]
    fn rho_dilation_identity() {
        let mut rng = StdRng::seed_from_u64(7);
        for p in [2u64, 3, 5] {
            for _ in 0..200 {
                let x = q(p, rng.gen_range(-10_000..10_000), rng.gen_range(0..5));
                for gamma in -3i64..=3 {
                    let lhs = rational_pow(p, -gamma) * rho(&x);
                    let rhs = rho(&x.mul_monomial(gamma));
                    assert_eq!(lhs, rhs, "p={p} gamma={gamma} x={x}");
                }
            }
        }
    }

    #[test]
    fn rho_nat_examples() {
        assert_eq!(rho_nat(&PAdicRational::zero(2)).unwrap(), BigUint::zero());
        assert_eq!(rho_nat(&q(2, 1, 1)).unwrap(), BigUint::from(1u32));
        assert_eq!(rho_nat(&q(2, 1, 2)).unwrap(), BigUint::from(2u32));
        assert_eq!(rho_nat(&q(2, 3, 2)).unwrap(), BigUint::from(3u32));
        assert_eq!(rho_nat(&q(3, 2, 1)).unwrap(), BigUint::from(2u32));
        assert!(rho_nat(&q(2, 5, 1)).is_err());
        assert!(rho_nat(&q(2, -1, 1)).is_err());
    }

    #[test]
    fn rho_nat_is_bijective_on_first_sixteen() {
        // canonical representatives with at most 4 fractional digits map
        // exactly onto 0..16
        let mut images = Vec::new();
        for ell in 0u32..=4 {
            for m in 0..(1i64 << ell) {
                let n = q(2, m, ell);
                if n.exponent() != ell {
                    continue; // not reduced at this level
                }
                images.push(rho_nat(&n).unwrap());
            }
        }
        images.sort();
        let expected: Vec<BigUint> = (0u32..16).map(BigUint::from).collect();
        assert_eq!(images, expected);
    }

    #[test]
    fn rho_section_examples() {
        assert_eq!(
            rho_section(2, &BigRational::zero()).unwrap(),
            PAdicRational::zero(2)
        );
        assert_eq!(rho_section(2, &rat(1, 1)).unwrap(), q(2, 1, 1));
        assert_eq!(rho_section(2, &rat(2, 1)).unwrap(), q(2, 1, 2));
        assert!(rho_section(2, &rat(1, 3)).is_err());
        assert!(rho_section(2, &rat(-1, 2)).is_err());
    }

    #[test]
    fn rho_section_round_trips() {
        let mut rng = StdRng::seed_from_u64(11);
        for p in [2u64, 3] {
            for _ in 0..1000 {
                let num = rng.gen_range(0i64..100_000);
                let s = rng.gen_range(0i64..6);
                let r = BigRational::new(BigInt::from(num), BigInt::from(p).pow(s as u32));
                let x = rho_section(p, &r).unwrap();
                assert_eq!(rho(&x), r);
                // the section picks the terminating preimage
                assert!(!x.mantissa().is_negative());
            }
        }
    }

    #[test]
    fn ball_image_examples() {
        let z = ball_image(2, 0, &PAdicRational::zero(2), 0);
        assert_eq!(z, Interval::new(rat(0, 1), rat(1, 1)));
        let half = ball_image(2, 0, &q(2, 1, 1), 0);
        assert_eq!(half, Interval::new(rat(1, 1), rat(1, 1)));
        let two_z = ball_image(2, 0, &PAdicRational::zero(2), 1);
        assert_eq!(two_z, Interval::new(rat(0, 1), rat(1, 2)));
    }

    #[test]
    fn ball_image_of_matches_parameterized_form() {
        // B(1/2, 0) is 1/2 + Z_2
        let b = Ball::new(q(2, 1, 1), 0);
        assert_eq!(ball_image_of(&b), ball_image(2, 0, &q(2, 1, 1), 0));
        // 2 Z_2 written as p^m n + p^k Z_p with n = 0, k = 1
        let b = Ball::new(q(2, 2, 0), 1);
        assert_eq!(ball_image_of(&b), Interval::new(rat(0, 1), rat(1, 2)));
    }

    #[test]
    fn holder_gap_examples() {
        let (g, d) = holder_gap(&q(2, 3, 1), &q(2, 3, 1));
        assert_eq!((g, d), (rat(0, 1), rat(0, 1)));
        let (g, d) = holder_gap(&PAdicRational::zero(2), &q(2, 1, 1));
        assert_eq!((g, d), (rat(1, 1), rat(2, 1)));
        let (g, d) = holder_gap(&PAdicRational::zero(2), &q(2, 1, 0));
        assert_eq!((g, d), (rat(1, 2), rat(1, 1)));
    }

    #[test]
    fn holder_inequality_with_equality_witness() {
        let mut rng = StdRng::seed_from_u64(3);
        let mut witnessed = false;
        for _ in 0..2000 {
            let x = q(2, rng.gen_range(-256..256), rng.gen_range(0..5));
            let y = if rng.gen_bool(0.5) {
                q(2, rng.gen_range(-256..256), rng.gen_range(0..5))
            } else {
                // differences of the form p^gamma make the bound tight
                x.sub(&PAdicRational::monomial(2, 1, rng.gen_range(-4..4)))
            };
            let (gap, dist) = holder_gap(&x, &y);
            assert!(gap <= dist, "x={x} y={y}");
            if gap == dist && !dist.is_zero() {
                witnessed = true;
            }
        }
        assert!(witnessed, "no equality witness found");
    }

    #[test]
    fn measure_preservation_examples() {
        for p in [2u64, 3, 5] {
            let (mu, len) = measure_preservation_check(&Ball::unit(p));
            assert_eq!(mu, rat(1, 1));
            assert_eq!(len, rat(1, 1));
        }
        let b = Ball::new(PAdicRational::zero(3), 2);
        let (mu, len) = measure_preservation_check(&b);
        assert_eq!(mu, rat(1, 9));
        assert_eq!(len, rat(1, 9));
    }

    #[test]
    fn random_members_land_in_the_image_interval() {
        let mut rng = StdRng::seed_from_u64(19);
        for p in [2u64, 3] {
            for _ in 0..100 {
                let center = q(p, rng.gen_range(-50..50), rng.gen_range(0..3));
                let k = rng.gen_range(-2i64..=2);
                let b = Ball::new(center, k);
                let img = ball_image_of(&b);
                for _ in 0..10 {
                    let offset = PAdicRational::monomial(p, rng.gen_range(-100..100), k);
                    let member = b.center().add(&offset);
                    assert!(b.contains(&member));
                    assert!(img.contains_closed(&rho(&member)), "member {member} of {b}");
                }
                // the all-(p-1)-tail member hits exactly the right endpoint
                let edge = b.center().add(&PAdicRational::monomial(p, -1, k));
                assert_eq!(rho(&edge), img.right());
            }
        }
    }

    #[test]
    fn disjoint_balls_have_disjoint_images() {
        // exhaustive at one level plus mixed levels inside B(0, 4)
        let root = Ball::new(PAdicRational::zero(2), -2);
        let mut balls = vec![root.clone()];
        let mut frontier = vec![root];
        for _ in 0..4 {
            frontier = frontier.iter().flat_map(|b| b.children()).collect();
            balls.extend(frontier.clone());
        }
        for a in &balls {
            for b in &balls {
                let overlap = ball_image_of(a).overlap_length(&ball_image_of(b));
                match a.relation(b) {
                    crate::padic::BallRelation::Disjoint => {
                        assert_eq!(overlap, BigRational::zero(), "{a} vs {b}")
                    }
                    _ => assert!(!overlap.is_zero()),
                }
            }
        }
    }
}
