//! The orthonormal wavelet basis of L^2(Q_p).
//!
//! A basis function is indexed by a scale gamma, a residue j in 1..p, and
//! a representative n of Q_p/Z_p. It is supported on the ball
//! `p^{-gamma} n + p^{-gamma} Z_p`, takes exactly p constant values (one
//! per child of the support ball), and has unit norm.
//!
//! The infinite basis is truncated to a window: functions supported in
//! `B(0, p^V)` and constant on balls of radius `p^{-M}`. Together with one
//! normalized scaling function carrying the mean, the truncated family
//! spans that finite-dimensional space exactly, so analysis/synthesis
//! round-trips are exact rather than approximate.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lcf::PiecewiseConstant;
use crate::padic::{Ball, PAdicRational};

/// Index (gamma, j, n) of one basis function.
///
/// `n` is the canonical representative of Q_p/Z_p: a rational `m / p^l`
/// with `0 <= m < p^l` and `p` not dividing `m` (zero has `l = 0`). The
/// cached `nat` field is the natural-number image of `n` under digit
/// reversal, used as the deterministic ordering key.
#[derive(Debug, Clone)]
pub struct WaveletIndex {
    gamma: i64,
    j: u64,
    n: PAdicRational,
    nat: BigUint,
}

impl WaveletIndex {
    pub fn new(gamma: i64, j: u64, n: PAdicRational) -> Result<Self> {
        let p = n.prime();
        if j == 0 || j >= p {
            return Err(Error::InvalidIndex(format!("j = {j} out of range 1..{p}")));
        }
        let nat = natural_image(&n)?;
        Ok(WaveletIndex { gamma, j, n, nat })
    }

    pub fn prime(&self) -> u64 {
        self.n.prime()
    }

    pub fn gamma(&self) -> i64 {
        self.gamma
    }

    pub fn j(&self) -> u64 {
        self.j
    }

    pub fn n(&self) -> &PAdicRational {
        &self.n
    }

    /// Digit-reversal image of n in N (shared ordering with the real side).
    pub fn natural_image(&self) -> &BigUint {
        &self.nat
    }

    /// Support ball `p^{-gamma} n + p^{-gamma} Z_p` of measure `p^{gamma}`.
    pub fn support_ball(&self) -> Ball {
        Ball::new(self.n.mul_monomial(-self.gamma), -self.gamma)
    }
}

impl PartialEq for WaveletIndex {
    fn eq(&self, other: &Self) -> bool {
        self.gamma == other.gamma && self.j == other.j && self.n == other.n
    }
}

impl Eq for WaveletIndex {}

impl PartialOrd for WaveletIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for WaveletIndex {
    /// gamma ascending, then n by natural-number image, then j.
    fn cmp(&self, other: &Self) -> Ordering {
        self.gamma
            .cmp(&other.gamma)
            .then_with(|| self.nat.cmp(&other.nat))
            .then_with(|| self.j.cmp(&other.j))
    }
}

impl fmt::Display for WaveletIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(gamma={}, j={}, n={})", self.gamma, self.j, self.n)
    }
}

/// Validate a Q_p/Z_p representative and return its digit reversal.
fn natural_image(n: &PAdicRational) -> Result<BigUint> {
    if n.is_zero() {
        return Ok(BigUint::zero());
    }
    let p = BigInt::from(n.prime());
    let ell = n.exponent();
    let bound = p.pow(ell);
    if ell == 0 || n.mantissa() < &BigInt::zero() || n.mantissa() >= &bound {
        return Err(Error::NonCanonical(n.to_string()));
    }
    let mut rev = BigInt::zero();
    let mut m = n.mantissa().clone();
    for _ in 0..ell {
        let (q, r) = num_integer::Integer::div_rem(&m, &p);
        rev = rev * &p + r;
        m = q;
    }
    Ok(rev.to_biguint().expect("nonnegative"))
}

/// Inverse of `natural_image`: the representative with rho(n) = t.
fn representative_of_natural(prime: u64, t: &BigUint) -> PAdicRational {
    if t.is_zero() {
        return PAdicRational::zero(prime);
    }
    let p = BigUint::from(prime);
    let mut digits = Vec::new();
    let mut cur = t.clone();
    while !cur.is_zero() {
        let (q, r) = num_integer::Integer::div_rem(&cur, &p);
        digits.push(r);
        cur = q;
    }
    // t's base-p digits reversed become the fractional digits of n
    let ell = digits.len() as u32;
    let mut m = BigUint::zero();
    for d in digits {
        m = m * &p + d;
    }
    PAdicRational::new(prime, BigInt::from(m), ell)
}

/// The mother wavelet `psi(x) = chi(x/p) Omega(|x|_p)`: p pieces on the
/// children of Z_p, value `exp(2 pi i k / p)` on the child with first
/// digit k.
pub fn mother_psi(prime: u64) -> PiecewiseConstant {
    let idx = WaveletIndex::new(0, 1, PAdicRational::zero(prime)).expect("valid");
    synthesize(&idx)
}

/// The basis function for an index, as an exact piecewise constant:
/// `p^{-gamma/2} chi(p^{gamma-1} j x) Omega(|p^gamma x - n|_p)`.
pub fn synthesize(idx: &WaveletIndex) -> PiecewiseConstant {
    let p = idx.prime();
    let amp = (p as f64).powf(-(idx.gamma as f64) / 2.0);
    // constant phase chi(j n / p) carried by the whole function
    let jn_over_p = idx
        .n
        .mul(&PAdicRational::from_integer(p, idx.j as i64))
        .mul_monomial(-1);
    let base_phase = jn_over_p.character();
    let mut pieces = Vec::with_capacity(p as usize);
    for k in 0..p {
        // the sub-ball where p^gamma x - n has first digit k
        let center = idx
            .n
            .add(&PAdicRational::from_integer(p, k as i64))
            .mul_monomial(-idx.gamma);
        let ball = Ball::new(center, 1 - idx.gamma);
        // exp(2 pi i jk / p) through the character, exact at quarters
        let root = PAdicRational::monomial(p, (idx.j * k) as i64, -1).character();
        let value = base_phase * root * amp;
        pieces.push((ball, value));
    }
    PiecewiseConstant::from_pieces(p, pieces).expect("children of the support ball are disjoint")
}

/// The normalized scaling function `p^{-V/2} 1_{B(0, p^V)}`.
pub fn scaling_function(prime: u64, v: i64) -> PiecewiseConstant {
    let amp = (prime as f64).powf(-(v as f64) / 2.0);
    PiecewiseConstant::indicator(Ball::new(PAdicRational::zero(prime), -v))
        .scale(Complex64::new(amp, 0.0))
}

/// All indices whose basis functions live in the window: support inside
/// `B(0, p^V)` and pieces no finer than `p^{-M}`. Exactly `p^{V+M} - 1`
/// indices, in deterministic order.
pub fn index_set(prime: u64, v: i64, m: i64) -> Result<Vec<WaveletIndex>> {
    if v + m < 0 {
        return Err(Error::InvalidWindow { v, m });
    }
    let mut out = Vec::new();
    for gamma in (1 - m)..=v {
        let count = BigUint::from(prime).pow((v - gamma) as u32);
        let mut t = BigUint::zero();
        while t < count {
            let n = representative_of_natural(prime, &t);
            for j in 1..prime {
                out.push(
                    WaveletIndex::new(gamma, j, n.clone()).expect("canonical by construction"),
                );
            }
            t += BigUint::one();
        }
    }
    Ok(out)
}

/// A finite expansion over the window basis: one scaling coefficient plus
/// a coefficient table keyed by index, iterated in deterministic order.
#[derive(Debug, Clone)]
pub struct WaveletExpansion {
    prime: u64,
    v_exp: i64,
    scaling: Complex64,
    coeffs: BTreeMap<WaveletIndex, Complex64>,
}

impl WaveletExpansion {
    pub fn new(prime: u64, v_exp: i64) -> Self {
        WaveletExpansion {
            prime,
            v_exp,
            scaling: Complex64::zero(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    /// The window exponent V: the big ball is `B(0, p^V)`.
    pub fn v_exp(&self) -> i64 {
        self.v_exp
    }

    pub fn big_ball(&self) -> Ball {
        Ball::new(PAdicRational::zero(self.prime), -self.v_exp)
    }

    pub fn scaling_coeff(&self) -> Complex64 {
        self.scaling
    }

    pub fn set_scaling_coeff(&mut self, c: Complex64) {
        self.scaling = c;
    }

    pub fn coeffs(&self) -> &BTreeMap<WaveletIndex, Complex64> {
        &self.coeffs
    }

    pub fn insert(&mut self, idx: WaveletIndex, c: Complex64) -> Result<()> {
        if idx.prime() != self.prime {
            return Err(Error::PrimeMismatch(idx.prime(), self.prime));
        }
        if !idx.support_ball().is_subset_of(&self.big_ball()) {
            return Err(Error::WindowViolation(format!(
                "index {idx} has support outside {}",
                self.big_ball()
            )));
        }
        self.coeffs.insert(idx, c);
        Ok(())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        WaveletExpansion {
            prime: self.prime,
            v_exp: self.v_exp,
            scaling: self.scaling * c,
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, v)| (k.clone(), v * c))
                .collect(),
        }
    }

    /// `|c0|^2 + sum |c|^2`.
    pub fn energy(&self) -> f64 {
        self.scaling.norm_sqr() + self.coeffs.values().map(|c| c.norm_sqr()).sum::<f64>()
    }
}

/// Expand `f` over the window basis. Requires `f` supported in
/// `B(0, p^V)` and constant on balls of radius `p^{-M}`.
pub fn analyze(f: &PiecewiseConstant, v: i64, m: i64) -> Result<WaveletExpansion> {
    let prime = f.prime();
    if v + m < 0 {
        return Err(Error::InvalidWindow { v, m });
    }
    let big = Ball::new(PAdicRational::zero(prime), -v);
    for (ball, _) in f.pieces() {
        if !ball.is_subset_of(&big) {
            return Err(Error::WindowViolation(format!(
                "piece {ball} is not contained in the window ball {big}"
            )));
        }
        if ball.radius_exp() > m {
            return Err(Error::WindowViolation(format!(
                "piece {ball} is finer than the window resolution p^-{m}"
            )));
        }
    }
    let mut e = WaveletExpansion::new(prime, v);
    let phi = scaling_function(prime, v);
    e.set_scaling_coeff(project(f, &phi));
    for idx in index_set(prime, v, m)? {
        let basis_fn = synthesize(&idx);
        e.insert(idx, project(f, &basis_fn))?;
    }
    Ok(e)
}

/// `<f, g>` exploiting that g is piecewise constant: a sum of exact ball
/// integrals of f, one per piece of g. Linear in the piece counts.
fn project(f: &PiecewiseConstant, g: &PiecewiseConstant) -> Complex64 {
    g.pieces()
        .iter()
        .map(|(ball, w)| f.integral_over(ball) * w.conj())
        .sum()
}

/// Assemble the exact piecewise-constant function of an expansion.
pub fn reconstruct(e: &WaveletExpansion) -> Result<PiecewiseConstant> {
    let phi = scaling_function(e.prime(), e.v_exp());
    let mut acc = phi.scale(e.scaling_coeff());
    for (idx, c) in e.coeffs() {
        if c.is_zero() {
            continue;
        }
        acc = acc.add(&synthesize(idx).scale(*c))?;
    }
    Ok(acc)
}

/// `| ||f||^2 - |c0|^2 - sum |c|^2 |` for the window expansion of f.
pub fn parseval_defect(f: &PiecewiseConstant, v: i64, m: i64) -> Result<f64> {
    let e = analyze(f, v, m)?;
    Ok((f.norm_sq() - e.energy()).abs())
}
