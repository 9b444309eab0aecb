//! The real side of the correspondence (p = 2): Haar wavelets on the
//! positive half-line, dyadic step functions, and the unitary pullback
//! along the digit-reversal change of variables.
//!
//! All intervals are half-open. Pointwise statements then hold exactly
//! off a finite set instead of "almost everywhere", which is what makes
//! the piecewise comparisons in this module exact.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lcf::PiecewiseConstant;
use crate::monna::{rho_nat, rho_section};
use crate::padic::{rational_pow, Ball, PAdicRational};
use crate::vladimirov::{evaluate_direct, AlphaParam};
use crate::wavelets::{synthesize, WaveletIndex};

/// Hard cap on window size to keep cell arrays sane.
const MAX_WINDOW_BITS: u32 = 24;

/// A complex step function on `[0, 2^K)` with cells of width `2^{-M}`;
/// cell j covers `[j 2^{-M}, (j+1) 2^{-M})`.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicStepFn {
    k_exp: u32,
    m_exp: u32,
    values: Vec<Complex64>,
}

impl DyadicStepFn {
    pub fn new(k_exp: u32, m_exp: u32, values: Vec<Complex64>) -> Result<Self> {
        if k_exp + m_exp > MAX_WINDOW_BITS {
            return Err(Error::WindowViolation(format!(
                "window K={k_exp}, M={m_exp} exceeds {MAX_WINDOW_BITS} bits"
            )));
        }
        let expected = 1usize << (k_exp + m_exp);
        if values.len() != expected {
            return Err(Error::WindowViolation(format!(
                "expected {expected} cells for K={k_exp}, M={m_exp}, got {}",
                values.len()
            )));
        }
        Ok(DyadicStepFn {
            k_exp,
            m_exp,
            values,
        })
    }

    pub fn zero(k_exp: u32, m_exp: u32) -> Result<Self> {
        let len = 1usize
            .checked_shl(k_exp + m_exp)
            .filter(|_| k_exp + m_exp <= MAX_WINDOW_BITS)
            .ok_or_else(|| Error::WindowViolation("window too large".into()))?;
        DyadicStepFn::new(k_exp, m_exp, vec![Complex64::zero(); len])
    }

    pub fn k_exp(&self) -> u32 {
        self.k_exp
    }

    pub fn m_exp(&self) -> u32 {
        self.m_exp
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn cell_count(&self) -> usize {
        self.values.len()
    }

    /// Left endpoint of cell j.
    pub fn cell_left(&self, j: usize) -> BigRational {
        BigRational::from_integer(BigInt::from(j)) * rational_pow(2, -(self.m_exp as i64))
    }

    /// Value at an exact rational point (0 outside the window).
    pub fn eval(&self, t: &BigRational) -> Complex64 {
        if t.is_negative() {
            return Complex64::zero();
        }
        let scaled = t * rational_pow(2, self.m_exp as i64);
        let j = scaled.floor().to_integer();
        match j.to_usize() {
            Some(j) if j < self.values.len() => self.values[j],
            _ => Complex64::zero(),
        }
    }

    /// `||f||^2 = 2^{-M} sum |v_j|^2`.
    pub fn norm_sq(&self) -> f64 {
        let w = 0.5f64.powi(self.m_exp as i32);
        self.values.iter().map(|v| v.norm_sqr() * w).sum()
    }

    /// `integral f conj(g)` for two step functions on a common grid.
    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        if self.k_exp != other.k_exp || self.m_exp != other.m_exp {
            return Err(Error::WindowViolation(
                "inner product needs a common (K, M) grid".into(),
            ));
        }
        let w = 0.5f64.powi(self.m_exp as i32);
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj() * w)
            .sum())
    }
}

/// Index of the Haar wavelet `2^{-gamma/2} Psi(2^{-gamma} x - n)`,
/// supported on `[2^gamma n, 2^gamma (n+1))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HaarIndex {
    pub gamma: i64,
    pub n: u64,
}

/// The mother wavelet: +1 on [0, 1/2), -1 on [1/2, 1), 0 elsewhere.
pub fn haar_mother(t: &BigRational) -> f64 {
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let one = BigRational::from_integer(BigInt::from(1));
    if t >= &BigRational::zero() && t < &half {
        1.0
    } else if t >= &half && t < &one {
        -1.0
    } else {
        0.0
    }
}

/// Exact evaluation of the shifted/dilated wavelet at a rational point.
pub fn haar_fn(idx: &HaarIndex, t: &BigRational) -> f64 {
    let u = t * rational_pow(2, -idx.gamma) - BigRational::from_integer(BigInt::from(idx.n));
    0.5f64.powf(idx.gamma as f64 / 2.0) * haar_mother(&u)
}

/// Result of a Haar decomposition over the window `(K, M)`.
#[derive(Debug, Clone)]
pub struct HaarDecomposition {
    pub k_exp: u32,
    pub m_exp: u32,
    /// Coefficient against the normalized indicator `2^{-K/2} 1_{[0,2^K)}`.
    pub scaling: Complex64,
    pub coeffs: BTreeMap<HaarIndex, Complex64>,
}

/// O(N) pyramid decomposition: pairwise averages walk up the dyadic
/// tree, differences emit the wavelet coefficients
/// `2^{gamma/2 - 1}(avg_left - avg_right)`.
pub fn haar_analyze(f: &DyadicStepFn) -> HaarDecomposition {
    let k = f.k_exp as i64;
    let m = f.m_exp as i64;
    let mut avg = f.values.to_vec();
    let mut coeffs = BTreeMap::new();
    for level in 0..(k + m) {
        let gamma = level + 1 - m;
        let weight = 2.0f64.powf(gamma as f64 / 2.0 - 1.0);
        let mut next = Vec::with_capacity(avg.len() / 2);
        for n in 0..avg.len() / 2 {
            let left = avg[2 * n];
            let right = avg[2 * n + 1];
            coeffs.insert(HaarIndex { gamma, n: n as u64 }, (left - right) * weight);
            next.push((left + right) * 0.5);
        }
        avg = next;
    }
    let scaling = avg[0] * 2.0f64.powf(k as f64 / 2.0);
    HaarDecomposition {
        k_exp: f.k_exp,
        m_exp: f.m_exp,
        scaling,
        coeffs,
    }
}

/// Inverse pyramid; exact inverse of `haar_analyze` on the same window.
pub fn haar_synthesize(d: &HaarDecomposition) -> Result<DyadicStepFn> {
    let k = d.k_exp as i64;
    let m = d.m_exp as i64;
    let mut avg = vec![d.scaling * 2.0f64.powf(-(k as f64) / 2.0)];
    for level in (0..(k + m)).rev() {
        let gamma = level + 1 - m;
        let weight = 2.0f64.powf(-(gamma as f64) / 2.0);
        let mut next = Vec::with_capacity(avg.len() * 2);
        for (n, a) in avg.iter().enumerate() {
            let dcoef = d
                .coeffs
                .get(&HaarIndex { gamma, n: n as u64 })
                .copied()
                .unwrap_or_else(Complex64::zero);
            next.push(a + dcoef * weight);
            next.push(a - dcoef * weight);
        }
        avg = next;
    }
    DyadicStepFn::new(d.k_exp, d.m_exp, avg)
}

/// The wavelet at an index, sampled as a step function on `(K, M)`.
pub fn haar_wavelet_step(gamma: i64, n: u64, k_exp: u32, m_exp: u32) -> Result<DyadicStepFn> {
    if gamma < 1 - m_exp as i64 {
        return Err(Error::WindowViolation(format!(
            "wavelet at gamma={gamma} is finer than resolution 2^-{m_exp}"
        )));
    }
    let support_right = rational_pow(2, gamma) * BigRational::from_integer(BigInt::from(n + 1));
    if support_right > rational_pow(2, k_exp as i64) {
        return Err(Error::WindowViolation(format!(
            "wavelet support [2^{gamma} * {n}, 2^{gamma} * {}) exceeds [0, 2^{k_exp})",
            n + 1
        )));
    }
    let mut f = DyadicStepFn::zero(k_exp, m_exp)?;
    let idx = HaarIndex { gamma, n };
    for j in 0..f.cell_count() {
        let t = f.cell_left(j);
        let v = haar_fn(&idx, &t);
        f.values[j] = Complex64::new(v, 0.0);
    }
    Ok(f)
}

/// `rho^* f (x) = f(rho(x))`: cell `[j 2^{-M}, (j+1) 2^{-M})` pulls back
/// to the 2-adic ball of level M whose image it is. Unitary.
pub fn pullback(f: &DyadicStepFn) -> PiecewiseConstant {
    let m = f.m_exp as i64;
    let pieces: Vec<(Ball, Complex64)> = f
        .values
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(j, v)| {
            let center = rho_section(2, &f.cell_left(j)).expect("cell endpoints are dyadic");
            (Ball::new(center, m), *v)
        })
        .collect();
    PiecewiseConstant::from_pieces(2, pieces).expect("cells pull back to disjoint balls")
}

/// Inverse of `pullback` for functions fitting the window: sample each
/// cell at the terminating preimage of its left endpoint.
pub fn pushforward(g: &PiecewiseConstant, k_exp: u32, m_exp: u32) -> Result<DyadicStepFn> {
    if g.prime() != 2 {
        return Err(Error::PrimeMismatch(g.prime(), 2));
    }
    let big = Ball::new(PAdicRational::zero(2), -(k_exp as i64));
    for (ball, _) in g.pieces() {
        if !ball.is_subset_of(&big) {
            return Err(Error::WindowViolation(format!(
                "piece {ball} lies outside {big}"
            )));
        }
        if ball.radius_exp() > m_exp as i64 {
            return Err(Error::WindowViolation(format!(
                "piece {ball} is finer than resolution 2^-{m_exp}"
            )));
        }
    }
    let mut f = DyadicStepFn::zero(k_exp, m_exp)?;
    for j in 0..f.cell_count() {
        let x = rho_section(2, &f.cell_left(j)).expect("cell endpoints are dyadic");
        f.values[j] = g.evaluate(&x);
    }
    Ok(f)
}

/// The phase `exp(i pi n_hat)` with `n_hat` the rational representative
/// in [0, 1): the meaning of `(-1)^n` for fractional n, fixed by the
/// factorization `chi(n/2) = exp(i pi n_hat)` on the wavelet support.
pub fn phase_for(n: &PAdicRational) -> Complex64 {
    n.mul_monomial(-1).character()
}

/// Sup-norm residual of the basis correspondence at one index:
/// `pullback(Psi_{gamma, rho(n)})` against `conj(phase) psi_{gamma,1,n}`.
pub fn wavelet_correspondence_residual(gamma: i64, n: &PAdicRational) -> Result<f64> {
    let rho_n = rho_nat(n)?
        .to_u64()
        .ok_or_else(|| Error::WindowViolation("rho(n) too large".into()))?;
    let m_exp = (1 - gamma).max(0) as u32;
    let mut k_exp = 0u32;
    while rational_pow(2, k_exp as i64)
        < rational_pow(2, gamma) * BigRational::from_integer(BigInt::from(rho_n + 1))
    {
        k_exp += 1;
        if k_exp + m_exp > MAX_WINDOW_BITS {
            return Err(Error::WindowViolation(format!(
                "support of (gamma={gamma}, n={n}) does not fit a tractable window"
            )));
        }
    }
    let step = haar_wavelet_step(gamma, rho_n, k_exp, m_exp)?;
    let pulled = pullback(&step);
    let idx = WaveletIndex::new(gamma, 1, n.clone())?;
    let expected = synthesize(&idx).scale(phase_for(n).conj());
    pulled.sup_diff(&expected)
}

/// The conjugated operator on the half-line:
/// `rho^{*-1} D^alpha rho^* f` evaluated at a dyadic rational t.
///
/// The result is a pointwise value, not a step function: the operator
/// destroys compact support. t must be dyadic so the terminating
/// preimage is exact; the choice between the two preimages of a dyadic
/// rational only matters on a set of measure zero.
pub fn real_dalpha(f: &DyadicStepFn, alpha: f64, t: &BigRational) -> Result<Complex64> {
    let a = AlphaParam::new(2, alpha)?;
    let x = rho_section(2, t)?;
    Ok(evaluate_direct(&pullback(f), &x, &a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monna::rho;
    use crate::wavelets::mother_psi;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn q(m: i64, e: u32) -> PAdicRational {
        PAdicRational::new(2, BigInt::from(m), e)
    }

    fn random_step(k: u32, m: u32, rng: &mut StdRng) -> DyadicStepFn {
        let len = 1usize << (k + m);
        let values = (0..len)
            .map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
            .collect();
        DyadicStepFn::new(k, m, values).unwrap()
    }

    #[test]
    fn mother_values() {
        assert_eq!(haar_mother(&rat(1, 4)), 1.0);
        assert_eq!(haar_mother(&rat(3, 4)), -1.0);
        assert_eq!(haar_mother(&rat(2, 1)), 0.0);
        assert_eq!(haar_mother(&rat(0, 1)), 1.0);
        assert_eq!(haar_mother(&rat(1, 2)), -1.0);
    }

    #[test]
    fn haar_fn_values() {
        assert_eq!(haar_fn(&HaarIndex { gamma: 0, n: 0 }, &rat(1, 4)), 1.0);
        let v = haar_fn(&HaarIndex { gamma: 1, n: 0 }, &rat(1, 2));
        assert!((v - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(haar_fn(&HaarIndex { gamma: 0, n: 3 }, &rat(1, 4)), 0.0);
    }

    #[test]
    fn analyze_mother_wavelet() {
        let f = haar_wavelet_step(0, 0, 0, 1).unwrap();
        let d = haar_analyze(&f);
        assert!(d.scaling.norm() < 1e-15);
        assert!((d.coeffs[&HaarIndex { gamma: 0, n: 0 }] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn analyze_constant_is_scaling_only() {
        let f = DyadicStepFn::new(0, 0, vec![c(1.0, 0.0)]).unwrap();
        let d = haar_analyze(&f);
        assert!((d.scaling - c(1.0, 0.0)).norm() < 1e-15);
        assert!(d.coeffs.is_empty());
    }

    #[test]
    fn pyramid_matches_direct_inner_products() {
        // two independent algorithms: O(N) pyramid vs cell-by-cell sums
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..10 {
            let (k, m) = (rng.gen_range(0..3u32), rng.gen_range(0..3u32));
            let f = random_step(k, m, &mut rng);
            let d = haar_analyze(&f);
            let w = rat(1, 1 << m);
            for (idx, coeff) in &d.coeffs {
                let mut direct = Complex64::zero();
                for j in 0..f.cell_count() {
                    let t = f.cell_left(j);
                    direct += f.values()[j] * haar_fn(idx, &t) * w.to_f64().unwrap();
                }
                assert!((coeff - direct).norm() < 1e-12, "idx={idx:?}");
            }
            // scaling against the normalized indicator
            let amp = 2.0f64.powf(-(k as f64) / 2.0);
            let direct: Complex64 = f
                .values()
                .iter()
                .map(|v| v * amp * w.to_f64().unwrap())
                .sum();
            assert!((d.scaling - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn synthesize_inverts_analyze() {
        let mut rng = StdRng::seed_from_u64(29);
        for _ in 0..10 {
            let f = random_step(rng.gen_range(0..3), rng.gen_range(0..3), &mut rng);
            let back = haar_synthesize(&haar_analyze(&f)).unwrap();
            let err: f64 = f
                .values()
                .iter()
                .zip(back.values())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-12);
        }
    }

    #[test]
    fn parseval_for_the_pyramid() {
        let mut rng = StdRng::seed_from_u64(31);
        let f = random_step(2, 2, &mut rng);
        let d = haar_analyze(&f);
        let energy: f64 =
            d.scaling.norm_sqr() + d.coeffs.values().map(|c| c.norm_sqr()).sum::<f64>();
        assert!((energy - f.norm_sq()).abs() < 1e-10);
    }

    #[test]
    fn pullback_of_indicator_is_omega() {
        let f = DyadicStepFn::new(0, 0, vec![c(1.0, 0.0)]).unwrap();
        assert_eq!(pullback(&f), PiecewiseConstant::omega(2));
    }

    #[test]
    fn pullback_of_mother_haar_is_mother_psi() {
        let f = haar_wavelet_step(0, 0, 0, 1).unwrap();
        assert!(pullback(&f).sup_diff(&mother_psi(2)).unwrap() < 1e-15);
    }

    #[test]
    fn pullback_preserves_norms_and_inner_products() {
        let mut rng = StdRng::seed_from_u64(37);
        for _ in 0..10 {
            let (k, m) = (rng.gen_range(0..3u32), rng.gen_range(0..3u32));
            let f = random_step(k, m, &mut rng);
            let g = random_step(k, m, &mut rng);
            let pf = pullback(&f);
            let pg = pullback(&g);
            assert!((pf.norm_sq() - f.norm_sq()).abs() < 1e-12);
            let lhs = pf.inner_product(&pg).unwrap();
            let rhs = f.inner_product(&g).unwrap();
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn pushforward_inverts_pullback() {
        let mut rng = StdRng::seed_from_u64(41);
        let f = random_step(2, 1, &mut rng);
        let g = pullback(&f);
        let back = pushforward(&g, 2, 1).unwrap();
        assert_eq!(back, f);
        // and the other way round
        assert!(pullback(&back).sup_diff(&g).unwrap() < 1e-15);
    }

    #[test]
    fn correspondence_examples() {
        // the mother case carries phase +1
        assert!(wavelet_correspondence_residual(0, &PAdicRational::zero(2)).unwrap() < 1e-15);
        // n = 1/2: phase i
        assert!(wavelet_correspondence_residual(0, &q(1, 1)).unwrap() < 1e-12);
        // gamma = -1, n = 3/4: phase exp(3 pi i / 4)
        assert!(wavelet_correspondence_residual(-1, &q(3, 2)).unwrap() < 1e-12);
        assert!((phase_for(&q(1, 1)) - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn real_dalpha_examples() {
        // pushforward of the p-adic mother wavelet is the Haar wavelet;
        // the conjugated operator doubles it at alpha = 1
        let f = pushforward(&mother_psi(2), 0, 1).unwrap();
        let v = real_dalpha(&f, 1.0, &BigRational::zero()).unwrap();
        assert!((v - c(2.0, 0.0)).norm() < 1e-12);

        // the constant on [0,1) pulls back to Omega: value 2/3 everywhere
        let one = DyadicStepFn::new(0, 0, vec![c(1.0, 0.0)]).unwrap();
        let v = real_dalpha(&one, 1.0, &rat(1, 4)).unwrap();
        assert!((v - c(2.0 / 3.0, 0.0)).norm() < 1e-12);

        // outside the window only the tail acts; the sphere oracle agrees
        let t = rat(5, 1);
        let v = real_dalpha(&one, 1.0, &t).unwrap();
        let x = rho_section(2, &t).unwrap();
        let bf = crate::vladimirov::evaluate_direct_bruteforce(
            &PiecewiseConstant::omega(2),
            &x,
            &AlphaParam::new(2, 1.0).unwrap(),
            40,
        );
        assert!((v - bf).norm() < 1e-9);
        assert!(real_dalpha(&one, -1.0, &rat(0, 1)).is_err());
    }

    #[test]
    fn shift_identities_at_terminating_points() {
        // indicator identities for the dilation/shift laws, checked at
        // random terminating points (the exception set consists of
        // points with infinite expansions)
        let mut rng = StdRng::seed_from_u64(43);
        let one = BigRational::from_integer(BigInt::from(1));
        let half = rat(1, 2);
        for _ in 0..1000 {
            let x = q(rng.gen_range(0..4096), rng.gen_range(0..4));
            let gamma = rng.gen_range(-2i64..=2);
            let n_nat = rng.gen_range(0u64..8);
            let n = rho_section(2, &BigRational::from_integer(BigInt::from(n_nat))).unwrap();
            let u = x.mul_monomial(gamma);
            let lhs_arg = rho(&u) - rho(&n);
            let rhs_arg = rho(&u.sub(&n));
            let in_unit = |r: &BigRational| !r.is_negative() && *r < one;
            let in_half = |r: &BigRational| !r.is_negative() && *r < half;
            assert_eq!(
                in_unit(&lhs_arg),
                in_unit(&rhs_arg),
                "x={x} gamma={gamma} n={n}"
            );
            assert_eq!(
                in_half(&lhs_arg),
                in_half(&rhs_arg),
                "x={x} gamma={gamma} n={n}"
            );
        }
    }

    #[test]
    fn spectral_consistency_on_the_half_line() {
        // multiply Haar coefficients by 2^{alpha(1-gamma)}, synthesize,
        // and compare pointwise with the conjugated operator
        let mut rng = StdRng::seed_from_u64(47);
        let alpha = 1.0;
        let (k, m) = (2u32, 2u32);
        let mut f = random_step(k, m, &mut rng);
        // zero the mean so the pullback has no scaling component
        let d0 = haar_analyze(&f);
        let mean = d0.scaling * 2.0f64.powf(-(k as f64) / 2.0);
        for v in &mut f.values {
            *v -= mean;
        }
        let mut d = haar_analyze(&f);
        assert!(d.scaling.norm() < 1e-12);
        for (idx, coeff) in d.coeffs.iter_mut() {
            *coeff *= 2.0f64.powf(alpha * (1.0 - idx.gamma as f64));
        }
        d.scaling = Complex64::zero();
        let applied = haar_synthesize(&d).unwrap();
        for _ in 0..20 {
            let j = rng.gen_range(0..applied.cell_count());
            let t = applied.cell_left(j);
            let direct = real_dalpha(&f, alpha, &t).unwrap();
            assert!(
                (direct - applied.values()[j]).norm() < 1e-9,
                "cell {j}: {direct} vs {}",
                applied.values()[j]
            );
        }
    }
}
