//! Compactly supported locally constant functions Q_p -> C.
//!
//! A function is a finite list of pairwise disjoint balls with constant
//! complex values (zero outside). Because two balls are always nested or
//! disjoint, any two such functions admit a common refinement into a
//! disjoint ball family on which both are constant, so inner products are
//! finite sums with exact rational weights.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::padic::{Ball, BallRelation, PAdicRational};

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstant {
    prime: u64,
    /// Sorted by ball, pairwise disjoint, no exact-zero values, siblings
    /// with identical values merged.
    pieces: Vec<(Ball, Complex64)>,
}

impl PiecewiseConstant {
    /// The zero function: an empty piece list.
    pub fn zero(prime: u64) -> Self {
        PiecewiseConstant {
            prime,
            pieces: Vec::new(),
        }
    }

    /// Indicator of a single ball.
    pub fn indicator(ball: Ball) -> Self {
        let prime = ball.prime();
        PiecewiseConstant {
            prime,
            pieces: vec![(ball, Complex64::new(1.0, 0.0))],
        }
    }

    /// Omega: the indicator of the unit ball Z_p.
    pub fn omega(prime: u64) -> Self {
        PiecewiseConstant::indicator(Ball::unit(prime))
    }

    pub fn from_pieces(prime: u64, pieces: Vec<(Ball, Complex64)>) -> Result<Self> {
        for (b, _) in &pieces {
            if b.prime() != prime {
                return Err(Error::PrimeMismatch(b.prime(), prime));
            }
        }
        for i in 0..pieces.len() {
            for j in (i + 1)..pieces.len() {
                if pieces[i].0.relation(&pieces[j].0) != BallRelation::Disjoint {
                    return Err(Error::OverlappingPieces(format!(
                        "{} and {}",
                        pieces[i].0, pieces[j].0
                    )));
                }
            }
        }
        let mut f = PiecewiseConstant { prime, pieces };
        f.normalize();
        Ok(f)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn pieces(&self) -> &[(Ball, Complex64)] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Drop exact zeros, sort, and merge complete sibling sets carrying
    /// identical values. Merging is exact, so semantics never change.
    fn normalize(&mut self) {
        self.pieces.retain(|(_, v)| !v.is_zero());
        let p = self.prime as usize;
        loop {
            let mut by_parent: std::collections::BTreeMap<Ball, Vec<usize>> =
                std::collections::BTreeMap::new();
            for (i, (b, _)) in self.pieces.iter().enumerate() {
                by_parent.entry(b.parent()).or_default().push(i);
            }
            let mut merged_idx: Vec<usize> = Vec::new();
            let mut merged: Vec<(Ball, Complex64)> = Vec::new();
            for (parent, idxs) in &by_parent {
                // pieces are disjoint, so p entries under one parent are
                // exactly its p children
                if idxs.len() == p {
                    let v0 = self.pieces[idxs[0]].1;
                    if idxs.iter().all(|&i| self.pieces[i].1 == v0) {
                        merged_idx.extend(idxs.iter().copied());
                        merged.push((parent.clone(), v0));
                    }
                }
            }
            if merged.is_empty() {
                break;
            }
            let mut kept: Vec<(Ball, Complex64)> = self
                .pieces
                .iter()
                .enumerate()
                .filter(|(i, _)| !merged_idx.contains(i))
                .map(|(_, piece)| piece.clone())
                .collect();
            kept.append(&mut merged);
            self.pieces = kept;
        }
        self.pieces.sort_by(|a, b| a.0.cmp(&b.0));
    }

    /// Value of the unique piece containing x, else 0.
    pub fn evaluate(&self, x: &PAdicRational) -> Complex64 {
        for (b, v) in &self.pieces {
            if b.contains(x) {
                return *v;
            }
        }
        Complex64::zero()
    }

    /// A disjoint ball family covering both supports on which both
    /// functions are constant, with the paired values.
    pub fn common_refinement(&self, other: &Self) -> Result<Vec<(Ball, Complex64, Complex64)>> {
        if self.prime != other.prime {
            return Err(Error::PrimeMismatch(self.prime, other.prime));
        }
        let all: Vec<Ball> = self
            .pieces
            .iter()
            .chain(other.pieces.iter())
            .map(|(b, _)| b.clone())
            .collect();
        let mut cells: Vec<Ball> = Vec::new();
        for b in &all {
            for q in split_against(b.clone(), &all) {
                if !cells.contains(&q) {
                    cells.push(q);
                }
            }
        }
        cells.sort();
        Ok(cells
            .into_iter()
            .map(|q| {
                let vf = self.evaluate(q.center());
                let vg = other.evaluate(q.center());
                (q, vf, vg)
            })
            .collect())
    }

    /// `integral f(x) conj(g(x)) dmu`, conjugate-linear in the second slot.
    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        let refinement = self.common_refinement(other)?;
        let mut acc = Complex64::zero();
        for (ball, vf, vg) in refinement {
            let mu = ball.measure().to_f64().unwrap_or(0.0);
            acc += vf * vg.conj() * mu;
        }
        Ok(acc)
    }

    /// `integral f dmu` as a finite exact-weighted sum.
    pub fn integral(&self) -> Complex64 {
        let mut acc = Complex64::zero();
        for (b, v) in &self.pieces {
            acc += v * b.measure().to_f64().unwrap_or(0.0);
        }
        acc
    }

    /// Squared L2 norm.
    pub fn norm_sq(&self) -> f64 {
        self.pieces
            .iter()
            .map(|(b, v)| v.norm_sqr() * b.measure().to_f64().unwrap_or(0.0))
            .sum()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut f = PiecewiseConstant {
            prime: self.prime,
            pieces: self
                .pieces
                .iter()
                .map(|(b, v)| (b.clone(), v * c))
                .collect(),
        };
        f.normalize();
        f
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let refinement = self.common_refinement(other)?;
        let pieces = refinement
            .into_iter()
            .map(|(b, vf, vg)| (b, vf + vg))
            .collect();
        let mut f = PiecewiseConstant {
            prime: self.prime,
            pieces,
        };
        f.normalize();
        Ok(f)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// `sum_k c_k f_k` over the common refinement of all terms.
    pub fn linear_combine(terms: &[(Complex64, &PiecewiseConstant)], prime: u64) -> Result<Self> {
        let mut acc = PiecewiseConstant::zero(prime);
        for (c, f) in terms {
            acc = acc.add(&f.scale(*c))?;
        }
        Ok(acc)
    }

    /// Pointwise multiplication by the character `x -> chi(a x)`.
    ///
    /// `chi(a x)` is constant on a ball of radius `p^{-k}` exactly when
    /// `|a|_p p^{-k} <= 1`, so each piece is refined to that level and
    /// then picks up the exact phase at its center.
    pub fn modulate(&self, a: &PAdicRational) -> Self {
        if a.is_zero() {
            return self.clone();
        }
        let va = a
            .valuation()
            .finite()
            .expect("nonzero modulation frequency");
        let mut pieces = Vec::new();
        for (ball, v) in &self.pieces {
            let target = ball.radius_exp().max(-va);
            let mut stack = vec![ball.clone()];
            while let Some(b) = stack.pop() {
                if b.radius_exp() >= target {
                    let phase = a.mul(b.center()).character();
                    pieces.push((b, v * phase));
                } else {
                    stack.extend(b.children());
                }
            }
        }
        let mut f = PiecewiseConstant {
            prime: self.prime,
            pieces,
        };
        f.normalize();
        f
    }

    /// `g(x) = f(p^k x + b)`: every piece ball `B(c, j)` pulls back to
    /// `B((c - b) p^{-k}, j - k)`, exactly.
    pub fn dilate_shift(&self, k: i64, b: &PAdicRational) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|(ball, v)| {
                let center = ball.center().sub(b).mul_monomial(-k);
                (Ball::new(center, ball.radius_exp() - k), *v)
            })
            .collect();
        let mut f = PiecewiseConstant {
            prime: self.prime,
            pieces,
        };
        f.normalize();
        f
    }

    /// `integral_B f dmu` for an arbitrary ball B, exact in the weights.
    pub fn integral_over(&self, region: &Ball) -> Complex64 {
        let mut acc = Complex64::zero();
        for (b, v) in &self.pieces {
            let mu: Option<BigRational> = match b.relation(region) {
                BallRelation::Subset | BallRelation::Equal => Some(b.measure()),
                BallRelation::Superset => Some(region.measure()),
                BallRelation::Disjoint => None,
            };
            if let Some(mu) = mu {
                acc += v * mu.to_f64().unwrap_or(0.0);
            }
        }
        acc
    }

    /// Supremum of |f - g| over the common refinement.
    pub fn sup_diff(&self, other: &Self) -> Result<f64> {
        let refinement = self.common_refinement(other)?;
        Ok(refinement
            .iter()
            .map(|(_, vf, vg)| (vf - vg).norm())
            .fold(0.0, f64::max))
    }

    /// Smallest ball containing the support; None for the zero function.
    pub fn support_ball(&self) -> Option<Ball> {
        let mut it = self.pieces.iter();
        let first = it.next()?.0.clone();
        Some(it.fold(first, |acc, (b, _)| acc.join(b)))
    }

    /// Largest radius exponent among the pieces (finest resolution used).
    pub fn max_radius_exp(&self) -> Option<i64> {
        self.pieces.iter().map(|(b, _)| b.radius_exp()).max()
    }
}

/// Partition `ball` into subballs that are nested-or-disjoint with
/// respect to every marker ball. A cell splits only while some marker is
/// strictly inside it, so the recursion is bounded by the finest marker.
pub fn split_against(ball: Ball, markers: &[Ball]) -> Vec<Ball> {
    let needs_split = markers
        .iter()
        .any(|m| m.radius_exp() > ball.radius_exp() && m.relation(&ball) == BallRelation::Subset);
    if !needs_split {
        return vec![ball];
    }
    ball.children()
        .into_iter()
        .flat_map(|c| split_against(c, markers))
        .collect()
}
