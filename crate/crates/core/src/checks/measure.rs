//! Checks for the change of variables: the Hoelder inequality and the
//! measure-preserving ball-to-interval correspondence.

use num_traits::Zero;
use rand::Rng;

use super::{CheckConfig, CheckReport, PropertyCheck};
use crate::monna::{ball_image_of, holder_gap, rho};
use crate::padic::{Ball, BallRelation, PAdicRational};

/// `|rho(x) - rho(y)| <= |x - y|_p`, exact rationals, with at least one
/// equality witness among the sampled pairs.
pub struct HoelderBound;

impl PropertyCheck for HoelderBound {
    fn name(&self) -> &'static str {
        "hoelder-bound"
    }

    fn description(&self) -> &'static str {
        "the change of variables is 1-Hoelder with exact rational comparisons"
    }

    fn run(&self, cfg: &CheckConfig) -> CheckReport {
        let mut rng = cfg.rng(0x601d);
        let mut violations = 0usize;
        let mut witnesses = 0usize;
        let mut cases = 0usize;
        for p in cfg.primes(&[2, 3, 5]) {
            for _ in 0..10_000 {
                let x = super::random_point(p, &mut rng);
                let y = match rng.gen_range(0..3) {
                    0 => super::random_point(p, &mut rng),
                    // offsets by a signed power of p make the bound tight
                    1 => x.sub(&PAdicRational::monomial(p, 1, rng.gen_range(-4..=4))),
                    _ => {
                        let w = rng.gen_range(1..(p as i64) * 2);
                        x.add(&PAdicRational::monomial(p, w, rng.gen_range(-4..=4)))
                    }
                };
                let (gap, dist) = holder_gap(&x, &y);
                if gap > dist {
                    violations += 1;
                }
                if gap == dist && !dist.is_zero() {
                    witnesses += 1;
                }
                cases += 1;
            }
        }
        CheckReport {
            name: self.name(),
            passed: violations == 0 && witnesses > 0,
            max_residual: violations as f64,
            tolerance: 0.0,
            cases,
            detail: format!(
                "{witnesses} equality witnesses over {cases} mixed-sign pairs with \
                 valuations in [-4, 4]; residual counts violations"
            ),
        }
    }
}

/// Balls map onto intervals of exactly their measure; disjoint balls map
/// onto intervals overlapping in length zero; members land inside.
pub struct MeasurePreservation;

impl PropertyCheck for MeasurePreservation {
    fn name(&self) -> &'static str {
        "measure-preservation"
    }

    fn description(&self) -> &'static str {
        "ball images have exact measure, tile without overlap, and contain member images"
    }

    fn run(&self, cfg: &CheckConfig) -> CheckReport {
        let mut rng = cfg.rng(0xba11);
        let mut failures = 0usize;
        let mut cases = 0usize;
        for p in [2u64, 3] {
            // every ball of radius_exp in [-2, 2] inside B(0, p^2)
            let root = Ball::new(PAdicRational::zero(p), -2);
            let mut balls = vec![root.clone()];
            let mut frontier = vec![root];
            for _ in 0..4 {
                frontier = frontier.iter().flat_map(|b| b.children()).collect();
                balls.extend(frontier.iter().cloned());
            }
            let images: Vec<_> = balls.iter().map(ball_image_of).collect();
            for (b, img) in balls.iter().zip(&images) {
                if b.measure() != *img.length() {
                    failures += 1;
                }
                cases += 1;
            }
            for i in 0..balls.len() {
                for j in (i + 1)..balls.len() {
                    let overlap = images[i].overlap_length(&images[j]);
                    let ok = match balls[i].relation(&balls[j]) {
                        BallRelation::Disjoint => overlap.is_zero(),
                        // nested balls must keep their full image inside
                        BallRelation::Subset | BallRelation::Equal => {
                            overlap == *images[i].length()
                        }
                        BallRelation::Superset => overlap == *images[j].length(),
                    };
                    if !ok {
                        failures += 1;
                    }
                    cases += 1;
                }
            }
            // random members map into the image interval
            for _ in 0..1000 {
                let b = &balls[rng.gen_range(0..balls.len())];
                let t: i64 = rng.gen_range(-1000..1000);
                let member = b
                    .center()
                    .add(&PAdicRational::monomial(p, t, b.radius_exp()));
                let img = ball_image_of(b);
                // closed membership: the finitely many members with
                // repeating-(p-1) tails land exactly on the right endpoint
                if !b.contains(&member) || !img.contains_closed(&rho(&member)) {
                    failures += 1;
                }
                cases += 1;
            }
        }
        CheckReport {
            name: self.name(),
            passed: failures == 0,
            max_residual: failures as f64,
            tolerance: 0.0,
            cases,
            detail: "exhaustive over radius_exp in [-2,2] inside B(0, p^2), p in {2,3}; \
                     all comparisons exact"
                .into(),
        }
    }
}
