//! The p = 2 correspondence between the Haar system on the half-line
//! and the p-adic basis: per-index residuals and the full commutation
//! diagram between the two transforms.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;

use super::{tolerances, CheckConfig, CheckReport, PropertyCheck};
use crate::haar::{
    haar_analyze, phase_for, pullback, wavelet_correspondence_residual, DyadicStepFn, HaarIndex,
};
use crate::monna::{rho_nat, rho_section};
use crate::wavelets::analyze;

/// Residuals of the basis correspondence plus the commutation diagram
/// for random step functions.
pub struct HaarCorrespondence;

impl PropertyCheck for HaarCorrespondence {
    fn name(&self) -> &'static str {
        "haar-correspondence"
    }

    fn description(&self) -> &'static str {
        "pullback maps the Haar basis onto the p-adic basis up to the phase (-1)^n"
    }

    fn run(&self, cfg: &CheckConfig) -> CheckReport {
        let mut rng = cfg.rng(0xb71d6e);
        let mut max_index_residual = 0.0f64;
        let mut cases = 0usize;
        // per-index residuals over gamma in [-2, 2], rho(n) < 16
        for gamma in -2i64..=2 {
            for t in 0u64..16 {
                let n = rho_section(2, &BigRational::from_integer(BigInt::from(t)))
                    .expect("integers are dyadic");
                let r = wavelet_correspondence_residual(gamma, &n).expect("window fits");
                max_index_residual = max_index_residual.max(r);
                cases += 1;
            }
        }

        // commutation: Haar coefficients of f against phase-adjusted
        // coefficients of the pullback, index by index
        let mut max_commutation = 0.0f64;
        let mut max_scaling_gap = 0.0f64;
        for _ in 0..20 {
            let k = rng.gen_range(0..=3u32);
            let m = rng.gen_range(0..=3u32);
            let len = 1usize << (k + m);
            let values = (0..len)
                .map(|_| {
                    num_complex::Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
                })
                .collect();
            let f = DyadicStepFn::new(k, m, values).expect("sized to the window");
            let haar = haar_analyze(&f);
            let padic = analyze(&pullback(&f), k as i64, m as i64).expect("window fits");
            max_scaling_gap = max_scaling_gap.max((haar.scaling - padic.scaling_coeff()).norm());
            for (idx, c) in padic.coeffs() {
                let hidx = HaarIndex {
                    gamma: idx.gamma(),
                    n: rho_nat(idx.n())
                        .expect("canonical index")
                        .to_u64()
                        .expect("small window"),
                };
                let d = haar.coeffs[&hidx];
                // the pullback of the Haar wavelet is exp(-i pi n) times
                // the basis function, so coefficients pick up the
                // conjugate phase
                let expected = d * phase_for(idx.n()).conj();
                max_commutation = max_commutation.max((c - expected).norm());
                cases += 1;
            }
            cases += 1;
        }

        let passed = max_index_residual <= tolerances::CORRESPONDENCE
            && max_commutation <= tolerances::COMMUTATION
            && max_scaling_gap <= tolerances::SCALING_MATCH;
        CheckReport {
            name: self.name(),
            passed,
            max_residual: max_index_residual.max(max_commutation).max(max_scaling_gap),
            tolerance: tolerances::COMMUTATION,
            cases,
            detail: format!(
                "index residual {:.3e} (tol {:.0e}), commutation {:.3e} (tol {:.0e}), \
                 scaling gap {:.3e} (tol {:.0e})",
                max_index_residual,
                tolerances::CORRESPONDENCE,
                max_commutation,
                tolerances::COMMUTATION,
                max_scaling_gap,
                tolerances::SCALING_MATCH
            ),
        }
    }
}
