//! Exact p-adic wavelet analysis.
//!
//! The library implements, over the dense subring Z[1/p] of Q_p:
//!
//! * exact p-adic arithmetic, norms, characters, and balls with exact
//!   Haar measure ([`padic`]);
//! * an exact algebra of compactly supported locally constant functions
//!   ([`lcf`]);
//! * the orthonormal wavelet basis of L^2(Q_p) with windowed analysis
//!   and synthesis ([`wavelets`]);
//! * the fractional derivative, both as a spectral multiplier on the
//!   basis and as an exact hypersingular integral ([`vladimirov`]);
//! * the measure-preserving digit-reversal map onto the positive reals
//!   ([`monna`]);
//! * for p = 2, the unitary correspondence with the Haar wavelet system
//!   on the half-line ([`haar`]);
//! * a registry of executable verification properties ([`checks`]).
//!
//! Measures, norms, centers and fractional parts are exact rationals
//! throughout; only complex function values live in double precision.

pub mod checks;
pub mod error;
pub mod haar;
pub mod lcf;
pub mod monna;
pub mod padic;
pub mod vladimirov;
pub mod wavelets;

pub use error::{Error, Result};
pub use lcf::PiecewiseConstant;
pub use padic::{Ball, BallRelation, PAdicRational, Valuation};
pub use vladimirov::AlphaParam;
pub use wavelets::{WaveletExpansion, WaveletIndex};
