//! Painleve VI toolkit: the affine Weyl group action on parameters,
//! Backlund transformations, Hamiltonians and their flows, the associated
//! Fuchsian equations and numerical monodromy.
//!
//! Algebraic code is generic over [`Scalar`]; [`ExactScalar`] runs on
//! Gaussian rationals, [`ApproxScalar`] on `Complex64`.

pub mod backlund;
pub mod error;
pub mod experiments;
pub mod fuchsian;
pub mod hamiltonians;
pub mod integrate;
pub mod json;
pub mod monodromy;
pub mod poly;
pub mod sample;
pub mod scalar;
pub mod weyl;

pub use backlund::{s_apply, s_word, Extended, ExtendedState, TimeConfig};
pub use error::{Error, Result};
pub use scalar::{ApproxScalar, ExactScalar, FieldKind, Real, Scalar};
pub use weyl::{GroupWord, Kappa, LocalTraces, ThetaVec};

pub type ExactKappa = Kappa<ExactScalar>;
pub type ApproxKappa = Kappa<ApproxScalar>;
pub type ExactState = ExtendedState<ExactScalar>;
pub type ApproxState = ExtendedState<ApproxScalar>;
