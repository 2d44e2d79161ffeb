//! Exact representation theory of Sp(1)Sp(n) for Bochner-Weitzenböck
//! identities on quaternionic Kähler manifolds, and the linear programs that
//! turn those identities into eigenvalue bounds.

pub mod bound;
pub mod bw;
pub mod casimir;
pub mod checks;
pub mod error;
pub mod linalg;
pub mod rep;
pub mod scalar;
pub mod simplex;

pub use num_rational::BigRational;
pub use scalar::Scalar;

/// Default exact scalar.
pub type Rational = BigRational;
/// Fixed-width rational for small inputs.
pub type SmallRational = num_rational::Ratio<i128>;

pub type Identity = bw::BwIdentity<Rational>;
pub type Operator = bw::OperatorSpec<Rational>;
pub type Certificate = bound::BoundCertificate<Rational>;
