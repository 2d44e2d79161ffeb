use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("not a rational number: {0:?}")]
    Rational(String),
    #[error("not a weight: {0:?}")]
    Weight(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepError {
    #[error("rank must be at least 2 (real dimension >= 8), got n = {0}")]
    RankTooSmall(usize),
    #[error("weight {0:?} is not dominant integral")]
    NotDominant(Vec<i64>),
    #[error("index {index} out of range for rank {n}")]
    IndexOutOfRange { index: i64, n: usize },
    #[error("Sp(1) weight must be non-negative, got {0}")]
    NegativeSp1Weight(i64),
    #[error("weight has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("dimension does not fit in 128 bits")]
    DimensionOverflow,
    #[error("parameters out of range: {0}")]
    Range(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CasimirError {
    #[error("relative-dimension product degenerates: w_hat({nu}) equals w_hat({other})")]
    FormulaDegeneracy { nu: i64, other: i64 },
    #[error("target rho + mu_{0} is not dominant")]
    NonDominantTarget(i64),
    #[error(transparent)]
    Rep(#[from] RepError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BwError {
    #[error("identity not applicable: {0}")]
    Inapplicable(String),
    #[error("rule {rule} does not apply to weight {rho:?}")]
    RuleMismatch { rule: &'static str, rho: Vec<i64> },
    #[error("identities belong to different bundles")]
    MixedBundles,
    #[error("unknown operator {0:?}")]
    UnknownOperator(String),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Casimir(#[from] CasimirError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundError {
    #[error("linear program is unbounded: the identity set is inconsistent")]
    Unbounded,
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("identity {0} is not pure-kappa")]
    NotPure(usize),
    #[error("operator and identities are over different bundles")]
    BundleMismatch,
    #[error("certificate failed verification: {0}")]
    Certificate(String),
    #[error("parameters out of range: {0}")]
    Range(String),
    #[error(transparent)]
    Bw(#[from] BwError),
    #[error(transparent)]
    Rep(#[from] RepError),
}

impl BoundError {
    /// True for failures that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            BoundError::Unbounded | BoundError::Infeasible | BoundError::Certificate(_)
        )
    }
}
