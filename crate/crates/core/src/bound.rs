//! Eigenvalue lower bounds `c * kappa` from pure-kappa identities, by exact
//! linear programming, and the closed-form tables they reproduce.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bw::{self, operator_coeffs, pure_identities, BwIdentity, OperatorName, OperatorSpec, Provenance};
use crate::error::BoundError;
use crate::linalg::{self, Solution};
use crate::rep::{BundleLabel, TargetKey};
use crate::scalar::{self, Scalar};
use crate::simplex::{lexicographic_maximize, Constraint, LpOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KappaSign {
    Positive,
    Negative,
}

impl KappaSign {
    pub const BOTH: [KappaSign; 2] = [KappaSign::Positive, KappaSign::Negative];

    pub fn signum(self) -> i64 {
        match self {
            KappaSign::Positive => 1,
            KappaSign::Negative => -1,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            KappaSign::Positive => "+",
            KappaSign::Negative => "-",
        }
    }
}

impl fmt::Display for KappaSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KappaSign::Positive => "positive",
            KappaSign::Negative => "negative",
        })
    }
}

impl FromStr for KappaSign {
    type Err = BoundError;
    fn from_str(s: &str) -> Result<Self, BoundError> {
        match s {
            "+" | "pos" | "positive" | "+1" | "1" => Ok(KappaSign::Positive),
            "-" | "neg" | "negative" | "-1" => Ok(KappaSign::Negative),
            _ => Err(BoundError::Range(format!("kappa sign must be + or -, got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Multiplier<S: Scalar> {
    pub id: usize,
    pub provenance: Provenance,
    #[serde(with = "scalar::as_str")]
    pub value: S,
    /// Linearly dependent on earlier identities; held at zero.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub dropped: bool,
}

/// `operator = sum residual_t B_t + sum_j lambda_j (identity_j) + bound_c * kappa`
/// with every residual non-negative.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct BoundCertificate<S: Scalar> {
    pub bundle: BundleLabel,
    pub operator: OperatorName,
    pub kappa_sign: KappaSign,
    pub hpn: bool,
    pub targets: Vec<TargetKey>,
    #[serde(with = "scalar::vec_as_str")]
    pub operator_coeffs: Vec<S>,
    pub multipliers: Vec<Multiplier<S>>,
    #[serde(with = "scalar::vec_as_str")]
    pub residual_coeffs: Vec<S>,
    #[serde(with = "scalar::as_str")]
    pub bound_c: S,
    /// `bound_c * 2n`, the bound on the projective space normalized to `kappa = 2n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hpn_value: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matched_closed_form: Option<String>,
}

impl<S: Scalar> BoundCertificate<S> {
    /// Exact re-check against the operator and identities it was built from.
    pub fn verify(&self, op: &OperatorSpec<S>, ids: &[BwIdentity<S>]) -> Result<(), BoundError> {
        let fail = |m: String| Err(BoundError::Certificate(m));
        if op.targets != self.targets || op.coeffs != self.operator_coeffs {
            return fail("operator does not match".into());
        }
        if ids.len() != self.multipliers.len() {
            return fail("multiplier count does not match identity count".into());
        }
        if let Some(i) = self.residual_coeffs.iter().position(|c| c.is_negative()) {
            return fail(format!("residual at {} is negative", self.targets[i]));
        }
        let mut bound = op.constant_kappa.clone();
        let mut rebuilt = self.residual_coeffs.clone();
        for (m, id) in self.multipliers.iter().zip(ids) {
            if id.targets != self.targets {
                return fail(format!("identity {} is over other targets", m.id));
            }
            if !id.is_pure() {
                return Err(BoundError::NotPure(m.id));
            }
            bound = bound + m.value.clone() * id.kappa_coeff.clone();
            for (r, a) in rebuilt.iter_mut().zip(&id.coeffs) {
                *r = r.clone() + m.value.clone() * a.clone();
            }
        }
        if rebuilt != op.coeffs {
            return fail("operator coefficients are not reconstructed".into());
        }
        if bound != self.bound_c {
            return fail("bound does not match the multipliers".into());
        }
        Ok(())
    }

    /// Regenerate the operator and identities and verify against them.
    pub fn recheck(&self) -> Result<(), BoundError> {
        let op = operator_coeffs::<S>(self.operator, &self.bundle)?;
        let ids = pure_identities::<S>(&self.bundle, self.hpn)?;
        self.verify(&op, &ids)
    }

    /// The rewriting `operator = sum c_t B_t + c kappa`.
    pub fn to_markdown(&self) -> String {
        let mut terms = Vec::new();
        for (t, c) in self.targets.iter().zip(&self.residual_coeffs) {
            if !c.is_zero() {
                terms.push(format!("{} B_{}", c.typeset(), t));
            }
        }
        terms.push(format!("{} κ", self.bound_c.typeset()));
        let mut out = format!(
            "**{}** on S_{} (κ {}{}):\n\n    {} = {}\n\nlower bound: {} κ",
            self.operator,
            self.bundle,
            self.kappa_sign.symbol(),
            if self.hpn { ", HP^n" } else { "" },
            self.operator,
            terms.join(" + "),
            self.bound_c.typeset()
        );
        if let Some(v) = &self.hpn_value {
            out += &format!(" (= {v} at κ = 2n)");
        }
        if let Some(tag) = &self.matched_closed_form {
            out += &format!("; matches {tag}");
        }
        out + "\n"
    }
}

fn check_same_bundle<S: Scalar>(op: &OperatorSpec<S>, ids: &[BwIdentity<S>]) -> Result<(), BoundError> {
    for (i, id) in ids.iter().enumerate() {
        if id.bundle != op.bundle || id.targets != op.targets {
            return Err(BoundError::BundleMismatch);
        }
        if !id.is_pure() {
            return Err(BoundError::NotPure(i));
        }
    }
    Ok(())
}

/// Indices of identities whose `[coeffs | kappa]` row is independent of the
/// rows kept before it.
fn independent_subset<S: Scalar>(ids: &[BwIdentity<S>]) -> Vec<usize> {
    let mut kept = Vec::new();
    let mut rows: Vec<Vec<S>> = Vec::new();
    for (i, id) in ids.iter().enumerate() {
        rows.push(id.row(&[]));
        if linalg::rank(&rows) == rows.len() {
            kept.push(i);
        } else {
            rows.pop();
        }
    }
    kept
}

/// Maximize `sign * c` subject to `operator - sum lambda_j identity_j >= 0`
/// entrywise; among optimal multipliers return the lexicographically least.
pub fn lp_max_bound<S: Scalar>(
    op: &OperatorSpec<S>,
    ids: &[BwIdentity<S>],
    sign: KappaSign,
) -> Result<BoundCertificate<S>, BoundError> {
    check_same_bundle(op, ids)?;
    let kept = independent_subset(ids);
    let s = S::from_i64(sign.signum());
    let objective: Vec<S> = kept.iter().map(|&j| s.clone() * ids[j].kappa_coeff.clone()).collect();
    let constraints: Vec<Constraint<S>> = (0..op.targets.len())
        .map(|t| {
            Constraint::le(
                kept.iter().map(|&j| ids[j].coeffs[t].clone()).collect(),
                op.coeffs[t].clone(),
            )
        })
        .collect();
    let lambda = if kept.is_empty() {
        if op.coeffs.iter().any(|c| c.is_negative()) {
            return Err(BoundError::Infeasible);
        }
        Vec::new()
    } else {
        match lexicographic_maximize(&objective, &constraints) {
            LpOutcome::Optimal { x, .. } => x,
            LpOutcome::Unbounded => return Err(BoundError::Unbounded),
            LpOutcome::Infeasible => return Err(BoundError::Infeasible),
        }
    };
    let mut multipliers: Vec<Multiplier<S>> = ids
        .iter()
        .enumerate()
        .map(|(i, id)| Multiplier {
            id: i,
            provenance: id.provenance,
            value: S::zero(),
            dropped: !kept.contains(&i),
        })
        .collect();
    for (&j, l) in kept.iter().zip(lambda) {
        multipliers[j].value = l;
    }
    let mut residual = op.coeffs.clone();
    let mut bound = op.constant_kappa.clone();
    for (m, id) in multipliers.iter().zip(ids) {
        bound = bound + m.value.clone() * id.kappa_coeff.clone();
        for (r, a) in residual.iter_mut().zip(&id.coeffs) {
            *r = r.clone() - m.value.clone() * a.clone();
        }
    }
    let cert = BoundCertificate {
        bundle: op.bundle.clone(),
        operator: op.name,
        kappa_sign: sign,
        hpn: false,
        targets: op.targets.clone(),
        operator_coeffs: op.coeffs.clone(),
        multipliers,
        residual_coeffs: residual,
        bound_c: bound,
        hpn_value: None,
        matched_closed_form: None,
    };
    cert.verify(op, ids)?;
    Ok(cert)
}

/// Generate the rule-driven identity set for the bundle and optimize.
/// Known closed forms are compared and recorded when they agree.
pub fn derive_bound<S: Scalar>(
    bundle: &BundleLabel,
    operator: OperatorName,
    sign: KappaSign,
    hpn: bool,
) -> Result<BoundCertificate<S>, BoundError> {
    let op = operator_coeffs::<S>(operator, bundle)?;
    let ids = pure_identities::<S>(bundle, hpn)?;
    let mut cert = lp_max_bound(&op, &ids, sign)?;
    cert.hpn = hpn;
    let n = bundle.rank();
    let k = bundle.k as usize;
    if hpn {
        cert.hpn_value = Some((cert.bound_c.clone() * S::from_i64(2 * n as i64)).canonical());
    }
    let shape = bundle.rho.as_lambda_ab();
    let closed: Option<(&str, S)> = match (operator, shape, hpn) {
        (OperatorName::HodgeLaplacian, Some((a, b)), false) if k + a + b <= 2 * n => {
            Some(("laplacian_bound", closed_form_bound(bundle.k, a, b, n, sign)?))
        }
        (OperatorName::HodgeLaplacian, Some((a, b)), true)
            if sign == KappaSign::Positive && k >= 2 && k + a + b <= 2 * n =>
        {
            let lambda: S = hpn_first_eigenvalue(bundle.k, a, b, n)?;
            Some(("hpn_first_eigenvalue", lambda / S::from_i64(2 * n as i64)))
        }
        (OperatorName::ConnectionLaplacian, Some((a, 0)), false) if k + a <= 2 * n => Some((
            "connection_laplacian_bound",
            connection_laplacian_bound(bundle.k, a, n, sign)?,
        )),
        (OperatorName::DiracSquared, Some((a, 0)), false) if a + k == n && sign == KappaSign::Positive => {
            Some(("dirac_bound", dirac_bound(bundle.k, n)?))
        }
        _ => None,
    };
    if let Some((tag, value)) = closed {
        if value == cert.bound_c {
            cert.matched_closed_form = Some(tag.to_string());
        }
    }
    Ok(cert)
}

fn check_kab(k: u32, a: usize, b: usize, n: usize) -> Result<(i128, i128, i128, i128), BoundError> {
    if n < crate::rep::MIN_RANK {
        return Err(BoundError::Range(format!("n must be at least 2, got {n}")));
    }
    if b > a || a > n || k as usize + a + b > 2 * n {
        return Err(BoundError::Range(format!(
            "need 0 <= b <= a <= n and k <= 2n - a - b, got k={k}, a={a}, b={b}, n={n}"
        )));
    }
    Ok((k as i128, a as i128, b as i128, n as i128))
}

/// Lower bound coefficient of `dd* + d*d` on `S^k(H) ⊗ Λ^{a,b}_0(E)`.
pub fn closed_form_bound<S: Scalar>(k: u32, a: usize, b: usize, n: usize, sign: KappaSign) -> Result<S, BoundError> {
    let (k, a, b, n) = check_kab(k, a, b, n)?;
    let d = 8 * n * (n + 2);
    let q = |num: i128| S::from_i128(num) / S::from_i128(d);
    Ok(match sign {
        KappaSign::Positive if k == 0 => q((a - b) * (2 * n - a - b + 4)),
        KappaSign::Positive => q((a - b + k) * (2 * n - a - b + k + 2)),
        // Constants are harmonic on functions.
        KappaSign::Negative if a == 0 && k == 0 => S::zero(),
        KappaSign::Negative if a == 0 => q(-(k + 2) * (2 * n - k)),
        KappaSign::Negative if a == b => {
            if 3 * k <= 2 * n - 2 * a {
                q(-k * (2 * n - 2 * a - k + 4))
            } else {
                q(-(k + 2) * (2 * n - 2 * a - k))
            }
        }
        KappaSign::Negative => {
            if k <= n - a {
                q(-(a - b + k) * (2 * n - a - b - k + 2))
            } else {
                q(-(a - b + k + 2) * (2 * n - a - b - k))
            }
        }
    })
}

/// Lower bound coefficient of `∇*∇` on `S^k(H) ⊗ Λ^a_0(E)`.
pub fn connection_laplacian_bound<S: Scalar>(k: u32, a: usize, n: usize, sign: KappaSign) -> Result<S, BoundError> {
    let (k, a, _, n) = check_kab(k, a, 0, n)?;
    let d = 4 * n * (n + 2);
    let q = |num: i128| S::from_i128(num) / S::from_i128(d);
    Ok(match sign {
        KappaSign::Positive if k == 0 => q(a),
        KappaSign::Positive => q(k * n),
        KappaSign::Negative if a == 0 && k > 0 => q(-(k + 2) * n),
        KappaSign::Negative if k <= n - a => q(-(2 * a * n + k * n - a * a - k * a + 2 * a + 2 * k)),
        KappaSign::Negative => q(-(-k * a - a * a + 2 * n + k * n + 2 * a * n)),
    })
}

/// Lower bound coefficient of `D^2` on the spinor summand `S^k(H) ⊗ Λ^{n-k}_0(E)`, `kappa > 0`.
pub fn dirac_bound<S: Scalar>(k: u32, n: usize) -> Result<S, BoundError> {
    if n < crate::rep::MIN_RANK || k as usize > n {
        return Err(BoundError::Range(format!(
            "need n >= 2 and 0 <= k <= n, got k={k}, n={n}"
        )));
    }
    let (k, n) = (k as i128, n as i128);
    let num = if k == 0 { n + 3 } else { n + k + 2 };
    Ok(S::from_i128(num) / S::from_i128(4 * (n + 2)))
}

/// First eigenvalue of `dd* + d*d` on `S^k(H) ⊗ Λ^{a,b}_0(E)` over the
/// projective space with `kappa = 2n`, valid for `k >= 2`.
pub fn hpn_first_eigenvalue<S: Scalar>(k: u32, a: usize, b: usize, n: usize) -> Result<S, BoundError> {
    let (k, a, b, n) = check_kab(k, a, b, n)?;
    if k < 2 {
        return Err(BoundError::Range(format!(
            "first eigenvalue formula needs k >= 2, got {k}"
        )));
    }
    Ok(S::from_i128(k * (k + 2 * n + 2) + a * (2 * n - a + 2) + b * (2 * n - b + 4)) / S::from_i128(4 * (n + 2)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// A squared norm would have the wrong sign.
    Vanishes {
        witness: TargetKey,
    },
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum KernelStatus {
    Determined,
    Underdetermined { rank: usize, unknowns: usize },
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SolvedRatio<S: Scalar> {
    pub target: TargetKey,
    /// `||D_t phi||^2 / ||phi||^2` as a multiple of `kappa`.
    #[serde(with = "scalar::as_str")]
    pub ratio: S,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct KernelAnalysis<S: Scalar> {
    pub bundle: BundleLabel,
    pub kernel_set: Vec<TargetKey>,
    pub status: KernelStatus,
    pub solved_ratios: Vec<SolvedRatio<S>>,
    pub positive: Verdict,
    pub negative: Verdict,
}

impl<S: Scalar> KernelAnalysis<S> {
    pub fn ratio(&self, target: TargetKey) -> Option<&S> {
        self.solved_ratios.iter().find(|r| r.target == target).map(|r| &r.ratio)
    }

    pub fn verdict(&self, sign: KappaSign) -> &Verdict {
        match sign {
            KappaSign::Positive => &self.positive,
            KappaSign::Negative => &self.negative,
        }
    }

    /// `<∇*∇ phi, phi> / (kappa ||phi||^2)`, the sum of the solved ratios.
    pub fn rough_laplacian_ratio(&self) -> S {
        self.solved_ratios
            .iter()
            .fold(S::zero(), |acc, r| acc + r.ratio.clone())
    }
}

/// Sections killed by every gradient in `kernel_set`: solve the pure-kappa
/// identities for the remaining squared norms.
pub fn kernel_analysis<S: Scalar>(
    bundle: &BundleLabel,
    kernel_set: &[TargetKey],
) -> Result<KernelAnalysis<S>, BoundError> {
    let ids = pure_identities::<S>(bundle, false)?;
    let targets = bw::valid_targets::<S>(bundle)?;
    for key in kernel_set {
        if !targets.iter().any(|t| t.key == *key) {
            return Err(BoundError::Range(format!("{key} is not a gradient of {bundle}")));
        }
    }
    let free: Vec<usize> = (0..targets.len())
        .filter(|&i| !kernel_set.contains(&targets[i].key))
        .collect();
    let matrix: Vec<Vec<S>> = ids
        .iter()
        .map(|id| free.iter().map(|&i| id.coeffs[i].clone()).collect())
        .collect();
    let rhs: Vec<S> = ids.iter().map(|id| id.kappa_coeff.clone()).collect();
    let (status, solved_ratios) = match linalg::solve(&matrix, &rhs) {
        Solution::Unique(x) => (
            KernelStatus::Determined,
            free.iter()
                .zip(x)
                .map(|(&i, ratio)| SolvedRatio {
                    target: targets[i].key,
                    ratio,
                })
                .collect(),
        ),
        Solution::Underdetermined { rank, unknowns } => (KernelStatus::Underdetermined { rank, unknowns }, Vec::new()),
        Solution::Inconsistent => (KernelStatus::Inconsistent, Vec::new()),
    };
    let verdict = |wrong_sign: fn(&S) -> bool| {
        solved_ratios
            .iter()
            .find(|r| wrong_sign(&r.ratio))
            .map_or(Verdict::Undetermined, |r| Verdict::Vanishes { witness: r.target })
    };
    let positive = verdict(|x: &S| x.is_negative());
    let negative = verdict(|x: &S| x.is_positive());
    Ok(KernelAnalysis {
        bundle: bundle.clone(),
        kernel_set: kernel_set.to_vec(),
        status,
        solved_ratios,
        positive,
        negative,
    })
}

/// The kernel describing `H^1(Z, O(k))` on `S^{k+1}(H) ⊗ E`.
pub fn twistor_kernel(n: usize) -> Result<Vec<TargetKey>, BoundError> {
    Ok(vec![
        bw::target_key(1, 2, n)?,
        bw::target_key(1, -1, n)?,
        bw::target_key(-1, -1, n)?,
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FormType {
    pub k: u32,
    pub a: usize,
    pub b: usize,
}

/// Summands `S^k(H) ⊗ Λ^{a,b}_0(E)` of the form bundle whose Laplace bound is zero.
pub fn harmonic_classification<S: Scalar>(n: usize, sign: KappaSign) -> Result<Vec<FormType>, BoundError> {
    let mut out = Vec::new();
    for a in 0..=n {
        for b in 0..=a {
            for k in 0..=(2 * n - a - b) as u32 {
                if closed_form_bound::<S>(k, a, b, n, sign)?.is_zero() {
                    out.push(FormType { k, a, b });
                }
            }
        }
    }
    out.sort();
    Ok(out)
}
