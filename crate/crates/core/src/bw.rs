//! Bochner-Weitzenböck identities as exact coefficient vectors over the
//! gradient basis `B_{N,nu} = D_{N,nu}^* D_{N,nu}`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::casimir::{casimir_eigenvalue, casimir_hat, GradientTarget};
use crate::error::BwError;
use crate::linalg;
use crate::rep::{decompose_bundle, BundleLabel, Step, TargetKey};
use crate::scalar::{self, Scalar};

/// Symbolic curvature endomorphism left on the right side of an identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum CurvatureKind {
    /// `R_hat^q_rho`, contracted with `x_hat^q`.
    Hat(u32),
    /// `R^q_rho`, contracted with `x^q`.
    Plain(u32),
}

impl fmt::Display for CurvatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvatureKind::Hat(q) => write!(f, "R_hat^{q}"),
            CurvatureKind::Plain(q) => write!(f, "R^{q}"),
        }
    }
}

impl FromStr for CurvatureKind {
    type Err = BwError;
    fn from_str(s: &str) -> Result<Self, BwError> {
        let bad = || BwError::Inapplicable(format!("unknown curvature term {s:?}"));
        if let Some(q) = s.strip_prefix("R_hat^") {
            return q.parse().map(CurvatureKind::Hat).map_err(|_| bad());
        }
        if let Some(q) = s.strip_prefix("R^") {
            return q.parse().map(CurvatureKind::Plain).map_err(|_| bad());
        }
        Err(bad())
    }
}

impl TryFrom<String> for CurvatureKind {
    type Error = BwError;
    fn try_from(s: String) -> Result<Self, BwError> {
        s.parse()
    }
}

impl From<CurvatureKind> for String {
    fn from(k: CurvatureKind) -> String {
        k.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CurvatureTerm<S: Scalar> {
    pub term: CurvatureKind,
    #[serde(with = "scalar::as_str")]
    pub coeff: S,
}

/// Where an identity came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Provenance {
    /// `sum B = ∇*∇`.
    Sum,
    Bochner1(u32),
    Bochner2(u32),
    /// Simplified low-order forms, numbered 1 to 6.
    Named(u8),
    OperatorExpansion,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Sum => f.write_str("sum"),
            Provenance::Bochner1(q) => write!(f, "bochner1({q})"),
            Provenance::Bochner2(q) => write!(f, "bochner2({q})"),
            Provenance::Named(i) => write!(f, "bw{i}"),
            Provenance::OperatorExpansion => f.write_str("operator-expansion"),
        }
    }
}

impl FromStr for Provenance {
    type Err = BwError;
    fn from_str(s: &str) -> Result<Self, BwError> {
        let bad = || BwError::Inapplicable(format!("unknown provenance {s:?}"));
        let arg = |prefix: &str| -> Option<u32> { s.strip_prefix(prefix)?.strip_suffix(')')?.parse().ok() };
        Ok(match s {
            "sum" => Provenance::Sum,
            "operator-expansion" => Provenance::OperatorExpansion,
            _ if s.starts_with("bochner1(") => Provenance::Bochner1(arg("bochner1(").ok_or_else(bad)?),
            _ if s.starts_with("bochner2(") => Provenance::Bochner2(arg("bochner2(").ok_or_else(bad)?),
            _ => match s.strip_prefix("bw").and_then(|i| i.parse::<u8>().ok()) {
                Some(i @ 1..=6) => Provenance::Named(i),
                _ => return Err(bad()),
            },
        })
    }
}

impl TryFrom<String> for Provenance {
    type Error = BwError;
    fn try_from(s: String) -> Result<Self, BwError> {
        s.parse()
    }
}

impl From<Provenance> for String {
    fn from(p: Provenance) -> String {
        p.to_string()
    }
}

/// `sum coeffs[t] B_t = kappa_coeff * kappa + sum curvature_terms`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct BwIdentity<S: Scalar> {
    pub bundle: BundleLabel,
    pub provenance: Provenance,
    /// Valid targets, in decomposition order.
    pub targets: Vec<TargetKey>,
    #[serde(with = "scalar::vec_as_str")]
    pub coeffs: Vec<S>,
    #[serde(with = "scalar::as_str")]
    pub kappa_coeff: S,
    pub curvature_terms: Vec<CurvatureTerm<S>>,
}

impl<S: Scalar> BwIdentity<S> {
    pub fn is_pure(&self) -> bool {
        self.curvature_terms.is_empty()
    }

    pub fn coeff(&self, key: TargetKey) -> Option<&S> {
        self.targets.iter().position(|&t| t == key).map(|i| &self.coeffs[i])
    }

    pub fn curvature_coeff(&self, kind: CurvatureKind) -> S {
        self.curvature_terms
            .iter()
            .find(|t| t.term == kind)
            .map_or_else(S::zero, |t| t.coeff.clone())
    }

    fn set_curvature(&mut self, kind: CurvatureKind, coeff: S) {
        self.curvature_terms.retain(|t| t.term != kind);
        if !coeff.is_zero() {
            self.curvature_terms.push(CurvatureTerm { term: kind, coeff });
            self.curvature_terms.sort_by_key(|t| t.term);
        }
    }

    pub fn scaled(&self, f: &S) -> Self {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c = c.clone() * f.clone();
        }
        out.kappa_coeff = out.kappa_coeff * f.clone();
        for t in &mut out.curvature_terms {
            t.coeff = t.coeff.clone() * f.clone();
        }
        out.curvature_terms.retain(|t| !t.coeff.is_zero());
        out
    }

    /// `self + f * other`, keeping the provenance of `self`.
    pub fn plus(&self, f: &S, other: &Self) -> Result<Self, BwError> {
        if self.bundle != other.bundle || self.targets != other.targets {
            return Err(BwError::MixedBundles);
        }
        let mut out = self.clone();
        for (c, o) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *c = c.clone() + f.clone() * o.clone();
        }
        out.kappa_coeff = out.kappa_coeff + f.clone() * other.kappa_coeff.clone();
        for t in &other.curvature_terms {
            let merged = out.curvature_coeff(t.term) + f.clone() * t.coeff.clone();
            out.set_curvature(t.term, merged);
        }
        Ok(out)
    }

    /// Coefficients, kappa coefficient, then the listed curvature columns.
    pub fn row(&self, curvature_columns: &[CurvatureKind]) -> Vec<S> {
        let mut row = self.coeffs.clone();
        row.push(self.kappa_coeff.clone());
        row.extend(curvature_columns.iter().map(|&k| self.curvature_coeff(k)));
        row
    }

    /// `f` with `self = f * other` on every column.
    pub fn scale_relative_to(&self, other: &Self) -> Option<S> {
        if self.bundle != other.bundle {
            return None;
        }
        let cols = curvature_columns([self, other]);
        linalg::proportionality(&self.row(&cols), &other.row(&cols))
    }

    pub fn to_latex(&self) -> String {
        let mut lhs = String::new();
        for (key, c) in self.targets.iter().zip(&self.coeffs) {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() {
                "-"
            } else if lhs.is_empty() {
                ""
            } else {
                "+"
            };
            let mag = latex_scalar(&c.abs());
            let mag = if mag == "1" { String::new() } else { mag };
            lhs += &format!("{sign}{mag}B_{{{},{}}}", key.step.value(), key.nu.value());
        }
        if lhs.is_empty() {
            lhs.push('0');
        }
        let mut rhs = format!("{}\\kappa", latex_scalar(&self.kappa_coeff));
        for t in &self.curvature_terms {
            let sym = match t.term {
                CurvatureKind::Hat(q) => format!("\\hat{{\\mathfrak{{R}}}}^{{{q}}}"),
                CurvatureKind::Plain(q) => format!("\\mathfrak{{R}}^{{{q}}}"),
            };
            let sign = if t.coeff.is_negative() { "-" } else { "+" };
            rhs += &format!("{sign}{}{sym}", latex_scalar(&t.coeff.abs()));
        }
        format!("{lhs}={rhs}")
    }
}

pub fn latex_scalar<S: Scalar>(x: &S) -> String {
    x.latex()
}

fn curvature_columns<'a, S: Scalar + 'a>(ids: impl IntoIterator<Item = &'a BwIdentity<S>>) -> Vec<CurvatureKind> {
    let set: BTreeSet<CurvatureKind> = ids
        .into_iter()
        .flat_map(|i| i.curvature_terms.iter().map(|t| t.term))
        .collect();
    set.into_iter().collect()
}

pub(crate) fn valid_targets<S: Scalar>(bundle: &BundleLabel) -> Result<Vec<GradientTarget<S>>, BwError> {
    Ok(decompose_bundle::<S>(bundle)?
        .targets
        .into_iter()
        .filter(|t| t.valid)
        .collect())
}

fn n_of<S: Scalar>(bundle: &BundleLabel) -> S {
    S::from_i64(bundle.rank() as i64)
}

/// `4n(n+2)`.
fn four_n_n2<S: Scalar>(bundle: &BundleLabel) -> S {
    let n = n_of::<S>(bundle);
    S::from_i64(4) * n.clone() * (n + S::from_i64(2))
}

/// `k(k+2)`.
fn k_k2<S: Scalar>(bundle: &BundleLabel) -> S {
    let k = bundle.k as i64;
    S::from_i64(k * (k + 2))
}

fn build<S: Scalar>(
    bundle: &BundleLabel,
    provenance: Provenance,
    coeff: impl Fn(&GradientTarget<S>) -> S,
    kappa_coeff: S,
    curvature: Option<(CurvatureKind, S)>,
) -> Result<BwIdentity<S>, BwError> {
    let targets = valid_targets::<S>(bundle)?;
    Ok(BwIdentity {
        bundle: bundle.clone(),
        provenance,
        targets: targets.iter().map(|t| t.key).collect(),
        coeffs: targets.iter().map(coeff).collect(),
        kappa_coeff,
        curvature_terms: curvature
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(term, coeff)| CurvatureTerm { term, coeff })
            .collect(),
    })
}

fn require_k(bundle: &BundleLabel, what: &str) -> Result<(), BwError> {
    if bundle.k == 0 {
        return Err(BwError::Inapplicable(format!("{what} needs k != 0")));
    }
    Ok(())
}

/// `sum_{N,nu} B_{N,nu} = ∇*∇`, recorded with zero right side.
pub fn identity_sum<S: Scalar>(bundle: &BundleLabel) -> Result<BwIdentity<S>, BwError> {
    build(bundle, Provenance::Sum, |_| S::one(), S::zero(), None)
}

/// `sum_{p=0}^{2q-1} (-1)^p c_hat_{2q-1-p} w_hat^p`.
fn alternating_hat_sum<S: Scalar>(c_hat: &[S], q: u32, w_hat: &S) -> S {
    let top = 2 * q;
    (0..top).fold(S::zero(), |acc, p| {
        let term = c_hat[(top - 1 - p) as usize].clone() * w_hat.pow(p);
        if p % 2 == 0 {
            acc + term
        } else {
            acc - term
        }
    })
}

fn hat_values<S: Scalar>(bundle: &BundleLabel, up_to: u32) -> Result<Vec<S>, BwError> {
    Ok((0..=up_to)
        .map(|q| casimir_hat(&bundle.rho, q))
        .collect::<Result<_, _>>()?)
}

/// First family: coefficient `sum_p (-1)^p c_hat_{2q-1-p} w_hat^p`, right side
/// `kappa (c_hat_{2q+1} + (2n+1)/2 c_hat_{2q}) / (4n(n+2)) + 2 R_hat^{2q}`.
pub fn identity_bochner1<S: Scalar>(bundle: &BundleLabel, q: u32) -> Result<BwIdentity<S>, BwError> {
    if q == 0 {
        return Err(BwError::Inapplicable("first family starts at q = 1".into()));
    }
    let h = hat_values::<S>(bundle, 2 * q + 1)?;
    let n = n_of::<S>(bundle);
    let two_n_plus_one_half = (S::from_i64(2) * n + S::one()) / S::from_i64(2);
    let kappa =
        (h[2 * q as usize + 1].clone() + two_n_plus_one_half * h[2 * q as usize].clone()) / four_n_n2::<S>(bundle);
    build(
        bundle,
        Provenance::Bochner1(q),
        |t| alternating_hat_sum(&h, q, &t.w_hat),
        kappa,
        Some((CurvatureKind::Hat(2 * q), S::from_i64(2))),
    )
}

/// Second family: coefficient `W_N (2 w_hat^{2q} - sum_p (-1)^p c_hat_{2q-1-p} w_hat^p)`,
/// right side `k(k+2) kappa c_hat_{2q} / (4n(n+2))`.
pub fn identity_bochner2<S: Scalar>(bundle: &BundleLabel, q: u32) -> Result<BwIdentity<S>, BwError> {
    require_k(bundle, "second family")?;
    let h = hat_values::<S>(bundle, 2 * q)?;
    let kappa = k_k2::<S>(bundle) * h[2 * q as usize].clone() / four_n_n2::<S>(bundle);
    build(
        bundle,
        Provenance::Bochner2(q),
        |t| t.big_w.clone() * (S::from_i64(2) * t.w_hat.pow(2 * q) - alternating_hat_sum(&h, q, &t.w_hat)),
        kappa,
        None,
    )
}

fn c2_c4<S: Scalar>(bundle: &BundleLabel) -> Result<(S, S), BwError> {
    Ok((casimir_eigenvalue(&bundle.rho, 2)?, casimir_eigenvalue(&bundle.rho, 4)?))
}

/// `sum w B = kappa c_2 / (8n(n+2)) + R^1`.
pub fn identity_bw1<S: Scalar>(bundle: &BundleLabel) -> Result<BwIdentity<S>, BwError> {
    let (c2, _) = c2_c4::<S>(bundle)?;
    let kappa = c2 / (S::from_i64(2) * four_n_n2::<S>(bundle));
    build(
        bundle,
        Provenance::Named(1),
        |t| t.w.clone(),
        kappa,
        Some((CurvatureKind::Plain(1), S::one())),
    )
}

/// `sum (c_2/2 + (n+1)(2n+1)w - (2n+1)w^2 + w^3) B = kappa c_4 / (8n(n+2)) + R^3`.
pub fn identity_bw2<S: Scalar>(bundle: &BundleLabel) -> Result<BwIdentity<S>, BwError> {
    let (c2, c4) = c2_c4::<S>(bundle)?;
    let n = bundle.rank() as i64;
    let kappa = c4 / (S::from_i64(2) * four_n_n2::<S>(bundle));
    build(
        bundle,
        Provenance::Named(2),
        |t| {
            let w = &t.w;
            c2.clone() / S::from_i64(2) + S::from_i64((n + 1) * (2 * n + 1)) * w.clone()
                - S::from_i64(2 * n + 1) * w.pow(2)
                + w.pow(3)
        },
        kappa,
        Some((CurvatureKind::Plain(3), S::one())),
    )
}

/// `sum W B = k(k+2) kappa / (4(n+2))`.
pub fn identity_bw3<S: Scalar>(bundle: &BundleLabel) -> Result<BwIdentity<S>, BwError> {
    require_k(bundle, "bw3")?;
    Ok(sp1_identity(bundle))
}

fn sp1_identity<S: Scalar>(bundle: &BundleLabel) -> BwIdentity<S> {
    let n = bundle.rank() as i64;
    let kappa = k_k2::<S>(bundle) / S::from_i64(4 * (n + 2));
    build(bundle, Provenance::Named(3), |t| t.big_w.clone(), kappa, None).expect("bundle already validated")
}

/// `sum 2W(w^2 - (n+1)w) B = k(k+2) kappa c_2 / (4n(n+2))`.
pub fn identity_bw4<S: Scalar>(bundle: &BundleLabel) -> Result<BwIdentity<S>, BwError> {
    require_k(bundle, "bw4")?;
    let (c2, _) = c2_c4::<S>(bundle)?;
    let n = bundle.rank() as i64;
    let kappa = k_k2::<S>(bundle) * c2 / four_n_n2::<S>(bundle);
    build(
        bundle,
        Provenance::Named(4),
        |t| S::from_i64(2) * t.big_w.clone() * (t.w.pow(2) - S::from_i64(n + 1) * t.w.clone()),
        kappa,
        None,
    )
}

/// `sum W {2w(w-n-1)(w^2-(2n+1)w+2n+1) + (n+w)c_2} B = k(k+2) kappa c_4 / (4n(n+2))`.
pub fn identity_bw5<S: Scalar>(bundle: &BundleLabel) -> Result<BwIdentity<S>, BwError> {
    require_k(bundle, "bw5")?;
    let (c2, c4) = c2_c4::<S>(bundle)?;
    let n = bundle.rank() as i64;
    let kappa = k_k2::<S>(bundle) * c4 / four_n_n2::<S>(bundle);
    build(
        bundle,
        Provenance::Named(5),
        |t| {
            let w = t.w.clone();
            let quartic = S::from_i64(2)
                * w.clone()
                * (w.clone() - S::from_i64(n + 1))
                * (w.pow(2) - S::from_i64(2 * n + 1) * w.clone() + S::from_i64(2 * n + 1));
            t.big_w.clone() * (quartic + (S::from_i64(n) + w) * c2.clone())
        },
        kappa,
        None,
    )
}

/// Scalar-curvature-only identity on `S^k(H) ⊗ Λ^{a,b}_0(E)`:
/// `sum (w+2)(c_2 + 4w^2 - 8nw - 12w) B = kappa (-4(2n^2+7n+7)c_2 + c_2^2 + 4c_4) / (8n(n+2))`.
pub fn identity_bw6<S: Scalar>(bundle: &BundleLabel) -> Result<BwIdentity<S>, BwError> {
    if bundle.rho.as_lambda_ab().is_none() {
        return Err(BwError::RuleMismatch {
            rule: "bw6",
            rho: bundle.rho.entries().to_vec(),
        });
    }
    let (c2, c4) = c2_c4::<S>(bundle)?;
    let n = bundle.rank() as i64;
    let kappa = (S::from_i64(-4 * (2 * n * n + 7 * n + 7)) * c2.clone() + c2.pow(2) + S::from_i64(4) * c4)
        / (S::from_i64(2) * four_n_n2::<S>(bundle));
    build(
        bundle,
        Provenance::Named(6),
        |t| {
            let w = t.w.clone();
            (w.clone() + S::from_i64(2)) * (c2.clone() + S::from_i64(4) * w.pow(2) - S::from_i64(8 * n + 12) * w)
        },
        kappa,
        None,
    )
}

/// `R^3 = (2n^2 + 7n + 7 - c_2/4) R^1` on `Λ^{a,b}_0(E)`.
pub fn rule_b_factor<S: Scalar>(bundle: &BundleLabel) -> Result<S, BwError> {
    let n = bundle.rank() as i64;
    let c2: S = casimir_eigenvalue(&bundle.rho, 2)?;
    Ok(S::from_i64(2 * n * n + 7 * n + 7) - c2 / S::from_i64(4))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CurvatureRule {
    /// `R^1 = 0` on `(1_a)`.
    A,
    /// `R^3 -> (2n^2+7n+7-c_2/4) R^1` on `(2_b, 1_{a-b})`.
    B,
    /// Every curvature term vanishes (quaternionic projective space).
    C,
}

pub fn simplify_curvature<S: Scalar>(identity: &BwIdentity<S>, rule: CurvatureRule) -> Result<BwIdentity<S>, BwError> {
    let rho = &identity.bundle.rho;
    let mismatch = |rule| BwError::RuleMismatch {
        rule,
        rho: rho.entries().to_vec(),
    };
    let mut out = identity.clone();
    match rule {
        CurvatureRule::A => {
            rho.as_primitive().ok_or_else(|| mismatch("A"))?;
            out.set_curvature(CurvatureKind::Plain(1), S::zero());
        }
        CurvatureRule::B => {
            rho.as_lambda_ab().ok_or_else(|| mismatch("B"))?;
            let r3 = out.curvature_coeff(CurvatureKind::Plain(3));
            if !r3.is_zero() {
                let r1 = out.curvature_coeff(CurvatureKind::Plain(1)) + r3 * rule_b_factor::<S>(&identity.bundle)?;
                out.set_curvature(CurvatureKind::Plain(3), S::zero());
                out.set_curvature(CurvatureKind::Plain(1), r1);
            }
        }
        CurvatureRule::C => out.curvature_terms.clear(),
    }
    Ok(out)
}

/// The rules that hold on this bundle, in the order they are applied.
pub fn applicable_rules(bundle: &BundleLabel, hpn: bool) -> Vec<CurvatureRule> {
    let mut rules = Vec::new();
    if bundle.rho.as_lambda_ab().is_some() {
        rules.push(CurvatureRule::B);
    }
    if bundle.rho.as_primitive().is_some() {
        rules.push(CurvatureRule::A);
    }
    if hpn {
        rules.push(CurvatureRule::C);
    }
    rules
}

pub fn apply_rules<S: Scalar>(identity: &BwIdentity<S>, hpn: bool) -> Result<BwIdentity<S>, BwError> {
    applicable_rules(&identity.bundle, hpn)
        .into_iter()
        .try_fold(identity.clone(), |acc, rule| simplify_curvature(&acc, rule))
}

fn floor_div(a: i64, b: i64) -> i64 {
    a.div_euclid(b)
}

/// The identities listed as independent: for `k != 0` the first family at
/// `q = 1..=[N/4]` and the second at `q = 0..=[N/4 - 1/2]`; for `k = 0` the
/// first family at `q = 1..=[N/2]`.
pub fn bochner_family<S: Scalar>(bundle: &BundleLabel) -> Result<Vec<BwIdentity<S>>, BwError> {
    let count = valid_targets::<S>(bundle)?.len() as i64;
    let mut out = Vec::new();
    if bundle.k == 0 {
        for q in 1..=count / 2 {
            out.push(identity_bochner1(bundle, q as u32)?);
        }
        return Ok(out);
    }
    for q in 1..=count / 4 {
        out.push(identity_bochner1(bundle, q as u32)?);
    }
    for q in 0..=floor_div(count - 2, 4) {
        out.push(identity_bochner2(bundle, q as u32)?);
    }
    Ok(out)
}

/// Every identity that is pure-kappa after the applicable rules, in a fixed
/// order: bw1, ..., bw6, then (in projective-space mode) the general families.
pub fn pure_identities<S: Scalar>(bundle: &BundleLabel, hpn: bool) -> Result<Vec<BwIdentity<S>>, BwError> {
    let mut candidates = vec![identity_bw1(bundle)?, identity_bw2(bundle)?];
    if bundle.k != 0 {
        candidates.push(identity_bw3(bundle)?);
        candidates.push(identity_bw4(bundle)?);
        candidates.push(identity_bw5(bundle)?);
    }
    if bundle.rho.as_lambda_ab().is_some() {
        candidates.push(identity_bw6(bundle)?);
    }
    if hpn {
        candidates.extend(bochner_family(bundle)?);
    }
    let mut out = Vec::new();
    for id in candidates {
        let id = apply_rules(&id, hpn)?;
        if id.is_pure() {
            out.push(id);
        }
    }
    Ok(out)
}

fn same_bundle<S: Scalar>(ids: &[BwIdentity<S>]) -> Result<(), BwError> {
    match ids.split_first() {
        Some((first, rest)) if rest.iter().any(|i| i.bundle != first.bundle) => Err(BwError::MixedBundles),
        _ => Ok(()),
    }
}

/// Rank with the kappa and curvature columns appended.
pub fn independence_rank<S: Scalar>(ids: &[BwIdentity<S>]) -> Result<usize, BwError> {
    same_bundle(ids)?;
    let cols = curvature_columns(ids);
    Ok(linalg::rank(&ids.iter().map(|i| i.row(&cols)).collect::<Vec<_>>()))
}

/// Rank of the gradient coefficient vectors alone.
pub fn gradient_rank<S: Scalar>(ids: &[BwIdentity<S>]) -> Result<usize, BwError> {
    same_bundle(ids)?;
    Ok(linalg::rank(&ids.iter().map(|i| i.coeffs.clone()).collect::<Vec<_>>()))
}

/// Matrix export: one row per identity, columns `B_(N,nu)`, `kappa`, curvature terms.
pub fn identities_to_csv<S: Scalar>(ids: &[BwIdentity<S>]) -> Result<String, BwError> {
    same_bundle(ids)?;
    let cols = curvature_columns(ids);
    let Some(first) = ids.first() else {
        return Ok(String::new());
    };
    let mut header = vec!["provenance".to_string()];
    header.extend(first.targets.iter().map(|t| format!("B{t}")));
    header.push("kappa".into());
    header.extend(cols.iter().map(|c| c.to_string()));
    let mut out = header.join(",") + "\n";
    for id in ids {
        let mut fields = vec![id.provenance.to_string()];
        fields.extend(id.row(&cols).iter().map(S::canonical));
        out += &(fields.join(",") + "\n");
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorName {
    ConnectionLaplacian,
    HodgeLaplacian,
    DiracSquared,
    #[serde(rename = "R1_endomorphism")]
    R1Endomorphism,
}

impl OperatorName {
    pub const ALL: [OperatorName; 4] = [
        OperatorName::ConnectionLaplacian,
        OperatorName::HodgeLaplacian,
        OperatorName::DiracSquared,
        OperatorName::R1Endomorphism,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OperatorName::ConnectionLaplacian => "connection_laplacian",
            OperatorName::HodgeLaplacian => "hodge_laplacian",
            OperatorName::DiracSquared => "dirac_squared",
            OperatorName::R1Endomorphism => "R1_endomorphism",
        }
    }
}

impl fmt::Display for OperatorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OperatorName {
    type Err = BwError;
    fn from_str(s: &str) -> Result<Self, BwError> {
        let norm = s.replace('-', "_");
        OperatorName::ALL
            .into_iter()
            .find(|o| o.as_str().eq_ignore_ascii_case(&norm))
            .or(match norm.as_str() {
                "hodge" | "laplacian" => Some(OperatorName::HodgeLaplacian),
                "connection" | "rough" => Some(OperatorName::ConnectionLaplacian),
                "dirac" => Some(OperatorName::DiracSquared),
                "r1" => Some(OperatorName::R1Endomorphism),
                _ => None,
            })
            .ok_or_else(|| BwError::UnknownOperator(s.to_string()))
    }
}

/// `sum coeffs[t] B_t + constant_kappa * kappa`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct OperatorSpec<S: Scalar> {
    pub name: OperatorName,
    pub bundle: BundleLabel,
    pub targets: Vec<TargetKey>,
    #[serde(with = "scalar::vec_as_str")]
    pub coeffs: Vec<S>,
    #[serde(with = "scalar::as_str")]
    pub constant_kappa: S,
}

pub fn operator_coeffs<S: Scalar>(name: OperatorName, bundle: &BundleLabel) -> Result<OperatorSpec<S>, BwError> {
    let targets = valid_targets::<S>(bundle)?;
    let n = n_of::<S>(bundle);
    let two = S::from_i64(2);
    let coeffs = targets
        .iter()
        .map(|t| match name {
            OperatorName::ConnectionLaplacian => S::one(),
            OperatorName::HodgeLaplacian => {
                S::one() + t.w.clone() / two.clone() + t.big_w.clone() / (two.clone() * n.clone())
            }
            OperatorName::DiracSquared => S::one() + t.w.clone() + t.big_w.clone() / n.clone(),
            OperatorName::R1Endomorphism => t.w.clone() + t.big_w.clone() / n.clone(),
        })
        .collect();
    Ok(OperatorSpec {
        name,
        bundle: bundle.clone(),
        targets: targets.iter().map(|t| t.key).collect(),
        coeffs,
        constant_kappa: S::zero(),
    })
}

/// `R^1_{k,rho} = sum (w + W/n) B = kappa (2k(k+2) + c_2) / (8n(n+2)) + R^1`.
pub fn gauduchon_identity<S: Scalar>(bundle: &BundleLabel) -> Result<BwIdentity<S>, BwError> {
    let n = n_of::<S>(bundle);
    let mut id = identity_bw1(bundle)?.plus(&(S::one() / n), &sp1_identity(bundle))?;
    id.provenance = Provenance::OperatorExpansion;
    Ok(id)
}

/// Exponents of the conformal change `(-w/2 - W/(2n) - 1, w/2 + W/(2n))`.
pub fn conformal_exponents<S: Scalar>(bundle: &BundleLabel, key: TargetKey) -> Result<(S, S), BwError> {
    let t = valid_targets::<S>(bundle)?
        .into_iter()
        .find(|t| t.key == key)
        .ok_or_else(|| BwError::Inapplicable(format!("target {key} is not a gradient of {bundle}")))?;
    let two = S::from_i64(2);
    let second = t.w / two.clone() + t.big_w / (two * n_of::<S>(bundle));
    Ok((-second.clone() - S::one(), second))
}

pub fn target_key(step: i64, nu: i64, n: usize) -> Result<TargetKey, BwError> {
    Ok(TargetKey {
        step: Step::try_from(step)?,
        nu: crate::rep::Nu::new(nu, n)?,
    })
}
