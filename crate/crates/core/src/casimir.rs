//! Conformal weights, relative dimensions and Casimir eigenvalues.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{CasimirError, RepError};
use crate::rep::{decompose_rho_tensor_e, shift_by, weyl_dim_spn, BundleLabel, Nu, SpnWeight, Step, TargetKey};
use crate::scalar::{self, Scalar};

/// Highest `q` accepted by [`casimir_report`].
pub const MAX_Q: u32 = 12;

/// One summand `(N, nu)` of `V_{k,rho} ⊗ (H ⊗ E)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct GradientTarget<S: Scalar> {
    #[serde(flatten)]
    pub key: TargetKey,
    pub target_k: i64,
    pub target_rho: SpnWeight,
    /// `k + N >= 0` and `rho + mu_nu` dominant.
    pub valid: bool,
    #[serde(with = "scalar::as_str")]
    pub w: S,
    #[serde(with = "scalar::as_str")]
    pub w_hat: S,
    #[serde(rename = "W", with = "scalar::as_str")]
    pub big_w: S,
    /// `dim V_{rho+mu_nu} / dim V_rho`, zero when the target is not dominant.
    #[serde(with = "scalar::as_str")]
    pub reldim: S,
}

impl<S: Scalar> GradientTarget<S> {
    pub fn new(bundle: &BundleLabel, step: Step, nu: Nu) -> Result<Self, RepError> {
        let rho = &bundle.rho;
        let shifted = shift_by(rho, nu);
        let target_k = bundle.k as i64 + step.value();
        let w: S = conformal_weight(rho, nu.value())?;
        Ok(GradientTarget {
            key: TargetKey { step, nu },
            target_k,
            target_rho: shifted.weight,
            valid: shifted.dominant && target_k >= 0,
            w_hat: w.clone() - shift_n(rho.rank()),
            w,
            big_w: sp1_conformal_weight(bundle.k, step),
            reldim: relative_dimension_weyl(rho, nu.value())?,
        })
    }
}

fn shift_n<S: Scalar>(n: usize) -> S {
    S::from_i64(n as i64) + S::half()
}

/// `w_i = -(rho^i - i + 1)` and `w_{-i} = rho^i - i + 2n + 1`.
pub fn conformal_weight<S: Scalar>(rho: &SpnWeight, nu: i64) -> Result<S, RepError> {
    let n = rho.rank() as i64;
    let nu = Nu::new(nu, rho.rank())?;
    let i = nu.slot() as i64 + 1;
    let r = rho.entries()[nu.slot()];
    Ok(S::from_i64(if nu.is_raising() {
        -(r - i + 1)
    } else {
        r - i + 2 * n + 1
    }))
}

/// `w_nu - (n + 1/2)`.
pub fn conformal_weight_hat<S: Scalar>(rho: &SpnWeight, nu: i64) -> Result<S, RepError> {
    Ok(conformal_weight::<S>(rho, nu)? - shift_n(rho.rank()))
}

/// `W_1 = -k`, `W_{-1} = k + 2`.
pub fn sp1_conformal_weight<S: Scalar>(k: u32, step: Step) -> S {
    match step {
        Step::Up => S::from_i64(-(k as i64)),
        Step::Down => S::from_i64(k as i64 + 2),
    }
}

/// Ratio of Weyl dimensions, zero for a non-dominant target.
pub fn relative_dimension_weyl<S: Scalar>(rho: &SpnWeight, nu: i64) -> Result<S, RepError> {
    let nu = Nu::new(nu, rho.rank())?;
    let base = weyl_dim_spn(rho)?;
    let shifted = shift_by(rho, nu);
    if !shifted.dominant {
        return Ok(S::zero());
    }
    let top = weyl_dim_spn(&shifted.weight)?;
    Ok(S::from_i128(top as i128) / S::from_i128(base as i128))
}

/// Reading of the leading factor `-2(w_hat_nu - s)` in the product formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrefactorConvention {
    /// `s = (-1)^N`.
    UnitShift,
    /// `s = (-1)^N / 2`. Agrees with the Weyl dimension ratio.
    HalfShift,
}

impl PrefactorConvention {
    pub const CALIBRATED: PrefactorConvention = PrefactorConvention::HalfShift;

    fn shift<S: Scalar>(self, summands: usize) -> S {
        let sign = if summands.is_multiple_of(2) {
            S::one()
        } else {
            -S::one()
        };
        match self {
            PrefactorConvention::UnitShift => sign,
            PrefactorConvention::HalfShift => sign * S::half(),
        }
    }
}

/// `-2(w_hat_nu - s) * prod (w_hat_nu + w_hat_nu') / (w_hat_nu - w_hat_nu')`
/// over the other dominant targets `nu'`.
pub fn relative_dimension_product<S: Scalar>(
    rho: &SpnWeight,
    nu: i64,
    convention: PrefactorConvention,
) -> Result<S, CasimirError> {
    let table = decompose_rho_tensor_e(rho)?;
    let nu = Nu::new(nu, rho.rank())?;
    if !table.dominant_targets().any(|(other, _)| other == nu) {
        return Err(CasimirError::NonDominantTarget(nu.value()));
    }
    let w_nu: S = conformal_weight_hat(rho, nu.value())?;
    let mut value = S::from_i64(-2) * (w_nu.clone() - convention.shift(table.summand_count));
    for (other, _) in table.dominant_targets().filter(|(other, _)| *other != nu) {
        let w_other: S = conformal_weight_hat(rho, other.value())?;
        if w_other == w_nu {
            return Err(CasimirError::FormulaDegeneracy {
                nu: nu.value(),
                other: other.value(),
            });
        }
        value = value * (w_nu.clone() + w_other.clone()) / (w_nu.clone() - w_other);
    }
    Ok(value)
}

fn power_sum<S: Scalar>(
    rho: &SpnWeight,
    q: u32,
    weight: fn(&SpnWeight, i64) -> Result<S, RepError>,
) -> Result<S, RepError> {
    let mut total = S::zero();
    for nu in Nu::all(rho.rank()) {
        let rel: S = relative_dimension_weyl(rho, nu.value())?;
        if !rel.is_zero() {
            total = total + weight(rho, nu.value())?.pow(q) * rel;
        }
    }
    Ok(total)
}

/// `pi_rho(c_q) = sum_nu w_nu^q * reldim(nu)`.
pub fn casimir_eigenvalue<S: Scalar>(rho: &SpnWeight, q: u32) -> Result<S, RepError> {
    power_sum(rho, q, conformal_weight::<S>)
}

/// `pi_rho(c_hat_q) = sum_nu w_hat_nu^q * reldim(nu)`.
pub fn casimir_hat<S: Scalar>(rho: &SpnWeight, q: u32) -> Result<S, RepError> {
    power_sum(rho, q, conformal_weight_hat::<S>)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CasimirValue<S: Scalar> {
    pub q: u32,
    #[serde(with = "scalar::as_str")]
    pub c: S,
    #[serde(with = "scalar::as_str")]
    pub c_hat: S,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CasimirReport<S: Scalar> {
    pub rho: SpnWeight,
    pub n: usize,
    pub values: Vec<CasimirValue<S>>,
}

impl<S: Scalar> CasimirReport<S> {
    pub fn c(&self, q: u32) -> Option<&S> {
        self.values.iter().find(|v| v.q == q).map(|v| &v.c)
    }

    pub fn c_hat(&self, q: u32) -> Option<&S> {
        self.values.iter().find(|v| v.q == q).map(|v| &v.c_hat)
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!(
            "rho = ({}), n = {}\n\n| q | c_q | c_hat_q |\n|---|---|---|\n",
            self.rho, self.n
        );
        for v in &self.values {
            out += &format!("| {} | {} | {} |\n", v.q, v.c.typeset(), v.c_hat.typeset());
        }
        out
    }
}

/// `c_q` and `c_hat_q` for `q = 0..=q_max`.
pub fn casimir_report<S: Scalar>(rho: &SpnWeight, q_max: u32) -> Result<CasimirReport<S>, RepError> {
    if q_max > MAX_Q {
        return Err(RepError::Range(format!("q_max = {q_max} exceeds {MAX_Q}")));
    }
    if !rho.is_dominant() {
        return Err(RepError::NotDominant(rho.entries().to_vec()));
    }
    let values = (0..=q_max)
        .map(|q| {
            Ok(CasimirValue {
                q,
                c: casimir_eigenvalue(rho, q)?,
                c_hat: casimir_hat(rho, q)?,
            })
        })
        .collect::<Result<_, RepError>>()?;
    Ok(CasimirReport {
        rho: rho.clone(),
        n: rho.rank(),
        values,
    })
}

/// `pi_rho(c_2) = 2 sum_i rho^i (rho^i + 2(n - i + 1))`.
pub fn closed_form_c2<S: Scalar>(rho: &SpnWeight) -> S {
    let n = rho.rank() as i64;
    let total: i64 = rho
        .entries()
        .iter()
        .enumerate()
        .map(|(idx, &r)| r * (r + 2 * (n - idx as i64)))
        .sum();
    S::from_i64(2 * total)
}

fn check_ab(a: usize, b: usize, n: usize) -> Result<(i128, i128, i128), RepError> {
    if b > a || a > n {
        return Err(RepError::Range(format!(
            "need 0 <= b <= a <= n, got a={a}, b={b}, n={n}"
        )));
    }
    Ok((a as i128, b as i128, n as i128))
}

/// `c_2` on `Λ^{a,b}_0(E)`: `2a(2n-a+2) + 2b(2n-b+4)`.
pub fn closed_form_c2_lambda_ab<S: Scalar>(a: usize, b: usize, n: usize) -> Result<S, RepError> {
    let (a, b, n) = check_ab(a, b, n)?;
    Ok(S::from_i128(2 * a * (2 * n - a + 2) + 2 * b * (2 * n - b + 4)))
}

/// `c_4` on `Λ^{a,b}_0(E)`.
pub fn closed_form_c4_lambda_ab<S: Scalar>(a: usize, b: usize, n: usize) -> Result<S, RepError> {
    let (a, b, n) = check_ab(a, b, n)?;
    let pa = 2 * n - a + 2;
    let pb = 2 * n - b + 4;
    Ok(S::from_i128(
        2 * a * pa * (2 * n + 3) * (n + 1) - 2 * a * a * pa * pa + 2 * b * pb * (2 * n + 3) * (n + 3)
            - 2 * b * b * pb * pb,
    ))
}

/// The five summands of `Λ^{a,b}_0(E) ⊗ E`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Table1Row {
    Mu1,
    MuBPlus1,
    MuAPlus1,
    MuMinusB,
    MuMinusA,
}

impl Table1Row {
    pub const ALL: [Table1Row; 5] = [
        Table1Row::Mu1,
        Table1Row::MuBPlus1,
        Table1Row::MuAPlus1,
        Table1Row::MuMinusB,
        Table1Row::MuMinusA,
    ];

    /// Signed index of the row, `None` when it falls outside `±1..±n`.
    pub fn nu(self, a: usize, b: usize, n: usize) -> Option<i64> {
        let (a, b, n) = (a as i64, b as i64, n as i64);
        let nu = match self {
            Table1Row::Mu1 => 1,
            Table1Row::MuBPlus1 => b + 1,
            Table1Row::MuAPlus1 => a + 1,
            Table1Row::MuMinusB => -b,
            Table1Row::MuMinusA => -a,
        };
        (nu != 0 && nu.abs() <= n).then_some(nu)
    }
}

impl fmt::Display for Table1Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Table1Row::Mu1 => "rho+mu_1",
            Table1Row::MuBPlus1 => "rho+mu_(b+1)",
            Table1Row::MuAPlus1 => "rho+mu_(a+1)",
            Table1Row::MuMinusB => "rho+mu_(-b)",
            Table1Row::MuMinusA => "rho+mu_(-a)",
        })
    }
}

/// Conformal weight and relative dimension of a row, from the closed-form
/// rational functions of `a, b, n`.
pub fn table1_row<S: Scalar>(a: usize, b: usize, n: usize, row: Table1Row) -> Result<(S, S), RepError> {
    let (a, b, n) = check_ab(a, b, n)?;
    let q = |num: i128, den: i128| S::from_i128(num) / S::from_i128(den);
    Ok(match row {
        Table1Row::Mu1 => (
            S::from_i64(-2),
            q(
                2 * b * (a + 1) * (2 * n - a + 3) * (2 * n - b + 4) * (n + 2),
                (a + 2) * (b + 1) * (2 * n - a + 4) * (2 * n - b + 5),
            ),
        ),
        Table1Row::MuBPlus1 => (
            S::from_i128(b - 1),
            q(
                (a - b) * (2 * n - b + 4) * (2 * n - a - b + 2) * (n - b + 1),
                (b + 1) * (a - b + 1) * (2 * n - a - b + 3) * (n - b + 2),
            ),
        ),
        Table1Row::MuAPlus1 => (
            S::from_i128(a),
            q(
                (a - b + 2) * (2 * n - a + 3) * (2 * n - a - b + 2) * (n - a),
                (a + 2) * (a - b + 1) * (2 * n - a - b + 3) * (n - a + 1),
            ),
        ),
        Table1Row::MuMinusB => (
            S::from_i128(2 * n - b + 3),
            q(
                b * (a - b + 2) * (2 * n - a - b + 4) * (n - b + 3),
                (a - b + 1) * (2 * n - b + 5) * (2 * n - a - b + 3) * (n - b + 2),
            ),
        ),
        Table1Row::MuMinusA => (
            S::from_i128(2 * n - a + 2),
            q(
                (a + 1) * (a - b) * (2 * n - a - b + 4) * (n - a + 2),
                (a - b + 1) * (2 * n - a + 4) * (2 * n - a - b + 3) * (n - a + 1),
            ),
        ),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Table1Entry<S: Scalar> {
    pub row: Table1Row,
    pub nu: Option<i64>,
    #[serde(with = "scalar::as_str")]
    pub w: S,
    #[serde(with = "scalar::as_str")]
    pub reldim: S,
    /// Weyl dimension ratio at the same index, when the index exists.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reldim_weyl: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Table1Report<S: Scalar> {
    pub a: usize,
    pub b: usize,
    pub n: usize,
    pub rows: Vec<Table1Entry<S>>,
}

impl<S: Scalar> Table1Report<S> {
    /// The closed forms agree with the Weyl ratio on every row that has its
    /// own index (rows sharing an index with an earlier row are skipped).
    pub fn agrees_with_weyl(&self) -> bool {
        let mut seen = Vec::new();
        self.rows.iter().all(|r| match (r.nu, &r.reldim_weyl) {
            (Some(nu), Some(weyl)) if !seen.contains(&nu) => {
                seen.push(nu);
                &r.reldim.canonical() == weyl
            }
            _ => true,
        })
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!(
            "a = {}, b = {}, n = {}\n\n| rho+mu_nu | w_nu | relative dimension |\n|---|---|---|\n",
            self.a, self.b, self.n
        );
        for r in &self.rows {
            out += &format!("| {} | {} | {} |\n", r.row, r.w.typeset(), r.reldim.typeset());
        }
        out
    }
}

pub fn table1<S: Scalar>(a: usize, b: usize, n: usize) -> Result<Table1Report<S>, RepError> {
    let rho = SpnWeight::lambda_ab(a, b, n)?;
    let rows = Table1Row::ALL
        .iter()
        .map(|&row| {
            let (w, reldim) = table1_row::<S>(a, b, n, row)?;
            let nu = row.nu(a, b, n);
            let reldim_weyl = match nu {
                Some(nu) => Some(relative_dimension_weyl::<S>(&rho, nu)?.canonical()),
                None => None,
            };
            Ok(Table1Entry {
                row,
                nu,
                w,
                reldim,
                reldim_weyl,
            })
        })
        .collect::<Result<_, RepError>>()?;
    Ok(Table1Report { a, b, n, rows })
}

fn binomial<S: Scalar>(q: u32, p: u32) -> S {
    (0..p).fold(S::one(), |acc, i| {
        acc * S::from_i64((q - i) as i64) / S::from_i64(i as i64 + 1)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecursionCheck {
    /// `2 c_hat_{2q+1} = -c_hat_{2q} - sum_p (-1)^p c_hat_{2q-p} c_hat_p`.
    OddHat,
    /// `c_hat_q = sum_p C(q,p) (-n-1/2)^{q-p} c_p`.
    Binomial,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecursionReport {
    pub rho: SpnWeight,
    pub q_max: u32,
    pub checked: usize,
    pub failures: Vec<(RecursionCheck, u32)>,
}

impl RecursionReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn verify_recursion<S: Scalar>(rho: &SpnWeight, q_max: u32) -> Result<RecursionReport, RepError> {
    let c: Vec<S> = (0..=q_max)
        .map(|q| casimir_eigenvalue(rho, q))
        .collect::<Result<_, _>>()?;
    let h: Vec<S> = (0..=q_max).map(|q| casimir_hat(rho, q)).collect::<Result<_, _>>()?;
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut q = 0;
    while 2 * q < q_max {
        let top = 2 * q as usize;
        let mut rhs = -h[top].clone();
        for p in 0..=top {
            let term = h[top - p].clone() * h[p].clone();
            rhs = if p % 2 == 0 { rhs - term } else { rhs + term };
        }
        checked += 1;
        if S::from_i64(2) * h[top + 1].clone() != rhs {
            failures.push((RecursionCheck::OddHat, 2 * q + 1));
        }
        q += 1;
    }
    let t = -shift_n::<S>(rho.rank());
    for q in 0..=q_max {
        let mut rhs = S::zero();
        for p in 0..=q {
            rhs = rhs + binomial::<S>(q, p) * t.pow(q - p) * c[p as usize].clone();
        }
        checked += 1;
        if rhs != h[q as usize] {
            failures.push((RecursionCheck::Binomial, q));
        }
    }
    Ok(RecursionReport {
        rho: rho.clone(),
        q_max,
        checked,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::dominant_weights;
    use num_rational::BigRational;
    use proptest::prelude::*;

    type Q = BigRational;

    fn w(e: &[i64]) -> SpnWeight {
        SpnWeight::new(e.to_vec()).unwrap()
    }

    fn r(p: i128, q: i128) -> Q {
        Q::ratio(p, q)
    }

    fn corpus() -> Vec<SpnWeight> {
        (2..=5).flat_map(|n| dominant_weights(n, 4)).collect()
    }

    #[test]
    fn conformal_weights() {
        let rho = w(&[1, 0]);
        let got: Vec<Q> = [1, 2, -1, -2]
            .iter()
            .map(|&nu| conformal_weight(&rho, nu).unwrap())
            .collect();
        assert_eq!(got, vec![r(-1, 1), r(1, 1), r(5, 1), r(3, 1)]);
        for n in 3..7 {
            for a in 2..n {
                for b in 1..a {
                    let rho = SpnWeight::lambda_ab(a, b, n).unwrap();
                    assert_eq!(conformal_weight::<Q>(&rho, 1).unwrap(), r(-2, 1));
                    assert_eq!(
                        conformal_weight::<Q>(&rho, -(b as i64)).unwrap(),
                        r(2 * n as i128 - b as i128 + 3, 1)
                    );
                }
            }
        }
        assert_eq!(conformal_weight_hat::<Q>(&w(&[1, 0]), 1).unwrap(), r(-7, 2));
        assert!(conformal_weight::<Q>(&rho, 3).is_err());
    }

    #[test]
    fn sp1_weights() {
        assert_eq!(sp1_conformal_weight::<Q>(0, Step::Up), r(0, 1));
        assert_eq!(sp1_conformal_weight::<Q>(2, Step::Down), r(4, 1));
        assert_eq!(sp1_conformal_weight::<Q>(5, Step::Up), r(-5, 1));
    }

    #[test]
    fn weyl_ratios() {
        let rho = w(&[1, 0]);
        let got: Vec<Q> = [1, 2, -1]
            .iter()
            .map(|&nu| relative_dimension_weyl(&rho, nu).unwrap())
            .collect();
        assert_eq!(got, vec![r(5, 2), r(5, 4), r(1, 4)]);
        assert_eq!(relative_dimension_weyl::<Q>(&w(&[2, 0]), 1).unwrap(), r(2, 1));
        assert_eq!(relative_dimension_weyl::<Q>(&w(&[0, 0, 0]), 1).unwrap(), r(6, 1));
        assert_eq!(relative_dimension_weyl::<Q>(&rho, -2).unwrap(), r(0, 1));
    }

    #[test]
    fn product_formula_examples() {
        let h = PrefactorConvention::CALIBRATED;
        assert_eq!(relative_dimension_product::<Q>(&w(&[2, 0]), 1, h).unwrap(), r(2, 1));
        assert_eq!(relative_dimension_product::<Q>(&w(&[1, 1]), 1, h).unwrap(), r(16, 5));
        assert_eq!(relative_dimension_product::<Q>(&w(&[0, 0, 0]), 1, h).unwrap(), r(6, 1));
        assert!(matches!(
            relative_dimension_product::<Q>(&w(&[1, 0]), -2, h),
            Err(CasimirError::NonDominantTarget(-2))
        ));
    }

    /// The calibrated reading matches the Weyl ratio everywhere in the corpus;
    /// the unit shift does not.
    #[test]
    fn prefactor_calibration() {
        let mut unit_hits = 0;
        let mut total = 0;
        for rho in corpus() {
            let table = decompose_rho_tensor_e(&rho).unwrap();
            for (nu, _) in table.dominant_targets() {
                let oracle: Q = relative_dimension_weyl(&rho, nu.value()).unwrap();
                let half: Q = relative_dimension_product(&rho, nu.value(), PrefactorConvention::HalfShift).unwrap();
                assert_eq!(half, oracle, "rho={rho}, nu={nu}");
                let unit: Q = relative_dimension_product(&rho, nu.value(), PrefactorConvention::UnitShift).unwrap();
                unit_hits += (unit == oracle) as usize;
                total += 1;
            }
        }
        assert!(total > 100);
        assert_eq!(unit_hits, 0);
    }

    #[test]
    fn casimir_examples() {
        let rho = w(&[1, 0]);
        assert_eq!(casimir_eigenvalue::<Q>(&rho, 2).unwrap(), r(10, 1));
        assert_eq!(casimir_eigenvalue::<Q>(&rho, 4).unwrap(), r(160, 1));
        assert_eq!(closed_form_c4_lambda_ab::<Q>(1, 0, 2).unwrap(), r(160, 1));
        assert_eq!(closed_form_c2_lambda_ab::<Q>(2, 1, 3).unwrap(), r(42, 1));
        assert_eq!(closed_form_c2_lambda_ab::<Q>(0, 0, 3).unwrap(), r(0, 1));
        assert_eq!(closed_form_c4_lambda_ab::<Q>(0, 0, 3).unwrap(), r(0, 1));
        assert!(closed_form_c2_lambda_ab::<Q>(1, 2, 3).is_err());
        assert_eq!(casimir_hat::<Q>(&rho, 1).unwrap(), r(-10, 1));
    }

    #[test]
    fn low_order_identities() {
        for rho in corpus() {
            let n = rho.rank() as i128;
            let rep = casimir_report::<Q>(&rho, 4).unwrap();
            let c2 = rep.c(2).unwrap().clone();
            assert_eq!(rep.c(0).unwrap(), &r(2 * n, 1));
            assert_eq!(rep.c(1).unwrap(), &r(0, 1));
            assert_eq!(rep.c_hat(0).unwrap(), &r(2 * n, 1));
            assert_eq!(rep.c_hat(1).unwrap(), &r(-2 * n * n - n, 1));
            assert_eq!(c2, closed_form_c2::<Q>(&rho));
            assert_eq!(rep.c(3).unwrap(), &(Q::from_i128(n + 1) * c2.clone()));
            let nh = r(2 * n + 1, 2);
            assert_eq!(rep.c_hat(2).unwrap(), &(c2.clone() + Q::from_i128(2 * n) * nh.pow(2)));
            assert_eq!(
                rep.c_hat(3).unwrap(),
                &(-r(4 * n + 1, 2) * c2 - Q::from_i128(2 * n) * nh.pow(3))
            );
            if let Some((a, b)) = rho.as_lambda_ab() {
                assert_eq!(
                    rep.c(4).unwrap(),
                    &closed_form_c4_lambda_ab::<Q>(a, b, rho.rank()).unwrap()
                );
            }
        }
    }

    #[test]
    fn recursion_and_binomial() {
        for rho in corpus() {
            let report = verify_recursion::<Q>(&rho, 6).unwrap();
            assert!(report.ok(), "{:?}", report.failures);
            assert_eq!(report.checked, 3 + 7);
        }
    }

    #[test]
    fn table1_matches_weyl() {
        let rows = table1::<Q>(1, 1, 2).unwrap();
        assert_eq!(
            (rows.rows[0].w.clone(), rows.rows[0].reldim.clone()),
            (r(-2, 1), r(2, 1))
        );
        let (_, rel) = table1_row::<Q>(2, 1, 2, Table1Row::MuAPlus1).unwrap();
        assert_eq!(rel, r(0, 1));
        for n in 3..=6 {
            for a in 2..n {
                for b in 1..a {
                    let t = table1::<Q>(a, b, n).unwrap();
                    assert!(t.agrees_with_weyl(), "a={a} b={b} n={n}");
                    for row in &t.rows {
                        let nu = row.nu.unwrap();
                        let rho = SpnWeight::lambda_ab(a, b, n).unwrap();
                        assert_eq!(row.w, conformal_weight::<Q>(&rho, nu).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn small_rational_agrees() {
        use num_rational::Ratio;
        for rho in dominant_weights(3, 3) {
            let big = casimir_report::<Q>(&rho, 6).unwrap();
            let small = casimir_report::<Ratio<i128>>(&rho, 6).unwrap();
            for (x, y) in big.values.iter().zip(&small.values) {
                assert_eq!(x.c.canonical(), y.c.canonical());
                assert_eq!(x.c_hat.canonical(), y.c_hat.canonical());
            }
        }
    }

    #[test]
    fn report_json_round_trip() {
        let rep = casimir_report::<Q>(&w(&[2, 1, 0]), 4).unwrap();
        let text = serde_json::to_string(&rep).unwrap();
        assert!(text.contains("\"rho\":\"2,1,0\""));
        let back: CasimirReport<Q> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, rep);
        assert!(casimir_report::<Q>(&w(&[1, 0]), 13).is_err());
    }

    proptest! {
        #[test]
        fn weighted_sums(n in 2usize..6, idx in 0usize..200) {
            let weights = dominant_weights(n, 4);
            let rho = &weights[idx % weights.len()];
            let nn = n as i128;
            let mut s0 = Q::from_i64(0);
            let mut s1 = Q::from_i64(0);
            let mut s1h = Q::from_i64(0);
            for nu in Nu::all(n) {
                let rel: Q = relative_dimension_weyl(rho, nu.value()).unwrap();
                s0 += rel.clone();
                s1 += conformal_weight::<Q>(rho, nu.value()).unwrap() * rel.clone();
                s1h += conformal_weight_hat::<Q>(rho, nu.value()).unwrap() * rel;
            }
            prop_assert_eq!(s0, Q::from_i128(2 * nn));
            prop_assert_eq!(s1, Q::from_i64(0));
            prop_assert_eq!(s1h, Q::from_i128(-2 * nn * nn - nn));
        }
    }
}
