//! Weights of Sp(n) and Sp(1), the Weyl dimension formula, and the
//! decompositions of `V_rho ⊗ E` and `V_{k,rho} ⊗ (H ⊗ E)`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::casimir::GradientTarget;
use crate::error::{ParseError, RepError};
use crate::scalar::Scalar;

/// Smallest supported rank. Quaternionic Kähler manifolds of real dimension 4
/// behave differently and are excluded.
pub const MIN_RANK: usize = 2;

/// An integral weight `(rho^1, ..., rho^n)` of Sp(n), not necessarily dominant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SpnWeight {
    entries: Vec<i64>,
}

impl SpnWeight {
    pub fn new(entries: Vec<i64>) -> Result<Self, RepError> {
        if entries.len() < MIN_RANK {
            return Err(RepError::RankTooSmall(entries.len()));
        }
        Ok(SpnWeight { entries })
    }

    /// New weight that must be dominant integral.
    pub fn dominant(entries: Vec<i64>) -> Result<Self, RepError> {
        let w = Self::new(entries)?;
        if !w.is_dominant() {
            return Err(RepError::NotDominant(w.entries));
        }
        Ok(w)
    }

    pub fn zero(n: usize) -> Result<Self, RepError> {
        Self::new(vec![0; n])
    }

    /// `(2_b, 1_{a-b}, 0_{n-a})`, the highest weight of `Λ^{a,b}_0(E)`.
    pub fn lambda_ab(a: usize, b: usize, n: usize) -> Result<Self, RepError> {
        if b > a || a > n {
            return Err(RepError::Range(format!(
                "need 0 <= b <= a <= n, got a={a}, b={b}, n={n}"
            )));
        }
        let mut entries = vec![0; n];
        for (i, e) in entries.iter_mut().enumerate().take(a) {
            *e = if i < b { 2 } else { 1 };
        }
        Self::new(entries)
    }

    /// `(1_a, 0_{n-a})`, the highest weight of the primitive forms `Λ^a_0(E)`.
    pub fn primitive(a: usize, n: usize) -> Result<Self, RepError> {
        Self::lambda_ab(a, 0, n)
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn total(&self) -> i64 {
        self.entries.iter().sum()
    }

    /// Dominant integral: non-increasing with non-negative last entry.
    pub fn is_dominant(&self) -> bool {
        self.entries.windows(2).all(|w| w[0] >= w[1]) && self.entries.last().is_some_and(|&last| last >= 0)
    }

    /// `Some((a, b))` when the weight is `(2_b, 1_{a-b}, 0_{n-a})`.
    pub fn as_lambda_ab(&self) -> Option<(usize, usize)> {
        if !self.is_dominant() || self.entries.iter().any(|&e| e > 2) {
            return None;
        }
        let a = self.entries.iter().filter(|&&e| e >= 1).count();
        let b = self.entries.iter().filter(|&&e| e == 2).count();
        Some((a, b))
    }

    /// `Some(a)` when the weight is `(1_a, 0_{n-a})`.
    pub fn as_primitive(&self) -> Option<usize> {
        match self.as_lambda_ab() {
            Some((a, 0)) => Some(a),
            _ => None,
        }
    }
}

impl TryFrom<String> for SpnWeight {
    type Error = RepError;
    fn try_from(text: String) -> Result<Self, RepError> {
        text.parse()
    }
}

impl From<SpnWeight> for String {
    fn from(w: SpnWeight) -> String {
        w.to_string()
    }
}

impl fmt::Display for SpnWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|e| e.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Accepts `2,1,0` or the run-length shorthand `2^1 1^2 @ 4`
/// (equivalently `2^1 1^(2) @ 4` or `2_1 1_2 @ 4`), padded with zeros to `n`.
impl FromStr for SpnWeight {
    type Err = RepError;

    fn from_str(text: &str) -> Result<Self, RepError> {
        let bad = || RepError::Parse(ParseError::Weight(text.to_string()));
        let text = text.trim();
        if let Some((runs, rank)) = text.split_once('@') {
            let n: usize = rank.trim().parse().map_err(|_| bad())?;
            let mut entries = Vec::new();
            for run in runs.split_whitespace() {
                let (value, count) = run.split_once(['^', '_']).ok_or_else(bad)?;
                let value: i64 = value.parse().map_err(|_| bad())?;
                let count = count.trim_start_matches('(').trim_end_matches(')');
                let count: usize = count.parse().map_err(|_| bad())?;
                entries.extend(std::iter::repeat_n(value, count));
            }
            if entries.len() > n {
                return Err(bad());
            }
            entries.resize(n, 0);
            return SpnWeight::new(entries);
        }
        let entries = text
            .split(',')
            .map(|t| t.trim().parse::<i64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        SpnWeight::new(entries)
    }
}

/// Signed index `nu ∈ {±1, ..., ±n}` labelling the summand `V_{rho + mu_nu}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Nu(i64);

impl Nu {
    pub fn new(value: i64, n: usize) -> Result<Self, RepError> {
        if value == 0 || value.unsigned_abs() as usize > n {
            return Err(RepError::IndexOutOfRange { index: value, n });
        }
        Ok(Nu(value))
    }

    pub fn value(self) -> i64 {
        self.0
    }

    /// Zero-based coordinate touched by `mu_nu`.
    pub fn slot(self) -> usize {
        (self.0.unsigned_abs() - 1) as usize
    }

    pub fn is_raising(self) -> bool {
        self.0 > 0
    }

    /// `1, ..., n, -1, ..., -n`.
    pub fn all(n: usize) -> impl Iterator<Item = Nu> {
        let n = n as i64;
        (1..=n).chain((1..=n).map(|i| -i)).map(Nu)
    }
}

impl fmt::Display for Nu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Sp(1) direction `N = ±1` in `V_k ⊗ H = V_{k+1} ⊕ V_{k-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub enum Step {
    Up,
    Down,
}

impl Step {
    pub const BOTH: [Step; 2] = [Step::Up, Step::Down];

    pub fn value(self) -> i64 {
        match self {
            Step::Up => 1,
            Step::Down => -1,
        }
    }
}

impl TryFrom<i64> for Step {
    type Error = RepError;
    fn try_from(v: i64) -> Result<Self, RepError> {
        match v {
            1 => Ok(Step::Up),
            -1 => Ok(Step::Down),
            other => Err(RepError::IndexOutOfRange { index: other, n: 1 }),
        }
    }
}

impl From<Step> for i64 {
    fn from(s: Step) -> i64 {
        s.value()
    }
}

/// `(N, nu)`: one summand `V_{k+N, rho+mu_nu}` of `V_{k,rho} ⊗ (H ⊗ E)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TargetKey {
    #[serde(rename = "N")]
    pub step: Step,
    pub nu: Nu,
}

impl fmt::Display for TargetKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.step.value(), self.nu)
    }
}

/// Result of shifting a weight by `mu_nu`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftedWeight {
    pub weight: SpnWeight,
    pub dominant: bool,
}

pub fn is_dominant(rho: &SpnWeight) -> bool {
    rho.is_dominant()
}

/// `rho + mu_nu`, flagged with its dominance.
pub fn mu_shift(rho: &SpnWeight, nu: i64) -> Result<ShiftedWeight, RepError> {
    let nu = Nu::new(nu, rho.rank())?;
    Ok(shift_by(rho, nu))
}

pub(crate) fn shift_by(rho: &SpnWeight, nu: Nu) -> ShiftedWeight {
    let mut entries = rho.entries.clone();
    entries[nu.slot()] += if nu.is_raising() { 1 } else { -1 };
    let weight = SpnWeight { entries };
    let dominant = weight.is_dominant();
    ShiftedWeight { weight, dominant }
}

fn dim_cache() -> &'static RwLock<HashMap<Vec<i64>, u128>> {
    static CACHE: OnceLock<RwLock<HashMap<Vec<i64>, u128>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Weyl dimension of `V_rho`.
///
/// With `l_i = rho^i + n - i + 1` and `m_i = n - i + 1`:
/// `dim = prod_i l_i/m_i * prod_{i<j} (l_i^2 - l_j^2)/(m_i^2 - m_j^2)`.
/// Results are memoized process-wide; the key determines the value, so
/// concurrent writers can only insert identical entries.
pub fn weyl_dim_spn(rho: &SpnWeight) -> Result<u128, RepError> {
    if !rho.is_dominant() {
        return Err(RepError::NotDominant(rho.entries.clone()));
    }
    if let Some(&d) = dim_cache().read().expect("dim cache poisoned").get(&rho.entries) {
        return Ok(d);
    }
    let n = rho.rank() as i64;
    let l: Vec<BigInt> = (0..n).map(|i| BigInt::from(rho.entries[i as usize] + n - i)).collect();
    let m: Vec<BigInt> = (0..n).map(|i| BigInt::from(n - i)).collect();
    let mut num = BigInt::from(1);
    let mut den = BigInt::from(1);
    for i in 0..n as usize {
        num *= &l[i];
        den *= &m[i];
        for j in i + 1..n as usize {
            num *= &l[i] * &l[i] - &l[j] * &l[j];
            den *= &m[i] * &m[i] - &m[j] * &m[j];
        }
    }
    let (q, r) = num.div_rem(&den);
    debug_assert!(r.is_zero(), "Weyl formula must give an integer");
    let d = q.to_u128().ok_or(RepError::DimensionOverflow)?;
    dim_cache()
        .write()
        .expect("dim cache poisoned")
        .insert(rho.entries.clone(), d);
    Ok(d)
}

/// Every memoized `(rho, dim)` pair, sorted by weight.
pub fn dim_cache_entries() -> Vec<(SpnWeight, u128)> {
    let mut out: Vec<_> = dim_cache()
        .read()
        .expect("dim cache poisoned")
        .iter()
        .map(|(k, &v)| (SpnWeight { entries: k.clone() }, v))
        .collect();
    out.sort();
    out
}

/// Serialize the cache as `n;rho;dim` lines.
pub fn dim_cache_to_text() -> String {
    dim_cache_entries()
        .into_iter()
        .map(|(w, d)| format!("{};{};{}\n", w.rank(), w, d))
        .collect()
}

/// Load `n;rho;dim` lines. Each entry is re-derived and must agree with the
/// stored dimension; disagreeing or malformed lines are skipped and counted.
pub fn dim_cache_load_text(text: &str) -> (usize, usize) {
    let mut loaded = 0;
    let mut rejected = 0;
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let fields: Vec<&str> = line.split(';').collect();
        let parsed = (|| {
            if fields.len() != 3 {
                return None;
            }
            let n: usize = fields[0].trim().parse().ok()?;
            let rho: SpnWeight = fields[1].parse().ok()?;
            let dim: u128 = fields[2].trim().parse().ok()?;
            (rho.rank() == n).then_some((rho, dim))
        })();
        match parsed {
            Some((rho, dim)) if weyl_dim_spn(&rho).ok() == Some(dim) => loaded += 1,
            _ => rejected += 1,
        }
    }
    (loaded, rejected)
}

/// Candidates `rho + mu_nu` of `V_rho ⊗ E`, all `2n` of them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NuLevelTable {
    pub rho: SpnWeight,
    pub candidates: Vec<(Nu, ShiftedWeight)>,
    /// Number of dominant candidates.
    pub summand_count: usize,
}

impl NuLevelTable {
    pub fn dominant_targets(&self) -> impl Iterator<Item = (Nu, &SpnWeight)> {
        self.candidates
            .iter()
            .filter(|(_, s)| s.dominant)
            .map(|(nu, s)| (*nu, &s.weight))
    }

    /// The summand count is odd exactly when the last entry of rho vanishes.
    pub fn parity_consistent(&self) -> bool {
        let last_zero = self.rho.entries.last() == Some(&0);
        (self.summand_count % 2 == 1) == last_zero
    }
}

pub fn decompose_rho_tensor_e(rho: &SpnWeight) -> Result<NuLevelTable, RepError> {
    if !rho.is_dominant() {
        return Err(RepError::NotDominant(rho.entries.clone()));
    }
    let candidates: Vec<_> = Nu::all(rho.rank()).map(|nu| (nu, shift_by(rho, nu))).collect();
    let summand_count = candidates.iter().filter(|(_, s)| s.dominant).count();
    let table = NuLevelTable {
        rho: rho.clone(),
        candidates,
        summand_count,
    };
    debug_assert!(table.parity_consistent());
    Ok(table)
}

/// `k + Σ rho^i` odd: the module does not descend to Sp(1)Sp(n).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityWarning {
    pub k: u32,
    pub weight_total: i64,
}

impl fmt::Display for ParityWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "k + sum(rho) = {} is odd: V_(k,rho) is a Sp(1)xSp(n)-module only",
            self.k as i64 + self.weight_total
        )
    }
}

/// `(k, rho)` labelling the irreducible bundle `S_{k,rho} = S^k(H) ⊗ V_rho`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BundleLabel {
    pub k: u32,
    pub rho: SpnWeight,
}

impl BundleLabel {
    pub fn new(k: i64, rho: SpnWeight) -> Result<Self, RepError> {
        if k < 0 {
            return Err(RepError::NegativeSp1Weight(k));
        }
        if !rho.is_dominant() {
            return Err(RepError::NotDominant(rho.entries));
        }
        Ok(BundleLabel { k: k as u32, rho })
    }

    /// `S^k(H) ⊗ Λ^{a,b}_0(E)`.
    pub fn lambda_ab(k: u32, a: usize, b: usize, n: usize) -> Result<Self, RepError> {
        Self::new(k as i64, SpnWeight::lambda_ab(a, b, n)?)
    }

    pub fn rank(&self) -> usize {
        self.rho.rank()
    }

    pub fn parity_warning(&self) -> Option<ParityWarning> {
        let weight_total = self.rho.total();
        ((self.k as i64 + weight_total) % 2 != 0).then_some(ParityWarning {
            k: self.k,
            weight_total,
        })
    }
}

impl fmt::Display for BundleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(k={}, rho=({}))", self.k, self.rho)
    }
}

/// All `4n` candidates `(N, nu)` of `V_{k,rho} ⊗ (H ⊗ E)` with their data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DecompositionTable<S: Scalar> {
    pub bundle: BundleLabel,
    pub targets: Vec<GradientTarget<S>>,
    /// Number of valid targets (non-zero gradients).
    pub summand_count: usize,
    pub parity_warning: Option<ParityWarning>,
}

impl<S: Scalar> DecompositionTable<S> {
    pub fn valid_targets(&self) -> impl Iterator<Item = &GradientTarget<S>> {
        self.targets.iter().filter(|t| t.valid)
    }
}

pub fn decompose_bundle<S: Scalar>(bundle: &BundleLabel) -> Result<DecompositionTable<S>, RepError> {
    let mut targets = Vec::with_capacity(4 * bundle.rank());
    for step in Step::BOTH {
        for nu in Nu::all(bundle.rank()) {
            targets.push(GradientTarget::new(bundle, step, nu)?);
        }
    }
    let summand_count = targets.iter().filter(|t| t.valid).count();
    Ok(DecompositionTable {
        bundle: bundle.clone(),
        targets,
        summand_count,
        parity_warning: bundle.parity_warning(),
    })
}

/// `S(M) = ⊕_{k=0}^n S_{k,(1_{n-k})}`.
pub fn spinor_decomposition(n: usize) -> Result<Vec<BundleLabel>, RepError> {
    if n < MIN_RANK {
        return Err(RepError::RankTooSmall(n));
    }
    (0..=n)
        .map(|k| BundleLabel::new(k as i64, SpnWeight::primitive(n - k, n)?))
        .collect()
}

/// `Λ^2(M) = S_{2,0} ⊕ S_{2,(1,1)} ⊕ S_{0,(2)}`.
pub fn lambda2_decomposition(n: usize) -> Result<Vec<BundleLabel>, RepError> {
    if n < MIN_RANK {
        return Err(RepError::RankTooSmall(n));
    }
    Ok(vec![
        BundleLabel::new(2, SpnWeight::zero(n)?)?,
        BundleLabel::new(2, SpnWeight::primitive(2, n)?)?,
        BundleLabel::new(0, SpnWeight::lambda_ab(1, 1, n)?)?,
    ])
}

/// All dominant weights of rank `n` with entry sum at most `max_total`.
pub fn dominant_weights(n: usize, max_total: i64) -> Vec<SpnWeight> {
    fn go(prefix: &mut Vec<i64>, n: usize, remaining: i64, cap: i64, out: &mut Vec<SpnWeight>) {
        if prefix.len() == n {
            out.push(SpnWeight {
                entries: prefix.clone(),
            });
            return;
        }
        for v in (0..=remaining.min(cap)).rev() {
            prefix.push(v);
            go(prefix, n, remaining - v, v, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), n, max_total, max_total, &mut out);
    out
}
