//! Self-test corpus: every invariant suite with instance counts.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bound::{
    closed_form_bound, derive_bound, harmonic_classification, kernel_analysis, twistor_kernel, FormType, KappaSign,
    KernelStatus, Verdict,
};
use crate::bw::{
    bochner_family, gradient_rank, identity_bochner1, identity_bochner2, identity_bw1, identity_bw2, identity_bw3,
    identity_bw4, identity_bw5, identity_bw6, independence_rank, rule_b_factor, simplify_curvature, valid_targets,
    CurvatureRule, OperatorName,
};
use crate::casimir::{
    casimir_eigenvalue, casimir_hat, closed_form_c2, closed_form_c2_lambda_ab, closed_form_c4_lambda_ab,
    relative_dimension_product, relative_dimension_weyl, table1, verify_recursion, PrefactorConvention,
};
use crate::linalg;
use crate::rep::{decompose_rho_tensor_e, dominant_weights, BundleLabel, SpnWeight};
use crate::scalar::Scalar;
use crate::Rational;
use num_traits::Zero;

type Q = Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelftestConfig {
    pub max_n: usize,
    pub convention: PrefactorConvention,
}

impl SelftestConfig {
    pub fn full() -> Self {
        SelftestConfig {
            max_n: 5,
            convention: PrefactorConvention::CALIBRATED,
        }
    }

    pub fn quick() -> Self {
        SelftestConfig {
            max_n: 3,
            ..Self::full()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub suite: String,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub max_n: usize,
    pub suites: Vec<SuiteResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!(
            "selftest (n <= {})\n\n| suite | checked | failed | status |\n|---|---|---|---|\n",
            self.max_n
        );
        for s in &self.suites {
            out += &format!(
                "| {} | {} | {} | {} |\n",
                s.suite,
                s.checked,
                s.failures.len(),
                if s.passed() { "PASS" } else { "FAIL" }
            );
        }
        for s in self.suites.iter().filter(|s| !s.passed()) {
            out += &format!("\n{} failures:\n", s.suite);
            for f in s.failures.iter().take(50) {
                out += &format!("- {f}\n");
            }
            if s.failures.len() > 50 {
                out += &format!("- ... {} more\n", s.failures.len() - 50);
            }
        }
        out
    }
}

impl fmt::Display for SelftestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_markdown())
    }
}

struct Suite {
    result: SuiteResult,
}

impl Suite {
    fn new(name: &str) -> Self {
        Suite {
            result: SuiteResult {
                suite: name.into(),
                checked: 0,
                failures: Vec::new(),
            },
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.result.checked += 1;
        if !ok {
            self.result.failures.push(what());
        }
    }

    fn error(&mut self, what: String) {
        self.result.checked += 1;
        self.result.failures.push(what);
    }
}

fn rho_corpus(max_n: usize) -> Vec<SpnWeight> {
    (2..=max_n).flat_map(|n| dominant_weights(n, 4)).collect()
}

fn ab_triples(max_n: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (2..=max_n).flat_map(|n| (0..=n).flat_map(move |a| (0..=a).map(move |b| (a, b, n))))
}

pub fn reldim_suite(cfg: &SelftestConfig) -> SuiteResult {
    let mut s = Suite::new("reldim");
    for rho in rho_corpus(cfg.max_n) {
        let table = match decompose_rho_tensor_e(&rho) {
            Ok(t) => t,
            Err(e) => {
                s.error(format!("rho=({rho}): {e}"));
                continue;
            }
        };
        let mut total = Q::from_i64(0);
        for (nu, _) in table.dominant_targets() {
            let oracle: Q = relative_dimension_weyl(&rho, nu.value()).expect("dominant target");
            total += oracle.clone();
            match relative_dimension_product::<Q>(&rho, nu.value(), cfg.convention) {
                Ok(v) => s.check(v == oracle, || {
                    format!(
                        "rho=({rho}), nu={}: product {} vs weyl {}",
                        nu.value(),
                        v.canonical(),
                        oracle.canonical()
                    )
                }),
                Err(e) => s.error(format!("rho=({rho}), nu={}: {e}", nu.value())),
            }
        }
        let two_n = Q::from_i64(2 * rho.rank() as i64);
        s.check(total == two_n, || {
            format!("rho=({rho}): sum of relative dimensions {}", total.canonical())
        });
    }
    s.result
}

pub fn casimir_suite(cfg: &SelftestConfig) -> SuiteResult {
    let mut s = Suite::new("casimir");
    for rho in rho_corpus(cfg.max_n) {
        let n = rho.rank() as i128;
        let c = |q| casimir_eigenvalue::<Q>(&rho, q).expect("casimir");
        let h = |q| casimir_hat::<Q>(&rho, q).expect("casimir");
        s.check(c(0) == Q::from_i128(2 * n), || format!("rho=({rho}): c0"));
        s.check(c(1) == Q::from_i128(0), || format!("rho=({rho}): c1"));
        s.check(h(1) == Q::from_i128(-2 * n * n - n), || format!("rho=({rho}): c_hat1"));
        s.check(c(2) == closed_form_c2::<Q>(&rho), || {
            format!("rho=({rho}): c2 closed form")
        });
        s.check(c(3) == Q::from_i128(n + 1) * c(2), || {
            format!("rho=({rho}): c3 = (n+1) c2")
        });
        match verify_recursion::<Q>(&rho, 6) {
            Ok(rep) => {
                s.result.checked += rep.checked;
                for (kind, q) in rep.failures {
                    s.result.failures.push(format!("rho=({rho}): {kind:?} at q={q}"));
                }
            }
            Err(e) => s.error(format!("rho=({rho}): {e}")),
        }
    }
    for (a, b, n) in ab_triples(cfg.max_n) {
        let rho = SpnWeight::lambda_ab(a, b, n).expect("shape");
        s.check(
            casimir_eigenvalue::<Q>(&rho, 2).ok() == closed_form_c2_lambda_ab(a, b, n).ok(),
            || format!("(a,b,n)=({a},{b},{n}): c2 polynomial"),
        );
        s.check(
            casimir_eigenvalue::<Q>(&rho, 4).ok() == closed_form_c4_lambda_ab(a, b, n).ok(),
            || format!("(a,b,n)=({a},{b},{n}): c4 polynomial"),
        );
    }
    s.result
}

pub fn table1_suite(cfg: &SelftestConfig) -> SuiteResult {
    let mut s = Suite::new("table1");
    for n in 3..=cfg.max_n + 1 {
        for a in 2..n {
            for b in 1..a {
                match table1::<Q>(a, b, n) {
                    Ok(t) => s.check(t.agrees_with_weyl(), || format!("(a,b,n)=({a},{b},{n})")),
                    Err(e) => s.error(format!("(a,b,n)=({a},{b},{n}): {e}")),
                }
            }
        }
    }
    s.result
}

pub fn rank_suite(cfg: &SelftestConfig) -> SuiteResult {
    let mut s = Suite::new("rank");
    let mut bundles = Vec::new();
    for n in 2..=cfg.max_n.min(4) {
        for rho in dominant_weights(n, 4) {
            bundles.extend((1..=4).map(|k| BundleLabel::new(k, rho.clone()).expect("bundle")));
        }
        bundles.extend((0..=n).map(|a| BundleLabel::lambda_ab(0, a, 0, n).expect("bundle")));
    }
    for b in bundles {
        let count = valid_targets::<Q>(&b).map(|t| t.len()).unwrap_or(0);
        match bochner_family::<Q>(&b) {
            Ok(fam) => {
                let full = independence_rank(&fam).unwrap_or(usize::MAX);
                let grad = gradient_rank(&fam).unwrap_or(usize::MAX);
                s.check(full == count / 2 && grad == count / 2, || {
                    format!("{b}: rank {full} (gradients {grad}), expected {}", count / 2)
                });
            }
            Err(e) => s.error(format!("{b}: {e}")),
        }
    }
    s.result
}

pub fn named_forms_suite(cfg: &SelftestConfig) -> SuiteResult {
    let mut s = Suite::new("named_forms");
    for (a, bb, n) in ab_triples(cfg.max_n) {
        for k in 0..=3u32 {
            let b = BundleLabel::lambda_ab(k, a, bb, n).expect("bundle");
            let nn = n as i128;
            let bw1 = identity_bw1::<Q>(&b).expect("bw1");
            let b1 = identity_bochner1::<Q>(&b, 1).expect("bochner1");
            s.check(b1.row(&[]) == bw1.scaled(&Q::from_i128(-2 * nn)).row(&[]), || {
                format!("{b}: bochner1(1) vs bw1")
            });
            let elim = simplify_curvature(&identity_bw2::<Q>(&b).expect("bw2"), CurvatureRule::B)
                .and_then(|bw2| bw2.plus(&-rule_b_factor::<Q>(&b)?, &bw1));
            match (elim, identity_bw6::<Q>(&b)) {
                (Ok(e), Ok(bw6)) => s.check(
                    e.is_pure() && bw6.row(&[]) == e.scaled(&Q::from_i64(4)).row(&[]),
                    || format!("{b}: bw6 vs rule-B elimination"),
                ),
                (e, f) => s.error(format!("{b}: {:?} {:?}", e.err(), f.err())),
            }
            if k == 0 {
                continue;
            }
            let bw3 = identity_bw3::<Q>(&b).expect("bw3");
            let bw4 = identity_bw4::<Q>(&b).expect("bw4");
            let bw5 = identity_bw5::<Q>(&b).expect("bw5");
            let q0 = identity_bochner2::<Q>(&b, 0).expect("bochner2");
            s.check(q0.row(&[]) == bw3.scaled(&Q::from_i64(2)).row(&[]), || {
                format!("{b}: bochner2(0) vs bw3")
            });
            let q1 = identity_bochner2::<Q>(&b, 1).expect("bochner2");
            let expect = bw4
                .plus(&Q::ratio(4 * nn * nn + 4 * nn + 1, 2), &bw3)
                .expect("same bundle");
            s.check(q1.row(&[]) == expect.row(&[]), || {
                format!("{b}: bochner2(1) vs bw4 + bw3")
            });
            let q2 = identity_bochner2::<Q>(&b, 2).expect("bochner2");
            let basis = vec![bw5.row(&[]), bw4.row(&[]), bw3.row(&[])];
            let independent = linalg::rank(&basis) == 3;
            let coeffs = linalg::span_coefficients(&basis, &q2.row(&[]));
            s.check(coeffs.is_some_and(|c| !independent || !c[0].is_zero()), || {
                format!("{b}: bochner2(2) outside span of bw5, bw4, bw3")
            });
        }
    }
    s.result
}

pub fn bounds_suite(cfg: &SelftestConfig) -> SuiteResult {
    let mut s = Suite::new("bounds");
    for (a, b, n) in ab_triples(cfg.max_n) {
        for k in 0..=(2 * n - a - b) as u32 {
            let bundle = BundleLabel::lambda_ab(k, a, b, n).expect("bundle");
            for sign in KappaSign::BOTH {
                match derive_bound::<Q>(&bundle, OperatorName::HodgeLaplacian, sign, false) {
                    Ok(c) => s.check(c.matched_closed_form.is_some() && c.recheck().is_ok(), || {
                        let expect = closed_form_bound::<Q>(k, a, b, n, sign).map(|x| x.canonical());
                        format!(
                            "{bundle} kappa {sign}: LP {} vs closed form {expect:?}",
                            c.bound_c.canonical()
                        )
                    }),
                    Err(e) => s.error(format!("{bundle} kappa {sign}: {e}")),
                }
            }
        }
    }
    s.result
}

pub fn hpn_suite(cfg: &SelftestConfig) -> SuiteResult {
    let mut s = Suite::new("hpn");
    for (a, b, n) in ab_triples(cfg.max_n.min(4)) {
        for k in 2..=(2 * n - a - b) as u32 {
            let bundle = BundleLabel::lambda_ab(k, a, b, n).expect("bundle");
            match derive_bound::<Q>(&bundle, OperatorName::HodgeLaplacian, KappaSign::Positive, true) {
                Ok(c) => s.check(c.matched_closed_form.as_deref() == Some("hpn_first_eigenvalue"), || {
                    format!("{bundle}: LP at kappa=2n gives {:?}", c.hpn_value)
                }),
                Err(e) => s.error(format!("{bundle}: {e}")),
            }
        }
    }
    s.result
}

pub fn kernel_suite(cfg: &SelftestConfig) -> SuiteResult {
    let mut s = Suite::new("kernel");
    for n in 2..=cfg.max_n {
        let kernel = twistor_kernel(n).expect("n >= 2");
        for k in 0..=6i64 {
            let bundle = BundleLabel::new(k + 1, SpnWeight::primitive(1, n).expect("shape")).expect("bundle");
            match kernel_analysis::<Q>(&bundle, &kernel) {
                Ok(ka) => s.check(
                    ka.status == KernelStatus::Determined
                        && matches!(ka.positive, Verdict::Vanishes { .. })
                        && matches!(ka.negative, Verdict::Vanishes { .. }),
                    || format!("{bundle}: {:?}", ka.status),
                ),
                Err(e) => s.error(format!("{bundle}: {e}")),
            }
        }
    }
    s.result
}

pub fn harmonic_suite(cfg: &SelftestConfig) -> SuiteResult {
    let mut s = Suite::new("harmonic");
    for n in 2..=cfg.max_n {
        for sign in KappaSign::BOTH {
            let mut expect: Vec<FormType> = (0..=n).map(|a| FormType { k: 0, a, b: a }).collect();
            if sign == KappaSign::Negative {
                for (a, b, _) in ab_triples(n).filter(|t| t.2 == n) {
                    expect.push(FormType {
                        k: (2 * n - a - b) as u32,
                        a,
                        b,
                    });
                }
            }
            expect.sort();
            expect.dedup();
            match harmonic_classification::<Q>(n, sign) {
                Ok(got) => s.check(got == expect, || format!("n={n} kappa {sign}: {got:?}")),
                Err(e) => s.error(format!("n={n}: {e}")),
            }
        }
    }
    s.result
}

pub fn selftest(cfg: &SelftestConfig) -> SelftestReport {
    let suites: [fn(&SelftestConfig) -> SuiteResult; 9] = [
        reldim_suite,
        casimir_suite,
        table1_suite,
        rank_suite,
        named_forms_suite,
        bounds_suite,
        hpn_suite,
        kernel_suite,
        harmonic_suite,
    ];
    SelftestReport {
        max_n: cfg.max_n,
        suites: suites.iter().map(|f| f(cfg)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_selftest_passes() {
        let rep = selftest(&SelftestConfig {
            max_n: 2,
            ..SelftestConfig::quick()
        });
        assert!(rep.passed(), "{}", rep.to_markdown());
        assert!(rep.suites.iter().all(|s| s.checked > 0 || s.suite == "table1"));
    }

    #[test]
    fn unit_shift_fails_reldim() {
        let cfg = SelftestConfig {
            max_n: 2,
            convention: PrefactorConvention::UnitShift,
        };
        let rep = reldim_suite(&cfg);
        assert!(!rep.passed());
        assert!(rep.failures[0].starts_with("rho=("));
    }
}
