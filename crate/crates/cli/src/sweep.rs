use std::collections::BTreeSet;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::Path;
use std::str::FromStr;

use qkbw::bound::{closed_form_bound, connection_laplacian_bound, derive_bound, hpn_first_eigenvalue, KappaSign};
use qkbw::bw::OperatorName;
use qkbw::rep::BundleLabel;
use qkbw::{Rational, Scalar};
use rayon::prelude::*;
use serde::Serialize;

use crate::output::{CliError, CliResult};

/// Inclusive integer range written `lo..hi`, `lo..=hi` or a single value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Span(pub RangeInclusive<i64>);

impl FromStr for Span {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let int = |t: &str| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| format!("bad range bound {t:?} in {s:?}"))
        };
        match s.split_once("..") {
            Some((lo, hi)) => Ok(Span(int(lo)?..=int(hi.strip_prefix('=').unwrap_or(hi))?)),
            None => int(s).map(|v| Span(v..=v)),
        }
    }
}

impl Span {
    fn contains(&self, v: i64) -> bool {
        self.0.contains(&v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Laplace,
    Connection,
    Hpn,
}

impl Mode {
    fn as_str(self) -> &'static str {
        match self {
            Mode::Laplace => "laplace",
            Mode::Connection => "connection",
            Mode::Hpn => "hpn",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Key {
    pub n: usize,
    pub k: u32,
    pub a: usize,
    pub b: usize,
    pub kappa_sign: KappaSign,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Row {
    #[serde(flatten)]
    pub key: Key,
    pub mode: Mode,
    /// LP bound coefficient; at `kappa = 2n` in hpn mode.
    pub lp: String,
    pub expected: String,
    #[serde(rename = "match")]
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub mode: Mode,
    pub mismatches: Vec<Key>,
    pub rows: Vec<Row>,
}

pub struct SweepSpec {
    pub n: Span,
    pub k: Option<Span>,
    pub a: Option<Span>,
    pub b: Option<Span>,
    pub signs: Vec<KappaSign>,
    pub mode: Mode,
}

fn keys(spec: &SweepSpec) -> Vec<Key> {
    let within = |s: &Option<Span>, v: i64| s.as_ref().is_none_or(|s| s.contains(v));
    let mut out = Vec::new();
    for n in spec.n.0.clone().filter(|&n| n >= 2) {
        let n = n as usize;
        for a in (0..=n).filter(|&a| within(&spec.a, a as i64)) {
            for b in (0..=a).filter(|&b| within(&spec.b, b as i64)) {
                if spec.mode == Mode::Connection && b != 0 {
                    continue;
                }
                let k_min = if spec.mode == Mode::Hpn { 2 } else { 0 };
                for k in (k_min..=(2 * n - a - b) as u32).filter(|&k| within(&spec.k, k as i64)) {
                    let signs: &[KappaSign] = if spec.mode == Mode::Hpn {
                        &[KappaSign::Positive]
                    } else {
                        &spec.signs
                    };
                    for &kappa_sign in signs {
                        out.push(Key { n, k, a, b, kappa_sign });
                    }
                }
            }
        }
    }
    out.sort();
    out
}

fn compute(key: Key, mode: Mode) -> CliResult<Row> {
    let Key { n, k, a, b, kappa_sign } = key;
    let bundle = BundleLabel::lambda_ab(k, a, b, n)?;
    let (operator, hpn) = match mode {
        Mode::Connection => (OperatorName::ConnectionLaplacian, false),
        Mode::Laplace => (OperatorName::HodgeLaplacian, false),
        Mode::Hpn => (OperatorName::HodgeLaplacian, true),
    };
    let cert = derive_bound::<Rational>(&bundle, operator, kappa_sign, hpn)?;
    let (lp, expected): (Rational, Rational) = match mode {
        Mode::Laplace => (cert.bound_c, closed_form_bound(k, a, b, n, kappa_sign)?),
        Mode::Connection => (cert.bound_c, connection_laplacian_bound(k, a, n, kappa_sign)?),
        Mode::Hpn => (
            cert.bound_c * Rational::from_i64(2 * n as i64),
            hpn_first_eigenvalue(k, a, b, n)?,
        ),
    };
    Ok(Row {
        key,
        mode,
        matches: lp == expected,
        lp: lp.canonical(),
        expected: expected.canonical(),
    })
}

pub fn run(spec: &SweepSpec) -> CliResult<SweepReport> {
    let rows: Vec<Row> = keys(spec)
        .into_par_iter()
        .map(|key| compute(key, spec.mode))
        .collect::<CliResult<_>>()?;
    let mismatches = rows.iter().filter(|r| !r.matches).map(|r| r.key).collect();
    Ok(SweepReport {
        mode: spec.mode,
        mismatches,
        rows,
    })
}

const HEADER: &str = "n,k,a,b,kappa_sign,mode,lp,expected,match";

fn csv_line(r: &Row) -> String {
    let Key { n, k, a, b, kappa_sign } = r.key;
    format!(
        "{n},{k},{a},{b},{},{},{},{},{}",
        kappa_sign.symbol(),
        r.mode.as_str(),
        r.lp,
        r.expected,
        r.matches
    )
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(HEADER) + "\n";
        for r in &self.rows {
            out += &(csv_line(r) + "\n");
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let expected = match self.mode {
            Mode::Hpn => "λ₁",
            _ => "closed form",
        };
        let mut out = format!(
            "{} cases, {} mismatches\n\n| n | k | a | b | κ | LP | {expected} | |\n|---|---|---|---|---|---|---|---|\n",
            self.rows.len(),
            self.mismatches.len()
        );
        for r in &self.rows {
            let Key { n, k, a, b, kappa_sign } = r.key;
            let typeset = |s: &str| {
                Rational::parse_canonical(s)
                    .map(|x| x.typeset())
                    .unwrap_or_else(|_| s.to_string())
            };
            out += &format!(
                "| {n} | {k} | {a} | {b} | {} | {} | {} | {} |\n",
                kappa_sign.symbol(),
                typeset(&r.lp),
                typeset(&r.expected),
                if r.matches { "ok" } else { "MISMATCH" }
            );
        }
        out
    }

    /// Append rows whose key is not yet in the ledger file.
    pub fn append_to_ledger(&self, path: &Path) -> CliResult<usize> {
        let io = |e: std::io::Error| CliError::invalid(format!("ledger {}: {e}", path.display()));
        let existing = if path.exists() {
            fs::read_to_string(path).map_err(io)?
        } else {
            String::new()
        };
        let seen: BTreeSet<String> = existing
            .lines()
            .skip(1)
            .map(|l| l.split(',').take(6).collect::<Vec<_>>().join(","))
            .collect();
        let mut file = OpenOptions::new().create(true).append(true).open(path).map_err(io)?;
        if existing.is_empty() {
            writeln!(file, "{HEADER}").map_err(io)?;
        }
        let mut added = 0;
        for r in &self.rows {
            let line = csv_line(r);
            let key: String = line.split(',').take(6).collect::<Vec<_>>().join(",");
            if !seen.contains(&key) {
                writeln!(file, "{line}").map_err(io)?;
                added += 1;
            }
        }
        Ok(added)
    }
}
