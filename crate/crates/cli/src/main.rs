//! `qkbw`: relative dimensions, Casimir eigenvalues, Bochner-Weitzenböck
//! identities and eigenvalue bounds on quaternionic Kähler manifolds.

mod output;
mod sweep;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qkbw::bound::{
    derive_bound, harmonic_classification, hpn_first_eigenvalue, kernel_analysis, twistor_kernel, FormType, KappaSign,
    KernelAnalysis, Verdict,
};
use qkbw::bw::{
    self, bochner_family, identity_bw1, identity_bw2, identity_bw3, identity_bw4, identity_bw5, identity_bw6,
    identity_sum, independence_rank, pure_identities, target_key, BwIdentity, OperatorName,
};
use qkbw::casimir::{casimir_report, table1, PrefactorConvention};
use qkbw::checks::{selftest, SelftestConfig};
use qkbw::rep::{decompose_bundle, dim_cache_load_text, dim_cache_to_text, BundleLabel, SpnWeight, TargetKey};
use qkbw::{Rational, Scalar};
use serde::Serialize;

use output::{CliError, CliResult, Format, Rendered};
use sweep::{Mode, Span, SweepSpec};

type Q = Rational;

#[derive(Parser)]
#[command(
    name = "qkbw",
    version,
    about = "Exact Bochner-Weitzenböck identities and eigenvalue bounds for Sp(1)Sp(n)"
)]
struct Cli {
    #[arg(long, value_enum, global = true, default_value = "md")]
    format: Format,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Casimir eigenvalues c_q and c_hat_q on V_rho.
    Casimir {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rho: String,
        #[arg(long, default_value_t = 4)]
        q_max: u32,
    },
    /// Summands of S_{k,rho} ⊗ (H ⊗ E) with weights and relative dimensions.
    Decompose(BundleArgs),
    /// Conformal weights and relative dimensions on Λ^{a,b}_0(E).
    Table1 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
    },
    /// Bochner-Weitzenböck identities on a bundle.
    Bw {
        #[command(flatten)]
        bundle: BundleArgs,
        /// Only the pure-kappa identities left after the curvature rules.
        #[arg(long)]
        pure: bool,
        /// Use the rules valid on HP^n (with --pure).
        #[arg(long)]
        hpn: bool,
        /// Print each identity as LaTeX.
        #[arg(long)]
        emit_latex: bool,
    },
    /// Optimal eigenvalue lower bound with its certificate.
    Bound {
        #[command(flatten)]
        bundle: BundleArgs,
        #[arg(long, default_value = "hodge_laplacian")]
        operator: String,
        #[arg(long, value_enum, default_value = "both")]
        kappa_sign: SignArg,
        #[arg(long)]
        hpn: bool,
    },
    /// Squared norms of the gradients of sections in a common kernel.
    Vanish {
        #[arg(long)]
        n: usize,
        /// Degree of O(k): the bundle is S^{k+1}(H) ⊗ E.
        #[arg(long)]
        k: u32,
        /// Kernel gradients as `(N,nu)` pairs, e.g. "(1,2),(1,-1),(-1,-1)".
        #[arg(long)]
        kernel: Option<String>,
    },
    /// Form types whose Laplace bound is zero.
    Harmonic {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "both")]
        kappa_sign: SignArg,
    },
    /// First Laplace eigenvalue on HP^n against the bound from all identities.
    Hpn {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 0)]
        a: usize,
        #[arg(long, default_value_t = 0)]
        b: usize,
    },
    /// LP bounds against the closed forms over a grid.
    Sweep {
        #[arg(long)]
        n: Span,
        #[arg(long)]
        k: Option<Span>,
        #[arg(long)]
        a: Option<Span>,
        #[arg(long)]
        b: Option<Span>,
        #[arg(long, value_enum, default_value = "both")]
        kappa_sign: SignArg,
        /// Compare with the first eigenvalue on HP^n instead.
        #[arg(long)]
        hpn: bool,
        /// Sweep the connection Laplacian on Λ^a_0(E) instead.
        #[arg(long, conflicts_with = "hpn")]
        connection: bool,
        /// Append new rows to this CSV file.
        #[arg(long)]
        ledger: Option<PathBuf>,
    },
    /// Run every invariant suite.
    Selftest {
        /// Only n <= 3.
        #[arg(long)]
        quick: bool,
        #[arg(long, value_enum, default_value = "half", hide = true)]
        prefactor: PrefactorArg,
    },
}

#[derive(Args)]
struct BundleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    k: i64,
    /// Highest weight of V_rho, e.g. "2,1,0"; trailing zeros may be omitted.
    #[arg(long, conflicts_with_all = ["a", "b"])]
    rho: Option<String>,
    /// V_rho = Λ^{a,b}_0(E).
    #[arg(long)]
    a: Option<usize>,
    #[arg(long)]
    b: Option<usize>,
}

impl BundleArgs {
    fn label(&self) -> CliResult<BundleLabel> {
        let rho = match &self.rho {
            Some(text) => parse_rho(text, self.n)?,
            None => SpnWeight::lambda_ab(self.a.unwrap_or(0), self.b.unwrap_or(0), self.n)?,
        };
        Ok(BundleLabel::new(self.k, rho)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SignArg {
    #[value(name = "+", alias = "positive")]
    Plus,
    #[value(name = "-", alias = "negative")]
    Minus,
    Both,
}

impl SignArg {
    fn signs(self) -> Vec<KappaSign> {
        match self {
            SignArg::Plus => vec![KappaSign::Positive],
            SignArg::Minus => vec![KappaSign::Negative],
            SignArg::Both => KappaSign::BOTH.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PrefactorArg {
    Unit,
    Half,
}

fn parse_rho(text: &str, n: usize) -> CliResult<SpnWeight> {
    let plain: Result<Vec<i64>, _> = text.split(',').map(|t| t.trim().parse::<i64>()).collect();
    let mut entries = match plain {
        Ok(v) => v,
        Err(_) => text.parse::<SpnWeight>()?.entries().to_vec(),
    };
    if entries.len() > n {
        return Err(CliError::invalid(format!(
            "rho has {} entries but n = {n}",
            entries.len()
        )));
    }
    entries.resize(n, 0);
    Ok(SpnWeight::dominant(entries)?)
}

fn parse_kernel(text: &str, n: usize) -> CliResult<Vec<TargetKey>> {
    let ints: Vec<i64> = text
        .split(|c: char| !(c.is_ascii_digit() || c == '-'))
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<i64>()
                .map_err(|_| CliError::invalid(format!("bad kernel entry {t:?}")))
        })
        .collect::<CliResult<_>>()?;
    if !ints.len().is_multiple_of(2) {
        return Err(CliError::invalid("kernel needs (N,nu) pairs"));
    }
    ints.chunks(2).map(|p| Ok(target_key(p[0], p[1], n)?)).collect()
}

fn casimir(n: usize, rho: &str, q_max: u32) -> CliResult<Rendered> {
    let report = casimir_report::<Q>(&parse_rho(rho, n)?, q_max)?;
    let mut csv = String::from("q,c,c_hat\n");
    for v in &report.values {
        csv += &format!("{},{},{}\n", v.q, v.c.canonical(), v.c_hat.canonical());
    }
    Rendered::new(&report, report.to_markdown(), Some(csv))
}

fn decompose(args: &BundleArgs) -> CliResult<Rendered> {
    let table = decompose_bundle::<Q>(&args.label()?)?;
    let mut md = format!("{}: {} summands\n\n", table.bundle, table.summand_count);
    if let Some(w) = &table.parity_warning {
        md += &format!("warning: {w}\n\n");
    }
    md += "| (N,nu) | k+N | rho+mu_nu | valid | w | W | relative dimension |\n|---|---|---|---|---|---|---|\n";
    let mut csv = String::from("N,nu,target_k,target_rho,valid,w,W,reldim\n");
    for t in &table.targets {
        let rho = format!("({})", t.target_rho);
        md += &format!(
            "| {} | {} | {} | {} | {} | {} | {} |\n",
            t.key,
            t.target_k,
            rho,
            t.valid,
            t.w.typeset(),
            t.big_w.typeset(),
            t.reldim.typeset()
        );
        csv += &format!(
            "{},{},{},\"{}\",{},{},{},{}\n",
            t.key.step.value(),
            t.key.nu.value(),
            t.target_k,
            rho,
            t.valid,
            t.w.canonical(),
            t.big_w.canonical(),
            t.reldim.canonical()
        );
    }
    Rendered::new(&table, md, Some(csv))
}

fn table1_verb(n: usize, a: usize, b: usize) -> CliResult<Rendered> {
    let report = table1::<Q>(a, b, n)?;
    let mut csv = String::from("row,nu,w,reldim\n");
    for r in &report.rows {
        let nu = r.nu.map_or("-".to_string(), |v| v.to_string());
        csv += &format!("{},{},{},{}\n", r.row, nu, r.w.canonical(), r.reldim.canonical());
    }
    Rendered::new(&report, report.to_markdown(), Some(csv))
}

fn all_identities(bundle: &BundleLabel) -> CliResult<Vec<BwIdentity<Q>>> {
    let mut ids = vec![identity_sum(bundle)?, identity_bw1(bundle)?, identity_bw2(bundle)?];
    if bundle.k != 0 {
        ids.extend([identity_bw3(bundle)?, identity_bw4(bundle)?, identity_bw5(bundle)?]);
    }
    if bundle.rho.as_lambda_ab().is_some() {
        ids.push(identity_bw6(bundle)?);
    }
    ids.extend(bochner_family(bundle)?);
    Ok(ids)
}

#[derive(Serialize)]
struct IdentityList {
    bundle: BundleLabel,
    summand_count: usize,
    independence_rank: usize,
    identities: Vec<BwIdentity<Q>>,
}

fn bw_verb(args: &BundleArgs, pure: bool, hpn: bool, latex: bool) -> CliResult<Rendered> {
    let bundle = args.label()?;
    let identities = if pure {
        pure_identities(&bundle, hpn)?
    } else {
        all_identities(&bundle)?
    };
    let summand_count = decompose_bundle::<Q>(&bundle)?.summand_count;
    let list = IdentityList {
        independence_rank: if identities.is_empty() {
            0
        } else {
            independence_rank(&identities)?
        },
        bundle,
        summand_count,
        identities,
    };
    let md = if latex {
        list.identities
            .iter()
            .map(|i| format!("% {}\n{}\n", i.provenance, i.to_latex()))
            .collect()
    } else {
        let mut md = format!(
            "{}: {} summands, {} identities of rank {}\n\n",
            list.bundle,
            list.summand_count,
            list.identities.len(),
            list.independence_rank
        );
        for i in &list.identities {
            md += &format!("- {}: ${}$\n", i.provenance, i.to_latex());
        }
        md
    };
    let csv = if list.identities.is_empty() {
        None
    } else {
        Some(bw::identities_to_csv(&list.identities)?)
    };
    Rendered::new(&list, md, csv)
}

fn bound_verb(args: &BundleArgs, operator: &str, signs: &[KappaSign], hpn: bool) -> CliResult<Rendered> {
    let bundle = args.label()?;
    let operator: OperatorName = operator.parse()?;
    let certs = signs
        .iter()
        .map(|&s| derive_bound::<Q>(&bundle, operator, s, hpn))
        .collect::<Result<Vec<_>, _>>()?;
    let md = certs.iter().map(|c| c.to_markdown()).collect::<Vec<_>>().join("\n");
    let mut csv = String::from("bundle,operator,kappa_sign,hpn,bound_c,matched_closed_form\n");
    for c in &certs {
        csv += &format!(
            "\"{}\",{},{},{},{},{}\n",
            c.bundle,
            c.operator,
            c.kappa_sign.symbol(),
            c.hpn,
            c.bound_c.canonical(),
            c.matched_closed_form.as_deref().unwrap_or("")
        );
    }
    if let [one] = certs.as_slice() {
        Rendered::new(one, md, Some(csv))
    } else {
        Rendered::new(&certs, md, Some(csv))
    }
}

fn verdict_text(v: &Verdict) -> String {
    match v {
        Verdict::Vanishes { witness } => format!("vanishes (witness {witness})"),
        Verdict::Undetermined => "undetermined".into(),
    }
}

fn vanish_verb(n: usize, k: u32, kernel: Option<&str>) -> CliResult<Rendered> {
    let bundle = BundleLabel::new(k as i64 + 1, SpnWeight::primitive(1, n)?)?;
    let kernel = match kernel {
        Some(text) => parse_kernel(text, n)?,
        None => twistor_kernel(n)?,
    };
    let ka: KernelAnalysis<Q> = kernel_analysis(&bundle, &kernel)?;
    let kernel_text: Vec<String> = ka.kernel_set.iter().map(|t| t.to_string()).collect();
    let mut md = format!(
        "{} with kernel {}: {:?}\n\n",
        ka.bundle,
        kernel_text.join(", "),
        ka.status
    );
    let mut csv = String::from("N,nu,ratio\n");
    for r in &ka.solved_ratios {
        md += &format!("- ‖D_{}φ‖² = {} κ‖φ‖²\n", r.target, r.ratio.typeset());
        csv += &format!(
            "{},{},{}\n",
            r.target.step.value(),
            r.target.nu.value(),
            r.ratio.canonical()
        );
    }
    md += &format!(
        "\nκ > 0: {}\nκ < 0: {}\n",
        verdict_text(&ka.positive),
        verdict_text(&ka.negative)
    );
    Rendered::new(&ka, md, Some(csv))
}

#[derive(Serialize)]
struct HarmonicReport {
    n: usize,
    kappa_sign: KappaSign,
    forms: Vec<FormType>,
}

fn harmonic_verb(n: usize, signs: &[KappaSign]) -> CliResult<Rendered> {
    let reports = signs
        .iter()
        .map(|&s| {
            Ok(HarmonicReport {
                n,
                kappa_sign: s,
                forms: harmonic_classification::<Q>(n, s)?,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut md = String::new();
    let mut csv = String::from("n,kappa_sign,k,a,b\n");
    for r in &reports {
        let forms: Vec<String> = r.forms.iter().map(|f| format!("({},{},{})", f.k, f.a, f.b)).collect();
        md += &format!(
            "n = {}, κ {}: {} types (k,a,b): {}\n",
            n,
            r.kappa_sign.symbol(),
            r.forms.len(),
            forms.join(" ")
        );
        for f in &r.forms {
            csv += &format!("{n},{},{},{},{}\n", r.kappa_sign.symbol(), f.k, f.a, f.b);
        }
    }
    if let [one] = reports.as_slice() {
        Rendered::new(one, md, Some(csv))
    } else {
        Rendered::new(&reports, md, Some(csv))
    }
}

#[derive(Serialize)]
struct HpnReport {
    bundle: BundleLabel,
    lambda1: String,
    lp_value: String,
    #[serde(rename = "match")]
    matches: bool,
    certificate: qkbw::Certificate,
}

fn hpn_verb(n: usize, k: u32, a: usize, b: usize) -> CliResult<Rendered> {
    let bundle = BundleLabel::lambda_ab(k, a, b, n)?;
    let lambda1: Q = hpn_first_eigenvalue(k, a, b, n)?;
    let cert = derive_bound::<Q>(&bundle, OperatorName::HodgeLaplacian, KappaSign::Positive, true)?;
    let lp = cert.bound_c.clone() * Q::from_i64(2 * n as i64);
    let md = format!(
        "{bundle} on HP^n (κ = 2n): λ₁ = {}, bound = {} ({})\n",
        lambda1.typeset(),
        lp.typeset(),
        if lp == lambda1 { "sharp" } else { "not sharp" }
    );
    let csv = format!(
        "n,k,a,b,lambda1,lp\n{n},{k},{a},{b},{},{}\n",
        lambda1.canonical(),
        lp.canonical()
    );
    let report = HpnReport {
        bundle,
        matches: lp == lambda1,
        lambda1: lambda1.canonical(),
        lp_value: lp.canonical(),
        certificate: cert,
    };
    Rendered::new(&report, md, Some(csv))
}

fn dispatch(cli: &Cli) -> CliResult<(String, Option<CliError>)> {
    let f = cli.format;
    let done = |r: CliResult<Rendered>, verb: &str| r?.select(f, verb).map(|s| (s, None));
    match &cli.verb {
        Verb::Casimir { n, rho, q_max } => done(casimir(*n, rho, *q_max), "casimir"),
        Verb::Decompose(args) => done(decompose(args), "decompose"),
        Verb::Table1 { n, a, b } => done(table1_verb(*n, *a, *b), "table1"),
        Verb::Bw {
            bundle,
            pure,
            hpn,
            emit_latex,
        } => done(bw_verb(bundle, *pure, *hpn, *emit_latex), "bw"),
        Verb::Bound {
            bundle,
            operator,
            kappa_sign,
            hpn,
        } => done(bound_verb(bundle, operator, &kappa_sign.signs(), *hpn), "bound"),
        Verb::Vanish { n, k, kernel } => done(vanish_verb(*n, *k, kernel.as_deref()), "vanish"),
        Verb::Harmonic { n, kappa_sign } => done(harmonic_verb(*n, &kappa_sign.signs()), "harmonic"),
        Verb::Hpn { n, k, a, b } => done(hpn_verb(*n, *k, *a, *b), "hpn"),
        Verb::Sweep {
            n,
            k,
            a,
            b,
            kappa_sign,
            hpn,
            connection,
            ledger,
        } => {
            let mode = match (hpn, connection) {
                (true, _) => Mode::Hpn,
                (_, true) => Mode::Connection,
                _ => Mode::Laplace,
            };
            let spec = SweepSpec {
                n: n.clone(),
                k: k.clone(),
                a: a.clone(),
                b: b.clone(),
                signs: kappa_sign.signs(),
                mode,
            };
            let report = sweep::run(&spec)?;
            if let Some(path) = ledger {
                report.append_to_ledger(path)?;
            }
            let failure = (!report.mismatches.is_empty())
                .then(|| CliError::internal(format!("{} mismatches", report.mismatches.len())));
            let rendered = Rendered::new(&report, report.to_markdown(), Some(report.to_csv()))?;
            Ok((rendered.select(f, "sweep")?, failure))
        }
        Verb::Selftest { quick, prefactor } => {
            let mut cfg = if *quick {
                SelftestConfig::quick()
            } else {
                SelftestConfig::full()
            };
            if *prefactor == PrefactorArg::Unit {
                cfg.convention = PrefactorConvention::UnitShift;
            }
            let report = selftest(&cfg);
            let failure = (!report.passed()).then(|| CliError::internal("selftest failed"));
            let rendered = Rendered::new(&report, report.to_markdown(), None)?;
            Ok((rendered.select(f, "selftest")?, failure))
        }
    }
}

fn cache_file() -> Option<PathBuf> {
    std::env::var_os("QKBW_CACHE_DIR").map(|d| PathBuf::from(d).join("weyl_dim.txt"))
}

fn load_cache() {
    if let Some(text) = cache_file().and_then(|p| fs::read_to_string(p).ok()) {
        let (_, rejected) = dim_cache_load_text(&text);
        if rejected > 0 {
            eprintln!("warning: ignored {rejected} invalid dimension cache entries");
        }
    }
}

fn save_cache() {
    let Some(path) = cache_file() else { return };
    let write = || -> std::io::Result<()> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, dim_cache_to_text())?;
        fs::rename(tmp, &path)
    };
    if let Err(e) = write() {
        eprintln!("warning: could not write dimension cache {}: {e}", path.display());
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    load_cache();
    let outcome = dispatch(&cli);
    save_cache();
    match outcome {
        Ok((text, failure)) => {
            print!("{text}");
            match failure {
                Some(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
