//! Command-line surface: supersingular polynomials, Hecke traces, divisor
//! polynomials, verification checks, and the congruence scanner.
//!
//! Exit codes: 0 success, 2 invalid input, 3 verification failure or
//! method disagreement, 4 observed S~ multiplicity below the guarantee.

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use ssl_forms::cache::{ensure_table, CacheStats, CACHE_DIR_ENV};
use ssl_forms::divisor_poly::{divisor_polynomial, weight_profile};
use ssl_forms::finite_field::PrimeModulus;
use ssl_forms::output::{OutputDocument, PolynomialOut};
use ssl_forms::supersingular::{
    supersingular_deligne, supersingular_oracle, SupersingularLocus,
};
use ssl_forms::trace_formula::{
    dim_cusp_forms, eichler_selberg_trace, modified_trace_form, trace_form, HurwitzTable,
    TraceMode, TraceValue,
};
use ssl_forms::verification::{
    guaranteed_multiplicity, s_tilde_multiplicity, scan_congruences, sturm_bound,
    verify_divisor_factorization, verify_hat_scaling, verify_recurrence_shift,
    verify_trace_congruences, CongruenceCase, FactorizationKind, VerificationReport,
};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

const EXIT_INVALID: u8 = 2;
const EXIT_VERIFY_FAILED: u8 = 3;
const EXIT_MULTIPLICITY: u8 = 4;

#[derive(Parser)]
#[command(
    name = "ssl-forms",
    version,
    about = "Supersingular polynomials from Hecke trace forms, with built-in verification"
)]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Directory for the Hurwitz table cache (default .ssl-forms-cache,
    /// overridable with SSL_FORMS_CACHE_DIR)
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Compute tables in memory, never touching the cache
    #[arg(long, global = true)]
    no_cache: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Method {
    Oracle,
    Deligne,
    Both,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FormArg {
    Traceform,
    Hatform,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum CaseArg {
    I,
    Ii,
    Iii,
}

#[derive(Subcommand)]
enum Command {
    /// Supersingular polynomials S_p and S~_p
    Ssp {
        #[arg(long)]
        p: u64,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
    },
    /// One Hecke trace Tr_k(n), exact or mod p
    Trace {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        n: u64,
        /// Reduce mod this prime
        #[arg(long = "mod")]
        modulus: Option<u64>,
        /// Exact arbitrary-precision value
        #[arg(long)]
        exact: bool,
    },
    /// Divisor polynomial of a trace form or modified trace form
    Divpoly {
        #[arg(long, value_enum)]
        form: FormArg,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        p: u64,
    },
    /// Run a built-in verification check by id
    Verify {
        /// Check id: 2.1, 2.2, 2.4, 4.1, 4.2, 4.3
        #[arg(long)]
        theorem: String,
        #[arg(long)]
        p: u64,
        /// Case selector for check 2.1
        #[arg(long, value_enum)]
        case: Option<CaseArg>,
        /// Lower weight (2.1 cases i and ii)
        #[arg(long)]
        k1: Option<u64>,
        /// Weight parameter (2.2, 2.4, 4.1, 4.2, 4.3)
        #[arg(long)]
        k: Option<u64>,
        /// Shift count (2.1 cases i and ii)
        #[arg(long)]
        c: Option<u64>,
        /// Shift multiplier (2.2, 2.4)
        #[arg(long)]
        m: Option<u64>,
        /// Grid bound on n (2.4)
        #[arg(long)]
        nmax: Option<u64>,
        /// Comparison precision (2.2)
        #[arg(long)]
        prec: Option<usize>,
        /// Weight bound (2.1 case iii)
        #[arg(long)]
        kmax: Option<u64>,
    },
    /// Search for trace-form congruences up to a weight bound
    Scan {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        kmax: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, String> {
    match &cli.command {
        Command::Ssp { p, method } => cmd_ssp(cli, *p, *method),
        Command::Trace {
            k,
            n,
            modulus,
            exact,
        } => cmd_trace(cli, *k, *n, *modulus, *exact),
        Command::Divpoly { form, k, p } => cmd_divpoly(cli, *form, *k, *p),
        Command::Verify {
            theorem,
            p,
            case,
            k1,
            k,
            c,
            m,
            nmax,
            prec,
            kmax,
        } => cmd_verify(
            cli,
            theorem,
            *p,
            *case,
            *k1,
            *k,
            *c,
            *m,
            *nmax,
            *prec,
            *kmax,
        ),
        Command::Scan { p, kmax } => cmd_scan(cli, *p, *kmax),
    }
}

fn prime(p: u64) -> Result<PrimeModulus, String> {
    PrimeModulus::new(p).map_err(|e| e.to_string())
}

fn cache_dir(cli: &Cli) -> Option<PathBuf> {
    if cli.no_cache {
        return None;
    }
    if let Some(dir) = &cli.cache_dir {
        return Some(dir.clone());
    }
    if let Ok(dir) = std::env::var(CACHE_DIR_ENV) {
        return Some(PathBuf::from(dir));
    }
    Some(PathBuf::from(".ssl-forms-cache"))
}

fn load_table(cli: &Cli, needed_max_n: usize) -> (HurwitzTable, Option<CacheStats>) {
    match cache_dir(cli) {
        None => (HurwitzTable::up_to(needed_max_n), None),
        Some(dir) => {
            let (table, stats) = ensure_table(&dir, needed_max_n);
            (table, Some(stats))
        }
    }
}

fn emit<T: Serialize>(
    cli: &Cli,
    command: String,
    payload: T,
    cache: Option<CacheStats>,
    started: Instant,
    text: impl FnOnce(&T),
) {
    match cli.format {
        Format::Text => text(&payload),
        Format::Json => {
            let doc = OutputDocument {
                command,
                payload,
                cache,
                timing_us: started.elapsed().as_micros() as u64,
            };
            println!("{}", doc.to_json());
        }
    }
}

#[derive(Serialize)]
struct SspPayload {
    p: u64,
    method: String,
    s: PolynomialOut,
    s_tilde: PolynomialOut,
    methods_agree: Option<bool>,
}

fn cmd_ssp(cli: &Cli, p: u64, method: Method) -> Result<ExitCode, String> {
    let started = Instant::now();
    let p = prime(p)?;
    let compute = |m: Method| -> Result<SupersingularLocus, String> {
        match m {
            Method::Oracle => supersingular_oracle(p).map_err(|e| e.to_string()),
            Method::Deligne => Ok(supersingular_deligne(p)),
            Method::Both => unreachable!(),
        }
    };
    let (locus, agree) = match method {
        Method::Both => {
            let a = compute(Method::Oracle)?;
            let b = compute(Method::Deligne)?;
            let agree = a == b;
            (b, Some(agree))
        }
        m => (compute(m)?, None),
    };
    let method_name = match method {
        Method::Oracle => "oracle",
        Method::Deligne => "deligne",
        Method::Both => "both",
    };
    let payload = SspPayload {
        p: p.value(),
        method: method_name.to_string(),
        s: PolynomialOut::from_poly(&locus.s_poly),
        s_tilde: PolynomialOut::from_poly(&locus.s_tilde),
        methods_agree: agree,
    };
    let failed = agree == Some(false);
    emit(
        cli,
        format!("ssp --p {} --method {method_name}", p.value()),
        payload,
        None,
        started,
        |out| {
            println!("S_{} = {}", out.p, out.s.factored);
            println!("S_{} coefficients = {:?}", out.p, out.s.coefficients);
            println!("S~_{} = {}", out.p, out.s_tilde.factored);
            println!("S~_{} coefficients = {:?}", out.p, out.s_tilde.coefficients);
            if let Some(a) = out.methods_agree {
                println!("methods agree: {a}");
            }
        },
    );
    if failed {
        eprintln!("error: oracle and divisor-polynomial methods disagree");
        return Ok(ExitCode::from(EXIT_VERIFY_FAILED));
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct TracePayload {
    k: u64,
    n: u64,
    mode: String,
    modulus: Option<u64>,
    value: String,
    digits: usize,
}

fn cmd_trace(
    cli: &Cli,
    k: u64,
    n: u64,
    modulus: Option<u64>,
    exact: bool,
) -> Result<ExitCode, String> {
    let started = Instant::now();
    if k < 4 || k % 2 != 0 {
        return Err(format!("weight must be even and >= 4, got {k}"));
    }
    if n < 1 {
        return Err("index n must be >= 1".to_string());
    }
    let mode = match (modulus, exact) {
        (Some(p), false) => TraceMode::Mod(prime(p)?),
        (None, true) => TraceMode::Exact,
        _ => return Err("choose exactly one of --mod P or --exact".to_string()),
    };
    let (table, stats) = load_table(cli, HurwitzTable::required_for_trace(n as usize));
    let value = eichler_selberg_trace(k, n, mode, &table).map_err(|e| e.to_string())?;
    let (mode_name, modulus, rendered) = match &value {
        TraceValue::Exact(v) => ("exact".to_string(), None, v.to_string()),
        TraceValue::Modular(v) => (
            "mod".to_string(),
            Some(v.modulus().value()),
            v.to_string(),
        ),
    };
    let digits = rendered.trim_start_matches('-').len();
    let command = match mode {
        TraceMode::Exact => format!("trace --k {k} --n {n} --exact"),
        TraceMode::Mod(p) => format!("trace --k {k} --n {n} --mod {}", p.value()),
    };
    let payload = TracePayload {
        k,
        n,
        mode: mode_name,
        modulus,
        value: rendered,
        digits,
    };
    emit(cli, command, payload, stats, started, |out| {
        match out.modulus {
            Some(p) => println!("Tr_{}({}) mod {} = {}", out.k, out.n, p, out.value),
            None => println!("Tr_{}({}) = {}", out.k, out.n, out.value),
        }
    });
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct DivpolyPayload {
    form: String,
    k: u64,
    p: u64,
    /// Weight used for the decomposition (k + p^2 - 1 for hat forms).
    divisor_weight: u64,
    poly: PolynomialOut,
    s_tilde: PolynomialOut,
    guaranteed_multiplicity: u64,
    /// None when S~ = 1 (every multiplicity is trivially attained).
    observed_multiplicity: Option<u64>,
}

fn cmd_divpoly(cli: &Cli, form: FormArg, k: u64, p: u64) -> Result<ExitCode, String> {
    let started = Instant::now();
    let p = prime(p)?;
    let pv = p.value();
    if k < 4 || k % 2 != 0 {
        return Err(format!("weight must be even and >= 4, got {k}"));
    }
    let (kind, tag, form_name) = match form {
        FormArg::Traceform => (FactorizationKind::TraceTransfer, k, "traceform"),
        FormArg::Hatform => {
            let period = pv * pv - 1;
            if k < period || !matches!(k % period, 0 | 4 | 6 | 8 | 10 | 14) {
                return Err(format!(
                    "hat forms need k >= p^2 - 1 and k = 0,4,6,8,10,14 mod p^2 - 1, got {k}"
                ));
            }
            (FactorizationKind::HatTransfer, k + period, "hatform")
        }
    };
    let profile = weight_profile(tag).map_err(|e| e.to_string())?;
    let precision = (profile.m as usize + 1).max(2);
    let (table, stats) = load_table(cli, HurwitzTable::required_for_trace(precision - 1));
    let series = match form {
        FormArg::Traceform => trace_form(k, p, precision, &table)
            .map_err(|e| e.to_string())?
            .into_series(),
        FormArg::Hatform => modified_trace_form(k, p, precision, &table)
            .map_err(|e| e.to_string())?
            .into_series(),
    };
    let poly = divisor_polynomial(&series, profile)
        .map_err(|e| e.to_string())?
        .poly;
    let locus = supersingular_deligne(p);
    let guaranteed = guaranteed_multiplicity(p, k, kind);
    let observed = if locus.s_tilde.degree() == Some(0) {
        None
    } else {
        Some(s_tilde_multiplicity(&poly, &locus.s_tilde))
    };
    let violation = observed.is_some_and(|o| o < guaranteed);
    let payload = DivpolyPayload {
        form: form_name.to_string(),
        k,
        p: pv,
        divisor_weight: tag,
        poly: PolynomialOut::from_poly(&poly),
        s_tilde: PolynomialOut::from_poly(&locus.s_tilde),
        guaranteed_multiplicity: guaranteed,
        observed_multiplicity: observed,
    };
    emit(
        cli,
        format!("divpoly --form {form_name} --k {k} --p {pv}"),
        payload,
        stats,
        started,
        |out| {
            println!("F = {}", out.poly.factored);
            println!("F coefficients = {:?}", out.poly.coefficients);
            println!("S~_{} = {}", out.p, out.s_tilde.factored);
            match out.observed_multiplicity {
                Some(o) => println!(
                    "S~ multiplicity: observed {o}, guaranteed {}",
                    out.guaranteed_multiplicity
                ),
                None => println!(
                    "S~ multiplicity: trivial (S~ = 1), guaranteed {}",
                    out.guaranteed_multiplicity
                ),
            }
        },
    );
    if violation {
        eprintln!("error: observed multiplicity fell below the guarantee");
        return Ok(ExitCode::from(EXIT_MULTIPLICITY));
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    cli: &Cli,
    theorem: &str,
    p: u64,
    case: Option<CaseArg>,
    k1: Option<u64>,
    k: Option<u64>,
    c: Option<u64>,
    m: Option<u64>,
    nmax: Option<u64>,
    prec: Option<usize>,
    kmax: Option<u64>,
) -> Result<ExitCode, String> {
    let started = Instant::now();
    let p = prime(p)?;
    let pv = p.value();
    let (report, stats): (VerificationReport, Option<CacheStats>) = match theorem {
        "2.1" => {
            let case = case.ok_or("check 2.1 needs --case i|ii|iii")?;
            let congruence_case = match case {
                CaseArg::I => CongruenceCase::FullPeriod {
                    k1: k1.ok_or("case i needs --k1")?,
                    c: c.unwrap_or(1),
                },
                CaseArg::Ii => {
                    let offset = match k1 {
                        Some(k1) => {
                            let base = pv * pv - 1;
                            Some(k1.checked_sub(base).ok_or(format!(
                                "case ii needs k1 >= p^2 - 1 = {base}"
                            ))?)
                        }
                        None => None,
                    };
                    CongruenceCase::ScaledShift {
                        offset,
                        c: c.unwrap_or(1),
                    }
                }
                CaseArg::Iii => CongruenceCase::EqualDimension {
                    k_max: kmax.unwrap_or(124),
                },
            };
            let needed = match &congruence_case {
                CongruenceCase::FullPeriod { k1, c } => {
                    sturm_bound(k1 + c * pv * (pv * pv - 1))
                }
                CongruenceCase::ScaledShift { c, .. } => {
                    sturm_bound((pv * pv - 1) + 14 + c * (pv * pv - 1))
                }
                CongruenceCase::EqualDimension { k_max } => sturm_bound(*k_max),
            } as usize;
            let (table, stats) =
                load_table(cli, HurwitzTable::required_for_trace(needed.max(1)));
            (
                verify_trace_congruences(p, &congruence_case, &table)
                    .map_err(|e| e.to_string())?,
                stats,
            )
        }
        "2.2" => {
            let k = k.ok_or("check 2.2 needs --k (one of 0,4,6,8,10,14)")?;
            let m = m.unwrap_or(2);
            let prec = prec.unwrap_or(30);
            let (table, stats) =
                load_table(cli, HurwitzTable::required_for_trace(prec.saturating_sub(1)));
            (
                verify_hat_scaling(p, k, m, prec, &table).map_err(|e| e.to_string())?,
                stats,
            )
        }
        "2.4" => {
            let k = k.ok_or("check 2.4 needs --k (0 or an even weight >= 4)")?;
            (
                verify_recurrence_shift(p, k, m.unwrap_or(1), nmax.unwrap_or(20))
                    .map_err(|e| e.to_string())?,
                None,
            )
        }
        "4.1" | "4.2" | "4.3" => {
            let k = k.ok_or("divisor factorization checks need --k")?;
            let kind = match theorem {
                "4.1" => FactorizationKind::TraceTransfer,
                "4.2" => FactorizationKind::TraceClosedForm,
                _ => FactorizationKind::HatTransfer,
            };
            let tag = if kind == FactorizationKind::HatTransfer {
                k + pv * pv - 1
            } else {
                k
            };
            if tag % 2 != 0 || tag < 4 {
                return Err(format!("invalid weight {k}"));
            }
            let needed = dim_cusp_forms(tag) as usize;
            let (table, stats) =
                load_table(cli, HurwitzTable::required_for_trace(needed.max(1)));
            (
                verify_divisor_factorization(p, k, kind, &table).map_err(|e| e.to_string())?,
                stats,
            )
        }
        other => return Err(format!("unknown check id {other:?}")),
    };
    let passed = report.passed();
    emit(
        cli,
        format!("verify --theorem {theorem} --p {pv}"),
        report,
        stats,
        started,
        |out| {
            let status = if out.passed() { "PASS" } else { "FAIL" };
            println!("{status} {} ({} comparisons)", out.id, out.checked);
            for note in &out.notes {
                println!("  note: {note}");
            }
            for w in &out.witnesses {
                println!("  at {}: expected {}, got {}", w.location, w.expected, w.got);
            }
        },
    );
    Ok(if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY_FAILED)
    })
}

#[derive(Serialize)]
struct ScanFindingOut {
    k1: u64,
    k2: u64,
    scalar: u64,
    predicted_by: Option<String>,
    checked: u64,
}

#[derive(Serialize)]
struct ScanPayload {
    p: u64,
    kmax: u64,
    examined: u64,
    findings: Vec<ScanFindingOut>,
    skipped: Vec<String>,
    unpredicted: usize,
}

fn cmd_scan(cli: &Cli, p: u64, kmax: u64) -> Result<ExitCode, String> {
    let started = Instant::now();
    let p = prime(p)?;
    if kmax < 8 {
        return Err("kmax must be at least 8".to_string());
    }
    let needed = sturm_bound(kmax) as usize;
    let (table, stats) = load_table(cli, HurwitzTable::required_for_trace(needed.max(1)));
    let outcome = scan_congruences(p, kmax, &table).map_err(|e| e.to_string())?;
    let findings: Vec<ScanFindingOut> = outcome
        .findings
        .iter()
        .map(|f| ScanFindingOut {
            k1: f.claim.k1,
            k2: f.claim.k2,
            scalar: f.claim.scalar.value(),
            predicted_by: f.predicted_by.clone(),
            checked: f.report.checked,
        })
        .collect();
    let unpredicted = findings.iter().filter(|f| f.predicted_by.is_none()).count();
    let payload = ScanPayload {
        p: p.value(),
        kmax,
        examined: outcome.examined,
        findings,
        skipped: outcome
            .skipped
            .iter()
            .map(|(k1, k2, why)| format!("({k1}, {k2}): {why}"))
            .collect(),
        unpredicted,
    };
    emit(
        cli,
        format!("scan --p {} --kmax {kmax}", p.value()),
        payload,
        stats,
        started,
        |out| {
            for f in &out.findings {
                let label = f.predicted_by.as_deref().unwrap_or("UNPREDICTED");
                println!(
                    "T_{} = {} * T_{} (mod {})  [{}]",
                    f.k2, f.scalar, f.k1, out.p, label
                );
            }
            println!(
                "examined {} pairs, {} congruences, {} unpredicted",
                out.examined,
                out.findings.len(),
                out.unpredicted
            );
        },
    );
    Ok(if unpredicted == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY_FAILED)
    })
}
