//! Command-line front end: ξ Laurent data, factor rendering/series, the
//! named constants (with a golden-table mode), single verifications, and
//! verification grids. Output is byte-deterministic for fixed flags.
//!
//! Exit codes: 0 success / pass, 1 usage error, 2 verification failure.

use clap::{Args, Parser, Subcommand, ValueEnum};
use eisterm::calculus::{verify_identity, VerificationReport};
use eisterm::constants::{
    c_mr, c_r, c_r_routes, d_mr, dec_string, golden_table, transfer_const, Route, TransferKind,
};
use eisterm::factor::{factor_series, lambda_m, make_factor, FactorKind};
use eisterm::precision::{parse_rational, PrecisionContext};
use eisterm::xi::xi_series;
use eisterm::{Error, Result};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "eisterm",
    version,
    about = "completed-zeta Laurent data and Eisenstein constant-term verification",
    disable_help_subcommand = true
)]
struct Cli {
    /// Decimal digits of working precision (>= 20). Defaults to 50, or the
    /// EISTERM_DIGITS environment variable when set.
    #[arg(long, global = true)]
    digits: Option<u32>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Laurent expansion of the completed zeta function at a rational center
    Xi(XiArgs),
    /// Render one of the named factor products and expand it at a point
    Factor(FactorArgs),
    /// Named constants; `--golden` emits the full deterministic table
    Const(ConstArgs),
    /// Re-derive one identity and report residuals
    Verify(VerifyArgs),
    /// Run verification grids, rows ordered by (id, m, r)
    Grid(GridArgs),
}

#[derive(Args)]
struct XiArgs {
    /// center, as an exact rational "p/q"
    #[arg(long, allow_hyphen_values = true)]
    at: String,
    #[arg(long, default_value_t = 0)]
    order: i64,
}

#[derive(Args)]
struct FactorArgs {
    /// one of F, G, H, beta, sph, dnorm
    kind: String,
    #[arg(long)]
    m: i64,
    #[arg(long)]
    r: Option<i64>,
    /// expansion point "p/q"; omit to only render the product
    #[arg(long, allow_hyphen_values = true)]
    at: Option<String>,
    #[arg(long, default_value_t = 1)]
    order: i64,
    /// comma-separated primes whose Euler factors are removed (dnorm only)
    #[arg(long, value_delimiter = ',')]
    s: Vec<u64>,
}

#[derive(Args)]
struct ConstArgs {
    /// one of c, cr, d, a, b, kappa, lambda (omit with --golden)
    name: Option<String>,
    #[arg(long)]
    m: Option<i64>,
    #[arg(long)]
    r: Option<i64>,
    /// emit the whole constants table
    #[arg(long, default_value_t = false)]
    golden: bool,
    #[arg(long, default_value_t = 10)]
    max_m: i64,
    #[arg(long, default_value_t = 4)]
    max_r: i64,
}

#[derive(Args)]
struct VerifyArgs {
    /// identity name, e.g. boundary-constant-2
    id: String,
    #[arg(long)]
    m: Option<i64>,
    #[arg(long)]
    r: Option<i64>,
}

#[derive(Args)]
struct GridArgs {
    /// identity name or "all"
    id: String,
    #[arg(long, default_value_t = 3)]
    max_r: i64,
}

fn context(digits: Option<u32>) -> Result<PrecisionContext> {
    let d = match digits {
        Some(d) => d,
        None => match std::env::var("EISTERM_DIGITS") {
            Ok(v) => v
                .parse::<u32>()
                .map_err(|_| Error::Usage(format!("bad EISTERM_DIGITS '{v}'")))?,
            Err(_) => 50,
        },
    };
    if d < 20 {
        return Err(Error::Usage("digits must be >= 20".into()));
    }
    Ok(PrecisionContext::new(d))
}

fn report_json(rep: &VerificationReport) -> serde_json::Value {
    serde_json::json!({
        "id": rep.id,
        "params": {"m": rep.m, "r": rep.r},
        "digits": rep.digits,
        "buckets": rep.buckets.iter().map(|b| serde_json::json!({
            "exponent": b.exponent,
            "logdeg": b.logdeg,
            "residual": b.residual,
        })).collect::<Vec<_>>(),
        "pass": rep.pass,
        "derived": rep.derived,
    })
}

fn report_text(rep: &VerificationReport, out: &mut String) {
    out.push_str(&format!(
        "{} (m={}, r={}) at {} digits: {}\n",
        rep.id,
        rep.m.map_or("-".into(), |v| v.to_string()),
        rep.r.map_or("-".into(), |v| v.to_string()),
        rep.digits,
        if rep.pass { "PASS" } else { "FAIL" }
    ));
    for b in &rep.buckets {
        out.push_str(&format!(
            "  bucket |a|^{} log^{}: residual {}\n",
            b.exponent, b.logdeg, b.residual
        ));
    }
    for c in &rep.comparisons {
        out.push_str(&format!(
            "  {}: engine {} vs {} (rel err {}){}{}\n",
            c.name,
            c.engine,
            c.reference,
            c.rel_err,
            if c.pass { "" } else { " MISMATCH" },
            if c.gates { "" } else { " [informational]" }
        ));
    }
    for (k, v) in &rep.derived {
        out.push_str(&format!("  derived {k} = {v}\n"));
    }
    for n in &rep.notes {
        out.push_str(&format!("  note: {n}\n"));
    }
}

fn report_csv(rep: &VerificationReport, out: &mut String) {
    let m = rep.m.map_or(String::new(), |v| v.to_string());
    let r = rep.r.map_or(String::new(), |v| v.to_string());
    for b in &rep.buckets {
        out.push_str(&format!(
            "{},{},{},{},bucket,{},{},{},{}\n",
            rep.id, m, r, rep.digits, b.exponent, b.logdeg, b.residual, rep.pass
        ));
    }
    for (k, v) in &rep.derived {
        out.push_str(&format!(
            "{},{},{},{},derived,{},,{},{}\n",
            rep.id, m, r, rep.digits, k, v, rep.pass
        ));
    }
}

fn run(cli: Cli) -> Result<(String, bool)> {
    let ctx = context(cli.digits)?;
    let digits = ctx.decimal_digits;
    match cli.cmd {
        Cmd::Xi(a) => {
            let center = parse_rational(&a.at)?;
            if a.order < 0 {
                return Err(Error::Usage("order must be >= 0".into()));
            }
            let s = xi_series(&center, a.order, &ctx)?;
            let mut coeffs = Vec::new();
            for k in s.lead_exp()..=s.trunc_order() {
                coeffs.push((k, dec_string(&s.coeff(k)?.real().clone(), digits)));
            }
            let out = match cli.format {
                Format::Json => {
                    let v = serde_json::json!({
                        "center": center.to_string(),
                        "digits": digits,
                        "lead_exp": s.lead_exp(),
                        "coeffs": coeffs.iter().map(|(k, c)| serde_json::json!({"k": k, "value": c})).collect::<Vec<_>>(),
                    });
                    serde_json::to_string_pretty(&v).unwrap() + "\n"
                }
                Format::Csv => {
                    let mut o = String::from("k,value\n");
                    for (k, c) in &coeffs {
                        o.push_str(&format!("{k},{c}\n"));
                    }
                    o
                }
                Format::Text => {
                    let mut o = format!(
                        "xi at {center} ({digits} digits), lead exponent {}\n",
                        s.lead_exp()
                    );
                    for (k, c) in &coeffs {
                        o.push_str(&format!("  (s-{center})^{k}: {c}\n"));
                    }
                    o
                }
            };
            Ok((out, true))
        }
        Cmd::Factor(a) => {
            if a.kind == "dnorm" {
                let at = a
                    .at
                    .as_deref()
                    .ok_or_else(|| Error::Usage("dnorm needs --at".into()))?;
                let s0 = parse_rational(at)?;
                let ser = eisterm::factor::dnorm_series(a.m, &s0, &a.s, a.order, &ctx)?;
                let mut rows = Vec::new();
                for k in ser.lead_exp()..=ser.trunc_order() {
                    rows.push((k, dec_string(&ser.coeff(k)?.real().clone(), digits)));
                }
                let label = format!("dnorm(m={}, S={:?})", a.m, a.s);
                let out = match cli.format {
                    Format::Json => {
                        let v = serde_json::json!({
                            "factor": label,
                            "digits": digits,
                            "at": at,
                            "lead_exp": ser.lead_exp(),
                            "coeffs": rows.iter().map(|(k, c)| serde_json::json!({"k": k, "value": c})).collect::<Vec<_>>(),
                        });
                        serde_json::to_string_pretty(&v).unwrap() + "\n"
                    }
                    Format::Csv => {
                        let mut o = String::from("k,value\n");
                        for (k, c) in &rows {
                            o.push_str(&format!("{k},{c}\n"));
                        }
                        o
                    }
                    Format::Text => {
                        let mut o = format!("{label} at {at} (lead exponent {})\n", ser.lead_exp());
                        for (k, c) in &rows {
                            o.push_str(&format!("  eps^{k}: {c}\n"));
                        }
                        o
                    }
                };
                return Ok((out, true));
            }
            let kind = match a.kind.as_str() {
                "F" | "f" => FactorKind::F,
                "G" | "g" => FactorKind::G,
                "H" | "h" => FactorKind::H,
                "beta" => FactorKind::Beta,
                "sph" => FactorKind::Sph,
                other => return Err(Error::Usage(format!("unknown factor kind '{other}'"))),
            };
            let f = make_factor(kind, a.m, a.r.unwrap_or(0))?;
            let mut rows = Vec::new();
            let mut lead = 0i64;
            if let Some(at) = &a.at {
                let s0 = parse_rational(at)?;
                let s = factor_series(&f, &s0, a.order, &ctx)?;
                lead = s.lead_exp();
                for k in s.lead_exp()..=s.trunc_order() {
                    rows.push((k, dec_string(&s.coeff(k)?.real().clone(), digits)));
                }
            }
            let out = match cli.format {
                Format::Json => {
                    let v = serde_json::json!({
                        "factor": f.to_string(),
                        "digits": digits,
                        "at": a.at,
                        "lead_exp": if a.at.is_some() { Some(lead) } else { None },
                        "coeffs": rows.iter().map(|(k, c)| serde_json::json!({"k": k, "value": c})).collect::<Vec<_>>(),
                    });
                    serde_json::to_string_pretty(&v).unwrap() + "\n"
                }
                Format::Csv => {
                    let mut o = String::from("k,value\n");
                    for (k, c) in &rows {
                        o.push_str(&format!("{k},{c}\n"));
                    }
                    o
                }
                Format::Text => {
                    let mut o = format!("{f}\n");
                    if let Some(at) = &a.at {
                        o.push_str(&format!("expanded at {at} (lead exponent {lead}):\n"));
                        for (k, c) in &rows {
                            o.push_str(&format!("  eps^{k}: {c}\n"));
                        }
                    }
                    o
                }
            };
            Ok((out, true))
        }
        Cmd::Const(a) => {
            if a.golden {
                let table = golden_table(&ctx, a.max_m, a.max_r)?;
                let out = match cli.format {
                    Format::Json => serde_json::to_string_pretty(&table).unwrap() + "\n",
                    Format::Csv => {
                        let mut o = String::from("name,m,r,digits,value,d_power\n");
                        for e in &table {
                            o.push_str(&format!(
                                "{},{},{},{},{},{}\n",
                                e.name, e.m, e.r, e.digits, e.value, e.d_power
                            ));
                        }
                        o
                    }
                    Format::Text => {
                        let mut o = String::new();
                        for e in &table {
                            o.push_str(&format!(
                                "{}(m={}, r={}) = {}  |D|^({})\n",
                                e.name, e.m, e.r, e.value, e.d_power
                            ));
                        }
                        o
                    }
                };
                return Ok((out, true));
            }
            let name = a
                .name
                .as_deref()
                .ok_or_else(|| Error::Usage("const needs a name or --golden".into()))?;
            let need = |o: Option<i64>, what: &str| {
                o.ok_or_else(|| Error::Usage(format!("const {name} needs --{what}")))
            };
            let mut extra: Vec<(String, String)> = Vec::new();
            let c = match name {
                "c" => {
                    let m = need(a.m, "m")?;
                    let r = need(a.r, "r")?;
                    let closed = c_mr(m, r, Route::Closed, &ctx)?;
                    let rec = c_mr(m, r, Route::Recursive, &ctx)?;
                    extra.push(("value_recursive".into(), dec_string(&rec.value, digits)));
                    closed
                }
                "cr" => {
                    let r = need(a.r, "r")?;
                    let (_, composite) = c_r_routes(r, &ctx)?;
                    extra.push(("value_composite".into(), dec_string(&composite, digits)));
                    c_r(r, &ctx)?
                }
                "d" => d_mr(need(a.m, "m")?, need(a.r, "r")?, &ctx)?,
                "a" => transfer_const(TransferKind::A, need(a.m, "m")?, need(a.r, "r")?, &ctx)?,
                "b" => transfer_const(TransferKind::B, need(a.m, "m")?, need(a.r, "r")?, &ctx)?,
                "kappa" => {
                    transfer_const(TransferKind::Kappa, need(a.m, "m")?, need(a.r, "r")?, &ctx)?
                }
                "lambda" => {
                    let m = need(a.m, "m")?;
                    let v = lambda_m(m, &ctx)?;
                    let out = format_const(
                        "lambda",
                        m,
                        m,
                        digits,
                        &dec_string(&v, digits),
                        "0",
                        &[],
                        cli.format,
                    );
                    return Ok((out, true));
                }
                other => return Err(Error::Usage(format!("unknown constant '{other}'"))),
            };
            let out = format_const(
                &c.name,
                c.m,
                c.r,
                digits,
                &dec_string(&c.value, digits),
                &c.d_power.to_string(),
                &extra,
                cli.format,
            );
            Ok((out, true))
        }
        Cmd::Verify(a) => {
            let rep = verify_identity(&a.id, a.m, a.r, &ctx)?;
            let pass = rep.pass;
            let out = match cli.format {
                Format::Json => serde_json::to_string_pretty(&report_json(&rep)).unwrap() + "\n",
                Format::Csv => {
                    let mut o = String::from("id,m,r,digits,kind,key,logdeg,value,pass\n");
                    report_csv(&rep, &mut o);
                    o
                }
                Format::Text => {
                    let mut o = String::new();
                    report_text(&rep, &mut o);
                    o
                }
            };
            Ok((out, pass))
        }
        Cmd::Grid(a) => {
            let max_r = a.max_r.clamp(1, 5);
            let mut reports: Vec<VerificationReport> = Vec::new();
            let want = |id: &str| a.id == "all" || a.id == id;
            for r in 1..=max_r {
                if want("no-pole-i") {
                    reports.push(verify_identity("no-pole-i", None, Some(r), &ctx)?);
                }
                if want("no-pole-ii") {
                    reports.push(verify_identity("no-pole-ii", None, Some(r), &ctx)?);
                }
                if want("no-pole-iii") {
                    reports.push(verify_identity("no-pole-iii", None, Some(r), &ctx)?);
                }
            }
            if want("first-term-base") {
                for m in 4..=(2 * max_r + 6) {
                    reports.push(verify_identity("first-term-base", Some(m), None, &ctx)?);
                }
            }
            if want("first-term-step") {
                for r in 2..=max_r {
                    for m in (2 * r + 2)..=(2 * r + 4) {
                        reports.push(verify_identity("first-term-step", Some(m), Some(r), &ctx)?);
                    }
                }
            }
            for r in 1..=max_r {
                if want("boundary-first-term") {
                    reports.push(verify_identity("boundary-first-term", None, Some(r), &ctx)?);
                }
                if want("boundary-constant-2") {
                    reports.push(verify_identity("boundary-constant-2", None, Some(r), &ctx)?);
                }
                if want("second-range-first-term-base") {
                    reports.push(verify_identity(
                        "second-range-first-term-base",
                        None,
                        Some(r),
                        &ctx,
                    )?);
                }
                if want("second-term-base") {
                    reports.push(verify_identity("second-term-base", None, Some(r), &ctx)?);
                }
            }
            for r in 2..=max_r {
                for m in (r + 1)..=(2 * r - 1) {
                    if want("second-range-first-term-step") {
                        reports.push(verify_identity(
                            "second-range-first-term-step",
                            Some(m),
                            Some(r),
                            &ctx,
                        )?);
                    }
                    if want("second-term-step") {
                        reports.push(verify_identity("second-term-step", Some(m), Some(r), &ctx)?);
                    }
                }
                for m in (r + 2)..=(2 * r) {
                    if want("weak-coefficient") {
                        reports.push(verify_identity("weak-coefficient", Some(m), Some(r), &ctx)?);
                    }
                }
            }
            if reports.is_empty() {
                return Err(Error::Usage(format!("unknown grid id '{}'", a.id)));
            }
            reports.sort_by(|a, b| (&a.id, a.m, a.r).cmp(&(&b.id, b.m, b.r)));
            let pass = reports.iter().all(|r| r.pass);
            let out = match cli.format {
                Format::Json => {
                    let v: Vec<_> = reports.iter().map(report_json).collect();
                    serde_json::to_string_pretty(&v).unwrap() + "\n"
                }
                Format::Csv => {
                    let mut o = String::from("id,m,r,digits,kind,key,logdeg,value,pass\n");
                    for r in &reports {
                        report_csv(r, &mut o);
                    }
                    o
                }
                Format::Text => {
                    let mut o = String::new();
                    for r in &reports {
                        o.push_str(&format!(
                            "{} m={} r={}: {}\n",
                            r.id,
                            r.m.map_or("-".into(), |v| v.to_string()),
                            r.r.map_or("-".into(), |v| v.to_string()),
                            if r.pass { "PASS" } else { "FAIL" }
                        ));
                    }
                    o.push_str(&format!(
                        "{}/{} runs passed\n",
                        reports.iter().filter(|r| r.pass).count(),
                        reports.len()
                    ));
                    o
                }
            };
            Ok((out, pass))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn format_const(
    name: &str,
    m: i64,
    r: i64,
    digits: u32,
    value: &str,
    d_power: &str,
    extra: &[(String, String)],
    format: Format,
) -> String {
    match format {
        Format::Json => {
            let mut v = serde_json::json!({
                "name": name, "m": m, "r": r, "digits": digits,
                "value": value, "d_power": d_power,
            });
            for (k, val) in extra {
                v[k] = serde_json::Value::String(val.clone());
            }
            serde_json::to_string_pretty(&v).unwrap() + "\n"
        }
        Format::Csv => {
            let mut o = String::from("name,m,r,digits,value,d_power\n");
            o.push_str(&format!("{name},{m},{r},{digits},{value},{d_power}\n"));
            o
        }
        Format::Text => {
            let mut o = format!("{name}(m={m}, r={r}) = {value}  |D|^({d_power})\n");
            for (k, val) in extra {
                o.push_str(&format!("  {k} = {val}\n"));
            }
            o
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    let format = cli.format;
    match run(cli) {
        Ok((out, pass)) => {
            print!("{out}");
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            match format {
                Format::Json => {
                    let (code, msg) = match &e {
                        Error::Usage(m) => ("usage", m.clone()),
                        Error::Domain(m) => ("domain", m.clone()),
                        Error::Range(m) => ("range", m.clone()),
                        Error::Precision(m) => ("precision", m.clone()),
                        Error::Internal(m) => ("internal", m.clone()),
                    };
                    let param = msg
                        .split("--")
                        .nth(1)
                        .map(|s| s.split_whitespace().next().unwrap_or("").to_string());
                    let v = serde_json::json!({"code": code, "message": msg, "param": param});
                    eprintln!("{}", serde_json::to_string(&v).unwrap());
                }
                _ => eprintln!("error: {e}"),
            }
            ExitCode::from(1)
        }
    }
}
