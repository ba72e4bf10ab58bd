//! Command-line front end.
//!
//! Exit codes: 0 success, 1 audit with a failing identity, 2 usage or
//! configuration error, 3 numeric or domain error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::QError;
use crate::identities::{
    audit_records, check_derivative_identity, check_reading, find_record, registry, sample_points, IdentityRecord,
    SamplerConfig, Verdict,
};
use crate::qcore::{ComplexValue, QContext};
use crate::report::{complex_json, eval_result_json, policy_json, render_report, verdict_json, Format};
use crate::series::{
    classical_limit_check, eval_series, q_partial, Axis, EvalPolicy, EvalResult, ExpHornPoint, HornPoint, SeriesKind,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_AUDIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Parses `RE`, `RE+IMi` or `RE-IMi` (decimal or scientific, no spaces).
pub fn parse_complex(s: &str) -> Result<ComplexValue, String> {
    let bad = || format!("malformed complex literal '{s}' (expected RE, RE+IMi or RE-IMi)");
    if s.is_empty() || s.chars().any(char::is_whitespace) {
        return Err(bad());
    }
    let num = |t: &str| -> Result<f64, String> {
        let ok = !t.is_empty() && t.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-'));
        let v: f64 = if ok { t.parse().map_err(|_| bad())? } else { return Err(bad()) };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(bad())
        }
    };
    let Some(body) = s.strip_suffix('i') else {
        return Ok(ComplexValue::new(num(s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'))
        .ok_or_else(bad)?;
    Ok(ComplexValue::new(num(&body[..split])?, num(&body[split..])?))
}

/// Inverse of [`parse_complex`].
pub fn format_complex(c: ComplexValue) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.im.is_sign_negative() {
        format!("{}-{}i", c.re, -c.im)
    } else {
        format!("{}+{}i", c.re, c.im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Function {
    #[value(name = "h6")]
    H6,
    #[value(name = "h7")]
    H7,
    #[value(name = "h6exp")]
    H6Exp,
    #[value(name = "h7exp")]
    H7Exp,
}

impl Function {
    pub fn kind(self) -> SeriesKind {
        match self {
            Function::H6 | Function::H6Exp => SeriesKind::H6,
            Function::H7 | Function::H7Exp => SeriesKind::H7,
        }
    }

    pub fn is_exp(self) -> bool {
        matches!(self, Function::H6Exp | Function::H7Exp)
    }

    fn name(self) -> &'static str {
        match self {
            Function::H6 => "h6",
            Function::H7 => "h7",
            Function::H6Exp => "h6exp",
            Function::H7Exp => "h7exp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Var {
    X,
    Y,
}

#[derive(Debug, Clone, PartialEq, Parser)]
#[command(name = "qhorn", version, about = "Evaluate basic Horn functions H6/H7 and audit their identities")]
pub struct CliConfig {
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
    /// Write output here (atomically) instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Command {
    /// Evaluate the series at a point.
    Eval(EvalArgs),
    /// Partial q-derivative in closed form.
    Deriv(DerivArgs),
    /// Check one identity at a seeded sample point.
    Verify(VerifyArgs),
    /// Check every identity at seeded sample points.
    Audit(AuditArgs),
    /// Compare the exponent form against the classical series as q -> 1.
    Limit(LimitArgs),
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct PolicyArgs {
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Cap on both summation indices.
    #[arg(long)]
    pub max_terms: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct PointArgs {
    #[arg(long = "fn", value_enum)]
    pub function: Function,
    #[arg(long, default_value = "0.5", value_parser = parse_complex, allow_hyphen_values = true)]
    pub q: ComplexValue,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub alpha: ComplexValue,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub beta: ComplexValue,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub gamma: Option<ComplexValue>,
    #[arg(long, default_value = "0", value_parser = parse_complex, allow_hyphen_values = true)]
    pub x: ComplexValue,
    #[arg(long, default_value = "0", value_parser = parse_complex, allow_hyphen_values = true)]
    pub y: ComplexValue,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[command(flatten)]
    pub policy: PolicyArgs,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct DerivArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long, default_value_t = 1)]
    pub order: u32,
    #[arg(long, value_enum, default_value = "x")]
    pub var: Var,
    #[command(flatten)]
    pub policy: PolicyArgs,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub id: String,
    #[arg(long, default_value = "0.5", value_parser = parse_complex, allow_hyphen_values = true)]
    pub q: ComplexValue,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Derivative order (E2.9..E2.12 only).
    #[arg(long)]
    pub order: Option<u32>,
    #[command(flatten)]
    pub policy: PolicyArgs,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct AuditArgs {
    /// Restrict to these ids (comma separated or repeated).
    #[arg(long = "id", value_delimiter = ',')]
    pub ids: Vec<String>,
    #[arg(long, default_value = "0.5", value_parser = parse_complex, allow_hyphen_values = true)]
    pub q: ComplexValue,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 25)]
    pub n_points: usize,
    #[command(flatten)]
    pub policy: PolicyArgs,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct LimitArgs {
    #[arg(long = "fn", value_enum)]
    pub function: Function,
    /// Classical parameters (exponents of q).
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub alpha: ComplexValue,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub beta: ComplexValue,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub gamma: Option<ComplexValue>,
    #[arg(long, default_value = "0", value_parser = parse_complex, allow_hyphen_values = true)]
    pub x: ComplexValue,
    #[arg(long, default_value = "0", value_parser = parse_complex, allow_hyphen_values = true)]
    pub y: ComplexValue,
    #[arg(long = "q-seq", value_delimiter = ',', default_values_t = [0.9, 0.99, 0.999, 0.9999])]
    pub q_seq: Vec<f64>,
    #[command(flatten)]
    pub policy: PolicyArgs,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(QError),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Numeric(e) => match e {
                QError::Config(_) | QError::UnknownIdentity(_) => EXIT_USAGE,
                QError::Domain(_) | QError::Overflow(_) => EXIT_NUMERIC,
            },
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Numeric(e) => e.kind(),
            CliError::Io(_) => "io",
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numeric(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<QError> for CliError {
    fn from(e: QError) -> Self {
        CliError::Numeric(e)
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn push(out: &mut Vec<String>, flag: &str, v: impl ToString) {
    out.push(flag.to_string());
    out.push(v.to_string());
}

fn value_name<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default()
}

impl PolicyArgs {
    fn to_args(&self, out: &mut Vec<String>) {
        push(out, "--tol", self.tol);
        if let Some(m) = self.max_terms {
            push(out, "--max-terms", m);
        }
    }

    pub fn policy(&self) -> Result<EvalPolicy, CliError> {
        let mut p = EvalPolicy::default().with_rel_tol(self.tol);
        if let Some(m) = self.max_terms {
            p.max_r = m;
            p.max_s = m;
        }
        p.validate().map_err(|e| usage(e.to_string()))?;
        Ok(p)
    }
}

impl PointArgs {
    fn to_args(&self, out: &mut Vec<String>) {
        push(out, "--fn", self.function.name());
        push(out, "--q", format_complex(self.q));
        push(out, "--alpha", format_complex(self.alpha));
        push(out, "--beta", format_complex(self.beta));
        if let Some(g) = self.gamma {
            push(out, "--gamma", format_complex(g));
        }
        push(out, "--x", format_complex(self.x));
        push(out, "--y", format_complex(self.y));
    }

    fn horn(&self, ctx: &QContext) -> Result<HornPoint, CliError> {
        let gamma = gamma_for(self.function, self.gamma)?;
        Ok(if self.function.is_exp() {
            ExpHornPoint::new(self.alpha, self.beta, gamma, self.x, self.y).to_horn(ctx.q())?
        } else {
            HornPoint::new(self.alpha, self.beta, gamma, self.x, self.y)?
        })
    }

    fn json(&self) -> Value {
        let mut v = json!({
            "alpha": complex_json(self.alpha),
            "beta": complex_json(self.beta),
            "x": complex_json(self.x),
            "y": complex_json(self.y),
        });
        if let Some(g) = self.gamma {
            v["gamma"] = complex_json(g);
        }
        v
    }
}

/// H7 needs gamma; H6 has none, so passing one is a conflict.
fn gamma_for(f: Function, gamma: Option<ComplexValue>) -> Result<ComplexValue, CliError> {
    match (f.kind(), gamma) {
        (SeriesKind::H7, Some(g)) => Ok(g),
        (SeriesKind::H7, None) => Err(usage(format!("--gamma is required for {}", f.name()))),
        (SeriesKind::H6, Some(_)) => Err(usage(format!("--gamma conflicts with --fn {}", f.name()))),
        (SeriesKind::H6, None) => Ok(ComplexValue::new(0.0, 0.0)),
    }
}

fn context(q: ComplexValue) -> Result<QContext, CliError> {
    QContext::with_q(q).map_err(|e| usage(e.to_string()))
}

impl CliConfig {
    /// Canonical argv (without the program name) that parses back to `self`.
    pub fn to_args(&self) -> Vec<String> {
        let mut out = Vec::new();
        match &self.command {
            Command::Eval(a) => {
                out.push("eval".into());
                a.point.to_args(&mut out);
                a.policy.to_args(&mut out);
            }
            Command::Deriv(a) => {
                out.push("deriv".into());
                a.point.to_args(&mut out);
                push(&mut out, "--order", a.order);
                push(&mut out, "--var", value_name(&a.var));
                a.policy.to_args(&mut out);
            }
            Command::Verify(a) => {
                out.push("verify".into());
                push(&mut out, "--id", &a.id);
                push(&mut out, "--q", format_complex(a.q));
                push(&mut out, "--seed", a.seed);
                if let Some(o) = a.order {
                    push(&mut out, "--order", o);
                }
                a.policy.to_args(&mut out);
            }
            Command::Audit(a) => {
                out.push("audit".into());
                for id in &a.ids {
                    push(&mut out, "--id", id);
                }
                push(&mut out, "--q", format_complex(a.q));
                push(&mut out, "--seed", a.seed);
                push(&mut out, "--n-points", a.n_points);
                a.policy.to_args(&mut out);
            }
            Command::Limit(a) => {
                out.push("limit".into());
                push(&mut out, "--fn", a.function.name());
                push(&mut out, "--alpha", format_complex(a.alpha));
                push(&mut out, "--beta", format_complex(a.beta));
                if let Some(g) = a.gamma {
                    push(&mut out, "--gamma", format_complex(g));
                }
                push(&mut out, "--x", format_complex(a.x));
                push(&mut out, "--y", format_complex(a.y));
                let qs: Vec<String> = a.q_seq.iter().map(f64::to_string).collect();
                push(&mut out, "--q-seq", qs.join(","));
                a.policy.to_args(&mut out);
            }
        }
        push(&mut out, "--format", value_name(&self.format));
        if let Some(p) = &self.output {
            push(&mut out, "--output", p.display());
        }
        out
    }

    /// Checks that clap cannot express: |q| range, gamma presence.
    pub fn validate(&self) -> Result<(), CliError> {
        match &self.command {
            Command::Eval(a) => {
                context(a.point.q)?;
                gamma_for(a.point.function, a.point.gamma)?;
                a.policy.policy()?;
            }
            Command::Deriv(a) => {
                context(a.point.q)?;
                gamma_for(a.point.function, a.point.gamma)?;
                a.policy.policy()?;
                if a.order == 0 || a.order > 64 {
                    return Err(usage("--order must lie in 1..=64"));
                }
            }
            Command::Verify(a) => {
                context(a.q)?;
                a.policy.policy()?;
                if a.order == Some(0) {
                    return Err(usage("--order must be at least 1"));
                }
            }
            Command::Audit(a) => {
                context(a.q)?;
                a.policy.policy()?;
                if a.n_points == 0 {
                    return Err(usage("--n-points must be at least 1"));
                }
            }
            Command::Limit(a) => {
                gamma_for(a.function, a.gamma)?;
                a.policy.policy()?;
            }
        }
        Ok(())
    }
}

/// Parses and validates argv (first element is the program name).
pub fn parse_args<I, T>(argv: I) -> Result<CliConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = CliConfig::try_parse_from(argv).map_err(|e| usage(e.to_string().trim_end().to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Output of a successful run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub exit_code: i32,
    pub body: String,
}

fn json_body(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values are always serializable");
    s.push('\n');
    s
}

fn result_text(label: &str, r: &EvalResult) -> String {
    format!(
        "{label} = {}\nterms_used = {}\ntail_estimate = {:e}\ntruncated_cleanly = {}\n",
        format_complex(r.value),
        r.terms_used,
        r.tail_estimate,
        r.truncated_cleanly
    )
}

fn result_csv(r: &EvalResult) -> String {
    format!(
        "value_re,value_im,terms_used,tail_estimate,truncated_cleanly\n{},{},{},{:e},{}\n",
        r.value.re, r.value.im, r.terms_used, r.tail_estimate, r.truncated_cleanly
    )
}

fn verdict_text(v: &Verdict) -> String {
    format!(
        "{} [{}]: {}\nlhs = {}\nrhs = {}\nabs_residual = {:e}\nrel_residual = {:e}\ncond = {:e}\n",
        v.id,
        v.variant,
        v.classification,
        format_complex(v.lhs_value),
        format_complex(v.rhs_value),
        v.abs_residual,
        v.rel_residual,
        v.cond
    )
}

fn run_eval(a: &EvalArgs, format: Format) -> Result<RunOutput, CliError> {
    let ctx = context(a.point.q)?;
    let policy = a.policy.policy()?;
    let r = eval_series(a.point.function.kind(), &a.point.horn(&ctx)?, &ctx, &policy)?;
    let body = match format {
        Format::Json => {
            let mut v = eval_result_json(&r);
            v["function"] = json!(a.point.function.name());
            v["q"] = complex_json(ctx.q());
            v["point"] = a.point.json();
            json_body(&v)
        }
        Format::Csv => result_csv(&r),
        Format::Text => result_text("value", &r),
    };
    Ok(RunOutput { exit_code: EXIT_OK, body })
}

fn derivative_id(kind: SeriesKind, axis: Axis) -> &'static str {
    match (kind, axis) {
        (SeriesKind::H7, Axis::X) => "E2.9",
        (SeriesKind::H7, Axis::Y) => "E2.10",
        (SeriesKind::H6, Axis::X) => "E2.11",
        (SeriesKind::H6, Axis::Y) => "E2.12",
    }
}

fn run_deriv(a: &DerivArgs, format: Format) -> Result<RunOutput, CliError> {
    let ctx = context(a.point.q)?;
    let policy = a.policy.policy()?;
    let axis = match a.var {
        Var::X => Axis::X,
        Var::Y => Axis::Y,
    };
    let kind = a.point.function.kind();
    let r = q_partial(kind, axis, &a.point.horn(&ctx)?, &ctx, &policy, a.order)?;
    let body = match format {
        Format::Json => {
            let mut v = eval_result_json(&r);
            v["function"] = json!(a.point.function.name());
            v["var"] = json!(value_name(&a.var));
            v["order"] = json!(a.order);
            v["identity"] = json!(derivative_id(kind, axis));
            v["q"] = complex_json(ctx.q());
            v["point"] = a.point.json();
            json_body(&v)
        }
        Format::Csv => result_csv(&r),
        Format::Text => result_text(&format!("D_{}^{}", value_name(&a.var), a.order), &r),
    };
    Ok(RunOutput { exit_code: EXIT_OK, body })
}

fn run_verify(a: &VerifyArgs, format: Format) -> Result<RunOutput, CliError> {
    let ctx = context(a.q)?;
    let policy = a.policy.policy()?;
    let record = find_record(&a.id)?;
    let cfg = SamplerConfig::default().with_seed(a.seed).with_n_points(1);
    let point = sample_points(&cfg, record, &ctx)?.points[0];
    let v = match a.order {
        Some(order) => {
            let id = record.id.as_str();
            if !matches!(id, "E2.9" | "E2.10" | "E2.11" | "E2.12") {
                return Err(usage(format!("--order applies only to E2.9..E2.12, not {id}")));
            }
            check_derivative_identity(id, &point.scalars.point(), &ctx, &policy, order)?
        }
        None => check_reading(record, 0, &point, &ctx, &policy)?,
    };
    let body = match format {
        Format::Json => json_body(&verdict_json(&v)),
        Format::Csv => format!(
            "id,variant,abs_residual,rel_residual,classification\n{},{},{:e},{:e},{}\n",
            v.id, v.variant, v.abs_residual, v.rel_residual, v.classification
        ),
        Format::Text => verdict_text(&v),
    };
    Ok(RunOutput { exit_code: EXIT_OK, body })
}

fn run_audit(a: &AuditArgs, format: Format) -> Result<RunOutput, CliError> {
    let ctx = context(a.q)?;
    let policy = a.policy.policy()?;
    let records: Vec<&IdentityRecord> = if a.ids.is_empty() {
        registry().iter().collect()
    } else {
        let mut v = Vec::new();
        for id in &a.ids {
            let r = find_record(id)?;
            if !v.iter().any(|x: &&IdentityRecord| x.id == r.id) {
                v.push(r);
            }
        }
        v
    };
    let cfg = SamplerConfig::default().with_seed(a.seed).with_n_points(a.n_points);
    let report = audit_records(&records, &cfg, &ctx, &policy)?;
    let code = if report.has_failures() { EXIT_AUDIT_FAILED } else { EXIT_OK };
    Ok(RunOutput { exit_code: code, body: render_report(&report, format) })
}

fn run_limit(a: &LimitArgs, format: Format) -> Result<RunOutput, CliError> {
    let policy = a.policy.policy()?;
    let gamma = gamma_for(a.function, a.gamma)?;
    let pt = ExpHornPoint::new(a.alpha, a.beta, gamma, a.x, a.y);
    let samples = classical_limit_check(a.function.kind(), &pt, &a.q_seq, &policy)?;
    let body = match format {
        Format::Json => json_body(&json!({
            "function": a.function.name(),
            "point": {
                "alpha": complex_json(a.alpha),
                "beta": complex_json(a.beta),
                "gamma": a.gamma.map_or(Value::Null, complex_json),
                "x": complex_json(a.x),
                "y": complex_json(a.y),
            },
            "policy": policy_json(&policy),
            "samples": samples.iter().map(|s| json!({ "q": s.q, "error": s.error })).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut s = String::from("q,error\n");
            for x in &samples {
                s.push_str(&format!("{},{:e}\n", x.q, x.error));
            }
            s
        }
        Format::Text => {
            let mut s = format!("{:<10}  {}\n", "q", "error");
            for x in &samples {
                s.push_str(&format!("{:<10}  {:.6e}\n", x.q, x.error));
            }
            s
        }
    };
    Ok(RunOutput { exit_code: EXIT_OK, body })
}

/// Executes a parsed configuration and renders its output.
pub fn run(cfg: &CliConfig) -> Result<RunOutput, CliError> {
    match &cfg.command {
        Command::Eval(a) => run_eval(a, cfg.format),
        Command::Deriv(a) => run_deriv(a, cfg.format),
        Command::Verify(a) => run_verify(a, cfg.format),
        Command::Audit(a) => run_audit(a, cfg.format),
        Command::Limit(a) => run_limit(a, cfg.format),
    }
}

/// Writes via a temporary sibling file and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path).inspect_err(|_| {
        let _ = std::fs::remove_file(&tmp);
    })
}

/// Best-effort format lookup for errors raised before parsing succeeds.
fn sniff_format(args: &[OsString]) -> Format {
    let mut it = args.iter().map(|a| a.to_string_lossy());
    while let Some(a) = it.next() {
        let v = if a == "--format" {
            it.next().map(|s| s.to_string())
        } else {
            a.strip_prefix("--format=").map(str::to_string)
        };
        if let Some(v) = v {
            return Format::from_str(&v, true).unwrap_or(Format::Json);
        }
    }
    Format::Json
}

fn report_error(err: &mut dyn Write, format: Format, e: &CliError) -> i32 {
    let code = e.exit_code();
    let _ = writeln!(err, "qhorn: {e}");
    if format == Format::Json {
        let v = json!({ "error": { "kind": e.kind(), "message": e.to_string() }, "exit_code": code });
        let _ = writeln!(err, "{v}");
    }
    code
}

/// Full program: parse, run, write output. Returns the process exit code.
pub fn main_with_args<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cfg = match CliConfig::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
        Err(e) => return report_error(err, sniff_format(&args), &usage(e.to_string().trim_end().to_string())),
    };
    if let Err(e) = cfg.validate() {
        return report_error(err, cfg.format, &e);
    }
    match run(&cfg) {
        Ok(o) => {
            let written = match &cfg.output {
                Some(p) => write_atomic(p, &o.body),
                None => out.write_all(o.body.as_bytes()),
            };
            match written {
                Ok(()) => o.exit_code,
                Err(e) => report_error(err, cfg.format, &CliError::Io(e)),
            }
        }
        Err(e) => report_error(err, cfg.format, &e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> ComplexValue {
        ComplexValue::new(re, im)
    }

    #[test]
    fn complex_grammar() {
        assert_eq!(parse_complex("0.3-0.1i"), Ok(c(0.3, -0.1)));
        assert_eq!(parse_complex("-2"), Ok(c(-2.0, 0.0)));
        assert_eq!(parse_complex("1e-3+2.5E+1i"), Ok(c(1e-3, 25.0)));
        assert_eq!(parse_complex("-1.5e-2-3e-4i"), Ok(c(-1.5e-2, -3e-4)));
        for bad in ["", "0.3 - 0.1i", "i", "0.3i", "1+i", "abc", "inf", "1+2j", "nan+1i", "1e400"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn complex_printer_round_trips() {
        for z in [c(0.3, -0.1), c(-0.0, 0.0), c(1e-300, 7.25), c(-4.0, -1e-17)] {
            assert_eq!(parse_complex(&format_complex(z)), Ok(z));
        }
    }

    #[test]
    fn parse_example() {
        let cfg = parse_args(["qhorn", "eval", "--fn", "h6", "--q", "0.5", "--alpha", "0.3", "--beta", "0.2", "--x", "0.1", "--y", "0.1"])
            .unwrap();
        let Command::Eval(a) = &cfg.command else { panic!() };
        assert_eq!(a.point.gamma, None);
        assert_eq!(a.point.function, Function::H6);
        assert_eq!(cfg.format, Format::Json);
        assert_eq!(a.policy.tol, 1e-12);
    }

    #[test]
    fn usage_errors() {
        let code = |args: &[&str]| parse_args(args.iter().copied()).unwrap_err().exit_code();
        assert_eq!(code(&["qhorn", "eval", "--fn", "h6", "--q", "1.5", "--alpha", "0.3", "--beta", "0.2"]), EXIT_USAGE);
        assert_eq!(code(&["qhorn", "eval", "--fn", "h6", "--alpha", "0.3", "--beta", "0.2", "--gamma", "0.1"]), EXIT_USAGE);
        assert_eq!(code(&["qhorn", "eval", "--fn", "h7", "--alpha", "0.3", "--beta", "0.2"]), EXIT_USAGE);
        assert_eq!(code(&["qhorn", "eval", "--fn", "h6", "--alpha", "0.3 ", "--beta", "0.2"]), EXIT_USAGE);
        assert_eq!(code(&["qhorn", "audit", "--bogus"]), EXIT_USAGE);
    }

    #[test]
    fn round_trip() {
        let cfg = parse_args(["qhorn", "deriv", "--fn", "h7exp", "--alpha", "-0.5+1i", "--beta", "2", "--gamma", "3", "--order", "2", "--var", "y", "--format", "text"])
            .unwrap();
        let mut argv = vec!["qhorn".to_string()];
        argv.extend(cfg.to_args());
        assert_eq!(parse_args(argv).unwrap(), cfg);
    }

    #[test]
    fn eval_origin_is_one() {
        let cfg = parse_args(["qhorn", "eval", "--fn", "h7", "--alpha", "0.3", "--beta", "0.2", "--gamma", "0.4"]).unwrap();
        let out = run(&cfg).unwrap();
        let v: Value = serde_json::from_str(&out.body).unwrap();
        assert_eq!(v["value"], json!({"re": 1.0, "im": 0.0}));
    }

    #[test]
    fn numeric_error_code() {
        // beta = 1 is a pole of every term past the first
        let cfg = parse_args(["qhorn", "eval", "--fn", "h6", "--alpha", "0.3", "--beta", "1", "--x", "0.1"]).unwrap();
        assert_eq!(run(&cfg).unwrap_err().exit_code(), EXIT_NUMERIC);
    }

    #[test]
    fn sniffing() {
        let args: Vec<OsString> = ["qhorn", "--format=csv", "x"].iter().map(OsString::from).collect();
        assert_eq!(sniff_format(&args), Format::Csv);
        let args: Vec<OsString> = ["qhorn", "x"].iter().map(OsString::from).collect();
        assert_eq!(sniff_format(&args), Format::Json);
    }
}
