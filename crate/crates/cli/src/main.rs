//! Batch front end: evaluate arithmetic functions, build and serialize
//! operators, run the identity-verification suites, and sweep Berezin
//! symbols over radial schedules.
//!
//! Exit codes: 0 success, 1 identity violation, 2 usage error.

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;

use fockarith::arith::{self, ArithmeticFn};
use fockarith::berezin::{
    self, berezin, check_ref_identities, min_dim, DiscPoint, RadialSchedule,
};
use fockarith::conv;
use fockarith::fock::{
    self, progression_split, projector, projector_from_rotated, rotated, theorem1_product,
    FockOperator, ProjectorMode,
};
use fockarith::report::IdentityCheck;

#[derive(Parser)]
#[command(
    name = "fockarith",
    about = "Arithmetic operators on truncated Fock space and their Berezin symbols",
    long_about = "Complex numbers are written as `a+bi` (e.g. 0.6+0.2i) or in polar \
                  form `r@theta` (e.g. 0.85@0.628). Operators are written as \
                  `identity`, `pi:j:n`, `pibar:j:n`, `c:j:n`, `t:j:n`, `rotated:n` \
                  or `number:alpha:j`."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an arithmetic function at a point or over a range
    Arith(ArithArgs),
    /// Build an operator and write its JSON record
    Op(OpArgs),
    /// Run an identity-verification suite and write a JSON report
    Verify(VerifyArgs),
    /// Berezin symbol of an operator at a disc point (CSV)
    Berezin(BerezinArgs),
    /// Berezin symbol of an operator along a radial schedule (CSV)
    Radial(RadialArgs),
    /// Lambert-series zeta symbol along a radial schedule (CSV)
    Zeta(ZetaArgs),
}

#[derive(Args)]
struct ArithArgs {
    /// Function name: nu0, nu1, eps, mobius, phi, omega, sigma, m,
    /// dirichlet:a:b, lcm:a:b, unitary:a:b (sigma and m take --s)
    #[arg(long = "fn")]
    func: String,
    /// Exponent for sigma / m (also accepted inline as sigma:s, m:s)
    #[arg(long)]
    s: Option<f64>,
    /// Single evaluation point
    #[arg(long, conflicts_with = "range")]
    n: Option<u64>,
    /// Inclusive range a..b
    #[arg(long)]
    range: Option<String>,
}

#[derive(Args)]
struct OpArgs {
    /// pi, pibar, rotated, c, t or number
    #[arg(long)]
    kind: String,
    #[arg(long, default_value_t = 0)]
    j: u64,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    dim: usize,
    /// Projector index convention for `pi`: normalized or literal
    #[arg(long, default_value = "normalized")]
    mode: String,
    /// Weight function for `number` (same names as `arith --fn`)
    #[arg(long)]
    alpha: Option<String>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// theorem1, bb2, bident, prop1, ref, rotated, completeness or
    /// progression
    #[arg(long)]
    suite: String,
    /// Upper bound of the n sweep (suite-specific default)
    #[arg(long)]
    nmax: Option<u64>,
    /// Restrict the sweep to a single n
    #[arg(long)]
    n: Option<u64>,
    /// Truncation dimension, or `auto` for the suite's minimal bound
    #[arg(long, default_value = "auto")]
    dim: String,
    /// Worker threads (defaults to the number of cores)
    #[arg(long)]
    jobs: Option<usize>,
    /// Report path (stdout when omitted)
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct BerezinArgs {
    /// Operator spec, e.g. pi:0:3 or identity
    #[arg(long)]
    op: String,
    /// Disc point, e.g. 0.6+0.2i or 0.85@0.628
    #[arg(long)]
    lambda: String,
    /// Truncation, or `auto`; explicit values below the bound are raised
    #[arg(long, default_value = "auto")]
    dim: String,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct RadialArgs {
    #[arg(long)]
    op: String,
    /// Comma-separated increasing radii in (0,1)
    #[arg(long)]
    radii: String,
    /// Direction angle in radians
    #[arg(long, default_value_t = 0.0)]
    angle: f64,
    #[arg(long, default_value = "auto")]
    dim: String,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct ZetaArgs {
    /// Real part of s (must exceed 1)
    #[arg(long)]
    s: f64,
    #[arg(long)]
    radii: String,
    #[arg(long, default_value_t = 0.0)]
    angle: f64,
    #[arg(long)]
    out: Option<String>,
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let s = s.trim();
    if let Some((r, theta)) = s.split_once('@') {
        let r: f64 = r.parse().map_err(|_| format!("bad modulus in `{s}`"))?;
        let theta: f64 = theta.parse().map_err(|_| format!("bad angle in `{s}`"))?;
        return Ok(Complex64::from_polar(r, theta));
    }
    if let Some(rest) = s.strip_suffix('i') {
        // split at the last +/- that is not a leading sign or exponent sign
        let bytes = rest.as_bytes();
        for i in (1..bytes.len()).rev() {
            let ch = bytes[i] as char;
            if (ch == '+' || ch == '-') && !matches!(bytes[i - 1] as char, 'e' | 'E') {
                let re: f64 = rest[..i].parse().map_err(|_| format!("bad real part in `{s}`"))?;
                let im_str = &rest[i..];
                let im: f64 = if im_str == "+" {
                    1.0
                } else if im_str == "-" {
                    -1.0
                } else {
                    im_str.parse().map_err(|_| format!("bad imaginary part in `{s}`"))?
                };
                return Ok(Complex64::new(re, im));
            }
        }
        let im: f64 = rest.parse().map_err(|_| format!("bad imaginary part in `{s}`"))?;
        return Ok(Complex64::new(0.0, im));
    }
    let re: f64 = s.parse().map_err(|_| format!("bad number `{s}`"))?;
    Ok(Complex64::new(re, 0.0))
}

fn parse_radii(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|tok| tok.trim().parse::<f64>().map_err(|_| format!("bad radius `{tok}`")))
        .collect()
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("bad range `{s}`, expected a..b"))?;
    let a: u64 = a.parse().map_err(|_| format!("bad range start `{a}`"))?;
    let b: u64 = b.parse().map_err(|_| format!("bad range end `{b}`"))?;
    if a < 1 || b < a {
        return Err(format!("bad range `{s}`"));
    }
    Ok((a, b))
}

/// Resolve a function name (optionally with an inline `:s` exponent or
/// nested operand names) to an evaluator.
fn lookup_fn(name: &str, s: Option<f64>) -> Result<ArithmeticFn, String> {
    let parts: Vec<&str> = name.split(':').collect();
    let want_s = |inline: Option<&str>| -> Result<f64, String> {
        if let Some(tok) = inline {
            return tok.parse().map_err(|_| format!("bad exponent `{tok}`"));
        }
        s.ok_or_else(|| format!("`{}` needs --s or an inline exponent", parts[0]))
    };
    match parts.as_slice() {
        ["nu0"] => Ok(ArithmeticFn::nu0()),
        ["nu1"] | ["id"] => Ok(ArithmeticFn::nu1()),
        ["eps"] => Ok(ArithmeticFn::eps()),
        ["mobius"] | ["mu"] => Ok(ArithmeticFn::mobius()),
        ["phi"] => Ok(ArithmeticFn::euler_phi()),
        ["omega"] => Ok(ArithmeticFn::new("omega", false, |n| {
            Complex64::new(arith::omega(n).unwrap() as f64, 0.0)
        })),
        ["sigma"] => Ok(ArithmeticFn::sigma(Complex64::new(want_s(None)?, 0.0))),
        ["sigma", tok] => Ok(ArithmeticFn::sigma(Complex64::new(want_s(Some(tok))?, 0.0))),
        ["invpow"] => Ok(ArithmeticFn::inv_power(Complex64::new(want_s(None)?, 0.0))),
        ["invpow", tok] => Ok(ArithmeticFn::inv_power(Complex64::new(want_s(Some(tok))?, 0.0))),
        ["m"] | ["m", _] => {
            let exp = want_s(parts.get(1).copied())?;
            if exp < 0.0 || exp.fract() != 0.0 {
                return Err(format!("m takes a nonnegative integer exponent, got {exp}"));
            }
            let exp = exp as u32;
            Ok(ArithmeticFn::new(&format!("m_{exp}"), true, move |n| {
                Complex64::new(arith::m_count(exp, n).unwrap() as f64, 0.0)
            }))
        }
        [kind @ ("dirichlet" | "lcm" | "unitary"), a, b] => {
            let a = lookup_fn(a, s)?;
            let b = lookup_fn(b, s)?;
            type ConvFn =
                fn(&ArithmeticFn, &ArithmeticFn, u64) -> fockarith::Result<Complex64>;
            let conv: ConvFn = match *kind {
                "dirichlet" => arith::dirichlet_conv,
                "lcm" => arith::lcm_conv,
                _ => arith::unitary_conv,
            };
            Ok(ArithmeticFn::new(
                &format!("{kind}({},{})", a.name(), b.name()),
                false,
                move |n| conv(&a, &b, n).unwrap(),
            ))
        }
        _ => Err(format!("unknown function `{name}`")),
    }
}

fn format_value(v: Complex64) -> String {
    let near_int = |x: f64| (x - x.round()).abs() < 1e-9;
    if v.im == 0.0 && near_int(v.re) {
        format!("{}", v.re.round() as i64)
    } else if v.im == 0.0 {
        format!("{}", v.re)
    } else {
        format!("{}{:+}i", v.re, v.im)
    }
}

fn emit(out: &Option<String>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| format!("writing {path}: {e}")),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_arith(args: &ArithArgs) -> Result<String, String> {
    let f = lookup_fn(&args.func, args.s)?;
    let (lo, hi) = match (&args.n, &args.range) {
        (Some(n), None) => (*n, *n),
        (None, Some(r)) => parse_range(r)?,
        _ => return Err("give exactly one of --n or --range".into()),
    };
    if lo < 1 {
        return Err("arithmetic functions are defined for n >= 1".into());
    }
    let mut text = String::new();
    for n in lo..=hi {
        text.push_str(&format!("{n}\t{}\n", format_value(f.eval(n))));
    }
    Ok(text)
}

/// Build an operator from a spec; `max_diag_hint` is used for `auto`
/// truncation selection by the Berezin commands.
fn build_operator(kind: &str, j: u64, n: Option<u64>, alpha: Option<&str>, mode: &str, dim: usize)
    -> Result<FockOperator, String>
{
    let need_n = || n.ok_or_else(|| format!("`{kind}` needs --n"));
    let mode = match mode {
        "normalized" => ProjectorMode::Normalized,
        "literal" => ProjectorMode::Literal,
        other => return Err(format!("unknown mode `{other}`")),
    };
    let op = match kind {
        "identity" => Ok(FockOperator::identity(dim)),
        "pi" => projector(j, need_n()?, dim, mode),
        "pibar" => fock::projector_bar(j, need_n()?, dim),
        "rotated" => rotated(need_n()?, dim),
        "c" => fock::ramanujan_c(j, need_n()?, dim),
        "t" => fock::ramanujan_t(j, need_n()?, dim),
        "number" => {
            let name = alpha.ok_or("`number` needs --alpha")?;
            fock::number_op(&lookup_fn(name, None)?, j, dim)
        }
        other => return Err(format!("unknown operator kind `{other}`")),
    };
    op.map_err(|e| e.to_string())
}

fn cmd_op(args: &OpArgs) -> Result<String, String> {
    let op = build_operator(
        &args.kind,
        args.j,
        args.n,
        args.alpha.as_deref(),
        &args.mode,
        args.dim,
    )?;
    let mut json = serde_json::to_string_pretty(&op.to_record())
        .map_err(|e| e.to_string())?;
    json.push('\n');
    Ok(json)
}

/// Operator spec `kind[:a[:b]]` as used by the Berezin commands.
fn parse_op_spec(spec: &str, dim: usize) -> Result<FockOperator, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |tok: &str| tok.parse::<u64>().map_err(|_| format!("bad number `{tok}` in `{spec}`"));
    match parts.as_slice() {
        ["identity"] => build_operator("identity", 0, None, None, "normalized", dim),
        [k @ ("pi" | "pibar" | "c" | "t"), j, n] => {
            build_operator(k, num(j)?, Some(num(n)?), None, "normalized", dim)
        }
        ["rotated", n] => build_operator("rotated", 0, Some(num(n)?), None, "normalized", dim),
        ["number", alpha, j] => build_operator("number", num(j)?, None, Some(alpha), "normalized", dim),
        _ => Err(format!("bad operator spec `{spec}`")),
    }
}

/// `auto` picks the smallest truncation with kernel tail below 1e-12,
/// clamped to [64, 65536]; explicit dims may only raise it.
fn resolve_dim(dim_flag: &str, points: &[DiscPoint]) -> Result<usize, String> {
    let auto = points
        .iter()
        .map(|p| min_dim(p, 1e-12))
        .max()
        .unwrap_or(64)
        .clamp(64, 65_536);
    match dim_flag {
        "auto" => Ok(auto),
        tok => {
            let d: usize = tok.parse().map_err(|_| format!("bad dim `{tok}`"))?;
            Ok(d.max(auto))
        }
    }
}

const CSV_HEADER: &str = "radius,direction-phase,value-re,value-im,error-bound\n";

fn cmd_berezin(args: &BerezinArgs) -> Result<String, String> {
    let lambda = parse_complex(&args.lambda)?;
    let point = DiscPoint::new(lambda).map_err(|e| e.to_string())?;
    let dim = resolve_dim(&args.dim, &[point])?;
    let op = parse_op_spec(&args.op, dim)?;
    let b = berezin(&op, &point).map_err(|e| e.to_string())?;
    Ok(format!(
        "{CSV_HEADER}{},{},{},{},{:e}\n",
        lambda.norm(),
        lambda.arg(),
        b.value.re,
        b.value.im,
        b.error_bound
    ))
}

fn cmd_radial(args: &RadialArgs) -> Result<String, String> {
    let schedule = RadialSchedule::new(parse_radii(&args.radii)?, args.angle)
        .map_err(|e| e.to_string())?;
    let points = schedule.points().map_err(|e| e.to_string())?;
    let dim = resolve_dim(&args.dim, &points)?;
    let op = parse_op_spec(&args.op, dim)?;
    let mut text = String::from(CSV_HEADER);
    for (r, p) in schedule.radii().iter().zip(&points) {
        let b = berezin(&op, p).map_err(|e| e.to_string())?;
        text.push_str(&format!(
            "{r},{},{},{},{:e}\n",
            args.angle, b.value.re, b.value.im, b.error_bound
        ));
    }
    Ok(text)
}

fn cmd_zeta(args: &ZetaArgs) -> Result<String, String> {
    let s = Complex64::new(args.s, 0.0);
    let schedule = RadialSchedule::new(parse_radii(&args.radii)?, args.angle)
        .map_err(|e| e.to_string())?;
    let mut text = String::from(CSV_HEADER);
    for (r, p) in schedule.radii().iter().zip(schedule.points().map_err(|e| e.to_string())?) {
        let v = berezin::berezin_zeta(s, &p).map_err(|e| e.to_string())?;
        // series is summed to a fixed tail bound
        text.push_str(&format!("{r},{},{},{},1e-12\n", args.angle, v.re, v.im));
    }
    Ok(text)
}

fn suite_range(args: &VerifyArgs, default_max: u64) -> (u64, u64) {
    match args.n {
        Some(n) => (n, n),
        None => (1, args.nmax.unwrap_or(default_max)),
    }
}

fn explicit_dim(dim_flag: &str) -> Result<Option<usize>, String> {
    match dim_flag {
        "auto" => Ok(None),
        tok => tok
            .parse::<usize>()
            .map(Some)
            .map_err(|_| format!("bad dim `{tok}`")),
    }
}

fn run_suite(args: &VerifyArgs) -> Result<Vec<IdentityCheck>, String> {
    let dim_override = explicit_dim(&args.dim)?;
    let dim_for = |auto: usize| dim_override.map_or(auto, |d| d.max(auto));
    let err = |e: fockarith::Error| e.to_string();
    match args.suite.as_str() {
        "theorem1" => {
            let (lo, hi) = suite_range(args, 12);
            let pairs: Vec<(u64, u64)> =
                (lo..=hi).flat_map(|n| (lo..=hi).map(move |m| (n, m))).collect();
            pairs
                .par_iter()
                .map(|&(n, m)| {
                    let dim = dim_for((4 * arith::lcm(n, m)) as usize);
                    let mut dev = 0.0f64;
                    for k in 0..n {
                        for l in 0..m {
                            let rep = theorem1_product(k, n, l, m, dim).map_err(err)?;
                            dev = dev.max(rep.product.max_deviation(&rep.predicted).map_err(err)?);
                        }
                    }
                    Ok(IdentityCheck::new("theorem1", dev, 0.0).at_pair(n, m))
                })
                .collect()
        }
        "bb2" => {
            let (_, hi) = suite_range(args, 24);
            let dim = dim_for(64);
            [0u64, 1, 2]
                .par_iter()
                .map(|&j| {
                    let pj = fock::OperatorSeq::projectors(j, dim, ProjectorMode::Normalized);
                    let violations = conv::check_extended_multiplicative(&pj, hi);
                    let dev = violations.iter().map(|v| v.2).fold(0.0, f64::max);
                    Ok(IdentityCheck::new("bb2", dev, 1e-12)
                        .with_note(&format!("j={j}, nm <= {hi}")))
                })
                .collect()
        }
        "bident" => {
            let (_, hi) = suite_range(args, 16);
            let pairs = [
                (ArithmeticFn::nu0(), ArithmeticFn::nu0()),
                (ArithmeticFn::mobius(), ArithmeticFn::nu0()),
                (ArithmeticFn::euler_phi(), ArithmeticFn::nu1()),
            ];
            let mut out = Vec::new();
            for (a, b) in &pairs {
                for j in [0u64, 1] {
                    let dim = dim_for((j + 2 * hi) as usize);
                    out.extend(conv::verify_b_identities(a, b, j, hi, dim).map_err(err)?);
                }
            }
            Ok(out)
        }
        "prop1" => {
            let dim = dim_for(256);
            let pairs = [
                (ArithmeticFn::nu0(), ArithmeticFn::nu0()),
                (ArithmeticFn::euler_phi(), ArithmeticFn::eps()),
                (ArithmeticFn::mobius(), ArithmeticFn::nu1()),
            ];
            let mut out = Vec::new();
            for (a, b) in &pairs {
                for j in [0u64, 1, 3] {
                    out.extend(conv::proposition1_check(a, b, j, dim).map_err(err)?);
                }
            }
            Ok(out)
        }
        "ref" => {
            let (lo, hi) = suite_range(args, 12);
            let point = DiscPoint::new(Complex64::from_polar(0.7, std::f64::consts::PI / 7.0))
                .map_err(err)?;
            let ns: Vec<u64> = (lo..=hi).collect();
            let nested: Vec<Vec<IdentityCheck>> = ns
                .par_iter()
                .map(|&n| {
                    let mut checks = Vec::new();
                    for j in [0u64, 1] {
                        checks.extend(check_ref_identities(n, j, &point).map_err(err)?);
                    }
                    Ok::<_, String>(checks)
                })
                .collect::<Result<_, _>>()?;
            Ok(nested.into_iter().flatten().collect())
        }
        "rotated" => {
            let (lo, hi) = suite_range(args, 24);
            let dim = dim_for((4 * hi) as usize);
            (lo..=hi)
                .into_par_iter()
                .map(|n| {
                    let s = rotated(n, dim).map_err(err)?;
                    let mut p = FockOperator::identity(dim);
                    for _ in 0..n {
                        p = p.mul(&s).map_err(err)?;
                    }
                    let mut dev = p.max_deviation(&FockOperator::identity(dim)).map_err(err)?;
                    for j in 0..n {
                        let inv = projector_from_rotated(j, n, dim).map_err(err)?;
                        let direct =
                            projector(j, n, dim, ProjectorMode::Normalized).map_err(err)?;
                        dev = dev.max(inv.max_deviation(&direct).map_err(err)?);
                    }
                    Ok(IdentityCheck::new("rotated", dev, 1e-12).at_n(n))
                })
                .collect()
        }
        "completeness" => {
            let (lo, hi) = suite_range(args, 64);
            let dim = dim_for(128);
            (lo..=hi)
                .into_par_iter()
                .map(|n| {
                    let mut sum = FockOperator::zero(dim);
                    for j in 0..n {
                        sum = sum
                            .add(&projector(j, n, dim, ProjectorMode::Normalized).map_err(err)?)
                            .map_err(err)?;
                    }
                    let dev = sum.max_deviation(&FockOperator::identity(dim)).map_err(err)?;
                    Ok(IdentityCheck::new("completeness", dev, 0.0).at_n(n))
                })
                .collect()
        }
        "progression" => {
            let (lo, hi) = suite_range(args, 12);
            (lo..=hi)
                .into_par_iter()
                .map(|n| {
                    let mut dev = 0.0f64;
                    for j in 0..n {
                        for r in 1..=6u64 {
                            let dim = dim_for((4 * n * r) as usize);
                            dev = dev
                                .max(progression_split(j, n, r, dim).map_err(err)?.max_deviation);
                        }
                    }
                    Ok(IdentityCheck::new("progression", dev, 0.0).at_n(n))
                })
                .collect()
        }
        other => Err(format!("unknown suite `{other}`")),
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<(String, bool), String> {
    if let Some(jobs) = args.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    let checks = run_suite(args)?;
    let clean = !checks.iter().any(|c| c.is_violation());
    let mut json = serde_json::to_string_pretty(&checks).map_err(|e| e.to_string())?;
    json.push('\n');
    Ok((json, clean))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (text, clean, out) = match &cli.command {
        Command::Arith(args) => match cmd_arith(args) {
            Ok(t) => (t, true, None),
            Err(e) => return usage_error(&e),
        },
        Command::Op(args) => match cmd_op(args) {
            Ok(t) => (t, true, args.out.clone()),
            Err(e) => return usage_error(&e),
        },
        Command::Verify(args) => match cmd_verify(args) {
            Ok((t, clean)) => (t, clean, args.out.clone()),
            Err(e) => return usage_error(&e),
        },
        Command::Berezin(args) => match cmd_berezin(args) {
            Ok(t) => (t, true, args.out.clone()),
            Err(e) => return usage_error(&e),
        },
        Command::Radial(args) => match cmd_radial(args) {
            Ok(t) => (t, true, args.out.clone()),
            Err(e) => return usage_error(&e),
        },
        Command::Zeta(args) => match cmd_zeta(args) {
            Ok(t) => (t, true, args.out.clone()),
            Err(e) => return usage_error(&e),
        },
    };
    if let Err(e) = emit(&out, &text) {
        return usage_error(&e);
    }
    if clean {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
