use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nlfourier::approx::{
    format_exponent, parse_exponent, parse_theorems, sweep_grid, verify_signal, BoxConfig,
    Prepared, ReportContext, Theorem, VerifyReport,
};
use nlfourier::bernstein::{bernstein_sweep, write_sharpness_csv, BernsteinCell};
use nlfourier::corpus::{self, CORPUS_ANGLE, CORPUS_MODULI, DEFAULT_SEED};
use nlfourier::kernels;
use nlfourier::numerics::{GridSpec, Signal};
use nlfourier::transform::{
    analyze, analyze_auto, apply_operator, required_points, CoeffVector, NlPolynomial, Operator,
    Representation,
};
use nlfourier::PhaseParam;

#[derive(Parser, Debug)]
#[command(
    name = "nlfourier",
    version,
    about = "Fourier analysis in the nonlinear phase basis e^{ikθ_a(t)}"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Coefficients c_{-n..n} of a signal.
    Analyze(AnalyzeArgs),
    /// Partial sums / Cesàro means sampled on a grid, with error summary.
    Reconstruct(ReconstructArgs),
    /// Run the inequality checks; exit status 1 if any check fails.
    Verify(VerifyArgs),
    /// Table of Lebesgue constants.
    Lebesgue(LebesgueArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
struct Source {
    /// Built-in signal: square, sawtooth, lipschitz, abs-sin, cos-warped:k=K,
    /// holder:alpha=A, analytic-exp-cos, random-trig:deg=D.
    #[arg(long)]
    signal: Option<String>,
    /// CSV samples `t,value[,imag]` (header and `#` comments allowed).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
struct Output {
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone, Serialize)]
struct AnalyzeArgs {
    #[command(flatten)]
    source: Source,
    /// Phase parameter `modulus[,angle]` (angle in radians).
    #[arg(long, default_value = "0")]
    a: String,
    /// Degree n.
    #[arg(long)]
    n: usize,
    /// Quadrature grid size (power of two). Refined automatically when omitted.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
enum OperatorChoice {
    PartialSum,
    Cesaro,
    Both,
}

#[derive(Args, Debug, Clone, Serialize)]
struct ReconstructArgs {
    #[command(flatten)]
    source: Source,
    /// Coefficient CSV written by `analyze` (instead of a signal).
    #[arg(long)]
    coeffs: Option<PathBuf>,
    /// Phase parameter `modulus[,angle]`; read from the coefficient file when omitted.
    #[arg(long)]
    a: Option<String>,
    /// Degrees: `8`, `2,4,8` or `2..128` (doubling).
    #[arg(long)]
    n: Option<String>,
    /// Exponents for the error summary, e.g. `1,2,inf`.
    #[arg(long, default_value = "1,2,inf")]
    p: String,
    #[arg(long, value_enum, default_value = "both")]
    operator: OperatorChoice,
    /// coeff, kernel_warped, kernel_direct or kernel_half_range.
    #[arg(long, default_value = "coeff")]
    method: String,
    /// Number of output samples on [-π, π).
    #[arg(long, default_value_t = 512)]
    points: usize,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Error summary CSV (stderr when omitted; included in JSON output).
    #[arg(long)]
    summary: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug, Clone, Serialize)]
struct VerifyArgs {
    /// all, jackson, sandwich, lebesgue, lebesgue_lp, near_best, fejer,
    /// fejer_lp, bernstein (comma separated).
    #[arg(long, default_value = "all")]
    theorem: String,
    /// Built-in signals, comma separated (the 16-signal corpus when omitted).
    #[arg(long)]
    signal: Option<String>,
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Phase parameter `modulus[,angle]`, repeatable (corpus moduli at angle π/4 when omitted).
    #[arg(long)]
    a: Vec<String>,
    /// Degrees: list or `lo..hi` doubling.
    #[arg(long)]
    n: Option<String>,
    /// Exponents, e.g. `1,2,4,inf`.
    #[arg(long)]
    p: Option<String>,
    /// Random polynomials per Bernstein cell.
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Bernstein sharpness table `n,|a|,p,max_ratio,bound_constant,pass`.
    #[arg(long)]
    table: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug, Clone, Serialize)]
struct LebesgueArgs {
    /// Degrees: list or `lo..hi` doubling.
    #[arg(long, default_value = "0,1,2..1024")]
    n: String,
    #[command(flatten)]
    output: Output,
}

#[derive(Serialize)]
struct Meta<'a, C: Serialize> {
    version: &'static str,
    command: &'a str,
    config: &'a C,
}

fn meta<'a, C: Serialize>(command: &'a str, config: &'a C) -> Meta<'a, C> {
    Meta {
        version: env!("CARGO_PKG_VERSION"),
        command,
        config,
    }
}

fn parse_a(s: &str) -> Result<PhaseParam> {
    let mut parts = s.split(',').map(str::trim);
    let r: f64 = parts
        .next()
        .unwrap_or("")
        .parse()
        .with_context(|| format!("--a '{s}': expected modulus[,angle]"))?;
    let angle: f64 = match parts.next() {
        Some(t) => t
            .parse()
            .with_context(|| format!("--a '{s}': angle must be a number (radians)"))?,
        None => 0.0,
    };
    if parts.next().is_some() {
        bail!("--a '{s}': expected at most two numbers, modulus[,angle]");
    }
    PhaseParam::new(r, angle).with_context(|| format!("--a '{s}'"))
}

/// `8`, `2,4,8`, `2..128` (doubling from the lower end) or mixtures.
fn parse_degrees(s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: usize = lo.trim().parse().with_context(|| format!("degree range '{part}'"))?;
            let hi: usize = hi.trim().trim_start_matches('=').parse().with_context(|| format!("degree range '{part}'"))?;
            if lo > hi {
                bail!("degree range '{part}' is empty");
            }
            if lo == 0 {
                out.push(0);
            }
            let mut n = lo.max(1);
            while n <= hi {
                out.push(n);
                n *= 2;
            }
        } else {
            out.push(part.parse().with_context(|| format!("degree '{part}' is not a nonnegative integer"))?);
        }
    }
    out.sort_unstable();
    out.dedup();
    if out.is_empty() {
        bail!("empty degree list");
    }
    Ok(out)
}

fn parse_exponents(s: &str) -> Result<Vec<f64>> {
    let ps = s
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| parse_exponent(p).with_context(|| format!("exponent '{p}' (need p ≥ 1 or inf)")))
        .collect::<Result<Vec<f64>>>()?;
    if ps.is_empty() {
        bail!("empty exponent list");
    }
    Ok(ps)
}

fn parse_grid(g: Option<usize>) -> Result<Option<GridSpec>> {
    g.map(|n| {
        if !n.is_power_of_two() {
            bail!("--grid {n}: must be a power of two");
        }
        GridSpec::new(n).with_context(|| format!("--grid {n}"))
    })
    .transpose()
}

fn load_signal(src: &Source, a: PhaseParam, seed: u64) -> Result<Signal> {
    match (&src.signal, &src.csv) {
        (Some(_), Some(_)) => bail!("give either --signal or --csv, not both"),
        (None, None) => bail!("no input: give --signal <name> or --csv <path>"),
        (Some(name), None) => Ok(corpus::builtin(name, a, seed)?),
        (None, Some(path)) => {
            Signal::from_csv_path(path).with_context(|| format!("reading {}", path.display()))
        }
    }
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn write_json<T: Serialize>(w: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn num(x: f64) -> String {
    if x.is_infinite() {
        format_exponent(x)
    } else {
        x.to_string()
    }
}

#[derive(Serialize)]
struct CoeffRow {
    k: i64,
    re: f64,
    im: f64,
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<()> {
    let a = parse_a(&args.a)?;
    let f = load_signal(&args.source, a, args.seed)?;
    let (coeffs, grid) = match parse_grid(args.grid)? {
        Some(g) => (analyze(&f, &a, args.n, &g)?, g),
        None => {
            let r = analyze_auto(&f, &a, args.n)?;
            if !r.converged {
                log::warn!("coefficients did not settle before the grid cap");
            }
            (r.value, r.grid)
        }
    };
    let mut w = sink(&args.output.out)?;
    match args.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            writeln!(w, "# signal={}", f.name())?;
            writeln!(w, "# a={},{}", a.modulus(), a.angle())?;
            writeln!(w, "# n={}", args.n)?;
            writeln!(w, "# grid={}", grid.points())?;
            coeffs.write_csv(&mut w)?;
            w.flush()?;
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                meta: Meta<'a, AnalyzeArgs>,
                signal: &'a str,
                a: PhaseParam,
                n: usize,
                grid: usize,
                coefficients: Vec<CoeffRow>,
            }
            let doc = Doc {
                meta: meta("analyze", args),
                signal: f.name(),
                a,
                n: args.n,
                grid: grid.points(),
                coefficients: coeffs.iter().map(|(k, c)| CoeffRow { k, re: c.re, im: c.im }).collect(),
            };
            write_json(&mut *w, &doc)?;
        }
    }
    Ok(())
}

/// `a` from a `# a=modulus,angle` line of an `analyze` coefficient file.
fn a_from_header(text: &str) -> Option<String> {
    text.lines()
        .take_while(|l| l.starts_with('#'))
        .find_map(|l| l.trim_start_matches('#').trim().strip_prefix("a=").map(str::to_string))
}

#[derive(Serialize)]
struct SampleRow {
    operator: String,
    method: String,
    n: usize,
    x: f64,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct ErrorRow {
    operator: String,
    n: usize,
    #[serde(serialize_with = "ser_p")]
    p: f64,
    error: f64,
}

fn ser_p<S: serde::Serializer>(p: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    nlfourier::approx::exponent_serde::serialize(p, s)
}

fn cmd_reconstruct(args: &ReconstructArgs) -> Result<()> {
    let ops: Vec<Operator> = match args.operator {
        OperatorChoice::PartialSum => vec![Operator::PartialSum],
        OperatorChoice::Cesaro => vec![Operator::Cesaro],
        OperatorChoice::Both => vec![Operator::PartialSum, Operator::Cesaro],
    };
    let rep: Representation = args
        .method
        .parse()
        .with_context(|| format!("--method '{}'", args.method))?;
    if args.points < 2 {
        bail!("--points must be at least 2");
    }
    let ps = parse_exponents(&args.p)?;
    let xs: Vec<f64> = (0..args.points)
        .map(|j| -std::f64::consts::PI + 2.0 * std::f64::consts::PI * j as f64 / args.points as f64)
        .collect();
    let mut samples = Vec::new();
    let mut errors = Vec::new();

    if let Some(path) = &args.coeffs {
        if args.source.signal.is_some() || args.source.csv.is_some() {
            bail!("--coeffs cannot be combined with --signal or --csv");
        }
        if rep != Representation::Coefficient {
            bail!("--coeffs reconstructs from coefficients; use --method coeff");
        }
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let a_text = match (&args.a, a_from_header(&text)) {
            (Some(s), _) => s.clone(),
            (None, Some(h)) => h,
            (None, None) => bail!("{}: no `# a=` header; pass --a", path.display()),
        };
        let a = parse_a(&a_text)?;
        let cv = CoeffVector::read_csv(a, text.as_bytes()).with_context(|| format!("parsing {}", path.display()))?;
        let ns = match &args.n {
            Some(s) => parse_degrees(s)?,
            None => vec![cv.degree()],
        };
        for &n in &ns {
            if n > cv.degree() {
                bail!("--n {n} exceeds the degree {} of the coefficient file", cv.degree());
            }
            for &op in &ops {
                let c = cv.truncated(n);
                let poly = NlPolynomial::new(match op {
                    Operator::PartialSum => c,
                    Operator::Cesaro => c.fejer_weighted(n),
                });
                for &x in &xs {
                    let v = poly.eval(x);
                    samples.push(SampleRow { operator: op.to_string(), method: rep.to_string(), n, x, re: v.re, im: v.im });
                }
            }
        }
    } else {
        let a = parse_a(args.a.as_deref().unwrap_or("0"))?;
        let f = load_signal(&args.source, a, args.seed)?;
        let ns = parse_degrees(args.n.as_deref().context("--n is required with a signal")?)?;
        let n_max = *ns.last().unwrap();
        let grid = match parse_grid(args.grid)? {
            Some(g) => g,
            None => GridSpec::pow2(sweep_grid(&a).points().max(2 * required_points(&a, n_max))),
        };
        let prep = Prepared::new(&f, &a, &grid)?;
        for &n in &ns {
            for &op in &ops {
                let s = apply_operator(&f, &a, n, op, rep, &grid)?;
                for &x in &xs {
                    let v = s.eval(x);
                    samples.push(SampleRow { operator: op.to_string(), method: rep.to_string(), n, x, re: v.re, im: v.im });
                }
                for &p in &ps {
                    errors.push(ErrorRow { operator: op.to_string(), n, p, error: prep.operator_error(op, n, p)? });
                }
            }
        }
    }

    let mut w = sink(&args.output.out)?;
    match args.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut c = csv::Writer::from_writer(&mut w);
            c.write_record(["operator", "method", "n", "x", "re", "im"])?;
            for s in &samples {
                c.write_record([s.operator.clone(), s.method.clone(), s.n.to_string(), num(s.x), num(s.re), num(s.im)])?;
            }
            c.flush()?;
            drop(c);
            w.flush()?;
            if !errors.is_empty() {
                let summary: Box<dyn Write> = match &args.summary {
                    Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
                    None => Box::new(io::stderr()),
                };
                let mut c = csv::Writer::from_writer(summary);
                c.write_record(["operator", "n", "p", "error"])?;
                for e in &errors {
                    c.write_record([e.operator.clone(), e.n.to_string(), format_exponent(e.p), num(e.error)])?;
                }
                c.flush()?;
            }
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                meta: Meta<'a, ReconstructArgs>,
                samples: &'a [SampleRow],
                errors: &'a [ErrorRow],
            }
            write_json(&mut *w, &Doc { meta: meta("reconstruct", args), samples: &samples, errors: &errors })?;
        }
    }
    Ok(())
}

fn bernstein_reports(cells: &[BernsteinCell], trials: usize) -> Vec<VerifyReport> {
    cells
        .iter()
        .map(|c| {
            let w = &c.worst;
            let a = PhaseParam::real(c.modulus).expect("sweep moduli are valid");
            let ctx = ReportContext::new(&a, c.n, c.p, &format!("random-polynomial(trials={trials})"), 0);
            let rhs = w.rhs_constant * w.norm;
            let mut r = VerifyReport::new(Theorem::Bernstein, w.lhs, rhs, w.rhs_constant, w.tolerance, ctx)
                .with_detail("max_ratio", c.max_ratio)
                .with_detail("bound_constant", c.bound_constant)
                .with_detail("violations", c.violations as f64)
                .with_detail("within_exponent_2_plus_2_over_p", w.within_exponent_2_plus_2_over_p as u8 as f64);
            if let Some(e) = w.exponent_needed {
                r = r.with_detail("exponent_needed", e);
            }
            r.pass = c.pass;
            r
        })
        .collect()
}

fn cmd_verify(args: &VerifyArgs) -> Result<bool> {
    let mut theorems: Vec<Theorem> = Vec::new();
    for t in args.theorem.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        theorems.extend(parse_theorems(t)?);
    }
    theorems.sort();
    theorems.dedup();
    let params: Vec<PhaseParam> = if args.a.is_empty() {
        CORPUS_MODULI.iter().map(|&r| PhaseParam::new(r, CORPUS_ANGLE)).collect::<nlfourier::Result<_>>()?
    } else {
        args.a.iter().map(|s| parse_a(s)).collect::<Result<_>>()?
    };
    let mut reports = Vec::new();
    let mut table = Vec::new();

    let approx: Vec<Theorem> = theorems.iter().copied().filter(|t| *t != Theorem::Bernstein).collect();
    if !approx.is_empty() {
        let ns = parse_degrees(args.n.as_deref().unwrap_or("2..128"))?;
        let ps = parse_exponents(args.p.as_deref().unwrap_or("1,2,4,inf"))?;
        let cfg = BoxConfig { ns, ps, theorems: approx.clone(), options: Default::default() };
        for a in &params {
            let signals: Vec<Signal> = match (&args.signal, &args.csv) {
                (Some(_), Some(_)) => bail!("give either --signal or --csv, not both"),
                (Some(list), None) => list
                    .split(';')
                    .flat_map(split_signal_list)
                    .map(|s| corpus::builtin(&s, *a, args.seed).map_err(anyhow::Error::from))
                    .collect::<Result<_>>()?,
                (None, Some(p)) => vec![Signal::from_csv_path(p).with_context(|| format!("reading {}", p.display()))?],
                (None, None) => corpus::corpus(*a, args.seed),
            };
            for f in &signals {
                if !f.smoothness().is_continuous() {
                    for t in approx.iter().filter(|t| t.needs_continuity()) {
                        log::info!("{t} skipped for {} (not continuous)", f.name());
                    }
                }
                log::info!("verifying {} at a = {a}", f.name());
                reports.extend(verify_signal(f, a, &cfg)?);
            }
        }
    }

    if theorems.contains(&Theorem::Bernstein) {
        let degrees = parse_degrees(args.n.as_deref().unwrap_or("1..64"))?;
        if degrees.contains(&0) {
            bail!("Bernstein check needs degrees ≥ 1");
        }
        let ps: Vec<f64> = parse_exponents(args.p.as_deref().unwrap_or("1,2,4"))?
            .into_iter()
            .filter(|p| p.is_finite())
            .collect();
        if ps.is_empty() {
            bail!("Bernstein check is for 1 ≤ p < ∞; give a finite exponent in --p");
        }
        let moduli: Vec<f64> = params.iter().map(|a| a.modulus()).collect();
        let cells = bernstein_sweep(&degrees, &moduli, &ps, args.trials, args.seed)?;
        reports.extend(bernstein_reports(&cells, args.trials));
        table = cells;
    }

    if let Some(path) = &args.table {
        if table.is_empty() {
            bail!("--table needs the bernstein check in --theorem");
        }
        write_sharpness_csv(&table, File::create(path).with_context(|| format!("creating {}", path.display()))?)?;
    }

    let mut w = sink(&args.output.out)?;
    match args.output.format.unwrap_or(Format::Json) {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                meta: Meta<'a, VerifyArgs>,
                reports: &'a [VerifyReport],
            }
            write_json(&mut *w, &Doc { meta: meta("verify", args), reports: &reports })?;
        }
        Format::Csv => {
            let mut c = csv::Writer::from_writer(&mut w);
            c.write_record(["theorem_id", "a", "n", "p", "lhs", "rhs", "pass", "signal"])?;
            for r in &reports {
                c.write_record([
                    r.theorem_id.clone(),
                    num(r.context.modulus),
                    r.context.n.to_string(),
                    format_exponent(r.context.p),
                    num(r.lhs),
                    num(r.rhs),
                    r.pass.to_string(),
                    r.context.signal.clone(),
                ])?;
            }
            c.flush()?;
        }
    }
    w.flush()?;

    let failed: Vec<&VerifyReport> = reports.iter().filter(|r| !r.pass).collect();
    for r in &failed {
        eprintln!(
            "FAIL {} signal={} |a|={} angle={} n={} p={}: lhs {} > rhs {}",
            r.theorem_id,
            r.context.signal,
            r.context.modulus,
            r.context.angle,
            r.context.n,
            format_exponent(r.context.p),
            r.lhs,
            r.rhs
        );
    }
    eprintln!("{} checks, {} failed", reports.len(), failed.len());
    Ok(failed.is_empty())
}

/// Split `a,b,holder:alpha=0.5` on commas that start a new signal name.
fn split_signal_list(s: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let continues = part.contains('=') && !part.contains(':');
        match out.last_mut() {
            Some(last) if continues => {
                last.push(',');
                last.push_str(part);
            }
            _ => out.push(part.to_string()),
        }
    }
    out
}

fn cmd_lebesgue(args: &LebesgueArgs) -> Result<()> {
    let ns = parse_degrees(&args.n)?;
    #[derive(Serialize)]
    struct Row {
        n: usize,
        lambda_n: f64,
        lambda_n_over_log_n: Option<f64>,
    }
    let rows: Vec<Row> = ns
        .iter()
        .map(|&n| {
            let l = kernels::lebesgue(n);
            Row { n, lambda_n: l, lambda_n_over_log_n: (n >= 2).then(|| l / (n as f64).ln()) }
        })
        .collect();
    let mut w = sink(&args.output.out)?;
    match args.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut c = csv::Writer::from_writer(&mut w);
            c.write_record(["n", "lambda_n", "lambda_n_over_log_n"])?;
            for r in &rows {
                c.write_record([r.n.to_string(), num(r.lambda_n), r.lambda_n_over_log_n.map(num).unwrap_or_default()])?;
            }
            c.flush()?;
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                meta: Meta<'a, LebesgueArgs>,
                rows: &'a [Row],
            }
            write_json(&mut *w, &Doc { meta: meta("lebesgue", args), rows: &rows })?;
        }
    }
    w.flush()?;
    Ok(())
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Analyze(a) => cmd_analyze(a).map(|_| true),
        Command::Reconstruct(a) => cmd_reconstruct(a).map(|_| true),
        Command::Verify(a) => cmd_verify(a),
        Command::Lebesgue(a) => cmd_lebesgue(a).map(|_| true),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_lists() {
        assert_eq!(parse_degrees("8").unwrap(), vec![8]);
        assert_eq!(parse_degrees("2..32").unwrap(), vec![2, 4, 8, 16, 32]);
        assert_eq!(parse_degrees("0,1,2..8").unwrap(), vec![0, 1, 2, 4, 8]);
        assert_eq!(parse_degrees("3..20").unwrap(), vec![3, 6, 12]);
        assert!(parse_degrees("8..2").is_err());
        assert!(parse_degrees("x").is_err());
    }

    #[test]
    fn phase_argument() {
        let a = parse_a("0.3,0.25").unwrap();
        assert_eq!(a.modulus(), 0.3);
        assert!(a.angle() == 0.25);
        assert_eq!(parse_a("0.5").unwrap().angle(), 0.0);
        assert!(parse_a("1.0").is_err());
        assert!(parse_a("0.1,0.2,0.3").is_err());
    }

    #[test]
    fn signal_lists() {
        assert_eq!(split_signal_list("square,holder:alpha=0.5,abs-sin"), vec!["square", "holder:alpha=0.5", "abs-sin"]);
    }

    #[test]
    fn header_parsing() {
        assert_eq!(a_from_header("# signal=x\n# a=0.5,0.1\nk,re,im\n").as_deref(), Some("0.5,0.1"));
        assert_eq!(a_from_header("k,re,im\n"), None);
    }
}
