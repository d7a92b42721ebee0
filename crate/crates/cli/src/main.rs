use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use lrdisc::bounds::{c1, c2, eq23_avg_bound, lemma6_check, theorem1_rhs, theorem2_rhs};
use lrdisc::experiment::config::{parse_grid, parse_list, KeyValues};
use lrdisc::experiment::csvio::infer_base;
use lrdisc::experiment::{
    disc_report, gen_csv, multigen_csv, parse_points_csv, run_scan, run_selftest, FieldSpec, RunConfig, ScanMode,
};
use lrdisc::multiseq::{block_points, MultiseqParams};
use lrdisc::seqgen::{theorem1_points, GeneratorParams, PrnPoint};
use lrdisc::{Error, FieldCtx, FieldElement};

#[derive(Parser)]
#[command(
    name = "lrdisc",
    version,
    about = "Discrepancy experiments for digital multistep sequences over finite fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the shifted s-dimensional point sequence as CSV.
    Gen(Common),
    /// Write multisequence block points over an index box as CSV.
    Multigen(Common),
    /// Exact star discrepancy of a point file, optionally with the weighted bound.
    Disc(DiscArgs),
    /// Evaluate an analytic bound.
    Bound(BoundArgs),
    /// Scan all (or sampled) generator parameters and summarize the statistic.
    Scan(Common),
    /// Run the property suites.
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    k: Option<usize>,
    /// Monic modulus coefficients, constant term first, e.g. `2,1,1`.
    #[arg(long)]
    poly: Option<String>,
    /// Element coefficients `c0,c1,...`; multisequence mode separates elements with `;`.
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    b1: Option<u64>,
    #[arg(long)]
    b2: Option<u64>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    /// Block dimensions `s_1,...,s_r`.
    #[arg(long)]
    dims: Option<String>,
    /// Point count, index box such as `3x3`, or a scan grid such as `4,8,16`.
    #[arg(long)]
    n: Option<String>,
    /// One or more values, comma separated.
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct DiscArgs {
    /// CSV written by `gen` or `multigen`.
    input: PathBuf,
    /// Add the weighted exponential-sum bound.
    #[arg(long)]
    theorem_a: bool,
    /// Digit base for the bound; inferred from the common denominator when omitted.
    #[arg(long)]
    base: Option<u64>,
    /// Number of digits for the bound; defaults to `floor(log_b N) + 1`.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundKind {
    Lemma6,
    T1,
    T2,
    Eq23,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(value_enum)]
    kind: BoundKind,
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    t: Option<u64>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long, default_value_t = 1)]
    s: usize,
    #[arg(long, default_value_t = 1)]
    b1: u64,
    #[arg(long, default_value_t = 1)]
    b2: u64,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    dims: Option<String>,
    /// `N`, or `N_1,...,N_r` for the multisequence bound.
    #[arg(long)]
    n: Option<String>,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug)]
enum Failure {
    Invalid(String),
    Suite(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(_) => Failure::Suite(e.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Invalid(msg.into())
}

/// Flag values with fallback to the config file.
struct Settings<'a> {
    flags: &'a Common,
    file: KeyValues,
}

impl<'a> Settings<'a> {
    fn new(flags: &'a Common) -> CliResult<Self> {
        let file = match &flags.config {
            Some(path) => KeyValues::load(path)?,
            None => KeyValues::default(),
        };
        Ok(Self { flags, file })
    }

    fn pick<T: FromStr + Clone>(&self, flag: &Option<T>, key: &str) -> CliResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if let Some(v) = flag {
            return Ok(Some(v.clone()));
        }
        self.file
            .get(key)
            .map(|text| text.parse().map_err(|e| invalid(format!("config key {key}: {e}"))))
            .transpose()
    }

    fn require<T: FromStr + Clone>(&self, flag: &Option<T>, key: &str) -> CliResult<T>
    where
        T::Err: std::fmt::Display,
    {
        self.pick(flag, key)?.ok_or_else(|| invalid(format!("missing --{key}")))
    }

    fn field(&self) -> CliResult<FieldSpec> {
        Ok(FieldSpec {
            p: self.require(&self.flags.p, "p")?,
            k: self.require(&self.flags.k, "k")?,
            poly: self.pick(&self.flags.poly, "poly")?,
        })
    }

    fn format(&self, default: Format) -> CliResult<Format> {
        Ok(self.pick(&self.flags.format, "format")?.unwrap_or(default))
    }

    fn out(&self) -> CliResult<Option<PathBuf>> {
        self.pick(&self.flags.out, "out")
    }
}

fn beta_or_default(ctx: &FieldCtx, text: Option<&str>) -> CliResult<FieldElement> {
    match text {
        Some(t) => Ok(ctx.parse_element(t)?),
        None if ctx.is_primitive(&ctx.generator()) => Ok(ctx.generator()),
        None => ctx
            .enumerate_primitive()
            .into_iter()
            .next()
            .ok_or_else(|| Failure::Suite("field has no primitive root".into())),
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| invalid(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn points_json<I: Into<serde_json::Value>>(rows: Vec<(I, &PrnPoint)>) -> String {
    let rows: Vec<_> = rows
        .into_iter()
        .map(|(index, pt)| {
            let den = pt.denominator();
            let coords: Vec<String> = pt.numerators().iter().map(|n| format!("{n}/{den}")).collect();
            json!({ "n": index.into(), "coords": coords })
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&rows).expect("serializable");
    text.push('\n');
    text
}

fn cmd_gen(args: &Common) -> CliResult<()> {
    let set = Settings::new(args)?;
    let ctx = set.field()?.build()?;
    let alpha = ctx.parse_element(&set.pick(&args.alpha, "alpha")?.unwrap_or_else(|| "1".into()))?;
    let beta = beta_or_default(&ctx, set.pick(&args.beta, "beta")?.as_deref())?;
    let n: usize = match set.pick(&args.n, "n")? {
        Some(t) => t.parse().map_err(|_| invalid(format!("--n {t:?} is not a count")))?,
        None => (ctx.q() - 1) as usize,
    };
    let params = GeneratorParams::new(
        &ctx,
        alpha,
        beta,
        set.pick(&args.b1, "b1")?.unwrap_or(1),
        set.pick(&args.b2, "b2")?.unwrap_or(1),
        set.pick(&args.s, "s")?.unwrap_or(1),
    )?;
    let points = theorem1_points(&params, n)?;
    let text = match set.format(Format::Csv)? {
        Format::Csv => gen_csv(&points)?,
        Format::Json => points_json(points.iter().enumerate().collect()),
    };
    emit(set.out()?.as_deref(), &text)
}

fn parse_elements(ctx: &FieldCtx, text: &str, r: usize, what: &str) -> CliResult<Vec<FieldElement>> {
    let items: Vec<FieldElement> = text
        .split(';')
        .map(|t| ctx.parse_element(t.trim()))
        .collect::<Result<_, _>>()?;
    if items.len() != r {
        return Err(invalid(format!(
            "--{what} lists {} elements, expected r = {r}",
            items.len()
        )));
    }
    Ok(items)
}

fn cmd_multigen(args: &Common) -> CliResult<()> {
    let set = Settings::new(args)?;
    let ctx = set.field()?.build()?;
    let r = set.pick(&args.r, "r")?.unwrap_or(2);
    let s = set.pick(&args.s, "s")?.unwrap_or(1);
    let dims = match set.pick(&args.dims, "dims")? {
        Some(t) => parse_list::<usize>(&t)?,
        None => vec![1; r],
    };
    let alphas = match set.pick(&args.alpha, "alpha")? {
        Some(t) => parse_elements(&ctx, &t, r, "alpha")?,
        None => vec![ctx.one(); r],
    };
    let betas = match set.pick(&args.beta, "beta")? {
        Some(t) => parse_elements(&ctx, &t, r, "beta")?,
        None => vec![beta_or_default(&ctx, None)?; r],
    };
    let box_dims: Vec<usize> = match set.pick(&args.n, "n")? {
        Some(t) => parse_box(&t)?,
        None => vec![2; r],
    };
    let params = MultiseqParams::new(&ctx, s, dims, alphas, betas)?;
    let entries = block_points(&params, &box_dims)?;
    let text = match set.format(Format::Csv)? {
        Format::Csv => multigen_csv(r, &entries)?,
        Format::Json => points_json(entries.iter().map(|(n, p)| (n.0.clone(), p)).collect()),
    };
    emit(set.out()?.as_deref(), &text)
}

/// `3x3` or `3,3`.
fn parse_box(text: &str) -> CliResult<Vec<usize>> {
    let grid = parse_grid(&text.replace(',', "x"))?;
    grid.into_iter()
        .next()
        .map(|v| v.into_iter().map(|x| x as usize).collect())
        .ok_or_else(|| invalid("empty --n"))
}

fn cmd_disc(args: &DiscArgs) -> CliResult<()> {
    let text = std::fs::read_to_string(&args.input).map_err(|e| invalid(format!("{}: {e}", args.input.display())))?;
    let ps = parse_points_csv(&text)?;
    let base = if args.theorem_a {
        let b = args.base.or_else(|| infer_base(ps.denominator()));
        Some(b.ok_or_else(|| invalid("cannot infer a digit base; pass --base"))?)
    } else {
        None
    };
    let report = disc_report(&ps, base, args.m)?;
    let mut out = serde_json::to_string_pretty(&report).expect("serializable");
    out.push('\n');
    emit(args.out.as_deref(), &out)
}

fn need<T>(v: Option<T>, name: &str) -> CliResult<T> {
    v.ok_or_else(|| invalid(format!("missing --{name}")))
}

fn cmd_bound(args: &BoundArgs) -> CliResult<()> {
    let value = match args.kind {
        BoundKind::Lemma6 => {
            let (q, k, t) = (need(args.q, "q")?, need(args.k, "k")?, need(args.t, "t")?);
            let out = lemma6_check(q, k, t)?;
            json!({
                "bound": "lemma6",
                "inputs": { "q": q, "k": k, "T": t },
                "lhs": out.lhs, "lhs_exact": format!("{}/{}", out.lhs_num, out.lhs_den),
                "rhs": out.rhs, "holds": out.holds, "in_range": out.in_range,
            })
        }
        BoundKind::T1 => {
            let p = need(args.p, "p")?;
            let n: u64 = need(args.n.as_deref(), "n")?
                .parse()
                .map_err(|_| invalid("--n must be a count"))?;
            json!({
                "bound": "t1",
                "inputs": { "p": p, "s": args.s, "b1": args.b1, "b2": args.b2, "N": n, "epsilon": args.epsilon },
                "c1": c1(p, args.s, args.b1, args.b2),
                "value": theorem1_rhs(p, args.s, args.b1, args.b2, n, args.epsilon)?,
            })
        }
        BoundKind::T2 => {
            let p = need(args.p, "p")?;
            let r = need(args.r, "r")?;
            let dims = match &args.dims {
                Some(t) => parse_list::<usize>(t)?,
                None => vec![1; r],
            };
            let n_vec = parse_list::<u64>(&need(args.n.clone(), "n")?.replace('x', ","))?;
            json!({
                "bound": "t2",
                "inputs": { "p": p, "r": r, "s": args.s, "dims": dims, "N": n_vec, "epsilon": args.epsilon },
                "c2": c2(p, r, args.s, &dims)?,
                "value": theorem2_rhs(p, r, args.s, &dims, &n_vec, args.epsilon)?,
            })
        }
        BoundKind::Eq23 => {
            let t = need(args.t, "t")?;
            json!({
                "bound": "eq23",
                "inputs": { "b1": args.b1, "s": args.s, "T": t },
                "value": eq23_avg_bound(args.b1, args.s, t)?,
            })
        }
    };
    println!("{}", serde_json::to_string_pretty(&value).expect("serializable"));
    Ok(())
}

fn scan_config(set: &Settings) -> CliResult<RunConfig> {
    let flags = set.flags;
    let r = set.pick(&flags.r, "r")?.unwrap_or(1);
    let mut cfg = RunConfig::single(set.field()?, set.pick(&flags.s, "s")?.unwrap_or(1));
    if r >= 2 {
        cfg.mode = ScanMode::Multi;
        cfg.r = r;
        cfg.dims = match set.pick(&flags.dims, "dims")? {
            Some(t) => parse_list(&t)?,
            None => vec![1; r],
        };
    }
    cfg.b1 = set.pick(&flags.b1, "b1")?.unwrap_or(1);
    cfg.b2 = set.pick(&flags.b2, "b2")?.unwrap_or(1);
    if let Some(t) = set.pick(&flags.n, "n")? {
        cfg.n_grid = parse_grid(&t)?;
    }
    if let Some(t) = set.pick(&flags.epsilon, "epsilon")? {
        cfg.epsilons = parse_list(&t)?;
    }
    cfg.workers = set.pick(&flags.workers, "workers")?.unwrap_or(0);
    cfg.seed = set.pick(&flags.seed, "seed")?.unwrap_or(0);
    cfg.samples = set.pick(&flags.samples, "samples")?;
    Ok(cfg)
}

/// With `--out DIR`, writes `summary.json` and `records.csv` there;
/// otherwise prints the summary (or the records with `--format csv`).
fn cmd_scan(args: &Common) -> CliResult<()> {
    let set = Settings::new(args)?;
    let cfg = scan_config(&set)?;
    let outcome = run_scan(&cfg)?;
    match set.out()? {
        Some(dir) => {
            std::fs::create_dir_all(&dir).map_err(|e| invalid(format!("{}: {e}", dir.display())))?;
            emit(Some(&dir.join("summary.json")), &outcome.summary_json()?)?;
            emit(Some(&dir.join("records.csv")), &outcome.records_csv()?)?;
            let cfg_text = serde_json::to_string_pretty(&cfg).expect("serializable") + "\n";
            emit(Some(&dir.join("config.json")), &cfg_text)
        }
        None => match set.format(Format::Json)? {
            Format::Json => emit(None, &outcome.summary_json()?),
            Format::Csv => emit(None, &outcome.records_csv()?),
        },
    }
}

fn cmd_selftest(args: &SelftestArgs) -> CliResult<()> {
    let results = run_selftest();
    match args.format.unwrap_or(Format::Csv) {
        Format::Json => println!("{}", serde_json::to_string_pretty(&results).expect("serializable")),
        Format::Csv => {
            for r in &results {
                let verdict = if r.passed { "PASS" } else { "FAIL" };
                println!(
                    "{verdict} {:<10} {:>7} cases {:>7} ms  {}",
                    r.name, r.checked, r.elapsed_ms, r.detail
                );
            }
        }
    }
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Suite(format!("failed suites: {}", failed.join(", "))))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Multigen(a) => cmd_multigen(a),
        Command::Disc(a) => cmd_disc(a),
        Command::Bound(a) => cmd_bound(a),
        Command::Scan(a) => cmd_scan(a),
        Command::Selftest(a) => cmd_selftest(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Suite(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
