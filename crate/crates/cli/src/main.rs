//! `icevertex` command-line front end.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use icevertex::asm::enumerate_matrices;
use icevertex::counting::{count_nk, count_total_with, CountMethod, CountReport};
use icevertex::detform::{det_partition, det_partition_appendix, Formula};
use icevertex::lattice::{enumerate_states, serialize_state, LatticeSize};
use icevertex::linalg::{rel_diff, C64};
use icevertex::rng::labeled_rng;
use icevertex::tolerances::{Tolerances, GENERIC_EPS};
use icevertex::verify::{run_suite, VerifyConfig, CHECKS};
use icevertex::weights::{partition_brute_parallel, sample_params, ModelParams};
use icevertex::Error;
use serde_json::json;

/// Enumeration above this `n` needs `--force`.
const ENUMERATE_MAX_N: usize = 5;
/// Brute-force sums and counts above this `n` need `--force`.
const BRUTE_MAX_N: usize = 4;

#[derive(Parser, Debug)]
#[command(
    name = "icevertex",
    version,
    about = "Six-vertex model with domain-wall boundaries and a reflecting end"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Stream every state (or matrix) of a lattice as JSON lines.
    Enumerate(EnumerateArgs),
    /// Evaluate the partition function by brute force and by determinant.
    Partition(PartitionArgs),
    /// Exact number of states with k positive turns.
    Count(CountArgs),
    /// Run verification checks and emit a JSON report.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct SizeArgs {
    /// Number of double rows.
    #[arg(long)]
    n: usize,
    /// Number of columns.
    #[arg(long)]
    m: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    State,
    Asm,
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    #[command(flatten)]
    size: SizeArgs,
    #[arg(long, value_enum, default_value_t = Kind::State)]
    kind: Kind,
    /// Write records here; the summary then goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Lift the size guard.
    #[arg(long)]
    force: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum PartitionMethod {
    Brute,
    Det,
    Both,
}

#[derive(Args, Debug)]
struct PartitionArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Parameter file; without it parameters are drawn from `--seed`.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = PartitionMethod::Both)]
    method: PartitionMethod,
    #[arg(long, value_enum, default_value_t = FormulaArg::IzerginKorepin)]
    formula: FormulaArg,
    /// Lift the brute-force size guard.
    #[arg(long)]
    force: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FormulaArg {
    IzerginKorepin,
    FodaWheeler,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Wilson,
    Hypersum,
    Brute,
}

impl From<MethodArg> for CountMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Wilson => CountMethod::Wilson,
            MethodArg::Hypersum => CountMethod::Hypersum,
            MethodArg::Brute => CountMethod::Brute,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug)]
struct CountArgs {
    #[command(flatten)]
    size: SizeArgs,
    /// Report only this k.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum, default_value_t = MethodArg::Wilson)]
    method: MethodArg,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Lift the size guard of `--method brute`.
    #[arg(long)]
    force: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Check to run (repeatable); `all` runs every check.
    #[arg(long = "check", default_value = "all")]
    checks: Vec<String>,
    /// Largest n examined.
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Restrict lattice checks to the single size (n, m).
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Parameter draws per lattice size.
    #[arg(long, default_value_t = 20)]
    draws: usize,
    /// Draws for the Yang-Baxter and reflection checks.
    #[arg(long, default_value_t = 100)]
    algebraic_draws: usize,
    /// Tolerance override NAME=VALUE (repeatable).
    #[arg(long = "tol")]
    tols: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Process exit status for an engine error.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Size { .. } | Error::Domain(_) | Error::Parse { .. } => 2,
        Error::Io(_) => 3,
        Error::Pole { .. } => 4,
        Error::NonIntegerResult { .. } => 5,
        _ => 1,
    }
}

fn io_err(path: &Path, e: io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| io_err(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn pair(z: C64) -> serde_json::Value {
    json!([z.re, z.im])
}

fn enumerate(args: &EnumerateArgs) -> Result<bool, Error> {
    let size = LatticeSize::new(args.size.n, args.size.m)?;
    if size.n() > ENUMERATE_MAX_N && !args.force {
        return Err(Error::Domain(format!(
            "enumeration is limited to n <= {ENUMERATE_MAX_N}; pass --force to go further"
        )));
    }
    let start = Instant::now();
    let mut out = open_out(args.out.as_deref())?;
    let mut count = 0u64;
    match args.kind {
        Kind::State => {
            for st in enumerate_states(size) {
                let rec = json!({ "id": count, "state": serialize_state(&st)? });
                writeln!(out, "{rec}")?;
                count += 1;
            }
        }
        Kind::Asm => {
            for mat in enumerate_matrices(size) {
                let rec = json!({ "id": count, "matrix": mat.to_string() });
                writeln!(out, "{rec}")?;
                count += 1;
            }
        }
    }
    out.flush()?;
    drop(out);
    let summary = json!({ "count": count, "elapsed": start.elapsed().as_secs_f64() });
    if args.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(true)
}

fn load_params(args: &PartitionArgs) -> Result<ModelParams, Error> {
    if let Some(path) = &args.params {
        let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        let p = ModelParams::from_json(&text)?;
        if args.n.is_some_and(|n| n != p.n()) || args.m.is_some_and(|m| m != p.m()) {
            return Err(Error::Domain(
                "--n/--m disagree with the parameter file".into(),
            ));
        }
        return Ok(p);
    }
    let (n, m) = match (args.n, args.m) {
        (Some(n), Some(m)) => (n, m),
        _ => return Err(Error::Domain("give --params or both --n and --m".into())),
    };
    LatticeSize::new(n, m)?;
    Ok(sample_params(
        &mut labeled_rng(args.seed, "partition"),
        n,
        m,
        GENERIC_EPS,
    ))
}

fn partition(args: &PartitionArgs) -> Result<bool, Error> {
    let p = load_params(args)?;
    if p.n() == 0 {
        return Err(Error::Size { n: 0, m: p.m() });
    }
    let want_brute = args.method != PartitionMethod::Det;
    let want_det = args.method != PartitionMethod::Brute;
    if want_brute && p.n() > BRUTE_MAX_N && !args.force {
        return Err(Error::Domain(format!(
            "brute force is limited to n <= {BRUTE_MAX_N}; pass --force or --method det"
        )));
    }
    let mut report = serde_json::Map::new();
    report.insert("n".into(), json!(p.n()));
    report.insert("m".into(), json!(p.m()));
    let brute = want_brute
        .then(|| partition_brute_parallel(&p))
        .transpose()?;
    let det = want_det
        .then(|| match args.formula {
            FormulaArg::IzerginKorepin => det_partition(&p),
            FormulaArg::FodaWheeler => det_partition_appendix(&p),
        })
        .transpose()?;
    if let Some(b) = brute {
        report.insert("brute".into(), pair(b));
    }
    if let Some(d) = &det {
        report.insert("det".into(), pair(d.value));
        report.insert("cond".into(), json!(d.condition_estimate));
        let tag = match d.formula {
            Formula::IzerginKorepin => "izergin-korepin",
            Formula::FodaWheeler => "foda-wheeler",
        };
        report.insert("formula".into(), json!(tag));
    }
    if let (Some(b), Some(d)) = (brute, &det) {
        report.insert("relDiff".into(), json!(rel_diff(d.value, b)));
    }
    println!("{}", serde_json::Value::Object(report));
    Ok(true)
}

fn count_text(r: &CountReport, only: Option<usize>) -> String {
    let mut s = String::new();
    for (k, v) in r.nk.iter().enumerate() {
        if only.is_none_or(|o| o == k) {
            s.push_str(&format!("N_{k} = {v}\n"));
        }
    }
    if only.is_none() {
        s.push_str(&format!("total = {}\n", r.total));
    }
    s
}

fn count(args: &CountArgs) -> Result<bool, Error> {
    let (n, m) = (args.size.n, args.size.m);
    LatticeSize::new(n, m)?;
    if let Some(k) = args.k {
        if k > m {
            return Err(Error::Domain(format!("k = {k} exceeds m = {m}")));
        }
    }
    if args.method == MethodArg::Brute && n > BRUTE_MAX_N && !args.force {
        return Err(Error::Domain(format!(
            "brute counting is limited to n <= {BRUTE_MAX_N}; pass --force to go further"
        )));
    }
    let report = match (args.k, args.method) {
        // a single Wilson count avoids computing the others
        (Some(k), MethodArg::Wilson) => {
            let mut nk = vec![Default::default(); m + 1];
            nk[k] = count_nk(n, m, k)?;
            CountReport::from_counts(n, m, nk)
        }
        _ => count_total_with(n, m, args.method.into())?,
    };
    let text = match (args.format, args.k) {
        (Format::Json, None) => serde_json::to_string(&report).expect("report serializes") + "\n",
        (Format::Json, Some(k)) => {
            json!({ "n": n, "m": m, "k": k, "N": report.nk[k].to_string() }).to_string() + "\n"
        }
        (Format::Csv, None) => report.to_csv(),
        (Format::Csv, Some(k)) => format!("n,m,k,N_k\n{n},{m},{k},{}\n", report.nk[k]),
        (Format::Text, only) => count_text(&report, only),
    };
    let mut out = open_out(args.out.as_deref())?;
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(true)
}

fn verify(args: &VerifyArgs) -> Result<bool, Error> {
    let mut tolerances = Tolerances::default();
    for t in &args.tols {
        tolerances.apply(t)?;
    }
    for c in &args.checks {
        if c != "all" && !CHECKS.contains(&c.as_str()) {
            return Err(Error::Domain(format!(
                "unknown check {c:?}; expected one of all, {}",
                CHECKS.join(", ")
            )));
        }
    }
    let cfg = VerifyConfig {
        n: args.n,
        m: args.m,
        seed: args.seed,
        draws: args.draws,
        algebraic_draws: args.algebraic_draws,
        tolerances,
    };
    let names: Vec<&str> = args.checks.iter().map(String::as_str).collect();
    let report = run_suite(&names, &cfg)?;
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    if let Some(path) = &args.out {
        std::fs::write(path, format!("{text}\n")).map_err(|e| io_err(path, e))?;
    }
    println!("{text}");
    for c in report.checks.iter().filter(|c| !c.pass) {
        eprintln!(
            "FAIL {}: max residual {:e} (tolerance {:e})",
            c.name, c.max_residual, c.tolerance
        );
    }
    Ok(report.pass)
}

fn configure_threads() -> Result<(), Error> {
    let Ok(v) = std::env::var("ICEVERTEX_THREADS") else {
        return Ok(());
    };
    let threads: usize = v.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        Error::Domain(format!("ICEVERTEX_THREADS={v:?} is not a positive integer"))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Domain(format!("cannot size the worker pool: {e}")))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Enumerate(a) => enumerate(a),
        Command::Partition(a) => partition(a),
        Command::Count(a) => count(a),
        Command::Verify(a) => verify(a),
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("icevertex: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
