//! The `hopspanner` command line.
//!
//! Exit codes: 0 on success, 1 when a verified spanner violates its contract
//! (the witness is printed), 2 on usage or input errors.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::ackermann::{alpha_iter, alpha_k, alpha_one, alpha_two_param, Capped, Family, Hierarchy};
use crate::bounds::{
    decimal, hop_lower_bound_from_edges, lower_bound_edges, make_report, unique_k_region, write_csv, write_json,
    LowerBoundKind, TradeoffVariant,
};
use crate::construct::build_general;
use crate::eps::Eps;
use crate::linemetric::SparseLineMetric;
use crate::oracle::{min_edges_bnb, min_edges_exhaustive, SearchConfig};
use crate::spanner::{HopMode, Spanner};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hopspanner", version, about = "Hop-diameter bounded spanners on line metrics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a stretch-1 spanner with hop diameter k on the points 1..=n.
    Build(BuildArgs),
    /// Check a spanner (JSON) against stretch 1+eps and hop bound k.
    Verify(VerifyArgs),
    /// Exact minimum edge count on the points 1..=n.
    Minimize(MinimizeArgs),
    /// Ackermann hierarchy values and inverses.
    Ackermann(AckermannArgs),
    /// Evaluate lower-bound and tradeoff formulas.
    Bounds(BoundsArgs),
    /// Compare formulas, constructions and exact minima over a grid of parameters.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub k: u32,
    /// Write the spanner here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    All,
    Global,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Stretch slack as an exact fraction p/q.
    #[arg(long)]
    pub eps: Eps,
    #[arg(long)]
    pub k: u64,
    #[arg(long, value_enum, default_value = "all")]
    pub mode: ModeArg,
    /// Sparse metric (JSON) defining global edges; required with --mode global.
    #[arg(long)]
    pub grid: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MinimizeArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub k: u64,
    #[arg(long)]
    pub eps: Eps,
    /// Offer every integer of l..r outside 1..=n as a Steiner point.
    #[arg(long, value_parser = parse_range)]
    pub steiner: Option<(i64, i64)>,
    /// Plain subset enumeration instead of branch-and-bound.
    #[arg(long)]
    pub exhaustive: bool,
    /// Write the witness spanner here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    A,
    B,
}

#[derive(Debug, Args)]
pub struct AckermannArgs {
    /// alpha_K(n); with --iter J, its J-fold composition.
    #[arg(long, value_name = "K", requires = "n")]
    pub alpha_k: Option<u32>,
    #[arg(long, requires = "alpha_k")]
    pub iter: Option<u32>,
    /// alpha(n): least s with A(s, s) >= n.
    #[arg(long, requires = "n", conflicts_with_all = ["alpha_k", "alpha_mn", "table"])]
    pub alpha_one: bool,
    /// alpha(m, n) with m given here.
    #[arg(long, value_name = "M", requires = "n", conflicts_with_all = ["alpha_k", "table"])]
    pub alpha_mn: Option<u64>,
    #[arg(long)]
    pub n: Option<u64>,
    /// Print FAMILY(k, s) for k < --levels and s < --args.
    #[arg(long, value_enum, value_name = "FAMILY", conflicts_with = "alpha_k")]
    pub table: Option<FamilyArg>,
    #[arg(long, default_value_t = 5)]
    pub levels: u32,
    #[arg(long, default_value_t = 6)]
    pub args: u64,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long, default_value = "0/1")]
    pub eps: Eps,
    /// One formula only; default is every formula stated for k.
    #[arg(long)]
    pub kind: Option<LowerBoundKind>,
    /// Edge count for the tradeoff functions.
    #[arg(long)]
    pub m: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<u64>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub k: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "0/1")]
    pub eps: Vec<Eps>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Also compute exact minima (small n only).
    #[arg(long)]
    pub oracle: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| format!("expected l..r, got {s:?}"))?;
    let lo = lo.trim().parse::<i64>().map_err(|e| format!("{lo:?}: {e}"))?;
    let hi = hi.trim().parse::<i64>().map_err(|e| format!("{hi:?}: {e}"))?;
    Ok((lo, hi))
}

type Failure = Box<dyn std::error::Error>;

fn uniform_points(n: u64) -> Result<Vec<i64>, Failure> {
    let n = i64::try_from(n).map_err(|_| format!("n = {n} is too large"))?;
    Ok((1..=n).collect())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn write_spanner(s: &Spanner, path: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    let mut json = serde_json::to_string(s)?;
    json.push('\n');
    match path {
        Some(p) => fs::write(p, json).map_err(|e| format!("{}: {e}", p.display()))?,
        None => out.write_all(json.as_bytes())?,
    }
    Ok(())
}

fn build(a: &BuildArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let (s, stats) = build_general(uniform_points(a.n)?, a.k)?;
    write_spanner(&s, a.out.as_deref(), out)?;
    if a.out.is_some() {
        writeln!(out, "n: {}\nk: {}\nedges: {}\nbound: {}", stats.n, stats.k, stats.edge_count, stats.bound)?;
    }
    Ok(EXIT_OK)
}

fn verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let s: Spanner = read_json(&a.input)?;
    let mode = match (a.mode, &a.grid) {
        (ModeArg::All, None) => HopMode::AllHops,
        (ModeArg::Global, Some(path)) => HopMode::GlobalHops(read_json::<SparseLineMetric>(path)?),
        (ModeArg::All, Some(_)) => return Err("--grid needs --mode global".into()),
        (ModeArg::Global, None) => return Err("--mode global needs --grid".into()),
    };
    let report = s.verify(a.eps, a.k, &mode);
    match report.witness {
        None => {
            writeln!(out, "ok")?;
            Ok(EXIT_OK)
        }
        Some(w) => {
            let show = |v: Option<u64>| v.map_or("none".to_string(), |x| x.to_string());
            writeln!(out, "violation: ({}, {})", w.a, w.b)?;
            writeln!(out, "best_weight: {}", show(w.best_weight))?;
            writeln!(out, "best_hops: {}", show(w.best_hops))?;
            Ok(EXIT_VIOLATION)
        }
    }
}

fn minimize(a: &MinimizeArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let points = uniform_points(a.n)?;
    let mut cfg = SearchConfig::new(a.eps, a.k);
    if let Some((lo, hi)) = a.steiner {
        cfg = cfg.with_steiner(lo, hi);
    }
    let res = if a.exhaustive { min_edges_exhaustive(&points, &cfg)? } else { min_edges_bnb(&points, &cfg)? };
    writeln!(out, "{res}")?;
    let edges: Vec<String> = res.witness.edges().iter().map(|(x, y)| format!("({x}, {y})")).collect();
    writeln!(out, "witness: {}", edges.join(" "))?;
    if let Some(p) = &a.out {
        write_spanner(&res.witness, Some(p), out)?;
    }
    Ok(EXIT_OK)
}

fn ackermann(a: &AckermannArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    if let Some(fam) = a.table {
        let fam = match fam {
            FamilyArg::A => Family::A,
            FamilyArg::B => Family::B,
        };
        let h = Hierarchy::shared();
        for k in 0..a.levels {
            let row: Vec<String> = (0..a.args)
                .map(|s| match h.value(fam, k, s) {
                    Capped::Exact(v) => v.to_string(),
                    Capped::Saturated => ">=2^62".to_string(),
                })
                .collect();
            writeln!(out, "{}", row.join("\t"))?;
        }
        return Ok(EXIT_OK);
    }
    let n = a.n.ok_or("--n is required")?;
    let value = if let Some(k) = a.alpha_k {
        match a.iter {
            Some(j) => alpha_iter(k, j, n),
            None => alpha_k(k, n),
        }
    } else if a.alpha_one {
        alpha_one(n)
    } else if let Some(m) = a.alpha_mn {
        alpha_two_param(m, n)?
    } else {
        return Err("choose one of --alpha-k, --alpha-one, --alpha-mn, --table".into());
    };
    writeln!(out, "{value}")?;
    Ok(EXIT_OK)
}

fn bounds(a: &BoundsArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let kinds: Vec<LowerBoundKind> = match (a.kind, a.k) {
        (Some(kind), _) => vec![kind],
        (None, Some(k)) => LowerBoundKind::ALL.into_iter().filter(|kind| kind.accepts(k)).collect(),
        (None, None) => Vec::new(),
    };
    if !kinds.is_empty() {
        let k = a.k.ok_or("--kind needs --k")?;
        for kind in kinds {
            let v = lower_bound_edges(kind, a.n, k, a.eps)?;
            writeln!(out, "{kind}: {v} (~{})", decimal(&v, 4))?;
        }
    }
    if let Some(m) = a.m {
        let show = |r: Result<u64, _>| match r {
            Ok(v) => v.to_string(),
            Err(e) => format!("n/a ({e})"),
        };
        writeln!(out, "region: {}", show(unique_k_region(m, a.n).map(u64::from)))?;
        writeln!(out, "hop-lb stretch1: {}", show(hop_lower_bound_from_edges(m, a.n, TradeoffVariant::Stretch1)))?;
        writeln!(out, "hop-lb stretch-eps: {}", show(hop_lower_bound_from_edges(m, a.n, TradeoffVariant::StretchEps)))?;
    } else if a.k.is_none() {
        return Err("give --k (formulas) or --m (tradeoff)".into());
    }
    Ok(EXIT_OK)
}

fn report(a: &ReportArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let rows = make_report(&a.n, &a.k, &a.eps, a.oracle)?;
    let mut buf = Vec::new();
    match a.format {
        Format::Csv => write_csv(&rows, &mut buf)?,
        Format::Json => write_json(&rows, &mut buf)?,
    }
    match &a.out {
        Some(p) => fs::write(p, buf).map_err(|e| format!("{}: {e}", p.display()))?,
        None => out.write_all(&buf)?,
    }
    Ok(EXIT_OK)
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let result = match &cli.command {
        Command::Build(a) => build(a, out),
        Command::Verify(a) => verify(a, out),
        Command::Minimize(a) => minimize(a, out),
        Command::Ackermann(a) => ackermann(a, out),
        Command::Bounds(a) => bounds(a, out),
        Command::Report(a) => report(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) if e.downcast_ref::<io::Error>().is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

/// [`run`] on the process arguments and standard streams.
pub fn main_exit_code() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    let code = run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock());
    let _ = io::stdout().flush();
    code
}
