//! `dtd`: decode, benchmark and analyse qLDPC decoding problems.
//!
//! Exit codes: 0 on success, 1 when a decode fails (no solution, cap or
//! timeout), 2 on bad input.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use dtd_core::bounds::{self, BoundConfig};
use dtd_core::bp::BpConfig;
use dtd_core::codes::{self, check_coloring, CheckColoring, CssCode};
use dtd_core::dtd::{BpGuided, DecodeOptions, HeightBound, Status, Strategy};
use dtd_core::harness::{self, Decoder, EvalConfig, NoiseSpec};
use dtd_core::logicals;
use dtd_core::osd::{OsdOrder, DEFAULT_OSD_ORDER};
use dtd_core::{DecodingProblem, Syndrome, WeightVector};

#[derive(Parser)]
#[command(name = "dtd", version, about = "Decision-tree decoding for qLDPC codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decode one syndrome.
    Decode(DecodeArgs),
    /// Monte-Carlo benchmark; JSONL records to --out, summary JSON on stdout.
    Bench(BenchArgs),
    /// Certify the code distance by min-weight decoding.
    Distance(DistanceArgs),
    /// Enumerate all minimum-weight logical operators.
    Logicals(LogicalsArgs),
    /// Evaluate the syndrome-height lower bounds.
    Bounds(BoundsArgs),
    /// Failure probability against a decoding time cutoff, as CSV.
    Cutoff(CutoffArgs),
}

#[derive(Args, Clone)]
struct ProblemArgs {
    /// Directory with hx.chk and optional ax.chk, priors.txt.
    #[arg(long, conflicts_with = "code")]
    problem: Option<PathBuf>,
    /// color:D, bb:gross, bb:72 or bb:L,M,A,B (e.g. bb:6,6,x3+y+y2,y3+x+x2).
    #[arg(long)]
    code: Option<String>,
    /// Error type decoded on a CSS code.
    #[arg(long, value_enum, default_value_t = Pauli::X)]
    pauli: Pauli,
}

#[derive(Clone, Copy, ValueEnum)]
enum Pauli {
    X,
    Z,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DecoderKind {
    Bf,
    HeightBound,
    HeightBoundUnrefined,
    HeightOracle,
    BpDtd,
    BpOsd,
}

#[derive(Args, Clone)]
struct DecoderArgs {
    #[arg(long, value_enum, default_value_t = DecoderKind::HeightBound)]
    decoder: DecoderKind,
    /// Combination-sweep depth for bp-osd (0 for OSD-0).
    #[arg(long, default_value_t = DEFAULT_OSD_ORDER)]
    osd_order: usize,
    /// Cap on explored nodes.
    #[arg(long)]
    node_cap: Option<usize>,
    /// BP iterations (t_end); defaults depend on the decoder.
    #[arg(long)]
    bp_iters: Option<usize>,
    /// BP buffer length (l_buff).
    #[arg(long)]
    bp_buffer: Option<usize>,
    /// Comma-separated subset of h1,h2,h3,h4,color,cluster.
    #[arg(long)]
    bounds: Option<String>,
    /// Weight cap for the height-oracle decoder.
    #[arg(long, default_value_t = 12.0)]
    oracle_cap: f64,
}

#[derive(Args)]
struct DecodeArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Whitespace-separated check indices; `#` starts a comment.
    #[arg(long)]
    syndrome: PathBuf,
    #[command(flatten)]
    decoder: DecoderArgs,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    decoder: DecoderArgs,
    /// Fixed number of faults per trial.
    #[arg(long, conflicts_with = "p", required_unless_present = "p")]
    weight: Option<usize>,
    /// I.i.d. fault probability (overrides problem priors).
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record decode times in the JSONL (output is then machine-dependent).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct DistanceArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    decoder: DecoderArgs,
    /// Per-row time budget in seconds.
    #[arg(long)]
    time_budget: Option<f64>,
}

#[derive(Args)]
struct LogicalsArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long)]
    d: usize,
    /// Separation depth of the tree search.
    #[arg(long, default_value_t = 1)]
    sep: usize,
    #[arg(long)]
    bounds: Option<String>,
    /// Include the operators in the output.
    #[arg(long)]
    list: bool,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long)]
    syndrome: PathBuf,
}

#[derive(Args)]
struct CutoffArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Comma-separated durations such as 10us,1ms,1s.
    #[arg(long)]
    cutoffs: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Decode(a) => decode(a),
        Command::Bench(a) => bench(a),
        Command::Distance(a) => distance(a),
        Command::Logicals(a) => logicals_cmd(a),
        Command::Bounds(a) => bounds_cmd(a),
        Command::Cutoff(a) => cutoff(a),
    }
}

fn parse_code(spec: &str) -> Result<CssCode> {
    let (family, params) = spec.split_once(':').ok_or_else(|| anyhow!("code spec '{spec}' needs a family prefix"))?;
    match family {
        "color" => {
            let d: usize = params.parse().with_context(|| format!("bad color-code distance '{params}'"))?;
            Ok(codes::color_code(d)?)
        }
        "bb" => match params {
            "gross" | "144" => Ok(codes::gross_code()),
            "72" => Ok(codes::bb72_code()),
            _ => {
                let parts: Vec<&str> = params.split(',').collect();
                let [l, m, a, b] = parts[..] else {
                    bail!("bb code spec must be bb:gross, bb:72 or bb:L,M,A,B");
                };
                let l: usize = l.parse().context("bad l")?;
                let m: usize = m.parse().context("bad m")?;
                Ok(codes::bivariate_bicycle(l, m, &codes::parse_polynomial(a)?, &codes::parse_polynomial(b)?)?)
            }
        },
        other => bail!("unknown code family '{other}'"),
    }
}

fn load_problem(args: &ProblemArgs) -> Result<DecodingProblem> {
    match (&args.problem, &args.code) {
        (Some(dir), None) => Ok(codes::load_problem(dir)?),
        (None, Some(spec)) => {
            let code = parse_code(spec)?;
            Ok(match args.pauli {
                Pauli::X => code.x_problem(),
                Pauli::Z => code.z_problem(),
            })
        }
        _ => bail!("exactly one of --problem or --code is required"),
    }
}

fn coloring(problem: &DecodingProblem) -> Option<CheckColoring> {
    check_coloring(&problem.check, 3)
}

fn bound_config(list: Option<&str>, problem: &DecodingProblem) -> Result<BoundConfig> {
    match list {
        None => Ok(BoundConfig::standard(coloring(problem))),
        Some(l) => {
            let wants_color = l.split(',').any(|s| matches!(s.trim(), "color" | "color_subset"));
            Ok(BoundConfig::parse(l, if wants_color { coloring(problem) } else { None })?)
        }
    }
}

fn bp_config(args: &DecoderArgs, default_iters: usize, default_buffer: usize) -> Result<BpConfig> {
    let iters = args.bp_iters.unwrap_or(default_iters);
    let buffer = args.bp_buffer.unwrap_or(default_buffer.min(iters));
    Ok(BpConfig::new(iters, buffer)?)
}

fn build_decoder(args: &DecoderArgs, problem: &DecodingProblem, time_budget: Option<Duration>) -> Result<Decoder> {
    let strategy = match args.decoder {
        DecoderKind::BpOsd => {
            let order = if args.osd_order == 0 { OsdOrder::Zero } else { OsdOrder::CombinationSweep(args.osd_order) };
            return Ok(Decoder::BpOsd { bp: bp_config(args, 100, 8)?, order });
        }
        DecoderKind::Bf => Strategy::BreadthFirst,
        DecoderKind::HeightOracle => Strategy::HeightOracle { cap: args.oracle_cap },
        DecoderKind::HeightBound => {
            let mut hb = HeightBound::refined(bound_config(args.bounds.as_deref(), problem)?);
            hb.bp = Some(bp_config(args, 12, 1)?);
            Strategy::HeightBound(hb)
        }
        DecoderKind::HeightBoundUnrefined => {
            Strategy::HeightBound(HeightBound::unrefined(bound_config(args.bounds.as_deref(), problem)?))
        }
        DecoderKind::BpDtd => {
            let mut g = BpGuided::default();
            if args.bp_iters.is_some() || args.bp_buffer.is_some() {
                g.node = bp_config(args, 12, 8)?;
            }
            Strategy::BpGuided(g)
        }
    };
    let node_cap = args.node_cap.or(strategy.default_node_cap());
    Ok(Decoder::Dtd { strategy, options: DecodeOptions { node_cap, time_budget } })
}

fn read_syndrome(path: &Path, problem: &DecodingProblem) -> Result<Syndrome> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(codes::parse_syndrome(&text, problem.check.num_rows(), path)?)
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn exit_for(status: Status) -> ExitCode {
    if status == Status::Found {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn decode(a: DecodeArgs) -> Result<ExitCode> {
    let problem = load_problem(&a.problem)?;
    let syndrome = read_syndrome(&a.syndrome, &problem)?;
    let decoder = build_decoder(&a.decoder, &problem, None)?;
    let out = decoder.decode(&problem, &syndrome);
    print_json(&json!({
        "status": out.status,
        "correction": out.correction,
        "nu": out.explored,
        "elapsed_ns": out.elapsed.as_nanos() as u64,
    }))?;
    Ok(exit_for(out.status))
}

fn bench(a: BenchArgs) -> Result<ExitCode> {
    let mut problem = load_problem(&a.problem)?;
    let noise = match (a.weight, a.p) {
        (Some(w), None) => NoiseSpec::FixedWeight(w),
        (None, Some(p)) => {
            let n = problem.num_faults();
            problem.weights = WeightVector::uniform(n, p)?;
            NoiseSpec::Iid
        }
        _ => bail!("give exactly one of --weight or --p"),
    };
    let decoder = build_decoder(&a.decoder, &problem, None)?;
    let cfg = EvalConfig { noise, trials: a.trials, master_seed: a.seed, workers: a.workers, timing: a.timing };
    let (stats, records) = harness::evaluate(&problem, &decoder, &cfg)?;
    if let Some(path) = &a.out {
        let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        harness::write_jsonl(&records, BufWriter::new(file))?;
    }
    print_json(&serde_json::to_value(&stats)?)?;
    Ok(ExitCode::SUCCESS)
}

fn distance(a: DistanceArgs) -> Result<ExitCode> {
    let problem = load_problem(&a.problem)?;
    if problem.logical.is_none() {
        bail!("distance needs a logical action matrix (ax.chk)");
    }
    let budget = a.time_budget.map(Duration::try_from_secs_f64).transpose().context("bad --time-budget")?;
    let Decoder::Dtd { strategy, .. } = build_decoder(&a.decoder, &problem, budget)? else {
        bail!("distance needs a decision-tree decoder");
    };
    let res = logicals::find_distance(&problem, &strategy, budget);
    print_json(&serde_json::to_value(&res)?)?;
    Ok(if res.d.is_some() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn logicals_cmd(a: LogicalsArgs) -> Result<ExitCode> {
    let problem = load_problem(&a.problem)?;
    if problem.logical.is_none() {
        bail!("logical enumeration needs a logical action matrix (ax.chk)");
    }
    if a.sep == 0 || a.sep > a.d {
        bail!("--sep must satisfy 1 <= sep <= d");
    }
    let cfg = bound_config(a.bounds.as_deref(), &problem)?;
    let set = logicals::all_min_weight_logicals(&problem, a.d, a.sep, &cfg);
    let mut v = json!({ "d": set.d, "count": set.count });
    if a.list {
        v["operators"] = serde_json::to_value(&set.operators)?;
    }
    print_json(&v)?;
    Ok(ExitCode::SUCCESS)
}

fn bounds_cmd(a: BoundsArgs) -> Result<ExitCode> {
    let problem = load_problem(&a.problem)?;
    let syndrome = read_syndrome(&a.syndrome, &problem)?;
    let h = &problem.check;
    let col = coloring(&problem);
    let standard = BoundConfig::standard(col.clone());
    let all = BoundConfig { h1: true, h3: true, h4: true, ..standard };
    let cluster = bounds::cluster_bound(&syndrome, h, |s| bounds::max_count_bound(s, h, &BoundConfig { cluster: false, ..all.clone() }));
    print_json(&json!({
        "h1": bounds::h1(&syndrome, h.max_col_weight().max(1)),
        "h2": bounds::h2(&syndrome, h),
        "h3": bounds::h3(&syndrome, h),
        "h4": bounds::h4(&syndrome, h),
        "color_subset": col.as_ref().map(|c| bounds::color_subset_bound(&syndrome, c)),
        "cluster": cluster,
        "combined": bounds::combined_count_bound(&syndrome, h, &all),
    }))?;
    Ok(ExitCode::SUCCESS)
}

/// Parses `500ns`, `10us`, `1ms`, `2s`; fractional values are allowed.
fn parse_duration(s: &str) -> Result<Duration> {
    let s = s.trim();
    let split = s.find(|c: char| !(c.is_ascii_digit() || c == '.')).unwrap_or(s.len());
    let (num, unit) = s.split_at(split);
    let value: f64 = num.parse().with_context(|| format!("bad duration '{s}'"))?;
    let scale = match unit {
        "ns" => 1e-9,
        "us" | "µs" => 1e-6,
        "ms" => 1e-3,
        "s" | "" => 1.0,
        _ => bail!("bad duration unit in '{s}'"),
    };
    Duration::try_from_secs_f64(value * scale).with_context(|| format!("bad duration '{s}'"))
}

fn cutoff(a: CutoffArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let records = harness::read_jsonl(&text, &a.input)?;
    let cutoffs: Vec<Duration> = a.cutoffs.split(',').filter(|s| !s.trim().is_empty()).map(parse_duration).collect::<Result<_>>()?;
    let curve = harness::cutoff_curve(&records, &cutoffs)?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "t_ns,p_fail")?;
    for (t, p) in curve {
        writeln!(out, "{},{}", t.as_nanos(), p)?;
    }
    Ok(ExitCode::SUCCESS)
}
