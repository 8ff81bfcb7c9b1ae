use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use shiftwalk::chains::{simulate, simulate_random};
use shiftwalk::exact_sampler::{exact_sample_indexed, solve_driving};
use shiftwalk::report::{build_profile, ProfileRequest, SCHEMA_VERSION};
use shiftwalk::spectral::{check_h_bounds, fourier_sum};
use shiftwalk::verify::{run_suite, Suite, VerifyOptions};
use shiftwalk::weight_stats::{chebyshev_lower_bound, LowerBoundParams};
use shiftwalk::{BitVector, Chain, ChainKind, DrivingSequence, Trajectory};

mod times;

/// Exit status for a verification check that ran and failed.
const EXIT_CHECK_FAILED: u8 = 1;
/// Exit status for invalid arguments or inputs.
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "shiftwalk",
    version,
    about = "Shift-register accelerated random walks on the hypercube"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and print a JSON report.
    Verify(VerifyArgs),
    /// Distance-to-uniform profile over a range of times.
    Profile(ProfileArgs),
    /// Exact uniform samples from n steps of the fixed-coordinate chain.
    Sample(SampleArgs),
    /// The unique bit sequence that drives the fixed-coordinate chain between two states.
    Solve(SolveArgs),
    /// One random trajectory as CSV.
    Simulate(SimulateArgs),
    /// Fourier and weight-class bounds for a dimension, as JSON.
    Bounds(BoundsArgs),
}

#[derive(Args)]
struct ChainSelect {
    /// Chain to run.
    #[arg(value_parser = parse_chain, conflicts_with = "chain_flag")]
    chain: Option<ChainKind>,
    #[arg(long = "chain", id = "chain_flag", value_parser = parse_chain, value_name = "CHAIN")]
    chain_flag: Option<ChainKind>,
}

impl ChainSelect {
    fn kind(&self) -> ChainKind {
        self.chain.or(self.chain_flag).unwrap_or(ChainKind::Q1)
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// One of lemma5.1, lemma5.6, fourier, moments, bounded-diff, variance, q2-exact, all.
    #[arg(value_parser = parse_suite)]
    suite: Suite,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct ProfileArgs {
    #[command(flatten)]
    chain: ChainSelect,
    #[arg(long)]
    n: usize,
    /// Times as `a..b` (inclusive), `a..=b`, or a comma list; defaults to 0..n+1.
    #[arg(long = "t", alias = "t-range", value_name = "TIMES")]
    times: Option<String>,
    /// Starting state as a bit string `x_1..x_n`; defaults to all zeros.
    #[arg(long)]
    from: Option<String>,
    /// Monte Carlo trajectories for the empirical lower bound (0 disables it).
    #[arg(long, default_value_t = 0)]
    samples: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 0.75)]
    alpha: f64,
    /// Chebyshev window constant; defaults to ln n.
    #[arg(long)]
    c: Option<f64>,
    #[arg(long, value_enum, default_value_t = ProfileFormat::Csv)]
    format: ProfileFormat,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record the current time in the JSON metadata.
    #[arg(long)]
    stamp: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleFormat {
    Bits,
    Hex,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    from: Option<String>,
    #[arg(long, value_enum, default_value_t = SampleFormat::Bits)]
    format: SampleFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    from: String,
    #[arg(long)]
    to: String,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    chain: ChainSelect,
    #[arg(long)]
    n: usize,
    /// Number of random steps; implied by `--bits` when replaying.
    #[arg(long, required_unless_present = "bits")]
    t: Option<usize>,
    #[arg(long, conflicts_with = "bits")]
    seed: Option<u64>,
    #[arg(long)]
    from: Option<String>,
    /// Replay these update bits instead of drawing random ones.
    #[arg(long)]
    bits: Option<String>,
    /// Coordinates (1-based, comma separated) to replay with `--bits` on q1.
    #[arg(long, requires = "bits")]
    coords: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.75)]
    alpha: f64,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_chain(s: &str) -> std::result::Result<ChainKind, String> {
    s.parse().map_err(|e: shiftwalk::Error| e.to_string())
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    s.parse().map_err(|e: shiftwalk::Error| e.to_string())
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        eprintln!("seed: {s}");
        s
    })
}

fn parse_state(n: usize, bits: Option<&str>) -> Result<BitVector> {
    let Some(bits) = bits else {
        return Ok(BitVector::zeros(n));
    };
    let x: BitVector = bits
        .parse()
        .with_context(|| format!("invalid state {bits:?}"))?;
    if x.len() != n {
        bail!("state {bits:?} has {} bits, expected {n}", x.len());
    }
    Ok(x)
}

fn with_output(
    out: Option<&Path>,
    body: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<()> {
    match out {
        Some(path) => {
            let file =
                File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
            let mut w = BufWriter::new(file);
            body(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            body(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn replay(
    chain: &Chain,
    x0: &BitVector,
    bits: &str,
    coords: Option<&str>,
    t: Option<usize>,
) -> Result<Trajectory> {
    let bits: Vec<bool> = bits
        .trim()
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => bail!("invalid bit {other:?} in --bits"),
        })
        .collect::<Result<_>>()?;
    if let Some(t) = t {
        if t != bits.len() {
            bail!("--t {t} does not match {} replayed bits", bits.len());
        }
    }
    let driving = match (chain.kind(), coords) {
        (ChainKind::Q2, None) => DrivingSequence::for_q2(chain.n(), bits)?,
        (ChainKind::Q2, Some(_)) => bail!("q2 always updates the middle coordinate; drop --coords"),
        (ChainKind::Q1, None) => bail!("replaying q1 needs --coords"),
        (ChainKind::Q1, Some(list)) => {
            let coords = list
                .split(',')
                .map(|c| match c.trim().parse::<usize>() {
                    Ok(i) if (1..=chain.n()).contains(&i) => Ok(i - 1),
                    _ => bail!("coordinate {c:?} is not in 1..={}", chain.n()),
                })
                .collect::<Result<Vec<_>>>()?;
            DrivingSequence::new(coords, bits)?
        }
    };
    let states = simulate(chain, x0, &driving)?;
    Ok(Trajectory { driving, states })
}

/// Runs a command, returning `Ok(false)` when a verification check failed.
fn run(command: Command) -> Result<bool> {
    match command {
        Command::Verify(a) => {
            let opts = VerifyOptions {
                n_max: a.n_max,
                trials: a.trials,
                samples: a.samples,
                seed: resolve_seed(a.seed),
            };
            let report = run_suite(a.suite, &opts)?;
            with_output(a.out.as_deref(), |w| writeln!(w, "{}", report.to_json()))?;
            for c in report
                .checks
                .iter()
                .filter(|c| !c.passed && !c.informational)
            {
                eprintln!(
                    "FAIL {}: observed {} > limit {}",
                    c.name, c.observed, c.limit
                );
            }
            Ok(report.passed)
        }
        Command::Profile(a) => {
            let chain = Chain::new(a.chain.kind(), a.n)?;
            let times = match &a.times {
                Some(spec) => times::parse(spec)?,
                None => (0..=a.n + 1).collect(),
            };
            let seed = if a.samples > 0 {
                resolve_seed(a.seed)
            } else {
                a.seed.unwrap_or(0)
            };
            let mut report = build_profile(&ProfileRequest {
                chain,
                x0: parse_state(a.n, a.from.as_deref())?,
                times,
                samples: a.samples,
                seed,
                alpha: a.alpha,
                c: a.c,
            })?;
            if a.stamp {
                report.metadata.timestamp = Some(
                    SystemTime::now()
                        .duration_since(UNIX_EPOCH)
                        .map(|d| d.as_secs())
                        .unwrap_or(0),
                );
            }
            with_output(a.out.as_deref(), |w| match a.format {
                ProfileFormat::Csv => report.write_csv(w),
                ProfileFormat::Json => writeln!(w, "{}", report.to_json()),
            })?;
            Ok(true)
        }
        Command::Sample(a) => {
            Chain::q2(a.n)?;
            let x0 = parse_state(a.n, a.from.as_deref())?;
            let seed = resolve_seed(a.seed);
            with_output(a.out.as_deref(), |w| {
                for i in 0..a.count {
                    let z = exact_sample_indexed(&x0, seed, i).map_err(io::Error::other)?;
                    match a.format {
                        SampleFormat::Bits => writeln!(w, "{z}")?,
                        SampleFormat::Hex => writeln!(w, "{}", z.to_hex())?,
                    }
                }
                Ok(())
            })?;
            Ok(true)
        }
        Command::Solve(a) => {
            let x0 = parse_state(a.n, Some(&a.from))?;
            let z = parse_state(a.n, Some(&a.to))?;
            let driving = solve_driving(&x0, &z)?;
            println!("{}", BitVector::from_bits(driving.bits()));
            Ok(true)
        }
        Command::Simulate(a) => {
            let chain = Chain::new(a.chain.kind(), a.n)?;
            let x0 = parse_state(a.n, a.from.as_deref())?;
            let trajectory = match &a.bits {
                Some(bits) => replay(&chain, &x0, bits, a.coords.as_deref(), a.t)?,
                None => simulate_random(&chain, &x0, a.t.unwrap_or(0), resolve_seed(a.seed))?,
            };
            with_output(a.out.as_deref(), |w| trajectory.write_csv(w))?;
            Ok(true)
        }
        Command::Bounds(a) => {
            let fourier = fourier_sum(a.n)?;
            let h_bounds = check_h_bounds(a.n).ok();
            let c = a.c.unwrap_or_else(|| (a.n as f64).ln());
            let params = LowerBoundParams::new(a.n, a.alpha, c)?;
            let chebyshev = json!({
                "t": params.t(),
                "delta": params.delta(),
                "bound": chebyshev_lower_bound(&params).ok(),
            });
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "n": a.n,
                "fourier": fourier,
                "h_bounds": h_bounds,
                "chebyshev": chebyshev,
                "alpha": a.alpha,
                "c": c,
            });
            let text = serde_json::to_string_pretty(&doc)?;
            with_output(a.out.as_deref(), |w| writeln!(w, "{text}"))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
