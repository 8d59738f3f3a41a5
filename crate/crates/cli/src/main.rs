//! `svt`: sample, count and inspect standard set-valued tableaux.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use svt_core::chain::{build_transition_matrix, certify_steps, mixing_profile, run_chain_cached, ProposalCache};
use svt_core::fpras::{fpras_count, FprasParams, SampleSource};
use svt_core::generator::svgen;
use svt_core::oracle::enumerate_svt;
use svt_core::probability::exact_distribution;
use svt_core::rng::RngStream;
use svt_core::scalar::ratio_string;
use svt_core::shapes::count_syt;
use svt_core::tableaux::TableauJson;
use svt_core::{Error, Partition, PreTableau};

/// Environment variable that turns on test mode: randomized commands then require `--seed`.
const TEST_MODE_VAR: &str = "SVT_TEST";

#[derive(Parser, Debug)]
#[command(name = "svt", version, about = "Random generation, sampling and counting of set-valued tableaux")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Source {
    /// Metropolis chain samples.
    Chain,
    /// Exactly uniform samples from a full enumeration (small instances).
    Uniform,
}

#[derive(Args, Debug)]
struct Instance {
    /// Shape as comma-separated row lengths, e.g. `3,2`.
    #[arg(long)]
    shape: Option<String>,
    /// Largest value N; defaults to the size of the shape.
    #[arg(long)]
    n: Option<usize>,
    /// Start pre-tableau as a JSON file; defaults to the all-empty pre-tableau.
    #[arg(long)]
    start: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw completions of the start pre-tableau.
    Sample {
        #[command(flatten)]
        instance: Instance,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Emit raw generator output instead of chain samples.
        #[arg(long)]
        raw: bool,
        /// Target distance from uniform, used to certify the step count.
        #[arg(long, default_value = "0.01")]
        bias: String,
        /// Chain steps per sample; certified from the exact chain when omitted.
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Approximately count the completions of the start pre-tableau.
    Count {
        #[command(flatten)]
        instance: Instance,
        #[arg(long, default_value_t = 0.25)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.25)]
        delta: f64,
        /// Samples per level; the theoretical size is used when omitted.
        #[arg(long)]
        samples: Option<usize>,
        /// Chain steps per sample; certified per level when omitted.
        #[arg(long)]
        steps: Option<usize>,
        /// Estimate each ratio from a second, independent batch.
        #[arg(long)]
        fresh_batch: bool,
        #[arg(long, value_enum, default_value_t = Source::Chain)]
        source: Source,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Count the completions exactly by enumeration.
    Exact {
        #[command(flatten)]
        instance: Instance,
        /// Print every completion instead of the count.
        #[arg(long, conflicts_with = "law")]
        dump: bool,
        /// Print the exact output law of the generator instead of the count.
        #[arg(long)]
        law: bool,
    },
    /// Exact mixing diagnostics of the Metropolis chain.
    Diagnose {
        #[command(flatten)]
        instance: Instance,
        #[arg(long, default_value = "0.01")]
        epsilon: String,
    },
    /// Number of standard Young tableaux of a shape.
    Syt {
        #[arg(long)]
        shape: String,
    },
}

/// Failure with its exit status.
#[derive(Debug)]
enum Failure {
    Config(String),
    Core(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(Error::StateSpaceTooLarge { .. }) => 3,
            Failure::Core(Error::CannotCertifySteps(_)) => 4,
            Failure::Core(Error::ZeroRatio(_) | Error::EmptyEnumeration | Error::SupportMismatch) => 1,
            Failure::Io(_) => 1,
            Failure::Config(_) | Failure::Core(_) => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Config(m) => m.clone(),
            Failure::Core(e) => e.to_string(),
            Failure::Io(e) => e.to_string(),
        }
    }
}

type Outcome<T = ()> = std::result::Result<T, Failure>;

/// Parses `0.01`, `1e-2` style decimals and `1/100` fractions exactly.
fn parse_rational(text: &str) -> Outcome<BigRational> {
    let bad = || Failure::Config(format!("cannot parse {text:?} as a number"));
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(num, den));
    }
    let (mantissa, exponent) = match text.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (text, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.trim_start_matches(['+', '-']).is_empty() && frac.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let digits = if digits.trim_start_matches(['+', '-']).is_empty() {
        "0".to_string()
    } else {
        digits
    };
    let numer: BigInt = digits.parse().map_err(|_| bad())?;
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    })
}

fn unit_interval(name: &str, text: &str) -> Outcome<BigRational> {
    let value = parse_rational(text)?;
    if value <= BigRational::zero() || value > BigRational::one() {
        return Err(Failure::Config(format!("--{name} must lie in (0, 1], got {text}")));
    }
    Ok(value)
}

fn parse_shape(text: &str) -> Outcome<Partition> {
    text.parse::<Partition>().map_err(Failure::Core)
}

fn resolve_instance(instance: &Instance) -> Outcome<PreTableau> {
    if let Some(path) = &instance.start {
        let raw = fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
        let json: TableauJson = serde_json::from_str(&raw)
            .map_err(|e| Failure::Config(format!("cannot parse {}: {e}", path.display())))?;
        let start = PreTableau::from_json(&json)?;
        if let Some(shape) = &instance.shape {
            if parse_shape(shape)? != *start.shape() {
                return Err(Failure::Config("--shape disagrees with the start file".to_string()));
            }
        }
        if instance.n.is_some_and(|n| n != start.capacity()) {
            return Err(Failure::Config("--n disagrees with the start file".to_string()));
        }
        return Ok(start);
    }
    let shape = instance
        .shape
        .as_deref()
        .ok_or_else(|| Failure::Config("either --shape or --start is required".to_string()))?;
    let shape = parse_shape(shape)?;
    if shape.is_empty() {
        return Err(Failure::Core(Error::EmptyShape));
    }
    let n = instance.n.unwrap_or(shape.size());
    Ok(PreTableau::empty(&shape, n)?)
}

fn resolve_seed(seed: Option<u64>) -> Outcome<u64> {
    if let Some(seed) = seed {
        return Ok(seed);
    }
    if std::env::var(TEST_MODE_VAR).is_ok_and(|v| v == "1") {
        return Err(Failure::Config(format!("--seed is required when {TEST_MODE_VAR}=1")));
    }
    let seed = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0);
    log::info!("using seed {seed}");
    Ok(seed)
}

fn write_tableau(out: &mut impl Write, t: &PreTableau, format: Format) -> Outcome {
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string(&t.to_json()).expect("serializable"))?,
        Format::Text => writeln!(out, "{t}\n")?,
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sample(
    out: &mut impl Write,
    format: Format,
    instance: &Instance,
    count: usize,
    raw: bool,
    bias: &str,
    steps: Option<usize>,
    seed: Option<u64>,
) -> Outcome {
    let start = resolve_instance(instance)?;
    let bias = unit_interval("bias", bias)?;
    let mut rng = RngStream::new(resolve_seed(seed)?);
    if raw {
        for _ in 0..count {
            write_tableau(out, &svgen(&start, &mut rng)?, format)?;
        }
        return Ok(());
    }
    let steps = match steps {
        Some(t) => t,
        None => {
            let t = certify_steps(&start, &bias)?;
            log::info!("certified {t} steps per sample");
            t
        }
    };
    let mut cache = ProposalCache::new();
    for _ in 0..count {
        write_tableau(out, &run_chain_cached(&start, steps, &mut rng, &mut cache)?, format)?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_count(
    out: &mut impl Write,
    format: Format,
    instance: &Instance,
    epsilon: f64,
    delta: f64,
    samples: Option<usize>,
    steps: Option<usize>,
    fresh_batch: bool,
    source: Source,
    seed: Option<u64>,
) -> Outcome {
    let start = resolve_instance(instance)?;
    let seed = resolve_seed(seed)?;
    let mut params = FprasParams::new(epsilon, delta, seed)?
        .with_fresh_batch(fresh_batch)
        .with_source(match source {
            Source::Chain => SampleSource::Metropolis,
            Source::Uniform => SampleSource::ExactUniform,
        });
    if let Some(s) = samples {
        params = params.with_samples(s)?;
    }
    if let Some(t) = steps {
        params = params.with_steps(t);
    }
    let estimate = fpras_count(&start, &params)?;
    match format {
        Format::Json => writeln!(out, "{}", estimate.to_json())?,
        Format::Text => {
            writeln!(
                out,
                "estimate {} ({:.6}) from {} repetitions, seed {}",
                ratio_string(&estimate.estimate),
                estimate.estimate_f64(),
                estimate.repetitions,
                estimate.seed
            )?;
            for level in &estimate.per_level {
                let steps = level.steps.map_or("-".to_string(), |t| t.to_string());
                writeln!(
                    out,
                    "  m={} x={} s={} ratio={} steps={}",
                    level.m,
                    level.x,
                    level.s,
                    ratio_string(&level.ratio),
                    steps
                )?;
            }
        }
    }
    Ok(())
}

fn cmd_exact(out: &mut impl Write, format: Format, instance: &Instance, dump: bool, law: bool) -> Outcome {
    let start = resolve_instance(instance)?;
    if law {
        let table = exact_distribution(&start)?;
        match format {
            Format::Json => writeln!(out, "{}", table.to_json())?,
            Format::Text => {
                for (t, p) in table.iter() {
                    writeln!(out, "{}\n{t}\n", ratio_string(p))?;
                }
            }
        }
        return Ok(());
    }
    let all = enumerate_svt(&start)?;
    if dump {
        for t in &all.tableaux {
            write_tableau(out, t, format)?;
        }
    } else {
        writeln!(out, "{}", all.count)?;
    }
    Ok(())
}

fn cmd_diagnose(out: &mut impl Write, format: Format, instance: &Instance, epsilon: &str) -> Outcome {
    let start = resolve_instance(instance)?;
    let epsilon = unit_interval("epsilon", epsilon)?;
    let matrix = build_transition_matrix(&start)?;
    let profile = mixing_profile(&matrix, &epsilon)?;
    match format {
        Format::Json => writeln!(out, "{}", profile.to_json())?,
        Format::Text => {
            writeln!(out, "states      {}", profile.states)?;
            let phi = profile.conductance.as_ref().map_or("-".to_string(), ratio_string);
            writeln!(out, "phi         {phi}")?;
            writeln!(out, "t_mix       {} at epsilon {}", profile.t_mix, ratio_string(&epsilon))?;
            let bound = profile.bound_upper.map_or("-".to_string(), |b| format!("{b:.3}"));
            writeln!(out, "bound_upper {bound}")?;
            for (t, d) in profile.tv_curve.iter().enumerate() {
                writeln!(out, "d({t}) = {}", ratio_string(d))?;
            }
        }
    }
    Ok(())
}

/// Bare integers are valid JSON, so counts print the same in both formats.
fn cmd_syt(out: &mut impl Write, shape: &str) -> Outcome {
    writeln!(out, "{}", count_syt(&parse_shape(shape)?))?;
    Ok(())
}

fn run(cli: &Cli, out: &mut impl Write) -> Outcome {
    let format = cli.format;
    match &cli.command {
        Command::Sample {
            instance,
            count,
            raw,
            bias,
            steps,
            seed,
        } => cmd_sample(out, format, instance, *count, *raw, bias, *steps, *seed),
        Command::Count {
            instance,
            epsilon,
            delta,
            samples,
            steps,
            fresh_batch,
            source,
            seed,
        } => cmd_count(
            out,
            format,
            instance,
            *epsilon,
            *delta,
            *samples,
            *steps,
            *fresh_batch,
            *source,
            *seed,
        ),
        Command::Exact { instance, dump, law } => cmd_exact(out, format, instance, *dump, *law),
        Command::Diagnose { instance, epsilon } => cmd_diagnose(out, format, instance, epsilon),
        Command::Syt { shape } => cmd_syt(out, shape),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(&cli, &mut out).and_then(|()| out.flush().map_err(Failure::Io));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            let _ = out.flush();
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn decimals_parse_exactly() {
        assert_eq!(parse_rational("0.01").unwrap(), q(1, 100));
        assert_eq!(parse_rational("1e-2").unwrap(), q(1, 100));
        assert_eq!(parse_rational("2.5E1").unwrap(), q(25, 1));
        assert_eq!(parse_rational("3/12").unwrap(), q(1, 4));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert_eq!(parse_rational("1").unwrap(), q(1, 1));
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn unit_interval_rejects_out_of_range() {
        assert!(unit_interval("bias", "0").is_err());
        assert!(unit_interval("bias", "1.5").is_err());
        assert!(unit_interval("bias", "1").is_ok());
    }

    #[test]
    fn exit_codes_follow_error_class() {
        assert_eq!(Failure::Core(Error::StateSpaceTooLarge { limit: 1 }).exit_code(), 3);
        assert_eq!(Failure::Core(Error::CannotCertifySteps(String::new())).exit_code(), 4);
        assert_eq!(Failure::Core(Error::EmptyShape).exit_code(), 2);
        assert_eq!(Failure::Config(String::new()).exit_code(), 2);
    }
}
