use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lexsamp::coins::mix64;
use lexsamp::oracle::count_extensions;
use lexsamp::stats::{self, cftp_sampler, FrequencyReport, SIGNIFICANCE};
use lexsamp::{cftp, recommended_t, Poset, SampleReport, Schedule};

#[derive(Parser)]
#[command(name = "lexsamp", version, about = "Exact uniform sampling of linear extensions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw linear extensions.
    Sample(SampleArgs),
    /// Count linear extensions exactly (n ≤ 20).
    Count(CountArgs),
    /// Chi-square test of sampler output against the exact uniform target (n ≤ 10).
    Test(SampleArgs),
    /// Aggregate bits, substeps and swaps over many runs.
    Bench(SampleArgs),
    /// Sweeps for a placeholder starting in slot 1 to be promoted.
    Tau(TauArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Driver {
    Doubling,
    Fixed,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// Master seed; defaults to LEXSAMP_SEED, then OS entropy.
    #[arg(long, env = "LEXSAMP_SEED")]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct SampleArgs {
    /// Poset file: `n <count>` then one `<i> <j>` pair per line.
    input: PathBuf,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    /// Initial sweeps (doubling) or sweeps per level (fixed). Defaults to n,
    /// or the recommended t for the fixed driver.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    t0: Option<u64>,
    #[arg(long, value_enum, default_value = "doubling")]
    driver: Driver,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CountArgs {
    input: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct TauArgs {
    /// Take n from this poset file instead of --n.
    input: Option<PathBuf>,
    #[arg(long, required_unless_present = "input")]
    n: Option<usize>,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    #[command(flatten)]
    common: Common,
}

fn load(path: &Path) -> Result<Poset> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Poset::parse(&text).with_context(|| format!("in {}", path.display()))?)
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(rand::random)
}

fn schedule(args: &SampleArgs, n: usize) -> Schedule {
    match args.driver {
        Driver::Doubling => Schedule::Doubling {
            t0: args.t0.unwrap_or((n as u64).max(1)),
        },
        Driver::Fixed => Schedule::Fixed {
            t: args.t0.unwrap_or_else(|| recommended_t(n)),
        },
    }
}

fn to_json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn perm_text(p: &[usize]) -> String {
    p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

#[derive(Serialize)]
struct SampleOutput<'a> {
    seed: u64,
    schedule: Schedule,
    extensions: Vec<&'a [usize]>,
    stats: &'a [SampleReport],
}

fn cmd_sample(args: &SampleArgs) -> Result<String> {
    let poset = load(&args.input)?;
    let seed = resolve_seed(args.common.seed);
    let schedule = schedule(args, poset.len());
    schedule.validate(poset.len())?;
    let reports: Vec<SampleReport> = (0..args.samples)
        .map(|i| Ok(cftp::sample(&poset, schedule, mix64(seed, i))?.report(&poset)))
        .collect::<Result<_>>()?;

    let mut out = String::new();
    match args.common.format {
        Format::Text => {
            writeln!(out, "# seed {seed}")?;
            for r in &reports {
                writeln!(out, "{}", perm_text(&r.permutation))?;
            }
            let total = |f: fn(&SampleReport) -> u64| reports.iter().map(f).sum::<u64>();
            writeln!(
                out,
                "# samples {} sweeps {} bits {} substeps {} swap_ops {} max_depth {} generator {}",
                reports.len(),
                total(|r| r.sweeps_executed),
                total(|r| r.bits_consumed),
                total(|r| r.substeps),
                total(|r| r.swap_ops),
                reports.iter().map(|r| r.recursion_depth).max().unwrap_or(0),
                lexsamp::coins::GENERATOR,
            )?;
        }
        Format::Json => {
            let extensions = reports.iter().map(|r| r.permutation.as_slice()).collect();
            out = to_json(&SampleOutput {
                seed,
                schedule,
                extensions,
                stats: &reports,
            });
        }
        Format::Csv => {
            writeln!(out, "sample,permutation,sweeps_executed,bits_consumed,substeps,swap_ops,recursion_depth")?;
            for (i, r) in reports.iter().enumerate() {
                writeln!(
                    out,
                    "{i},{},{},{},{},{},{}",
                    perm_text(&r.permutation),
                    r.sweeps_executed,
                    r.bits_consumed,
                    r.substeps,
                    r.swap_ops,
                    r.recursion_depth
                )?;
            }
        }
    }
    Ok(out)
}

fn cmd_count(args: &CountArgs) -> Result<String> {
    let poset = load(&args.input)?;
    let count = count_extensions(poset.original())?;
    let n = poset.len();
    Ok(match args.common.format {
        Format::Text => format!("{count}\n"),
        Format::Json => to_json(&serde_json::json!({ "n": n, "count": count.to_string() })),
        Format::Csv => format!("n,count\n{n},{count}\n"),
    })
}

#[derive(Serialize)]
struct TestOutput<'a> {
    seed: u64,
    schedule: Schedule,
    significance: f64,
    passed: bool,
    report: &'a FrequencyReport,
}

fn cmd_test(args: &SampleArgs) -> Result<String> {
    let poset = load(&args.input)?;
    let seed = resolve_seed(args.common.seed);
    let schedule = schedule(args, poset.len());
    schedule.validate(poset.len())?;
    let report = stats::uniformity_test(&poset, cftp_sampler(&poset, schedule), args.samples as usize, seed)?;
    let passed = report.passes(SIGNIFICANCE);
    let mut out = String::new();
    match args.common.format {
        Format::Text => {
            writeln!(out, "# seed {seed}")?;
            writeln!(out, "{:>5}  {:<width$}  {:>9}  {:>9}  {:>9}", "cell", "extension", "observed", "freq", "expected", width = 2 * poset.len())?;
            let freqs = report.frequencies();
            for (i, label) in report.labels.iter().enumerate() {
                writeln!(
                    out,
                    "{:>5}  {:<width$}  {:>9}  {:>9.4}  {:>9.4}",
                    i + 1,
                    perm_text(label),
                    report.observed[i],
                    freqs[i],
                    report.expected[i],
                    width = 2 * poset.len()
                )?;
            }
            writeln!(
                out,
                "trials {} chi2 {:.4} dof {} p {:.6} unmatched {} -> {}",
                report.trials,
                report.chi_square,
                report.dof,
                report.p_value,
                report.unmatched,
                if passed { "PASS" } else { "FAIL" }
            )?;
        }
        Format::Json => {
            out = to_json(&TestOutput {
                seed,
                schedule,
                significance: SIGNIFICANCE,
                passed,
                report: &report,
            })
        }
        Format::Csv => {
            writeln!(out, "cell,extension,observed,frequency,expected")?;
            for (i, (label, f)) in report.labels.iter().zip(report.frequencies()).enumerate() {
                writeln!(out, "{},{},{},{f},{}", i + 1, perm_text(label), report.observed[i], report.expected[i])?;
            }
        }
    }
    Ok(out)
}

fn cmd_bench(args: &SampleArgs) -> Result<String> {
    let poset = load(&args.input)?;
    let seed = resolve_seed(args.common.seed);
    let schedule = schedule(args, poset.len());
    let r = stats::cost_report(&poset, schedule, args.samples as usize, seed)?;
    let mut out = String::new();
    match args.common.format {
        Format::Text => {
            writeln!(out, "# seed {seed}")?;
            writeln!(out, "n {} runs {} schedule {}", r.n, r.runs, r.schedule)?;
            writeln!(out, "{:<16} {:>12} {:>10}", "metric", "mean", "max")?;
            for (name, m) in [
                ("bits", r.bits),
                ("substeps", r.substeps),
                ("sweeps", r.sweeps),
                ("swap_ops", r.swap_ops),
                ("recursion_depth", r.recursion_depth),
            ] {
                writeln!(out, "{name:<16} {:>12.2} {:>10}", m.mean, m.max)?;
            }
            writeln!(out, "bits bound 1.83 n^3 ln n   {:>12.2}", r.bits_bound)?;
            writeln!(out, "ops bound 2.75 n^3 ln n    {:>12.2}", r.ops_bound)?;
            if let Some(f) = r.fixed_t {
                writeln!(out, "fixed t {}: bits ≤ 2t(n-1) = {:.0}, substeps ≤ 3t(n-1) = {:.0}", f.t, f.bits_per_substep_bound, f.substeps_bound)?;
            }
        }
        Format::Json => out = to_json(&serde_json::json!({ "seed": seed, "report": r })),
        Format::Csv => {
            writeln!(out, "metric,mean,max")?;
            for (name, m) in [("bits", r.bits), ("substeps", r.substeps), ("sweeps", r.sweeps), ("swap_ops", r.swap_ops), ("recursion_depth", r.recursion_depth)] {
                writeln!(out, "{name},{},{}", m.mean, m.max)?;
            }
        }
    }
    Ok(out)
}

fn cmd_tau(args: &TauArgs) -> Result<String> {
    let n = match (&args.input, args.n) {
        (Some(path), _) => load(path)?.len(),
        (None, Some(n)) => n,
        (None, None) => unreachable!("clap requires one"),
    };
    anyhow::ensure!(n >= 2, "τ needs n ≥ 2, got {n}");
    let seed = resolve_seed(args.common.seed);
    let sample = stats::measure_tau(n, args.samples as usize, seed);
    let s = sample.summary();
    Ok(match args.common.format {
        Format::Text => format!(
            "# seed {seed}\nn {} replicates {} mean {:.4} se {:.4} max {} bound (n^2-n+2)/2 {:.1} tail P(τ ≥ {:.1}) {:.4}\n",
            s.n, s.replicates, s.mean, s.std_error, s.max, s.mean_bound, s.tail_threshold, s.tail_fraction
        ),
        Format::Json => to_json(&serde_json::json!({ "seed": seed, "summary": s })),
        Format::Csv => {
            let mut out = String::from("replicate,tau\n");
            for (i, v) in sample.values.iter().enumerate() {
                writeln!(out, "{i},{v}")?;
            }
            out
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sample(a) => cmd_sample(a),
        Command::Count(a) => cmd_count(a),
        Command::Test(a) => cmd_test(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Tau(a) => cmd_tau(a),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            match err.downcast_ref::<lexsamp::Error>() {
                Some(lexsamp::Error::CapExceeded { .. }) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
