//! Command-line front end: exact distributions, duality reports,
//! interference scans, scattershot sampling, verification suites, and a
//! small permanent-kernel timer.
//!
//! Exit codes: 0 on success, 2 on validation problems (flags, shapes,
//! caps, unreadable inputs), 1 on numerical contract violations (a
//! distribution that fails its normalization invariant, or a verify suite
//! above tolerance).

mod suites;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use fermibos::{
    haar_random_unitary, hom_curve, output_distribution_fast, permanent, permanent_naive,
    run_duality_check, run_scattershot, write_records_jsonl, ComplexMatrix, InternalStateSet,
    OccupationVector, ScattershotConfig, Statistics, SymmetryFlag, NAIVE_PERMANENT_CAP,
    PERMANENT_CAP,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(
    name = "fermibos",
    version,
    about = "Bosons, fermions, and everything in between on unitary linear networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, ValueEnum)]
enum FlagArg {
    #[value(name = "S", alias = "s")]
    S,
    #[value(name = "A", alias = "a")]
    A,
}

impl From<FlagArg> for SymmetryFlag {
    fn from(arg: FlagArg) -> Self {
        match arg {
            FlagArg::S => SymmetryFlag::S,
            FlagArg::A => SymmetryFlag::A,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum StatisticsArg {
    Bosonic,
    Fermionic,
}

impl From<StatisticsArg> for Statistics {
    fn from(arg: StatisticsArg) -> Self {
        match arg {
            StatisticsArg::Bosonic => Statistics::Bosonic,
            StatisticsArg::Fermionic => Statistics::Fermionic,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Permanent of a complex matrix read from a JSON file.
    Permanent {
        /// Matrix file: {"rows": R, "cols": C, "entries": [[re, im], ..]}.
        #[arg(long)]
        matrix: PathBuf,
        /// Use the permutation-sum evaluation instead of Ryser's method.
        #[arg(long)]
        naive: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Exact output distribution of a Fock input through a unitary network.
    Distribution {
        #[arg(long)]
        matrix: PathBuf,
        /// Input occupations, e.g. "1,1,0".
        #[arg(long)]
        input: String,
        #[arg(long)]
        statistics: StatisticsArg,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Compare the fast permanent/determinant route against the dense
    /// first-quantization oracle for a symmetrized input.
    Duality {
        #[arg(long)]
        eps1: FlagArg,
        #[arg(long)]
        eps2: FlagArg,
        /// Network file; omit to draw a Haar-random network from --seed.
        #[arg(long, conflicts_with = "haar")]
        matrix: Option<PathBuf>,
        /// Draw a Haar-random network (the default when --matrix is absent).
        #[arg(long)]
        haar: bool,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Input occupations, e.g. "1,1,0".
        #[arg(long)]
        input: String,
        /// Real pairwise overlap of the two internal states (two-particle
        /// inputs only); defaults to orthonormal internal states.
        #[arg(long)]
        overlap: Option<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Two-particle interference scan on a balanced beam splitter.
    Hom {
        /// Overlap grid start:end:step, e.g. 0:1:0.05.
        #[arg(long, default_value = "0:1:0.05")]
        grid: String,
        #[arg(long, value_enum, default_value_t = FlagArg::S)]
        eps1: FlagArg,
        #[arg(long)]
        eps2: FlagArg,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Scattershot sampling with fermionic pair sources.
    Scattershot {
        #[arg(long)]
        modes: usize,
        #[arg(long)]
        particles: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Write one JSON record per trial to this file.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a named verification suite (or all of them).
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Time the permanent kernels and emit CSV.
    Bench {
        #[arg(long, default_value_t = 8)]
        min: usize,
        #[arg(long, default_value_t = 18)]
        max: usize,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug)]
struct VerificationFailure {
    failed: Vec<String>,
}

impl fmt::Display for VerificationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "verification failed: {}", self.failed.join(", "))
    }
}

impl std::error::Error for VerificationFailure {}

fn main() -> ExitCode {
    configure_thread_pool();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn configure_thread_pool() {
    if let Ok(text) = std::env::var("DUALITY_SAMPLER_THREADS") {
        match text.trim().parse::<usize>() {
            Ok(threads) if threads >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
            _ => eprintln!(
                "warning: ignoring DUALITY_SAMPLER_THREADS={text:?}: not a positive integer"
            ),
        }
    }
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<VerificationFailure>().is_some() {
        return 1;
    }
    if let Some(core) = err.downcast_ref::<fermibos::Error>() {
        if matches!(core, fermibos::Error::NormalizationBroken { .. }) {
            return 1;
        }
    }
    2
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Permanent {
            matrix,
            naive,
            output,
        } => {
            let m = read_matrix(&matrix)?;
            let value = if naive {
                permanent_naive(&m)?
            } else {
                permanent(&m)?
            };
            emit(&format!("{}\n", format_complex(value)), output.as_deref())
        }
        Command::Distribution {
            matrix,
            input,
            statistics,
            format,
            output,
        } => {
            let u = read_matrix(&matrix)?;
            let n = parse_occupations(&input)?;
            let dist = output_distribution_fast(&u, &n, statistics.into())?;
            let text = match format {
                FormatArg::Json => format!("{}\n", serde_json::to_string_pretty(&dist)?),
                FormatArg::Csv => dist.to_csv(),
            };
            emit(&text, output.as_deref())
        }
        Command::Duality {
            eps1,
            eps2,
            matrix,
            haar: _,
            seed,
            input,
            overlap,
            output,
        } => {
            let n = parse_occupations(&input)?;
            let u = match matrix {
                Some(path) => read_matrix(&path)?,
                None => haar_random_unitary(n.modes(), seed),
            };
            let internal = match overlap {
                Some(g) => {
                    anyhow::ensure!(
                        n.total() == 2,
                        "--overlap describes a two-particle internal pair, but the input has {} particles",
                        n.total()
                    );
                    InternalStateSet::pairwise_overlap(g)?
                }
                None => InternalStateSet::orthonormal(n.total()),
            };
            let report = run_duality_check(eps1.into(), eps2.into(), &n, &internal, &u)?;
            emit(
                &format!("{}\n", serde_json::to_string_pretty(&report)?),
                output.as_deref(),
            )
        }
        Command::Hom {
            grid,
            eps1,
            eps2,
            format,
            output,
        } => {
            let overlaps = parse_grid(&grid)?;
            let points = hom_curve(&overlaps, eps1.into(), eps2.into())?;
            let text = match format {
                FormatArg::Json => format!("{}\n", serde_json::to_string_pretty(&points)?),
                FormatArg::Csv => {
                    let mut out = String::from("overlap,coincidence,note\n");
                    for point in &points {
                        let coincidence =
                            point.coincidence.map(|p| p.to_string()).unwrap_or_default();
                        let note = point.note.as_deref().unwrap_or("");
                        out.push_str(&format!("{},{},{}\n", point.overlap, coincidence, note));
                    }
                    out
                }
            };
            emit(&text, output.as_deref())
        }
        Command::Scattershot {
            modes,
            particles,
            trials,
            seed,
            output,
        } => {
            let config = ScattershotConfig::new(modes, particles, trials, seed)?;
            let run = run_scattershot(&config)?;
            if let Some(path) = output {
                let file = fs::File::create(&path)
                    .with_context(|| format!("creating {}", path.display()))?;
                write_records_jsonl(&run.records, std::io::BufWriter::new(file))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            println!("{}", serde_json::to_string_pretty(&run.summary)?);
            Ok(())
        }
        Command::Verify { suite, seed } => {
            let names: Vec<&str> = if suite == "all" {
                suites::SUITE_NAMES.to_vec()
            } else {
                vec![suite.as_str()]
            };
            let mut failed = Vec::new();
            for name in names {
                let outcome = suites::run_suite(name, seed)?;
                let status = if outcome.passed() { "OK" } else { "FAIL" };
                println!(
                    "suite {}: max deviation {:.3e} (tolerance {:.0e}) {status}",
                    outcome.name, outcome.deviation, outcome.tolerance
                );
                if !outcome.passed() {
                    failed.push(format!(
                        "{} at {:.3e} > {:.0e}",
                        outcome.name, outcome.deviation, outcome.tolerance
                    ));
                }
            }
            if failed.is_empty() {
                Ok(())
            } else {
                Err(VerificationFailure { failed }.into())
            }
        }
        Command::Bench {
            min,
            max,
            repeats,
            output,
        } => {
            anyhow::ensure!(
                2 <= min && min <= max && max <= PERMANENT_CAP,
                "size range must satisfy 2 <= min <= max <= {PERMANENT_CAP}"
            );
            anyhow::ensure!(repeats >= 1, "need at least one repeat");
            let mut out = String::from("n,ryser_seconds,naive_seconds\n");
            for n in min..=max {
                let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
                let m = ComplexMatrix::from_fn(n, n, |_, _| {
                    Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
                });
                let ryser = best_time(repeats, || {
                    permanent(&m).unwrap();
                });
                let naive = if n <= NAIVE_PERMANENT_CAP {
                    let t = best_time(repeats, || {
                        permanent_naive(&m).unwrap();
                    });
                    format!("{t:.3e}")
                } else {
                    String::new()
                };
                out.push_str(&format!("{n},{ryser:.3e},{naive}\n"));
            }
            emit(&out, output.as_deref())
        }
    }
}

fn best_time(repeats: usize, mut work: impl FnMut()) -> f64 {
    let mut best = f64::INFINITY;
    for _ in 0..repeats {
        let started = Instant::now();
        work();
        best = best.min(started.elapsed().as_secs_f64());
    }
    best
}

fn read_matrix(path: &Path) -> anyhow::Result<ComplexMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let matrix: ComplexMatrix = serde_json::from_str(&text)
        .with_context(|| format!("parsing matrix from {}", path.display()))?;
    Ok(matrix)
}

fn parse_occupations(text: &str) -> anyhow::Result<OccupationVector> {
    text.parse::<OccupationVector>()
        .map_err(|message| anyhow::anyhow!("bad occupation list `{text}`: {message}"))
}

fn emit(text: &str, output: Option<&Path>) -> anyhow::Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Grid syntax `start:end:step`, endpoints inclusive (the last point is
/// clamped onto `end` to absorb floating-point drift).
fn parse_grid(text: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    anyhow::ensure!(
        parts.len() == 3,
        "grid must look like start:end:step, got `{text}`"
    );
    let start: f64 = parts[0].parse().context("grid start")?;
    let end: f64 = parts[1].parse().context("grid end")?;
    let step: f64 = parts[2].parse().context("grid step")?;
    anyhow::ensure!(
        start.is_finite() && end.is_finite() && step.is_finite(),
        "grid values must be finite"
    );
    anyhow::ensure!(step > 0.0, "grid step must be positive");
    anyhow::ensure!(start <= end, "grid start must not exceed its end");
    let span = (end - start) / step;
    let count = (span + span * 1e-12 + 1e-12).floor() as usize + 1;
    anyhow::ensure!(count <= 10_001, "grid has {count} points; the cap is 10001");
    Ok((0..count)
        .map(|i| (start + i as f64 * step).min(end))
        .collect())
}

fn format_complex(z: Complex64) -> String {
    let re = format_float(z.re);
    if z.im.abs() < 1e-12 {
        return re;
    }
    let im = format_float(z.im.abs());
    if z.re.abs() < 1e-12 {
        if z.im < 0.0 {
            return format!("-{im}i");
        }
        return format!("{im}i");
    }
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("{re}{sign}{im}i")
}

fn format_float(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x}")
    }
}
