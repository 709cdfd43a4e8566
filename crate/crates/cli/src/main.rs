mod render;

use clap::{Parser, Subcommand, ValueEnum};
use parcalc::{
    metrics, parse_rational, reduction_algorithm, schedule, sweep_mu, sweep_processors,
    verify_spec, Algorithm, LoadedSpec, MuRow, PolynomialComplexity, ProblemSpec, Rational,
    RefinementLevel, SchedulerKind, SweepRow,
};
use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "parcalc", version, about = "Performance calculus for parallel algorithms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Schedule a problem spec and report every metric.
    Analyze {
        spec: PathBuf,
        #[command(flatten)]
        sched: SchedArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Duration of one unit of calculation, in seconds.
        #[arg(long)]
        tcalc: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a generated problem spec.
    Generate {
        family: String,
        size: String,
        /// Refinement level: 1, 2, ... or `full`.
        #[arg(long, default_value = "full")]
        level: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the execution matrix of a problem spec.
    Schedule {
        spec: PathBuf,
        #[command(flatten)]
        sched: SchedArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Metrics across processor counts, as CSV.
    #[command(name = "sweep-p")]
    SweepP {
        spec: PathBuf,
        /// Comma-separated processor counts; may be empty.
        #[arg(long = "P", allow_hyphen_values = true)]
        p: String,
        #[arg(long, value_enum, default_value_t = SchedName::Level)]
        scheduler: SchedName,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scale-up across chunk counts for a polynomial complexity, as CSV.
    #[command(name = "sweep-mu")]
    SweepMu {
        #[arg(long, default_value = "sum")]
        family: String,
        /// Parent input size.
        #[arg(long)]
        n: u64,
        /// Comma-separated coefficients, highest degree first.
        #[arg(long, allow_hyphen_values = true)]
        coefficients: String,
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every structural and metric check on a problem spec.
    Verify {
        spec: PathBuf,
        #[arg(long = "P", default_value = "1,2,4,8", allow_hyphen_values = true)]
        p: String,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct SchedArgs {
    /// Processor count; optional for the perfect scheduler.
    #[arg(long = "P")]
    p: Option<usize>,
    #[arg(long, value_enum, default_value_t = SchedName::Level)]
    scheduler: SchedName,
    /// Row-group divisor of the perfect scheduler.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchedName {
    Level,
    Greedy,
    Perfect,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
    Csv,
}

/// Failure carrying its process exit code.
struct Failure {
    code: u8,
    message: String,
}

const VERIFY_FAILED: u8 = 1;
const INPUT: u8 = 2;
const PRECONDITION: u8 = 3;

fn fail(code: u8, message: impl fmt::Display) -> Failure {
    Failure {
        code,
        message: message.to_string(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Analyze { spec, sched, format, tcalc, out } => {
            let a = load(&spec)?;
            let m = run_scheduler(&a, &sched)?;
            let mut r = metrics::report(&m).map_err(|e| fail(PRECONDITION, e))?;
            if let Some(t) = tcalc {
                let seconds = parse_rational(&t).map_err(|e| fail(INPUT, format!("--tcalc: {e}")))?;
                if seconds <= Rational::from_integer(0.into()) {
                    return Err(fail(INPUT, "--tcalc must be positive"));
                }
                r = r.with_tcalc(seconds);
            }
            let text = match format {
                Format::Json => json(&r),
                Format::Table => render::report_table(&r, render::color_enabled()),
                Format::Csv => return Err(fail(INPUT, "analyze supports json or table")),
            };
            emit(out.as_deref(), &text)
        }
        Command::Generate { family, size, level, out } => {
            if family != "reduction" {
                return Err(fail(INPUT, format!("unknown family `{family}` (known: reduction)")));
            }
            let n: u64 = size
                .parse()
                .map_err(|_| fail(INPUT, format!("invalid size `{size}`")))?;
            let level = match level.as_str() {
                "full" => RefinementLevel::Full,
                l => RefinementLevel::Level(
                    l.parse()
                        .map_err(|_| fail(INPUT, format!("invalid level `{l}`")))?,
                ),
            };
            let a = reduction_algorithm(n, level).map_err(|e| fail(INPUT, e))?;
            let spec = ProblemSpec::from_algorithm(&format!("reduction{n}"), &a);
            emit(out.as_deref(), &(spec.to_json_pretty() + "\n"))
        }
        Command::Schedule { spec, sched, format, out } => {
            let a = load(&spec)?;
            let m = run_scheduler(&a, &sched)?;
            let text = match format {
                Format::Json => json(&m.to_json()),
                Format::Table => render::matrix_table(&m, render::color_enabled()),
                Format::Csv => return Err(fail(INPUT, "schedule supports json or table")),
            };
            emit(out.as_deref(), &text)
        }
        Command::SweepP { spec, p, scheduler, out } => {
            let a = load(&spec)?;
            let ps = parse_list::<usize>(&p, "--P")?;
            let kind = match scheduler {
                SchedName::Level => SchedulerKind::Level,
                SchedName::Greedy => SchedulerKind::Greedy,
                SchedName::Perfect => {
                    return Err(fail(INPUT, "sweep-p supports the level and greedy schedulers"))
                }
            };
            let rows = sweep_processors(&a, kind, &ps).map_err(|e| fail(PRECONDITION, e))?;
            let text = csv_text(&SweepRow::HEADER, rows.iter().map(SweepRow::record))?;
            emit(out.as_deref(), &text)
        }
        Command::SweepMu { family, n, coefficients, mu, out } => {
            if family.trim().is_empty() {
                return Err(fail(INPUT, "--family must not be empty"));
            }
            let coefficients = coefficients
                .split(',')
                .map(|c| parse_rational(c.trim()).map_err(|e| fail(INPUT, format!("--coefficients: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let c = PolynomialComplexity::new(coefficients).map_err(|e| fail(INPUT, e))?;
            let mus = parse_list::<u64>(&mu, "--mu")?;
            let rows = sweep_mu(&c, n, &mus);
            let text = csv_text(&MuRow::HEADER, rows.iter().map(MuRow::record))?;
            emit(out.as_deref(), &text)
        }
        Command::Verify { spec, p, format, out } => {
            let loaded = read_spec(&spec)?;
            let ps = parse_list::<usize>(&p, "--P")?;
            if ps.contains(&0) {
                return Err(fail(PRECONDITION, "processor count must be at least 1"));
            }
            let report = verify_spec(&loaded, &ps);
            let text = match format {
                Format::Json => json(&report),
                Format::Table => render::verification_table(&report, render::color_enabled()),
                Format::Csv => return Err(fail(INPUT, "verify supports json or table")),
            };
            emit(out.as_deref(), &text)?;
            if report.passed() {
                Ok(())
            } else {
                Err(fail(VERIFY_FAILED, ""))
            }
        }
    }
}

fn read_spec(path: &Path) -> Result<LoadedSpec, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(INPUT, format!("{}: {e}", path.display())))?;
    LoadedSpec::parse(&text).map_err(|e| fail(INPUT, format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Algorithm, Failure> {
    read_spec(path)?
        .to_algorithm()
        .map_err(|e| fail(INPUT, format!("{}: {e}", path.display())))
}

fn run_scheduler(a: &Algorithm, args: &SchedArgs) -> Result<parcalc::ExecutionMatrix, Failure> {
    let kind = match (args.scheduler, args.n) {
        (SchedName::Level, None) => SchedulerKind::Level,
        (SchedName::Greedy, None) => SchedulerKind::Greedy,
        (SchedName::Perfect, Some(n)) => SchedulerKind::Perfect { n },
        (SchedName::Perfect, None) => return Err(fail(INPUT, "--scheduler perfect requires --n")),
        (_, Some(_)) => return Err(fail(INPUT, "--n only applies to --scheduler perfect")),
    };
    if args.p.is_none() && !matches!(kind, SchedulerKind::Perfect { .. }) {
        return Err(fail(INPUT, "--P is required"));
    }
    schedule(a, kind, args.p).map_err(|e| fail(PRECONDITION, e))
}

fn parse_list<T: std::str::FromStr>(s: &str, flag: &str) -> Result<Vec<T>, Failure> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse().map_err(|_| fail(INPUT, format!("{flag}: invalid value `{x}`"))))
        .collect()
}

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

fn csv_text(
    header: &[&str],
    records: impl Iterator<Item = Vec<String>>,
) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| fail(INPUT, e);
    w.write_record(header).map_err(io)?;
    for r in records {
        w.write_record(&r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| fail(INPUT, e))?;
    Ok(String::from_utf8(bytes).expect("utf-8 csv"))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| fail(INPUT, format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
