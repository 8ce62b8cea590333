//! `layent`: entropy reports, verification suites and figure data.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use layent::io::{
    bound_chain_json, curve_csv, entropy_report_csv, entropy_report_json, parse_joint, parse_pmf,
    region_csv, simplex_csv, to_json,
};
use layent::sfrl::{linear_grid, DEFAULT_TAIL_TOL};
use layent::{
    bound_chain, curve_emit, region_sample, run_suite, simplex_grid, EntropyReport, EtaPreset,
    Suite, VerifyConfig,
};

#[derive(Parser)]
#[command(name = "layent", version, about = "Layered entropy toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Shannon, layered, min- and Rényi entropies of a pmf.
    Entropy {
        /// Pmf file (JSON array or CSV), `-` for stdin.
        file: PathBuf,
        /// Rényi orders, comma separated; `inf` is allowed.
        #[arg(long, value_delimiter = ',', value_parser = parse_alpha,
              default_value = "0,0.25,0.5,1,2,4,inf")]
        alpha: Vec<f64>,
        /// Rescale the input to sum to 1.
        #[arg(long)]
        normalize: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Both entropies on a barycentric grid over the ternary simplex.
    SimplexGrid {
        #[arg(long, default_value_t = 20)]
        resolution: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Sampled points `(H(X|Y), H(X\Y))` of the conditional-entropy region.
    Region {
        file: PathBuf,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        normalize: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Strong functional representation bound chain for a joint pmf, or the
    /// closed-form bound curves with `--curve`.
    Sfrl {
        /// Joint pmf file (rows are x); omit with `--curve`.
        #[arg(required_unless_present = "curve")]
        file: Option<PathBuf>,
        #[arg(long, conflicts_with = "file")]
        curve: bool,
        #[arg(long, default_value_t = 0.0)]
        i_min: f64,
        #[arg(long, default_value_t = 20.0)]
        i_max: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
        #[arg(long, default_value_t = DEFAULT_TAIL_TOL)]
        tail_tol: f64,
        /// Adds the entropy bound at this `η` to the chain report.
        #[arg(long, value_parser = parse_eta)]
        eta: Option<EtaPreset>,
        #[arg(long)]
        normalize: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Runs a verification suite and prints a JSON report.
    Verify {
        #[arg(value_parser = parse_suite)]
        suite: Suite,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_TAIL_TOL)]
        tail_tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Output {
    /// Defaults to csv for tables and json for reports.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Output {
    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

fn parse_alpha(s: &str) -> Result<f64, String> {
    let a = match s.trim() {
        "inf" | "infinity" => f64::INFINITY,
        t => t.parse::<f64>().map_err(|e| format!("{t:?}: {e}"))?,
    };
    if a.is_nan() || a < 0.0 {
        return Err(format!("order must be nonnegative, got {s}"));
    }
    Ok(a)
}

fn parse_eta(s: &str) -> Result<EtaPreset, String> {
    s.parse().map_err(|e: layent::Error| e.to_string())
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse()
        .map_err(|_| format!("expected one of {}", Suite::NAMES.join(", ")))
}

/// Failure of a command, mapped to the process exit code.
enum Failure {
    Usage(String),
    Verification(String),
}

impl From<layent::Error> for Failure {
    fn from(e: layent::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Usage(format!("stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: layent::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
        }
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Usage(format!("stdout: {e}"))),
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Entropy {
            file,
            alpha,
            normalize,
            out,
        } => {
            let p = with_path(&file, parse_pmf(&read_input(&file)?, normalize))?;
            let report = EntropyReport::new(&p, &alpha)?;
            let text = match out.format_or(Format::Csv) {
                Format::Csv => entropy_report_csv(&report),
                Format::Json => entropy_report_json(&report),
            };
            emit(out.out.as_deref(), &text)
        }
        Command::SimplexGrid { resolution, out } => {
            let grid = simplex_grid(resolution)?;
            let text = match out.format_or(Format::Csv) {
                Format::Csv => simplex_csv(&grid),
                Format::Json => to_json(&grid),
            };
            emit(out.out.as_deref(), &text)
        }
        Command::Region {
            file,
            trials,
            seed,
            normalize,
            out,
        } => {
            let p = with_path(&file, parse_pmf(&read_input(&file)?, normalize))?;
            let sample = region_sample(&p, trials, seed)?;
            let text = match out.format_or(Format::Csv) {
                Format::Csv => region_csv(&sample),
                Format::Json => to_json(&sample),
            };
            emit(out.out.as_deref(), &text)
        }
        Command::Sfrl {
            file,
            curve,
            i_min,
            i_max,
            points,
            tail_tol,
            eta,
            normalize,
            out,
        } => {
            if curve {
                if !(i_min >= 0.0 && i_max >= i_min && i_max.is_finite()) || points < 2 {
                    return Err(Failure::Usage(format!(
                        "curve needs 0 <= i-min <= i-max and at least 2 points, got [{i_min}, {i_max}] with {points}"
                    )));
                }
                let rows = curve_emit(&linear_grid(i_min, i_max, points))?;
                let text = match out.format_or(Format::Csv) {
                    Format::Csv => curve_csv(&rows),
                    Format::Json => to_json(&rows),
                };
                return emit(out.out.as_deref(), &text);
            }
            if out.format_or(Format::Json) == Format::Csv {
                return Err(Failure::Usage(
                    "the bound chain is only available as json".into(),
                ));
            }
            let file = file.expect("clap requires a file without --curve");
            let j = with_path(&file, parse_joint(&read_input(&file)?, normalize))?;
            let chain = bound_chain(&j, tail_tol)?;
            let text = match eta {
                None => bound_chain_json(&chain),
                Some(preset) => {
                    let lambda = chain.lambda_k_upper();
                    let mut v = serde_json::to_value(chain).expect("serializable chain");
                    v["eta"] = preset.resolve(lambda).into();
                    v["h_bound"] = preset.bound(lambda)?.into();
                    to_json(&v)
                }
            };
            emit(out.out.as_deref(), &text)
        }
        Command::Verify {
            suite,
            trials,
            seed,
            tol,
            tail_tol,
            out,
        } => {
            let cfg = VerifyConfig {
                trials,
                seed,
                tol,
                tail_tol,
            };
            let report = run_suite(suite, &cfg)?;
            emit(out.as_deref(), &to_json(&report))?;
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Verification(format!(
                    "{} of {} checks failed",
                    report.failure_count, report.cases
                )))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
    }
}
