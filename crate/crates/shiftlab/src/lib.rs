//! Command-line driver, spec file format and built-in examples for
//! `shiftlab-core`.

pub mod corpus;
pub mod run;
pub mod spec;

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use shiftlab_core::Tolerance;

pub use run::{run_model, RunOptions, RunReport, TaskReport};
pub use spec::{parse_shift_spec, read_spec_file, Model, SpecDocument, SpecError, TaskDoc};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "shiftlab", version, about = "Checks and equivalence decisions for matrix-weighted bilateral shifts")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Relative tolerance (overrides the spec file)
    #[arg(long, global = true)]
    tol_rel: Option<f64>,
    /// Absolute tolerance (overrides the spec file)
    #[arg(long, global = true)]
    tol_abs: Option<f64>,
    /// Seed for the conjugator search
    #[arg(long, global = true, env = "SHIFTLAB_SEED", default_value_t = 0)]
    seed: u64,
    /// Write the machine report to PATH
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Suppress the human summary
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the task blocks of a spec file
    Verify { spec: PathBuf },
    /// Positive-weight form of a shift
    PositiveForm {
        spec: PathBuf,
        #[arg(long)]
        shift: String,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
        window: Vec<i64>,
    },
    /// Decide diagonal-form unitary equivalence of two shifts
    Decide {
        spec: PathBuf,
        #[arg(long)]
        s: String,
        #[arg(long)]
        t: String,
        #[arg(long, allow_negative_numbers = true, conflicts_with = "m_range", required_unless_present = "m_range")]
        m: Option<i64>,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
        m_range: Option<Vec<i64>>,
        #[arg(long)]
        depth: Option<usize>,
        /// Extra rows of the witness to construct
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
        window: Option<Vec<i64>>,
    },
    /// Structure checks for a banded operator
    Bands {
        spec: PathBuf,
        #[arg(long = "op")]
        operator: String,
        #[arg(long, value_enum)]
        mode: BandMode,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true, default_values_t = [-10, 10])]
        window: Vec<i64>,
        /// Band count bound for `--mode count` (defaults to the dimension)
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Run a built-in example
    Example {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(corpus::EXAMPLES))]
        name: String,
        /// Also write the example as a spec file
        #[arg(long, value_name = "PATH")]
        dump_spec: Option<PathBuf>,
    },
    /// Operator norms of the weights of a shift
    Norms {
        spec: PathBuf,
        #[arg(long)]
        shift: String,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
        window: Vec<i64>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum BandMode {
    Two,
    Three,
    Count,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
}

fn pair(v: &[i64]) -> [i64; 2] {
    [v[0], v[1]]
}

fn tolerance(model: &Model, g: &GlobalArgs) -> Result<Option<Tolerance>, CliError> {
    if g.tol_rel.is_none() && g.tol_abs.is_none() {
        return Ok(None);
    }
    let base = model.tolerance();
    let (rel, abs) = (g.tol_rel.unwrap_or(base.rel), g.tol_abs.unwrap_or(base.abs));
    if !(rel.is_finite() && abs.is_finite() && rel >= 0.0 && abs >= 0.0) {
        return Err(CliError::Usage("tolerances must be finite and non-negative".into()));
    }
    Ok(Some(Tolerance::new(rel, abs)))
}

fn load(path: &Path) -> Result<Model, CliError> {
    Ok(read_spec_file(path)?)
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32, CliError> {
    let g = &cli.global;
    let (model, source, decide) = match &cli.command {
        Command::Verify { spec } => (load(spec)?, spec.display().to_string(), false),
        Command::Example { name, dump_spec } => {
            let model = corpus::example(name).ok_or_else(|| CliError::Usage(format!("unknown example '{name}'")))?;
            if let Some(path) = dump_spec {
                write_file(path, &model.to_json())?;
            }
            (model, format!("example {name}"), false)
        }
        Command::PositiveForm { spec, shift, window } => {
            let task = TaskDoc::PositiveForm {
                shift: shift.clone(),
                window: pair(window),
                expect: None,
            };
            (load(spec)?.with_tasks(vec![task])?, spec.display().to_string(), false)
        }
        Command::Norms { spec, shift, window } => {
            let task = TaskDoc::WeightNorms {
                shift: shift.clone(),
                window: pair(window),
            };
            (load(spec)?.with_tasks(vec![task])?, spec.display().to_string(), false)
        }
        Command::Bands {
            spec,
            operator,
            mode,
            window,
            bound,
        } => {
            let (operator, window) = (operator.clone(), pair(window));
            let tasks = match mode {
                BandMode::Two => vec![
                    TaskDoc::VerifyUnitaryTwoBand {
                        operator: operator.clone(),
                        window,
                        expect: None,
                    },
                    TaskDoc::CheckTwoBandStructure {
                        operator,
                        window,
                        expect: None,
                    },
                ],
                BandMode::Three => vec![TaskDoc::VerifyUnitaryThreeBand {
                    operator,
                    window,
                    expect: None,
                }],
                BandMode::Count => vec![TaskDoc::CheckBandCountBound {
                    operator,
                    bound: *bound,
                    window,
                    expect: None,
                }],
            };
            (load(spec)?.with_tasks(tasks)?, spec.display().to_string(), false)
        }
        Command::Decide {
            spec,
            s,
            t,
            m,
            m_range,
            depth,
            window,
        } => {
            let task = TaskDoc::Decide {
                s: s.clone(),
                t: t.clone(),
                m: *m,
                m_range: m_range.as_deref().map(pair),
                depth: *depth,
                window: window.as_deref().map(pair),
                expect: None,
            };
            (load(spec)?.with_tasks(vec![task])?, spec.display().to_string(), true)
        }
    };
    let opts = RunOptions {
        tolerance: tolerance(&model, g)?,
        seed: g.seed,
    };
    let report = run_model(&model, &source, &opts);
    if let Some(path) = &g.json {
        write_file(path, &report.to_json())?;
    }
    if !g.quiet {
        let mut out = std::io::stdout().lock();
        let _ = out.write_all(report.summary().as_bytes());
    }
    Ok(if decide { decide_exit(&report.tasks[0]) } else { report.exit_code() })
}

fn decide_exit(task: &TaskReport) -> i32 {
    match task.status.as_str() {
        "Equivalent" => EXIT_OK,
        "Inconclusive" => EXIT_INCONCLUSIVE,
        _ => EXIT_FAILED,
    }
}
