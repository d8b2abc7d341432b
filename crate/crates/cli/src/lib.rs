//! Declarative scenario runner for the `abphase` library.
//!
//! A scenario file (TOML, see `docs/scenario-format.md`) names a
//! `scenario_kind`, the sources, arms and optional shield; [`run`]
//! executes it and [`output`] writes the report and CSV.

pub mod config;
pub mod output;
pub mod run;
pub mod selftest;
pub mod sweep;
pub mod units;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use config::{load_scenario, parse_scenario, ConfigError, ScenarioConfig, ScenarioKind};
pub use run::{run_scenario, ExecError, RunReport};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "ABPHASE_OUT_DIR";

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const EXECUTION: i32 = 1;
    pub const GATE: i32 = 2;
    pub const CONFIG: i32 = 3;
}

#[derive(Debug, Parser)]
#[command(name = "abphase", version, about = "Run vacuum-energy phase and shielding scenarios")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct CommonArgs {
    /// Output directory [default: $ABPHASE_OUT_DIR, else the current directory]
    #[arg(long, env = OUT_DIR_ENV)]
    pub out: Option<PathBuf>,
    /// Force fixed-order reductions and omit timestamps and wall times
    #[arg(long)]
    pub deterministic: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Execute a scenario and write its outputs
    Run {
        file: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Parse and validate a scenario, printing the normalized config
    Validate { file: PathBuf },
    /// Run a scenario once per value of a numeric parameter
    Sweep {
        file: PathBuf,
        /// Dotted path into the scenario, e.g. `sources.0.length`
        #[arg(long)]
        param: String,
        /// Comma-separated values (SI)
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        /// Number of sweep points run concurrently
        #[arg(long, default_value_t = 1)]
        parallel: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the built-in oracle checks
    Selftest,
}

fn out_dir(common: &CommonArgs) -> PathBuf {
    common.out.clone().unwrap_or_else(|| PathBuf::from("."))
}

fn base_dir(file: &Path) -> &Path {
    file.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."))
}

/// Load a scenario, applying `--deterministic`.
fn load(file: &Path, deterministic: bool) -> Result<ScenarioConfig, ConfigError> {
    let (mut config, _) = load_scenario(file)?;
    if deterministic {
        config.quadrature.deterministic = true;
    }
    Ok(config)
}

/// Execute a parsed command line, writing human output to `out` and
/// diagnostics to `err`. Returns the process exit code.
pub fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match cli.command {
        Command::Validate { file } => match load_scenario(&file) {
            Ok((config, _)) => {
                let _ = write!(out, "{}", config.to_toml());
                exit::OK
            }
            Err(e) => {
                let _ = writeln!(err, "config error in {}: {e}", file.display());
                exit::CONFIG
            }
        },
        Command::Run { file, common } => {
            let config = match load(&file, common.deterministic) {
                Ok(c) => c,
                Err(e) => {
                    let _ = writeln!(err, "config error in {}: {e}", file.display());
                    return exit::CONFIG;
                }
            };
            let mut report = match run_scenario(&config, base_dir(&file)) {
                Ok(r) => r,
                Err(e) => {
                    let _ = writeln!(err, "execution error in scenario `{}`: {e}", config.scenario);
                    return exit::EXECUTION;
                }
            };
            let written = output::write_outputs(&config, &mut report, &out_dir(&common), common.deterministic);
            let _ = write!(out, "{}", output::report_text(&report, common.deterministic));
            if !written {
                for o in report.outputs.iter().filter(|o| o.error.is_some()) {
                    let _ = writeln!(err, "output error: {}", o.error.as_deref().unwrap_or_default());
                }
                exit::EXECUTION
            } else if !report.gates_passed() {
                let _ = writeln!(err, "tolerance gate failed");
                exit::GATE
            } else {
                exit::OK
            }
        }
        Command::Sweep { file, param, values, parallel, common } => {
            let prepared = (|| {
                let values = sweep::parse_values(&values)?;
                let text = std::fs::read_to_string(&file)
                    .map_err(|e| ConfigError::new(format!("cannot read {}: {e}", file.display())))?;
                let mut text = text;
                if common.deterministic {
                    let mut doc: toml::Value = toml::from_str(&text).map_err(|e| ConfigError::new(e.to_string()))?;
                    force_deterministic(&mut doc);
                    text = toml::to_string(&doc).map_err(|e| ConfigError::new(e.to_string()))?;
                }
                Ok::<_, ConfigError>((values, text))
            })();
            let (values, text) = match prepared {
                Ok(p) => p,
                Err(e) => {
                    let _ = writeln!(err, "config error: {e}");
                    return exit::CONFIG;
                }
            };
            let points = match sweep::sweep(&text, base_dir(&file), &param, &values, parallel.max(1)) {
                Ok(p) => p,
                Err(e) => {
                    let _ = writeln!(err, "config error in {}: {e}", file.display());
                    return exit::CONFIG;
                }
            };
            let config = parse_scenario(&text, base_dir(&file)).expect("validated by sweep");
            let rows: Vec<_> = points.iter().map(|p| p.row(&config.scenario, &param, common.deterministic)).collect();
            let csv = output::csv_text(&rows);
            let path = out_dir(&common).join(format!("{}.sweep.csv", config.file_stem()));
            let _ = write!(out, "{csv}");
            if let Err(e) = std::fs::create_dir_all(out_dir(&common)).and_then(|_| std::fs::write(&path, &csv)) {
                let _ = writeln!(err, "output error: {}: {e}", path.display());
                return exit::EXECUTION;
            }
            if points.iter().any(|p| p.outcome.is_err()) {
                exit::EXECUTION
            } else if points.iter().any(|p| p.outcome.as_ref().is_ok_and(|r| !r.gates_passed())) {
                exit::GATE
            } else {
                exit::OK
            }
        }
        Command::Selftest => {
            let checks = selftest::run_selftest();
            for c in &checks {
                let verdict = if c.passed { "PASS" } else { "FAIL" };
                let _ = writeln!(out, "{verdict} {}: {} (tol {})", c.name, output::num(c.measured), output::num(c.tolerance));
            }
            if checks.iter().all(|c| c.passed) { exit::OK } else { exit::GATE }
        }
    }
}

fn force_deterministic(doc: &mut toml::Value) {
    if let toml::Value::Table(t) = doc {
        let q = t.entry("quadrature").or_insert_with(|| toml::Value::Table(Default::default()));
        if let toml::Value::Table(q) = q {
            q.insert("deterministic".into(), toml::Value::Boolean(true));
        }
    }
}

/// Parse `args` (including the program name) and execute. Argument
/// errors map to the config exit code; `--help`/`--version` exit 0.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli, out, err),
        Err(e) => {
            let code = if e.use_stderr() { exit::CONFIG } else { exit::OK };
            let _ = if e.use_stderr() { write!(err, "{}", e.render()) } else { write!(out, "{}", e.render()) };
            code
        }
    }
}
