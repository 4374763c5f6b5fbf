use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use foliage::config::{parse_config, Command, RunConfig};
use foliage::driver::{cmd_export, cmd_run, cmd_verify_laws};
use foliage::export::{window_dot, window_json};
use foliage::report::{CheckRecord, Report, Status};

/// Exit code for unreadable or unwritable files.
const EXIT_IO: u8 = 3;
/// Exit code for invalid configurations and command lines.
const EXIT_CONFIG: u8 = 4;

#[derive(Parser)]
#[command(name = "foliage", version, about = "Build π-trees on Baire subspaces and check the laws behind them")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the pipeline, check the materialized tree and write it out.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, env = "FOLIAGE_OUT_DIR")]
        out: Option<PathBuf>,
    },
    /// Run law suites and write the report.
    VerifyLaws {
        #[arg(long)]
        config: PathBuf,
        /// Suite ids or record selectors, comma separated.
        #[arg(long, value_delimiter = ',')]
        suite: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, env = "FOLIAGE_OUT_DIR")]
        out: Option<PathBuf>,
    },
    /// Print the materialized tree.
    Export {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
}

#[derive(Debug)]
enum Failure {
    Io(String),
    Config(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => EXIT_IO,
            Failure::Config(_) => EXIT_CONFIG,
        }
    }
}

fn io_err(path: &Path) -> impl Fn(io::Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

fn load(path: &Path, command: Command) -> Result<RunConfig, Failure> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    let text = String::from_utf8(bytes).map_err(|e| Failure::Config(format!("{}: malformed-json: not UTF-8: {e}", path.display())))?;
    let mut cfg = parse_config(&text).map_err(|e| Failure::Config(format!("{}: {}: {e}", path.display(), e.kind())))?;
    cfg.command = command;
    Ok(cfg)
}

fn out_dir(flag: Option<PathBuf>, cfg: &RunConfig) -> PathBuf {
    flag.or_else(|| cfg.out_dir.clone()).unwrap_or_else(|| PathBuf::from("foliage-out"))
}

fn write(dir: &Path, name: &str, text: &str) -> Result<(), Failure> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(io_err(&path))
}

fn summarize(report: &Report) {
    let mut err = io::stderr().lock();
    for r in &report.records {
        if r.status != Status::Pass {
            let status = serde_json::to_value(r.status).expect("statuses serialize");
            let _ = writeln!(err, "{} {} {}", status.as_str().unwrap_or("?"), r.id, r.detail);
        }
    }
    let count = |s: Status| report.records.iter().filter(|r| r.status == s).count();
    let _ = writeln!(
        err,
        "{} checks: {} pass, {} fail, {} undecidable",
        report.records.len(),
        count(Status::Pass),
        count(Status::Fail),
        count(Status::Undecidable)
    );
}

/// Writes the report, and on failure the failing records plus a config that
/// replays them.
fn write_report(dir: &Path, report: &Report, cfg: &RunConfig) -> Result<(), Failure> {
    write(dir, "report.json", &report.to_json())?;
    let failed: Vec<&CheckRecord> = report.failures().collect();
    if !failed.is_empty() {
        let mut text = serde_json::to_string_pretty(&failed).expect("records serialize");
        text.push('\n');
        write(dir, "witness.json", &text)?;
        write(dir, "replay.json", &cfg.to_json())?;
    }
    Ok(())
}

fn prepare(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

fn execute(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Cmd::Run { config, out } => {
            let cfg = load(&config, Command::Run)?;
            let dir = out_dir(out, &cfg);
            let output = cmd_run(&cfg).map_err(|e| Failure::Config(e.to_string()))?;
            prepare(&dir)?;
            if let (Some(dot), Some(json)) = (output.dot(), output.json()) {
                write(&dir, "tree.dot", &dot)?;
                write(&dir, "tree.json", &json)?;
            }
            write_report(&dir, &output.report, &cfg)?;
            summarize(&output.report);
            Ok(output.report.exit_code() as u8)
        }
        Cmd::VerifyLaws { config, suite, seed, out } => {
            let mut cfg = load(&config, Command::VerifyLaws)?;
            if !suite.is_empty() {
                cfg.suites = suite;
            }
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let dir = out_dir(out, &cfg);
            let report = cmd_verify_laws(&cfg).map_err(|e| Failure::Config(e.to_string()))?;
            prepare(&dir)?;
            write_report(&dir, &report, &cfg)?;
            summarize(&report);
            Ok(report.exit_code() as u8)
        }
        Cmd::Export { config, format } => {
            let cfg = load(&config, Command::Export)?;
            let w = match cmd_export(&cfg) {
                Ok(w) => w,
                Err(e) => {
                    eprintln!("{e}");
                    return Ok(1);
                }
            };
            let text = match format {
                Format::Dot => window_dot(&w, "pi_tree"),
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&window_json(&w)).expect("trees serialize");
                    s.push('\n');
                    s
                }
            };
            io::stdout()
                .lock()
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Io(format!("stdout: {e}")))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            match &f {
                Failure::Io(m) | Failure::Config(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
