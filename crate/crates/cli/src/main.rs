use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ladderlab::ensemble::resolve_workers;
use ladderlab_cli::report::{CSV_FILE, META_FILE};
use ladderlab_cli::{
    emit, run_task, ExperimentConfig, Report, RunError, RunMeta, RunOptions, Task,
};

#[derive(Parser)]
#[command(
    name = "ladderlab",
    version,
    about = "Ladder-variable experiments: identities, generating functions, tails"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the task named in the config.
    Run(RunArgs),
    /// Evaluate the closed-form prediction for the configured quantity.
    Predict(RunArgs),
    /// Run the identity checks (or the generating-function checks when the
    /// config asks for them).
    Verify(RunArgs),
    /// Summarize a report written earlier.
    Report {
        /// Directory holding report.csv.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory for report.csv and report.meta.json; the CSV goes to
    /// stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record wall-clock time in the report (breaks byte-identical output).
    #[arg(long)]
    timing: bool,
}

fn main() -> ExitCode {
    match real_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> Result<bool, String> {
    let cli = Cli::parse();
    let (args, task) = match cli.command {
        Command::Report { out } => return summarize(&out),
        Command::Run(a) => (a, None),
        Command::Predict(a) => (a, Some(Task::Predict)),
        Command::Verify(a) => (a, Some(Task::VerifyIdentities)),
    };
    let mut cfg = ExperimentConfig::load(&args.config).map_err(|e| e.to_string())?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let task = match task {
        Some(Task::VerifyIdentities) if cfg.task == Task::SpitzerCheck => Task::SpitzerCheck,
        Some(t) => t,
        None => cfg.task,
    };
    let workers = resolve_workers(args.workers, cfg.workers).map_err(|e| e.to_string())?;
    let opts = RunOptions {
        workers,
        timing: args.timing,
    };
    let report = match run_task(&cfg, task, opts) {
        Ok(r) => r,
        Err(RunError::WorkerPanic {
            index,
            message,
            partial,
        }) => {
            let dir = args.out.clone().unwrap_or_else(|| PathBuf::from("."));
            let path = write_partial(&dir, &partial).map_err(|e| e.to_string())?;
            return Err(format!(
                "worker panicked on path {index}: {message}; partial results in {}",
                path.display()
            ));
        }
        Err(e) => return Err(e.to_string()),
    };
    let passed = report.passed();
    match &args.out {
        Some(dir) => {
            let meta = RunMeta {
                name: cfg.name.clone(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                seed: cfg.seed,
                workers,
                passed,
                config: serde_json::from_str(&cfg.to_json()).expect("config is JSON"),
            };
            let (csv, _) = emit(&report, &meta, dir).map_err(|e| e.to_string())?;
            eprintln!("wrote {}", csv.display());
        }
        None => std::io::stdout()
            .write_all(&report.to_csv())
            .map_err(|e| e.to_string())?,
    }
    eprintln!(
        "{} ({} rows)",
        if passed { "PASS" } else { "FAIL" },
        report.rows.len()
    );
    Ok(passed)
}

fn write_partial(dir: &Path, partial: &[Option<String>]) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join("partial-results.txt");
    let mut text = String::from("index\tresult\n");
    for (i, r) in partial.iter().enumerate() {
        text.push_str(&format!("{i}\t{}\n", r.as_deref().unwrap_or("<failed>")));
    }
    std::fs::write(&path, text)?;
    Ok(path)
}

fn summarize(dir: &Path) -> Result<bool, String> {
    let report = Report::read_csv(&dir.join(CSV_FILE)).map_err(|e| e.to_string())?;
    for r in &report.rows {
        println!(
            "{:<13} {}  predicted {}  measured {}",
            r.verdict.as_str(),
            r.quantity,
            r.predicted,
            r.measured
        );
    }
    if let Ok(meta) = std::fs::read_to_string(dir.join(META_FILE)) {
        if let Ok(m) = serde_json::from_str::<RunMeta>(&meta) {
            println!("run {} seed {} version {}", m.name, m.seed, m.version);
        }
    }
    let passed = report.passed();
    println!("{}", if passed { "PASS" } else { "FAIL" });
    Ok(passed)
}
