//! `dtn`: preprocess, simulate, fit and diagnose dynamic text network
//! models. Every command writes its outputs and a `manifest.json` under
//! `--out-dir`.

mod commands;
mod error;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use error::{CliError, EXIT_IO, EXIT_USAGE};
use manifest::{output_digests, Manifest, MANIFEST};

#[derive(Parser)]
#[command(name = "dtn", version, about = "Dynamic text network models: preprocessing, simulation, inference and diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Model configuration: a `key=value` file, then `--set` overrides, then
/// `--seed`. Later assignments win.
#[derive(Args, Clone, Default)]
pub struct ModelArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub sets: Vec<String>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Filter tokens and mine n-grams from raw tokenized posts.
    Preprocess(commands::PreprocessArgs),
    /// Draw a synthetic corpus, link network and ground truth.
    Simulate(commands::SimulateArgs),
    /// Run the sampler and write posterior draws.
    Fit(commands::FitArgs),
    /// Posterior means, intervals, modal assignments and mixing series.
    Summarize(commands::SummarizeArgs),
    /// Weighted frequency timelines of tokens in one topic.
    Wf(commands::WfArgs),
    /// Adjusted Rand index between two label files.
    Ari(commands::AriArgs),
    /// Fit a grid of topic counts and pick one by the divergence criterion.
    SelectK(commands::SelectKArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Preprocess(_) => "preprocess",
            Command::Simulate(_) => "simulate",
            Command::Fit(_) => "fit",
            Command::Summarize(_) => "summarize",
            Command::Wf(_) => "wf",
            Command::Ari(_) => "ari",
            Command::SelectK(_) => "select-k",
        }
    }

    fn out_dir(&self) -> &PathBuf {
        match self {
            Command::Preprocess(a) => &a.out_dir,
            Command::Simulate(a) => &a.out_dir,
            Command::Fit(a) => &a.out_dir,
            Command::Summarize(a) => &a.out_dir,
            Command::Wf(a) => &a.out_dir,
            Command::Ari(a) => &a.out_dir,
            Command::SelectK(a) => &a.out_dir,
        }
    }

    fn run(&self, m: &mut Manifest) -> Result<(), CliError> {
        match self {
            Command::Preprocess(a) => commands::preprocess(a, m),
            Command::Simulate(a) => commands::simulate(a, m),
            Command::Fit(a) => commands::fit(a, m),
            Command::Summarize(a) => commands::summarize(a, m),
            Command::Wf(a) => commands::wf(a, m),
            Command::Ari(a) => commands::ari(a, m),
            Command::SelectK(a) => commands::select_k(a, m),
        }
    }
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    let command = cli.command;
    let out_dir = command.out_dir().clone();
    if let Err(e) = std::fs::create_dir_all(&out_dir) {
        eprintln!("error: {}", CliError::io(&out_dir, e));
        return ExitCode::from(EXIT_IO as u8);
    }

    let start = Instant::now();
    let mut manifest = Manifest {
        command: command.name().into(),
        version: env!("CARGO_PKG_VERSION").into(),
        args: argv[1..].to_vec(),
        started: now(),
        ..Default::default()
    };
    let result = command.run(&mut manifest);
    manifest.finished = now();
    manifest.wall_seconds = start.elapsed().as_secs_f64();
    manifest.exit_code = result.as_ref().map_or_else(|e| e.code, |_| 0);
    manifest.status = if result.is_ok() { "ok" } else { "error" }.into();
    manifest.error = result.as_ref().err().map(|e| e.message.clone());
    match output_digests(&out_dir) {
        Ok(outputs) => manifest.outputs = outputs,
        Err(e) => log::warn!("could not digest outputs: {e}"),
    }
    let path = out_dir.join(MANIFEST);
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    if let Err(e) = std::fs::write(&path, text + "\n") {
        eprintln!("error: {}", CliError::io(&path, e));
        return ExitCode::from(EXIT_IO as u8);
    }
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
