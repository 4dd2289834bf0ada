use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use specsumm::summary::RelaxMethod;
use specsumm_cli::commands::{self, GenSbmArgs, RelaxArgs, RelaxInit, SummarizeArgs};
use specsumm_cli::CliError;

/// Spectral k-supernode summaries of undirected graphs.
#[derive(Parser)]
#[command(name = "specsumm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Lm,
    Ocsa,
}

#[derive(Clone, Copy, ValueEnum)]
enum Init {
    LmEigvecs,
    Random,
}

#[derive(Subcommand)]
enum Command {
    /// Build a k-summary and print its evaluation report.
    Summarize {
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        /// Embedding dimension (defaults to k).
        #[arg(long)]
        eigvecs: Option<usize>,
        #[arg(long, value_enum, default_value = "lm")]
        method: Method,
        #[arg(long, default_value_t = 0)]
        reassign_rounds: usize,
        #[arg(long, default_value_t = 500)]
        reassign_samples: usize,
        /// Restrict to the largest connected component.
        #[arg(long)]
        lcc: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute F, L and the triangle estimate of a stored summary.
    Evaluate { graph: PathBuf, summary: PathBuf },
    /// Run Stiefel ascent on the relaxed problem.
    Relax {
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value = "random")]
        init: Init,
        #[arg(long, default_value_t = 100)]
        iters: usize,
        #[arg(long, default_value_t = 0.001)]
        tau: f64,
        #[arg(long, default_value_t = 0.001)]
        tol: f64,
        #[arg(long)]
        lcc: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the per-iteration objective as TSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Sample a stochastic block model graph.
    GenSbm {
        #[arg(long)]
        blocks: usize,
        #[arg(long)]
        size: usize,
        #[arg(long)]
        p_in: f64,
        #[arg(long)]
        p_out: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Planted membership file (defaults to OUT.membership).
        #[arg(long)]
        membership_out: Option<PathBuf>,
    },
    /// Expected triangle count from a summary, with the exact count.
    Triangles { graph: PathBuf, summary: PathBuf },
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Summarize {
            graph,
            k,
            eigvecs,
            method,
            reassign_rounds,
            reassign_samples,
            lcc,
            seed,
            out,
        } => commands::summarize(&SummarizeArgs {
            graph,
            k,
            eigvecs,
            method: match method {
                Method::Lm => RelaxMethod::LmEigvecs,
                Method::Ocsa => RelaxMethod::OcsaRandom,
            },
            reassign_rounds,
            reassign_samples,
            lcc,
            seed,
            out,
        }),
        Command::Evaluate { graph, summary } => commands::evaluate_cmd(&graph, &summary),
        Command::Relax {
            graph,
            k,
            init,
            iters,
            tau,
            tol,
            lcc,
            seed,
            trace,
        } => commands::relax(&RelaxArgs {
            graph,
            k,
            init: match init {
                Init::LmEigvecs => RelaxInit::LmEigvecs,
                Init::Random => RelaxInit::Random,
            },
            iters,
            tau,
            tol,
            lcc,
            seed,
            trace,
        }),
        Command::GenSbm {
            blocks,
            size,
            p_in,
            p_out,
            seed,
            out,
            membership_out,
        } => commands::gen_sbm(&GenSbmArgs {
            blocks,
            size,
            p_in,
            p_out,
            seed,
            out,
            membership_out,
        }),
        Command::Triangles { graph, summary } => commands::triangles(&graph, &summary),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(line) => {
            println!("{line}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
