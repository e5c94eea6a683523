use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use residuum::cli::{self, ConductorRequest, Report};
use residuum::Error;

#[derive(Parser)]
#[command(
    name = "residuum",
    version,
    about = "Exact residues and descent of k-differentials on singular curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Print the machine-readable JSON report.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// |V|, |E|, b1, genus sum, arithmetic genus, tropical Jacobian dimension.
    GraphInvariants {
        file: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Per-edge and per-component residue sums of a document differential.
    CheckBalance {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[command(flatten)]
        out: Output,
    },
    /// Build the differential from edge parameters and print its residue table.
    Construct {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// Edge parameters, e.g. `q12=1,q23=2,q31=3`.
        #[arg(long)]
        params: Option<String>,
        /// Write the constructed differential as a curve document.
        #[arg(long)]
        emit: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Dualizing sections, residue span and rank diagnostics.
    Span {
        file: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Conductor, δ and descent at a singularity.
    Conductor {
        /// Curve document holding custom singularities.
        file: Option<PathBuf>,
        /// Catalog name (node, cusp, tacnode) or singularity id in FILE.
        #[arg(long)]
        singularity: String,
        /// Per-branch coefficient functions separated by `;`, e.g. `2/u; -2/v`.
        #[arg(long)]
        differential: Option<String>,
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// Truncation order of local series.
        #[arg(long)]
        trunc: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Run the built-in acceptance suite.
    Selftest {
        #[command(flatten)]
        out: Output,
    },
}

fn read(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn run(command: Command) -> Result<(Report, bool), Error> {
    Ok(match command {
        Command::GraphInvariants { file, out } => {
            (cli::cmd_graph_invariants(&read(&file)?)?, out.json)
        }
        Command::CheckBalance { file, k, out } => {
            (cli::cmd_check_balance(&read(&file)?, k)?, out.json)
        }
        Command::Construct {
            file,
            k,
            params,
            emit,
            out,
        } => {
            let params = params.as_deref().map(cli::parse_params).transpose()?;
            let report = cli::cmd_construct(&read(&file)?, k, params.as_ref())?;
            if let (Some(path), Some(doc)) = (emit, &report.emitted) {
                let mut text = serde_json::to_string_pretty(doc).expect("document serializes");
                text.push('\n');
                std::fs::write(&path, text)
                    .map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))?;
            }
            (report, out.json)
        }
        Command::Span { file, out } => (cli::cmd_span(&read(&file)?)?, out.json),
        Command::Conductor {
            file,
            singularity,
            differential,
            k,
            trunc,
            out,
        } => {
            let text = file.as_ref().map(read).transpose()?;
            let req = ConductorRequest {
                document: text.as_deref(),
                singularity: &singularity,
                differential: differential.as_deref(),
                k,
                truncation: trunc,
            };
            (cli::cmd_conductor(&req)?, out.json)
        }
        Command::Selftest { out } => (cli::cmd_selftest(), out.json),
    })
}

fn main() -> ExitCode {
    let args = Cli::parse();
    match run(args.command) {
        Ok((report, json)) => {
            if json {
                print!("{}", report.to_json());
            } else {
                print!("{}", report.to_text());
            }
            ExitCode::from(cli::exit_code(&report) as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::TruncationTooSmall { .. }) {
                eprintln!("hint: raise --trunc");
            }
            ExitCode::from(cli::error_exit_code(&e) as u8)
        }
    }
}
