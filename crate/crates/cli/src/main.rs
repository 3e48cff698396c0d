//! `relgraph`: relational-graph measures of vision models from the command line.

mod commands;
mod error;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use relgraph::builders::{ClassTokenPolicy, HeadMode, PipelineOptions};
use relgraph::graph::Tau;

use error::CliError;
use output::{Format, Output};

#[derive(Parser)]
#[command(
    name = "relgraph",
    version,
    about = "Aggregation and affine graph measures of vision-model weights"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelMode {
    /// Measure the product of all layer graphs.
    Compose,
    /// Average the per-layer measures.
    LayerMean,
}

#[derive(Args, Debug, Clone)]
pub struct GraphArgs {
    /// Binarization threshold, or "auto" for 1/n.
    #[arg(long, default_value = "auto")]
    tau: Tau,
    /// keep, drop or pad.
    #[arg(long = "class-token", default_value = "keep")]
    class_token: ClassTokenPolicy,
    /// whole or per-head.
    #[arg(long = "head-mode", default_value = "whole")]
    head_mode: HeadMode,
    #[arg(long, value_enum, default_value = "compose")]
    mode: ModelMode,
}

impl GraphArgs {
    pub fn pipeline(&self) -> PipelineOptions {
        PipelineOptions {
            class_token: self.class_token,
            head_mode: self.head_mode,
            ..Default::default()
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct OutArgs {
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Comma-separated subset of csv, json, svg.
    #[arg(long, value_delimiter = ',', default_value = "csv")]
    format: Vec<Format>,
}

impl OutArgs {
    fn output(&self) -> Output {
        Output::new(self.out.clone(), &self.format)
    }
}

#[derive(Subcommand)]
enum Command {
    /// List the tensors and resolved layer layout of an archive.
    Extract {
        archive: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Per-layer and model-level (C, L) of aggregation and affine graphs.
    Measure {
        archive: PathBuf,
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Dump every canonical layer graph as a dense matrix.
    Layers {
        archive: PathBuf,
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Dump the composed aggregation graph and its measures.
    Compose {
        archive: PathBuf,
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Rank connectomes by (C, L) distance to a model or a given point.
    CompareBnn {
        archive: Option<PathBuf>,
        /// Query point "C,L" instead of an archive.
        #[arg(long, value_parser = commands::parse_point, conflicts_with = "archive")]
        query: Option<(f64, f64)>,
        /// Directory of edge-list files.
        #[arg(long)]
        connectomes: PathBuf,
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Quadratic fits of accuracy against C and L per dataset.
    Sweetspot {
        /// CSV with model_id, dataset, measure_c, measure_l, accuracy.
        points: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Measures across checkpoints named like `*_e<N>.rga`.
    Track {
        dir: PathBuf,
        #[arg(long = "class-token", default_value = "keep")]
        class_token: ClassTokenPolicy,
        #[arg(long = "head-mode", default_value = "whole")]
        head_mode: HeadMode,
        #[command(flatten)]
        out: OutArgs,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Extract { archive, out } => commands::extract(&archive, out.output()),
        Command::Measure {
            archive,
            graph,
            out,
        } => commands::measure(&archive, &graph, out.output()),
        Command::Layers {
            archive,
            graph,
            out,
        } => commands::layers(&archive, &graph, out.output()),
        Command::Compose {
            archive,
            graph,
            out,
        } => commands::compose(&archive, &graph, out.output()),
        Command::CompareBnn {
            archive,
            query,
            connectomes,
            graph,
            out,
        } => {
            let query = match (archive, query) {
                (Some(path), None) => commands::Query::Archive(path),
                (None, Some(p)) => commands::Query::Point(p),
                _ => return Err(CliError::input("give either an archive or --query C,L")),
            };
            commands::compare_bnn(query, &connectomes, &graph, out.output())
        }
        Command::Sweetspot { points, out } => commands::sweetspot(&points, out.output()),
        Command::Track {
            dir,
            class_token,
            head_mode,
            out,
        } => {
            let opts = PipelineOptions {
                class_token,
                head_mode,
                ..Default::default()
            };
            commands::track(&dir, &opts, out.output())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
