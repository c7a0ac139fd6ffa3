use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use triplepass_core::actions::DEFAULT_WORK_CAP;

#[derive(Debug, Parser)]
#[command(name = "triplepass", version, about = "Three-pass group-action protocol laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads for exhaustive analyses; results do not depend on it.
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Step through scripted sessions pass by pass.
    Demo(DemoArgs),
    /// Run seeded sessions and write their transcripts.
    Run(RunArgs),
    /// Posterior for recorded transcripts, or exact leakage of an instance.
    Analyze(AnalyzeArgs),
    /// Exhaustive condition checks on an instance.
    Check(CheckArgs),
    /// Bounded search over subgroups of GL2(F_p).
    Search(SearchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Debug, Clone, Args)]
pub struct InstanceArgs {
    /// Instance kind (diagonal, rotation, scalar, general-linear, borel,
    /// borel-embedded, trivial, custom, rational-gl2) or a descriptor JSON file.
    #[arg(long)]
    pub instance: Option<String>,

    /// Field size for named kinds.
    #[arg(long, default_value_t = 5)]
    pub p: u32,

    /// Generator for `custom` instances, e.g. `[[1,1],[0,1]]`; repeatable.
    #[arg(long = "generator", value_name = "MATRIX")]
    pub generators: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Work cap for exhaustive enumerations.
    #[arg(long, env = "TRIPLEPASS_CAP", default_value_t = DEFAULT_WORK_CAP)]
    pub cap: u64,

    /// Write the artifact here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct DemoArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Bounded-rational GL2(Q) session instead of the scripted pair.
    #[arg(long, conflicts_with = "instance")]
    pub rational: bool,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, default_value_t = 10)]
    pub sessions: u64,
    /// Include ground truth (s, t, A, B) with each transcript.
    #[arg(long)]
    pub lab_view: bool,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Transcript file: one transcript object or a `run` artifact.
    #[arg(long)]
    pub transcript: Option<PathBuf>,
    /// `uniform` or a list such as `1:1/2,2:1/4,3:1/4`.
    #[arg(long, default_value = "uniform")]
    pub prior: String,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 2)]
    pub p: u32,
    /// Largest generator set to close.
    #[arg(long, default_value_t = 2)]
    pub generators: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}
