use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

/// Subsystem codes from classical codes: construction, gauge-fixing
/// verification, expander certificates and induced-decoder simulation.
#[derive(Debug, Parser, Serialize)]
#[command(name = "bbs-codes", version)]
pub struct Cli {
    /// Seed for every random choice in the run.
    #[arg(long, global = true, env = "BBS_CODES_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Report format. `csv` is only available for `simulate`.
    #[arg(long, visible_alias = "out", global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Parameters of a classical linear code and its transpose code.
    Code(CodeArgs),
    /// Build BBS(A) (and optionally aBBS(A)) and report ⟦N,K,D⟧.
    Bbs(BbsArgs),
    /// Hypergraph product of two classical codes.
    Hgp(HgpArgs),
    /// Verify the BBS and hypergraph-product gauge fixings of aBBS(A).
    Gaugefix(GaugefixArgs),
    /// Exhaustive expansion certificate and flip-decoder budgets.
    Expander(ExpanderArgs),
    /// Monte Carlo logical error rate of the induced flip decoder.
    Simulate(SimulateArgs),
}

/// A classical code given by one of several sources.
#[derive(Debug, Args, Serialize, Default)]
#[group(multiple = false)]
pub struct ClassicalSource {
    /// Dense parity-check matrix file.
    #[arg(long)]
    pub checks: Option<PathBuf>,
    /// Parity-check matrix in alist format.
    #[arg(long)]
    pub alist: Option<PathBuf>,
    /// Dense generator matrix file; the code is its row space.
    #[arg(long)]
    pub generator: Option<PathBuf>,
    /// The [7,4,3] Hamming code.
    #[arg(long)]
    pub hamming: bool,
    /// The [n,1,n] repetition code.
    #[arg(long)]
    pub rep: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct CodeArgs {
    #[command(flatten)]
    pub source: ClassicalSource,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QSearchMode {
    /// Use `--q` or the identity.
    None,
    /// Every invertible Q (k ≤ 4).
    Exhaustive,
    /// Seeded random restarts with hill climbing.
    Heuristic,
    /// Exhaustive when k ≤ 4, heuristic otherwise.
    Auto,
}

#[derive(Debug, Args, Serialize)]
pub struct BbsArgs {
    /// Dense matrix file for A.
    #[arg(long, conflicts_with_all = ["hamming", "rep", "code1"])]
    pub matrix: Option<PathBuf>,
    /// A = GᵀQG for the [7,4,3] Hamming code.
    #[arg(long, conflicts_with_all = ["rep", "code1"])]
    pub hamming: bool,
    /// A = GᵀQG for the [n,1,n] repetition code (Bacon-Shor).
    #[arg(long, conflicts_with = "code1")]
    pub rep: Option<usize>,
    /// Dense check matrix of C₁; use with `--code2`.
    #[arg(long, requires = "code2")]
    pub code1: Option<PathBuf>,
    /// Dense check matrix of C₂.
    #[arg(long, requires = "code1")]
    pub code2: Option<PathBuf>,
    /// Dense k×k matrix Q for A = G₁ᵀQG₂.
    #[arg(long = "q")]
    pub q_matrix: Option<PathBuf>,
    /// How to choose Q when building from codes.
    #[arg(long, value_enum, default_value_t = QSearchMode::None)]
    pub q_search: QSearchMode,
    /// Restarts for the heuristic Q search.
    #[arg(long, default_value_t = 64)]
    pub restarts: usize,
    /// Total evaluations for the heuristic Q search.
    #[arg(long, default_value_t = 100_000)]
    pub budget: usize,
    /// Also build aBBS(A).
    #[arg(long)]
    pub abbs: bool,
    /// Cross-check D by enumerating dressed logicals (N ≤ 14).
    #[arg(long)]
    pub bruteforce: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct HgpArgs {
    /// Repetition code checks H_R(n); repeatable.
    #[arg(long, action = clap::ArgAction::Append)]
    pub rep: Vec<usize>,
    /// Cyclic repetition checks H_R'(n); repeatable.
    #[arg(long, action = clap::ArgAction::Append)]
    pub cyclic: Vec<usize>,
    /// Dense check matrix file; repeatable.
    #[arg(long, action = clap::ArgAction::Append)]
    pub checks: Vec<PathBuf>,
    /// Alist check matrix file; repeatable.
    #[arg(long, action = clap::ArgAction::Append)]
    pub alist: Vec<PathBuf>,
    /// Cross-check D by enumerating logicals (N ≤ 14).
    #[arg(long)]
    pub bruteforce: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct GaugefixArgs {
    /// Dense matrix file for A (no zero rows or columns for the HGP fixing).
    #[arg(long, required_unless_present = "fixed", conflicts_with = "fixed")]
    pub matrix: Option<PathBuf>,
    /// Dense H₁ whose rows span ker(Aᵀ); defaults to a kernel basis.
    #[arg(long, requires = "h2")]
    pub h1: Option<PathBuf>,
    /// Dense H₂ whose rows span ker(A).
    #[arg(long, requires = "h1")]
    pub h2: Option<PathBuf>,
    /// Write the gauge groups of every constructed code into this directory.
    #[arg(long)]
    pub emit: Option<PathBuf>,
    /// Gauge group file of a candidate fixing (as written by `--emit`).
    #[arg(long, requires = "original")]
    pub fixed: Option<PathBuf>,
    /// Gauge group file of the code being fixed.
    #[arg(long, requires = "fixed")]
    pub original: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ExpanderArgs {
    /// Dense check matrix; left nodes are its columns.
    #[arg(long)]
    pub checks: Option<PathBuf>,
    /// Alist check matrix.
    #[arg(long)]
    pub alist: Option<PathBuf>,
    /// Vertex-edge incidence graph of the complete graph on this many vertices.
    #[arg(long)]
    pub complete: Option<usize>,
    /// Random left-regular graph: left nodes.
    #[arg(long, requires_all = ["right", "degree"])]
    pub left: Option<usize>,
    /// Random left-regular graph: right nodes.
    #[arg(long)]
    pub right: Option<usize>,
    /// Random left-regular graph: left degree.
    #[arg(long)]
    pub degree: Option<usize>,
    /// Largest subset size to certify.
    #[arg(long, default_value_t = 2)]
    pub max_subset: usize,
    /// Decoder parameter r for the flip-decoder budgets.
    #[arg(long, default_value_t = 1)]
    pub r: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstructionArg {
    Bbs,
    Abbs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderArg {
    Flip,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseArg {
    Independent,
    Depolarizing,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    /// Dense matrix file for A.
    #[arg(long, visible_alias = "matrix", conflicts_with_all = ["hamming", "rep"])]
    pub code_file: Option<PathBuf>,
    /// A = GᵀG for the [7,4,3] Hamming code.
    #[arg(long, conflicts_with = "rep")]
    pub hamming: bool,
    /// All-ones n×n A (Bacon-Shor).
    #[arg(long)]
    pub rep: Option<usize>,
    #[arg(long, value_enum, default_value_t = ConstructionArg::Bbs)]
    pub construction: ConstructionArg,
    /// Data error probabilities; a list sweeps a grid.
    #[arg(long, value_delimiter = ',', required = true)]
    pub q: Vec<f64>,
    /// Measurement error probabilities; a list sweeps a grid.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub qprime: Vec<f64>,
    #[arg(long, value_enum, default_value_t = NoiseArg::Independent)]
    pub noise: NoiseArg,
    #[arg(long, default_value_t = 1)]
    pub rounds: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, value_enum, default_value_t = DecoderArg::Flip)]
    pub decoder: DecoderArg,
    /// Also estimate the classical rates p̄ with the effective noise.
    #[arg(long)]
    pub classical: bool,
}
