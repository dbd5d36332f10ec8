use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Environment variable that supplies the default validation tolerance.
pub const TOL_ENV: &str = "QCORR_TOL";

#[derive(Debug, Parser)]
#[command(name = "qcorr", version, about = "Analyze and disentangle bipartite quantum states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that a state file holds a valid density matrix.
    Validate(ValidateArgs),
    /// PPT, reduction and entropy criteria plus both reduced states.
    Analyze(AnalyzeArgs),
    /// Run one or more disentanglement methods on a bipartite state.
    Disentangle(DisentangleArgs),
    /// Write a seeded state file.
    Generate(GenerateArgs),
    /// Compare the two-qubit closed forms with the generic operations.
    BenchTwoQubit(BenchArgs),
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// State file, or a directory of `*.json` state files.
    pub path: PathBuf,
    #[arg(long, env = TOL_ENV, default_value_t = qcorr::DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RedModeArg {
    Literal,
    Standard,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub path: PathBuf,
    #[arg(long, env = TOL_ENV, default_value_t = qcorr::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = RedModeArg::Standard)]
    pub red_mode: RedModeArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Neumann,
    Pointer,
    Correlated,
}

#[derive(Debug, Args)]
pub struct DisentangleArgs {
    pub path: PathBuf,
    /// Comma-separated list; methods run in the order given.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "correlated")]
    pub method: Vec<MethodArg>,
    /// Pointer population of the first basis state of B.
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub b_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub b_im: f64,
    /// Power applied to the pointer in each correlated update.
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    /// Solver convergence tolerance on successive iterates.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    /// Weight of the previous iterate in each update, in [0, 1).
    #[arg(long, default_value_t = 0.0)]
    pub damping: f64,
    /// Tolerance used to validate the input state.
    #[arg(long, env = TOL_ENV, default_value_t = qcorr::DEFAULT_TOL)]
    pub input_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Bell,
    PureProduct,
    Separable,
    MaximallyMixed,
    Random,
    NearPure,
    ThermalPointer,
    CoherentPointer,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    pub kind: KindArg,
    #[arg(long, default_value_t = 2)]
    pub n_a: usize,
    #[arg(long, default_value_t = 2)]
    pub n_b: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of product terms for `separable`.
    #[arg(long, default_value_t = qcorr::gen::DEFAULT_K_TERMS)]
    pub k_terms: usize,
    /// Upper bound on the mixing weight for `near-pure`.
    #[arg(long, default_value_t = 0.05)]
    pub max_mix: f64,
    /// Population for the pointer kinds.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub b_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub b_im: f64,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub cases: usize,
}
