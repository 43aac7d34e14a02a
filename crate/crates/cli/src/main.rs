//! `edgelim`: runs decompositions, partition functions, graphon densities,
//! cut and orbit distances, and convergence experiments from JSON inputs.
//!
//! Exit statuses: 0 ok, 2 parse error, 3 budget exceeded, 4 precondition violation.

mod options;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use edgelim::vertex_model::Engine;

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Core(edgelim::Error),
    Io(String),
}

impl From<edgelim::Error> for CliError {
    fn from(e: edgelim::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn status(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Core(edgelim::Error::BudgetExceeded(_) | edgelim::Error::TooLarge { .. }) => 3,
            CliError::Core(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(msg) => write!(f, "parse error: {msg}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "edgelim", version, about = "Edge-colouring models, graphons and their seminorms")]
struct Cli {
    /// JSON file with defaults for the global options.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Partition function engine: brute or contract.
    #[arg(long, global = true)]
    engine: Option<Engine>,
    /// permutations, signed_permutations or sampled_orthogonal.
    #[arg(long, global = true)]
    group: Option<String>,
    /// basis, signed_basis, rank_one, cut, or a dictionary JSON file.
    #[arg(long, global = true)]
    dict: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write row data as CSV.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Tolerance override, e.g. `--tol eq=1e-8`; repeatable.
    #[arg(long = "tol", global = true, value_name = "KEY=VALUE")]
    tol: Vec<String>,
    /// Print contraction orders and progress to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Greedy weak-regularity decomposition of a tensor.
    Decompose {
        /// Tensor JSON: {order, dim, values}.
        input: PathBuf,
        #[arg(short, long)]
        k: usize,
    },
    /// Partition function of an edge-colouring model.
    Pf {
        /// Model JSON: {dim, tensors}.
        model: PathBuf,
        /// Graph name (K3, C5, P4, S3, E2, triangle, path3) or graph JSON file.
        #[arg(long = "graph", required = true)]
        graphs: Vec<String>,
    },
    /// Homomorphism densities of a step graphon.
    Tau {
        /// Graphon JSON: {q, mu, vals}.
        graphon: PathBuf,
        #[arg(long = "graph", required = true)]
        graphs: Vec<String>,
    },
    /// Cut seminorm of a step graphon.
    Cutnorm { graphon: PathBuf },
    /// Cut distance minimized over block permutations.
    Cutdist { left: PathBuf, right: PathBuf },
    /// Distance between orbits of two tensors or two models.
    Orbitdist {
        left: PathBuf,
        right: PathBuf,
        /// hilbert, seminorm (tensors, uses --dict) or rank_one (models).
        #[arg(long, default_value = "hilbert")]
        metric: String,
        /// Random starts for the sampled orthogonal group.
        #[arg(long, default_value_t = 256)]
        samples: usize,
        /// Rotation steps per start for the sampled orthogonal group.
        #[arg(long, default_value_t = 100)]
        refine: usize,
    },
    /// Partition functions along a convergent sequence.
    Converge {
        /// perturbed, padded or sampled.
        #[arg(long)]
        family: String,
        #[arg(long = "graph", required = true)]
        graphs: Vec<String>,
        #[arg(long, default_value_t = 8)]
        i_max: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 2)]
        max_order: usize,
        /// Noise scale for the perturbed family.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Edge probability for the sampled family.
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        /// Vertex-count step for the sampled family.
        #[arg(long, default_value_t = 10)]
        step: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let flags = options::Flags {
        config: cli.config.as_deref(),
        engine: cli.engine,
        group: cli.group,
        dict: cli.dict,
        seed: cli.seed,
        out: cli.out,
        csv: cli.csv,
        tol: &cli.tol,
        verbose: cli.verbose,
    };
    let result = options::resolve(flags).and_then(|opts| run::run(&cli.command, &opts));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("edgelim: {e}");
            ExitCode::from(e.status())
        }
    }
}
