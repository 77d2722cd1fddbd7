use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "bpl", version, about = "Numerical checks for the inhomogeneous six-vertex model")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// JSON instance file (keys: L, n, gamma, mu, tol, seed).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Lattice length.
    #[arg(long = "L", global = true)]
    pub l: Option<usize>,

    /// Number of excitations (B-operators).
    #[arg(long, global = true)]
    pub n: Option<usize>,

    #[arg(long, global = true, allow_hyphen_values = true)]
    pub gamma_re: Option<f64>,

    #[arg(long, global = true, allow_hyphen_values = true)]
    pub gamma_im: Option<f64>,

    /// Seed for random parameters and sample points.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Pass/fail tolerance for every residual.
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Also write the JSON report here.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Print the JSON report instead of the table.
    #[arg(long, global = true)]
    pub json: bool,

    /// Raise the dense-storage cap on L.
    #[arg(long, global = true, env = "BPL_MAX_L", hide_env_values = true)]
    pub max_l: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Algebraic identities of the R-matrix and monodromy.
    Verify {
        #[arg(value_enum)]
        what: Verify,
    },
    /// Transfer-matrix eigenpairs in one sector.
    Spectrum {
        /// Number of down spins (defaults to n).
        #[arg(long)]
        sector: Option<usize>,
    },
    /// Functional relation for every sector-n eigenvector.
    Fz,
    /// The commuting family Ω_k on symmetric polynomials.
    Omega {
        #[arg(value_enum)]
        what: Omega,
    },
    /// The closed-form order-(L−1) equation.
    Pde {
        #[arg(value_enum)]
        what: Pde,
    },
    /// First-order reduction on eigenfunctions of the family.
    Reduce,
    /// Domain-wall partition function.
    Dwbc {
        #[arg(value_enum)]
        what: Dwbc,
    },
    /// Every check that applies to the instance.
    All,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Verify {
    Ybe,
    Rtt,
    Off,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Omega {
    Extract,
    Eigk,
    Compare,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Pde {
    Residual,
    Special,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Dwbc {
    Partition,
    Pde,
    Upsilon,
}
