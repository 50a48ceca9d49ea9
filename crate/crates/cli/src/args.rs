use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use quadalg::factorize::Side;
use quadalg::multiply::Algorithm;
use quadalg::{Error, MultiplyConfig, Result, SchedulerMode};

#[derive(Debug, Parser)]
#[command(name = "quadalg", version, about = "Exact block-recursive linear algebra on quadtree matrices")]
pub struct Cli {
    #[command(flatten)]
    pub run: RunArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DomainArg {
    Int,
    Poly,
    Rational,
    Float64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CrtMode {
    On,
    Off,
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Lower,
    Upper,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Lower => Side::Lower,
            SideArg::Upper => Side::Upper,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchOp {
    Adjoint,
    Det,
    Multiply,
    Inverse,
}

impl BenchOp {
    pub fn name(self) -> &'static str {
        match self {
            BenchOp::Adjoint => "adjoint",
            BenchOp::Det => "det",
            BenchOp::Multiply => "multiply",
            BenchOp::Inverse => "inverse",
        }
    }
}

/// Settings shared by every command.
#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Coefficient domain of the input.
    #[arg(long, value_enum, global = true, default_value = "int")]
    pub domain: DomainArg,
    /// Order of the dense quadtree leaves (power of two).
    #[arg(long, global = true, default_value_t = 32)]
    pub leaf_order: usize,
    /// Smallest order at which Strassen recursion continues.
    #[arg(long, global = true, default_value_t = 128)]
    pub strassen_min_order: usize,
    /// Density below which only standard multiplication is used.
    #[arg(long, global = true, default_value_t = 0.3)]
    pub density_boundary: f64,
    #[arg(long, value_enum, global = true, default_value = "auto")]
    pub algorithm: AlgorithmArg,
    /// Multi-modular adjoint for integer inputs.
    #[arg(long, value_enum, global = true, default_value = "auto")]
    pub crt: CrtMode,
    /// Worker counts, comma separated; commands other than `bench` use the largest.
    #[arg(long, global = true, env = "QUADALG_WORKERS", value_delimiter = ',')]
    pub workers: Option<Vec<usize>>,
    #[arg(long, global = true)]
    pub mode: Option<String>,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub repetitions: Option<usize>,
    /// JSON file with `workers`, `mode`, `repetitions` and `inline_below`.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    Auto,
    Standard,
    Strassen,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Random integer matrix.
    Gen {
        #[arg(long)]
        order: usize,
        #[arg(long, default_value_t = 1.0)]
        density: f64,
        #[arg(long, default_value_t = 15)]
        bits: u32,
        #[arg(long)]
        symmetric: bool,
        #[arg(long)]
        spd: bool,
    },
    Multiply {
        a: PathBuf,
        b: PathBuf,
    },
    Inverse {
        input: PathBuf,
    },
    TriInverse {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "lower")]
        side: SideArg,
    },
    /// Writes the factor H; `--inverse-output` also writes H^-1.
    Cholesky {
        input: PathBuf,
        #[arg(long)]
        inverse_output: Option<PathBuf>,
    },
    /// Writes the adjoint factor A of the extended adjoint mapping.
    Adjoint {
        input: PathBuf,
    },
    /// Writes a matrix whose columns span the kernel.
    Kernel {
        input: PathBuf,
    },
    Det {
        input: PathBuf,
    },
    Rank {
        input: PathBuf,
    },
    /// Writes the echelon form S; `--pivots` also writes the pivot matrix E.
    Echelon {
        input: PathBuf,
        #[arg(long)]
        pivots: Option<PathBuf>,
    },
    /// Scaling series over worker counts as CSV.
    Bench {
        #[arg(long, value_enum, default_value = "adjoint")]
        op: BenchOp,
        #[arg(long)]
        order: usize,
        #[arg(long, default_value_t = 1.0)]
        density: f64,
        #[arg(long, default_value_t = 15)]
        bits: u32,
    },
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub workers: Option<Vec<usize>>,
    pub mode: Option<SchedulerMode>,
    pub repetitions: Option<usize>,
    pub inline_below: Option<usize>,
}

/// Resolved run settings.
#[derive(Debug, Clone)]
pub struct Settings {
    pub domain: DomainArg,
    pub leaf: usize,
    pub multiply: MultiplyConfig,
    pub crt: CrtMode,
    pub workers: Vec<usize>,
    pub mode: SchedulerMode,
    pub repetitions: usize,
    pub inline_below: usize,
    pub seed: u64,
}

impl RunArgs {
    pub fn resolve(&self, command: &Command) -> Result<Settings> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                serde_json::from_str::<FileConfig>(&text)
                    .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };
        if !self.leaf_order.is_power_of_two() {
            return Err(Error::InvalidConfig(format!("leaf order {} is not a power of two", self.leaf_order)));
        }
        let multiply = MultiplyConfig {
            strassen_min_order: self.strassen_min_order,
            density_boundary: self.density_boundary,
            algorithm: match self.algorithm {
                AlgorithmArg::Auto => Algorithm::Auto,
                AlgorithmArg::Standard => Algorithm::Standard,
                AlgorithmArg::Strassen => Algorithm::Strassen,
            },
        };
        multiply.validate(self.leaf_order)?;
        if self.crt == CrtMode::On && self.domain != DomainArg::Int {
            return Err(Error::InvalidConfig("--crt on needs --domain int".into()));
        }
        let mode = match &self.mode {
            Some(m) => m.parse().map_err(Error::InvalidConfig)?,
            None => file.mode.unwrap_or(SchedulerMode::Multidispatch),
        };
        let default_workers = if matches!(command, Command::Bench { .. }) { vec![1, 2, 4, 8] } else { vec![1] };
        let workers = self.workers.clone().or(file.workers).unwrap_or(default_workers);
        if workers.is_empty() || workers.contains(&0) {
            return Err(Error::InvalidConfig("worker counts must be positive".into()));
        }
        let repetitions = self.repetitions.or(file.repetitions).unwrap_or(3);
        if repetitions == 0 {
            return Err(Error::InvalidConfig("repetitions must be positive".into()));
        }
        Ok(Settings {
            domain: self.domain,
            leaf: self.leaf_order,
            multiply,
            crt: self.crt,
            workers,
            mode,
            repetitions,
            inline_below: file.inline_below.unwrap_or(quadalg::engine::DEFAULT_INLINE_BELOW),
            seed: self.seed,
        })
    }
}
