use std::path::PathBuf;

use chargebus::schedule::IdleCoupling;
use chargebus::Tier;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "chargebus", version, about = "Charge qubits coupled through a transmission-line bus")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Parameter file (JSON); the bundled dimensionless defaults when absent.
    #[arg(long, global = true, value_name = "FILE")]
    pub params: Option<PathBuf>,

    /// Simulation tier: analytic, rwa or lab.
    #[arg(long, global = true, default_value = "analytic", value_parser = parse_tier)]
    pub tier: Tier,

    /// How idle qubits couple during numeric tiers.
    #[arg(long, global = true, value_enum, default_value_t = IdleArg::Detuned)]
    pub idle_coupling: IdleArg,

    /// Replace the parameter file's Fock cutoff.
    #[arg(long, global = true, value_name = "N")]
    pub fock_cutoff: Option<usize>,

    /// Write the result here instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,

    /// Output format; the default is csv for `dispersive` and json otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Record the wall-clock time in the `meta` block.
    #[arg(long, global = true)]
    pub stamp: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IdleArg {
    Detuned,
    Off,
}

impl From<IdleArg> for IdleCoupling {
    fn from(a: IdleArg) -> Self {
        match a {
            IdleArg::Detuned => IdleCoupling::Detuned,
            IdleArg::Off => IdleCoupling::Off,
        }
    }
}

fn parse_tier(s: &str) -> Result<Tier, String> {
    s.parse::<Tier>().map_err(|e| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Execute a schedule file from a basis state.
    Run {
        #[arg(value_name = "SCHEDULE")]
        schedule: PathBuf,
        /// Initial ket, e.g. "e,g,g,0"; all qubits in |g> and no photons when absent.
        #[arg(long)]
        init: Option<String>,
    },
    /// Two-qubit phase gate: derived phases against the closed forms.
    PhaseGate {
        #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0, 1])]
        qubits: Vec<usize>,
    },
    /// Bell pair preparation.
    Bell {
        #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0, 1])]
        qubits: Vec<usize>,
    },
    /// W-state preparation on (i, j, k), starting from qubit k excited.
    Wstate {
        #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [0, 1, 2])]
        qubits: Vec<usize>,
    },
    /// Two resonant qubits: closed-form against numeric levels of manifold n.
    Spectrum {
        #[arg(long)]
        n: usize,
    },
    /// Detuned exchange: transfer bound against the numeric maximum.
    Dispersive {
        /// Detuning ratios Delta/lambda.
        #[arg(long, value_delimiter = ',', default_values_t = [3.0, 10.0, 100.0])]
        ratios: Vec<f64>,
    },
    /// Device quantities derived from an SI parameter file.
    Device,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Run { .. } => "run",
            Command::PhaseGate { .. } => "phase-gate",
            Command::Bell { .. } => "bell",
            Command::Wstate { .. } => "wstate",
            Command::Spectrum { .. } => "spectrum",
            Command::Dispersive { .. } => "dispersive",
            Command::Device => "device",
        }
    }
}
