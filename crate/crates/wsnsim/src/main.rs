use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wsnsim::config::{load_config, SimConfig};
use wsnsim::election::Protocol;
use wsnsim::harness;

#[derive(Parser)]
#[command(
    name = "wsnsim",
    about = "Round-based simulator for LEACH-family cluster-head election protocols",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write its per-round metrics CSV.
    Run(CommonArgs),
    /// Compare protocols over shared per-seed topologies.
    Compare(CompareArgs),
    /// Sweep the near-region election constant c under DE-LEACH.
    #[command(name = "sweep-c")]
    SweepC(SweepArgs),
}

/// Config file, output directory and per-key overrides shared by every
/// subcommand. Flags mirror the config-file keys and take precedence.
#[derive(Args)]
struct CommonArgs {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for CSV files.
    #[arg(long, default_value = "./out")]
    out: PathBuf,

    #[arg(long)]
    num_nodes: Option<usize>,
    #[arg(long)]
    region_side: Option<f64>,
    #[arg(long)]
    bs_offset: Option<f64>,
    /// leach, eleach or deleach.
    #[arg(long)]
    protocol: Option<String>,
    #[arg(long)]
    max_rounds: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    e_elec: Option<f64>,
    #[arg(long)]
    eps_fs: Option<f64>,
    #[arg(long)]
    eps_mp: Option<f64>,
    #[arg(long)]
    e_da: Option<f64>,
    #[arg(long)]
    d0: Option<f64>,
    #[arg(long)]
    message_bits: Option<u32>,
    #[arg(long)]
    initial_energy: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    p_opt1: Option<f64>,
    #[arg(long)]
    p_opt2: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Consecutive seeds starting at the configured seed.
    #[arg(long, default_value_t = 20)]
    seeds: u32,
    /// Comma-separated protocol list.
    #[arg(long, value_delimiter = ',', default_value = "leach,deleach")]
    protocols: Vec<String>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, default_value_t = 10)]
    seeds: u32,
    /// Comma-separated c values.
    #[arg(long = "c-values", value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8,9,10")]
    c_values: Vec<f64>,
}

impl CommonArgs {
    fn effective_config(&self) -> Result<SimConfig, String> {
        let mut overrides: Vec<(String, String)> = Vec::new();
        let mut push = |key: &str, value: Option<String>| {
            if let Some(v) = value {
                overrides.push((key.to_string(), v));
            }
        };
        push("num_nodes", self.num_nodes.map(|v| v.to_string()));
        push("region_side", self.region_side.map(|v| v.to_string()));
        push("bs_offset", self.bs_offset.map(|v| v.to_string()));
        push("protocol", self.protocol.clone());
        push("max_rounds", self.max_rounds.map(|v| v.to_string()));
        push("seed", self.seed.map(|v| v.to_string()));
        push("e_elec", self.e_elec.map(|v| v.to_string()));
        push("eps_fs", self.eps_fs.map(|v| v.to_string()));
        push("eps_mp", self.eps_mp.map(|v| v.to_string()));
        push("e_da", self.e_da.map(|v| v.to_string()));
        push("d0", self.d0.map(|v| v.to_string()));
        push("message_bits", self.message_bits.map(|v| v.to_string()));
        push("initial_energy", self.initial_energy.map(|v| v.to_string()));
        push("p", self.p.map(|v| v.to_string()));
        push("p_opt1", self.p_opt1.map(|v| v.to_string()));
        push("p_opt2", self.p_opt2.map(|v| v.to_string()));
        push("c", self.c.map(|v| v.to_string()));

        load_config(self.config.as_deref(), &overrides).map_err(|e| e.to_string())
    }
}

fn parse_protocols(names: &[String]) -> Result<Vec<Protocol>, String> {
    names.iter().map(|name| name.parse()).collect()
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Run(common) => {
            let config = common.effective_config()?;
            harness::cmd_run(&config, &common.out).map_err(|e| e.to_string())?;
        }
        Command::Compare(args) => {
            let config = args.common.effective_config()?;
            let protocols = parse_protocols(&args.protocols)?;
            harness::cmd_compare(&config, &protocols, args.seeds, &args.common.out)
                .map_err(|e| e.to_string())?;
        }
        Command::SweepC(args) => {
            let config = args.common.effective_config()?;
            if args.c_values.is_empty() {
                return Err("sweep-c needs at least one c value".to_string());
            }
            harness::cmd_sweep_c(&config, &args.c_values, args.seeds, &args.common.out)
                .map_err(|e| e.to_string())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
