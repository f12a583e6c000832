//! The experiment harness behind the CLI subcommands: single runs,
//! multi-seed protocol comparisons on shared topologies, and the sweep over
//! the near-region election constant.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::config::SimConfig;
use crate::election::{ElectionParams, Protocol};
use crate::engine::run_simulation;
use crate::metrics::{aggregate_runs, export_csv, AggregateStats, RunSummary};
use crate::topology::{generate_topology, Topology, TopologyError};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error("cannot write `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Write a file atomically: temp file in the target directory, then rename.
fn write_atomic(path: &Path, contents: &str) -> Result<(), HarnessError> {
    let io_err = |source: std::io::Error| HarnessError::Io {
        path: path.display().to_string(),
        source,
    };
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir).map_err(io_err)?;
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name().map(|n| n.to_string_lossy()).unwrap_or_default()
    ));
    {
        let mut file = fs::File::create(&tmp).map_err(io_err)?;
        file.write_all(contents.as_bytes()).map_err(io_err)?;
        file.sync_all().map_err(io_err)?;
    }
    fs::rename(&tmp, path).map_err(io_err)
}

fn run_csv_path(out_dir: &Path, protocol: Protocol, seed: u64) -> PathBuf {
    out_dir.join(format!("{}_{}.csv", protocol.tag(), seed))
}

fn milestone_line(name: &str, milestone: Option<u64>) -> String {
    match milestone {
        Some(round) => format!("{name}={round}"),
        None => format!("{name}=none"),
    }
}

fn topology_for(config: &SimConfig, seed: u64) -> Result<Topology, HarnessError> {
    Ok(generate_topology(config.num_nodes, config.region_side, config.bs_offset, seed)?)
}

fn run_one(
    config: &SimConfig,
    topology: &Topology,
    protocol: Protocol,
    seed: u64,
    out_dir: &Path,
) -> Result<RunSummary, HarnessError> {
    let election = ElectionParams { variant: protocol, ..config.election };
    let summary = run_simulation(topology, &election, &config.radio, seed, config.max_rounds);
    write_atomic(&run_csv_path(out_dir, protocol, seed), &export_csv(&summary))?;
    Ok(summary)
}

/// One simulation with the configured protocol and seed. Writes
/// `<out>/<protocol>_<seed>.csv` and prints the lifetime milestones and total
/// packet count as `key=value` lines.
pub fn cmd_run(config: &SimConfig, out_dir: &Path) -> Result<RunSummary, HarnessError> {
    let topology = topology_for(config, config.seed)?;
    let summary = run_one(config, &topology, config.protocol(), config.seed, out_dir)?;
    println!("{}", milestone_line("fnd", summary.fnd));
    println!("{}", milestone_line("hnd", summary.hnd));
    println!("{}", milestone_line("lnd", summary.lnd));
    println!("packets={}", summary.total_packets());
    Ok(summary)
}

/// Result of [`cmd_compare`]: per-protocol aggregates plus every underlying
/// run, in protocol order.
pub struct Comparison {
    pub aggregates: Vec<AggregateStats>,
    pub runs: Vec<Vec<RunSummary>>,
}

/// Run every protocol × seed pair on a shared per-seed topology. Seeds are
/// `config.seed, config.seed + 1, …`; each protocol consumes its own
/// election-draw stream, so the deployment is the only thing runs share.
/// Writes one CSV per run plus `aggregate.csv`.
pub fn cmd_compare(
    config: &SimConfig,
    protocols: &[Protocol],
    seeds: u32,
    out_dir: &Path,
) -> Result<Comparison, HarnessError> {
    assert!(seeds >= 1, "need at least one seed");
    assert!(!protocols.is_empty(), "need at least one protocol");

    let seed_values: Vec<u64> =
        (0..seeds as u64).map(|i| config.seed.wrapping_add(i)).collect();
    let topologies = seed_values
        .iter()
        .map(|&seed| topology_for(config, seed))
        .collect::<Result<Vec<_>, _>>()?;

    let mut jobs: Vec<(Protocol, usize)> = Vec::new();
    for &protocol in protocols {
        for i in 0..seed_values.len() {
            jobs.push((protocol, i));
        }
    }
    let results: Vec<(Protocol, usize, Result<RunSummary, HarnessError>)> = jobs
        .into_par_iter()
        .map(|(protocol, i)| {
            let run = run_one(config, &topologies[i], protocol, seed_values[i], out_dir);
            (protocol, i, run)
        })
        .collect();

    let mut runs: Vec<Vec<Option<RunSummary>>> =
        vec![vec![None; seed_values.len()]; protocols.len()];
    for (protocol, i, run) in results {
        let p_idx = protocols.iter().position(|&p| p == protocol).expect("known protocol");
        runs[p_idx][i] = Some(run?);
    }
    let runs: Vec<Vec<RunSummary>> = runs
        .into_iter()
        .map(|per_seed| per_seed.into_iter().map(|r| r.expect("all jobs ran")).collect())
        .collect();

    let aggregates: Vec<AggregateStats> = runs.iter().map(|r| aggregate_runs(r)).collect();

    let mut csv = String::from(AggregateStats::CSV_HEADER);
    csv.push('\n');
    for agg in &aggregates {
        csv.push_str(&agg.csv_row());
        csv.push('\n');
    }
    write_atomic(&out_dir.join("aggregate.csv"), &csv)?;
    println!("{}", csv.trim_end());

    Ok(Comparison { aggregates, runs })
}

/// One row of the c-sweep table.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub c: f64,
    pub fnd_mean: f64,
    pub lnd_mean: f64,
    pub packets_mean: f64,
}

/// Result of [`cmd_sweep_c`].
pub struct Sweep {
    pub rows: Vec<SweepRow>,
    /// The c value with the highest mean last-node-death round; ties go to
    /// the lower c.
    pub best_c: f64,
}

/// Sweep the near-region constant c over multi-seed DE-LEACH runs. Writes
/// per-run CSVs into `<out>/c_<value>/` plus `sweep_c.csv`, and prints the
/// best c by mean network lifetime.
pub fn cmd_sweep_c(
    config: &SimConfig,
    c_values: &[f64],
    seeds: u32,
    out_dir: &Path,
) -> Result<Sweep, HarnessError> {
    assert!(!c_values.is_empty(), "need at least one c value");
    assert!(seeds >= 1, "need at least one seed");

    let seed_values: Vec<u64> =
        (0..seeds as u64).map(|i| config.seed.wrapping_add(i)).collect();
    let topologies = seed_values
        .iter()
        .map(|&seed| topology_for(config, seed))
        .collect::<Result<Vec<_>, _>>()?;

    let rows: Vec<SweepRow> = c_values
        .par_iter()
        .map(|&c| -> Result<SweepRow, HarnessError> {
            let sub_dir = out_dir.join(format!("c_{c}"));
            let summaries = seed_values
                .iter()
                .zip(&topologies)
                .map(|(&seed, topology)| {
                    let mut sweep_config = config.clone();
                    sweep_config.election.variant = Protocol::DeLeach;
                    sweep_config.election.c = c;
                    run_one(&sweep_config, topology, Protocol::DeLeach, seed, &sub_dir)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let agg = aggregate_runs(&summaries);
            Ok(SweepRow {
                c,
                fnd_mean: agg.fnd.mean,
                lnd_mean: agg.lnd.mean,
                packets_mean: agg.packets_mean,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut csv = String::from("c,fnd_mean,lnd_mean,packets_mean\n");
    for row in &rows {
        csv.push_str(&format!("{},{},{},{}\n", row.c, row.fnd_mean, row.lnd_mean, row.packets_mean));
    }
    write_atomic(&out_dir.join("sweep_c.csv"), &csv)?;

    let best_c = rows
        .iter()
        .reduce(|best, row| if row.lnd_mean > best.lnd_mean { row } else { best })
        .expect("at least one row")
        .c;
    println!("{}", csv.trim_end());
    println!("best_c={best_c}");

    Ok(Sweep { rows, best_c })
}
