//! Per-round metric capture, lifetime milestones and CSV export.
//!
//! Milestones are in rounds: `fnd` is the first round a node dies, `hnd` the
//! first round the alive count falls to half the deployment (floored), `lnd`
//! the round the last node dies.

use thiserror::Error;

use crate::election::Protocol;
use crate::engine::{RoundOutcome, SimState};

/// One row of the per-round metrics series.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub round: u64,
    pub alive: usize,
    pub cluster_heads: usize,
    pub packets_to_bs_cumulative: u64,
    pub total_residual_energy: f64,
}

/// Full metrics of one simulation run.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub protocol: Protocol,
    pub seed: u64,
    pub num_nodes: usize,
    pub fnd: Option<u64>,
    pub hnd: Option<u64>,
    pub lnd: Option<u64>,
    pub records: Vec<RoundRecord>,
}

impl RunSummary {
    pub fn new(protocol: Protocol, seed: u64, num_nodes: usize) -> Self {
        Self { protocol, seed, num_nodes, fnd: None, hnd: None, lnd: None, records: Vec::new() }
    }

    /// Append the record for one engine round and update the milestones.
    pub fn record_round(&mut self, outcome: &RoundOutcome, state: &SimState) {
        let alive = state.alive_count();
        let prev_packets = self.records.last().map_or(0, |r| r.packets_to_bs_cumulative);
        self.records.push(RoundRecord {
            round: outcome.round,
            alive,
            cluster_heads: outcome.cluster_heads.len(),
            packets_to_bs_cumulative: prev_packets + outcome.packets_to_bs,
            total_residual_energy: state.total_residual_energy(),
        });
        if self.fnd.is_none() && alive < self.num_nodes {
            self.fnd = Some(outcome.round);
        }
        if self.hnd.is_none() && alive <= self.num_nodes / 2 {
            self.hnd = Some(outcome.round);
        }
        if self.lnd.is_none() && alive == 0 {
            self.lnd = Some(outcome.round);
        }
    }

    /// Total packets delivered to the BS over the whole run.
    pub fn total_packets(&self) -> u64 {
        self.records.last().map_or(0, |r| r.packets_to_bs_cumulative)
    }

    /// Cumulative packets at a given round; runs that ended earlier report
    /// their final count (nothing is delivered after the last death).
    pub fn packets_at_round(&self, round: u64) -> u64 {
        if self.records.is_empty() {
            return 0;
        }
        let idx = (round as usize).min(self.records.len() - 1);
        self.records[idx].packets_to_bs_cumulative
    }
}

/// Serialize the per-round series. Energies carry 18 significant digits so
/// that parsing reproduces the exact f64 values.
pub fn export_csv(summary: &RunSummary) -> String {
    let mut out = String::from("round,alive,cluster_heads,packets_to_bs_cum,total_residual_energy_j\n");
    for rec in &summary.records {
        out.push_str(&format!(
            "{},{},{},{},{:.17e}\n",
            rec.round, rec.alive, rec.cluster_heads, rec.packets_to_bs_cumulative,
            rec.total_residual_energy
        ));
    }
    out
}

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("malformed metrics csv: {0}")]
    MalformedCsv(String),
}

/// Parse the output of [`export_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<RoundRecord>, MetricsError> {
    let bad = |msg: String| MetricsError::MalformedCsv(msg);
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty input".into()))?;
    if header != "round,alive,cluster_heads,packets_to_bs_cum,total_residual_energy_j" {
        return Err(bad(format!("unexpected header `{header}`")));
    }
    let mut records = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(bad(format!("expected 5 fields in `{line}`")));
        }
        let parse_err = |what: &str| bad(format!("bad {what} in `{line}`"));
        records.push(RoundRecord {
            round: fields[0].parse().map_err(|_| parse_err("round"))?,
            alive: fields[1].parse().map_err(|_| parse_err("alive"))?,
            cluster_heads: fields[2].parse().map_err(|_| parse_err("cluster_heads"))?,
            packets_to_bs_cumulative: fields[3].parse().map_err(|_| parse_err("packets"))?,
            total_residual_energy: fields[4].parse().map_err(|_| parse_err("energy"))?,
        });
    }
    Ok(records)
}

/// Mean and sample standard deviation of one milestone across runs, with the
/// number of runs where it never occurred.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MilestoneStats {
    pub mean: f64,
    pub std: f64,
    pub absent: usize,
}

fn milestone_stats(values: impl Iterator<Item = Option<u64>>) -> MilestoneStats {
    let mut present: Vec<f64> = Vec::new();
    let mut absent = 0;
    for v in values {
        match v {
            Some(x) => present.push(x as f64),
            None => absent += 1,
        }
    }
    if present.is_empty() {
        return MilestoneStats { mean: f64::NAN, std: f64::NAN, absent };
    }
    let n = present.len() as f64;
    let mean = present.iter().sum::<f64>() / n;
    let std = if present.len() < 2 {
        0.0
    } else {
        (present.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    MilestoneStats { mean, std, absent }
}

/// Cross-run aggregate of one protocol's summaries.
#[derive(Debug, Clone)]
pub struct AggregateStats {
    pub protocol: Protocol,
    pub runs: usize,
    pub fnd: MilestoneStats,
    pub hnd: MilestoneStats,
    pub lnd: MilestoneStats,
    pub packets_mean: f64,
    /// Mean residual-energy trajectory, truncated to the shortest run.
    pub mean_energy_trajectory: Vec<f64>,
}

impl AggregateStats {
    pub const CSV_HEADER: &'static str =
        "protocol,seed_count,fnd_mean,fnd_std,hnd_mean,hnd_std,lnd_mean,lnd_std,packets_mean";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.protocol,
            self.runs,
            self.fnd.mean,
            self.fnd.std,
            self.hnd.mean,
            self.hnd.std,
            self.lnd.mean,
            self.lnd.std,
            self.packets_mean
        )
    }
}

/// Aggregate several runs of the same protocol: milestone means and sample
/// standard deviations (absent milestones excluded but counted), mean total
/// packets, and the mean energy trajectory truncated to the shortest run.
pub fn aggregate_runs(summaries: &[RunSummary]) -> AggregateStats {
    assert!(!summaries.is_empty(), "cannot aggregate zero runs");
    let protocol = summaries[0].protocol;
    assert!(
        summaries.iter().all(|s| s.protocol == protocol),
        "aggregating runs of different protocols"
    );

    let min_len = summaries.iter().map(|s| s.records.len()).min().unwrap_or(0);
    let mut mean_energy_trajectory = Vec::with_capacity(min_len);
    for r in 0..min_len {
        let sum: f64 = summaries.iter().map(|s| s.records[r].total_residual_energy).sum();
        mean_energy_trajectory.push(sum / summaries.len() as f64);
    }

    AggregateStats {
        protocol,
        runs: summaries.len(),
        fnd: milestone_stats(summaries.iter().map(|s| s.fnd)),
        hnd: milestone_stats(summaries.iter().map(|s| s.hnd)),
        lnd: milestone_stats(summaries.iter().map(|s| s.lnd)),
        packets_mean: summaries.iter().map(|s| s.total_packets() as f64).sum::<f64>()
            / summaries.len() as f64,
        mean_energy_trajectory,
    }
}
