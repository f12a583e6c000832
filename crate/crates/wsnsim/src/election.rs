//! Cluster-head election: the rotation threshold used by LEACH, the
//! residual-energy variant used by E-LEACH, and the dual-region
//! distance/energy scheme used by DE-LEACH.
//!
//! All thresholds are deterministic functions of their arguments and live in
//! `[0, 1]`; values the formulas push above 1 mean certain election and are
//! clamped. A node that already served as head in the current epoch
//! (`eligible == false`) or is dead always gets threshold 0.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::engine::NodeState;

/// Which election scheme a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Protocol {
    Leach,
    ELeach,
    DeLeach,
}

impl Protocol {
    pub const ALL: [Protocol; 3] = [Protocol::Leach, Protocol::ELeach, Protocol::DeLeach];

    /// Stable lowercase tag used in file names and CSV output.
    pub fn tag(&self) -> &'static str {
        match self {
            Protocol::Leach => "leach",
            Protocol::ELeach => "eleach",
            Protocol::DeLeach => "deleach",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Protocol {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "leach" => Ok(Protocol::Leach),
            "eleach" | "e-leach" => Ok(Protocol::ELeach),
            "deleach" | "de-leach" => Ok(Protocol::DeLeach),
            other => Err(format!(
                "unknown protocol `{other}` (expected leach, eleach or deleach)"
            )),
        }
    }
}

/// Election constants. Defaults follow the reference parameter table:
/// rotation base p = 0.05, near-region p_opt1 = 0.0625, far-region
/// p_opt2 = 0.03125, distance-boost constant c = 6.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectionParams {
    pub variant: Protocol,
    /// Rotation base probability; fixes the epoch length at floor(1/p).
    pub p: f64,
    /// Near-region head percentage (nodes at or below the average distance).
    pub p_opt1: f64,
    /// Far-region head percentage (nodes beyond the average distance).
    pub p_opt2: f64,
    /// Near-region distance boost constant.
    pub c: f64,
}

impl Default for ElectionParams {
    fn default() -> Self {
        Self {
            variant: Protocol::Leach,
            p: 0.05,
            p_opt1: 0.06250,
            p_opt2: 0.03125,
            c: 6.0,
        }
    }
}

impl ElectionParams {
    /// Rounds per eligibility epoch, floor(1/p). Guards against the float
    /// quotient landing a hair under an integer (e.g. 1/0.05).
    pub fn epoch_length(&self) -> u64 {
        assert!(self.p > 0.0 && self.p < 1.0, "p must lie in (0, 1)");
        let inv = 1.0 / self.p;
        let nearest = inv.round();
        let floored = if (inv - nearest).abs() < 1e-9 { nearest } else { inv.floor() };
        (floored as u64).max(1)
    }

    /// The shared threshold denominator `1 − p·(r mod floor(1/p))`.
    fn rotation_denominator(&self, round: u64) -> f64 {
        1.0 - self.p * (round % self.epoch_length()) as f64
    }
}

fn clamp_unit(t: f64) -> f64 {
    t.clamp(0.0, 1.0)
}

/// LEACH threshold: `p / (1 − p·(r mod floor(1/p)))` for eligible nodes,
/// 0 otherwise.
pub fn leach_threshold(params: &ElectionParams, round: u64, eligible: bool) -> f64 {
    if !eligible {
        return 0.0;
    }
    let denom = params.rotation_denominator(round);
    if denom <= 0.0 {
        return 1.0;
    }
    clamp_unit(params.p / denom)
}

/// E-LEACH threshold: plain LEACH while the node holds more than half its
/// initial energy, otherwise the LEACH value scaled by `2p·e_residual/e_init`.
pub fn eleach_threshold(
    params: &ElectionParams,
    round: u64,
    eligible: bool,
    e_residual: f64,
    e_init: f64,
) -> f64 {
    assert!(e_init > 0.0, "initial energy must be positive");
    assert!(
        (0.0..=e_init).contains(&e_residual),
        "residual energy out of range"
    );
    if !eligible {
        return 0.0;
    }
    let base = leach_threshold(params, round, eligible);
    if e_residual > 0.5 * e_init {
        base
    } else {
        clamp_unit(base * (2.0 * params.p * e_residual / e_init))
    }
}

/// DE-LEACH near-region threshold (node distance at or below the network
/// average): `p_opt1 / (1 − p·(r mod floor(1/p))) · c · d_avg / d_i`.
pub fn deleach_near_threshold(
    params: &ElectionParams,
    round: u64,
    eligible: bool,
    d_avg: f64,
    d_i: f64,
) -> f64 {
    assert!(d_i > 0.0, "node distance must be positive");
    assert!(d_i <= d_avg, "near-region threshold applied to a far node");
    if !eligible {
        return 0.0;
    }
    let denom = params.rotation_denominator(round);
    if denom <= 0.0 {
        return 1.0;
    }
    clamp_unit(params.p_opt1 / denom * (params.c * d_avg / d_i))
}

/// DE-LEACH far-region threshold (node distance beyond the network average):
/// `p_opt2 / (1 − p·(r mod floor(1/p))) · e_residual / e_init`.
pub fn deleach_far_threshold(
    params: &ElectionParams,
    round: u64,
    eligible: bool,
    e_residual: f64,
    e_init: f64,
) -> f64 {
    assert!(e_init > 0.0, "initial energy must be positive");
    assert!(
        (0.0..=e_init).contains(&e_residual),
        "residual energy out of range"
    );
    if !eligible {
        return 0.0;
    }
    let denom = params.rotation_denominator(round);
    if denom <= 0.0 {
        return 1.0;
    }
    clamp_unit(params.p_opt2 / denom * (e_residual / e_init))
}

/// Threshold for one node under the configured variant. DE-LEACH dispatches
/// on the region split: `d_i ≤ d_avg` goes to the near formula, the boundary
/// included.
pub fn node_threshold(node: &NodeState, params: &ElectionParams, round: u64, d_avg: f64) -> f64 {
    if !node.alive {
        return 0.0;
    }
    match params.variant {
        Protocol::Leach => leach_threshold(params, round, node.eligible),
        Protocol::ELeach => eleach_threshold(
            params,
            round,
            node.eligible,
            node.residual_energy,
            node.initial_energy,
        ),
        Protocol::DeLeach => {
            if node.distance_to_bs <= d_avg {
                deleach_near_threshold(params, round, node.eligible, d_avg, node.distance_to_bs)
            } else {
                deleach_far_threshold(
                    params,
                    round,
                    node.eligible,
                    node.residual_energy,
                    node.initial_energy,
                )
            }
        }
    }
}

/// Run one election: every alive node, in ascending id order, draws a single
/// uniform `[0, 1)` variate and becomes a cluster head when the draw falls
/// below its threshold. Elected nodes immediately lose eligibility for the
/// rest of the epoch. Dead nodes draw nothing. Returns the elected ids in
/// ascending order.
pub fn elect_cluster_heads<R: Rng>(
    states: &mut [NodeState],
    params: &ElectionParams,
    round: u64,
    d_avg: f64,
    rng: &mut R,
) -> Vec<usize> {
    let mut heads = Vec::new();
    for node in states.iter_mut() {
        if !node.alive {
            continue;
        }
        let draw: f64 = rng.random();
        let threshold = node_threshold(node, params, round, d_avg);
        if draw < threshold {
            node.eligible = false;
            heads.push(node.id);
        }
    }
    heads
}

/// Restore every alive node's eligibility at epoch boundaries
/// (`r mod floor(1/p) == 0`); other rounds leave the flags untouched.
pub fn advance_epoch(states: &mut [NodeState], round: u64, params: &ElectionParams) {
    if round % params.epoch_length() == 0 {
        for node in states.iter_mut() {
            if node.alive {
                node.eligible = true;
            }
        }
    }
}
