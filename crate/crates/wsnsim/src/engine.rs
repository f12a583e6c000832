//! The round engine: epoch maintenance, election, cluster formation and
//! steady-state energy accounting.
//!
//! Each round has a setup phase (election plus nearest-head cluster
//! formation, free of energy cost) and a steady-state phase in which every
//! alive node transmits exactly one data message. Deductions follow a fixed
//! order — members by ascending id, then each head (receive, aggregate,
//! uplink) by ascending id, then direct senders by ascending id — so a run is
//! bit-reproducible for a given seed.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::election::{self, ElectionParams, Protocol};
use crate::metrics::RunSummary;
use crate::radio::{self, RadioParams};
use crate::topology::{distance, Position, Topology};

/// Per-run mutable state of one node.
#[derive(Debug, Clone)]
pub struct NodeState {
    pub id: usize,
    pub position: Position,
    pub distance_to_bs: f64,
    pub initial_energy: f64,
    pub residual_energy: f64,
    pub alive: bool,
    /// True while the node has not served as cluster head in the current
    /// epoch.
    pub eligible: bool,
}

/// All mutable simulation state for one run.
#[derive(Debug, Clone)]
pub struct SimState {
    pub nodes: Vec<NodeState>,
    /// Average node-to-BS distance, fixed at deployment.
    pub d_avg: f64,
}

impl SimState {
    /// Arm every deployed node with the configured initial energy.
    pub fn from_topology(topology: &Topology, initial_energy: f64) -> Self {
        assert!(initial_energy > 0.0, "initial energy must be positive");
        let nodes = topology
            .nodes()
            .iter()
            .map(|site| NodeState {
                id: site.id,
                position: site.position,
                distance_to_bs: site.distance_to_bs,
                initial_energy,
                residual_energy: initial_energy,
                alive: true,
                eligible: true,
            })
            .collect();
        Self { nodes, d_avg: topology.d_avg() }
    }

    pub fn alive_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.alive).count()
    }

    pub fn total_residual_energy(&self) -> f64 {
        self.nodes.iter().map(|n| n.residual_energy).sum()
    }
}

/// What happened in one round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundOutcome {
    pub round: u64,
    /// Elected heads, ascending id.
    pub cluster_heads: Vec<usize>,
    /// Head id → member ids (ascending).
    pub clusters: BTreeMap<usize, Vec<usize>>,
    /// Nodes that uplink straight to the BS. The setup phase keeps
    /// zero-head rounds silent, so engine rounds leave this empty; the
    /// steady state accounts for the role when a caller supplies it.
    pub direct_senders: Vec<usize>,
    /// Completed BS uplinks this round.
    pub packets_to_bs: u64,
    /// Sum of every energy deduction this round, partial spends included.
    pub energy_consumed: f64,
    /// Nodes that died this round, ascending id.
    pub deaths: Vec<usize>,
}

/// Election plus cluster formation. Every alive non-head joins the nearest
/// head by Euclidean distance, ties broken by lowest head id. A round that
/// elects no head stays silent: nodes hold their data and no energy moves.
/// Setup-phase control messaging costs no energy.
pub fn run_setup_phase<R: Rng>(
    state: &mut SimState,
    params: &ElectionParams,
    round: u64,
    rng: &mut R,
) -> (Vec<usize>, BTreeMap<usize, Vec<usize>>, Vec<usize>) {
    let heads = election::elect_cluster_heads(&mut state.nodes, params, round, state.d_avg, rng);

    if heads.is_empty() {
        return (heads, BTreeMap::new(), Vec::new());
    }

    let clusters = form_clusters(state, &heads);
    (heads, clusters, Vec::new())
}

/// Assign every alive non-head node to the nearest head by Euclidean
/// distance, ties broken by lowest head id. Iterating `heads` in ascending
/// order with a strict `<` comparison implements the tie-break.
pub fn form_clusters(state: &SimState, heads: &[usize]) -> BTreeMap<usize, Vec<usize>> {
    let mut clusters: BTreeMap<usize, Vec<usize>> =
        heads.iter().map(|&id| (id, Vec::new())).collect();
    for node in state.nodes.iter().filter(|n| n.alive) {
        if clusters.contains_key(&node.id) {
            continue;
        }
        let mut best_head = heads[0];
        let mut best_dist = f64::INFINITY;
        for &head in heads {
            let d = distance(node.position, state.nodes[head].position);
            if d < best_dist {
                best_dist = d;
                best_head = head;
            }
        }
        clusters.get_mut(&best_head).expect("head registered above").push(node.id);
    }
    clusters
}

/// Deduct `cost` from a node. A node that cannot cover the full cost spends
/// whatever remains and dies with the action incomplete; a node left at
/// exactly zero completes the action and dies at that instant.
/// Returns `(spent, completed)`.
fn charge(node: &mut NodeState, cost: f64, deaths: &mut Vec<usize>) -> (f64, bool) {
    debug_assert!(node.alive, "charging a dead node");
    if node.residual_energy >= cost {
        node.residual_energy -= cost;
        if node.residual_energy == 0.0 {
            node.alive = false;
            deaths.push(node.id);
        }
        (cost, true)
    } else {
        let spent = node.residual_energy;
        node.residual_energy = 0.0;
        node.alive = false;
        deaths.push(node.id);
        (spent, false)
    }
}

/// The data-transfer phase. Members pay the branching transmit cost to their
/// head; each head pays one receive per message actually delivered, one
/// aggregation over the received messages plus its own reading, and one
/// uplink to the BS; direct senders pay the uplink alone. A head that dies
/// before finishing its uplink delivers no packet.
pub fn run_steady_state(
    state: &mut SimState,
    round: u64,
    cluster_heads: Vec<usize>,
    clusters: BTreeMap<usize, Vec<usize>>,
    direct_senders: Vec<usize>,
    radio: &RadioParams,
) -> RoundOutcome {
    let bits = radio.message_bits;
    let mut energy_consumed = 0.0;
    let mut packets_to_bs = 0u64;
    let mut deaths = Vec::new();
    // Messages actually delivered to each head this round.
    let mut received: BTreeMap<usize, usize> = BTreeMap::new();

    // Members transmit, ascending id across all clusters.
    let mut member_order: Vec<(usize, usize)> = clusters
        .iter()
        .flat_map(|(&head, members)| members.iter().map(move |&m| (m, head)))
        .collect();
    member_order.sort_unstable();
    for (member, head) in member_order {
        let d = distance(state.nodes[member].position, state.nodes[head].position);
        let cost = radio::tx_energy(bits, d, radio);
        let (spent, completed) = charge(&mut state.nodes[member], cost, &mut deaths);
        energy_consumed += spent;
        if completed {
            *received.entry(head).or_insert(0) += 1;
        }
    }

    // Heads receive, aggregate and uplink, ascending id.
    for &head in &cluster_heads {
        let delivered = received.get(&head).copied().unwrap_or(0);
        let mut dead = false;
        for _ in 0..delivered {
            let (spent, completed) =
                charge(&mut state.nodes[head], radio::rx_energy(bits, radio), &mut deaths);
            energy_consumed += spent;
            if !completed {
                dead = true;
                break;
            }
        }
        if dead {
            continue;
        }
        let agg = radio::aggregation_energy(bits, delivered + 1, radio);
        let (spent, completed) = charge(&mut state.nodes[head], agg, &mut deaths);
        energy_consumed += spent;
        if !completed {
            continue;
        }
        let uplink = radio::tx_energy(bits, state.nodes[head].distance_to_bs, radio);
        let (spent, completed) = charge(&mut state.nodes[head], uplink, &mut deaths);
        energy_consumed += spent;
        if completed {
            packets_to_bs += 1;
        }
    }

    // Direct senders uplink, ascending id.
    for &sender in &direct_senders {
        let cost = radio::tx_energy(bits, state.nodes[sender].distance_to_bs, radio);
        let (spent, completed) = charge(&mut state.nodes[sender], cost, &mut deaths);
        energy_consumed += spent;
        if completed {
            packets_to_bs += 1;
        }
    }

    RoundOutcome {
        round,
        cluster_heads,
        clusters,
        direct_senders,
        packets_to_bs,
        energy_consumed,
        deaths,
    }
}

/// One full round: epoch maintenance, setup, steady state.
pub fn run_round<R: Rng>(
    state: &mut SimState,
    params: &ElectionParams,
    radio: &RadioParams,
    round: u64,
    rng: &mut R,
) -> RoundOutcome {
    election::advance_epoch(&mut state.nodes, round, params);
    let (heads, clusters, direct) = run_setup_phase(state, params, round, rng);
    run_steady_state(state, round, heads, clusters, direct, radio)
}

/// Election draws must not couple runs of different protocols that share a
/// seed, so each variant gets its own stream.
pub fn election_stream_seed(seed: u64, variant: Protocol) -> u64 {
    let salt = match variant {
        Protocol::Leach => 1u64,
        Protocol::ELeach => 2,
        Protocol::DeLeach => 3,
    };
    seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Run a full simulation over a fixed topology: rounds from 0 until every
/// node is dead or `max_rounds` rounds have run. Verifies energy
/// conservation at every round boundary.
pub fn run_simulation(
    topology: &Topology,
    params: &ElectionParams,
    radio: &RadioParams,
    seed: u64,
    max_rounds: u64,
) -> RunSummary {
    assert!(max_rounds >= 1, "max_rounds must be at least 1");
    let mut state = SimState::from_topology(topology, radio.initial_energy);
    let mut rng = ChaCha8Rng::seed_from_u64(election_stream_seed(seed, params.variant));
    let mut summary = RunSummary::new(params.variant, seed, state.nodes.len());

    let total_initial = radio.initial_energy * state.nodes.len() as f64;
    let mut total_consumed = 0.0;

    for round in 0..max_rounds {
        if state.alive_count() == 0 {
            break;
        }
        let outcome = run_round(&mut state, params, radio, round, &mut rng);
        total_consumed += outcome.energy_consumed;
        let residual = state.total_residual_energy();
        let drift = (total_initial - (residual + total_consumed)).abs();
        assert!(
            drift <= 1e-9 * total_initial,
            "energy conservation violated at round {round}: drift {drift:e}"
        );
        summary.record_round(&outcome, &state);
    }
    summary
}
