//! First-order radio dissipation model and the analytic per-round cluster
//! energy formulas derived from it.
//!
//! All operations are pure functions of their inputs. Transmission switches
//! from the free-space `d²` amplifier to the multipath `d⁴` amplifier at the
//! configured `d0`. Note that the default `d0` of 70 m is *not* the crossover
//! distance implied by the default amplifier coefficients (≈87.7 m), so the
//! transmit cost is deliberately discontinuous at `d0`; see
//! [`crossover_distance`] for the coefficient-implied value.

use std::f64::consts::PI;

/// Radio energy coefficients and message framing shared by every node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams {
    /// Electronics energy per bit for TX or RX circuitry (J/bit).
    pub e_elec: f64,
    /// Free-space amplifier energy (J/bit/m²).
    pub eps_fs: f64,
    /// Multipath amplifier energy (J/bit/m⁴).
    pub eps_mp: f64,
    /// Data-aggregation energy (J/bit/message).
    pub e_da: f64,
    /// Free-space/multipath switchover distance (m).
    pub d0: f64,
    /// Data message length L (bits).
    pub message_bits: u32,
    /// Per-node starting energy E₀ (J).
    pub initial_energy: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            e_elec: 5e-9,
            eps_fs: 10e-12,
            eps_mp: 0.0013e-12,
            e_da: 5e-9,
            d0: 70.0,
            message_bits: 4000,
            initial_energy: 0.5,
        }
    }
}

impl RadioParams {
    /// True when every field satisfies the strictly-positive invariant.
    pub fn is_valid(&self) -> bool {
        self.e_elec > 0.0
            && self.eps_fs > 0.0
            && self.eps_mp > 0.0
            && self.e_da > 0.0
            && self.d0 > 0.0
            && self.message_bits > 0
            && self.initial_energy > 0.0
    }
}

/// Energy to transmit `bits` over distance `d`: electronics plus the
/// free-space amplifier below `d0`, the multipath amplifier at or above it.
pub fn tx_energy(bits: u32, d: f64, params: &RadioParams) -> f64 {
    assert!(d >= 0.0, "transmit distance must be non-negative");
    let bits = bits as f64;
    let electronics = bits * params.e_elec;
    if d < params.d0 {
        electronics + bits * params.eps_fs * d * d
    } else {
        electronics + bits * params.eps_mp * d * d * d * d
    }
}

/// Energy to receive `bits` (electronics only).
pub fn rx_energy(bits: u32, params: &RadioParams) -> f64 {
    bits as f64 * params.e_elec
}

/// Crossover distance implied by the amplifier coefficients,
/// `sqrt(eps_fs / eps_mp)`. Purely informational: it does not overwrite the
/// configured `d0`.
pub fn crossover_distance(params: &RadioParams) -> f64 {
    (params.eps_fs / params.eps_mp).sqrt()
}

/// Energy for a cluster head to aggregate `message_count` messages of `bits`
/// each.
pub fn aggregation_energy(bits: u32, message_count: usize, params: &RadioParams) -> f64 {
    message_count as f64 * bits as f64 * params.e_da
}

/// Analytic per-round energy of one cluster head in an `n`-node network with
/// `k` clusters whose head sits `d_bs` meters from the base station:
/// receive from the expected `n/k − 1` members, aggregate `n/k` messages,
/// and uplink over the multipath channel. `n/k` is a real-valued expected
/// cluster size, not floored.
pub fn ch_round_energy(n: usize, k: usize, d_bs: f64, params: &RadioParams) -> f64 {
    assert!(k >= 1, "cluster count must be at least 1");
    assert!(n >= k, "need at least one node per cluster");
    assert!(d_bs > 0.0, "cluster head cannot sit on the base station");
    let bits = params.message_bits as f64;
    let members = n as f64 / k as f64 - 1.0;
    members * bits * params.e_elec
        + (members + 1.0) * bits * params.e_da
        + bits * params.e_elec
        + bits * params.eps_mp * d_bs.powi(4)
}

/// Analytic per-round energy of a non-cluster-head transmitting to its head
/// over `d_ch` meters; always the free-space form.
pub fn nch_round_energy(d_ch: f64, params: &RadioParams) -> f64 {
    assert!(d_ch >= 0.0, "member distance must be non-negative");
    let bits = params.message_bits as f64;
    bits * params.e_elec + bits * params.eps_fs * d_ch * d_ch
}

/// Analytic total per-round network dissipation for `n` nodes in `k` clusters
/// with the given mean squared member-to-head distance `d_ch_sq`.
/// The analytic default for `d_ch_sq` is [`expected_ch_distance_sq`].
pub fn total_network_energy(
    n: usize,
    k: f64,
    d_bs: f64,
    d_ch_sq: f64,
    params: &RadioParams,
) -> f64 {
    // k is real-valued and may drop below 1 so the minimization oracle can
    // sweep the whole bracket around the optimum.
    assert!(k > 0.0, "cluster count must be positive");
    assert!(d_ch_sq >= 0.0, "squared distance must be non-negative");
    let bits = params.message_bits as f64;
    let n = n as f64;
    bits * (2.0 * n * params.e_elec
        + n * params.e_da
        + k * params.eps_mp * d_bs.powi(4)
        + n * params.eps_fs * d_ch_sq)
}

/// Expected squared member-to-head distance for `k` clusters uniformly
/// covering an `M × M` region: `M² / (2πk)`.
pub fn expected_ch_distance_sq(region_side: f64, k: f64) -> f64 {
    region_side * region_side / (2.0 * PI * k)
}

/// Cluster count that minimizes [`total_network_energy`] with the analytic
/// mean squared member distance plugged in:
/// `sqrt(n / 2π) · sqrt(eps_fs / eps_mp) · M / d_bs²`.
pub fn optimal_cluster_count(
    n: usize,
    region_side: f64,
    d_bs: f64,
    params: &RadioParams,
) -> f64 {
    assert!(n >= 1 && region_side > 0.0 && d_bs > 0.0);
    (n as f64 / (2.0 * PI)).sqrt() * (params.eps_fs / params.eps_mp).sqrt() * region_side
        / (d_bs * d_bs)
}

/// Per-node cluster-head probability for an optimal cluster count,
/// `k_opt / n` clamped to `[0, 1]`.
pub fn optimal_probability(n: usize, k_opt: f64) -> f64 {
    assert!(n >= 1);
    (k_opt / n as f64).clamp(0.0, 1.0)
}
