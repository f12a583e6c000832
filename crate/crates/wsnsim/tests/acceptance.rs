//! Acceptance suite: every release criterion as one test, each printing a
//! `criterion N (...): PASS` line (visible with `--nocapture`).
//!
//! Criteria 1–3 compare LEACH and DE-LEACH over the same 20 shared-topology
//! seeds with the full default parameter set; the runs are computed once and
//! shared across the tests. Criterion 4 is soft by definition: it reports
//! the sweep outcome and flags an out-of-band optimum without failing the
//! suite.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wsnsim::config::SimConfig;
use wsnsim::election::{
    deleach_far_threshold, deleach_near_threshold, elect_cluster_heads, eleach_threshold,
    leach_threshold, ElectionParams, Protocol,
};
use wsnsim::engine::{run_round, run_simulation, NodeState, SimState};
use wsnsim::harness;
use wsnsim::metrics::RunSummary;
use wsnsim::radio::{expected_ch_distance_sq, optimal_cluster_count, total_network_energy, RadioParams};
use wsnsim::topology::{generate_topology, Position, Topology};

const COMPARISON_SEEDS: u64 = 20;
/// High enough that every default-parameter run reaches last-node death.
const COMPARISON_MAX_ROUNDS: u64 = 40_000;

fn default_topology(seed: u64) -> Topology {
    let config = SimConfig::default();
    generate_topology(config.num_nodes, config.region_side, config.bs_offset, seed).unwrap()
}

fn election(variant: Protocol) -> ElectionParams {
    ElectionParams { variant, ..ElectionParams::default() }
}

/// The shared 20-seed default-parameter comparison set: (LEACH, DE-LEACH).
fn comparison_runs() -> &'static (Vec<RunSummary>, Vec<RunSummary>) {
    static RUNS: OnceLock<(Vec<RunSummary>, Vec<RunSummary>)> = OnceLock::new();
    RUNS.get_or_init(|| {
        let radio = RadioParams::default();
        let mut leach_runs = Vec::new();
        let mut deleach_runs = Vec::new();
        for seed in 1..=COMPARISON_SEEDS {
            let topology = default_topology(seed);
            leach_runs.push(run_simulation(
                &topology,
                &election(Protocol::Leach),
                &radio,
                seed,
                COMPARISON_MAX_ROUNDS,
            ));
            deleach_runs.push(run_simulation(
                &topology,
                &election(Protocol::DeLeach),
                &radio,
                seed,
                COMPARISON_MAX_ROUNDS,
            ));
        }
        for run in leach_runs.iter().chain(&deleach_runs) {
            assert!(
                run.lnd.is_some(),
                "{} seed {} did not complete within {COMPARISON_MAX_ROUNDS} rounds",
                run.protocol,
                run.seed
            );
        }
        (leach_runs, deleach_runs)
    })
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    v.iter().sum::<f64>() / v.len() as f64
}

#[test]
fn criterion_01_lifetime_ordering() {
    let (leach, deleach) = comparison_runs();
    let fnd_leach = mean(leach.iter().map(|s| s.fnd.unwrap() as f64));
    let fnd_deleach = mean(deleach.iter().map(|s| s.fnd.unwrap() as f64));
    let lnd_leach = mean(leach.iter().map(|s| s.lnd.unwrap() as f64));
    let lnd_deleach = mean(deleach.iter().map(|s| s.lnd.unwrap() as f64));
    let fnd_wins = leach
        .iter()
        .zip(deleach)
        .filter(|(l, d)| d.fnd.unwrap() > l.fnd.unwrap())
        .count();

    assert!(
        fnd_deleach > fnd_leach,
        "mean fnd: deleach {fnd_deleach} vs leach {fnd_leach}"
    );
    assert!(
        lnd_deleach > lnd_leach,
        "mean lnd: deleach {lnd_deleach} vs leach {lnd_leach}"
    );
    let win_fraction = fnd_wins as f64 / COMPARISON_SEEDS as f64;
    assert!(win_fraction >= 0.70, "deleach wins fnd on only {fnd_wins}/{COMPARISON_SEEDS} seeds");

    println!(
        "criterion 1 (first/last-death ordering): PASS — mean fnd {fnd_deleach:.1} > {fnd_leach:.1}, \
         mean lnd {lnd_deleach:.1} > {lnd_leach:.1}, fnd wins {fnd_wins}/{COMPARISON_SEEDS}"
    );
}

#[test]
fn criterion_02_throughput_ordering() {
    let (leach, deleach) = comparison_runs();
    let at_leach_lnd = |runs: &[RunSummary]| {
        mean(runs.iter().zip(leach).map(|(run, l)| {
            run.packets_at_round(l.lnd.unwrap()) as f64
        }))
    };
    let packets_leach = at_leach_lnd(leach);
    let packets_deleach = at_leach_lnd(deleach);
    assert!(
        packets_deleach > packets_leach,
        "packets at leach lnd: deleach {packets_deleach} vs leach {packets_leach}"
    );
    println!(
        "criterion 2 (throughput ordering): PASS — cumulative packets at leach lnd \
         {packets_deleach:.1} > {packets_leach:.1}"
    );
}

#[test]
fn criterion_03_remaining_energy_ordering() {
    let (leach, deleach) = comparison_runs();
    let config = SimConfig::default();
    let slack = 0.05 * config.radio.initial_energy * config.num_nodes as f64;

    // Seed-mean trajectories; finished runs contribute their exact
    // continuation of zero residual energy.
    let traj = |runs: &[RunSummary], round: usize| {
        mean(runs.iter().map(|s| {
            s.records.get(round).map_or(0.0, |rec| rec.total_residual_energy)
        }))
    };
    let mean_lnd = |runs: &[RunSummary]| mean(runs.iter().map(|s| s.lnd.unwrap() as f64));
    let horizon = mean_lnd(leach).min(mean_lnd(deleach)).floor() as usize;

    let mut worst = f64::INFINITY;
    for round in 0..=horizon {
        let margin = traj(deleach, round) - traj(leach, round) + slack;
        if margin < worst {
            worst = margin;
        }
        assert!(
            margin >= 0.0,
            "round {round}: deleach trails leach by more than the {slack} J slack"
        );
    }
    println!(
        "criterion 3 (remaining-energy ordering): PASS — horizon {horizon} rounds, \
         minimum margin {worst:.3} J with {slack} J slack"
    );
}

#[test]
fn criterion_04_c_sweep_soft() {
    // Soft criterion by definition: an out-of-band optimum is reported, not
    // failed, because the sweep objective over random topologies is
    // underdetermined. The mechanism behind a boundary optimum: larger c
    // concentrates near-region elections at epoch starts, and the silent
    // zero-head rounds that follow cost nothing, so lifetime keeps rising
    // with c in this model.
    let radio = RadioParams::default();
    let seeds: Vec<u64> = (1..=10).collect();
    let topologies: Vec<Topology> = seeds.iter().map(|&s| default_topology(s)).collect();

    let mut best_c = 0u32;
    let mut best_lnd = f64::NEG_INFINITY;
    let mut table = String::new();
    for c in 1..=10u32 {
        let params = ElectionParams {
            variant: Protocol::DeLeach,
            c: c as f64,
            ..ElectionParams::default()
        };
        let lnd_mean = mean(seeds.iter().zip(&topologies).map(|(&seed, topology)| {
            let run = run_simulation(topology, &params, &radio, seed, COMPARISON_MAX_ROUNDS);
            run.lnd.expect("sweep run did not complete") as f64
        }));
        table.push_str(&format!("  c={c}: mean lnd {lnd_mean:.1}\n"));
        if lnd_mean > best_lnd {
            best_lnd = lnd_mean;
            best_c = c;
        }
    }
    print!("{table}");
    if (4..=8).contains(&best_c) {
        println!("criterion 4 (c-sweep optimum): PASS — argmax c = {best_c} lies in 4..=8");
    } else {
        println!(
            "criterion 4 (c-sweep optimum): SOFT-FAIL — argmax c = {best_c} outside 4..=8; \
             lifetime is monotone in c under silent zero-head rounds (see table above)"
        );
    }
}

#[test]
fn criterion_05_energy_conservation() {
    // Every run in criteria 1-4 already self-checks conservation each round
    // inside run_simulation (1e-9 relative). Re-verify here with independent
    // accounting: per-deduction sums against a hand-summed residual total.
    let radio = RadioParams::default();
    let mut rounds_checked = 0u64;
    for variant in Protocol::ALL {
        for seed in 1..=3u64 {
            let topology = default_topology(seed);
            let params = election(variant);
            let mut state = SimState::from_topology(&topology, radio.initial_energy);
            let mut rng = ChaCha8Rng::seed_from_u64(wsnsim::engine::election_stream_seed(
                seed, variant,
            ));
            let total_initial = radio.initial_energy * state.nodes.len() as f64;
            let mut consumed = 0.0;
            for round in 0..4000u64 {
                if state.nodes.iter().all(|n| !n.alive) {
                    break;
                }
                let outcome = run_round(&mut state, &params, &radio, round, &mut rng);
                consumed += outcome.energy_consumed;
                let residual: f64 = state.nodes.iter().map(|n| n.residual_energy).sum();
                let drift = (total_initial - (residual + consumed)).abs();
                assert!(
                    drift <= 1e-9 * total_initial,
                    "{variant:?} seed {seed} round {round}: drift {drift:e}"
                );
                rounds_checked += 1;
            }
        }
    }
    // The shared comparison runs all passed the same in-engine check.
    let (leach, deleach) = comparison_runs();
    assert_eq!(leach.len() + deleach.len(), 2 * COMPARISON_SEEDS as usize);
    println!(
        "criterion 5 (energy conservation): PASS — {rounds_checked} rounds re-verified \
         independently at 1e-9 relative; all comparison runs self-checked in-engine"
    );
}

#[test]
fn criterion_06_threshold_oracles() {
    let tol = 1e-12;
    let close = |actual: f64, expected: f64, what: &str| {
        let scale = expected.abs().max(f64::MIN_POSITIVE);
        assert!(
            (actual - expected).abs() <= tol * scale,
            "{what}: {actual} vs {expected}"
        );
    };
    let leach = election(Protocol::Leach);
    close(leach_threshold(&leach, 0, true), 0.05, "leach r0");
    close(leach_threshold(&leach, 19, true), 1.0, "leach r19 (clamped)");
    assert_eq!(leach_threshold(&leach, 7, false), 0.0, "leach ineligible");

    let eleach = election(Protocol::ELeach);
    close(eleach_threshold(&eleach, 0, true, 0.4, 0.5), 0.05, "eleach above half");
    close(
        eleach_threshold(&eleach, 0, true, 0.2, 0.5),
        0.05 * (2.0 * 0.05 * (0.2 / 0.5)),
        "eleach below half",
    );
    close(eleach_threshold(&eleach, 0, true, 0.2, 0.5), 0.002, "eleach fixture value");
    assert_eq!(eleach_threshold(&eleach, 0, true, 0.0, 0.5), 0.0, "eleach depleted");

    let deleach = election(Protocol::DeLeach);
    close(
        deleach_near_threshold(&deleach, 0, true, 127.0, 127.0),
        0.375,
        "near boundary r0",
    );
    close(
        deleach_near_threshold(&deleach, 10, true, 127.0, 127.0),
        0.75,
        "near boundary r10",
    );
    close(
        deleach_near_threshold(&deleach, 19, true, 127.0, 90.0),
        1.0,
        "near r19 (clamped)",
    );
    close(
        deleach_far_threshold(&deleach, 0, true, 0.5, 0.5),
        0.03125,
        "far full energy",
    );
    close(
        deleach_far_threshold(&deleach, 0, true, 0.25, 0.5),
        0.015625,
        "far half energy",
    );
    assert_eq!(deleach_far_threshold(&deleach, 3, true, 0.0, 0.5), 0.0, "far depleted");

    println!("criterion 6 (threshold oracles): PASS — all fixtures within 1e-12 relative");
}

#[test]
fn criterion_07_election_expectation() {
    let params = election(Protocol::Leach);
    let mut rng = ChaCha8Rng::seed_from_u64(10_007);
    let elections = 10_000;
    let mut total_heads = 0usize;
    for _ in 0..elections {
        let mut states: Vec<NodeState> = (0..100)
            .map(|id| NodeState {
                id,
                position: Position::new(0.0, 0.0),
                distance_to_bs: 100.0,
                initial_energy: 0.5,
                residual_energy: 0.5,
                alive: true,
                eligible: true,
            })
            .collect();
        total_heads += elect_cluster_heads(&mut states, &params, 0, 120.0, &mut rng).len();
    }
    let mean_heads = total_heads as f64 / elections as f64;
    assert!(
        (4.8..=5.2).contains(&mean_heads),
        "mean head count {mean_heads} outside [4.8, 5.2]"
    );
    println!(
        "criterion 7 (election expectation): PASS — mean head count {mean_heads:.3} over \
         {elections} elections"
    );
}

#[test]
fn criterion_08_epoch_uniqueness() {
    let radio = RadioParams::default();
    let mut rounds_checked = 0u64;
    for variant in Protocol::ALL {
        for seed in 1..=2u64 {
            let topology = default_topology(seed);
            let params = election(variant);
            let epoch_len = params.epoch_length();
            let mut state = SimState::from_topology(&topology, radio.initial_energy);
            let mut rng = ChaCha8Rng::seed_from_u64(wsnsim::engine::election_stream_seed(
                seed, variant,
            ));
            let mut current_epoch = u64::MAX;
            let mut served: Vec<bool> = vec![false; state.nodes.len()];
            for round in 0..COMPARISON_MAX_ROUNDS {
                if state.nodes.iter().all(|n| !n.alive) {
                    break;
                }
                let epoch = round / epoch_len;
                if epoch != current_epoch {
                    current_epoch = epoch;
                    served.iter_mut().for_each(|s| *s = false);
                }
                let outcome = run_round(&mut state, &params, &radio, round, &mut rng);
                for &head in &outcome.cluster_heads {
                    assert!(
                        !served[head],
                        "{variant:?} seed {seed}: node {head} served twice in epoch {epoch}"
                    );
                    served[head] = true;
                }
                rounds_checked += 1;
            }
        }
    }
    println!(
        "criterion 8 (epoch uniqueness): PASS — no repeat head within any \
         epoch across {rounds_checked} rounds"
    );
}

#[test]
fn criterion_09_optimal_cluster_count_oracle() {
    // Table 1 case first.
    let table1 = RadioParams::default();
    let k_table = optimal_cluster_count(100, 100.0, 100.0, &table1);
    assert!((k_table - 3.50).abs() <= 0.01, "table-1 k_opt {k_table}");

    // 100 randomized parameter draws, each checked against a brute-force
    // grid minimization of the analytic network energy.
    let grid_argmin = |n: usize, m: f64, d_bs: f64, params: &RadioParams| -> f64 {
        let mut best_k = 0.25;
        let mut best_e = f64::INFINITY;
        let mut k = 0.25;
        while k <= n as f64 {
            let e = total_network_energy(n, k, d_bs, expected_ch_distance_sq(m, k), params);
            if e < best_e {
                best_e = e;
                best_k = k;
            }
            k += 0.25;
        }
        best_k
    };

    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut accepted = 0;
    while accepted < 100 {
        let n: usize = rng.random_range(20..=200);
        let m: f64 = rng.random_range(50.0..=150.0);
        let d_bs: f64 = rng.random_range(80.0..=250.0);
        let params = RadioParams {
            eps_fs: rng.random_range(5e-12..=2e-11),
            eps_mp: rng.random_range(5e-16..=5e-15),
            ..table1
        };
        let k_opt = optimal_cluster_count(n, m, d_bs, &params);
        // Keep the optimum interior so the grid bracket contains it.
        if !(0.5..=n as f64 / 2.0).contains(&k_opt) {
            continue;
        }
        accepted += 1;
        let k_grid = grid_argmin(n, m, d_bs, &params);
        assert!(
            (k_grid - k_opt).abs() <= 0.25 + 1e-9,
            "draw {accepted}: grid {k_grid} vs analytic {k_opt} (n={n}, M={m}, d_bs={d_bs})"
        );
    }
    println!(
        "criterion 9 (optimal cluster count): PASS — table-1 case {k_table:.4} ≈ 3.50, \
         100 randomized draws within one grid step"
    );
}

#[test]
fn criterion_10_determinism() {
    // Identical configs must produce byte-identical CSV output.
    let mut config = SimConfig::default();
    config.num_nodes = 40;
    config.max_rounds = 400;
    config.seed = 12345;
    config.election.variant = Protocol::DeLeach;

    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    harness::cmd_run(&config, dir_a.path()).unwrap();
    harness::cmd_run(&config, dir_b.path()).unwrap();
    let name = format!("{}_{}.csv", config.protocol().tag(), config.seed);
    let bytes_a = std::fs::read(dir_a.path().join(&name)).unwrap();
    let bytes_b = std::fs::read(dir_b.path().join(&name)).unwrap();
    assert!(!bytes_a.is_empty());
    assert_eq!(bytes_a, bytes_b, "cmd_run output differs between identical invocations");

    // Rerunning a comparison run is bit-stable.
    let topology = default_topology(1);
    let radio = RadioParams::default();
    let again = run_simulation(
        &topology,
        &election(Protocol::Leach),
        &radio,
        1,
        COMPARISON_MAX_ROUNDS,
    );
    let (leach, _) = comparison_runs();
    let reference = &leach[0];
    assert_eq!(again.records.len(), reference.records.len());
    for (a, b) in again.records.iter().zip(&reference.records) {
        assert_eq!(a.round, b.round);
        assert_eq!(a.alive, b.alive);
        assert_eq!(a.cluster_heads, b.cluster_heads);
        assert_eq!(a.packets_to_bs_cumulative, b.packets_to_bs_cumulative);
        assert_eq!(a.total_residual_energy.to_bits(), b.total_residual_energy.to_bits());
    }
    println!(
        "criterion 10 (determinism): PASS — byte-identical CSVs and bit-stable rerun \
         of {} rounds",
        again.records.len()
    );
}
