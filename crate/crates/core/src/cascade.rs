//! Monte-Carlo temporal independent cascade model.
//!
//! The persistent variant keeps every infected node infectious through all
//! remaining slices (the inter-layer identity links of the cascade supra
//! matrix); the reinfection variant is the original formulation where only
//! nodes infected during the previous slice spread and recovered nodes drop
//! back to susceptible.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::TemporalNetwork;
use crate::score::{Method, ScoreTable};
use crate::supra::{SupraKind, SupraMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CascadeVariant {
    /// Infected nodes stay infectious for every remaining slice.
    Persistent,
    /// Only nodes infected during the previous slice are infectious; nodes
    /// recover afterwards and can be infected again.
    Reinfection,
}

impl CascadeVariant {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "persistent" => Ok(CascadeVariant::Persistent),
            "reinfection" => Ok(CascadeVariant::Reinfection),
            other => Err(Error::config(format!("unknown cascade variant {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CascadeConfig {
    /// Per-attempt infection probability.
    pub rho: f64,
    /// Monte-Carlo runs per (seed node, seed slice).
    pub runs: u32,
    pub rng_seed: u64,
    pub variant: CascadeVariant,
    /// Seed at every slice (default). When false only slice 1 is seeded and
    /// later joint columns are zero.
    pub seed_all_slices: bool,
}

impl Default for CascadeConfig {
    fn default() -> Self {
        CascadeConfig {
            rho: 0.1,
            runs: 1000,
            rng_seed: 0,
            variant: CascadeVariant::Persistent,
            seed_all_slices: true,
        }
    }
}

impl CascadeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(Error::config(format!(
                "rho must lie in (0, 1], got {}",
                self.rho
            )));
        }
        if self.runs == 0 {
            return Err(Error::config("runs must be >= 1"));
        }
        Ok(())
    }
}

/// One cascade with explicit trial outcomes: `trial(slice, src, dst)` decides
/// whether an infection attempt succeeds. Returns the number of distinct
/// ever-infected nodes. Attempts are evaluated in ascending (src, dst) order;
/// under independent per-attempt trials the order cannot change the
/// distribution of the infected set, and nodes already infected are skipped
/// without spending a trial.
pub fn simulate_cascade_with<F>(
    net: &TemporalNetwork,
    seed_node: usize,
    seed_slice: usize,
    variant: CascadeVariant,
    mut trial: F,
) -> usize
where
    F: FnMut(usize, u32, u32) -> bool,
{
    let t_len = net.t_len();
    debug_assert!(seed_slice >= 1 && seed_slice <= t_len);
    let mut ever = vec![false; net.n()];
    ever[seed_node] = true;
    let mut ever_count = 1usize;

    match variant {
        CascadeVariant::Persistent => {
            let mut infectious = vec![seed_node as u32];
            for t in seed_slice..=t_len {
                let slice = &net.slices()[t - 1];
                let mut fresh = Vec::new();
                for &u in &infectious {
                    for &w in slice.out_neighbors(u as usize) {
                        if !ever[w as usize] && trial(t, u, w) {
                            ever[w as usize] = true;
                            ever_count += 1;
                            fresh.push(w);
                        }
                    }
                }
                infectious.extend_from_slice(&fresh);
            }
        }
        CascadeVariant::Reinfection => {
            // `current` marks the nodes infectious in this slice; they are
            // not susceptible while infectious
            let mut current = vec![false; net.n()];
            let mut frontier = vec![seed_node as u32];
            current[seed_node] = true;
            for t in seed_slice..=t_len {
                let slice = &net.slices()[t - 1];
                let mut next = Vec::new();
                for &u in &frontier {
                    for &w in slice.out_neighbors(u as usize) {
                        if !current[w as usize]
                            && !next.contains(&w)
                            && trial(t, u, w)
                        {
                            next.push(w);
                            if !ever[w as usize] {
                                ever[w as usize] = true;
                                ever_count += 1;
                            }
                        }
                    }
                }
                for &u in &frontier {
                    current[u as usize] = false;
                }
                for &w in &next {
                    current[w as usize] = true;
                }
                frontier = next;
            }
        }
    }
    ever_count
}

/// One cascade with Bernoulli(rho) trials drawn from `rng`.
pub fn simulate_cascade(
    net: &TemporalNetwork,
    seed_node: usize,
    seed_slice: usize,
    rho: f64,
    variant: CascadeVariant,
    rng: &mut impl RngCore,
) -> usize {
    simulate_cascade_with(net, seed_node, seed_slice, variant, |_, _, _| {
        rng.gen::<f64>() < rho
    })
}

/// Run the cascade mechanics directly on the cascade supra matrix: a frontier
/// walk where each supra entry is an independent pass probability (the
/// identity entries pass surely). Equivalent in distribution to the
/// persistent per-slice simulation.
pub fn simulate_on_supra(
    w: &SupraMatrix,
    seed_node: usize,
    seed_slice: usize,
    rng: &mut impl RngCore,
) -> Result<usize> {
    if w.kind() != SupraKind::CascadeW {
        return Err(Error::invalid_input(
            "supra cascade simulation needs a cascade-layout matrix",
        ));
    }
    let n = w.block_dim();
    let layers = w.layers();
    if seed_slice == 0 || seed_slice >= layers {
        return Err(Error::invalid_input(format!(
            "seed slice {seed_slice} outside 1..={}",
            layers - 1
        )));
    }
    let mut ever = vec![false; n];
    ever[seed_node] = true;
    let mut count = 1usize;
    let mut active = vec![seed_node as u32];
    for layer in (seed_slice - 1)..layers - 1 {
        let mut next_active = Vec::with_capacity(active.len());
        let mut in_next = vec![false; n];
        for &u in &active {
            let row = w.index(layer, u as usize);
            for (col, p) in w.matrix().row(row) {
                let node = col - (layer + 1) * n;
                if !in_next[node] && rng.gen::<f64>() < p {
                    in_next[node] = true;
                    next_active.push(node as u32);
                    if !ever[node] {
                        ever[node] = true;
                        count += 1;
                    }
                }
            }
        }
        active = next_active;
    }
    Ok(count)
}

/// Counter-based per-simulation stream: every (seed, node, slice, run) gets
/// an independent, schedule-independent generator.
fn run_rng(seed: u64, node: usize, slice: usize, run: u32) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(node as u64).to_le_bytes());
    key[16..24].copy_from_slice(&(slice as u64).to_le_bytes());
    key[24..32].copy_from_slice(&(run as u64).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Mean cascade sizes per (seed node, seed slice) as a score table.
/// Deterministic for a given seed regardless of worker count.
pub fn ticm_scores(net: &TemporalNetwork, cfg: &CascadeConfig) -> Result<ScoreTable> {
    cfg.validate()?;
    let n = net.n();
    let t_len = net.t_len();
    let slices = if cfg.seed_all_slices { t_len } else { 1 };
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|v| {
            let mut row = vec![0.0; t_len];
            for (idx, t) in (1..=slices).enumerate() {
                let mut total = 0u64;
                for run in 0..cfg.runs {
                    let mut rng = run_rng(cfg.rng_seed, v, t, run);
                    total +=
                        simulate_cascade(net, v, t, cfg.rho, cfg.variant, &mut rng) as u64;
                }
                row[idx] = total as f64 / cfg.runs as f64;
            }
            row
        })
        .collect();
    ScoreTable::from_joint(Method::Ticm, net, rows.concat())
}

/// Subcriticality diagnostics: the per-slice spectral proxy `rho * zeta_t`
/// and the mean cascade fraction from seeding every node at slice 1.
#[derive(Debug, Clone, Serialize)]
pub struct SubcriticalityReport {
    pub rho_used: f64,
    /// `rho * zeta(A^(t))` per slice.
    pub spectral_proxy: Vec<f64>,
    pub mean_cascade: f64,
    pub fraction_of_full_graph_reached: f64,
    /// Set when the mean cascade exceeds 10% of N.
    pub supercritical_suspect: bool,
    pub nodes: usize,
    pub runs_per_seed: u32,
}

const SUBCRIT_RUNS: u32 = 100;
const SUBCRIT_SEED: u64 = 0x5eed_cafe;

pub fn subcriticality_check(net: &TemporalNetwork, rho: f64) -> Result<SubcriticalityReport> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::config(format!("rho must lie in (0, 1], got {rho}")));
    }
    let spectral_proxy = (1..=net.t_len())
        .map(|t| {
            crate::network::slice_adjacency(net, t)
                .map(|a| rho * crate::centrality::power::spectral_radius(&a, 1e-8, 50_000))
        })
        .collect::<Result<Vec<_>>>()?;
    let n = net.n();
    let total: u64 = (0..n)
        .into_par_iter()
        .map(|v| {
            let mut acc = 0u64;
            for run in 0..SUBCRIT_RUNS {
                let mut rng = run_rng(SUBCRIT_SEED, v, 1, run);
                acc += simulate_cascade(net, v, 1, rho, CascadeVariant::Persistent, &mut rng)
                    as u64;
            }
            acc
        })
        .sum();
    let mean_cascade = total as f64 / (n as f64 * SUBCRIT_RUNS as f64);
    let fraction = mean_cascade / n as f64;
    Ok(SubcriticalityReport {
        rho_used: rho,
        spectral_proxy,
        mean_cascade,
        fraction_of_full_graph_reached: fraction,
        supercritical_suspect: mean_cascade > 0.1 * n as f64,
        nodes: n,
        runs_per_seed: SUBCRIT_RUNS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::TemporalNetwork;
    use crate::supra::build_w;
    use std::collections::HashMap;

    fn star(k: u32) -> TemporalNetwork {
        let edges: Vec<(u32, u32)> = (1..=k).map(|leaf| (0, leaf)).collect();
        TemporalNetwork::from_parts((k + 1) as usize, vec![0; (k + 1) as usize], 1, vec![edges], None)
            .unwrap()
    }

    #[test]
    fn rho_one_star_infects_all_leaves() {
        let net = star(6);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let size =
                simulate_cascade(&net, 0, 1, 1.0, CascadeVariant::Persistent, &mut rng);
            assert_eq!(size, 7);
        }
    }

    #[test]
    fn isolated_seed_cascade_is_one() {
        let net =
            TemporalNetwork::from_parts(3, vec![0; 3], 1, vec![vec![(1, 2)]], None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(
            simulate_cascade(&net, 0, 1, 1.0, CascadeVariant::Persistent, &mut rng),
            1
        );
    }

    #[test]
    fn star_monte_carlo_mean_matches_analytic_expectation() {
        // star center, one slice: E[size] = 1 + k * rho
        let k = 20u32;
        let rho = 0.3;
        let runs = 20_000u32;
        let net = star(k);
        let mut total = 0u64;
        for run in 0..runs {
            let mut rng = run_rng(99, 0, 1, run);
            total += simulate_cascade(&net, 0, 1, rho, CascadeVariant::Persistent, &mut rng)
                as u64;
        }
        let mean = total as f64 / runs as f64;
        let expect = 1.0 + k as f64 * rho;
        // 3 sigma of the binomial leaf count
        let sigma = (k as f64 * rho * (1.0 - rho) / runs as f64).sqrt();
        assert!(
            (mean - expect).abs() <= 3.0 * sigma,
            "mean {mean} vs {expect} +- {}",
            3.0 * sigma
        );
    }

    #[test]
    fn tri3_deterministic_chain_at_rho_one() {
        let net = TemporalNetwork::from_parts(
            3,
            vec![0; 3],
            1,
            vec![vec![(0, 1)], vec![(1, 2)]],
            None,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            assert_eq!(
                simulate_cascade(&net, 0, 1, 1.0, CascadeVariant::Persistent, &mut rng),
                3
            );
        }
    }

    #[test]
    fn edgeless_scores_are_exactly_one() {
        let net =
            TemporalNetwork::from_parts(3, vec![0; 3], 1, vec![vec![], vec![]], None).unwrap();
        let cfg = CascadeConfig {
            runs: 5,
            ..CascadeConfig::default()
        };
        let table = ticm_scores(&net, &cfg).unwrap();
        for v in 0..3 {
            for t in 1..=2 {
                assert_eq!(table.joint(v, t), 1.0);
            }
        }
    }

    #[test]
    fn two_node_expectation() {
        let net = TemporalNetwork::from_parts(2, vec![0, 0], 1, vec![vec![(0, 1)]], None).unwrap();
        let cfg = CascadeConfig {
            rho: 0.5,
            runs: 40_000,
            rng_seed: 5,
            ..CascadeConfig::default()
        };
        let table = ticm_scores(&net, &cfg).unwrap();
        let sigma = (0.25f64 / cfg.runs as f64).sqrt();
        assert!((table.joint(0, 1) - 1.5).abs() < 4.0 * sigma);
        assert_eq!(table.joint(1, 1), 1.0);
    }

    #[test]
    fn deterministic_across_schedules() {
        let net = TemporalNetwork::from_parts(
            5,
            vec![0; 5],
            1,
            vec![vec![(0, 1), (1, 2), (2, 3)], vec![(3, 4), (4, 0)]],
            None,
        )
        .unwrap();
        let cfg = CascadeConfig {
            rho: 0.4,
            runs: 50,
            rng_seed: 11,
            ..CascadeConfig::default()
        };
        let a = ticm_scores(&net, &cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| ticm_scores(&net, &cfg).unwrap());
        for v in 0..5 {
            for t in 1..=2 {
                assert_eq!(a.joint(v, t), b.joint(v, t));
            }
        }
    }

    /// Coupled-randomness helpers: fixed uniforms per (slice, src, dst).
    fn coupled_uniforms(net: &TemporalNetwork, seed: u64) -> HashMap<(usize, u32, u32), f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut map = HashMap::new();
        for t in 1..=net.t_len() {
            for (u, w) in net.slices()[t - 1].edges() {
                map.insert((t, u, w), rng.gen::<f64>());
            }
        }
        map
    }

    #[test]
    fn cascade_monotone_in_rho_under_coupling() {
        let net = TemporalNetwork::from_parts(
            6,
            vec![0; 6],
            1,
            vec![
                vec![(0, 1), (1, 2), (0, 3)],
                vec![(3, 4), (2, 5), (1, 3)],
                vec![(4, 5), (5, 0)],
            ],
            None,
        )
        .unwrap();
        for seed in 0..40 {
            let uni = coupled_uniforms(&net, seed);
            let mut prev = 0usize;
            for rho in [0.1, 0.3, 0.5, 0.7, 0.9, 1.0] {
                let size = simulate_cascade_with(
                    &net,
                    0,
                    1,
                    CascadeVariant::Persistent,
                    |t, u, w| uni[&(t, u, w)] < rho,
                );
                assert!(size >= prev, "rho {rho}: {size} < {prev}");
                prev = size;
            }
        }
    }

    #[test]
    fn persistent_dominates_reinfection_under_coupling() {
        let net = TemporalNetwork::from_parts(
            6,
            vec![0; 6],
            1,
            vec![
                vec![(0, 1), (1, 2)],
                vec![(1, 3), (2, 4)],
                vec![(0, 5), (3, 5), (4, 0)],
            ],
            None,
        )
        .unwrap();
        for seed in 0..60 {
            let uni = coupled_uniforms(&net, seed);
            for rho in [0.2, 0.5, 0.8] {
                let trial = |t: usize, u: u32, w: u32| uni[&(t, u, w)] < rho;
                let p = simulate_cascade_with(&net, 0, 1, CascadeVariant::Persistent, trial);
                let r = simulate_cascade_with(&net, 0, 1, CascadeVariant::Reinfection, trial);
                assert!(p >= r, "persistent {p} < reinfection {r} at rho {rho}");
            }
        }
    }

    #[test]
    fn cascade_size_bounds() {
        let net = TemporalNetwork::from_parts(
            4,
            vec![0; 4],
            1,
            vec![vec![(0, 1), (1, 2), (2, 3), (3, 0)]],
            None,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for v in 0..4 {
            for variant in [CascadeVariant::Persistent, CascadeVariant::Reinfection] {
                let s = simulate_cascade(&net, v, 1, 0.7, variant, &mut rng);
                assert!((1..=4).contains(&s));
            }
        }
    }

    #[test]
    fn reinfection_allows_second_pass() {
        // a->b slice1, b->a slice2, a->c slice3: at rho=1 reinfection carries
        // the cascade to c because a is reinfected in slice 2
        let net = TemporalNetwork::from_parts(
            3,
            vec![0; 3],
            1,
            vec![vec![(0, 1)], vec![(1, 0)], vec![(0, 2)]],
            None,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let size = simulate_cascade(&net, 0, 1, 1.0, CascadeVariant::Reinfection, &mut rng);
        assert_eq!(size, 3);
        // frontier-only spreading: b alone is infectious in slice 2, and a
        // alone in slice 3 after reinfection
    }

    #[test]
    fn supra_walk_matches_per_slice_at_rho_one() {
        let net = TemporalNetwork::from_parts(
            4,
            vec![0; 4],
            1,
            vec![vec![(0, 1)], vec![(1, 2)], vec![(2, 3)]],
            None,
        )
        .unwrap();
        let w = build_w(&net, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        assert_eq!(simulate_on_supra(&w, 0, 1, &mut rng).unwrap(), 4);
        assert_eq!(simulate_on_supra(&w, 0, 2, &mut rng).unwrap(), 1);
        assert_eq!(simulate_on_supra(&w, 1, 2, &mut rng).unwrap(), 3);
    }

    #[test]
    fn subcriticality_edgeless_not_flagged() {
        let net = TemporalNetwork::from_parts(20, vec![0; 20], 1, vec![vec![]], None).unwrap();
        let report = subcriticality_check(&net, 0.5).unwrap();
        assert_eq!(report.mean_cascade, 1.0);
        assert!((report.fraction_of_full_graph_reached - 1.0 / 20.0).abs() < 1e-12);
        assert!(!report.supercritical_suspect);
        assert_eq!(report.spectral_proxy, vec![0.0]);
    }

    #[test]
    fn subcriticality_complete_graph_flagged() {
        let n = 50u32;
        let mut edges = Vec::new();
        for u in 0..n {
            for w in 0..n {
                if u != w {
                    edges.push((u, w));
                }
            }
        }
        let net =
            TemporalNetwork::from_parts(n as usize, vec![0; n as usize], 1, vec![edges], None)
                .unwrap();
        let report = subcriticality_check(&net, 1.0).unwrap();
        assert_eq!(report.mean_cascade, 50.0);
        assert!(report.supercritical_suspect);
    }
}
