//! Temporal closeness centrality over time-respecting paths.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::network::TemporalNetwork;
use crate::score::{Method, ScoreTable};

/// Closeness of node `v` starting at slice `t`:
/// `joint[v,t] = sum over u != v of 1 / dist(v, u)` where `dist` counts the
/// layer transitions of the earliest time-respecting path that leaves `v` at
/// layer `t - 1` and reaches `u` at any layer up to T. A direct neighbour
/// reached through slice `t` has distance 1; unreachable nodes contribute 0.
///
/// A node stays reachable once reached (inter-layer self-links), so the
/// search keeps the whole reached set active and expands it through each
/// subsequent slice's edges.
pub fn temporal_closeness(net: &TemporalNetwork) -> Result<ScoreTable> {
    let n = net.n();
    let t_len = net.t_len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|v| (1..=t_len).map(|t| closeness_from(net, v, t)).collect())
        .collect();
    ScoreTable::from_joint(Method::Closeness, net, rows.concat())
}

fn closeness_from(net: &TemporalNetwork, v: usize, t: usize) -> f64 {
    let n = net.n();
    let t_len = net.t_len();
    let mut reached = vec![false; n];
    let mut reached_list = Vec::with_capacity(64);
    reached[v] = true;
    reached_list.push(v as u32);
    let mut score = 0.0;
    let mut new_nodes = Vec::new();
    for (hops, slice_idx) in (t..=t_len).enumerate() {
        let slice = &net.slices()[slice_idx - 1];
        new_nodes.clear();
        for &u in &reached_list {
            for &w in slice.out_neighbors(u as usize) {
                if !reached[w as usize] {
                    reached[w as usize] = true;
                    new_nodes.push(w);
                }
            }
        }
        if new_nodes.is_empty() {
            continue;
        }
        score += new_nodes.len() as f64 / (hops + 1) as f64;
        reached_list.extend_from_slice(&new_nodes);
    }
    score
}

/// Interval closeness: the start times `i..j-1` of a joint table summed per
/// node. Requires `1 <= i < j <= T`.
pub fn closeness_interval(table: &ScoreTable, i: usize, j: usize) -> Result<Vec<f64>> {
    if i == 0 || i >= j || j > table.t_len() {
        return Err(Error::invalid_input(format!(
            "interval [{i}, {j}] is not within 1..={}",
            table.t_len()
        )));
    }
    Ok((0..table.n())
        .map(|v| (i..j).map(|t| table.joint(v, t)).sum())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::TemporalNetwork;
    use approx::assert_abs_diff_eq;

    /// Three nodes; slice 1 has a->b, slice 2 has b->c.
    fn tri3() -> TemporalNetwork {
        TemporalNetwork::from_parts(
            3,
            vec![0, 0, 0],
            1,
            vec![vec![(0, 1)], vec![(1, 2)]],
            None,
        )
        .unwrap()
    }

    #[test]
    fn tri3_exhaustive_distances() {
        let table = temporal_closeness(&tri3()).unwrap();
        // from a at t=1: b at 1 transition, c at 2
        assert_abs_diff_eq!(table.joint(0, 1), 1.0 + 0.5);
        // from a at t=2: a has no outgoing edge in slice 2
        assert_abs_diff_eq!(table.joint(0, 2), 0.0);
        // from b at t=1: c via slice 2 at distance 2
        assert_abs_diff_eq!(table.joint(1, 1), 0.5);
        // from b at t=2: c at distance 1
        assert_abs_diff_eq!(table.joint(1, 2), 1.0);
        assert_abs_diff_eq!(table.joint(2, 1), 0.0);
    }

    #[test]
    fn edgeless_network_scores_zero_everywhere() {
        let net =
            TemporalNetwork::from_parts(4, vec![0; 4], 1, vec![vec![], vec![]], None).unwrap();
        let table = temporal_closeness(&net).unwrap();
        for v in 0..4 {
            for t in 1..=2 {
                assert_eq!(table.joint(v, t), 0.0);
            }
        }
    }

    #[test]
    fn complete_directed_single_slice() {
        let n = 5usize;
        let mut edges = Vec::new();
        for u in 0..n as u32 {
            for w in 0..n as u32 {
                if u != w {
                    edges.push((u, w));
                }
            }
        }
        let net = TemporalNetwork::from_parts(n, vec![0; n], 1, vec![edges], None).unwrap();
        let table = temporal_closeness(&net).unwrap();
        for v in 0..n {
            assert_abs_diff_eq!(table.joint(v, 1), (n - 1) as f64);
        }
    }

    #[test]
    fn interval_score_sums_start_times() {
        let table = temporal_closeness(&tri3()).unwrap();
        let c = closeness_interval(&table, 1, 2).unwrap();
        assert_abs_diff_eq!(c[0], table.joint(0, 1));
        assert!(closeness_interval(&table, 2, 2).is_err());
        assert!(closeness_interval(&table, 0, 2).is_err());
        assert!(closeness_interval(&table, 1, 3).is_err());
    }

    #[test]
    fn permutation_equivariance() {
        // relabel nodes of tri3 by the permutation 0->2, 1->0, 2->1
        let permuted = TemporalNetwork::from_parts(
            3,
            vec![0, 0, 0],
            1,
            vec![vec![(2, 0)], vec![(0, 1)]],
            None,
        )
        .unwrap();
        let base = temporal_closeness(&tri3()).unwrap();
        let perm = temporal_closeness(&permuted).unwrap();
        let map = [2usize, 0, 1];
        for v in 0..3 {
            for t in 1..=2 {
                assert_abs_diff_eq!(base.joint(v, t), perm.joint(map[v], t));
            }
        }
    }
}
