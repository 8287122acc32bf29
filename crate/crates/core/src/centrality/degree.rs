//! Temporal degree centrality.

use crate::error::Result;
use crate::network::TemporalNetwork;
use crate::score::{Method, ScoreTable};

/// Per-slice degree score: `(in-degree + out-degree) / (2 * (N - 1))`, the
/// normalisation that makes a node incident to every possible edge in a slice
/// score exactly 1. Inter-layer self-links are not part of the slice graphs
/// and therefore never counted.
pub fn temporal_degree(net: &TemporalNetwork) -> Result<ScoreTable> {
    let n = net.n();
    let t = net.t_len();
    let denom = if n > 1 { 2.0 * (n as f64 - 1.0) } else { 1.0 };
    let mut joint = vec![0.0; n * t];
    for (k, slice) in net.slices().iter().enumerate() {
        for v in 0..n {
            joint[v * t + k] = (slice.in_degree(v) + slice.out_degree(v)) as f64 / denom;
        }
    }
    ScoreTable::from_joint(Method::Degree, net, joint)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::TemporalNetwork;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_inbound_edges_on_three_nodes() {
        let net =
            TemporalNetwork::from_parts(3, vec![0, 0, 0], 1, vec![vec![(0, 1), (2, 1)]], None)
                .unwrap();
        let table = temporal_degree(&net).unwrap();
        assert_abs_diff_eq!(table.joint(1, 1), 0.5);
        assert_abs_diff_eq!(table.joint(0, 1), 0.25);
    }

    #[test]
    fn isolated_node_scores_zero() {
        let net =
            TemporalNetwork::from_parts(3, vec![0, 0, 0], 1, vec![vec![(0, 1)]], None).unwrap();
        let table = temporal_degree(&net).unwrap();
        assert_eq!(table.joint(2, 1), 0.0);
    }

    #[test]
    fn fully_incident_node_scores_one() {
        // node 0 has an edge to and from every other node: 2(N-1) incidences
        let n = 4u32;
        let mut edges = Vec::new();
        for v in 1..n {
            edges.push((0, v));
            edges.push((v, 0));
        }
        let net =
            TemporalNetwork::from_parts(n as usize, vec![0; n as usize], 1, vec![edges], None)
                .unwrap();
        let table = temporal_degree(&net).unwrap();
        assert_abs_diff_eq!(table.joint(0, 1), 1.0);
    }

    #[test]
    fn static_symmetric_ranking_matches_degree_ranking() {
        // same symmetric graph in every slice: MNC order == static degree order
        let sym = vec![(0, 1), (1, 0), (1, 2), (2, 1), (1, 3), (3, 1), (2, 3), (3, 2)];
        let net = TemporalNetwork::from_parts(
            4,
            vec![0; 4],
            1,
            vec![sym.clone(), sym.clone(), sym],
            None,
        )
        .unwrap();
        let table = temporal_degree(&net).unwrap();
        let mut order: Vec<usize> = (0..4).collect();
        order.sort_by(|&a, &b| table.mnc()[b].partial_cmp(&table.mnc()[a]).unwrap());
        // static degrees: node1 = 3, node2 = node3 = 2, node0 = 1
        assert_eq!(order[0], 1);
        assert_eq!(order[3], 0);
    }
}
