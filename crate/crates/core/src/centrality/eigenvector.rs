//! Temporal eigenvector centrality via the coupled supra-centrality matrix.

use crate::centrality::power::{leading_eigenvector, LinearOp};
use crate::centrality::CentralityConfig;
use crate::error::Result;
use crate::network::{slice_adjacency, TemporalNetwork};
use crate::score::{Method, ScoreTable};
use crate::supra::build_c;

/// Joint scores are the components of the leading right eigenvector of the
/// coupled supra matrix built from the raw slice adjacencies (row = source
/// convention), normalised to sum 1.
///
/// Power iteration runs on the shifted operator `C + cI` with `c` the maximum
/// row sum, which keeps the dominant eigenvector nonnegative for directed
/// input. Directed networks can still assign zero scores to nodes whose only
/// inward edges come from zero-scored nodes; that behaviour is inherent to
/// the method and intentionally left visible.
pub fn temporal_eigenvector(net: &TemporalNetwork, cfg: &CentralityConfig) -> Result<ScoreTable> {
    cfg.validate()?;
    let per_slice = (1..=net.t_len())
        .map(|t| slice_adjacency(net, t))
        .collect::<Result<Vec<_>>>()?;
    let supra = build_c(net, &per_slice, cfg.epsilon)?;
    let shift = supra.matrix().shift_hint();
    let (vector, _) = leading_eigenvector(
        supra.matrix(),
        shift,
        cfg.power_iter_tol,
        cfg.power_iter_max,
    )?;
    ScoreTable::from_joint(Method::Eigenvector, net, supra_to_joint(&vector, net))
}

/// Reshape a layer-major supra vector (T layers) into the node-major joint
/// layout, renormalised to sum 1.
pub(crate) fn supra_to_joint(vector: &[f64], net: &TemporalNetwork) -> Vec<f64> {
    let n = net.n();
    let t = net.t_len();
    debug_assert_eq!(vector.len(), n * t);
    let total: f64 = vector.iter().sum();
    let scale = if total > 0.0 { 1.0 / total } else { 1.0 };
    let mut joint = vec![0.0; n * t];
    for layer in 0..t {
        for v in 0..n {
            joint[v * t + layer] = vector[layer * n + v].max(0.0) * scale;
        }
    }
    joint
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::TemporalNetwork;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;

    fn cfg() -> CentralityConfig {
        CentralityConfig::default()
    }

    /// Dense symmetric eigensolver oracle for the supra matrix of a network
    /// whose slices are all symmetric.
    fn dense_leading_eigvec(net: &TemporalNetwork, epsilon: f64) -> Vec<f64> {
        let n = net.n();
        let t = net.t_len();
        let dim = n * t;
        let mut dense = DMatrix::<f64>::zeros(dim, dim);
        for (k, slice) in net.slices().iter().enumerate() {
            for (u, w) in slice.edges() {
                dense[(k * n + u as usize, k * n + w as usize)] = epsilon;
            }
            if k + 1 < t {
                for v in 0..n {
                    dense[(k * n + v, (k + 1) * n + v)] = 1.0;
                    dense[((k + 1) * n + v, k * n + v)] = 1.0;
                }
            }
        }
        let eig = nalgebra::SymmetricEigen::new(dense);
        let (mut best, mut best_val) = (0, f64::NEG_INFINITY);
        for (i, &val) in eig.eigenvalues.iter().enumerate() {
            if val > best_val {
                best_val = val;
                best = i;
            }
        }
        let col = eig.eigenvectors.column(best);
        let sum: f64 = col.iter().sum();
        let sign = if sum < 0.0 { -1.0 } else { 1.0 };
        let total: f64 = col.iter().map(|x| x * sign).sum();
        col.iter().map(|x| x * sign / total).collect()
    }

    #[test]
    fn single_node_two_layers_splits_evenly() {
        let net = TemporalNetwork::from_parts(1, vec![0], 1, vec![vec![], vec![]], None).unwrap();
        let table = temporal_eigenvector(&net, &cfg()).unwrap();
        assert_abs_diff_eq!(table.joint(0, 1), 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(table.joint(0, 2), 0.5, epsilon = 1e-9);
    }

    #[test]
    fn symmetric_path_graph_matches_dense_oracle() {
        // 4-node undirected path, identical in all three slices
        let path = vec![(0, 1), (1, 0), (1, 2), (2, 1), (2, 3), (3, 2)];
        let net = TemporalNetwork::from_parts(
            4,
            vec![0; 4],
            1,
            vec![path.clone(), path.clone(), path],
            None,
        )
        .unwrap();
        let table = temporal_eigenvector(&net, &cfg()).unwrap();
        let oracle = dense_leading_eigvec(&net, 1.0);
        for layer in 0..3 {
            for v in 0..4 {
                assert_abs_diff_eq!(
                    table.joint(v, layer + 1),
                    oracle[layer * 4 + v],
                    epsilon = 1e-7
                );
            }
        }
        // layer weights symmetric about the middle layer, middle the largest
        let mlc = table.mlc();
        assert_abs_diff_eq!(mlc[0], mlc[2], epsilon = 1e-7);
        assert!(mlc[1] > mlc[0]);
        // within each layer, proportional to the static eigenvector: the two
        // middle path nodes dominate the endpoints
        assert!(table.joint(1, 1) > table.joint(0, 1));
        assert_abs_diff_eq!(table.joint(1, 1), table.joint(2, 1), epsilon = 1e-7);
    }

    #[test]
    fn disconnected_cliques_localise_on_one_community() {
        // a 4-clique and a 2-clique, no inter-community edges; the
        // eigenvector localises on the denser clique
        let mut edges = Vec::new();
        for u in 0..4u32 {
            for w in 0..4u32 {
                if u != w {
                    edges.push((u, w));
                }
            }
        }
        edges.push((4, 5));
        edges.push((5, 4));
        let net = TemporalNetwork::from_parts(
            6,
            vec![0, 0, 0, 0, 1, 1],
            2,
            vec![edges.clone(), edges],
            None,
        )
        .unwrap();
        let table = temporal_eigenvector(&net, &cfg()).unwrap();
        let oracle = dense_leading_eigvec(&net, 1.0);
        for layer in 0..2 {
            for v in 0..6 {
                assert_abs_diff_eq!(
                    table.joint(v, layer + 1),
                    oracle[layer * 6 + v],
                    epsilon = 1e-7
                );
            }
        }
        // all mass on community 0
        let c1_mass: f64 = (0..4).map(|v| table.mnc()[v]).sum();
        assert!(c1_mass > 0.999, "mass on the dominant community: {c1_mass}");
    }

    #[test]
    fn joint_scores_sum_to_one() {
        let net = TemporalNetwork::from_parts(
            3,
            vec![0, 0, 0],
            1,
            vec![vec![(0, 1), (1, 2), (2, 0)], vec![(1, 0)]],
            None,
        )
        .unwrap();
        let table = temporal_eigenvector(&net, &cfg()).unwrap();
        let total: f64 = table.mnc().iter().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
    }
}
