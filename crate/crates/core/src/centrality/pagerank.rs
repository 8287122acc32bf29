//! Temporal PageRank through the coupled supra-centrality operator.
//!
//! The per-slice matrix is `C^(t) = p * A^(t)^T * D^-1 + (1 - p)/N * 1 1^T`
//! with `D` the out-degree diagonal after giving every sink a single
//! self-edge. Every column sums to exactly 1. The dense teleport term is
//! applied implicitly during matvec, so memory stays proportional to the
//! edge count.

use crate::centrality::power::{leading_eigenvector, LinearOp};
use crate::centrality::CentralityConfig;
use crate::error::Result;
use crate::network::TemporalNetwork;
use crate::score::{Method, ScoreTable};
use crate::sparse::CsrMatrix;

/// The sparse part `p * A^T * D^-1` of one slice's PageRank matrix,
/// including the self-edge patch for zero-out-degree nodes. Column `v` holds
/// node `v`'s outgoing probability mass; each column sums to exactly `p`.
pub fn stochastic_part(net: &TemporalNetwork, t: usize, p: f64) -> Result<CsrMatrix> {
    let slice = net.slice(t)?;
    let n = net.n();
    let mut triplets = Vec::with_capacity(slice.edge_count() + n);
    for v in 0..n {
        let out = slice.out_neighbors(v);
        if out.is_empty() {
            triplets.push((v as u32, v as u32, p));
        } else {
            let share = p / out.len() as f64;
            for &w in out {
                triplets.push((w, v as u32, share));
            }
        }
    }
    Ok(CsrMatrix::from_triplets(n, triplets))
}

/// One full column of `C^(t)`, materialised densely. Intended for small
/// fixtures and verification; production paths never build this.
pub fn slice_column(net: &TemporalNetwork, t: usize, p: f64, v: usize) -> Result<Vec<f64>> {
    let part = stochastic_part(net, t, p)?;
    let n = net.n();
    let teleport = (1.0 - p) / n as f64;
    let mut col = vec![teleport; n];
    for (r, c, val) in part.triplets() {
        if c == v {
            col[r] += val;
        }
    }
    Ok(col)
}

/// The coupled supra operator with PageRank blocks: diagonal blocks
/// `eps * C^(t)` and identity coupling between adjacent layers.
pub(crate) struct PagerankSupra {
    n: usize,
    t: usize,
    epsilon: f64,
    teleport: f64,
    blocks: Vec<CsrMatrix>,
}

impl PagerankSupra {
    pub(crate) fn new(net: &TemporalNetwork, cfg: &CentralityConfig) -> Result<Self> {
        let blocks = (1..=net.t_len())
            .map(|t| stochastic_part(net, t, cfg.pagerank_p))
            .collect::<Result<Vec<_>>>()?;
        Ok(PagerankSupra {
            n: net.n(),
            t: net.t_len(),
            epsilon: cfg.epsilon,
            teleport: (1.0 - cfg.pagerank_p) / net.n() as f64,
            blocks,
        })
    }
}

impl LinearOp for PagerankSupra {
    fn dim(&self) -> usize {
        self.n * self.t
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.n;
        for (k, block) in self.blocks.iter().enumerate() {
            let xk = &x[k * n..(k + 1) * n];
            let yk = &mut y[k * n..(k + 1) * n];
            block.matvec(xk, yk);
            let mass: f64 = xk.iter().sum();
            let boost = self.teleport * mass;
            for yi in yk.iter_mut() {
                *yi = self.epsilon * (*yi + boost);
            }
        }
        // identity coupling to the previous and next layer
        for k in 0..self.t {
            for v in 0..n {
                let mut c = 0.0;
                if k > 0 {
                    c += x[(k - 1) * n + v];
                }
                if k + 1 < self.t {
                    c += x[(k + 1) * n + v];
                }
                y[k * n + v] += c;
            }
        }
    }

    fn shift_hint(&self) -> f64 {
        let rank_one_row = self.teleport * self.n as f64;
        let block_max = self
            .blocks
            .iter()
            .map(|b| b.max_row_sum())
            .fold(0.0, f64::max);
        self.epsilon * (block_max + rank_one_row) + 2.0
    }
}

/// Temporal PageRank: leading eigenvector of the coupled supra operator,
/// normalised to sum 1.
pub fn temporal_pagerank(net: &TemporalNetwork, cfg: &CentralityConfig) -> Result<ScoreTable> {
    cfg.validate()?;
    let op = PagerankSupra::new(net, cfg)?;
    let shift = op.shift_hint();
    let (vector, _) = leading_eigenvector(&op, shift, cfg.power_iter_tol, cfg.power_iter_max)?;
    ScoreTable::from_joint(
        Method::PageRank,
        net,
        super::eigenvector::supra_to_joint(&vector, net),
    )
}
