//! The five temporal centrality kernels.
//!
//! Each kernel is a pure function of an immutable network producing a
//! [`ScoreTable`](crate::score::ScoreTable); different methods are safe to run
//! concurrently over the same network.

pub mod closeness;
pub mod degree;
pub mod eigenvector;
pub mod katz;
pub mod pagerank;
pub mod power;

pub use closeness::{closeness_interval, temporal_closeness};
pub use degree::temporal_degree;
pub use eigenvector::temporal_eigenvector;
pub use katz::{temporal_katz, temporal_katz_with_alpha, KatzOutcome};
pub use pagerank::temporal_pagerank;

use crate::error::{Error, Result};

/// Shared numeric knobs for the centrality kernels.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct CentralityConfig {
    /// Inter-layer coupling scale for the supra-centrality matrix.
    pub epsilon: f64,
    /// PageRank teleport complement: `1 - pagerank_p` is the damping mass.
    pub pagerank_p: f64,
    /// Katz attenuation is `1/zeta_max - katz_alpha_margin`.
    pub katz_alpha_margin: f64,
    pub power_iter_tol: f64,
    pub power_iter_max: usize,
}

impl Default for CentralityConfig {
    fn default() -> Self {
        CentralityConfig {
            epsilon: 1.0,
            pagerank_p: 0.85,
            katz_alpha_margin: 1e-2,
            power_iter_tol: 1e-10,
            power_iter_max: 100_000,
        }
    }
}

impl CentralityConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epsilon <= 0.0 {
            return Err(Error::config(format!(
                "epsilon must be > 0, got {}",
                self.epsilon
            )));
        }
        if !(0.0..=1.0).contains(&self.pagerank_p) {
            return Err(Error::config(format!(
                "pagerank_p must lie in [0, 1], got {}",
                self.pagerank_p
            )));
        }
        if self.katz_alpha_margin <= 0.0 || self.power_iter_tol <= 0.0 {
            return Err(Error::config("tolerances must be > 0"));
        }
        if self.power_iter_max == 0 {
            return Err(Error::config("power_iter_max must be >= 1"));
        }
        Ok(())
    }
}
