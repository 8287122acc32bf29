//! Block supra-matrices encoding temporal structure.
//!
//! Three layouts are built here:
//!
//! * the layered walk matrix with `A + I` blocks on the first
//!   superdiagonal and a trailing all-zero layer (degree/closeness semantics:
//!   arriving at layer k means being present for slice k),
//! * the coupled centrality matrix with `eps * C` diagonal blocks and
//!   identity coupling on the super- and sub-diagonals,
//! * the cascade probability matrix with `rho * A + I` superdiagonal blocks
//!   (the added identity keeps previously infected nodes infectious).
//!
//! Supra index convention: layer-major, `(layer, node) -> layer * N + node`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use flate2::write::GzEncoder;
use flate2::Compression;

use crate::error::{Error, Result};
use crate::network::TemporalNetwork;
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupraKind {
    /// Upper-block-bidiagonal walk matrix over T+1 layers.
    KimAndersonM,
    /// Block-tridiagonal coupled centrality matrix over T layers.
    TaylorEpsC,
    /// Upper-block-bidiagonal cascade matrix over T+1 layers.
    CascadeW,
}

/// A sparse block supra-matrix with its layout metadata.
#[derive(Debug, Clone)]
pub struct SupraMatrix {
    kind: SupraKind,
    block_dim: usize,
    layers: usize,
    epsilon: Option<f64>,
    rho: Option<f64>,
    matrix: CsrMatrix,
}

impl SupraMatrix {
    pub fn kind(&self) -> SupraKind {
        self.kind
    }

    /// Number of nodes per layer (N).
    pub fn block_dim(&self) -> usize {
        self.block_dim
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn epsilon(&self) -> Option<f64> {
        self.epsilon
    }

    pub fn rho(&self) -> Option<f64> {
        self.rho
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Flat index of (layer, node); layers are 0-based here.
    pub fn index(&self, layer: usize, node: usize) -> usize {
        debug_assert!(layer < self.layers && node < self.block_dim);
        layer * self.block_dim + node
    }

    /// Debug dump as gzip-compressed `row col value` triplets.
    pub fn dump_triplets_gz(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = File::create(path.as_ref())?;
        let mut w = BufWriter::new(GzEncoder::new(file, Compression::default()));
        for (r, c, v) in self.matrix.triplets() {
            writeln!(w, "{r} {c} {v}")?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Layered walk matrix over T+1 layers: block (k, k+1) = `A^(k+1) + I`,
/// last block row all zero.
pub fn build_m(net: &TemporalNetwork) -> SupraMatrix {
    let n = net.n();
    let t = net.t_len();
    let dim = n * (t + 1);
    let mut triplets = Vec::with_capacity(net.total_edges() + n * t);
    for k in 0..t {
        let base_row = (k * n) as u32;
        let base_col = ((k + 1) * n) as u32;
        for v in 0..n as u32 {
            triplets.push((base_row + v, base_col + v, 1.0));
        }
        for (src, dst) in net.slices()[k].edges() {
            triplets.push((base_row + src, base_col + dst, 1.0));
        }
    }
    SupraMatrix {
        kind: SupraKind::KimAndersonM,
        block_dim: n,
        layers: t + 1,
        epsilon: None,
        rho: None,
        matrix: CsrMatrix::from_triplets(dim, triplets),
    }
}

/// Coupled centrality matrix over T layers: `eps * C^(t)` on the diagonal,
/// identity blocks on the super- and sub-diagonal. The boundary layers get
/// one-sided coupling only.
pub fn build_c(net: &TemporalNetwork, per_slice: &[CsrMatrix], epsilon: f64) -> Result<SupraMatrix> {
    if epsilon <= 0.0 {
        return Err(Error::config(format!("epsilon must be > 0, got {epsilon}")));
    }
    let n = net.n();
    let t = net.t_len();
    if per_slice.len() != t {
        return Err(Error::invalid_input(format!(
            "expected {t} per-slice matrices, got {}",
            per_slice.len()
        )));
    }
    if let Some(m) = per_slice.iter().find(|m| m.dim() != n) {
        return Err(Error::invalid_input(format!(
            "per-slice matrix has dimension {}, expected {n}",
            m.dim()
        )));
    }
    let dim = n * t;
    let mut triplets = Vec::new();
    for (k, block) in per_slice.iter().enumerate() {
        let base = (k * n) as u32;
        for (r, c, v) in block.triplets() {
            triplets.push((base + r as u32, base + c as u32, epsilon * v));
        }
        if k + 1 < t {
            let next = ((k + 1) * n) as u32;
            for v in 0..n as u32 {
                triplets.push((base + v, next + v, 1.0));
                triplets.push((next + v, base + v, 1.0));
            }
        }
    }
    Ok(SupraMatrix {
        kind: SupraKind::TaylorEpsC,
        block_dim: n,
        layers: t,
        epsilon: Some(epsilon),
        rho: None,
        matrix: CsrMatrix::from_triplets(dim, triplets),
    })
}

/// Cascade probability matrix over T+1 layers: block (k, k+1) =
/// `rho * A^(k+1) + I`.
pub fn build_w(net: &TemporalNetwork, rho: f64) -> Result<SupraMatrix> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::config(format!("rho must lie in (0, 1], got {rho}")));
    }
    let n = net.n();
    let t = net.t_len();
    let dim = n * (t + 1);
    let mut triplets = Vec::with_capacity(net.total_edges() + n * t);
    for k in 0..t {
        let base_row = (k * n) as u32;
        let base_col = ((k + 1) * n) as u32;
        for v in 0..n as u32 {
            triplets.push((base_row + v, base_col + v, 1.0));
        }
        for (src, dst) in net.slices()[k].edges() {
            triplets.push((base_row + src, base_col + dst, rho));
        }
    }
    Ok(SupraMatrix {
        kind: SupraKind::CascadeW,
        block_dim: n,
        layers: t + 1,
        epsilon: None,
        rho: Some(rho),
        matrix: CsrMatrix::from_triplets(dim, triplets),
    })
}
