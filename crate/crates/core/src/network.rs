//! Time-sliced directed networks with community labels.
//!
//! Nodes carry dense internal ids `0..N-1`; the external ids from the input
//! files are kept alongside so every artifact written by downstream modules
//! can reference them. Slice indices are 1-based throughout the public API.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

pub type NodeId = usize;
pub type CommunityId = usize;

/// Influence band label. Band 1 is the highest-influence band, band 3 the
/// lowest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BandId(u8);

impl BandId {
    pub const B1: BandId = BandId(1);
    pub const B2: BandId = BandId(2);
    pub const B3: BandId = BandId(3);

    pub fn new(label: u8) -> Result<Self> {
        if (1..=3).contains(&label) {
            Ok(BandId(label))
        } else {
            Err(Error::invalid_input(format!(
                "band label must be 1, 2 or 3, got {label}"
            )))
        }
    }

    pub fn label(self) -> u8 {
        self.0
    }

    /// Zero-based index, handy for tables indexed `[0..3)`.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn all() -> [BandId; 3] {
        [BandId(1), BandId(2), BandId(3)]
    }
}

impl fmt::Display for BandId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One directed time slice stored as sorted out- and in-adjacency lists.
#[derive(Debug, Clone)]
pub struct SliceGraph {
    out_adj: Vec<Vec<u32>>,
    in_adj: Vec<Vec<u32>>,
    edge_count: usize,
}

impl SliceGraph {
    fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for &(src, dst) in edges {
            if src == dst {
                return Err(Error::invalid_input(format!("self-loop on node {src}")));
            }
            if src as usize >= n || dst as usize >= n {
                return Err(Error::invalid_input(format!(
                    "edge ({src}, {dst}) references a node outside 0..{n}"
                )));
            }
            out_adj[src as usize].push(dst);
            in_adj[dst as usize].push(src);
        }
        for (v, nbrs) in out_adj.iter_mut().enumerate() {
            nbrs.sort_unstable();
            if nbrs.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid_input(format!(
                    "duplicate edge from node {v} within a slice"
                )));
            }
        }
        for nbrs in in_adj.iter_mut() {
            nbrs.sort_unstable();
        }
        Ok(SliceGraph {
            out_adj,
            in_adj,
            edge_count: edges.len(),
        })
    }

    pub fn out_neighbors(&self, v: NodeId) -> &[u32] {
        &self.out_adj[v]
    }

    pub fn in_neighbors(&self, v: NodeId) -> &[u32] {
        &self.in_adj[v]
    }

    pub fn out_degree(&self, v: NodeId) -> usize {
        self.out_adj[v].len()
    }

    pub fn in_degree(&self, v: NodeId) -> usize {
        self.in_adj[v].len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(src, nbrs)| nbrs.iter().map(move |&dst| (src as u32, dst)))
    }
}

/// Ordered sequence of directed time-slice graphs over a fixed node set with
/// community labels, plus optional per-slice ground-truth bands.
#[derive(Debug, Clone)]
pub struct TemporalNetwork {
    node_names: Vec<String>,
    community_names: Vec<String>,
    communities: Vec<CommunityId>,
    slices: Vec<SliceGraph>,
    true_bands: Option<Vec<Vec<BandId>>>,
}

impl TemporalNetwork {
    /// Assemble and validate a network. `slices` is ordered; slice `i` becomes
    /// public slice index `i + 1`. `true_bands`, when given, is `[slice][node]`.
    pub fn new(
        node_names: Vec<String>,
        communities: Vec<CommunityId>,
        community_names: Vec<String>,
        slices: Vec<Vec<(u32, u32)>>,
        true_bands: Option<Vec<Vec<BandId>>>,
    ) -> Result<Self> {
        let n = node_names.len();
        if n == 0 {
            return Err(Error::invalid_input("network has no nodes"));
        }
        if communities.len() != n {
            return Err(Error::invalid_input(
                "every node needs exactly one community label",
            ));
        }
        if let Some(&bad) = communities.iter().find(|&&c| c >= community_names.len()) {
            return Err(Error::invalid_input(format!(
                "community id {bad} has no name entry"
            )));
        }
        if slices.is_empty() {
            return Err(Error::invalid_input("network needs at least one slice"));
        }
        let slices = slices
            .iter()
            .map(|edges| SliceGraph::from_edges(n, edges))
            .collect::<Result<Vec<_>>>()?;
        if let Some(bands) = &true_bands {
            if bands.len() != slices.len() || bands.iter().any(|b| b.len() != n) {
                return Err(Error::invalid_input(
                    "true band table must be slices x nodes",
                ));
            }
        }
        Ok(TemporalNetwork {
            node_names,
            community_names,
            communities,
            slices,
            true_bands,
        })
    }

    /// Convenience constructor for dense ids `0..n` and integer communities,
    /// used heavily in tests and by the generators.
    pub fn from_parts(
        n: usize,
        communities: Vec<CommunityId>,
        n_communities: usize,
        slices: Vec<Vec<(u32, u32)>>,
        true_bands: Option<Vec<Vec<BandId>>>,
    ) -> Result<Self> {
        TemporalNetwork::new(
            (0..n).map(|v| v.to_string()).collect(),
            communities,
            (1..=n_communities).map(|c| c.to_string()).collect(),
            slices,
            true_bands,
        )
    }

    pub fn n(&self) -> usize {
        self.node_names.len()
    }

    /// Number of time slices T.
    pub fn t_len(&self) -> usize {
        self.slices.len()
    }

    pub fn n_communities(&self) -> usize {
        self.community_names.len()
    }

    pub fn community_of(&self, v: NodeId) -> CommunityId {
        self.communities[v]
    }

    pub fn communities(&self) -> &[CommunityId] {
        &self.communities
    }

    pub fn community_name(&self, c: CommunityId) -> &str {
        &self.community_names[c]
    }

    pub fn community_size(&self, c: CommunityId) -> usize {
        self.communities.iter().filter(|&&x| x == c).count()
    }

    pub fn node_name(&self, v: NodeId) -> &str {
        &self.node_names[v]
    }

    pub fn node_names(&self) -> &[String] {
        &self.node_names
    }

    /// Slice by 1-based index.
    pub fn slice(&self, t: usize) -> Result<&SliceGraph> {
        if t == 0 || t > self.slices.len() {
            return Err(Error::invalid_input(format!(
                "slice index {t} out of range 1..={}",
                self.slices.len()
            )));
        }
        Ok(&self.slices[t - 1])
    }

    pub fn slices(&self) -> &[SliceGraph] {
        &self.slices
    }

    pub fn true_bands(&self) -> Option<&Vec<Vec<BandId>>> {
        self.true_bands.as_ref()
    }

    pub fn set_true_bands(&mut self, bands: Option<Vec<Vec<BandId>>>) {
        self.true_bands = bands;
    }

    pub fn total_edges(&self) -> usize {
        self.slices.iter().map(|s| s.edge_count()).sum()
    }
}

/// Adjacency matrix of slice `t` (1-based): entry `(u, v) = 1` iff edge
/// `u -> v` exists. Row = source, column = destination, fixed project-wide.
pub fn slice_adjacency(net: &TemporalNetwork, t: usize) -> Result<CsrMatrix> {
    let slice = net.slice(t)?;
    let triplets = slice.edges().map(|(u, v)| (u, v, 1.0)).collect();
    Ok(CsrMatrix::from_triplets(net.n(), triplets))
}

/// Orders slice tokens the way the loader does: numerically when every token
/// parses as an integer, lexicographically otherwise.
fn order_slice_tokens(mut tokens: Vec<String>) -> Vec<String> {
    if tokens.iter().all(|s| s.parse::<i64>().is_ok()) {
        tokens.sort_by_key(|s| s.parse::<i64>().unwrap());
    } else {
        tokens.sort();
    }
    tokens
}

/// Load a network from an edge file (`slice<TAB>src<TAB>dst` per row) and a
/// metadata file (CSV `node,community[,band_t1..band_tT]`).
///
/// External node ids are remapped to dense `0..N-1` in metadata row order and
/// the mapping is kept on the returned network. Slice tokens may be arbitrary;
/// they are sorted (numerically when possible) and remapped to `1..T`.
pub fn load_temporal_network(
    edge_file: impl AsRef<Path>,
    meta_file: impl AsRef<Path>,
) -> Result<TemporalNetwork> {
    let meta = BufReader::new(File::open(meta_file.as_ref())?);
    let mut node_names: Vec<String> = Vec::new();
    let mut node_index: HashMap<String, u32> = HashMap::new();
    let mut community_names: Vec<String> = Vec::new();
    let mut community_index: HashMap<String, CommunityId> = HashMap::new();
    let mut communities: Vec<CommunityId> = Vec::new();
    let mut band_rows: Vec<Vec<BandId>> = Vec::new();
    let mut band_cols: Option<usize> = None;

    for (lineno, line) in meta.lines().enumerate() {
        let line = line?;
        let row = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if row == 1 && trimmed.starts_with("node") {
            continue; // header
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if fields.len() < 2 || fields[1].is_empty() {
            return Err(Error::invalid_input(format!(
                "{}:{row}: missing community label",
                meta_file.as_ref().display()
            )));
        }
        let name = fields[0].to_string();
        if node_index.contains_key(&name) {
            return Err(Error::invalid_input(format!(
                "{}:{row}: duplicate node id {name:?}",
                meta_file.as_ref().display()
            )));
        }
        node_index.insert(name.clone(), node_names.len() as u32);
        node_names.push(name);
        let community = fields[1].to_string();
        let cid = *community_index.entry(community.clone()).or_insert_with(|| {
            community_names.push(community);
            community_names.len() - 1
        });
        communities.push(cid);

        let bands = &fields[2..];
        match band_cols {
            None => band_cols = Some(bands.len()),
            Some(k) if k != bands.len() => {
                return Err(Error::invalid_input(format!(
                    "{}:{row}: expected {k} band columns, found {}",
                    meta_file.as_ref().display(),
                    bands.len()
                )))
            }
            _ => {}
        }
        let parsed = bands
            .iter()
            .map(|s| {
                s.parse::<u8>()
                    .map_err(|_| Error::invalid_input(format!("bad band label {s:?}")))
                    .and_then(BandId::new)
            })
            .collect::<Result<Vec<_>>>()
            .map_err(|e| {
                Error::invalid_input(format!("{}:{row}: {e}", meta_file.as_ref().display()))
            })?;
        band_rows.push(parsed);
    }
    if node_names.is_empty() {
        return Err(Error::invalid_input("metadata file defines no nodes"));
    }

    let edges = BufReader::new(File::open(edge_file.as_ref())?);
    // slice token -> edge list, plus row numbers for error reporting
    let mut by_slice: HashMap<String, Vec<(u32, u32, usize)>> = HashMap::new();
    for (lineno, line) in edges.lines().enumerate() {
        let line = line?;
        let row = lineno + 1;
        let trimmed = line.trim_end();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::invalid_input(format!(
                "{}:{row}: expected `slice<TAB>src<TAB>dst`",
                edge_file.as_ref().display()
            )));
        }
        let lookup = |name: &str| {
            node_index.get(name).copied().ok_or_else(|| {
                Error::invalid_input(format!(
                    "{}:{row}: unknown node {name:?} (not in metadata)",
                    edge_file.as_ref().display()
                ))
            })
        };
        let src = lookup(fields[1])?;
        let dst = lookup(fields[2])?;
        if src == dst {
            return Err(Error::invalid_input(format!(
                "{}:{row}: self-loop on node {:?}",
                edge_file.as_ref().display(),
                fields[1]
            )));
        }
        by_slice
            .entry(fields[0].to_string())
            .or_default()
            .push((src, dst, row));
    }
    if by_slice.is_empty() {
        return Err(Error::invalid_input("edge file defines no slices"));
    }

    let ordered = order_slice_tokens(by_slice.keys().cloned().collect());
    if let Some(k) = band_cols {
        if k != 0 && k != ordered.len() {
            return Err(Error::invalid_input(format!(
                "metadata has {k} band columns but the edge file has {} slices",
                ordered.len()
            )));
        }
    }

    let mut slices = Vec::with_capacity(ordered.len());
    for token in &ordered {
        let mut rows = by_slice.remove(token).unwrap();
        rows.sort_unstable();
        if let Some(w) = rows.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::invalid_input(format!(
                "{}:{}: duplicate edge within slice {token:?}",
                edge_file.as_ref().display(),
                w[1].2
            )));
        }
        slices.push(rows.into_iter().map(|(s, d, _)| (s, d)).collect());
    }

    let true_bands = match band_cols {
        Some(k) if k > 0 => {
            // transpose node-major rows to slice-major
            let t = k;
            let mut per_slice = vec![Vec::with_capacity(node_names.len()); t];
            for row in &band_rows {
                for (slice, &b) in row.iter().enumerate() {
                    per_slice[slice].push(b);
                }
            }
            Some(per_slice)
        }
        _ => None,
    };

    TemporalNetwork::new(node_names, communities, community_names, slices, true_bands)
}

/// Write the network back out in the loader's formats.
pub fn save_temporal_network(
    net: &TemporalNetwork,
    edge_file: impl AsRef<Path>,
    meta_file: impl AsRef<Path>,
) -> Result<()> {
    let mut edges = BufWriter::new(File::create(edge_file.as_ref())?);
    for (i, slice) in net.slices().iter().enumerate() {
        let t = i + 1;
        for (src, dst) in slice.edges() {
            writeln!(
                edges,
                "{t}\t{}\t{}",
                net.node_name(src as usize),
                net.node_name(dst as usize)
            )?;
        }
    }
    edges.flush()?;

    let mut meta = BufWriter::new(File::create(meta_file.as_ref())?);
    write!(meta, "node,community")?;
    if net.true_bands().is_some() {
        for t in 1..=net.t_len() {
            write!(meta, ",band_t{t}")?;
        }
    }
    writeln!(meta)?;
    for v in 0..net.n() {
        write!(
            meta,
            "{},{}",
            net.node_name(v),
            net.community_name(net.community_of(v))
        )?;
        if let Some(bands) = net.true_bands() {
            for slice in bands {
                write!(meta, ",{}", slice[v])?;
            }
        }
        writeln!(meta)?;
    }
    meta.flush()?;
    Ok(())
}
