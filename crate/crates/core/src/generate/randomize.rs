//! Configuration-model randomizer for two-community networks.
//!
//! Each slice is rebuilt independently from four per-node stub classes:
//! in-community in/out stubs and inter-community in/out stubs. Communities
//! are rebuilt separately from their in-community stubs, then connected by
//! matching community 1's inter out-stubs to community 2's inter in-stubs
//! and vice versa. All four per-node stub counts are preserved exactly.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::stubs::match_directed;
use crate::error::{Error, Result};
use crate::network::{TemporalNetwork};

/// Per-node directed stub counts for one slice, split by edge class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StubLedger {
    pub intra_out: Vec<u32>,
    pub intra_in: Vec<u32>,
    pub inter_out: Vec<u32>,
    pub inter_in: Vec<u32>,
}

impl StubLedger {
    fn community_total(&self, net: &TemporalNetwork, c: usize, of: &[u32]) -> u64 {
        (0..net.n())
            .filter(|&v| net.community_of(v) == c)
            .map(|v| of[v] as u64)
            .sum()
    }
}

/// Count the four stub classes of one slice (1-based).
pub fn stub_ledger(net: &TemporalNetwork, t: usize) -> Result<StubLedger> {
    if net.n_communities() != 2 {
        return Err(Error::invalid_input(format!(
            "configuration randomizer needs exactly two communities, got {}",
            net.n_communities()
        )));
    }
    let slice = net.slice(t)?;
    let n = net.n();
    let mut ledger = StubLedger {
        intra_out: vec![0; n],
        intra_in: vec![0; n],
        inter_out: vec![0; n],
        inter_in: vec![0; n],
    };
    for (u, w) in slice.edges() {
        if net.community_of(u as usize) == net.community_of(w as usize) {
            ledger.intra_out[u as usize] += 1;
            ledger.intra_in[w as usize] += 1;
        } else {
            ledger.inter_out[u as usize] += 1;
            ledger.inter_in[w as usize] += 1;
        }
    }
    Ok(ledger)
}

/// Randomize every slice with the four-way configuration model. Node ids,
/// community labels and true bands are carried over; every node keeps its
/// four stub counts in every slice.
pub fn config_randomize(net: &TemporalNetwork, rng_seed: u64) -> Result<TemporalNetwork> {
    if net.n_communities() != 2 {
        return Err(Error::invalid_input(format!(
            "configuration randomizer needs exactly two communities, got {}",
            net.n_communities()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let n = net.n();
    let members: [Vec<u32>; 2] = [
        (0..n as u32).filter(|&v| net.community_of(v as usize) == 0).collect(),
        (0..n as u32).filter(|&v| net.community_of(v as usize) == 1).collect(),
    ];

    let mut slices = Vec::with_capacity(net.t_len());
    for t in 1..=net.t_len() {
        let ledger = stub_ledger(net, t)?;
        debug_assert_eq!(
            ledger.community_total(net, 0, &ledger.intra_out),
            ledger.community_total(net, 0, &ledger.intra_in)
        );
        let mut edges: Vec<(u32, u32)> = Vec::with_capacity(net.slice(t)?.edge_count());

        // rebuild each community from its in-community stubs
        for community in &members {
            let mut out_stubs = Vec::new();
            let mut in_stubs = Vec::new();
            for &v in community {
                out_stubs.extend(std::iter::repeat(v).take(ledger.intra_out[v as usize] as usize));
                in_stubs.extend(std::iter::repeat(v).take(ledger.intra_in[v as usize] as usize));
            }
            edges.extend(match_directed(&out_stubs, &in_stubs, true, &mut rng)?);
        }

        // connect the communities: out-stubs of one side to in-stubs of the
        // other, in both directions
        for (from, to) in [(0usize, 1usize), (1, 0)] {
            let mut out_stubs = Vec::new();
            let mut in_stubs = Vec::new();
            for &v in &members[from] {
                out_stubs.extend(std::iter::repeat(v).take(ledger.inter_out[v as usize] as usize));
            }
            for &v in &members[to] {
                in_stubs.extend(std::iter::repeat(v).take(ledger.inter_in[v as usize] as usize));
            }
            edges.extend(match_directed(&out_stubs, &in_stubs, false, &mut rng)?);
        }

        edges.sort_unstable();
        slices.push(edges);
    }

    TemporalNetwork::new(
        net.node_names().to_vec(),
        net.communities().to_vec(),
        (0..2).map(|c| net.community_name(c).to_string()).collect(),
        slices,
        net.true_bands().cloned(),
    )
}
