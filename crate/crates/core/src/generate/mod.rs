//! Synthetic polarised temporal networks with planted influence bands, and
//! the community-preserving configuration-model randomizer.

mod randomize;
mod stubs;

pub use randomize::{config_randomize, stub_ledger, StubLedger};

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{BandId, TemporalNetwork};

/// Degree law of one band within one community.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DegreeLaw {
    /// Every node gets exactly this total degree.
    Fixed(u32),
    /// Node degrees drawn from a Poisson distribution with this mean.
    Poisson(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandSpec {
    pub count: usize,
    pub law: DegreeLaw,
}

/// Declarative parameters for building a two-community banded temporal
/// network: three bands per community, a fixed number of inter-community
/// edges, and the per-step swap and rewire fractions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    /// `communities[c][b]` is band `b + 1` of community `c + 1`.
    pub communities: [[BandSpec; 3]; 2],
    pub inter_edges: usize,
    pub slices: usize,
    pub swap_fraction: f64,
    pub rewire_fraction: f64,
    pub rng_seed: u64,
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        for (c, bands) in self.communities.iter().enumerate() {
            let size: usize = bands.iter().map(|b| b.count).sum();
            for (b, band) in bands.iter().enumerate() {
                if band.count == 0 {
                    return Err(Error::config(format!(
                        "community {} band {} has no nodes",
                        c + 1,
                        b + 1
                    )));
                }
                match band.law {
                    DegreeLaw::Fixed(d) => {
                        if d as usize >= size {
                            return Err(Error::config(format!(
                                "fixed degree {d} infeasible in a community of {size} nodes"
                            )));
                        }
                    }
                    DegreeLaw::Poisson(lambda) => {
                        if !(lambda >= 0.0 && lambda.is_finite()) {
                            return Err(Error::config(format!("bad poisson mean {lambda}")));
                        }
                    }
                }
            }
        }
        let (n1, n2) = (self.community_size(0), self.community_size(1));
        if self.inter_edges > n1 * n2 {
            return Err(Error::config(format!(
                "inter_edges {} exceeds {n1} x {n2}",
                self.inter_edges
            )));
        }
        if !(0.0..=1.0).contains(&self.swap_fraction)
            || !(0.0..=1.0).contains(&self.rewire_fraction)
        {
            return Err(Error::config("fractions must lie in [0, 1]"));
        }
        if self.slices == 0 {
            return Err(Error::config("need at least one slice"));
        }
        Ok(())
    }

    pub fn community_size(&self, c: usize) -> usize {
        self.communities[c].iter().map(|b| b.count).sum()
    }

    pub fn n(&self) -> usize {
        self.community_size(0) + self.community_size(1)
    }

    /// Parse the declarative config format: top-level key/value pairs plus
    /// one `[communityK.bandB]` section per band.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawSpec =
            toml::from_str(text).map_err(|e| Error::config(format!("bad generator spec: {e}")))?;
        let spec = GeneratorSpec {
            communities: [raw.community1.into_bands()?, raw.community2.into_bands()?],
            inter_edges: raw.inter_edges,
            slices: raw.slices,
            swap_fraction: raw.swap_fraction,
            rewire_fraction: raw.rewire_fraction,
            rng_seed: raw.seed,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Deserialize)]
struct RawSpec {
    slices: usize,
    inter_edges: usize,
    #[serde(default = "default_fraction")]
    swap_fraction: f64,
    #[serde(default = "default_fraction")]
    rewire_fraction: f64,
    #[serde(default)]
    seed: u64,
    community1: RawCommunity,
    community2: RawCommunity,
}

fn default_fraction() -> f64 {
    0.10
}

#[derive(Deserialize)]
struct RawCommunity {
    band1: RawBand,
    band2: RawBand,
    band3: RawBand,
}

impl RawCommunity {
    fn into_bands(self) -> Result<[BandSpec; 3]> {
        Ok([
            self.band1.into_spec()?,
            self.band2.into_spec()?,
            self.band3.into_spec()?,
        ])
    }
}

#[derive(Deserialize)]
struct RawBand {
    count: usize,
    fixed: Option<u32>,
    poisson: Option<f64>,
}

impl RawBand {
    fn into_spec(self) -> Result<BandSpec> {
        let law = match (self.fixed, self.poisson) {
            (Some(d), None) => DegreeLaw::Fixed(d),
            (None, Some(l)) => DegreeLaw::Poisson(l),
            _ => {
                return Err(Error::config(
                    "each band needs exactly one of `fixed` or `poisson`",
                ))
            }
        };
        Ok(BandSpec {
            count: self.count,
            law,
        })
    }
}

/// A shipped generator preset plus the infection probability used with it.
#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub spec: GeneratorSpec,
    pub default_rho: f64,
}

/// The three shipped presets: equal communities with fixed degrees, equal
/// communities with Poisson degrees, and a half-size first community with
/// Poisson degrees.
///
/// Each preset carries the infection probability used with it. The Poisson
/// presets ship 0.05 rather than the nominal 0.08: with both arcs of every
/// connection materialised, the per-slice spectral radius is about twice the
/// one-directional value, and 0.05 restores the subcritical margin
/// (`rho * zeta` around 0.6-0.7) that the cascade benchmark needs to stay
/// discriminative.
pub fn preset(name: &str) -> Option<Preset> {
    let fixed = |count, d| BandSpec {
        count,
        law: DegreeLaw::Fixed(d),
    };
    let poisson = |count, l| BandSpec {
        count,
        law: DegreeLaw::Poisson(l),
    };
    let base = |communities| GeneratorSpec {
        communities,
        inter_edges: 100,
        slices: 4,
        swap_fraction: 0.10,
        rewire_fraction: 0.10,
        rng_seed: 0,
    };
    match name.to_ascii_lowercase().as_str() {
        "bandnet1" => Some(Preset {
            name: "bandnet1",
            spec: base([
                [fixed(5, 30), fixed(50, 10), fixed(500, 2)],
                [fixed(5, 30), fixed(50, 10), fixed(500, 2)],
            ]),
            default_rho: 0.10,
        }),
        "bandnet2" => Some(Preset {
            name: "bandnet2",
            spec: base([
                [poisson(5, 40.0), poisson(50, 20.0), poisson(500, 5.0)],
                [poisson(5, 40.0), poisson(50, 20.0), poisson(500, 5.0)],
            ]),
            default_rho: 0.05,
        }),
        "bandnet3" => Some(Preset {
            name: "bandnet3",
            spec: base([
                [poisson(5, 40.0), poisson(50, 20.0), poisson(500, 5.0)],
                [poisson(10, 40.0), poisson(100, 20.0), poisson(1000, 5.0)],
            ]),
            default_rho: 0.05,
        }),
        _ => None,
    }
}

/// One slice under construction: its undirected connections (canonical
/// low-high pairs, sorted) and the current true band of every node. The
/// emitted slice graphs carry both directed arcs of every connection, which
/// keeps out-degree an honest proxy of the planted degree and avoids sinks.
#[derive(Debug, Clone)]
pub struct SliceState {
    pub connections: Vec<(u32, u32)>,
    pub bands: Vec<BandId>,
}

impl SliceState {
    /// Both directed arcs of every connection, sorted.
    pub fn arcs(&self) -> Vec<(u32, u32)> {
        let mut arcs = Vec::with_capacity(self.connections.len() * 2);
        for &(a, b) in &self.connections {
            arcs.push((a, b));
            arcs.push((b, a));
        }
        arcs.sort_unstable();
        arcs
    }
}

/// Generator output: the network with per-slice true bands, plus notes about
/// incidental fixes (odd stub totals).
#[derive(Debug, Clone)]
pub struct GeneratedNetwork {
    pub network: TemporalNetwork,
    pub notes: Vec<String>,
}

/// Node layout: community 1 first, bands in order, then community 2.
fn community_assignment(spec: &GeneratorSpec) -> Vec<usize> {
    let mut communities = vec![0usize; spec.community_size(0)];
    communities.extend(vec![1usize; spec.community_size(1)]);
    communities
}

fn initial_bands(spec: &GeneratorSpec) -> Vec<BandId> {
    let mut bands = Vec::with_capacity(spec.n());
    for community in &spec.communities {
        for (b, band) in community.iter().enumerate() {
            bands.extend(std::iter::repeat(BandId::new(b as u8 + 1).unwrap()).take(band.count));
        }
    }
    bands
}

/// Build slice 1: each community is an independent configuration-model graph
/// on its band degree law, then `inter_edges` connections between nodes in
/// different communities (sampled without replacement) tie them together.
pub fn bandnet_initial(
    spec: &GeneratorSpec,
    rng: &mut impl Rng,
) -> Result<(SliceState, Vec<String>)> {
    spec.validate()?;
    let mut notes = Vec::new();
    let mut connections: Vec<(u32, u32)> = Vec::new();
    let mut offset = 0u32;
    for (c, community) in spec.communities.iter().enumerate() {
        let size = spec.community_size(c);
        let mut stubs: Vec<u32> = Vec::new();
        let mut node = offset;
        for band in community {
            for _ in 0..band.count {
                let degree = draw_degree(band.law, size, rng);
                stubs.extend(std::iter::repeat(node).take(degree));
                node += 1;
            }
        }
        if stubs.len() % 2 != 0 {
            let lucky = offset + rng.gen_range(0..size as u32);
            stubs.push(lucky);
            notes.push(format!(
                "community {}: odd stub total, added one stub to node {lucky}",
                c + 1
            ));
        }
        for (a, b) in stubs::match_undirected(&stubs, rng)? {
            connections.push((a.min(b), a.max(b)));
        }
        offset += size as u32;
    }

    // inter-community connections between distinct nodes on each side when
    // they fit, distinct pairs otherwise
    let n1 = spec.community_size(0);
    let n2 = spec.community_size(1);
    if spec.inter_edges <= n1.min(n2) {
        let mut left: Vec<u32> = (0..n1 as u32).collect();
        let mut right: Vec<u32> = (n1 as u32..(n1 + n2) as u32).collect();
        left.shuffle(rng);
        right.shuffle(rng);
        for i in 0..spec.inter_edges {
            connections.push((left[i], right[i]));
        }
    } else {
        let mut chosen: HashSet<(u32, u32)> = HashSet::new();
        while chosen.len() < spec.inter_edges {
            let a = rng.gen_range(0..n1 as u32);
            let b = n1 as u32 + rng.gen_range(0..n2 as u32);
            chosen.insert((a, b));
        }
        connections.extend(chosen);
    }

    connections.sort_unstable();
    Ok((
        SliceState {
            connections,
            bands: initial_bands(spec),
        },
        notes,
    ))
}

fn draw_degree(law: DegreeLaw, community_size: usize, rng: &mut impl Rng) -> usize {
    match law {
        DegreeLaw::Fixed(d) => d as usize,
        DegreeLaw::Poisson(lambda) => {
            if lambda == 0.0 {
                return 0;
            }
            let dist = Poisson::new(lambda).expect("validated lambda");
            loop {
                let d = dist.sample(rng) as usize;
                if d < community_size {
                    return d;
                }
            }
        }
    }
}

/// Evolve one slice into the next: band swaps then connection rewires.
///
/// Swaps select `floor(swap_fraction * |band|)` movers per band (at least one
/// when the fraction is positive), pair movers from bands 1 and 3 with
/// same-community movers from band 2, and exchange the paired nodes' edge
/// endpoints together with their band labels. Band populations are conserved;
/// movers that find no partner are skipped.
///
/// Rewires select `floor(rewire_fraction * |class|)` connections per class
/// (each community's intra connections, and the inter connections) and cross
/// them pairwise: two selected connections exchange endpoints, staying within
/// the class. Every node keeps its degree in every slice, so nothing is ever
/// disconnected and the planted band-degree structure persists over time.
pub fn bandnet_evolve(
    state: &SliceState,
    spec: &GeneratorSpec,
    rng: &mut impl Rng,
) -> Result<SliceState> {
    let communities = community_assignment(spec);
    let n = spec.n();

    // --- band swaps -------------------------------------------------------
    let mut movers: [Vec<u32>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for band in 0..3 {
        let members: Vec<u32> = (0..n as u32)
            .filter(|&v| state.bands[v as usize].index() == band)
            .collect();
        let mut quota = (spec.swap_fraction * members.len() as f64).floor() as usize;
        if quota == 0 && spec.swap_fraction > 0.0 && !members.is_empty() {
            quota = 1;
        }
        movers[band] = sample_without_replacement(&members, quota, rng);
    }
    // band-2 movers are the partner pool, split by community; band-1 movers
    // claim partners before band-3 movers so the small band is never starved
    let mut pool: [Vec<u32>; 2] = [Vec::new(), Vec::new()];
    for &v in &movers[1] {
        pool[communities[v as usize]].push(v);
    }
    pool[0].shuffle(rng);
    pool[1].shuffle(rng);
    let mut band1_movers = movers[0].clone();
    let mut band3_movers = movers[2].clone();
    band1_movers.shuffle(rng);
    band3_movers.shuffle(rng);
    let candidates: Vec<u32> = band1_movers.into_iter().chain(band3_movers).collect();

    let mut perm: Vec<u32> = (0..n as u32).collect();
    let mut bands = state.bands.clone();
    for cand in candidates {
        let c = communities[cand as usize];
        if let Some(partner) = pool[c].pop() {
            perm.swap(cand as usize, partner as usize);
            bands.swap(cand as usize, partner as usize);
        }
    }
    let canonical = |a: u32, b: u32| (a.min(b), a.max(b));
    let relabeled: Vec<(u32, u32)> = state
        .connections
        .iter()
        .map(|&(u, w)| canonical(perm[u as usize], perm[w as usize]))
        .collect();

    // --- rewires ----------------------------------------------------------
    // crossing the endpoints of two same-class connections preserves every
    // node's degree and the class, so the planted band-degree structure
    // persists across slices and nothing is ever disconnected
    let mut connection_set: HashSet<(u32, u32)> = relabeled.iter().copied().collect();
    let class_of = |u: u32, w: u32| -> usize {
        match (communities[u as usize], communities[w as usize]) {
            (0, 0) => 0,
            (1, 1) => 1,
            _ => 2,
        }
    };
    let mut by_class: [Vec<(u32, u32)>; 3] = Default::default();
    for &e in &relabeled {
        by_class[class_of(e.0, e.1)].push(e);
    }
    let n1 = spec.community_size(0) as u32;

    for (class, list) in by_class.iter().enumerate() {
        let quota = (spec.rewire_fraction * list.len() as f64).floor() as usize;
        let mut selected = sample_without_replacement(list, quota - quota % 2, rng);
        while selected.len() >= 2 {
            let second = selected.pop().unwrap();
            let first = selected.pop().unwrap();
            cross_connections(first, second, class, n1, &mut connection_set, rng);
        }
    }

    let mut connections: Vec<(u32, u32)> = connection_set.into_iter().collect();
    connections.sort_unstable();
    Ok(SliceState { connections, bands })
}

/// Exchange endpoints between two connections of the same class, keeping the
/// class and every node's degree. Skipped when the pairings collide with
/// existing connections.
fn cross_connections(
    first: (u32, u32),
    second: (u32, u32),
    class: usize,
    community1_len: u32,
    set: &mut HashSet<(u32, u32)>,
    rng: &mut impl Rng,
) {
    let canonical = |a: u32, b: u32| (a.min(b), a.max(b));
    let (a, b) = first;
    let (c, d) = second;
    // inter connections are stored low-high, so a, c sit in community 1 and
    // b, d in community 2: only one exchange keeps both connections crossing
    let proposals: [[(u32, u32); 2]; 2] = if class == 2 {
        debug_assert!(a < community1_len && c < community1_len);
        [[(a, d), (c, b)], [(a, d), (c, b)]]
    } else {
        [
            [canonical(a, d), canonical(c, b)],
            [canonical(a, c), canonical(b, d)],
        ]
    };
    let pick = rng.gen_bool(0.5) as usize;
    for attempt in [proposals[pick], proposals[1 - pick]] {
        let [e1, e2] = attempt;
        if e1.0 == e1.1 || e2.0 == e2.1 || e1 == e2 {
            continue;
        }
        if set.contains(&e1) || set.contains(&e2) {
            continue;
        }
        set.remove(&first);
        set.remove(&second);
        set.insert(e1);
        set.insert(e2);
        return;
    }
}

fn sample_without_replacement<T: Copy>(items: &[T], k: usize, rng: &mut impl Rng) -> Vec<T> {
    debug_assert!(k <= items.len());
    rand::seq::index::sample(rng, items.len(), k)
        .into_iter()
        .map(|i| items[i])
        .collect()
}

/// Full BandNet run: initial slice plus `slices - 1` evolution steps, true
/// bands tracked throughout. Every connection appears as both directed arcs.
pub fn bandnet(spec: &GeneratorSpec) -> Result<GeneratedNetwork> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let (mut state, notes) = bandnet_initial(spec, &mut rng)?;
    let mut slices = vec![state.arcs()];
    let mut bands = vec![state.bands.clone()];
    for _ in 1..spec.slices {
        state = bandnet_evolve(&state, spec, &mut rng)?;
        slices.push(state.arcs());
        bands.push(state.bands.clone());
    }
    let network = TemporalNetwork::from_parts(
        spec.n(),
        community_assignment(spec),
        2,
        slices,
        Some(bands),
    )?;
    Ok(GeneratedNetwork { network, notes })
}
