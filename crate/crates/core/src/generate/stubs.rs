//! Stub-matching primitives shared by the synthetic generator and the
//! configuration-model randomizer.
//!
//! Matching is stub-exact: collisions (self-loops, duplicate pairs) are
//! resampled against the remaining stubs and any leftovers repaired by
//! pairwise swaps, so the produced edge list realises the requested stub
//! counts exactly or fails loudly.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

const RESAMPLE_TRIES: usize = 100;
const REPAIR_TRIES: usize = 10_000;

/// Pair undirected stubs (one entry per stub). Returns unordered pairs with
/// no self-pairs and no duplicates.
pub(crate) fn match_undirected(stubs: &[u32], rng: &mut impl Rng) -> Result<Vec<(u32, u32)>> {
    if stubs.len() % 2 != 0 {
        return Err(Error::config("odd stub total cannot be matched"));
    }
    let mut order = stubs.to_vec();
    order.shuffle(rng);
    let m = order.len() / 2;
    let mut used: HashSet<(u32, u32)> = HashSet::with_capacity(m);
    let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(m);
    let mut dirty: Vec<usize> = Vec::new();
    let key = |a: u32, b: u32| (a.min(b), a.max(b));

    for slot in 0..m {
        let base = 2 * slot;
        let mut ok = false;
        for _ in 0..RESAMPLE_TRIES {
            let (a, b) = (order[base], order[base + 1]);
            if a != b && !used.contains(&key(a, b)) {
                ok = true;
                break;
            }
            if base + 2 >= order.len() {
                break; // nothing left to swap with
            }
            let j = rng.gen_range(base + 2..order.len());
            order.swap(base + 1, j);
        }
        let (a, b) = (order[base], order[base + 1]);
        pairs.push((a, b));
        if ok {
            used.insert(key(a, b));
        } else {
            dirty.push(slot);
        }
    }

    // pairwise swap repair for the few slots resampling could not fix
    for slot in dirty {
        let (a, b) = pairs[slot];
        if a != b && !used.contains(&key(a, b)) {
            used.insert(key(a, b));
            continue;
        }
        let try_swap = |other: usize,
                        pairs: &mut Vec<(u32, u32)>,
                        used: &mut HashSet<(u32, u32)>|
         -> bool {
            if other == slot {
                return false;
            }
            let (c, d) = pairs[other];
            // propose (a, d) and (c, b)
            if a == d || c == b || used.contains(&key(a, d)) || used.contains(&key(c, b)) {
                return false;
            }
            used.remove(&key(c, d));
            used.insert(key(a, d));
            used.insert(key(c, b));
            pairs[slot] = (a, d);
            pairs[other] = (c, b);
            true
        };
        let mut repaired = false;
        for _ in 0..REPAIR_TRIES {
            let other = rng.gen_range(0..pairs.len());
            if try_swap(other, &mut pairs, &mut used) {
                repaired = true;
                break;
            }
        }
        if !repaired {
            // systematic pass before declaring the sequence unrealisable
            for other in 0..pairs.len() {
                if try_swap(other, &mut pairs, &mut used) {
                    repaired = true;
                    break;
                }
            }
        }
        if !repaired {
            return Err(Error::config(
                "degree sequence could not be realised as a simple graph",
            ));
        }
    }
    Ok(pairs)
}

/// Pair directed out-stubs with in-stubs. Returns ordered (src, dst) pairs
/// with no duplicates; self-loops are forbidden when `forbid_self` is set
/// (both stub lists drawn from the same node set).
pub(crate) fn match_directed(
    out_stubs: &[u32],
    in_stubs: &[u32],
    forbid_self: bool,
    rng: &mut impl Rng,
) -> Result<Vec<(u32, u32)>> {
    if out_stubs.len() != in_stubs.len() {
        return Err(Error::invalid_input(format!(
            "unbalanced stubs: {} out vs {} in",
            out_stubs.len(),
            in_stubs.len()
        )));
    }
    let mut dst = in_stubs.to_vec();
    dst.shuffle(rng);
    let m = dst.len();
    let mut used: HashSet<(u32, u32)> = HashSet::with_capacity(m);
    let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(m);
    let mut dirty: Vec<usize> = Vec::new();

    for slot in 0..m {
        let src = out_stubs[slot];
        let mut ok = false;
        for _ in 0..RESAMPLE_TRIES {
            let d = dst[slot];
            if (!forbid_self || src != d) && !used.contains(&(src, d)) {
                ok = true;
                break;
            }
            if slot + 1 >= m {
                break;
            }
            let j = rng.gen_range(slot + 1..m);
            dst.swap(slot, j);
        }
        let pair = (src, dst[slot]);
        pairs.push(pair);
        if ok {
            used.insert(pair);
        } else {
            dirty.push(slot);
        }
    }

    for slot in dirty {
        let (a, b) = pairs[slot];
        if (!forbid_self || a != b) && !used.contains(&(a, b)) {
            used.insert((a, b));
            continue;
        }
        let mut repaired = false;
        for _ in 0..REPAIR_TRIES {
            let other = rng.gen_range(0..pairs.len());
            if other == slot {
                continue;
            }
            let (c, d) = pairs[other];
            // swap destinations: (a, d) and (c, b) keep all stub counts
            if forbid_self && (a == d || c == b) {
                continue;
            }
            if used.contains(&(a, d)) || used.contains(&(c, b)) {
                continue;
            }
            used.remove(&(c, d));
            used.insert((a, d));
            used.insert((c, b));
            pairs[slot] = (a, d);
            pairs[other] = (c, b);
            repaired = true;
            break;
        }
        if !repaired {
            return Err(Error::config(
                "directed stub sequence could not be realised as a simple graph",
            ));
        }
    }
    Ok(pairs)
}
