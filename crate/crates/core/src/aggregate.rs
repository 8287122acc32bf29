//! Community-level aggregation of score tables.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::bands::BandAssignment;
use crate::error::{Error, Result};
use crate::network::TemporalNetwork;
use crate::score::ScoreTable;

/// Marginal community centrality: mean MNC over each community's nodes,
/// reported raw and as a share of the total.
#[derive(Debug, Clone)]
pub struct MccReport {
    pub raw: Vec<f64>,
    pub share: Vec<f64>,
}

pub fn mcc(scores: &ScoreTable, net: &TemporalNetwork) -> Result<MccReport> {
    for c in 0..net.n_communities() {
        if net.community_size(c) == 0 {
            return Err(Error::invalid_input(format!("community {c} is empty")));
        }
    }
    let raw = scores.mcc().to_vec();
    let total: f64 = raw.iter().sum();
    let share = raw
        .iter()
        .map(|x| if total > 0.0 { x / total } else { 0.0 })
        .collect();
    Ok(MccReport { raw, share })
}

/// Normalized joint community-time table: per-capita community scores per
/// slice, globally normalised to sum 1, with the MLC row and MCC column kept
/// alongside.
#[derive(Debug, Clone)]
pub struct CommunityTimeTable {
    /// `cells[c][t-1]`, normalised to total 1.
    pub cells: Vec<Vec<f64>>,
    pub mlc: Vec<f64>,
    pub mcc: MccReport,
}

pub fn community_time(scores: &ScoreTable, net: &TemporalNetwork) -> Result<CommunityTimeTable> {
    let t_len = scores.t_len();
    let n_comm = net.n_communities();
    let mut cells = vec![vec![0.0; t_len]; n_comm];
    for v in 0..net.n() {
        let c = net.community_of(v);
        for t in 1..=t_len {
            cells[c][t - 1] += scores.joint(v, t);
        }
    }
    for (c, row) in cells.iter_mut().enumerate() {
        let size = net.community_size(c) as f64;
        for x in row.iter_mut() {
            *x /= size;
        }
    }
    let total: f64 = cells.iter().flatten().sum();
    if total > 0.0 {
        for row in cells.iter_mut() {
            for x in row.iter_mut() {
                *x /= total;
            }
        }
    }
    Ok(CommunityTimeTable {
        cells,
        mlc: scores.mlc().to_vec(),
        mcc: mcc(scores, net)?,
    })
}

impl CommunityTimeTable {
    /// Layout mirrors the joint summary table: one row per community with
    /// its per-slice cells and MCC, then the MLC row.
    pub fn write_csv(&self, net: &TemporalNetwork, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path.as_ref())?);
        write!(w, "community")?;
        for t in 1..=self.mlc.len() {
            write!(w, ",t{t}")?;
        }
        writeln!(w, ",mcc,mcc_share")?;
        for (c, row) in self.cells.iter().enumerate() {
            write!(w, "{}", net.community_name(c))?;
            for x in row {
                write!(w, ",{x}")?;
            }
            writeln!(w, ",{},{}", self.mcc.raw[c], self.mcc.share[c])?;
        }
        write!(w, "mlc")?;
        for x in &self.mlc {
            write!(w, ",{x}")?;
        }
        writeln!(w, ",,")?;
        w.flush()?;
        Ok(())
    }
}

/// How many nodes of each community sit in band 1, per slice.
#[derive(Debug, Clone)]
pub struct Band1Membership {
    /// `counts[t-1][c]`.
    pub counts: Vec<Vec<u64>>,
    /// Slices with no band-1 node at all (degenerate assignments).
    pub empty_slices: Vec<usize>,
}

pub fn band1_membership(assign: &BandAssignment, net: &TemporalNetwork) -> Band1Membership {
    let mut counts = Vec::with_capacity(assign.t_len());
    let mut empty = Vec::new();
    for (idx, slice) in assign.slices.iter().enumerate() {
        let mut row = vec![0u64; net.n_communities()];
        for (v, band) in slice.iter().enumerate() {
            if band.index() == 0 {
                row[net.community_of(v)] += 1;
            }
        }
        if row.iter().all(|&x| x == 0) {
            empty.push(idx + 1);
        }
        counts.push(row);
    }
    Band1Membership {
        counts,
        empty_slices: empty,
    }
}

impl Band1Membership {
    pub fn write_csv(&self, net: &TemporalNetwork, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path.as_ref())?);
        writeln!(w, "t,community,band1_count")?;
        for (idx, row) in self.counts.iter().enumerate() {
            for (c, count) in row.iter().enumerate() {
                writeln!(w, "{},{},{count}", idx + 1, net.community_name(c))?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::BandId;
    use crate::score::Method;
    use approx::assert_abs_diff_eq;

    fn net() -> TemporalNetwork {
        TemporalNetwork::from_parts(
            4,
            vec![0, 0, 1, 1],
            2,
            vec![vec![(0, 1)], vec![(2, 3)]],
            None,
        )
        .unwrap()
    }

    #[test]
    fn mcc_is_mean_mnc() {
        let net = net();
        // mnc: node0 = 0.2, node1 = 0.4 -> community 1 mcc 0.3
        let joint = vec![0.1, 0.1, 0.2, 0.2, 0.3, 0.3, 0.1, 0.1];
        let table = ScoreTable::from_joint(Method::Degree, &net, joint).unwrap();
        let report = mcc(&table, &net).unwrap();
        assert_abs_diff_eq!(report.raw[0], 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(report.raw[1], 0.4, epsilon = 1e-12);
    }

    #[test]
    fn identical_mnc_gives_even_shares() {
        let net = net();
        let table = ScoreTable::from_joint(Method::Degree, &net, vec![0.5; 8]).unwrap();
        let report = mcc(&table, &net).unwrap();
        assert_abs_diff_eq!(report.raw[0], report.raw[1]);
        assert_abs_diff_eq!(report.share[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(report.share[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn community_time_normalises_to_one() {
        let net = net();
        let joint = vec![1.0, 2.0, 0.0, 1.0, 4.0, 0.0, 1.0, 1.0];
        let table = ScoreTable::from_joint(Method::Ticm, &net, joint).unwrap();
        let ct = community_time(&table, &net).unwrap();
        let total: f64 = ct.cells.iter().flatten().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn single_community_single_slice_is_one_cell() {
        let net = TemporalNetwork::from_parts(2, vec![0, 0], 1, vec![vec![(0, 1)]], None).unwrap();
        let table = ScoreTable::from_joint(Method::Degree, &net, vec![0.3, 0.7]).unwrap();
        let ct = community_time(&table, &net).unwrap();
        assert_eq!(ct.cells.len(), 1);
        assert_abs_diff_eq!(ct.cells[0][0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn symmetric_scores_split_columns_evenly() {
        let net = net();
        let joint = vec![1.0, 2.0, 3.0, 1.0, 1.0, 2.0, 3.0, 1.0];
        let table = ScoreTable::from_joint(Method::Degree, &net, joint).unwrap();
        let ct = community_time(&table, &net).unwrap();
        for t in 0..2 {
            assert_abs_diff_eq!(ct.cells[0][t], ct.cells[1][t], epsilon = 1e-12);
        }
    }

    #[test]
    fn band1_counts_and_degenerate_flag() {
        let net = net();
        let assign = BandAssignment {
            slices: vec![
                vec![BandId::B1, BandId::B2, BandId::B1, BandId::B3],
                vec![BandId::B2, BandId::B2, BandId::B3, BandId::B3],
            ],
            degenerate: vec![false, false],
        };
        let membership = band1_membership(&assign, &net);
        assert_eq!(membership.counts[0], vec![1, 1]);
        assert_eq!(membership.counts[1], vec![0, 0]);
        assert_eq!(membership.empty_slices, vec![2]);
    }
}
