//! Joint node-time score tables with their marginal summaries.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::network::{CommunityId, TemporalNetwork};

/// Influence method that produced a score table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Ticm,
    Degree,
    Closeness,
    Eigenvector,
    PageRank,
    Katz,
}

impl Method {
    pub fn all() -> [Method; 6] {
        [
            Method::Ticm,
            Method::Degree,
            Method::Closeness,
            Method::Eigenvector,
            Method::PageRank,
            Method::Katz,
        ]
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Ticm => "ticm",
            Method::Degree => "degree",
            Method::Closeness => "closeness",
            Method::Eigenvector => "eigenvector",
            Method::PageRank => "pagerank",
            Method::Katz => "katz",
        }
    }

    pub fn parse(s: &str) -> Result<Method> {
        match s.to_ascii_lowercase().as_str() {
            "ticm" | "t-icm" => Ok(Method::Ticm),
            "degree" => Ok(Method::Degree),
            "closeness" => Ok(Method::Closeness),
            "eigenvector" => Ok(Method::Eigenvector),
            "pagerank" => Ok(Method::PageRank),
            "katz" => Ok(Method::Katz),
            other => Err(Error::config(format!("unknown method {other:?}"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Joint node x slice influence scores for one method, together with the
/// marginal node (MNC), layer (MLC) and community (MCC) summaries.
///
/// The marginals are derived from the joint table at construction: MNC sums a
/// node's row over slices, MLC sums a slice's column over nodes, and MCC is
/// the mean MNC over each community's nodes.
#[derive(Debug, Clone)]
pub struct ScoreTable {
    method: Method,
    n: usize,
    t: usize,
    joint: Vec<f64>, // row-major, [v * t + (slice-1)]
    mnc: Vec<f64>,
    mlc: Vec<f64>,
    mcc: Vec<f64>,
}

impl ScoreTable {
    /// Build a table from the joint matrix (row-major node x slice) and fill
    /// in the marginals. Rejects non-finite or negative entries.
    pub fn from_joint(method: Method, net: &TemporalNetwork, joint: Vec<f64>) -> Result<Self> {
        let (n, t) = (net.n(), net.t_len());
        if joint.len() != n * t {
            return Err(Error::invalid_input(format!(
                "joint table must be {n}x{t}, got {} entries",
                joint.len()
            )));
        }
        if let Some(bad) = joint.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::invalid_input(format!(
                "joint scores must be finite and nonnegative, got {bad}"
            )));
        }
        let mut mnc = vec![0.0; n];
        let mut mlc = vec![0.0; t];
        for v in 0..n {
            for s in 0..t {
                let x = joint[v * t + s];
                mnc[v] += x;
                mlc[s] += x;
            }
        }
        let mut mcc = vec![0.0; net.n_communities()];
        let mut sizes = vec![0usize; net.n_communities()];
        for v in 0..n {
            let c = net.community_of(v);
            mcc[c] += mnc[v];
            sizes[c] += 1;
        }
        for (c, total) in mcc.iter_mut().enumerate() {
            if sizes[c] == 0 {
                return Err(Error::invalid_input(format!("community {c} is empty")));
            }
            *total /= sizes[c] as f64;
        }
        Ok(ScoreTable {
            method,
            n,
            t,
            joint,
            mnc,
            mlc,
            mcc,
        })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t_len(&self) -> usize {
        self.t
    }

    /// Joint score of node `v` in slice `t` (1-based slice).
    pub fn joint(&self, v: usize, t: usize) -> f64 {
        assert!(t >= 1 && t <= self.t);
        self.joint[v * self.t + (t - 1)]
    }

    /// One slice's scores as a dense column (1-based slice).
    pub fn slice_scores(&self, t: usize) -> Vec<f64> {
        assert!(t >= 1 && t <= self.t);
        (0..self.n).map(|v| self.joint[v * self.t + t - 1]).collect()
    }

    pub fn mnc(&self) -> &[f64] {
        &self.mnc
    }

    pub fn mlc(&self) -> &[f64] {
        &self.mlc
    }

    /// Marginal community centrality, indexed by community id.
    pub fn mcc(&self) -> &[f64] {
        &self.mcc
    }

    pub fn mcc_of(&self, c: CommunityId) -> f64 {
        self.mcc[c]
    }

    /// Write rows `node, community, t1..tT, mnc` using external ids.
    pub fn write_csv(&self, net: &TemporalNetwork, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path.as_ref())?);
        write!(w, "node,community")?;
        for t in 1..=self.t {
            write!(w, ",t{t}")?;
        }
        writeln!(w, ",mnc")?;
        for v in 0..self.n {
            write!(
                w,
                "{},{}",
                net.node_name(v),
                net.community_name(net.community_of(v))
            )?;
            for s in 0..self.t {
                write!(w, ",{}", self.joint[v * self.t + s])?;
            }
            writeln!(w, ",{}", self.mnc[v])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Side file with the MLC row and the per-community MCC values.
    pub fn write_marginals_csv(&self, net: &TemporalNetwork, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path.as_ref())?);
        write!(w, "mlc")?;
        for x in &self.mlc {
            write!(w, ",{x}")?;
        }
        writeln!(w)?;
        let total: f64 = self.mcc.iter().sum();
        writeln!(w, "community,mcc,mcc_share")?;
        for (c, x) in self.mcc.iter().enumerate() {
            let share = if total > 0.0 { x / total } else { 0.0 };
            writeln!(w, "{},{x},{share}", net.community_name(c))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// A score table read back from CSV, carrying the external labels it was
/// written with instead of a full network.
#[derive(Debug, Clone)]
pub struct LoadedScores {
    pub node_names: Vec<String>,
    pub community_labels: Vec<String>,
    pub t: usize,
    /// Row-major node x slice.
    pub joint: Vec<f64>,
}

impl LoadedScores {
    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let r = BufReader::new(File::open(path.as_ref())?);
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::invalid_input("empty scores file"))??;
        let cols: Vec<&str> = header.trim().split(',').collect();
        if cols.len() < 4 || cols[0] != "node" || cols[1] != "community" {
            return Err(Error::invalid_input(
                "scores header must be node,community,t1..tT,mnc",
            ));
        }
        let t = cols.len() - 3;
        let mut out = LoadedScores {
            node_names: Vec::new(),
            community_labels: Vec::new(),
            t,
            joint: Vec::new(),
        };
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.trim().split(',').collect();
            if fields.len() != cols.len() {
                return Err(Error::invalid_input(format!(
                    "{}:{}: expected {} fields",
                    path.as_ref().display(),
                    lineno + 2,
                    cols.len()
                )));
            }
            out.node_names.push(fields[0].to_string());
            out.community_labels.push(fields[1].to_string());
            for f in &fields[2..2 + t] {
                let x: f64 = f.parse().map_err(|_| {
                    Error::invalid_input(format!("bad score value {f:?}"))
                })?;
                out.joint.push(x);
            }
        }
        Ok(out)
    }
}
