//! Full-pipeline orchestration: resolve or generate a network, run all six
//! influence methods, band them, and write one directory of artifacts with a
//! manifest recording every config value and seed.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::json;

use crate::aggregate::{band1_membership, community_time};
use crate::bands::{assign_bands, band_flow, method_agreement, write_flow_csv, AccuracyReport, BandAssignment};
use crate::cascade::{subcriticality_check, ticm_scores, CascadeConfig, CascadeVariant};
use crate::centrality::{
    temporal_closeness, temporal_degree, temporal_eigenvector, temporal_katz, temporal_pagerank,
    CentralityConfig,
};
use crate::error::{Error, Result};
use crate::generate::{bandnet, preset, GeneratorSpec};
use crate::network::{load_temporal_network, save_temporal_network, TemporalNetwork};
use crate::score::{Method, ScoreTable};

#[derive(Debug, Clone)]
pub enum NetworkSource {
    Preset(String),
    Files { edges: PathBuf, meta: PathBuf },
}

#[derive(Debug, Clone)]
pub struct ReportConfig {
    pub source: NetworkSource,
    /// Infection probability; defaults to the preset's value or 0.1.
    pub rho: Option<f64>,
    pub runs: u32,
    pub epsilon: f64,
    pub seed: u64,
    pub variant: CascadeVariant,
    pub out_dir: PathBuf,
}

#[derive(Debug)]
pub struct ReportSummary {
    pub out_dir: PathBuf,
    pub rho: f64,
    pub accuracy_vs_truth: Option<BTreeMap<Method, AccuracyReport>>,
    pub agreement: BTreeMap<(Method, Method), f64>,
    pub supercritical_suspect: bool,
}

struct MethodOutput {
    table: ScoreTable,
    katz_alpha: Option<f64>,
    katz_zeta: Option<f64>,
}

/// Resolve the configured network source. Returns the network, the resolved
/// generator spec (when generated) and any generator notes.
pub fn resolve_network(
    source: &NetworkSource,
    seed: u64,
) -> Result<(TemporalNetwork, Option<GeneratorSpec>, Vec<String>)> {
    match source {
        NetworkSource::Preset(name) => {
            let preset = preset(name)
                .ok_or_else(|| Error::config(format!("unknown preset {name:?}")))?;
            let mut spec = preset.spec;
            spec.rng_seed = seed;
            let generated = bandnet(&spec)?;
            Ok((generated.network, Some(spec), generated.notes))
        }
        NetworkSource::Files { edges, meta } => {
            Ok((load_temporal_network(edges, meta)?, None, Vec::new()))
        }
    }
}

/// Default infection probability for a source: the preset's paper value, or
/// 0.1 for loaded files.
pub fn default_rho(source: &NetworkSource) -> f64 {
    match source {
        NetworkSource::Preset(name) => preset(name).map_or(0.1, |p| p.default_rho),
        NetworkSource::Files { .. } => 0.1,
    }
}

fn compute_method(
    method: Method,
    net: &TemporalNetwork,
    centrality_cfg: &CentralityConfig,
    cascade_cfg: &CascadeConfig,
) -> Result<MethodOutput> {
    let plain = |table: ScoreTable| MethodOutput {
        table,
        katz_alpha: None,
        katz_zeta: None,
    };
    Ok(match method {
        Method::Ticm => plain(ticm_scores(net, cascade_cfg)?),
        Method::Degree => plain(temporal_degree(net)?),
        Method::Closeness => plain(temporal_closeness(net)?),
        Method::Eigenvector => plain(temporal_eigenvector(net, centrality_cfg)?),
        Method::PageRank => plain(temporal_pagerank(net, centrality_cfg)?),
        Method::Katz => {
            let outcome = temporal_katz(net, centrality_cfg)?;
            MethodOutput {
                table: outcome.table,
                katz_alpha: Some(outcome.alpha),
                katz_zeta: Some(outcome.zeta_max),
            }
        }
    })
}

/// Run the whole pipeline and write the artifact bundle.
pub fn run_report(cfg: &ReportConfig) -> Result<ReportSummary> {
    let rho = cfg.rho.unwrap_or_else(|| default_rho(&cfg.source));
    let cascade_cfg = CascadeConfig {
        rho,
        runs: cfg.runs,
        rng_seed: cfg.seed,
        variant: cfg.variant,
        seed_all_slices: true,
    };
    cascade_cfg.validate()?;
    let centrality_cfg = CentralityConfig {
        epsilon: cfg.epsilon,
        ..CentralityConfig::default()
    };
    centrality_cfg.validate()?;

    let (net, spec, notes) = resolve_network(&cfg.source, cfg.seed)?;

    let out = &cfg.out_dir;
    for sub in ["network", "scores", "bands", "accuracy", "community", "diagnostics"] {
        fs::create_dir_all(out.join(sub))?;
    }
    let mut artifacts: Vec<String> = Vec::new();
    let mut record = |p: PathBuf| -> PathBuf {
        artifacts.push(p.strip_prefix(out).unwrap_or(&p).display().to_string());
        p
    };

    save_temporal_network(
        &net,
        record(out.join("network/edges.tsv")),
        record(out.join("network/meta.csv")),
    )?;

    let subcrit = subcriticality_check(&net, rho)?;
    fs::write(
        record(out.join("diagnostics/subcriticality.json")),
        serde_json::to_string_pretty(&subcrit)?,
    )?;

    // fan the six methods out
    let methods = Method::all();
    let outputs: Vec<MethodOutput> = methods
        .par_iter()
        .map(|&m| compute_method(m, &net, &centrality_cfg, &cascade_cfg))
        .collect::<Result<Vec<_>>>()?;

    let mut assignments: BTreeMap<Method, BandAssignment> = BTreeMap::new();
    let mut katz_details = None;
    for (method, output) in methods.iter().zip(&outputs) {
        let name = method.name();
        output
            .table
            .write_csv(&net, record(out.join(format!("scores/{name}.csv"))))?;
        output.table.write_marginals_csv(
            &net,
            record(out.join(format!("scores/{name}_marginals.csv"))),
        )?;
        let assignment = assign_bands(&output.table)?;
        assignment.write_csv(&net, record(out.join(format!("bands/{name}_bands.csv"))))?;
        write_flow_csv(
            &band_flow(&assignment),
            record(out.join(format!("bands/{name}_flows.csv"))),
        )?;
        let ct = community_time(&output.table, &net)?;
        ct.write_csv(
            &net,
            record(out.join(format!("community/{name}_community_time.csv"))),
        )?;
        band1_membership(&assignment, &net).write_csv(
            &net,
            record(out.join(format!("community/{name}_band1.csv"))),
        )?;
        if let Some(alpha) = output.katz_alpha {
            katz_details = Some((alpha, output.katz_zeta.unwrap_or(f64::NAN)));
        }
        assignments.insert(*method, assignment);
    }

    // balanced accuracy against the initial bands tracked forward, when
    // available
    let truth = BandAssignment::tracked_initial(&net);
    let accuracy_vs_truth = match &truth {
        Some(truth) => {
            let mut table = BTreeMap::new();
            for (&method, assignment) in &assignments {
                table.insert(method, crate::bands::balanced_accuracy(assignment, truth)?);
            }
            write_accuracy_table(&table, net.t_len(), record(out.join("accuracy/vs_truth.csv")))?;
            Some(table)
        }
        None => None,
    };

    // pairwise agreement matrix (row = assignment, column = reference)
    let mut agreement = BTreeMap::new();
    for (&a, assign_a) in &assignments {
        for (&b, assign_b) in &assignments {
            let overall = if a == b {
                1.0
            } else {
                method_agreement(assign_a, assign_b)?.overall
            };
            agreement.insert((a, b), overall);
        }
    }
    write_agreement_matrix(&agreement, record(out.join("accuracy/agreement.csv")))?;

    let manifest = json!({
        "command": "report",
        "source": source_json(&cfg.source),
        "generator_spec": spec,
        "generator_notes": notes,
        "rho": rho,
        "runs": cfg.runs,
        "epsilon": cfg.epsilon,
        "seed": cfg.seed,
        "variant": cfg.variant,
        "centrality": centrality_cfg,
        "katz": katz_details.map(|(alpha, zeta)| json!({"alpha": alpha, "zeta_max": zeta})),
        "network": {
            "n": net.n(),
            "slices": net.t_len(),
            "communities": (0..net.n_communities())
                .map(|c| (net.community_name(c).to_string(), net.community_size(c)))
                .collect::<BTreeMap<_, _>>(),
            "edges_total": net.total_edges(),
        },
        "subcriticality": subcrit,
        "artifacts": artifacts,
    });
    fs::write(
        out.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)?,
    )?;

    Ok(ReportSummary {
        out_dir: out.clone(),
        rho,
        accuracy_vs_truth,
        agreement,
        supercritical_suspect: subcrit.supercritical_suspect,
    })
}

fn source_json(source: &NetworkSource) -> serde_json::Value {
    match source {
        NetworkSource::Preset(name) => json!({ "preset": name }),
        NetworkSource::Files { edges, meta } => json!({
            "edges": edges.display().to_string(),
            "meta": meta.display().to_string(),
        }),
    }
}

/// Accuracy table shaped like the per-network summary: one row per method,
/// per-slice columns and the overall mean.
pub fn write_accuracy_table(
    table: &BTreeMap<Method, AccuracyReport>,
    t_len: usize,
    path: impl AsRef<Path>,
) -> Result<()> {
    use std::io::Write;
    let mut w = std::io::BufWriter::new(fs::File::create(path.as_ref())?);
    write!(w, "method")?;
    for t in 1..=t_len {
        write!(w, ",t{t}")?;
    }
    writeln!(w, ",overall")?;
    for (method, report) in table {
        write!(w, "{}", method.name())?;
        for x in &report.per_slice {
            write!(w, ",{x:.4}")?;
        }
        writeln!(w, ",{:.4}", report.overall)?;
    }
    w.flush()?;
    Ok(())
}

fn write_agreement_matrix(
    agreement: &BTreeMap<(Method, Method), f64>,
    path: impl AsRef<Path>,
) -> Result<()> {
    use std::io::Write;
    let mut w = std::io::BufWriter::new(fs::File::create(path.as_ref())?);
    write!(w, "method")?;
    for m in Method::all() {
        write!(w, ",{}", m.name())?;
    }
    writeln!(w)?;
    for a in Method::all() {
        write!(w, "{}", a.name())?;
        for b in Method::all() {
            write!(w, ",{:.4}", agreement[&(a, b)])?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidInput(format!("json: {e}"))
    }
}
