//! Command-line pipeline for temporal influence bands.
//!
//! Exit codes: 0 success, 2 input validation, 3 numerical failure,
//! 4 configuration error. Worker count follows `RAYON_NUM_THREADS`; nothing
//! outside the flags recorded in the manifest affects results.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tempoband::bands::{balanced_accuracy, band_flow, write_flow_csv, BandAssignment};
use tempoband::cascade::{subcriticality_check, ticm_scores, CascadeConfig, CascadeVariant};
use tempoband::centrality::{
    temporal_closeness, temporal_degree, temporal_eigenvector, temporal_katz, temporal_pagerank,
    CentralityConfig,
};
use tempoband::generate::{bandnet, config_randomize, preset, GeneratorSpec};
use tempoband::network::{load_temporal_network, save_temporal_network, BandId};
use tempoband::report::{run_report, NetworkSource, ReportConfig};
use tempoband::score::{LoadedScores, Method};
use tempoband::Error;

#[derive(Parser)]
#[command(name = "tempoband", version, about = "Temporal influence bands in polarised networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SourceArgs {
    /// Shipped generator preset: bandnet1, bandnet2 or bandnet3.
    #[arg(long, conflicts_with_all = ["input", "meta"])]
    preset: Option<String>,
    /// Edge file (`slice<TAB>src<TAB>dst` per row).
    #[arg(long = "in", requires = "meta")]
    input: Option<PathBuf>,
    /// Metadata CSV (`node,community[,band_t1..band_tT]`).
    #[arg(long, requires = "input")]
    meta: Option<PathBuf>,
}

impl SourceArgs {
    fn to_source(&self) -> Result<NetworkSource, Error> {
        match (&self.preset, &self.input, &self.meta) {
            (Some(name), None, None) => Ok(NetworkSource::Preset(name.clone())),
            (None, Some(edges), Some(meta)) => Ok(NetworkSource::Files {
                edges: edges.clone(),
                meta: meta.clone(),
            }),
            _ => Err(Error::config(
                "network source required: --preset NAME or --in EDGES --meta META",
            )),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic banded network and write its files.
    Generate {
        /// Shipped preset name.
        #[arg(long, conflicts_with = "spec")]
        preset: Option<String>,
        /// Generator spec file (TOML, one section per band).
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rebuild a two-community network with the configuration model.
    Randomize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        meta: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute centrality score tables.
    Centrality {
        #[command(flatten)]
        source: SourceArgs,
        /// all, degree, closeness, eigenvector, pagerank or katz.
        #[arg(long, default_value = "all")]
        method: String,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also dump each supra matrix as gzipped triplets.
        #[arg(long)]
        dump_supra: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the temporal independent cascade benchmark.
    Icm {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        runs: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "persistent")]
        variant: String,
        /// Seed only slice 1 instead of every slice.
        #[arg(long)]
        slice_one_only: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cluster a written score table into influence bands.
    Bands {
        /// Score CSV produced by `centrality`, `icm` or `report`.
        #[arg(long)]
        scores: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Balanced accuracy of one band assignment against another.
    Compare {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        truth: PathBuf,
    },
    /// Full pipeline: scores, bands, flows, accuracy and community tables.
    Report {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        runs: u32,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "persistent")]
        variant: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Config(_)) => 4,
        Some(Error::NonConvergence { .. }) | Some(Error::ResolventDivergence { .. }) => 3,
        Some(Error::InvalidInput(_)) | Some(Error::Io(_)) | None => 2,
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Generate { preset: preset_name, spec, seed, out } => {
            let mut generator_spec = match (&preset_name, &spec) {
                (Some(name), None) => preset(name)
                    .ok_or_else(|| Error::config(format!("unknown preset {name:?}")))?
                    .spec,
                (None, Some(path)) => GeneratorSpec::from_toml_str(&fs::read_to_string(path)?)?,
                _ => return Err(Error::config("pass exactly one of --preset or --spec").into()),
            };
            generator_spec.rng_seed = seed;
            let generated = bandnet(&generator_spec)?;
            fs::create_dir_all(&out)?;
            save_temporal_network(
                &generated.network,
                out.join("edges.tsv"),
                out.join("meta.csv"),
            )?;
            let manifest = serde_json::json!({
                "command": "generate",
                "spec": generator_spec,
                "seed": seed,
                "notes": generated.notes,
                "n": generated.network.n(),
                "slices": generated.network.t_len(),
            });
            fs::write(out.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
            println!(
                "generated {} nodes x {} slices into {}",
                generated.network.n(),
                generated.network.t_len(),
                out.display()
            );
            Ok(())
        }
        Command::Randomize { input, meta, seed, out } => {
            let net = load_temporal_network(&input, &meta)?;
            let randomized = config_randomize(&net, seed)?;
            fs::create_dir_all(&out)?;
            save_temporal_network(&randomized, out.join("edges.tsv"), out.join("meta.csv"))?;
            let manifest = serde_json::json!({
                "command": "randomize",
                "in": input.display().to_string(),
                "meta": meta.display().to_string(),
                "seed": seed,
                "n": randomized.n(),
                "slices": randomized.t_len(),
                "edges_total": randomized.total_edges(),
            });
            fs::write(out.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
            println!("randomized network written to {}", out.display());
            Ok(())
        }
        Command::Centrality { source, method, epsilon, seed, dump_supra, out } => {
            let source = source.to_source()?;
            let (net, _, _) = tempoband::report::resolve_network(&source, seed)?;
            let cfg = CentralityConfig {
                epsilon,
                ..CentralityConfig::default()
            };
            cfg.validate()?;
            let methods: Vec<Method> = if method == "all" {
                Method::all().iter().copied().filter(|m| *m != Method::Ticm).collect()
            } else {
                vec![Method::parse(&method)?]
            };
            fs::create_dir_all(&out)?;
            for m in methods {
                let table = match m {
                    Method::Degree => temporal_degree(&net)?,
                    Method::Closeness => temporal_closeness(&net)?,
                    Method::Eigenvector => temporal_eigenvector(&net, &cfg)?,
                    Method::PageRank => temporal_pagerank(&net, &cfg)?,
                    Method::Katz => temporal_katz(&net, &cfg)?.table,
                    Method::Ticm => {
                        return Err(Error::config("use the `icm` subcommand for T-ICM").into())
                    }
                };
                table.write_csv(&net, out.join(format!("{}.csv", m.name())))?;
                table.write_marginals_csv(&net, out.join(format!("{}_marginals.csv", m.name())))?;
                println!("wrote {}", out.join(format!("{}.csv", m.name())).display());
            }
            if dump_supra {
                let per_slice = (1..=net.t_len())
                    .map(|t| tempoband::slice_adjacency(&net, t))
                    .collect::<Result<Vec<_>, _>>()?;
                tempoband::supra::build_m(&net).dump_triplets_gz(out.join("supra_m.txt.gz"))?;
                tempoband::supra::build_c(&net, &per_slice, epsilon)?
                    .dump_triplets_gz(out.join("supra_c.txt.gz"))?;
            }
            Ok(())
        }
        Command::Icm { source, rho, runs, seed, variant, slice_one_only, out } => {
            let source = source.to_source()?;
            let rho = rho.unwrap_or_else(|| tempoband::report::default_rho(&source));
            let cfg = CascadeConfig {
                rho,
                runs,
                rng_seed: seed,
                variant: CascadeVariant::parse(&variant)?,
                seed_all_slices: !slice_one_only,
            };
            cfg.validate()?;
            let (net, _, _) = tempoband::report::resolve_network(&source, seed)?;
            let table = ticm_scores(&net, &cfg)?;
            fs::create_dir_all(&out)?;
            table.write_csv(&net, out.join("ticm.csv"))?;
            table.write_marginals_csv(&net, out.join("ticm_marginals.csv"))?;
            let diag = subcriticality_check(&net, rho)?;
            fs::write(
                out.join("subcriticality.json"),
                serde_json::to_string_pretty(&diag)?,
            )?;
            if diag.supercritical_suspect {
                eprintln!(
                    "warning: supercritical-suspect (mean cascade {:.1} of {} nodes)",
                    diag.mean_cascade, diag.nodes
                );
            }
            println!("wrote {}", out.join("ticm.csv").display());
            Ok(())
        }
        Command::Bands { scores, out } => {
            let loaded = LoadedScores::read_csv(&scores)?;
            let stem = scores
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "scores".to_string());
            let assignment = assign_from_loaded(&loaded)?;
            fs::create_dir_all(&out)?;
            let bands_path = out.join(format!("{stem}_bands.csv"));
            write_loaded_bands(&loaded, &assignment, &bands_path)?;
            write_flow_csv(&band_flow(&assignment), out.join(format!("{stem}_flows.csv")))?;
            println!("wrote {}", bands_path.display());
            Ok(())
        }
        Command::Compare { pred, truth } => {
            let p = read_bands_csv(&pred)?;
            let t = read_bands_csv(&truth)?;
            let report = balanced_accuracy(&p, &t)?;
            let per_slice: Vec<String> = report
                .per_slice
                .iter()
                .enumerate()
                .map(|(i, x)| format!("t{}={x:.4}", i + 1))
                .collect();
            println!("{}  overall={:.4}", per_slice.join("  "), report.overall);
            if !report.empty_reference_bands.is_empty() {
                eprintln!(
                    "warning: empty reference bands {:?}",
                    report.empty_reference_bands
                );
            }
            Ok(())
        }
        Command::Report { source, rho, runs, epsilon, seed, variant, out } => {
            let cfg = ReportConfig {
                source: source.to_source()?,
                rho,
                runs,
                epsilon,
                seed,
                variant: CascadeVariant::parse(&variant)?,
                out_dir: out,
            };
            let summary = run_report(&cfg)?;
            if summary.supercritical_suspect {
                eprintln!("warning: cascade process looks supercritical at rho {}", summary.rho);
            }
            if let Some(table) = &summary.accuracy_vs_truth {
                println!("balanced accuracy vs true bands:");
                for (method, report) in table {
                    println!("  {:<12} overall {:.3}", method.name(), report.overall);
                }
            }
            println!("report bundle in {}", summary.out_dir.display());
            Ok(())
        }
    }
}

/// Band a loaded score table (no network context needed).
fn assign_from_loaded(loaded: &LoadedScores) -> Result<BandAssignment, Error> {
    let n = loaded.node_names.len();
    let mut slices = Vec::with_capacity(loaded.t);
    let mut degenerate = Vec::with_capacity(loaded.t);
    for t in 0..loaded.t {
        let column: Vec<f64> = (0..n).map(|v| loaded.joint[v * loaded.t + t]).collect();
        let clustered = tempoband::bands::cluster_bands(&column)?;
        slices.push(clustered.bands);
        degenerate.push(clustered.degenerate);
    }
    Ok(BandAssignment { slices, degenerate })
}

fn write_loaded_bands(
    loaded: &LoadedScores,
    assignment: &BandAssignment,
    path: &PathBuf,
) -> Result<(), Error> {
    use std::io::Write;
    let mut w = std::io::BufWriter::new(fs::File::create(path)?);
    write!(w, "node,community")?;
    for t in 1..=assignment.t_len() {
        write!(w, ",band_t{t}")?;
    }
    writeln!(w)?;
    for v in 0..loaded.node_names.len() {
        write!(w, "{},{}", loaded.node_names[v], loaded.community_labels[v])?;
        for slice in &assignment.slices {
            write!(w, ",{}", slice[v])?;
        }
        writeln!(w)?;
    }
    w.flush().map_err(Error::from)
}

/// Read a band assignment CSV (`node,community,band_t1..band_tT`).
fn read_bands_csv(path: &PathBuf) -> Result<BandAssignment, Error> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::invalid_input("empty bands file"))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 3 || cols[0] != "node" {
        return Err(Error::invalid_input(
            "bands header must be node,community,band_t1..band_tT",
        ));
    }
    let t = cols.len() - 2;
    let mut per_node: Vec<Vec<BandId>> = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols.len() {
            return Err(Error::invalid_input(format!(
                "bad bands row: {line:?}"
            )));
        }
        let row = fields[2..]
            .iter()
            .map(|s| {
                s.trim()
                    .parse::<u8>()
                    .map_err(|_| Error::invalid_input(format!("bad band label {s:?}")))
                    .and_then(BandId::new)
            })
            .collect::<Result<Vec<_>, _>>()?;
        per_node.push(row);
    }
    if per_node.is_empty() {
        return Err(Error::invalid_input("bands file has no rows"));
    }
    let n = per_node.len();
    let slices = (0..t)
        .map(|s| (0..n).map(|v| per_node[v][s]).collect())
        .collect();
    Ok(BandAssignment {
        slices,
        degenerate: vec![false; t],
    })
}
