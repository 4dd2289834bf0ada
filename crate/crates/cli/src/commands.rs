//! Subcommand implementations. Each returns the single-line JSON report
//! that `main` prints on standard output.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::json;
use sha2::{Digest, Sha256};
use specsumm::graph::{generate_sbm, largest_connected_component, load_edge_list, write_edge_list, LoadOptions};
use specsumm::queries::{exact_triangles, expected_triangles};
use specsumm::spectral::{lm_eigs, LanczosOptions};
use specsumm::stiefel::{ocsa, orthonormality_error, random_orthonormal_init, OcsaConfig, RelaxedSolution};
use specsumm::summary::{build_summary, evaluate, specsumm, RelaxMethod, SpecSummConfig};
use specsumm::{Graph, NodeRelabeling};

use crate::file::{Meta, Params, Seeds, SummaryFile};
use crate::CliError;

/// Largest absolute difference tolerated between stored and recomputed
/// densities.
pub const DENSITY_DRIFT_TOL: f64 = 1e-9;

/// A loaded graph with the hash of its source file.
pub struct LoadedGraph {
    pub graph: Graph,
    pub labels: NodeRelabeling,
    pub source_hash: String,
}

pub fn load_graph(path: &Path, lcc: bool) -> Result<LoadedGraph, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    let source_hash = hex::encode(Sha256::digest(&bytes));
    let (graph, labels) = load_edge_list(BufReader::new(&bytes[..]), LoadOptions::default())?;
    let (graph, labels) = if lcc {
        let (sub, inner) = largest_connected_component(&graph);
        (sub, labels.then(&inner))
    } else {
        (graph, labels)
    };
    Ok(LoadedGraph {
        graph,
        labels,
        source_hash,
    })
}

fn to_line(value: &impl serde::Serialize) -> String {
    serde_json::to_string(value).expect("reports serialize")
}

#[derive(Debug, Clone)]
pub struct SummarizeArgs {
    pub graph: PathBuf,
    pub k: usize,
    pub eigvecs: Option<usize>,
    pub method: RelaxMethod,
    pub reassign_rounds: usize,
    pub reassign_samples: usize,
    pub lcc: bool,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl SummarizeArgs {
    pub fn new(graph: impl Into<PathBuf>, k: usize) -> Self {
        SummarizeArgs {
            graph: graph.into(),
            k,
            eigvecs: None,
            method: RelaxMethod::LmEigvecs,
            reassign_rounds: 0,
            reassign_samples: 500,
            lcc: false,
            seed: 0,
            out: None,
        }
    }
}

pub fn summarize(args: &SummarizeArgs) -> Result<String, CliError> {
    let loaded = load_graph(&args.graph, args.lcc)?;
    let mut config = SpecSummConfig::new(args.k, args.seed);
    config.d = args.eigvecs;
    config.method = args.method;
    if args.reassign_rounds > 0 {
        config = config.with_reassign(args.reassign_rounds, args.reassign_samples);
    }
    let (summary, report) = specsumm(&loaded.graph, &config)?;
    if let Some(out) = &args.out {
        let meta = Meta {
            source_hash: loaded.source_hash,
            d: args.eigvecs.unwrap_or(args.k),
            relax_method: args.method.as_str().to_string(),
            seeds: Seeds { master: args.seed },
            params: Params {
                lcc: args.lcc,
                reassign_rounds: args.reassign_rounds,
                reassign_samples: args.reassign_samples,
                kmeans_batch_size: config.kmeans.batch_size,
                kmeans_max_iterations: config.kmeans.max_iterations,
                ocsa_max_iterations: config.ocsa.max_iterations,
            },
        };
        SummaryFile::from_summary(&summary, meta).write(out)?;
    }
    Ok(to_line(&report))
}

/// Loads the graph a summary file was built from, restricted to its
/// largest component when the summary was.
fn graph_for(graph: &Path, file: &SummaryFile) -> Result<LoadedGraph, CliError> {
    let loaded = load_graph(graph, file.meta.params.lcc)?;
    if !file.meta.source_hash.is_empty() && file.meta.source_hash != loaded.source_hash {
        eprintln!("warning: graph file hash differs from the one recorded in the summary");
    }
    if loaded.graph.node_count() != file.n {
        return Err(CliError::Mismatch(format!(
            "summary covers {} nodes but the graph has {}",
            file.n,
            loaded.graph.node_count()
        )));
    }
    Ok(loaded)
}

pub fn evaluate_cmd(graph: &Path, summary: &Path) -> Result<String, CliError> {
    let file = SummaryFile::read(summary)?;
    let loaded = graph_for(graph, &file)?;
    let stored = file.to_summary()?;
    let rebuilt = build_summary(&loaded.graph, stored.membership())?;
    let drift = stored
        .densities()
        .iter()
        .zip(rebuilt.densities())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if drift > DENSITY_DRIFT_TOL {
        return Err(CliError::Mismatch(format!(
            "stored densities differ from the graph by up to {drift:.3e}"
        )));
    }
    let report = evaluate(&loaded.graph, &rebuilt)?;
    Ok(to_line(&report))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelaxInit {
    LmEigvecs,
    Random,
}

#[derive(Debug, Clone)]
pub struct RelaxArgs {
    pub graph: PathBuf,
    pub k: usize,
    pub init: RelaxInit,
    pub iters: usize,
    pub tau: f64,
    pub tol: f64,
    pub lcc: bool,
    pub seed: u64,
    pub trace: Option<PathBuf>,
}

impl RelaxArgs {
    pub fn new(graph: impl Into<PathBuf>, k: usize) -> Self {
        let defaults = OcsaConfig::default();
        RelaxArgs {
            graph: graph.into(),
            k,
            init: RelaxInit::Random,
            iters: defaults.max_iterations,
            tau: defaults.initial_step,
            tol: defaults.relative_tolerance,
            lcc: false,
            seed: 0,
            trace: None,
        }
    }
}

pub fn relax(args: &RelaxArgs) -> Result<String, CliError> {
    let loaded = load_graph(&args.graph, args.lcc)?;
    let g = &loaded.graph;
    let n = g.node_count();
    if args.k == 0 || args.k > n {
        return Err(specsumm::Error::Parameter(format!("k = {} must lie in [1, {n}]", args.k)).into());
    }
    let z0 = match args.init {
        RelaxInit::LmEigvecs => {
            let options = LanczosOptions {
                seed: args.seed,
                ..Default::default()
            };
            RelaxedSolution::new(lm_eigs(g, args.k, options)?.into_vectors())?
        }
        RelaxInit::Random => random_orthonormal_init(n, args.k, args.seed)?,
    };
    let config = OcsaConfig {
        max_iterations: args.iters,
        initial_step: args.tau,
        relative_tolerance: args.tol,
        ..Default::default()
    };
    let (z, trace) = ocsa(g, &z0, &config)?;
    if let Some(path) = &args.trace {
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        let mut out = BufWriter::new(file);
        let write = |out: &mut BufWriter<File>| -> std::io::Result<()> {
            writeln!(out, "iter\tF\ttau")?;
            writeln!(out, "0\t{}\t0", trace.objectives[0])?;
            for (t, (f, tau)) in trace.objectives[1..].iter().zip(&trace.steps).enumerate() {
                writeln!(out, "{}\t{f}\t{tau}", t + 1)?;
            }
            out.flush()
        };
        write(&mut out).map_err(|e| CliError::io(path, e))?;
    }
    Ok(to_line(&json!({
        "F": trace.final_objective(),
        "F_initial": trace.objectives[0],
        "iterations": trace.iterations(),
        "termination": trace.termination.as_str(),
        "orthonormality_error": orthonormality_error(z.matrix()),
    })))
}

#[derive(Debug, Clone)]
pub struct GenSbmArgs {
    pub blocks: usize,
    pub size: usize,
    pub p_in: f64,
    pub p_out: f64,
    pub seed: u64,
    pub out: PathBuf,
    /// Defaults to the edge-list path with `.membership` appended.
    pub membership_out: Option<PathBuf>,
}

pub fn gen_sbm(args: &GenSbmArgs) -> Result<String, CliError> {
    let (g, planted) = generate_sbm(args.blocks, args.size, args.p_in, args.p_out, args.seed)?;
    let file = File::create(&args.out).map_err(|e| CliError::io(&args.out, e))?;
    let mut out = BufWriter::new(file);
    write_edge_list(&g, &mut out)
        .and_then(|_| out.flush())
        .map_err(|e| CliError::io(&args.out, e))?;

    let membership_path = args.membership_out.clone().unwrap_or_else(|| {
        let mut p = args.out.clone().into_os_string();
        p.push(".membership");
        PathBuf::from(p)
    });
    let file = File::create(&membership_path).map_err(|e| CliError::io(&membership_path, e))?;
    let mut out = BufWriter::new(file);
    let write = |out: &mut BufWriter<File>| -> std::io::Result<()> {
        for (v, b) in planted.assignment().iter().enumerate() {
            writeln!(out, "{v}\t{b}")?;
        }
        out.flush()
    };
    write(&mut out).map_err(|e| CliError::io(&membership_path, e))?;
    Ok(to_line(&json!({
        "n": g.node_count(),
        "m": g.edge_count(),
        "edges": args.out.display().to_string(),
        "membership": membership_path.display().to_string(),
    })))
}

pub fn triangles(graph: &Path, summary: &Path) -> Result<String, CliError> {
    let file = SummaryFile::read(summary)?;
    let loaded = graph_for(graph, &file)?;
    let stored = file.to_summary()?;
    let estimate = expected_triangles(&stored);
    Ok(to_line(&json!({
        "estimate": estimate.value,
        "method": estimate.method.as_str(),
        "exact": exact_triangles(&loaded.graph),
    })))
}
