//! End-to-end summarization: spectral embedding, k-means, optional
//! reassignment, densities.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use super::reassign::{reassignment, ReassignConfig};
use super::{summary_from_counts, Membership, Summary, SupernodeEdgeCounts};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::kmeans::{minibatch_kmeans, KmeansConfig, PointSet};
use crate::queries::expected_triangles;
use crate::spectral::{lm_eigs, LanczosOptions};
use crate::stiefel::{ocsa, random_orthonormal_init, OcsaConfig};

/// How the relaxed embedding is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelaxMethod {
    /// Largest-magnitude eigenvectors of the adjacency matrix.
    LmEigvecs,
    /// Stiefel ascent from a random orthonormal start.
    OcsaRandom,
}

impl RelaxMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            RelaxMethod::LmEigvecs => "lm-eigvecs",
            RelaxMethod::OcsaRandom => "ocsa-random",
        }
    }
}

impl fmt::Display for RelaxMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelaxMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lm-eigvecs" | "lm" => Ok(RelaxMethod::LmEigvecs),
            "ocsa-random" | "ocsa" => Ok(RelaxMethod::OcsaRandom),
            other => Err(Error::param(format!("unknown relaxation method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpecSummConfig {
    /// Number of supernodes.
    pub k: usize,
    /// Embedding dimension; `None` means `k`.
    pub d: Option<usize>,
    pub method: RelaxMethod,
    pub lanczos: LanczosOptions,
    pub ocsa: OcsaConfig,
    pub kmeans: KmeansConfig,
    /// Reassignment phase; `None` skips it.
    pub reassign: Option<ReassignConfig>,
    /// Seed for the random orthonormal start of [`RelaxMethod::OcsaRandom`].
    pub seed: u64,
}

impl SpecSummConfig {
    /// Defaults with every component seeded from `seed`.
    pub fn new(k: usize, seed: u64) -> Self {
        SpecSummConfig {
            k,
            d: None,
            method: RelaxMethod::LmEigvecs,
            lanczos: LanczosOptions {
                seed,
                ..Default::default()
            },
            ocsa: OcsaConfig::default(),
            kmeans: KmeansConfig {
                seed,
                ..Default::default()
            },
            reassign: None,
            seed,
        }
    }

    /// Enables reassignment with `rounds` rounds of `samples` nodes.
    pub fn with_reassign(mut self, rounds: usize, samples: usize) -> Self {
        self.reassign = Some(ReassignConfig {
            rounds,
            samples_per_round: samples,
            seed: self.seed,
        });
        self
    }
}

/// Wall-clock seconds per phase.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct PhaseTimings {
    pub embed_secs: f64,
    pub cluster_secs: f64,
    pub reassign_secs: f64,
    pub summary_secs: f64,
}

/// Quality of a summary against its source graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    /// Trace objective `F`.
    #[serde(rename = "F")]
    pub objective: f64,
    /// Reconstruction loss `L = 2m − F`.
    #[serde(rename = "L")]
    pub l2_loss: f64,
    #[serde(rename = "sqrt_L")]
    pub sqrt_l2_loss: f64,
    pub triangles_estimate: f64,
    /// Objective after clustering, before reassignment.
    #[serde(rename = "F_phase1", skip_serializing_if = "Option::is_none")]
    pub objective_phase1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reassign_moves: Option<usize>,
    pub timings: PhaseTimings,
}

/// Computes `F`, `L` and the triangle estimate of `summary` on `graph`.
pub fn evaluate(graph: &Graph, summary: &Summary) -> Result<EvalReport> {
    let membership = summary.membership();
    if membership.node_count() != graph.node_count() {
        return Err(Error::dims(
            format!("summary over {} nodes", graph.node_count()),
            membership.node_count(),
        ));
    }
    let counts = SupernodeEdgeCounts::compute(graph, membership)?;
    Ok(report_from_counts(graph, summary, &counts))
}

fn report_from_counts(graph: &Graph, summary: &Summary, counts: &SupernodeEdgeCounts) -> EvalReport {
    let objective = counts.objective(summary.membership().sizes());
    let l2_loss = graph.adjacency_trace_sq() - objective;
    EvalReport {
        n: graph.node_count(),
        m: graph.edge_count(),
        k: summary.k(),
        objective,
        l2_loss,
        sqrt_l2_loss: l2_loss.max(0.0).sqrt(),
        triangles_estimate: expected_triangles(summary).value,
        objective_phase1: None,
        reassign_moves: None,
        timings: PhaseTimings::default(),
    }
}

/// Builds a k-summary of `graph`.
///
/// Nodes are embedded as the rows of a `d`-column relaxed solution,
/// clustered into `k` groups with mini-batch k-means, optionally refined by
/// reassignment, and summarized by their density matrix.
pub fn specsumm(graph: &Graph, config: &SpecSummConfig) -> Result<(Summary, EvalReport)> {
    let n = graph.node_count();
    let k = config.k;
    if k == 0 || k > n {
        return Err(Error::param(format!("summary size k = {k} must lie in [1, {n}]")));
    }
    let d = config.d.unwrap_or(k);
    if d == 0 || d > n {
        return Err(Error::param(format!("embedding dimension d = {d} must lie in [1, {n}]")));
    }
    let mut timings = PhaseTimings::default();

    let start = Instant::now();
    let embedding = match config.method {
        RelaxMethod::LmEigvecs => lm_eigs(graph, d, config.lanczos)?.into_vectors(),
        RelaxMethod::OcsaRandom => {
            let z0 = random_orthonormal_init(n, d, config.seed)?;
            ocsa(graph, &z0, &config.ocsa)?.0.into_matrix()
        }
    };
    timings.embed_secs = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let points = PointSet::from_rows(&embedding);
    let clustering = minibatch_kmeans(&points, k, &config.kmeans)?;
    let mut membership = Membership::new(clustering.assignment, k)?;
    let mut counts = SupernodeEdgeCounts::compute(graph, &membership)?;
    timings.cluster_secs = start.elapsed().as_secs_f64();
    let phase1 = counts.objective(membership.sizes());

    let mut moves = None;
    if let Some(reassign) = &config.reassign {
        let start = Instant::now();
        let (refined, log) = reassignment(graph, membership, counts, reassign)?;
        membership = refined;
        counts = SupernodeEdgeCounts::compute(graph, &membership)?;
        moves = Some(log.len());
        timings.reassign_secs = start.elapsed().as_secs_f64();
    }

    let start = Instant::now();
    let summary = summary_from_counts(membership, &counts);
    timings.summary_secs = start.elapsed().as_secs_f64();

    let mut report = report_from_counts(graph, &summary, &counts);
    report.objective_phase1 = Some(phase1);
    report.reassign_moves = moves;
    report.timings = timings;
    Ok((summary, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_sbm;

    fn two_triangles() -> Graph {
        Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap()
    }

    #[test]
    fn recovers_two_triangles() {
        let g = two_triangles();
        let (summary, report) = specsumm(&g, &SpecSummConfig::new(2, 3)).unwrap();
        assert_eq!(summary.membership().canonical().assignment(), &[0, 0, 0, 1, 1, 1]);
        assert!((report.objective - 8.0).abs() < 1e-12);
        assert!((report.l2_loss - 4.0).abs() < 1e-12);
        assert!((report.objective + report.l2_loss - 12.0).abs() < 1e-9);
    }

    #[test]
    fn singleton_limit_is_lossless() {
        for g in [two_triangles(), Graph::path(5).unwrap(), Graph::complete(4).unwrap()] {
            let n = g.node_count();
            let (summary, report) = specsumm(&g, &SpecSummConfig::new(n, 1)).unwrap();
            assert!(summary.membership().sizes().iter().all(|&s| s == 1));
            assert!(report.l2_loss.abs() < 1e-9);
        }
    }

    #[test]
    fn ocsa_route_runs() {
        let g = two_triangles();
        let mut config = SpecSummConfig::new(2, 4);
        config.method = RelaxMethod::OcsaRandom;
        config.ocsa.max_iterations = 500;
        config.ocsa.relative_tolerance = 0.0;
        let (summary, report) = specsumm(&g, &config).unwrap();
        assert_eq!(summary.k(), 2);
        assert!((report.objective + report.l2_loss - 12.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_sizes() {
        let g = two_triangles();
        assert!(matches!(specsumm(&g, &SpecSummConfig::new(0, 0)), Err(Error::Parameter(_))));
        assert!(matches!(specsumm(&g, &SpecSummConfig::new(7, 0)), Err(Error::Parameter(_))));
        let mut c = SpecSummConfig::new(2, 0);
        c.d = Some(9);
        assert!(matches!(specsumm(&g, &c), Err(Error::Parameter(_))));
    }

    #[test]
    fn reassignment_does_not_lower_objective() {
        let (g, _) = generate_sbm(5, 12, 0.5, 0.1, 8).unwrap();
        let config = SpecSummConfig::new(5, 2).with_reassign(4, 500);
        let (_, report) = specsumm(&g, &config).unwrap();
        assert!(report.objective >= report.objective_phase1.unwrap());
    }

    #[test]
    fn method_names_round_trip() {
        for m in [RelaxMethod::LmEigvecs, RelaxMethod::OcsaRandom] {
            assert_eq!(m.as_str().parse::<RelaxMethod>().unwrap(), m);
        }
        assert!("spectral".parse::<RelaxMethod>().is_err());
    }
}
