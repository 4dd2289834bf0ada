//! k-summaries: supernode memberships, density matrices and the
//! reconstruction objective.
//!
//! Supernode edge counts use the ordered-pair convention
//! `E_ij = Σ_{u∈V_i, v∈V_j} A(u,v)`, so intra-supernode edges are counted
//! twice on the diagonal and `density(i, j) = E_ij / (n_i n_j)` holds for
//! every pair, diagonal included. The trace objective of a membership is
//! `F = Σ_ij E_ij² / (n_i n_j)` and the l2 reconstruction loss is
//! `L = 2m − F`.

mod pipeline;
mod reassign;

pub use pipeline::{evaluate, specsumm, EvalReport, PhaseTimings, RelaxMethod, SpecSummConfig};
pub use reassign::{reassignment, reassignment_with_observer, MoveRecord, ReassignConfig, Reassigner};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::stiefel::RelaxedSolution;

/// Assignment of every node to one of `k` non-empty supernodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Membership {
    k: usize,
    assign: Vec<usize>,
    sizes: Vec<usize>,
}

impl Membership {
    pub fn new(assign: Vec<usize>, k: usize) -> Result<Membership> {
        if k == 0 {
            return Err(Error::param("summary size k must be at least 1"));
        }
        if assign.is_empty() {
            return Err(Error::param("membership must cover at least one node"));
        }
        let mut sizes = vec![0usize; k];
        for (v, &s) in assign.iter().enumerate() {
            if s >= k {
                return Err(Error::Invariant(format!("node {v} assigned to supernode {s} >= k = {k}")));
            }
            sizes[s] += 1;
        }
        if let Some(empty) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::Invariant(format!("supernode {empty} is empty")));
        }
        Ok(Membership { k, assign, sizes })
    }

    /// Every node in its own supernode, `S(v) = v`.
    pub fn singletons(n: usize) -> Result<Membership> {
        Membership::new((0..n).collect(), n)
    }

    /// All nodes in one supernode.
    pub fn single(n: usize) -> Result<Membership> {
        Membership::new(vec![0; n], 1)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn node_count(&self) -> usize {
        self.assign.len()
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assign
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    #[inline]
    pub fn supernode_of(&self, v: usize) -> usize {
        self.assign[v]
    }

    pub fn members(&self, supernode: usize) -> Vec<usize> {
        (0..self.assign.len()).filter(|&v| self.assign[v] == supernode).collect()
    }

    /// Same partition with supernodes renumbered in order of first
    /// appearance. Two memberships describe the same partition iff their
    /// canonical forms are equal.
    pub fn canonical(&self) -> Membership {
        let mut map = vec![usize::MAX; self.k];
        let mut next = 0;
        let assign = self
            .assign
            .iter()
            .map(|&s| {
                if map[s] == usize::MAX {
                    map[s] = next;
                    next += 1;
                }
                map[s]
            })
            .collect();
        let mut sizes = vec![0; self.k];
        for (old, &new) in map.iter().enumerate() {
            sizes[new] = self.sizes[old];
        }
        Membership { k: self.k, assign, sizes }
    }

    pub(crate) fn move_node(&mut self, v: usize, to: usize) {
        let from = self.assign[v];
        self.sizes[from] -= 1;
        self.sizes[to] += 1;
        self.assign[v] = to;
    }

    fn check_nodes(&self, graph: &Graph) -> Result<()> {
        if self.node_count() != graph.node_count() {
            return Err(Error::dims(
                format!("membership over {} nodes", graph.node_count()),
                self.node_count(),
            ));
        }
        Ok(())
    }
}

/// Ordered-pair edge counts between supernodes, `k × k` row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupernodeEdgeCounts {
    k: usize,
    counts: Vec<u64>,
}

impl SupernodeEdgeCounts {
    pub fn compute(graph: &Graph, membership: &Membership) -> Result<SupernodeEdgeCounts> {
        membership.check_nodes(graph)?;
        let k = membership.k();
        let mut counts = vec![0u64; k * k];
        for u in 0..graph.node_count() {
            let su = membership.supernode_of(u);
            for &v in graph.neighbors(u) {
                counts[su * k + membership.supernode_of(v)] += 1;
            }
        }
        Ok(SupernodeEdgeCounts { k, counts })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.k + j]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `Σ_ij E_ij² / (n_i n_j)`.
    pub fn objective(&self, sizes: &[usize]) -> f64 {
        let k = self.k;
        let mut f = 0.0;
        for i in 0..k {
            for j in 0..k {
                let e = self.counts[i * k + j] as f64;
                if e != 0.0 {
                    f += e * e / (sizes[i] as f64 * sizes[j] as f64);
                }
            }
        }
        f
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, value: u64) {
        self.counts[i * self.k + j] = value;
    }
}

/// Summary graph: membership plus the symmetric `k × k` density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    membership: Membership,
    density: Vec<f64>,
}

impl Summary {
    /// Assembles a summary from stored parts, checking symmetry and the
    /// density bounds implied by a simple source graph.
    pub fn from_parts(membership: Membership, density: Vec<f64>) -> Result<Summary> {
        let k = membership.k();
        if density.len() != k * k {
            return Err(Error::dims(k * k, density.len()));
        }
        for i in 0..k {
            let ni = membership.sizes()[i] as f64;
            for j in 0..k {
                let d = density[i * k + j];
                if !(0.0..=1.0).contains(&d) {
                    return Err(Error::Invariant(format!("density ({i}, {j}) = {d} outside [0, 1]")));
                }
                if d != density[j * k + i] {
                    return Err(Error::Invariant(format!("density not symmetric at ({i}, {j})")));
                }
            }
            let dii = density[i * k + i];
            if dii * ni * ni > ni * (ni - 1.0) + 1e-9 {
                return Err(Error::Invariant(format!(
                    "diagonal density {dii} of supernode {i} exceeds (n_i - 1)/n_i"
                )));
            }
        }
        Ok(Summary { membership, density })
    }

    pub fn membership(&self) -> &Membership {
        &self.membership
    }

    pub fn k(&self) -> usize {
        self.membership.k()
    }

    pub fn node_count(&self) -> usize {
        self.membership.node_count()
    }

    #[inline]
    pub fn density(&self, i: usize, j: usize) -> f64 {
        self.density[i * self.k() + j]
    }

    /// Row-major `k × k` densities.
    pub fn densities(&self) -> &[f64] {
        &self.density
    }

    /// `Σ_ij d_ij² n_i n_j`, the trace objective recovered from densities.
    pub fn objective(&self) -> f64 {
        let k = self.k();
        let sizes = self.membership.sizes();
        let mut f = 0.0;
        for i in 0..k {
            for j in 0..k {
                let d = self.density[i * k + j];
                f += d * d * sizes[i] as f64 * sizes[j] as f64;
            }
        }
        f
    }
}

/// `Z = X (XᵀX)^{-1/2}`: column `j` holds `1/√n_j` on the members of
/// supernode `j`.
pub fn membership_to_normalized(membership: &Membership) -> Result<RelaxedSolution> {
    let n = membership.node_count();
    let k = membership.k();
    let sizes = membership.sizes();
    if let Some(empty) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::Invariant(format!("supernode {empty} is empty")));
    }
    let mut z = DMatrix::zeros(n, k);
    for v in 0..n {
        let s = membership.supernode_of(v);
        z[(v, s)] = 1.0 / (sizes[s] as f64).sqrt();
    }
    Ok(RelaxedSolution::from_trusted(z))
}

/// Trace objective `tr((ZᵀAZ)²)` of the normalized membership.
pub fn objective_integer(graph: &Graph, membership: &Membership) -> Result<f64> {
    let counts = SupernodeEdgeCounts::compute(graph, membership)?;
    Ok(counts.objective(membership.sizes()))
}

/// Density matrix `d_ij = E_ij / (n_i n_j)`.
pub fn build_summary(graph: &Graph, membership: &Membership) -> Result<Summary> {
    let counts = SupernodeEdgeCounts::compute(graph, membership)?;
    Ok(summary_from_counts(membership.clone(), &counts))
}

pub(crate) fn summary_from_counts(membership: Membership, counts: &SupernodeEdgeCounts) -> Summary {
    let k = membership.k();
    let sizes = membership.sizes();
    let mut density = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            density[i * k + j] = counts.get(i, j) as f64 / (sizes[i] as f64 * sizes[j] as f64);
        }
    }
    Summary { membership, density }
}

/// Entry `(u, v)` of the lifted adjacency matrix, `d_{S(u) S(v)}`.
/// Diagonal entries follow the projection form and may be non-zero.
pub fn lifted_entry(summary: &Summary, u: usize, v: usize) -> Result<f64> {
    let n = summary.node_count();
    if u >= n || v >= n {
        return Err(Error::param(format!("node ({u}, {v}) out of range for {n} nodes")));
    }
    let m = summary.membership();
    Ok(summary.density(m.supernode_of(u), m.supernode_of(v)))
}

/// `‖A − A↑‖_F² = tr(A²) − F`.
pub fn l2_loss(graph: &Graph, summary: &Summary) -> Result<f64> {
    summary.membership().check_nodes(graph)?;
    Ok(graph.adjacency_trace_sq() - objective_integer(graph, summary.membership())?)
}

/// `Σ_u Σ_v (A(u,v) − A↑(u,v))²` evaluated entry by entry. Reference
/// implementation for tests, `O(n²)`.
pub fn l2_loss_dense(graph: &Graph, summary: &Summary) -> Result<f64> {
    summary.membership().check_nodes(graph)?;
    let n = graph.node_count();
    let mut total = 0.0;
    for u in 0..n {
        for v in 0..n {
            let a = if graph.has_edge(u, v) { 1.0 } else { 0.0 };
            let diff = a - lifted_entry(summary, u, v)?;
            total += diff * diff;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stiefel::trace_objective_relaxed;

    fn k3_split() -> (Graph, Membership) {
        (Graph::complete(3).unwrap(), Membership::new(vec![0, 0, 1], 2).unwrap())
    }

    fn two_triangles() -> Graph {
        Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap()
    }

    #[test]
    fn membership_validation() {
        assert!(Membership::new(vec![0, 2], 3).is_err());
        assert!(Membership::new(vec![0, 3], 3).is_err());
        assert!(Membership::new(vec![0, 0], 0).is_err());
        let m = Membership::new(vec![1, 0, 1], 2).unwrap();
        assert_eq!(m.sizes(), &[1, 2]);
        assert_eq!(m.canonical().assignment(), &[0, 1, 0]);
        assert_eq!(m.canonical().sizes(), &[2, 1]);
        assert_eq!(m.members(1), vec![0, 2]);
    }

    #[test]
    fn normalized_membership() {
        let (_, m) = k3_split();
        let z = membership_to_normalized(&m).unwrap();
        let h = 1.0 / 2f64.sqrt();
        let expect = DMatrix::from_row_slice(3, 2, &[h, 0.0, h, 0.0, 0.0, 1.0]);
        assert_eq!(z.matrix(), &expect);

        let z = membership_to_normalized(&Membership::singletons(4).unwrap()).unwrap();
        assert_eq!(z.matrix(), &DMatrix::<f64>::identity(4, 4));

        let z = membership_to_normalized(&Membership::single(4).unwrap()).unwrap();
        assert!(z.matrix().iter().all(|&x| x == 0.5));
    }

    #[test]
    fn objective_examples() {
        let (g, m) = k3_split();
        assert_eq!(objective_integer(&g, &m).unwrap(), 5.0);
        let planted = Membership::new(vec![0, 0, 0, 1, 1, 1], 2).unwrap();
        assert_eq!(objective_integer(&two_triangles(), &planted).unwrap(), 8.0);
        for g in [Graph::complete(5).unwrap(), Graph::path(7).unwrap(), two_triangles()] {
            let s = Membership::singletons(g.node_count()).unwrap();
            assert_eq!(objective_integer(&g, &s).unwrap(), g.adjacency_trace_sq());
        }
    }

    #[test]
    fn objective_matches_relaxed_form() {
        let (g, m) = k3_split();
        let z = membership_to_normalized(&m).unwrap();
        let relaxed = trace_objective_relaxed(&g, &z).unwrap();
        assert!((relaxed - 5.0).abs() < 1e-12);
    }

    #[test]
    fn densities() {
        let (g, m) = k3_split();
        let s = build_summary(&g, &m).unwrap();
        assert_eq!(s.densities(), &[0.5, 1.0, 1.0, 0.0]);
        let k4 = Graph::complete(4).unwrap();
        let s = build_summary(&k4, &Membership::single(4).unwrap()).unwrap();
        assert_eq!(s.densities(), &[0.75]);
        let empty = Graph::from_edges(4, []).unwrap();
        let s = build_summary(&empty, &Membership::new(vec![0, 1, 0, 1], 2).unwrap()).unwrap();
        assert!(s.densities().iter().all(|&d| d == 0.0));
    }

    #[test]
    fn lifted_entries() {
        let (g, m) = k3_split();
        let s = build_summary(&g, &m).unwrap();
        assert_eq!(lifted_entry(&s, 0, 1).unwrap(), 0.5);
        assert_eq!(lifted_entry(&s, 0, 2).unwrap(), 1.0);
        assert_eq!(lifted_entry(&s, 2, 2).unwrap(), 0.0);
        assert!(lifted_entry(&s, 3, 0).is_err());
    }

    #[test]
    fn loss_examples() {
        let (g, m) = k3_split();
        let s = build_summary(&g, &m).unwrap();
        assert_eq!(l2_loss(&g, &s).unwrap(), 1.0);
        assert!((l2_loss_dense(&g, &s).unwrap() - 1.0).abs() < 1e-12);

        let s = build_summary(&g, &Membership::singletons(3).unwrap()).unwrap();
        assert_eq!(l2_loss(&g, &s).unwrap(), 0.0);

        let tt = two_triangles();
        let planted = Membership::new(vec![0, 0, 0, 1, 1, 1], 2).unwrap();
        let s = build_summary(&tt, &planted).unwrap();
        assert_eq!(l2_loss(&tt, &s).unwrap(), 4.0);
        assert!((l2_loss_dense(&tt, &s).unwrap() - 4.0).abs() < 1e-12);

        assert!(l2_loss(&Graph::complete(4).unwrap(), &s).is_err());
    }

    #[test]
    fn counts_total_is_twice_edges() {
        let g = Graph::path(6).unwrap();
        let m = Membership::new(vec![0, 1, 2, 0, 1, 2], 3).unwrap();
        let c = SupernodeEdgeCounts::compute(&g, &m).unwrap();
        assert_eq!(c.total(), 2 * g.edge_count() as u64);
        let s = build_summary(&g, &m).unwrap();
        assert!((s.objective() - c.objective(m.sizes())).abs() < 1e-12);
    }

    #[test]
    fn summary_from_parts_rejects_bad_densities() {
        let m = Membership::new(vec![0, 0, 1], 2).unwrap();
        assert!(Summary::from_parts(m.clone(), vec![0.5, 1.0, 1.0, 0.0]).is_ok());
        assert!(Summary::from_parts(m.clone(), vec![0.5, 1.0, 0.9, 0.0]).is_err());
        assert!(Summary::from_parts(m.clone(), vec![0.75, 1.0, 1.0, 0.0]).is_err());
        assert!(Summary::from_parts(m.clone(), vec![0.5, 1.5, 1.5, 0.0]).is_err());
        assert!(Summary::from_parts(m, vec![0.5]).is_err());
    }
}
