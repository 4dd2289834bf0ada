//! Simple undirected graphs in compressed sparse row form.
//!
//! Node ids are dense and 0-based. Ingestion from edge lists relabels
//! arbitrary non-negative ids into `[0, n)` in ascending original-id order
//! and records the mapping as a [`NodeRelabeling`].

use std::collections::{HashSet, VecDeque};
use std::io::{BufRead, Write};

use nalgebra::DMatrix;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng;
use crate::summary::Membership;

/// Immutable simple undirected graph.
///
/// Neighbor lists are sorted ascending, contain no duplicates and no
/// self-loops, and adjacency is symmetric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

/// Mapping from retained original node ids to dense ids.
///
/// `original[i]` is the original id of dense node `i`; the array is strictly
/// ascending, so the forward direction is a binary search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeRelabeling {
    original: Vec<u64>,
}

#[derive(Debug, Clone, Copy)]
pub struct LoadOptions {
    /// Collapse repeated edges. When false a repeated edge is an error.
    pub dedupe: bool,
    /// Drop `u u` lines. When false a self-loop is an error.
    pub drop_self_loops: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            dedupe: true,
            drop_self_loops: true,
        }
    }
}

impl Graph {
    /// Builds a graph on `n` nodes, silently dropping self-loops and
    /// duplicate edges.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n == 0 {
            return Err(Error::param("graph must have at least one node"));
        }
        let mut pairs = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::param(format!(
                    "edge ({u}, {v}) out of range for {n} nodes"
                )));
            }
            if u != v {
                pairs.push((u, v));
            }
        }
        Ok(Self::from_pairs_unchecked(n, &pairs))
    }

    fn from_pairs_unchecked(n: usize, pairs: &[(usize, usize)]) -> Graph {
        let mut degree = vec![0usize; n];
        for &(u, v) in pairs {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for u in 0..n {
            offsets[u + 1] = offsets[u] + degree[u];
        }
        let mut cursor = offsets[..n].to_vec();
        let mut targets = vec![0usize; offsets[n]];
        for &(u, v) in pairs {
            targets[cursor[u]] = v;
            cursor[u] += 1;
            targets[cursor[v]] = u;
            cursor[v] += 1;
        }
        // sort + dedup each row, then compact
        let mut compact_offsets = vec![0usize; n + 1];
        let mut write = 0;
        for u in 0..n {
            let row = &mut targets[offsets[u]..offsets[u + 1]];
            row.sort_unstable();
            let start = offsets[u];
            let end = offsets[u + 1];
            let mut last = None;
            for idx in start..end {
                let t = targets[idx];
                if last != Some(t) {
                    targets[write] = t;
                    write += 1;
                    last = Some(t);
                }
            }
            compact_offsets[u + 1] = write;
        }
        targets.truncate(write);
        Graph {
            offsets: compact_offsets,
            targets,
        }
    }

    /// Complete graph K_n.
    pub fn complete(n: usize) -> Result<Graph> {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::from_edges(n, edges)
    }

    /// Path graph P_n.
    pub fn path(n: usize) -> Result<Graph> {
        Graph::from_edges(n, (1..n).map(|v| (v - 1, v)))
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    #[inline]
    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.node_count() && self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// `A x`, summing each row over its neighbors in ascending order.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.node_count();
        if x.len() != n {
            return Err(Error::dims(n, x.len()));
        }
        Ok((0..n)
            .map(|u| self.neighbors(u).iter().map(|&v| x[v]).sum())
            .collect())
    }

    /// `A X` for a dense `n × k` matrix.
    pub fn spmm(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let n = self.node_count();
        if x.nrows() != n {
            return Err(Error::dims(format!("{n} rows"), format!("{} rows", x.nrows())));
        }
        let k = x.ncols();
        let mut out = DMatrix::zeros(n, k);
        let src = x.as_slice();
        let dst = out.as_mut_slice();
        for j in 0..k {
            let col = &src[j * n..(j + 1) * n];
            let out_col = &mut dst[j * n..(j + 1) * n];
            for (u, slot) in out_col.iter_mut().enumerate() {
                *slot = self.neighbors(u).iter().map(|&v| col[v]).sum();
            }
        }
        Ok(out)
    }

    /// `tr(A²)`, which equals `2m` for a simple graph.
    pub fn adjacency_trace_sq(&self) -> f64 {
        self.targets.len() as f64
    }

    /// Dense adjacency matrix. Intended for small graphs and test oracles.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.node_count();
        let mut a = DMatrix::zeros(n, n);
        for u in 0..n {
            for &v in self.neighbors(u) {
                a[(u, v)] = 1.0;
            }
        }
        a
    }

    /// Subgraph induced on `keep` (ascending, distinct node ids).
    fn induced(&self, keep: &[usize]) -> Graph {
        let mut new_id = vec![usize::MAX; self.node_count()];
        for (i, &u) in keep.iter().enumerate() {
            new_id[u] = i;
        }
        let pairs: Vec<(usize, usize)> = self
            .edges()
            .filter(|&(u, v)| new_id[u] != usize::MAX && new_id[v] != usize::MAX)
            .map(|(u, v)| (new_id[u], new_id[v]))
            .collect();
        Self::from_pairs_unchecked(keep.len(), &pairs)
    }
}

impl NodeRelabeling {
    pub fn identity(n: usize) -> Self {
        NodeRelabeling {
            original: (0..n as u64).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.original.len()
    }

    pub fn is_empty(&self) -> bool {
        self.original.is_empty()
    }

    pub fn original_id(&self, dense: usize) -> u64 {
        self.original[dense]
    }

    pub fn dense_id(&self, original: u64) -> Option<usize> {
        self.original.binary_search(&original).ok()
    }

    /// Original ids indexed by dense id.
    pub fn original_ids(&self) -> &[u64] {
        &self.original
    }

    /// Composes `self` (original → intermediate) with `next`
    /// (intermediate → dense).
    pub fn then(&self, next: &NodeRelabeling) -> NodeRelabeling {
        NodeRelabeling {
            original: next
                .original
                .iter()
                .map(|&mid| self.original[mid as usize])
                .collect(),
        }
    }
}

/// Parses a whitespace-separated edge list.
///
/// Lines starting with `#` or `%` are comments; blank lines are skipped.
/// Nodes are the endpoints of retained edges, relabeled densely in
/// ascending original-id order.
pub fn load_edge_list<R: BufRead>(reader: R, options: LoadOptions) -> Result<(Graph, NodeRelabeling)> {
    let mut raw: Vec<(u64, u64)> = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') || text.starts_with('%') {
            continue;
        }
        let mut tokens = text.split_whitespace();
        let mut next_id = || -> Result<u64> {
            let tok = tokens.next().ok_or_else(|| Error::Parse {
                line: lineno,
                message: "expected two node ids".into(),
            })?;
            tok.parse::<u64>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("invalid node id {tok:?}"),
            })
        };
        let u = next_id()?;
        let v = next_id()?;
        if let Some(extra) = tokens.next() {
            return Err(Error::Parse {
                line: lineno,
                message: format!("unexpected token {extra:?} after edge"),
            });
        }
        if u == v {
            if options.drop_self_loops {
                continue;
            }
            return Err(Error::Parse {
                line: lineno,
                message: format!("self-loop on node {u}"),
            });
        }
        let edge = (u.min(v), u.max(v));
        if !options.dedupe && !seen.insert(edge) {
            return Err(Error::Parse {
                line: lineno,
                message: format!("duplicate edge {u} {v}"),
            });
        }
        raw.push(edge);
    }
    if raw.is_empty() {
        return Err(Error::EmptyGraph);
    }

    let mut ids: Vec<u64> = raw.iter().flat_map(|&(u, v)| [u, v]).collect();
    ids.sort_unstable();
    ids.dedup();
    let relabel = NodeRelabeling { original: ids };
    let pairs: Vec<(usize, usize)> = raw
        .iter()
        .map(|&(u, v)| {
            (
                relabel.dense_id(u).expect("id collected above"),
                relabel.dense_id(v).expect("id collected above"),
            )
        })
        .collect();
    let graph = Graph::from_pairs_unchecked(relabel.len(), &pairs);
    Ok((graph, relabel))
}

/// Writes each edge once as `u v` with `u < v`.
pub fn write_edge_list<W: Write>(graph: &Graph, mut out: W) -> std::io::Result<()> {
    for (u, v) in graph.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

/// Connected component labels (by BFS from ascending start nodes) and sizes.
pub fn connected_components(graph: &Graph) -> (Vec<usize>, Vec<usize>) {
    let n = graph.node_count();
    let mut label = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        let c = sizes.len();
        label[start] = c;
        queue.push_back(start);
        let mut size = 0;
        while let Some(u) = queue.pop_front() {
            size += 1;
            for &v in graph.neighbors(u) {
                if label[v] == usize::MAX {
                    label[v] = c;
                    queue.push_back(v);
                }
            }
        }
        sizes.push(size);
    }
    (label, sizes)
}

/// Largest connected component, densely relabeled.
///
/// Components of equal size are ranked by their smallest node id.
pub fn largest_connected_component(graph: &Graph) -> (Graph, NodeRelabeling) {
    let (label, sizes) = connected_components(graph);
    // components are numbered in order of their smallest node, so the first
    // maximum wins ties
    let best = sizes
        .iter()
        .enumerate()
        .fold(0, |best, (c, &s)| if s > sizes[best] { c } else { best });
    if sizes.len() == 1 {
        return (graph.clone(), NodeRelabeling::identity(graph.node_count()));
    }
    let keep: Vec<usize> = (0..graph.node_count()).filter(|&u| label[u] == best).collect();
    let sub = graph.induced(&keep);
    let relabel = NodeRelabeling {
        original: keep.iter().map(|&u| u as u64).collect(),
    };
    (sub, relabel)
}

/// Planted-partition stochastic block model.
///
/// Node `u` belongs to block `u / block_size`. Each unordered pair of
/// distinct nodes is sampled once, in lexicographic order, as an edge with
/// probability `p_in` (same block) or `p_out` (different blocks).
pub fn generate_sbm(
    blocks: usize,
    block_size: usize,
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Result<(Graph, Membership)> {
    if blocks == 0 || block_size == 0 {
        return Err(Error::param("blocks and block_size must be at least 1"));
    }
    if !(0.0..=1.0).contains(&p_in) || !(0.0..=1.0).contains(&p_out) {
        return Err(Error::param("probabilities must lie in [0, 1]"));
    }
    if p_out > p_in {
        return Err(Error::param("p_out must not exceed p_in"));
    }
    let n = blocks * block_size;
    let mut rng = rng::seeded_stream(seed, rng::stream::SBM);
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if u / block_size == v / block_size { p_in } else { p_out };
            if rng.random::<f64>() < p {
                pairs.push((u, v));
            }
        }
    }
    let graph = Graph::from_pairs_unchecked(n, &pairs);
    let planted = Membership::new((0..n).map(|u| u / block_size).collect(), blocks)?;
    Ok((graph, planted))
}
