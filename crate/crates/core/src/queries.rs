//! Queries answered from a summary: edge probabilities and expected
//! triangle counts, with exact oracles on the source graph.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::summary::Summary;

/// Largest node count accepted by [`triangles_triple_sum_oracle`].
pub const TRIPLE_SUM_LIMIT: usize = 1500;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriangleMethod {
    ClosedForm,
    TripleSumOracle,
}

impl TriangleMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            TriangleMethod::ClosedForm => "closed-form",
            TriangleMethod::TripleSumOracle => "triple-sum-oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleEstimate {
    pub value: f64,
    pub method: TriangleMethod,
}

/// Edge probability between two distinct members of supernodes `i` and `j`.
fn supernode_pi(summary: &Summary, i: usize, j: usize) -> f64 {
    let d = summary.density(i, j);
    if i != j {
        return d.clamp(0.0, 1.0);
    }
    let ni = summary.membership().sizes()[i] as f64;
    if ni < 2.0 {
        return 0.0;
    }
    (d * ni / (ni - 1.0)).clamp(0.0, 1.0)
}

/// Probability that distinct nodes `u` and `v` are adjacent under the
/// summary's random-graph model.
pub fn pair_probability(summary: &Summary, u: usize, v: usize) -> Result<f64> {
    let n = summary.node_count();
    if u >= n || v >= n {
        return Err(Error::param(format!("node pair ({u}, {v}) out of range for {n} nodes")));
    }
    if u == v {
        return Err(Error::param("pair probability needs two distinct nodes"));
    }
    let m = summary.membership();
    Ok(supernode_pi(summary, m.supernode_of(u), m.supernode_of(v)))
}

fn choose2(n: f64) -> f64 {
    n * (n - 1.0) / 2.0
}

fn choose3(n: f64) -> f64 {
    n * (n - 1.0) * (n - 2.0) / 6.0
}

/// Expected triangle count in `O(k³)`, summing over triangles inside one
/// supernode, spanning two, and spanning three.
pub fn expected_triangles(summary: &Summary) -> TriangleEstimate {
    let k = summary.k();
    let sizes: Vec<f64> = summary.membership().sizes().iter().map(|&s| s as f64).collect();
    let pi: Vec<f64> = (0..k * k).map(|idx| supernode_pi(summary, idx / k, idx % k)).collect();
    let p = |i: usize, j: usize| pi[i * k + j];

    let mut total = 0.0;
    for i in 0..k {
        let ni = sizes[i];
        let mut term = choose3(ni) * p(i, i).powi(3);
        for j in i + 1..k {
            let nj = sizes[j];
            let pij = p(i, j);
            if pij == 0.0 {
                continue;
            }
            term += pij * pij * (choose2(ni) * nj * p(i, i) + choose2(nj) * ni * p(j, j));
            let mut three = 0.0;
            for w in j + 1..k {
                three += sizes[w] * p(j, w) * p(w, i);
            }
            term += ni * nj * pij * three;
        }
        total += term;
    }
    TriangleEstimate {
        value: total.max(0.0),
        method: TriangleMethod::ClosedForm,
    }
}

/// Sum over unordered node triples of the product of pair probabilities.
/// `O(n³)`; refused above [`TRIPLE_SUM_LIMIT`] nodes.
pub fn triangles_triple_sum_oracle(summary: &Summary) -> Result<TriangleEstimate> {
    let n = summary.node_count();
    if n > TRIPLE_SUM_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: TRIPLE_SUM_LIMIT,
        });
    }
    let mut total = 0.0;
    for u in 0..n {
        for v in u + 1..n {
            let puv = pair_probability(summary, u, v)?;
            if puv == 0.0 {
                continue;
            }
            for w in v + 1..n {
                total += puv * pair_probability(summary, v, w)? * pair_probability(summary, w, u)?;
            }
        }
    }
    Ok(TriangleEstimate {
        value: total,
        method: TriangleMethod::TripleSumOracle,
    })
}

/// Exact triangle count by sorted-neighbor intersection.
pub fn exact_triangles(graph: &Graph) -> u64 {
    let mut count = 0;
    for u in 0..graph.node_count() {
        let nu = graph.neighbors(u);
        for &v in nu.iter().filter(|&&v| v > u) {
            let nv = graph.neighbors(v);
            let (mut a, mut b) = (0, 0);
            while a < nu.len() && b < nv.len() {
                match nu[a].cmp(&nv[b]) {
                    std::cmp::Ordering::Less => a += 1,
                    std::cmp::Ordering::Greater => b += 1,
                    std::cmp::Ordering::Equal => {
                        if nu[a] > v {
                            count += 1;
                        }
                        a += 1;
                        b += 1;
                    }
                }
            }
        }
    }
    count
}
