//! Largest-magnitude eigenpairs of the adjacency matrix.
//!
//! [`lm_eigs`] runs a block Lanczos iteration with full reorthogonalization
//! and thick restarts. Eigenvalues of a graph adjacency matrix sit at both
//! ends of the spectrum, so Ritz values are ranked by magnitude rather than
//! by value, and the block size equals the number of requested pairs so that
//! repeated eigenvalues (disconnected or highly symmetric graphs) are
//! resolved.

use std::cmp::Ordering;

use nalgebra::{DMatrix, SymmetricEigen};
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{self, Rng};

/// Largest graph handled by the dense fallback and the dense oracle.
pub const DENSE_LIMIT: usize = 512;

/// `d` eigenpairs sorted by descending magnitude.
///
/// Ties in magnitude put the positive eigenvalue first. Column `j` of
/// `vectors` is the unit eigenvector for `values[j]`; its first entry with
/// magnitude above `1e-10` is positive.
#[derive(Debug, Clone)]
pub struct EigenBasis {
    values: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl EigenBasis {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn into_vectors(self) -> DMatrix<f64> {
        self.vectors
    }

    /// `Σ_j λ_j²` over the stored pairs.
    pub fn sum_squares(&self) -> f64 {
        self.values.iter().map(|l| l * l).sum()
    }

    /// Keeps the leading `d` pairs.
    pub fn truncate(&self, d: usize) -> EigenBasis {
        let d = d.min(self.dim());
        EigenBasis {
            values: self.values[..d].to_vec(),
            vectors: self.vectors.columns(0, d).into_owned(),
        }
    }

    fn from_unsorted(values: &[f64], vectors: &DMatrix<f64>, take: usize) -> EigenBasis {
        let order = magnitude_order(values);
        let n = vectors.nrows();
        let mut out = DMatrix::zeros(n, take);
        let mut vals = Vec::with_capacity(take);
        for (j, &idx) in order.iter().take(take).enumerate() {
            vals.push(values[idx]);
            let mut col: Vec<f64> = vectors.column(idx).iter().copied().collect();
            normalize_sign(&mut col);
            out.column_mut(j).copy_from_slice(&col);
        }
        EigenBasis {
            values: vals,
            vectors: out,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    /// Relative residual tolerance: `‖A e − λ e‖ ≤ tol · max(1, |λ|)`.
    pub tol: f64,
    /// Maximum number of thick restarts.
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            tol: 1e-8,
            max_restarts: 1000,
            seed: 0,
        }
    }
}

/// Relative gap below which two magnitudes count as tied.
const MAGNITUDE_TIE: f64 = 1e-10;

/// Indices of `values` ordered by `|λ|` descending, then `λ` descending,
/// then index ascending. Magnitudes within rounding of each other tie.
pub fn magnitude_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        values[b]
            .abs()
            .partial_cmp(&values[a].abs())
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    // magnitudes equal up to rounding form one group, ordered by value
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() {
            let (x, y) = (values[idx[end - 1]].abs(), values[idx[end]].abs());
            if x - y > MAGNITUDE_TIE * x.max(1.0) {
                break;
            }
            end += 1;
        }
        idx[start..end].sort_by(|&a, &b| {
            values[b]
                .partial_cmp(&values[a])
                .unwrap_or(Ordering::Equal)
                .then(a.cmp(&b))
        });
        start = end;
    }
    idx
}

/// Flips `v` so that its first entry with magnitude above `1e-10` is positive.
pub fn normalize_sign(v: &mut [f64]) {
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-10) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// The `d` largest-magnitude eigenpairs of the adjacency matrix.
pub fn lm_eigs(graph: &Graph, d: usize, options: LanczosOptions) -> Result<EigenBasis> {
    let n = graph.node_count();
    if d == 0 || d > n {
        return Err(Error::param(format!("eigenvector count {d} must lie in [1, {n}]")));
    }
    if !(options.tol > 0.0) {
        return Err(Error::param("eigensolver tolerance must be positive"));
    }
    let mut solver = BlockLanczos::new(graph, d, options.seed);
    match solver.run(options.tol, options.max_restarts) {
        Ok(basis) => Ok(basis),
        Err(Error::Convergence { .. }) if n <= DENSE_LIMIT => dense_fallback(graph, d),
        Err(err) => Err(err),
    }
}

fn dense_fallback(graph: &Graph, d: usize) -> Result<EigenBasis> {
    let eig = SymmetricEigen::new(graph.to_dense());
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    Ok(EigenBasis::from_unsorted(&values, &eig.eigenvectors, d))
}

struct BlockLanczos<'g> {
    graph: &'g Graph,
    n: usize,
    d: usize,
    block: usize,
    capacity: usize,
    basis: Vec<Vec<f64>>,
    image: Vec<Vec<f64>>,
    rng: Rng,
}

struct RitzPairs {
    values: Vec<f64>,
    coeffs: DMatrix<f64>,
    order: Vec<usize>,
}

impl<'g> BlockLanczos<'g> {
    fn new(graph: &'g Graph, d: usize, seed: u64) -> Self {
        let n = graph.node_count();
        let capacity = n.min((4 * d).max(d + 20));
        BlockLanczos {
            graph,
            n,
            d,
            block: d.min(capacity),
            capacity,
            basis: Vec::with_capacity(capacity),
            image: Vec::with_capacity(capacity),
            rng: rng::seeded_stream(seed, rng::stream::EIGENSOLVER),
        }
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|u| self.graph.neighbors(u).iter().map(|&v| x[v]).sum())
            .collect()
    }

    fn random_vector(&mut self) -> Vec<f64> {
        (0..self.n).map(|_| StandardNormal.sample(&mut self.rng)).collect()
    }

    /// Orthonormalizes `candidates` against the basis and each other,
    /// dropping numerically dependent vectors.
    fn orthonormalize(&self, candidates: Vec<Vec<f64>>, accepted: &mut Vec<Vec<f64>>, limit: usize) {
        for mut w in candidates {
            if accepted.len() >= limit {
                break;
            }
            let before = norm(&w);
            if before == 0.0 {
                continue;
            }
            for _ in 0..2 {
                for q in self.basis.iter().chain(accepted.iter()) {
                    let c = dot(q, &w);
                    axpy(-c, q, &mut w);
                }
            }
            let after = norm(&w);
            if after > 1e-10 * before {
                w.iter_mut().for_each(|x| *x /= after);
                accepted.push(w);
            }
        }
    }

    /// Fills `block` with fresh random directions orthogonal to everything
    /// held so far.
    fn pad_random(&mut self, block: &mut Vec<Vec<f64>>, want: usize) {
        let room = self.n - self.basis.len();
        let want = want.min(room);
        let mut attempts = 0;
        while block.len() < want && attempts < 4 * want + 8 {
            let r = self.random_vector();
            self.orthonormalize(vec![r], block, want);
            attempts += 1;
        }
    }

    fn push_block(&mut self, block: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
        let mut images = Vec::with_capacity(block.len());
        for v in block {
            if self.basis.len() == self.capacity {
                break;
            }
            let av = self.apply(&v);
            images.push(av.clone());
            self.basis.push(v);
            self.image.push(av);
        }
        images
    }

    fn expand(&mut self, mut frontier: Vec<Vec<f64>>) {
        while self.basis.len() < self.capacity {
            if frontier.is_empty() {
                self.pad_random(&mut frontier, self.block);
                if frontier.is_empty() {
                    break;
                }
            }
            let images = self.push_block(frontier);
            if self.basis.len() >= self.capacity || self.basis.len() == self.n {
                break;
            }
            let mut next = Vec::with_capacity(self.block);
            self.orthonormalize(images, &mut next, self.block);
            if next.len() < self.block {
                self.pad_random(&mut next, self.block);
            }
            frontier = next;
        }
    }

    fn rayleigh_ritz(&self) -> RitzPairs {
        let j = self.basis.len();
        let mut h = DMatrix::zeros(j, j);
        for a in 0..j {
            for b in a..j {
                let v = 0.5 * (dot(&self.basis[a], &self.image[b]) + dot(&self.basis[b], &self.image[a]));
                h[(a, b)] = v;
                h[(b, a)] = v;
            }
        }
        let eig = SymmetricEigen::new(h);
        let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        let order = magnitude_order(&values);
        RitzPairs {
            values,
            coeffs: eig.eigenvectors,
            order,
        }
    }

    fn combine(vectors: &[Vec<f64>], coeffs: &DMatrix<f64>, col: usize, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for (i, v) in vectors.iter().enumerate() {
            let c = coeffs[(i, col)];
            if c != 0.0 {
                axpy(c, v, &mut out);
            }
        }
        out
    }

    fn residual(&self, ritz: &RitzPairs, col: usize) -> (Vec<f64>, Vec<f64>, f64) {
        let x = Self::combine(&self.basis, &ritz.coeffs, col, self.n);
        let ax = Self::combine(&self.image, &ritz.coeffs, col, self.n);
        let theta = ritz.values[col];
        let r: Vec<f64> = ax.iter().zip(&x).map(|(a, b)| a - theta * b).collect();
        let res = norm(&r);
        (x, r, res)
    }

    fn run(&mut self, tol: f64, max_restarts: usize) -> Result<EigenBasis> {
        let mut frontier = Vec::new();
        self.pad_random(&mut frontier, self.block);
        let mut residuals = vec![f64::INFINITY; self.d];
        for _restart in 0..=max_restarts {
            self.expand(frontier);
            let ritz = self.rayleigh_ritz();
            let complete = self.basis.len() == self.n;

            let mut unconverged = Vec::new();
            let mut wanted_vectors = Vec::with_capacity(self.d);
            for (slot, &col) in ritz.order.iter().take(self.d).enumerate() {
                let (x, r, res) = self.residual(&ritz, col);
                residuals[slot] = res;
                if res > tol * ritz.values[col].abs().max(1.0) {
                    unconverged.push(r);
                }
                wanted_vectors.push(x);
            }
            if unconverged.is_empty() || complete {
                let values: Vec<f64> = ritz.order.iter().take(self.d).map(|&c| ritz.values[c]).collect();
                let mut vectors = DMatrix::zeros(self.n, self.d);
                for (j, mut x) in wanted_vectors.into_iter().enumerate() {
                    normalize_sign(&mut x);
                    vectors.column_mut(j).copy_from_slice(&x);
                }
                return Ok(EigenBasis { values, vectors });
            }

            // thick restart: keep the leading Ritz vectors, continue from the
            // residual block
            let j = self.basis.len();
            let keep = self
                .capacity
                .saturating_sub(2 * self.block)
                .max(self.d)
                .min(self.capacity - 1)
                .min(j);
            let kept: Vec<usize> = ritz.order.iter().take(keep).copied().collect();
            let new_basis: Vec<Vec<f64>> = kept
                .iter()
                .map(|&c| Self::combine(&self.basis, &ritz.coeffs, c, self.n))
                .collect();
            let new_image: Vec<Vec<f64>> = kept
                .iter()
                .map(|&c| Self::combine(&self.image, &ritz.coeffs, c, self.n))
                .collect();
            self.basis = new_basis;
            self.image = new_image;

            let mut extra: Vec<Vec<f64>> = unconverged;
            for &c in kept.iter().skip(self.d) {
                if extra.len() >= self.block {
                    break;
                }
                extra.push(self.residual(&ritz, c).1);
            }
            let mut next = Vec::with_capacity(self.block);
            self.orthonormalize(extra, &mut next, self.block);
            frontier = next;
        }
        let worst = residuals.iter().copied().fold(0.0, f64::max);
        Err(Error::Convergence {
            iterations: max_restarts,
            worst_residual: worst,
            residuals,
        })
    }
}

/// Full symmetric eigendecomposition of the adjacency matrix by cyclic
/// Jacobi rotations, ordered like [`EigenBasis`]. Reference implementation
/// for tests; refuses graphs above [`DENSE_LIMIT`] nodes.
pub fn dense_eig_oracle(graph: &Graph) -> Result<EigenBasis> {
    let n = graph.node_count();
    if n > DENSE_LIMIT {
        return Err(Error::TooLarge { n, limit: DENSE_LIMIT });
    }
    let (values, vectors) = jacobi_eigen(graph.to_dense());
    Ok(EigenBasis::from_unsorted(&values, &vectors, n))
}

fn jacobi_eigen(mut a: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = a.norm_squared().max(1.0);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)]).collect(), v)
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}
