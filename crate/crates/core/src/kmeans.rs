//! Mini-batch k-means (Sculley updates) with kmeans++ seeding.

use nalgebra::DMatrix;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng::{self, Rng};

/// `n` points in `ℝ^dim`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    n: usize,
    dim: usize,
    data: Vec<f64>,
}

impl PointSet {
    pub fn new(n: usize, dim: usize, data: Vec<f64>) -> Result<PointSet> {
        if data.len() != n * dim {
            return Err(Error::dims(n * dim, data.len()));
        }
        if let Some(i) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::param(format!("point {} has a non-finite coordinate", i / dim.max(1))));
        }
        Ok(PointSet { n, dim, data })
    }

    /// Points in one dimension.
    pub fn from_values(values: &[f64]) -> Result<PointSet> {
        PointSet::new(values.len(), 1, values.to_vec())
    }

    /// One point per row of `m`.
    pub fn from_rows(m: &DMatrix<f64>) -> PointSet {
        let (n, dim) = m.shape();
        let mut data = Vec::with_capacity(n * dim);
        for i in 0..n {
            data.extend(m.row(i).iter());
        }
        PointSet { n, dim, data }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    fn check_finite(&self) -> Result<()> {
        if self.data.iter().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(Error::param("point set has non-finite coordinates"))
        }
    }
}

/// `k` centroids in `ℝ^dim`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Centroids {
    k: usize,
    dim: usize,
    data: Vec<f64>,
}

impl Centroids {
    pub fn new(k: usize, dim: usize, data: Vec<f64>) -> Result<Centroids> {
        if data.len() != k * dim {
            return Err(Error::dims(k * dim, data.len()));
        }
        if !data.iter().all(|x| x.is_finite()) {
            return Err(Error::param("centroids have non-finite coordinates"));
        }
        Ok(Centroids { k, dim, data })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn centroid(&self, j: usize) -> &[f64] {
        &self.data[j * self.dim..(j + 1) * self.dim]
    }

    fn centroid_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.dim..(j + 1) * self.dim]
    }

    /// Nearest centroid to `x` and its squared distance; ties go to the
    /// lowest index.
    pub fn nearest(&self, x: &[f64]) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for j in 0..self.k {
            let d = sq_dist(x, self.centroid(j));
            if d < best.1 {
                best = (j, d);
            }
        }
        best
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KmeansConfig {
    pub batch_size: usize,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for KmeansConfig {
    fn default() -> Self {
        KmeansConfig {
            batch_size: 1024,
            max_iterations: 100,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct KmeansResult {
    /// Cluster of each point; every cluster is non-empty.
    pub assignment: Vec<usize>,
    pub centroids: Centroids,
    /// Sum of squared distances to assigned centroids.
    pub cost: f64,
    /// Cost of the kmeans++ seeding under nearest-centroid assignment.
    pub init_cost: f64,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn check_k(points: &PointSet, k: usize) -> Result<()> {
    if k == 0 || k > points.len() {
        return Err(Error::param(format!("cluster count k = {k} must lie in [1, {}]", points.len())));
    }
    Ok(())
}

/// kmeans++ seeding.
pub fn kmeanspp_init(points: &PointSet, k: usize, seed: u64) -> Result<Centroids> {
    check_k(points, k)?;
    points.check_finite()?;
    let mut rng = rng::seeded_stream(seed, rng::stream::KMEANS);
    Ok(kmeanspp_with(points, k, &mut rng))
}

fn kmeanspp_with(points: &PointSet, k: usize, rng: &mut Rng) -> Centroids {
    let n = points.len();
    let mut chosen = vec![false; n];
    let mut picks = Vec::with_capacity(k);
    let first = rng.random_range(0..n);
    chosen[first] = true;
    picks.push(first);
    let mut weights: Vec<f64> = (0..n).map(|i| sq_dist(points.point(i), points.point(first))).collect();

    while picks.len() < k {
        let total: f64 = weights.iter().sum();
        let next = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &w) in weights.iter().enumerate() {
                if w <= 0.0 {
                    continue;
                }
                acc += w;
                pick = Some(i);
                if acc > target {
                    break;
                }
            }
            pick.expect("positive total weight")
        } else {
            // all remaining points coincide with chosen centroids
            let free: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen[next] = true;
        picks.push(next);
        for (i, w) in weights.iter_mut().enumerate() {
            *w = w.min(sq_dist(points.point(i), points.point(next)));
        }
    }

    let mut data = Vec::with_capacity(k * points.dim());
    for &p in &picks {
        data.extend_from_slice(points.point(p));
    }
    Centroids {
        k,
        dim: points.dim(),
        data,
    }
}

/// `Σ_i ‖a_i − c_{l(i)}‖²`.
pub fn kmeans_cost(points: &PointSet, centroids: &Centroids, assignment: &[usize]) -> Result<f64> {
    if assignment.len() != points.len() {
        return Err(Error::dims(points.len(), assignment.len()));
    }
    if centroids.dim() != points.dim() {
        return Err(Error::dims(points.dim(), centroids.dim()));
    }
    let mut cost = 0.0;
    for (i, &c) in assignment.iter().enumerate() {
        if c >= centroids.k() {
            return Err(Error::param(format!("point {i} assigned to cluster {c} of {}", centroids.k())));
        }
        cost += sq_dist(points.point(i), centroids.centroid(c));
    }
    Ok(cost)
}

/// Nearest-centroid assignment; each empty cluster then takes the point
/// worst fit by its own centroid among clusters that can spare one.
fn assign_and_fill(points: &PointSet, centroids: &mut Centroids) -> (Vec<usize>, f64) {
    let n = points.len();
    let k = centroids.k();
    let mut assignment = Vec::with_capacity(n);
    let mut dist = Vec::with_capacity(n);
    let mut sizes = vec![0usize; k];
    for i in 0..n {
        let (c, d) = centroids.nearest(points.point(i));
        assignment.push(c);
        dist.push(d);
        sizes[c] += 1;
    }
    for empty in 0..k {
        if sizes[empty] > 0 {
            continue;
        }
        let mut worst: Option<usize> = None;
        for i in 0..n {
            if sizes[assignment[i]] > 1 && worst.is_none_or(|w| dist[i] > dist[w]) {
                worst = Some(i);
            }
        }
        let w = worst.expect("k ≤ n leaves a cluster with two points");
        sizes[assignment[w]] -= 1;
        sizes[empty] = 1;
        assignment[w] = empty;
        dist[w] = 0.0;
        centroids.centroid_mut(empty).copy_from_slice(points.point(w));
    }
    (assignment, dist.iter().sum())
}

/// Mini-batch k-means from a kmeans++ start.
///
/// Each iteration assigns a batch (the whole set when `batch_size ≥ n`,
/// otherwise a uniform sample with replacement) to the nearest centroids
/// and moves each centroid toward its points with rate `1 / count`. The
/// output never costs more than the seeding.
pub fn minibatch_kmeans(points: &PointSet, k: usize, config: &KmeansConfig) -> Result<KmeansResult> {
    check_k(points, k)?;
    points.check_finite()?;
    if config.batch_size == 0 {
        return Err(Error::param("batch size must be at least 1"));
    }
    let n = points.len();
    let mut rng = rng::seeded_stream(config.seed, rng::stream::KMEANS);
    let init = kmeanspp_with(points, k, &mut rng);

    let mut centroids = init.clone();
    let mut counts = vec![0u64; k];
    let full = config.batch_size >= n;
    let mut batch: Vec<usize> = if full { (0..n).collect() } else { Vec::with_capacity(config.batch_size) };
    let mut nearest = Vec::with_capacity(batch.capacity());
    for _ in 0..config.max_iterations {
        if !full {
            batch.clear();
            batch.extend((0..config.batch_size).map(|_| rng.random_range(0..n)));
        }
        nearest.clear();
        nearest.extend(batch.iter().map(|&i| centroids.nearest(points.point(i)).0));
        for (&i, &c) in batch.iter().zip(&nearest) {
            counts[c] += 1;
            let eta = 1.0 / counts[c] as f64;
            for (cx, &px) in centroids.centroid_mut(c).iter_mut().zip(points.point(i)) {
                *cx += eta * (px - *cx);
            }
        }
    }

    let mut seeded = init;
    let init_cost = (0..n).map(|i| seeded.nearest(points.point(i)).1).sum();
    let (assignment, cost) = assign_and_fill(points, &mut centroids);
    let (fallback, fallback_cost) = assign_and_fill(points, &mut seeded);
    if fallback_cost < cost {
        return Ok(KmeansResult {
            assignment: fallback,
            centroids: seeded,
            cost: fallback_cost,
            init_cost,
        });
    }
    Ok(KmeansResult {
        assignment,
        centroids,
        cost,
        init_cost,
    })
}
