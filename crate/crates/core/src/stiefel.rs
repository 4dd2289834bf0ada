//! Trace maximization over matrices with orthonormal columns.
//!
//! The relaxed objective is `F(Z) = tr((ZᵀAZ)²)` with gradient
//! `G = 4·A·Z·(ZᵀAZ)`. Iterates move along the Cayley curve
//!
//! ```text
//! Y(τ) = (I + τ/2·W)⁻¹ (I − τ/2·W) Z,    W = Z Gᵀ − G Zᵀ
//! ```
//!
//! which stays on the feasible set for every `τ` because `W` is skew. Its
//! slope at `τ = 0` is `⟨G, −WZ⟩ = ‖(I − ZZᵀ)G‖²`, never negative, so small
//! steps ascend. `W` has rank at most `2k`, and the inverse is applied
//! through a `2k × 2k` Sherman–Morrison–Woodbury solve.

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng;

/// Largest admissible `‖ZᵀZ − I‖_max` for a feasible point.
pub const FEASIBILITY_TOL: f64 = 1e-8;

/// `n × k` matrix with orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedSolution(DMatrix<f64>);

impl RelaxedSolution {
    pub fn new(z: DMatrix<f64>) -> Result<Self> {
        let err = orthonormality_error(&z);
        if !(err <= FEASIBILITY_TOL) {
            return Err(Error::param(format!(
                "columns are not orthonormal (max |ZᵀZ − I| = {err:.3e})"
            )));
        }
        Ok(RelaxedSolution(z))
    }

    pub(crate) fn from_trusted(z: DMatrix<f64>) -> Self {
        RelaxedSolution(z)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn nrows(&self) -> usize {
        self.0.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.0.ncols()
    }
}

/// `‖ZᵀZ − I‖_max`.
pub fn orthonormality_error(z: &DMatrix<f64>) -> f64 {
    let gram = z.transpose() * z;
    let k = gram.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..k {
        for j in 0..k {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - target).abs());
        }
    }
    worst
}

/// Objective split into self terms `Σ_j (z_jᵀ A z_j)²` and cross terms
/// `Σ_{i≠j} (z_iᵀ A z_j)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveSplit {
    pub total: f64,
    pub self_terms: f64,
    pub cross_terms: f64,
}

/// `(AZ, ZᵀAZ)` with the projected matrix symmetrized.
fn project(graph: &Graph, z: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let az = graph.spmm(z)?;
    let m = z.transpose() * &az;
    let m = (&m + m.transpose()) * 0.5;
    Ok((az, m))
}

/// `tr((ZᵀAZ)²)` for any `n × k` matrix.
pub fn trace_objective(graph: &Graph, z: &DMatrix<f64>) -> Result<f64> {
    let (_, m) = project(graph, z)?;
    Ok(m.norm_squared())
}

/// `tr((ZᵀAZ)²)` at a feasible point.
pub fn trace_objective_relaxed(graph: &Graph, z: &RelaxedSolution) -> Result<f64> {
    trace_objective(graph, z.matrix())
}

pub fn objective_split(graph: &Graph, z: &RelaxedSolution) -> Result<ObjectiveSplit> {
    let (_, m) = project(graph, z.matrix())?;
    let total = m.norm_squared();
    let self_terms: f64 = m.diagonal().iter().map(|x| x * x).sum();
    Ok(ObjectiveSplit {
        total,
        self_terms,
        cross_terms: total - self_terms,
    })
}

/// Euclidean gradient `4·A·Z·(ZᵀAZ)`.
pub fn gradient(graph: &Graph, z: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (az, m) = project(graph, z)?;
    Ok(az * m * 4.0)
}

/// Skew operator `W = U Vᵀ − V Uᵀ` held by its `n × r` factors.
#[derive(Debug, Clone)]
pub struct SkewDirection {
    u: DMatrix<f64>,
    v: DMatrix<f64>,
}

impl SkewDirection {
    pub fn new(u: DMatrix<f64>, v: DMatrix<f64>) -> Result<Self> {
        if u.shape() != v.shape() {
            return Err(Error::dims(format!("{:?}", u.shape()), format!("{:?}", v.shape())));
        }
        Ok(SkewDirection { u, v })
    }

    pub fn nrows(&self) -> usize {
        self.u.nrows()
    }

    /// `−W`.
    pub fn negated(&self) -> SkewDirection {
        SkewDirection {
            u: self.v.clone(),
            v: self.u.clone(),
        }
    }

    /// `W X = U (VᵀX) − V (UᵀX)` in `O(n r c)`.
    pub fn apply(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        &self.u * (self.v.transpose() * x) - &self.v * (self.u.transpose() * x)
    }

    /// Dense `n × n` form, for tests on small problems.
    pub fn to_dense(&self) -> DMatrix<f64> {
        &self.u * self.v.transpose() - &self.v * self.u.transpose()
    }
}

/// Ascent direction `W = Z Gᵀ − G Zᵀ`.
pub fn skew_direction(z: &DMatrix<f64>, g: &DMatrix<f64>) -> Result<SkewDirection> {
    SkewDirection::new(z.clone(), g.clone())
}

/// Cayley step `Y(τ) = (I + τ/2·W)⁻¹ (I − τ/2·W) Z`.
///
/// With `W = L Rᵀ`, `L = [U V]`, `R = [V −U]`, this equals
/// `Z − τ L (I + τ/2·RᵀL)⁻¹ RᵀZ`.
pub fn cayley_step(z: &RelaxedSolution, w: &SkewDirection, tau: f64) -> Result<RelaxedSolution> {
    let zm = z.matrix();
    if w.nrows() != zm.nrows() {
        return Err(Error::dims(format!("{} rows", zm.nrows()), w.nrows()));
    }
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::param(format!("step size {tau} must be finite and non-negative")));
    }
    if tau == 0.0 {
        return Ok(z.clone());
    }
    let n = zm.nrows();
    let r = w.u.ncols();
    let mut left = DMatrix::zeros(n, 2 * r);
    left.columns_mut(0, r).copy_from(&w.u);
    left.columns_mut(r, r).copy_from(&w.v);
    let mut right = DMatrix::zeros(n, 2 * r);
    right.columns_mut(0, r).copy_from(&w.v);
    right.columns_mut(r, r).copy_from(&(-&w.u));

    let right_t = right.transpose();
    let mut system = &right_t * &left * (0.5 * tau);
    for i in 0..2 * r {
        system[(i, i)] += 1.0;
    }
    let rhs = &right_t * zm;
    let solved = system.lu().solve(&rhs).ok_or(Error::Step { tau })?;
    let y = zm - left * solved * tau;
    if !y.iter().all(|x| x.is_finite()) || orthonormality_error(&y) > FEASIBILITY_TOL {
        return Err(Error::Step { tau });
    }
    Ok(RelaxedSolution(y))
}

/// Armijo backtracking parameters.
#[derive(Debug, Clone, Copy)]
pub struct LineSearchParams {
    pub initial_step: f64,
    pub contraction: f64,
    pub sufficient_increase: f64,
    pub max_backtracks: usize,
}

/// Accepted step of a line search.
#[derive(Debug, Clone)]
pub struct LineStep {
    pub tau: f64,
    pub solution: RelaxedSolution,
    pub objective: f64,
}

/// Largest `τ = τ₀ ρ^i`, `i ≤ max_backtracks`, with
/// `F(Y(τ)) ≥ F(Z) + c τ g₀`, where `g₀` is the slope of `F` along the
/// curve at `τ = 0`. Returns `None` when `g₀ ≤ 0` or no level qualifies.
pub fn line_search(
    graph: &Graph,
    z: &RelaxedSolution,
    w: &SkewDirection,
    params: &LineSearchParams,
) -> Result<Option<LineStep>> {
    let f0 = trace_objective_relaxed(graph, z)?;
    let g = gradient(graph, z.matrix())?;
    search_from(graph, z, f0, &g, w, params)
}

fn search_from(
    graph: &Graph,
    z: &RelaxedSolution,
    f0: f64,
    g: &DMatrix<f64>,
    w: &SkewDirection,
    params: &LineSearchParams,
) -> Result<Option<LineStep>> {
    // dY/dτ at 0 is −WZ
    let slope = -g.dot(&w.apply(z.matrix()));
    if !(slope > 0.0) {
        return Ok(None);
    }
    let mut tau = params.initial_step;
    for _ in 0..=params.max_backtracks {
        match cayley_step(z, w, tau) {
            Ok(y) => {
                let f = trace_objective_relaxed(graph, &y)?;
                if f >= f0 + params.sufficient_increase * tau * slope {
                    return Ok(Some(LineStep {
                        tau,
                        solution: y,
                        objective: f,
                    }));
                }
            }
            Err(Error::Step { .. }) => {}
            Err(e) => return Err(e),
        }
        tau *= params.contraction;
    }
    Ok(None)
}

/// Seeded Gaussian `n × k` matrix orthonormalized by QR.
pub fn random_orthonormal_init(n: usize, k: usize, seed: u64) -> Result<RelaxedSolution> {
    if k == 0 || k > n {
        return Err(Error::param(format!("column count {k} must lie in [1, {n}]")));
    }
    let mut rng = rng::seeded_stream(seed, rng::stream::RELAX_INIT);
    // column-major fill, one column at a time
    let data: Vec<f64> = (0..n * k).map(|_| StandardNormal.sample(&mut rng)).collect();
    let raw = DMatrix::from_vec(n, k, data);
    let qr = raw.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..k {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    Ok(RelaxedSolution(q))
}

#[derive(Debug, Clone, Copy)]
pub struct OcsaConfig {
    pub max_iterations: usize,
    pub initial_step: f64,
    pub relative_tolerance: f64,
    pub contraction: f64,
    pub sufficient_increase: f64,
    pub max_backtracks: usize,
    /// Stop when `‖WZ‖_F ≤ stationarity_tol · ‖G‖_F`.
    pub stationarity_tol: f64,
}

impl Default for OcsaConfig {
    fn default() -> Self {
        OcsaConfig {
            max_iterations: 100,
            initial_step: 1e-3,
            relative_tolerance: 1e-3,
            contraction: 0.5,
            sufficient_increase: 1e-4,
            max_backtracks: 30,
            stationarity_tol: 1e-8,
        }
    }
}

impl OcsaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.initial_step > 0.0) || !self.initial_step.is_finite() {
            return Err(Error::param("initial step must be positive"));
        }
        if !(self.relative_tolerance >= 0.0) {
            return Err(Error::param("relative tolerance must be non-negative"));
        }
        if !(self.contraction > 0.0 && self.contraction < 1.0) {
            return Err(Error::param("line-search contraction must lie in (0, 1)"));
        }
        if !(self.sufficient_increase >= 0.0 && self.sufficient_increase < 1.0) {
            return Err(Error::param("sufficient-increase constant must lie in [0, 1)"));
        }
        if !(self.stationarity_tol >= 0.0) {
            return Err(Error::param("stationarity tolerance must be non-negative"));
        }
        Ok(())
    }

    fn line_search(&self) -> LineSearchParams {
        LineSearchParams {
            initial_step: self.initial_step,
            contraction: self.contraction,
            sufficient_increase: self.sufficient_increase,
            max_backtracks: self.max_backtracks,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Relative objective gain fell to the tolerance.
    Tolerance,
    /// Ran the configured number of iterations.
    MaxIterations,
    /// No step along the curve increases the objective.
    NoAscentStep,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::Tolerance => "tolerance",
            Termination::MaxIterations => "max-iter",
            Termination::NoAscentStep => "no-ascent-step",
        }
    }
}

/// Objective after each accepted iterate (`objectives[0]` is the start) and
/// the step size that produced it.
#[derive(Debug, Clone)]
pub struct AscentTrace {
    pub objectives: Vec<f64>,
    pub steps: Vec<f64>,
    pub termination: Termination,
}

impl AscentTrace {
    pub fn final_objective(&self) -> f64 {
        *self.objectives.last().expect("trace holds the starting objective")
    }

    pub fn iterations(&self) -> usize {
        self.steps.len()
    }
}

/// Feasible steepest ascent along Cayley curves.
pub fn ocsa(graph: &Graph, z0: &RelaxedSolution, config: &OcsaConfig) -> Result<(RelaxedSolution, AscentTrace)> {
    ocsa_with_observer(graph, z0, config, |_, _| {})
}

/// [`ocsa`] with a callback invoked on every accepted iterate.
pub fn ocsa_with_observer<F>(
    graph: &Graph,
    z0: &RelaxedSolution,
    config: &OcsaConfig,
    mut observer: F,
) -> Result<(RelaxedSolution, AscentTrace)>
where
    F: FnMut(&RelaxedSolution, f64),
{
    config.validate()?;
    if z0.nrows() != graph.node_count() {
        return Err(Error::dims(format!("{} rows", graph.node_count()), z0.nrows()));
    }
    let err = orthonormality_error(z0.matrix());
    if !(err <= FEASIBILITY_TOL) {
        return Err(Error::param(format!("initial point is infeasible ({err:.3e})")));
    }
    let params = config.line_search();
    let mut z = z0.clone();
    let mut f = trace_objective_relaxed(graph, &z)?;
    let mut trace = AscentTrace {
        objectives: vec![f],
        steps: Vec::new(),
        termination: Termination::MaxIterations,
    };
    for _ in 0..config.max_iterations {
        let g = gradient(graph, z.matrix())?;
        let w = skew_direction(z.matrix(), &g)?;
        let wz = w.apply(z.matrix());
        if wz.norm() <= config.stationarity_tol * g.norm() {
            trace.termination = Termination::NoAscentStep;
            break;
        }
        let Some(step) = search_from(graph, &z, f, &g, &w, &params)? else {
            trace.termination = Termination::NoAscentStep;
            break;
        };
        let gain = step.objective - f;
        let relative = if f > 0.0 {
            gain / f
        } else if gain > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        z = step.solution;
        f = step.objective;
        trace.objectives.push(f);
        trace.steps.push(step.tau);
        observer(&z, f);
        if relative <= config.relative_tolerance {
            trace.termination = Termination::Tolerance;
            break;
        }
    }
    Ok((z, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{lm_eigs, LanczosOptions};

    fn two_triangles() -> Graph {
        Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap()
    }

    fn unit_columns(n: usize, cols: &[usize]) -> RelaxedSolution {
        let mut z = DMatrix::zeros(n, cols.len());
        for (j, &c) in cols.iter().enumerate() {
            z[(c, j)] = 1.0;
        }
        RelaxedSolution::new(z).unwrap()
    }

    /// Gradient entry by entry via single-entry matrices `J^{ij}`.
    fn literal_gradient(a: &DMatrix<f64>, z: &DMatrix<f64>) -> DMatrix<f64> {
        let (n, k) = z.shape();
        let m = z.transpose() * a * z;
        let mut g = DMatrix::zeros(n, k);
        for i in 0..n {
            for j in 0..k {
                let mut jij = DMatrix::zeros(n, k);
                jij[(i, j)] = 1.0;
                let jji = jij.transpose();
                let inner = z.transpose() * a * &jij + &jji * a * z;
                g[(i, j)] = (&m * inner * 2.0).trace();
            }
        }
        g
    }

    #[test]
    fn objective_examples() {
        let k3 = Graph::complete(3).unwrap();
        let s = 1.0 / 3f64.sqrt();
        let z = RelaxedSolution::new(DMatrix::from_element(3, 1, s)).unwrap();
        assert!((trace_objective_relaxed(&k3, &z).unwrap() - 4.0).abs() < 1e-12);

        let p3 = Graph::path(3).unwrap();
        let z = unit_columns(3, &[0, 1]);
        assert!((trace_objective_relaxed(&p3, &z).unwrap() - 2.0).abs() < 1e-12);
        let split = objective_split(&p3, &z).unwrap();
        assert_eq!((split.self_terms, split.cross_terms), (0.0, 2.0));
    }

    #[test]
    fn full_basis_recovers_trace() {
        for g in [Graph::path(5).unwrap(), two_triangles(), Graph::complete(4).unwrap()] {
            let n = g.node_count();
            let e = lm_eigs(&g, n, LanczosOptions::default()).unwrap();
            let z = RelaxedSolution::new(e.into_vectors()).unwrap();
            let f = trace_objective_relaxed(&g, &z).unwrap();
            assert!((f - g.adjacency_trace_sq()).abs() < 1e-9);
        }
    }

    #[test]
    fn gradient_examples() {
        let k3 = Graph::complete(3).unwrap();
        let s = 1.0 / 3f64.sqrt();
        let z = DMatrix::from_element(3, 1, s);
        let g = gradient(&k3, &z).unwrap();
        assert!((g - &z * 16.0).amax() < 1e-12);

        let p3 = Graph::path(3).unwrap();
        let z = unit_columns(3, &[0, 1]);
        let g = gradient(&p3, z.matrix()).unwrap();
        assert_eq!(g, DMatrix::from_row_slice(3, 2, &[4.0, 0.0, 0.0, 4.0, 4.0, 0.0]));
        assert_eq!(g, literal_gradient(&p3.to_dense(), z.matrix()));

        let z = unit_columns(3, &[0, 2]);
        assert_eq!(gradient(&p3, z.matrix()).unwrap(), DMatrix::zeros(3, 2));
    }

    #[test]
    fn gradient_matches_literal_form_on_random_input() {
        let (g, _) = crate::graph::generate_sbm(2, 5, 0.7, 0.2, 4).unwrap();
        let z = random_orthonormal_init(10, 3, 8).unwrap();
        let closed = gradient(&g, z.matrix()).unwrap();
        let literal = literal_gradient(&g.to_dense(), z.matrix());
        assert!((closed - literal).amax() < 1e-10);
    }

    #[test]
    fn skew_direction_examples() {
        let g = two_triangles();
        let e = lm_eigs(&g, 2, LanczosOptions::default()).unwrap();
        let z = e.vectors().clone();
        let grad = gradient(&g, &z).unwrap();
        let w = skew_direction(&z, &grad).unwrap();
        assert!(w.to_dense().amax() <= 1e-8);

        let w = skew_direction(&z, &DMatrix::zeros(6, 2)).unwrap();
        assert_eq!(w.to_dense(), DMatrix::zeros(6, 6));

        let p3 = Graph::path(3).unwrap();
        let z = unit_columns(3, &[0, 1]);
        let grad = gradient(&p3, z.matrix()).unwrap();
        let w = skew_direction(z.matrix(), &grad).unwrap();
        let dense = w.to_dense();
        assert_eq!(dense.transpose(), -&dense);
        assert!(w.apply(z.matrix()).norm() > 0.0);
        assert!((w.apply(z.matrix()) - &dense * z.matrix()).amax() < 1e-12);
    }

    #[test]
    fn cayley_trivial_cases() {
        let z = random_orthonormal_init(6, 2, 1).unwrap();
        let w = SkewDirection::new(DMatrix::from_element(6, 2, 0.3), DMatrix::from_element(6, 2, -0.1)).unwrap();
        assert_eq!(cayley_step(&z, &w, 0.0).unwrap(), z);
        let zero = SkewDirection::new(DMatrix::zeros(6, 2), DMatrix::zeros(6, 2)).unwrap();
        let y = cayley_step(&z, &zero, 0.7).unwrap();
        assert!((y.matrix() - z.matrix()).amax() < 1e-15);
    }

    #[test]
    fn cayley_matches_dense_solve() {
        let n = 12;
        let z = random_orthonormal_init(n, 3, 5).unwrap();
        let u = random_orthonormal_init(n, 2, 6).unwrap().into_matrix();
        let v = random_orthonormal_init(n, 2, 7).unwrap().into_matrix() * 2.0;
        let w = SkewDirection::new(u, v).unwrap();
        let tau = 0.1;
        let y = cayley_step(&z, &w, tau).unwrap();
        let wd = w.to_dense();
        let eye = DMatrix::<f64>::identity(n, n);
        let lhs = &eye + &wd * (tau / 2.0);
        let rhs = (&eye - &wd * (tau / 2.0)) * z.matrix();
        let dense = lhs.lu().solve(&rhs).unwrap();
        assert!((y.matrix() - dense).amax() < 1e-9);
        assert!(orthonormality_error(y.matrix()) < 1e-10);
    }

    #[test]
    fn line_search_cases() {
        let g = two_triangles();
        let z = random_orthonormal_init(6, 2, 3).unwrap();
        let params = OcsaConfig::default().line_search();
        let zero = SkewDirection::new(DMatrix::zeros(6, 2), DMatrix::zeros(6, 2)).unwrap();
        assert!(line_search(&g, &z, &zero, &params).unwrap().is_none());

        let grad = gradient(&g, z.matrix()).unwrap();
        let w = skew_direction(z.matrix(), &grad).unwrap();
        let f0 = trace_objective_relaxed(&g, &z).unwrap();
        let step = line_search(&g, &z, &w, &params).unwrap().expect("ascent step");
        assert!(step.tau > 0.0);
        assert!(step.objective > f0);

        assert!(line_search(&g, &z, &w.negated(), &params).unwrap().is_none());
    }

    #[test]
    fn random_init_properties() {
        let z = random_orthonormal_init(3, 3, 9).unwrap();
        assert!(orthonormality_error(z.matrix()) <= 1e-10);
        let z = random_orthonormal_init(7, 1, 9).unwrap();
        assert!((z.matrix().norm() - 1.0).abs() <= 1e-12);
        let a = random_orthonormal_init(20, 4, 123).unwrap();
        let b = random_orthonormal_init(20, 4, 123).unwrap();
        assert_eq!(a, b);
        assert!(random_orthonormal_init(2, 3, 0).is_err());
    }

    #[test]
    fn ocsa_at_eigenvectors_exits_immediately() {
        let g = two_triangles();
        let e = lm_eigs(&g, 2, LanczosOptions::default()).unwrap();
        let z0 = RelaxedSolution::new(e.into_vectors()).unwrap();
        let (z, trace) = ocsa(&g, &z0, &OcsaConfig::default()).unwrap();
        assert_eq!(trace.termination, Termination::NoAscentStep);
        assert_eq!(trace.objectives.len(), 1);
        assert_eq!(z, z0);
    }

    #[test]
    fn ocsa_random_reaches_eigenvector_objective() {
        let g = two_triangles();
        let z0 = random_orthonormal_init(6, 2, 18).unwrap();
        let config = OcsaConfig {
            max_iterations: 500,
            relative_tolerance: 0.0,
            ..Default::default()
        };
        let (z, trace) = ocsa(&g, &z0, &config).unwrap();
        assert!(trace.objectives.windows(2).all(|w| w[1] >= w[0]));
        assert!(orthonormality_error(z.matrix()) <= FEASIBILITY_TOL);
        assert!((trace.final_objective() - 8.0).abs() <= 0.08, "{}", trace.final_objective());
    }

    #[test]
    fn mixed_sign_eigenvectors_are_a_local_maximum() {
        // one column on λ = 2, one on λ = −1: F = 5 < 8, yet no ascent step
        let g = two_triangles();
        let s3 = 1.0 / 3f64.sqrt();
        let s2 = 1.0 / 2f64.sqrt();
        let mut z = DMatrix::zeros(6, 2);
        for i in 0..3 {
            z[(i, 0)] = s3;
        }
        z[(3, 1)] = s2;
        z[(4, 1)] = -s2;
        let z0 = RelaxedSolution::new(z).unwrap();
        assert!((trace_objective_relaxed(&g, &z0).unwrap() - 5.0).abs() < 1e-12);
        let (_, trace) = ocsa(&g, &z0, &OcsaConfig::default()).unwrap();
        assert_eq!(trace.termination, Termination::NoAscentStep);

        // a small perturbation flows back to the same value
        let bump = random_orthonormal_init(6, 2, 3).unwrap().into_matrix() * 1e-2;
        let qr = (z0.matrix() + bump).qr();
        let start = RelaxedSolution::new(qr.q()).unwrap();
        let config = OcsaConfig {
            max_iterations: 500,
            relative_tolerance: 0.0,
            ..Default::default()
        };
        let (_, trace) = ocsa(&g, &start, &config).unwrap();
        assert!((trace.final_objective() - 5.0).abs() < 1e-3, "{}", trace.final_objective());
    }

    #[test]
    fn ocsa_zero_iterations() {
        let g = two_triangles();
        let z0 = random_orthonormal_init(6, 2, 17).unwrap();
        let config = OcsaConfig {
            max_iterations: 0,
            ..Default::default()
        };
        let (z, trace) = ocsa(&g, &z0, &config).unwrap();
        assert_eq!(z, z0);
        assert_eq!(trace.objectives.len(), 1);
        assert_eq!(trace.termination, Termination::MaxIterations);
    }

    #[test]
    fn ocsa_rejects_infeasible_start() {
        let g = two_triangles();
        let bad = RelaxedSolution::from_trusted(DMatrix::from_element(6, 2, 1.0));
        assert!(matches!(ocsa(&g, &bad, &OcsaConfig::default()), Err(Error::Parameter(_))));
        assert!(RelaxedSolution::new(DMatrix::from_element(6, 2, 1.0)).is_err());
    }
}
