//! Orthogonal actions on tensors and models, and the quotient pseudometric
//! `(d/G)(x, y) = inf_{g in G} d(x, g . y)`.
//!
//! Finite groups are enumerated exactly. The full orthogonal group is searched
//! from random starts with plane-rotation descent, which only ever yields an
//! upper bound.

use itertools::Itertools;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SimpleGraph;
use crate::hilbert::{seminorm_with, Dictionary, SearchBudget, SymTensor, Tensor, ValueKind};
use crate::tolerance::Tolerances;
use crate::vertex_model::{partition_function, EdgeModel, Engine};

pub const MAX_PERMUTATION_DIM: usize = 8;
pub const MAX_SIGNED_DIM: usize = 6;

const GRID_POINTS: usize = 24;
const GOLDEN_ITERS: usize = 48;

fn default_samples() -> usize {
    256
}

fn default_refine() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum GroupKind {
    Permutations {
        n: usize,
    },
    SignedPermutations {
        n: usize,
    },
    SampledOrthogonal {
        n: usize,
        #[serde(default = "default_samples")]
        sample_count: usize,
        #[serde(default = "default_refine")]
        refine_steps: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    #[serde(flatten)]
    pub kind: GroupKind,
    #[serde(default)]
    pub seed: u64,
}

impl GroupSpec {
    pub fn permutations(n: usize) -> Self {
        Self {
            kind: GroupKind::Permutations { n },
            seed: 0,
        }
    }

    pub fn signed_permutations(n: usize) -> Self {
        Self {
            kind: GroupKind::SignedPermutations { n },
            seed: 0,
        }
    }

    /// Default search effort: 256 starts, 100 rotation steps each.
    pub fn sampled_orthogonal(n: usize, seed: u64) -> Self {
        Self {
            kind: GroupKind::SampledOrthogonal {
                n,
                sample_count: default_samples(),
                refine_steps: default_refine(),
            },
            seed,
        }
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            GroupKind::Permutations { n }
            | GroupKind::SignedPermutations { n }
            | GroupKind::SampledOrthogonal { n, .. } => n,
        }
    }

    pub fn is_enumerable(&self) -> bool {
        !matches!(self.kind, GroupKind::SampledOrthogonal { .. })
    }

    /// Every element, in lexicographic (permutation, sign mask) order.
    pub fn elements(&self) -> Result<Vec<Vec<f64>>> {
        match self.kind {
            GroupKind::Permutations { n } => {
                if n > MAX_PERMUTATION_DIM {
                    return Err(Error::BudgetExceeded(format!(
                        "{n}! permutations exceed the limit of dimension {MAX_PERMUTATION_DIM}"
                    )));
                }
                Ok((0..n).permutations(n).map(|p| signed_permutation_matrix(&p, 0)).collect())
            }
            GroupKind::SignedPermutations { n } => {
                if n > MAX_SIGNED_DIM {
                    return Err(Error::BudgetExceeded(format!(
                        "2^{n} {n}! signed permutations exceed the limit of dimension {MAX_SIGNED_DIM}"
                    )));
                }
                Ok((0..n)
                    .permutations(n)
                    .flat_map(|p| (0..1usize << n).map(move |mask| signed_permutation_matrix(&p, mask)))
                    .collect())
            }
            GroupKind::SampledOrthogonal { .. } => Err(Error::Precondition(
                "the sampled orthogonal group cannot be enumerated".into(),
            )),
        }
    }
}

/// `(P x)_i = x_sigma(i)`.
pub fn permutation_matrix(sigma: &[usize]) -> Vec<f64> {
    signed_permutation_matrix(sigma, 0)
}

/// Permutation matrix with row `i` negated when bit `i` of `signs` is set.
pub fn signed_permutation_matrix(sigma: &[usize], signs: usize) -> Vec<f64> {
    let n = sigma.len();
    let mut g = vec![0.0; n * n];
    for (i, &s) in sigma.iter().enumerate() {
        g[i * n + s] = if signs >> i & 1 == 1 { -1.0 } else { 1.0 };
    }
    g
}

pub fn identity(n: usize) -> Vec<f64> {
    (0..n * n).map(|f| if f / n == f % n { 1.0 } else { 0.0 }).collect()
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the signs of `R`'s diagonal removed.
pub fn random_orthogonal(n: usize, rng: &mut impl rand::Rng) -> Vec<f64> {
    let a = DMatrix::<f64>::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let qr = a.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    (0..n * n).map(|f| q[(f / n, f % n)]).collect()
}

/// `max |g^T g - I|` entrywise.
pub fn orthogonality_defect(g: &[f64], n: usize) -> Result<f64> {
    if g.len() != n * n {
        return Err(Error::ShapeMismatch(format!("{} entries for an {n} x {n} matrix", g.len())));
    }
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let dot: f64 = (0..n).map(|r| g[r * n + i] * g[r * n + j]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).abs());
        }
    }
    Ok(worst)
}

fn check_orthogonal(g: &[f64], n: usize, tol: f64) -> Result<()> {
    let defect = orthogonality_defect(g, n)?;
    if defect.is_nan() || defect > tol {
        return Err(Error::NotOrthogonal(defect));
    }
    Ok(())
}

/// `g^{(x) k} t`, the action along every mode.
pub fn act_tensor(g: &[f64], t: &Tensor) -> Result<Tensor> {
    if t.order() > 0 {
        check_orthogonal(g, t.dim(), Tolerances::default().orthogonality)?;
    }
    t.apply_all_modes(g)
}

/// Action on a symmetric tensor; the result is re-symmetrized to remove rounding asymmetry.
pub fn act(g: &[f64], t: &SymTensor) -> Result<SymTensor> {
    Ok(SymTensor::symmetrize(act_tensor(g, t)?))
}

/// The same `g` on every level.
pub fn act_model(g: &[f64], model: &EdgeModel) -> Result<EdgeModel> {
    check_orthogonal(g, model.dim(), Tolerances::default().orthogonality)?;
    model.map_levels(|t| Ok(SymTensor::symmetrize(t.apply_all_modes(g)?)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceKind {
    Exact,
    /// Attained by the witness, so at least the true infimum.
    UpperBound,
    /// Computed from a seminorm that is itself only a lower bound.
    LowerBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitDistance {
    pub value: f64,
    pub kind: DistanceKind,
    /// Row-major `n x n` group element attaining `value`.
    pub witness: Vec<f64>,
}

/// Base metric on tensors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Metric {
    Hilbert,
    Seminorm { dictionary: Dictionary },
}

/// Base metric on models: the largest level distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ModelMetric {
    Hilbert,
    /// Rank-one ball seminorm of matching order on each level `k >= 1`, `|.|` on level 0.
    RankOne {
        #[serde(default)]
        budget: SearchBudget,
    },
}

fn tensor_distance(x: &Tensor, y: &Tensor, metric: &Metric, tol: &Tolerances) -> Result<f64> {
    let diff = x.sub(y)?;
    match metric {
        Metric::Hilbert => Ok(diff.hilbert_norm()),
        Metric::Seminorm { dictionary } => Ok(seminorm_with(&diff, dictionary, tol)?.value),
    }
}

fn rank_one_exact(order: usize) -> bool {
    order < 3
}

fn model_distance(x: &EdgeModel, y: &EdgeModel, metric: &ModelMetric, tol: &Tolerances) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (k, (a, b)) in x.levels().iter().zip(y.levels()).enumerate() {
        let diff = a.sub(b)?;
        let d = match metric {
            ModelMetric::Hilbert => diff.hilbert_norm(),
            ModelMetric::RankOne { .. } if k == 0 => diff.values()[0].abs(),
            ModelMetric::RankOne { budget } => {
                let dict = Dictionary::rank_one_ball(k, x.dim())?.with_budget(budget.clone());
                seminorm_with(&diff, &dict, tol)?.value
            }
        };
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Plane rotation by `theta` in coordinates `(p, q)`, applied on the left.
fn rotate(g: &[f64], n: usize, p: usize, q: usize, theta: f64) -> Vec<f64> {
    let (s, c) = theta.sin_cos();
    let mut out = g.to_vec();
    for col in 0..n {
        let (a, b) = (g[p * n + col], g[q * n + col]);
        out[p * n + col] = c * a - s * b;
        out[q * n + col] = s * a + c * b;
    }
    out
}

/// Grid over `[-pi, pi)` followed by golden-section search around the best grid point.
fn line_search(mut f: impl FnMut(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let h = std::f64::consts::TAU / GRID_POINTS as f64;
    let mut best = (0.0, f64::INFINITY);
    for i in 0..GRID_POINTS {
        let theta = -std::f64::consts::PI + i as f64 * h;
        let v = f(theta)?;
        if v < best.1 {
            best = (theta, v);
        }
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (best.0 - h, best.0 + h);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..GOLDEN_ITERS {
        if f1 <= f2 {
            hi = x2;
            (x2, f2) = (x1, f1);
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            (x1, f1) = (x2, f2);
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2)?;
        }
    }
    for (theta, v) in [(x1, f1), (x2, f2)] {
        if v < best.1 {
            best = (theta, v);
        }
    }
    Ok(best)
}

/// Minimizes `dist(g)` over the group.
///
/// Enumeration keeps the first minimizer. The sampled search starts from the
/// identity and from `sample_count` Haar samples, each refined by up to
/// `refine_steps` plane-rotation line searches cycling over coordinate pairs.
fn minimize(group: &GroupSpec, mut dist: impl FnMut(&[f64]) -> Result<f64>) -> Result<(f64, Vec<f64>)> {
    let n = group.dim();
    let GroupKind::SampledOrthogonal {
        sample_count,
        refine_steps,
        ..
    } = group.kind
    else {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for g in group.elements()? {
            let v = dist(&g)?;
            if best.as_ref().is_none_or(|b| v < b.0) {
                best = Some((v, g));
            }
        }
        return Ok(best.expect("groups contain the identity"));
    };

    let mut rng = ChaCha8Rng::seed_from_u64(group.seed);
    let planes: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for start in 0..=sample_count {
        let mut g = if start == 0 { identity(n) } else { random_orthogonal(n, &mut rng) };
        let mut value = dist(&g)?;
        let mut stale = 0;
        for step in 0..refine_steps {
            if planes.is_empty() || stale >= planes.len() {
                break;
            }
            let (p, q) = planes[step % planes.len()];
            let (theta, v) = line_search(|theta| dist(&rotate(&g, n, p, q, theta)))?;
            if v < value {
                g = rotate(&g, n, p, q, theta);
                value = dist(&g)?;
                stale = 0;
            } else {
                stale += 1;
            }
        }
        if best.as_ref().is_none_or(|b| value < b.0) {
            best = Some((value, g));
        }
    }
    Ok(best.expect("the identity start is always run"))
}

fn distance_kind(group: &GroupSpec, metric_exact: bool) -> Result<DistanceKind> {
    match (group.is_enumerable(), metric_exact) {
        (true, true) => Ok(DistanceKind::Exact),
        (true, false) => Ok(DistanceKind::LowerBound),
        (false, true) => Ok(DistanceKind::UpperBound),
        (false, false) => Err(Error::Precondition(
            "a sampled search over a lower-bound seminorm bounds nothing".into(),
        )),
    }
}

pub fn orbit_distance(x: &Tensor, y: &Tensor, group: &GroupSpec, metric: &Metric) -> Result<OrbitDistance> {
    orbit_distance_with(x, y, group, metric, &Tolerances::default())
}

/// `inf_g d(x, g . y)` over `group`.
pub fn orbit_distance_with(
    x: &Tensor,
    y: &Tensor,
    group: &GroupSpec,
    metric: &Metric,
    tol: &Tolerances,
) -> Result<OrbitDistance> {
    if !x.same_shape(y) {
        return Err(Error::ShapeMismatch(format!(
            "order {} dim {} vs order {} dim {}",
            x.order(),
            x.dim(),
            y.order(),
            y.dim()
        )));
    }
    if x.order() > 0 && x.dim() != group.dim() {
        return Err(Error::ShapeMismatch(format!(
            "group acts on dimension {}, tensors have {}",
            group.dim(),
            x.dim()
        )));
    }
    let exact = match metric {
        Metric::Hilbert => true,
        Metric::Seminorm { dictionary } => dictionary.kind() == ValueKind::Exact,
    };
    let kind = distance_kind(group, exact)?;
    let (value, witness) = minimize(group, |g| tensor_distance(x, &y.apply_all_modes(g)?, metric, tol))?;
    Ok(OrbitDistance { value, kind, witness })
}

pub fn orbit_distance_models(
    x: &EdgeModel,
    y: &EdgeModel,
    group: &GroupSpec,
    metric: &ModelMetric,
) -> Result<OrbitDistance> {
    orbit_distance_models_with(x, y, group, metric, &Tolerances::default())
}

/// `inf_g max_k d_k(x_k, g . y_k)` with one `g` acting on all levels.
pub fn orbit_distance_models_with(
    x: &EdgeModel,
    y: &EdgeModel,
    group: &GroupSpec,
    metric: &ModelMetric,
    tol: &Tolerances,
) -> Result<OrbitDistance> {
    if x.dim() != y.dim() || x.max_order() != y.max_order() {
        return Err(Error::ShapeMismatch("models differ in colours or levels".into()));
    }
    if x.dim() != group.dim() {
        return Err(Error::ShapeMismatch(format!(
            "group acts on dimension {}, models have {}",
            group.dim(),
            x.dim()
        )));
    }
    let exact = match metric {
        ModelMetric::Hilbert => true,
        ModelMetric::RankOne { .. } => rank_one_exact(x.max_order()),
    };
    let kind = distance_kind(group, exact)?;
    let (value, witness) = minimize(group, |g| {
        let moved = y.map_levels(|t| Ok(SymTensor::symmetrize(t.apply_all_modes(g)?)))?;
        model_distance(x, &moved, metric, tol)
    })?;
    Ok(OrbitDistance { value, kind, witness })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceRow {
    pub graph: usize,
    pub base: f64,
    pub acted: f64,
    /// `|acted - base| / (|base| + 1)`
    pub relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub rows: Vec<InvarianceRow>,
    pub max_relative: f64,
}

/// Compares `pi(g . h)(F)` with `pi(h)(F)` on every graph.
pub fn pi_invariance_check(
    model: &EdgeModel,
    g: &[f64],
    graphs: &[SimpleGraph],
    engine: Engine,
) -> Result<InvarianceReport> {
    let moved = act_model(g, model)?;
    let mut rows = Vec::with_capacity(graphs.len());
    for (i, f) in graphs.iter().enumerate() {
        let base = partition_function(model, f, engine)?;
        let acted = partition_function(&moved, f, engine)?;
        rows.push(InvarianceRow {
            graph: i,
            base,
            acted,
            relative: (acted - base).abs() / (base.abs() + 1.0),
        });
    }
    let max_relative = rows.iter().map(|r| r.relative).fold(0.0, f64::max);
    Ok(InvarianceReport { rows, max_relative })
}
