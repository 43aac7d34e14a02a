//! Sequences of models with a known limit, and the tail oscillation of their
//! partition functions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SimpleGraph;
use crate::graphon::{graph_to_graphon, tau};
use crate::hilbert::{seminorm_with, Dictionary, SymTensor};
use crate::tolerance::Tolerances;
use crate::vertex_model::{ball_project, partition_function, EdgeModel, Engine};

/// Built-in sequences indexed by `i = 1..=i_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `h^i = ball_project(h + 2^-i * scale * noise)` for a fixed random `h` and direction `noise`.
    Perturbed {
        dim: usize,
        max_order: usize,
        #[serde(default = "one")]
        scale: f64,
    },
    /// A fixed random model on `dim + i - 1` colours, the new colours carrying zeros.
    Padded { dim: usize, max_order: usize },
    /// Graphons of `G(step * i, p)`.
    Sampled {
        #[serde(default = "half")]
        p: f64,
        #[serde(default = "ten")]
        step: usize,
    },
}

fn one() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

fn ten() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub i: usize,
    /// `pi(h^i)(F)` or `tau(w_i)(F)`, one per graph.
    pub values: Vec<f64>,
    /// Distance from the previous model: the largest level seminorm of the difference.
    pub distance_to_previous: Option<f64>,
    /// `|pi(h^i)(F) - pi(h)(F)|` per graph, when the limit is known.
    pub gaps: Option<Vec<f64>>,
    /// `sum_u ||h^i_deg(u) - h_deg(u)||` per graph, bounding `gaps`.
    pub bounds: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub family: Family,
    pub seed: u64,
    pub i_max: usize,
    pub tolerances: Tolerances,
    pub rows: Vec<ConvergenceRow>,
    /// Values at the limit model, when there is one.
    pub limit: Option<Vec<f64>>,
    /// First index of the tail window, the last `ceil(i_max / 4)` indices.
    pub tail_start: usize,
    /// `max_{j,k in tail} |value_j - value_k|` per graph.
    pub oscillation: Vec<f64>,
    /// Set when a budget stopped the run early; `rows` holds what was computed.
    pub truncated: Option<String>,
}

impl ConvergenceReport {
    /// Whether every observed gap sits below its bound, up to `tol`.
    pub fn gaps_dominated(&self, tol: f64) -> bool {
        self.rows.iter().all(|r| match (&r.gaps, &r.bounds) {
            (Some(g), Some(b)) => g.iter().zip(b).all(|(g, b)| *g <= b + tol),
            _ => true,
        })
    }
}

/// `||d||` in the rank-one seminorm of order `k` where it is exact (`k <= 2`),
/// the Hilbert norm above that; `|d|` on level 0. Every case bounds the
/// rank-one seminorm from above.
pub fn level_distance(diff: &SymTensor, tol: &Tolerances) -> Result<f64> {
    match diff.order() {
        0 => Ok(diff.values()[0].abs()),
        k @ (1 | 2) => Ok(seminorm_with(diff, &Dictionary::rank_one_ball(k, diff.dim())?, tol)?.value),
        _ => Ok(diff.hilbert_norm()),
    }
}

fn model_distance(a: &EdgeModel, b: &EdgeModel, tol: &Tolerances) -> Result<f64> {
    let dim = a.dim().max(b.dim());
    let (a, b) = (a.padded(dim)?, b.padded(dim)?);
    let mut worst: f64 = 0.0;
    for (x, y) in a.levels().iter().zip(b.levels()) {
        worst = worst.max(level_distance(&x.sub(y)?, tol)?);
    }
    Ok(worst)
}

fn telescoping_bound(g: &EdgeModel, h: &EdgeModel, f: &SimpleGraph, tol: &Tolerances) -> Result<f64> {
    let per_level = g
        .levels()
        .iter()
        .zip(h.levels())
        .map(|(x, y)| level_distance(&x.sub(y)?, tol))
        .collect::<Result<Vec<_>>>()?;
    f.degrees()
        .into_iter()
        .map(|d| {
            per_level.get(d).copied().ok_or(Error::DegreeExceedsModel {
                degree: d,
                max_order: g.max_order(),
            })
        })
        .sum()
}

fn perturbed(h: &EdgeModel, noise: &EdgeModel, eps: f64) -> Result<EdgeModel> {
    let tensors = h
        .levels()
        .iter()
        .zip(noise.levels())
        .map(|(a, n)| Ok(ball_project(&a.combine(1.0, eps, n)?)))
        .collect::<Result<Vec<_>>>()?;
    EdgeModel::new(h.dim(), tensors)
}

enum Step {
    Model(EdgeModel),
    Graphon(Vec<f64>),
}

pub fn converge_models(
    family: &Family,
    graphs: &[SimpleGraph],
    i_max: usize,
    seed: u64,
    engine: Engine,
) -> Result<ConvergenceReport> {
    converge_models_with(family, graphs, i_max, seed, engine, &Tolerances::default())
}

/// Runs `family` for `i = 1..=i_max` on every graph in `graphs`.
pub fn converge_models_with(
    family: &Family,
    graphs: &[SimpleGraph],
    i_max: usize,
    seed: u64,
    engine: Engine,
    tol: &Tolerances,
) -> Result<ConvergenceReport> {
    let tol = *tol;
    if i_max == 0 {
        return Err(Error::Precondition("i_max must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (base, noise) = match family {
        Family::Perturbed { dim, max_order, .. } => {
            let h = EdgeModel::random_in_ball(*dim, *max_order, &mut rng)?;
            let n = EdgeModel::random_in_ball(*dim, *max_order, &mut rng)?;
            (Some(h), Some(n))
        }
        Family::Padded { dim, max_order } => (Some(EdgeModel::random_in_ball(*dim, *max_order, &mut rng)?), None),
        Family::Sampled { p, step } => {
            if !(0.0..=1.0).contains(p) || *step == 0 {
                return Err(Error::Precondition("need p in [0, 1] and a positive step".into()));
            }
            (None, None)
        }
    };

    let limit = match (family, &base) {
        (Family::Perturbed { .. }, Some(h)) => Some(
            graphs
                .iter()
                .map(|f| partition_function(h, f, engine))
                .collect::<Result<Vec<_>>>()?,
        ),
        _ => None,
    };

    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(i_max);
    let mut previous: Option<EdgeModel> = None;
    let mut truncated = None;
    for i in 1..=i_max {
        let step = match family {
            Family::Perturbed { scale, .. } => {
                let eps = scale * 0.5f64.powi(i as i32);
                let (h, n) = (base.as_ref().expect("drawn"), noise.as_ref().expect("drawn"));
                Step::Model(perturbed(h, n, eps)?)
            }
            Family::Padded { dim, .. } => Step::Model(base.as_ref().expect("drawn").padded(dim + i - 1)?),
            Family::Sampled { p, step } => {
                let g = SimpleGraph::random_gnp(step * i, *p, &mut rng);
                let w = graph_to_graphon(&g)?;
                match graphs.iter().map(|f| tau(&w, f)).collect::<Result<Vec<_>>>() {
                    Ok(v) => Step::Graphon(v),
                    Err(Error::BudgetExceeded(msg)) => {
                        truncated = Some(format!("i = {i}: {msg}"));
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
        };
        let row = match step {
            Step::Graphon(values) => ConvergenceRow {
                i,
                values,
                distance_to_previous: None,
                gaps: None,
                bounds: None,
            },
            Step::Model(model) => {
                let values = match graphs
                    .iter()
                    .map(|f| partition_function(&model, f, engine))
                    .collect::<Result<Vec<_>>>()
                {
                    Ok(v) => v,
                    Err(Error::BudgetExceeded(msg)) => {
                        truncated = Some(format!("i = {i}: {msg}"));
                        break;
                    }
                    Err(e) => return Err(e),
                };
                let distance_to_previous = previous.as_ref().map(|p| model_distance(p, &model, &tol)).transpose()?;
                let (gaps, bounds) = match &limit {
                    Some(lim) => {
                        let h = base.as_ref().expect("drawn");
                        let gaps = values.iter().zip(lim).map(|(v, l)| (v - l).abs()).collect();
                        let bounds = graphs
                            .iter()
                            .map(|f| telescoping_bound(&model, h, f, &tol))
                            .collect::<Result<Vec<_>>>()?;
                        (Some(gaps), Some(bounds))
                    }
                    None => (None, None),
                };
                previous = Some(model);
                ConvergenceRow {
                    i,
                    values,
                    distance_to_previous,
                    gaps,
                    bounds,
                }
            }
        };
        rows.push(row);
    }

    let tail_start = i_max - i_max.div_ceil(4) + 1;
    let oscillation = (0..graphs.len())
        .map(|g| {
            let tail: Vec<f64> = rows.iter().filter(|r| r.i >= tail_start).map(|r| r.values[g]).collect();
            let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
            if tail.is_empty() {
                f64::NAN
            } else {
                hi - lo
            }
        })
        .collect();

    Ok(ConvergenceReport {
        family: family.clone(),
        seed,
        i_max,
        tolerances: tol,
        rows,
        limit,
        tail_start,
        oscillation,
        truncated,
    })
}
