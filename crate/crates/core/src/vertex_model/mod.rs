//! Partition functions of edge-colouring models.
//!
//! For a model `h = (h_0, ..., h_K)` of symmetric tensors over `n` colours and
//! a simple graph `F`,
//!
//! ```text
//! pi(h)(F) = sum_{phi: E(F) -> [n]} prod_{v in V(F)} h_{deg v}(phi(delta(v)))
//! ```
//!
//! Two engines evaluate it: [`Engine::Brute`] enumerates every edge colouring,
//! [`Engine::Contract`] eliminates edges one at a time as a tensor network.

mod bounds;
mod brute;
mod contract;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SimpleGraph;
use crate::hilbert::{SymTensor, Tensor};

pub use bounds::{
    cs_bound_check, lipschitz_bound_check, lipschitz_bound_check_with, rank_one_dictionaries,
    BoundCheck, LipschitzCheck,
};
pub use brute::BRUTE_BUDGET;
pub use contract::{min_fill_order, ContractionPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Brute,
    #[default]
    Contract,
}

impl std::str::FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" => Ok(Engine::Brute),
            "contract" => Ok(Engine::Contract),
            other => Err(Error::Precondition(format!("unknown engine {other:?}"))),
        }
    }
}

/// A finite edge-colouring model `(h_0, ..., h_K)`; `tensors[k]` has order `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelFile", into = "ModelFile")]
pub struct EdgeModel {
    dim: usize,
    tensors: Vec<SymTensor>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ModelFile {
    dim: usize,
    tensors: Vec<SymTensor>,
}

impl TryFrom<ModelFile> for EdgeModel {
    type Error = Error;

    fn try_from(file: ModelFile) -> Result<Self> {
        EdgeModel::new(file.dim, file.tensors)
    }
}

impl From<EdgeModel> for ModelFile {
    fn from(m: EdgeModel) -> Self {
        ModelFile {
            dim: m.dim,
            tensors: m.tensors,
        }
    }
}

impl EdgeModel {
    pub fn new(dim: usize, tensors: Vec<SymTensor>) -> Result<Self> {
        if tensors.is_empty() {
            return Err(Error::InvalidModel("a model needs at least h_0".into()));
        }
        if dim == 0 {
            return Err(Error::InvalidModel("colour set must be nonempty".into()));
        }
        for (k, t) in tensors.iter().enumerate() {
            if t.order() != k {
                return Err(Error::InvalidModel(format!("tensor {k} has order {}", t.order())));
            }
            if k > 0 && t.dim() != dim {
                return Err(Error::InvalidModel(format!(
                    "tensor {k} has dimension {}, model has {dim}",
                    t.dim()
                )));
            }
        }
        Ok(Self { dim, tensors })
    }

    /// Entries uniform in `[-1, 1]`, symmetrized, each level projected into the unit ball.
    pub fn random_in_ball(dim: usize, max_order: usize, rng: &mut impl Rng) -> Result<Self> {
        let tensors = (0..=max_order)
            .map(|k| {
                let len = crate::hilbert::dense_len(k, dim)?;
                let values: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
                let t = if k == 0 {
                    SymTensor::scalar(values[0])
                } else {
                    crate::hilbert::symmetrize(values, k, dim)?
                };
                Ok(ball_project(&t))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, tensors)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `K`, the largest vertex degree the model can evaluate.
    pub fn max_order(&self) -> usize {
        self.tensors.len() - 1
    }

    pub fn level(&self, k: usize) -> Option<&SymTensor> {
        self.tensors.get(k)
    }

    pub fn levels(&self) -> &[SymTensor] {
        &self.tensors
    }

    pub fn map_levels(&self, mut f: impl FnMut(&SymTensor) -> Result<SymTensor>) -> Result<Self> {
        let tensors = self.tensors.iter().map(&mut f).collect::<Result<Vec<_>>>()?;
        let dim = tensors.get(1).map_or(self.dim, |t| t.dim());
        Self::new(dim, tensors)
    }

    pub fn ball_projected(&self) -> Self {
        Self {
            dim: self.dim,
            tensors: self.tensors.iter().map(ball_project).collect(),
        }
    }

    pub fn in_ball(&self, slack: f64) -> bool {
        self.tensors.iter().all(|t| t.hilbert_norm() <= 1.0 + slack)
    }

    /// The same model on `dim` colours; the new colours carry zeros.
    pub fn padded(&self, dim: usize) -> Result<Self> {
        let tensors = self.tensors.iter().map(|t| t.padded(dim)).collect::<Result<Vec<_>>>()?;
        Self::new(dim, tensors)
    }

    /// `(h_{deg v})_{v in V(F)}`.
    pub fn assignment(&self, f: &SimpleGraph) -> Result<VertexAssignment> {
        let max_order = self.max_order();
        let tensors = f
            .degrees()
            .into_iter()
            .map(|d| {
                self.tensors
                    .get(d)
                    .cloned()
                    .ok_or(Error::DegreeExceedsModel { degree: d, max_order })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(VertexAssignment {
            dim: self.dim,
            tensors,
        })
    }
}

/// One tensor `h_v` per vertex of a graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexAssignment {
    dim: usize,
    tensors: Vec<SymTensor>,
}

impl VertexAssignment {
    pub fn new(dim: usize, tensors: Vec<SymTensor>) -> Result<Self> {
        for (v, t) in tensors.iter().enumerate() {
            if t.order() > 0 && t.dim() != dim {
                return Err(Error::ShapeMismatch(format!(
                    "vertex {v} tensor has dimension {}, expected {dim}",
                    t.dim()
                )));
            }
        }
        Ok(Self { dim, tensors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tensors(&self) -> &[SymTensor] {
        &self.tensors
    }

    pub fn get(&self, v: usize) -> &SymTensor {
        &self.tensors[v]
    }

    /// Copy with the tensor at `v` replaced.
    pub fn with_vertex(&self, v: usize, t: SymTensor) -> Result<Self> {
        let mut tensors = self.tensors.clone();
        tensors[v] = t;
        Self::new(self.dim, tensors)
    }

    /// Orders must equal degrees (`exact`) or be at least the degrees.
    pub(crate) fn check_against(&self, f: &SimpleGraph, exact: bool) -> Result<()> {
        if self.tensors.len() != f.n_vertices() {
            return Err(Error::ShapeMismatch(format!(
                "{} vertex tensors for a graph on {} vertices",
                self.tensors.len(),
                f.n_vertices()
            )));
        }
        for (v, t) in self.tensors.iter().enumerate() {
            let d = f.degree(v);
            let ok = if exact { t.order() == d } else { t.order() >= d };
            if !ok {
                return Err(Error::ShapeMismatch(format!(
                    "vertex {v} has degree {d} but its tensor has order {}",
                    t.order()
                )));
            }
        }
        Ok(())
    }

    /// Per-vertex lookup tables indexed by the colours on `delta(v)`, in incidence order.
    fn value_tables(&self) -> Vec<Vec<f64>> {
        self.tensors.iter().map(|t| t.values().to_vec()).collect()
    }
}

/// `t` if `||t|| <= 1`, else `t / ||t||`.
pub fn ball_project(t: &SymTensor) -> SymTensor {
    let norm = t.hilbert_norm();
    if norm <= 1.0 {
        t.clone()
    } else {
        t.scaled(1.0 / norm)
    }
}

/// Plain tensor version of [`ball_project`].
pub fn ball_project_tensor(t: &Tensor) -> Tensor {
    let norm = t.hilbert_norm();
    if norm <= 1.0 {
        t.clone()
    } else {
        t.scaled(1.0 / norm)
    }
}

/// `pi(h)(F)`.
pub fn partition_function(model: &EdgeModel, f: &SimpleGraph, engine: Engine) -> Result<f64> {
    pi_f(&model.assignment(f)?, f, engine)
}

/// `pi_F(h) = sum_phi prod_v h_v(phi(delta(v)))`, multilinear in the `h_v`.
pub fn pi_f(assignment: &VertexAssignment, f: &SimpleGraph, engine: Engine) -> Result<f64> {
    assignment.check_against(f, true)?;
    let tables = assignment.value_tables();
    match engine {
        Engine::Brute => brute::sum_products(&tables, f, assignment.dim),
        Engine::Contract => Ok(contract::contract(&tables, f, assignment.dim)?.0),
    }
}

/// Contraction-engine evaluation together with the elimination order it used.
pub fn pi_f_with_plan(assignment: &VertexAssignment, f: &SimpleGraph) -> Result<(f64, ContractionPlan)> {
    assignment.check_against(f, true)?;
    contract::contract(&assignment.value_tables(), f, assignment.dim)
}
