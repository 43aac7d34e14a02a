//! Checkers for the Cauchy–Schwarz product bound and the telescoping
//! Lipschitz bound of `pi_F` in the rank-one seminorms.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{brute, pi_f, Engine, VertexAssignment};
use crate::error::{Error, Result};
use crate::graph::SimpleGraph;
use crate::hilbert::{seminorm_with, Dictionary, ValueKind};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `sum_phi prod_v ||h_v(phi(delta(v)))|| <= prod_v ||h_v||`.
///
/// Tensor orders may exceed degrees: `h_v(c_1, ..., c_l)` is the slice that
/// fixes the first `l = deg(v)` indices. The left side is summed by brute force.
pub fn cs_bound_check(assignment: &VertexAssignment, f: &SimpleGraph) -> Result<BoundCheck> {
    assignment.check_against(f, false)?;
    let dim = assignment.dim();
    let tables: Vec<Vec<f64>> = assignment
        .tensors()
        .iter()
        .enumerate()
        .map(|(v, t)| {
            let block = dim.pow((t.order() - f.degree(v)) as u32);
            t.values()
                .chunks(block)
                .map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt())
                .collect()
        })
        .collect();
    let lhs = brute::sum_products(&tables, f, dim)?;
    let rhs: f64 = assignment.tensors().iter().map(|t| t.hilbert_norm()).product();
    Ok(BoundCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + Tolerances::default().eq,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzCheck {
    /// `|pi_F(g) - pi_F(h)|`
    pub lhs: f64,
    /// `sum_u ||g_u - h_u||_{R_deg(u)}`
    pub rhs: f64,
    pub holds: bool,
    /// `pi_F(q^u)` for `u = 0..=n`, where `q^u` takes `g` on the first `u` vertices and `h` after.
    pub telescoping: Vec<f64>,
    /// `pi_F(p^u)` for `u = 1..=n`, where `p^u` puts `g_u - h_u` at `u`.
    pub increments: Vec<f64>,
    pub seminorm_terms: Vec<f64>,
}

/// Rank-one ball dictionaries `R_1, ..., R_max_degree` over `dim` colours.
pub fn rank_one_dictionaries(max_degree: usize, dim: usize) -> Result<BTreeMap<usize, Dictionary>> {
    (1..=max_degree)
        .map(|d| Ok((d, Dictionary::rank_one_ball(d, dim)?)))
        .collect()
}

pub fn lipschitz_bound_check(
    g: &VertexAssignment,
    h: &VertexAssignment,
    f: &SimpleGraph,
    dicts: &BTreeMap<usize, Dictionary>,
) -> Result<LipschitzCheck> {
    lipschitz_bound_check_with(g, h, f, dicts, &Tolerances::default())
}

/// `|pi_F(g) - pi_F(h)| <= sum_u ||g_u - h_u||_{R_deg(u)}` for `g`, `h` in the unit balls.
///
/// `dicts[d]` must be the rank-one ball of order `d`; degree-0 vertices use
/// `|g_u - h_u|`. Degrees whose seminorm is only a lower bound are refused,
/// since a smaller right side could make a true bound look violated.
pub fn lipschitz_bound_check_with(
    g: &VertexAssignment,
    h: &VertexAssignment,
    f: &SimpleGraph,
    dicts: &BTreeMap<usize, Dictionary>,
    tol: &Tolerances,
) -> Result<LipschitzCheck> {
    g.check_against(f, true)?;
    h.check_against(f, true)?;
    if g.dim() != h.dim() {
        return Err(Error::ShapeMismatch("g and h use different colour sets".into()));
    }
    for (name, a) in [("g", g), ("h", h)] {
        for (v, t) in a.tensors().iter().enumerate() {
            let norm = t.hilbert_norm();
            if norm > 1.0 + tol.ball {
                return Err(Error::Precondition(format!("{name}_{v} has norm {norm} > 1")));
            }
        }
    }

    let n = f.n_vertices();
    let mut seminorm_terms = Vec::with_capacity(n);
    for u in 0..n {
        let d = f.degree(u);
        let diff = g.get(u).sub(h.get(u))?;
        let term = if d == 0 {
            diff.values()[0].abs()
        } else {
            let dict = dicts
                .get(&d)
                .ok_or_else(|| Error::Precondition(format!("no dictionary for degree {d}")))?;
            if !matches!(dict, Dictionary::RankOneBall { order, .. } if *order == d) {
                return Err(Error::InvalidDictionary(format!(
                    "degree {d} needs the order-{d} rank-one ball"
                )));
            }
            if dict.kind() != ValueKind::Exact {
                return Err(Error::Precondition(format!(
                    "the degree-{d} seminorm is only a lower bound; refusing an unsound check"
                )));
            }
            seminorm_with(&diff, dict, tol)?.value
        };
        seminorm_terms.push(term);
    }

    let mut telescoping = Vec::with_capacity(n + 1);
    let mut increments = Vec::with_capacity(n);
    let mut q = h.clone();
    telescoping.push(pi_f(&q, f, Engine::Contract)?);
    for u in 0..n {
        let diff = g.get(u).sub(h.get(u))?;
        increments.push(pi_f(&q.with_vertex(u, diff)?, f, Engine::Contract)?);
        q = q.with_vertex(u, g.get(u).clone())?;
        telescoping.push(pi_f(&q, f, Engine::Contract)?);
    }

    let lhs = (telescoping[n] - telescoping[0]).abs();
    let rhs: f64 = seminorm_terms.iter().sum();
    Ok(LipschitzCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + tol.eq,
        telescoping,
        increments,
        seminorm_terms,
    })
}
