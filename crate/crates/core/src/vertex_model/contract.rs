//! Variable elimination over edges.
//!
//! Each vertex contributes a factor whose scope is `delta(v)`; each edge is a
//! summed index shared by its two endpoints. Edges are eliminated in greedy
//! min-fill order over the line graph, multiplying the factors that carry the
//! edge and summing it out.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SimpleGraph;
use crate::hilbert::MAX_DENSE_LEN;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractionPlan {
    /// Edge ids in elimination order.
    pub order: Vec<usize>,
    /// Largest number of open edges carried by an intermediate factor.
    pub max_scope: usize,
}

/// Greedy min-fill elimination order; ties go to the lowest edge id.
pub fn min_fill_order(f: &SimpleGraph) -> Vec<usize> {
    let m = f.n_edges();
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m];
    for v in 0..f.n_vertices() {
        let inc = f.incidence(v);
        for (i, &a) in inc.iter().enumerate() {
            for &b in &inc[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
    }
    let mut alive = vec![true; m];
    let mut order = Vec::with_capacity(m);
    for _ in 0..m {
        let fill = |e: usize| -> usize {
            let nbrs: Vec<usize> = adj[e].iter().copied().collect();
            let mut missing = 0;
            for (i, &a) in nbrs.iter().enumerate() {
                for &b in &nbrs[i + 1..] {
                    if !adj[a].contains(&b) {
                        missing += 1;
                    }
                }
            }
            missing
        };
        let best = (0..m)
            .filter(|&e| alive[e])
            .min_by_key(|&e| (fill(e), e))
            .expect("an edge remains");
        let nbrs: Vec<usize> = adj[best].iter().copied().collect();
        for &a in &nbrs {
            adj[a].remove(&best);
            for &b in &nbrs {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
        adj[best].clear();
        alive[best] = false;
        order.push(best);
    }
    order
}

struct Factor {
    scope: Vec<usize>,
    values: Vec<f64>,
}

fn strides(scope_len: usize, dim: usize) -> Vec<usize> {
    (0..scope_len).map(|j| dim.pow((scope_len - 1 - j) as u32)).collect()
}

fn eliminate(involved: Vec<Factor>, edge: usize, dim: usize) -> Result<Factor> {
    let scope: Vec<usize> = involved
        .iter()
        .flat_map(|fac| fac.scope.iter().copied())
        .filter(|&e| e != edge)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let out_len = dim
        .checked_pow(scope.len() as u32)
        .filter(|&l| l <= MAX_DENSE_LEN)
        .ok_or_else(|| {
            Error::BudgetExceeded(format!(
                "intermediate factor over {} edges with {dim} colours is too large",
                scope.len()
            ))
        })?;

    // positions in `scope ++ [edge]`
    let width = scope.len() + 1;
    let position = |e: usize| scope.iter().position(|&s| s == e).unwrap_or(width - 1);
    let layouts: Vec<Vec<(usize, usize)>> = involved
        .iter()
        .map(|fac| {
            fac.scope
                .iter()
                .zip(strides(fac.scope.len(), dim))
                .map(|(&e, s)| (position(e), s))
                .collect()
        })
        .collect();

    let mut assign = vec![0usize; width];
    let mut values = vec![0.0; out_len];
    for slot in values.iter_mut() {
        let mut acc = 0.0;
        for c in 0..dim {
            assign[width - 1] = c;
            let mut prod = 1.0;
            for (fac, layout) in involved.iter().zip(&layouts) {
                let idx: usize = layout.iter().map(|&(p, s)| assign[p] * s).sum();
                prod *= fac.values[idx];
            }
            acc += prod;
        }
        *slot = acc;
        // advance the row-major odometer over `scope`
        for pos in (0..width - 1).rev() {
            assign[pos] += 1;
            if assign[pos] < dim {
                break;
            }
            assign[pos] = 0;
        }
    }
    Ok(Factor { scope, values })
}

pub(crate) fn contract(tables: &[Vec<f64>], f: &SimpleGraph, dim: usize) -> Result<(f64, ContractionPlan)> {
    let mut factors: Vec<Factor> = tables
        .iter()
        .enumerate()
        .map(|(v, t)| Factor {
            scope: f.incidence(v).to_vec(),
            values: t.clone(),
        })
        .collect();
    let order = min_fill_order(f);
    let mut max_scope = factors.iter().map(|fac| fac.scope.len()).max().unwrap_or(0);
    for &edge in &order {
        let (involved, rest): (Vec<Factor>, Vec<Factor>) =
            factors.into_iter().partition(|fac| fac.scope.contains(&edge));
        let merged = eliminate(involved, edge, dim)?;
        max_scope = max_scope.max(merged.scope.len());
        factors = rest;
        factors.push(merged);
    }
    let value = factors.iter().map(|fac| fac.values[0]).product();
    Ok((value, ContractionPlan { order, max_scope }))
}
