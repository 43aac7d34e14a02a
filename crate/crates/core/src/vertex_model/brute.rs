//! Direct summation over all edge colourings.

use crate::error::{Error, Result};
use crate::graph::SimpleGraph;

/// Largest number of edge colourings the brute engine will enumerate.
pub const BRUTE_BUDGET: u64 = 100_000_000;

pub(crate) fn check_budget(dim: usize, n_edges: usize) -> Result<()> {
    let count = (dim as u64).checked_pow(n_edges as u32);
    match count {
        Some(c) if c <= BRUTE_BUDGET => Ok(()),
        _ => Err(Error::BudgetExceeded(format!(
            "{dim}^{n_edges} edge colourings exceed the brute-force budget of {BRUTE_BUDGET}"
        ))),
    }
}

/// `sum_phi prod_v table_v[phi(delta(v))]`, where `table_v` is indexed row-major
/// by the colours of the edges in `delta(v)`.
pub(crate) fn sum_products(tables: &[Vec<f64>], f: &SimpleGraph, dim: usize) -> Result<f64> {
    let m = f.n_edges();
    check_budget(dim, m)?;
    let incidence: Vec<&[usize]> = (0..f.n_vertices()).map(|v| f.incidence(v)).collect();
    let mut colour = vec![0usize; m];
    let mut total = 0.0;
    loop {
        let mut prod = 1.0;
        for (table, inc) in tables.iter().zip(&incidence) {
            let idx = inc.iter().fold(0, |acc, &e| acc * dim + colour[e]);
            prod *= table[idx];
            if prod == 0.0 {
                break;
            }
        }
        total += prod;

        let mut pos = m;
        loop {
            if pos == 0 {
                return Ok(total);
            }
            pos -= 1;
            colour[pos] += 1;
            if colour[pos] < dim {
                break;
            }
            colour[pos] = 0;
        }
    }
}
