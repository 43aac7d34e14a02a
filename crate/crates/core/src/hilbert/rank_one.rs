//! Lower bounds for the injective norm `sup |<r_1 ⊗ ... ⊗ r_k, x>|` over unit `r_i`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::linalg::top_singular_triple;
use super::tensor::{for_each_index, Tensor};

/// Restart count, iteration cap and seed of the alternating maximization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchBudget {
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iters: 200,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct RankOneFit {
    pub value: f64,
    pub factors: Vec<Vec<f64>>,
}

/// `x` contracted with every factor except the one at `skip`.
fn contract_except(x: &Tensor, factors: &[Vec<f64>], skip: usize) -> Vec<f64> {
    let mut out = vec![0.0; x.dim()];
    let values = x.values();
    for_each_index(x.order(), x.dim(), |idx, flat| {
        let v = values[flat];
        if v == 0.0 {
            return;
        }
        let w: f64 = idx
            .iter()
            .enumerate()
            .filter(|&(m, _)| m != skip)
            .map(|(m, &i)| factors[m][i])
            .product();
        out[idx[skip]] += v * w;
    });
    out
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Mode-`mode` Gram matrix `X_(m) X_(m)^T` of the unfolding.
fn unfolding_gram(x: &Tensor, mode: usize) -> Vec<f64> {
    let n = x.dim();
    let k = x.order();
    let mut fibres: Vec<Vec<f64>> = vec![Vec::new(); n];
    for_each_index(k, n, |idx, flat| fibres[idx[mode]].push(x.values()[flat]));
    let mut gram = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let g: f64 = fibres[i].iter().zip(&fibres[j]).map(|(a, b)| a * b).sum();
            gram[i * n + j] = g;
            gram[j * n + i] = g;
        }
    }
    gram
}

/// One run of alternating maximization from the given starting factors.
fn ascend(x: &Tensor, mut factors: Vec<Vec<f64>>, budget: &SearchBudget, tol: f64) -> RankOneFit {
    let k = x.order();
    let mut value = f64::NEG_INFINITY;
    for _ in 0..budget.max_iters.max(1) {
        let mut current = 0.0;
        for mode in 0..k {
            let mut y = contract_except(x, &factors, mode);
            current = normalize(&mut y);
            if current == 0.0 {
                // x is orthogonal to everything through the other factors
                return RankOneFit { value: 0.0, factors };
            }
            factors[mode] = y;
        }
        let improved = current - value;
        value = current;
        if improved.abs() <= tol * value.max(1.0) {
            break;
        }
    }
    RankOneFit { value, factors }
}

/// Best rank-one correlation found by alternating maximization.
///
/// Every mode update maximizes the objective in closed form with the other
/// factors frozen, so each run ascends monotonically. The first run starts
/// from the leading left singular vectors of the unfoldings; the remaining
/// `budget.restarts` runs start from Gaussian factors drawn from `budget.seed`.
/// Ties between runs keep the earlier one.
pub(crate) fn alternating_rank_one(x: &Tensor, budget: &SearchBudget, tol: f64) -> RankOneFit {
    let k = x.order();
    let n = x.dim();
    let svd_tol = 1e-15;

    let spectral_start: Vec<Vec<f64>> = (0..k)
        .map(|mode| top_singular_triple(&unfolding_gram(x, mode), n, svd_tol).left)
        .collect();
    let mut best = ascend(x, spectral_start, budget, tol);

    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    for _ in 0..budget.restarts {
        let start: Vec<Vec<f64>> = (0..k)
            .map(|_| {
                let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
                normalize(&mut v);
                v
            })
            .collect();
        let fit = ascend(x, start, budget, tol);
        if fit.value > best.value {
            best = fit;
        }
    }
    best
}
