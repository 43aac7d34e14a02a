//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use edgelim::graph::SimpleGraph;
use edgelim::hilbert::{SymTensor, Tensor};
use edgelim::vertex_model::{EdgeModel, VertexAssignment};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Uniform in the unit ball of R^n: Gaussian direction, radius U^(1/n).
pub fn unit_ball_vector(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let g: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    let r = rng.random::<f64>().powf(1.0 / n as f64);
    g.iter().map(|x| x * r / norm).collect()
}

pub fn uniform_values(len: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn random_tensor(order: usize, dim: usize, rng: &mut impl Rng) -> Tensor {
    if order == 0 {
        return Tensor::scalar(rng.random_range(-1.0..1.0));
    }
    Tensor::new(order, dim, uniform_values(dim.pow(order as u32), rng)).unwrap()
}

pub fn random_sym(order: usize, dim: usize, rng: &mut impl Rng) -> SymTensor {
    SymTensor::symmetrize(random_tensor(order, dim, rng))
}

/// Symmetric tensor in the unit ball with a random radius.
pub fn random_sym_in_ball(order: usize, dim: usize, rng: &mut impl Rng) -> SymTensor {
    let t = random_sym(order, dim, rng);
    let norm = t.hilbert_norm();
    let r = rng.random::<f64>();
    if norm == 0.0 {
        t
    } else {
        t.scaled(r / norm)
    }
}

/// `h_v` of order exactly `deg(v)`, each in the unit ball.
pub fn random_assignment_in_ball(f: &SimpleGraph, dim: usize, rng: &mut impl Rng) -> VertexAssignment {
    let tensors = f.degrees().into_iter().map(|d| random_sym_in_ball(d, dim, rng)).collect();
    VertexAssignment::new(dim, tensors).unwrap()
}

/// `h_v` of order `deg(v) + extra` with `extra` in `0..=max_extra`.
pub fn random_assignment_padded(f: &SimpleGraph, dim: usize, max_extra: usize, rng: &mut impl Rng) -> VertexAssignment {
    let tensors = f
        .degrees()
        .into_iter()
        .map(|d| {
            let extra = rng.random_range(0..=max_extra);
            random_sym(d + extra, dim, rng)
        })
        .collect();
    VertexAssignment::new(dim, tensors).unwrap()
}

pub fn random_symmetric_matrix(n: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = rng.random_range(-1.0..1.0);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    m
}

/// `(h_0, h_1, h_2) = (1, 0, M)`: on 2-regular graphs `pi` is a trace of a power of `M`.
pub fn matrix_model(m: &[Vec<f64>]) -> EdgeModel {
    let n = m.len();
    let h2 = SymTensor::from_nearly_symmetric(Tensor::matrix(m).unwrap(), 0.0).unwrap();
    EdgeModel::new(n, vec![SymTensor::scalar(1.0), SymTensor::zeros(1, n).unwrap(), h2]).unwrap()
}

/// `trace(M^p)` through nalgebra's matrix product.
pub fn trace_power(m: &[Vec<f64>], p: u32) -> f64 {
    let n = m.len();
    let a = DMatrix::from_fn(n, n, |i, j| m[i][j]);
    let mut acc = DMatrix::<f64>::identity(n, n);
    for _ in 0..p {
        acc = &acc * &a;
    }
    acc.trace()
}

/// Number of maps `V(F) -> V(G)` sending edges to edges, by plain enumeration.
pub fn hom_count(f: &SimpleGraph, g: &SimpleGraph) -> u64 {
    let (nf, ng) = (f.n_vertices(), g.n_vertices());
    let adj = g.adjacency();
    let total = (ng as u64).pow(nf as u32);
    let mut count = 0;
    let mut map = vec![0usize; nf];
    for code in 0..total {
        let mut c = code;
        for slot in map.iter_mut() {
            *slot = (c % ng as u64) as usize;
            c /= ng as u64;
        }
        if f.edges().iter().all(|&(u, v)| adj[map[u]][map[v]]) {
            count += 1;
        }
    }
    count
}

/// Largest singular value from nalgebra's SVD.
pub fn top_singular_value(values: &[f64], n: usize) -> f64 {
    let a = DMatrix::from_row_slice(n, n, values);
    a.singular_values().iter().copied().fold(0.0, f64::max)
}

/// Haar rotation (determinant +1) through nalgebra QR.
pub fn random_rotation(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut g = edgelim::orbit::random_orthogonal(n, rng);
    let det = DMatrix::from_row_slice(n, n, &g).determinant();
    if det < 0.0 {
        for row in 0..n {
            g[row * n] = -g[row * n];
        }
    }
    g
}

/// `|sum_{i in S, j in T} mu_i mu_j x_ij|` for bitmask-encoded `S`, `T`.
pub fn rectangle_value(mu: &[f64], x: &Tensor, s: usize, t: usize) -> f64 {
    let q = mu.len();
    let mut total = 0.0;
    for i in (0..q).filter(|i| s >> i & 1 == 1) {
        for j in (0..q).filter(|j| t >> j & 1 == 1) {
            total += mu[i] * mu[j] * x.values()[i * q + j];
        }
    }
    total.abs()
}

pub fn random_measures(q: usize, rng: &mut impl Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..q).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut mu: Vec<f64> = raw.iter().map(|r| r / total).collect();
    // push the rounding residue into the last block so the sum is 1 to 1e-15
    let rest: f64 = mu[..q - 1].iter().sum();
    mu[q - 1] = 1.0 - rest;
    mu
}
