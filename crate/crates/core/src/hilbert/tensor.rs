//! Dense real tensors over a finite colour set.
//!
//! A [`Tensor`] of order `k` over `n` colours is an element of `l2([n]^k)`,
//! stored as `n^k` values in row-major order. A [`SymTensor`] is a tensor
//! whose values are invariant under every permutation of the `k` indices.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of stored values a dense tensor may have.
pub const MAX_DENSE_LEN: usize = 10_000_000;

/// Number of values of an order-`order` tensor over `dim` colours, if it fits the dense limit.
pub fn dense_len(order: usize, dim: usize) -> Result<usize> {
    if dim == 0 {
        return Err(Error::ShapeMismatch("dimension must be at least 1".into()));
    }
    let order_u32 = u32::try_from(order).map_err(|_| Error::TooLarge { order, dim })?;
    match dim.checked_pow(order_u32) {
        Some(len) if len <= MAX_DENSE_LEN => Ok(len),
        _ => Err(Error::TooLarge { order, dim }),
    }
}

/// Calls `f(index, flat)` for every multi-index in row-major order.
pub(crate) fn for_each_index(order: usize, dim: usize, mut f: impl FnMut(&[usize], usize)) {
    let mut index = vec![0usize; order];
    let mut flat = 0usize;
    loop {
        f(&index, flat);
        flat += 1;
        let mut pos = order;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            index[pos] += 1;
            if index[pos] < dim {
                break;
            }
            index[pos] = 0;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TensorFile", into = "TensorFile")]
pub struct Tensor {
    order: usize,
    dim: usize,
    values: Vec<f64>,
}

/// On-disk layout shared by [`Tensor`] and [`SymTensor`].
#[derive(Debug, Clone, Serialize, Deserialize)]
struct TensorFile {
    order: usize,
    dim: usize,
    values: Vec<f64>,
}

impl TryFrom<TensorFile> for Tensor {
    type Error = Error;

    fn try_from(file: TensorFile) -> Result<Self> {
        Tensor::new(file.order, file.dim, file.values)
    }
}

impl From<Tensor> for TensorFile {
    fn from(t: Tensor) -> Self {
        TensorFile {
            order: t.order,
            dim: t.dim,
            values: t.values,
        }
    }
}

impl Tensor {
    pub fn new(order: usize, dim: usize, values: Vec<f64>) -> Result<Self> {
        let expected = dense_len(order, dim)?;
        if values.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("tensor values".into()));
        }
        Ok(Self { order, dim, values })
    }

    pub fn zeros(order: usize, dim: usize) -> Result<Self> {
        let len = dense_len(order, dim)?;
        Ok(Self {
            order,
            dim,
            values: vec![0.0; len],
        })
    }

    /// Order-0 tensor. Its colour dimension is nominal and set to 1.
    pub fn scalar(value: f64) -> Self {
        Self {
            order: 0,
            dim: 1,
            values: vec![value],
        }
    }

    pub fn vector(values: Vec<f64>) -> Result<Self> {
        let dim = values.len();
        Self::new(1, dim, values)
    }

    /// Square matrix from its rows.
    pub fn matrix(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::ShapeMismatch("matrix rows must all have length n".into()));
        }
        Self::new(2, dim, rows.concat())
    }

    /// Standard basis vector `e_i` of `R^dim`.
    pub fn basis(dim: usize, i: usize) -> Result<Self> {
        if i >= dim {
            return Err(Error::ShapeMismatch(format!("basis index {i} out of range for dim {dim}")));
        }
        let mut t = Self::zeros(1, dim)?;
        t.values[i] = 1.0;
        Ok(t)
    }

    /// `f_1 ⊗ ... ⊗ f_k`; all factors must share one dimension.
    pub fn outer(factors: &[Vec<f64>]) -> Result<Self> {
        let Some(first) = factors.first() else {
            return Ok(Self::scalar(1.0));
        };
        let dim = first.len();
        if factors.iter().any(|f| f.len() != dim) {
            return Err(Error::ShapeMismatch("outer product factors differ in length".into()));
        }
        let mut values = Vec::with_capacity(dense_len(factors.len(), dim)?);
        for_each_index(factors.len(), dim, |idx, _| {
            values.push(idx.iter().zip(factors).map(|(&i, f)| f[i]).product());
        });
        Self::new(factors.len(), dim, values)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn flat_index(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.order);
        index.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        self.values[self.flat_index(index)]
    }

    pub fn same_shape(&self, other: &Tensor) -> bool {
        self.order == other.order && (self.dim == other.dim || self.order == 0)
    }

    pub(crate) fn check_shape(&self, other: &Tensor) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "order {} dim {} vs order {} dim {}",
                self.order, self.dim, other.order, other.dim
            )))
        }
    }

    /// Plain l2 inner product.
    pub fn inner(&self, other: &Tensor) -> Result<f64> {
        self.check_shape(other)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum())
    }

    pub fn norm_squared(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn hilbert_norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, alpha: f64) -> Tensor {
        Tensor {
            order: self.order,
            dim: self.dim,
            values: self.values.iter().map(|v| alpha * v).collect(),
        }
    }

    /// `self += alpha * other`
    pub fn add_scaled(&mut self, alpha: f64, other: &Tensor) -> Result<()> {
        self.check_shape(other)?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += alpha * b;
        }
        Ok(())
    }

    pub fn sub(&self, other: &Tensor) -> Result<Tensor> {
        let mut out = self.clone();
        out.add_scaled(-1.0, other)?;
        Ok(out)
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor> {
        let mut out = self.clone();
        out.add_scaled(1.0, other)?;
        Ok(out)
    }

    /// Largest deviation between an entry and any of its index permutations.
    pub fn asymmetry(&self) -> f64 {
        if self.order < 2 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for_each_index(self.order, self.dim, |idx, flat| {
            let mut sorted = idx.to_vec();
            sorted.sort_unstable();
            let canon = self.flat_index(&sorted);
            worst = worst.max((self.values[flat] - self.values[canon]).abs());
        });
        worst
    }

    pub fn is_symmetric(&self) -> bool {
        self.asymmetry() == 0.0
    }

    /// The order-`(k - l)` tensor `h(c_1, ..., c_l)` obtained by fixing the first `l` indices.
    pub fn slice(&self, prefix: &[usize]) -> Result<Tensor> {
        if prefix.len() > self.order {
            return Err(Error::ShapeMismatch(format!(
                "cannot fix {} indices of an order-{} tensor",
                prefix.len(),
                self.order
            )));
        }
        if let Some(&c) = prefix.iter().find(|&&c| c >= self.dim) {
            return Err(Error::ShapeMismatch(format!("colour {c} out of range")));
        }
        let rest = self.order - prefix.len();
        let block = dense_len(rest, self.dim)?;
        let offset = prefix.iter().fold(0, |acc, &c| acc * self.dim + c) * block;
        Ok(Tensor {
            order: rest,
            dim: if rest == 0 { 1 } else { self.dim },
            values: self.values[offset..offset + block].to_vec(),
        })
    }

    /// Norm of the slice `h(c_1, ..., c_l)` without materializing it.
    pub fn slice_norm(&self, prefix: &[usize]) -> f64 {
        let rest = self.order - prefix.len();
        let block = self.dim.pow(rest as u32);
        let offset = prefix.iter().fold(0, |acc, &c| acc * self.dim + c) * block;
        self.values[offset..offset + block]
            .iter()
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }

    /// Multiplies every mode by the row-major `dim x dim` matrix `g`:
    /// `out[i_1..i_k] = sum_j g[i_1][j_1] ... g[i_k][j_k] t[j_1..j_k]`.
    pub fn apply_all_modes(&self, g: &[f64]) -> Result<Tensor> {
        let n = self.dim;
        if self.order == 0 {
            return Ok(self.clone());
        }
        if g.len() != n * n {
            return Err(Error::ShapeMismatch(format!(
                "matrix of {} entries acting on dimension {n}",
                g.len()
            )));
        }
        let mut cur = self.values.clone();
        let mut next = vec![0.0; cur.len()];
        for mode in 0..self.order {
            let inner_block = n.pow((self.order - 1 - mode) as u32);
            let outer_count = cur.len() / (inner_block * n);
            next.iter_mut().for_each(|v| *v = 0.0);
            for o in 0..outer_count {
                let base = o * n * inner_block;
                for i in 0..n {
                    let dst = base + i * inner_block;
                    for j in 0..n {
                        let gij = g[i * n + j];
                        if gij == 0.0 {
                            continue;
                        }
                        let src = base + j * inner_block;
                        for t in 0..inner_block {
                            next[dst + t] += gij * cur[src + t];
                        }
                    }
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        Tensor::new(self.order, n, cur)
    }

    /// Embeds into `l2([dim]^k)` for `dim >= self.dim`, padding new colours with zeros.
    pub fn padded(&self, dim: usize) -> Result<Tensor> {
        if dim < self.dim {
            return Err(Error::ShapeMismatch(format!(
                "cannot pad dimension {} down to {dim}",
                self.dim
            )));
        }
        if self.order == 0 {
            return Ok(self.clone());
        }
        let mut out = Tensor::zeros(self.order, dim)?;
        for_each_index(self.order, self.dim, |idx, flat| {
            let target = out.flat_index(idx);
            out.values[target] = self.values[flat];
        });
        Ok(out)
    }
}

/// `sum` over all index tuples of `x * y`.
pub fn inner(x: &Tensor, y: &Tensor) -> Result<f64> {
    x.inner(y)
}

pub fn hilbert_norm(x: &Tensor) -> f64 {
    x.hilbert_norm()
}

/// Replaces every entry by the mean over its index-permutation orbit.
///
/// Orbits whose entries are already equal keep their exact value, so the
/// operation is idempotent bit for bit.
pub fn symmetrize(values: Vec<f64>, order: usize, dim: usize) -> Result<SymTensor> {
    let t = Tensor::new(order, dim, values)?;
    if order < 2 {
        return Ok(SymTensor(t));
    }
    let len = t.len();
    let mut sum = vec![0.0f64; len];
    let mut count = vec![0u32; len];
    let mut uniform = vec![true; len];
    let mut canon_of = vec![0usize; len];
    let mut sorted = vec![0usize; order];
    for_each_index(order, dim, |idx, flat| {
        sorted.copy_from_slice(idx);
        sorted.sort_unstable();
        let canon = t.flat_index(&sorted);
        canon_of[flat] = canon;
        sum[canon] += t.values[flat];
        count[canon] += 1;
        if t.values[flat] != t.values[canon] {
            uniform[canon] = false;
        }
    });
    let values = (0..len)
        .map(|flat| {
            let c = canon_of[flat];
            if uniform[c] {
                t.values[c]
            } else {
                sum[c] / f64::from(count[c])
            }
        })
        .collect();
    Ok(SymTensor(Tensor {
        order,
        dim,
        values,
    }))
}

/// A tensor invariant under all permutations of its indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TensorFile", into = "TensorFile")]
pub struct SymTensor(Tensor);

impl TryFrom<TensorFile> for SymTensor {
    type Error = Error;

    fn try_from(file: TensorFile) -> Result<Self> {
        SymTensor::from_nearly_symmetric(Tensor::new(file.order, file.dim, file.values)?, 1e-9)
    }
}

impl From<SymTensor> for TensorFile {
    fn from(t: SymTensor) -> Self {
        t.0.into()
    }
}

impl SymTensor {
    pub fn symmetrize(t: Tensor) -> SymTensor {
        let (order, dim) = (t.order, t.dim);
        symmetrize(t.values, order, dim).expect("shape already validated")
    }

    /// Accepts a tensor that is symmetric up to `tol`, then symmetrizes it exactly.
    pub fn from_nearly_symmetric(t: Tensor, tol: f64) -> Result<SymTensor> {
        let asym = t.asymmetry();
        if asym > tol {
            return Err(Error::ShapeMismatch(format!(
                "tensor is not symmetric (deviation {asym:e})"
            )));
        }
        Ok(Self::symmetrize(t))
    }

    pub fn scalar(value: f64) -> SymTensor {
        SymTensor(Tensor::scalar(value))
    }

    pub fn zeros(order: usize, dim: usize) -> Result<SymTensor> {
        Ok(SymTensor(Tensor::zeros(order, dim)?))
    }

    /// Rank-one symmetric tensor `v ⊗ ... ⊗ v`.
    pub fn power(v: &[f64], order: usize) -> Result<SymTensor> {
        if order == 0 {
            return Ok(Self::scalar(1.0));
        }
        let factors = vec![v.to_vec(); order];
        Ok(SymTensor(Tensor::outer(&factors)?))
    }

    pub fn as_tensor(&self) -> &Tensor {
        &self.0
    }

    pub fn into_tensor(self) -> Tensor {
        self.0
    }

    pub fn scaled(&self, alpha: f64) -> SymTensor {
        SymTensor(self.0.scaled(alpha))
    }

    /// Linear combination `alpha * self + beta * other`; stays symmetric.
    pub fn combine(&self, alpha: f64, beta: f64, other: &SymTensor) -> Result<SymTensor> {
        let mut out = self.0.scaled(alpha);
        out.add_scaled(beta, &other.0)?;
        Ok(SymTensor(out))
    }

    pub fn sub(&self, other: &SymTensor) -> Result<SymTensor> {
        self.combine(1.0, -1.0, other)
    }

    pub fn padded(&self, dim: usize) -> Result<SymTensor> {
        Ok(SymTensor(self.0.padded(dim)?))
    }
}

impl Deref for SymTensor {
    type Target = Tensor;

    fn deref(&self) -> &Tensor {
        &self.0
    }
}

impl AsRef<Tensor> for SymTensor {
    fn as_ref(&self) -> &Tensor {
        &self.0
    }
}
