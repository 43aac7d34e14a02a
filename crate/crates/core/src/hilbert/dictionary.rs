use serde::{Deserialize, Serialize};

use super::linalg::top_singular_triple;
use super::rank_one::{alternating_rank_one, SearchBudget};
use super::tensor::Tensor;
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// Largest block count for exact cut enumeration (`4^q` subset pairs).
pub const MAX_CUT_BLOCKS: usize = 14;

/// A bounded family `R` of atoms defining `||x||_R = sup_{r in R} |<r, x>|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DictionaryFile", into = "DictionaryFile")]
pub enum Dictionary {
    /// Explicit atoms sharing one shape, each of Hilbert norm at most 1.
    FiniteSet { atoms: Vec<Tensor> },
    /// All `r_1 ⊗ ... ⊗ r_k` with every `r_i` in the unit ball of `R^dim`.
    RankOneBall {
        order: usize,
        dim: usize,
        budget: SearchBudget,
    },
    /// Products `1_A × 1_B` of block unions for a step function with block measures `mu`.
    CutProducts { mu: Vec<f64> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum DictionaryFile {
    FiniteSet {
        atoms: Vec<Tensor>,
    },
    RankOneBall {
        order: usize,
        dim: usize,
        #[serde(default)]
        budget: SearchBudget,
    },
    CutProducts {
        mu: Vec<f64>,
    },
}

impl TryFrom<DictionaryFile> for Dictionary {
    type Error = Error;

    fn try_from(file: DictionaryFile) -> Result<Self> {
        match file {
            DictionaryFile::FiniteSet { atoms } => Dictionary::finite_set(atoms),
            DictionaryFile::RankOneBall { order, dim, budget } => {
                Ok(Dictionary::rank_one_ball(order, dim)?.with_budget(budget))
            }
            DictionaryFile::CutProducts { mu } => Dictionary::cut_products(mu),
        }
    }
}

impl From<Dictionary> for DictionaryFile {
    fn from(d: Dictionary) -> Self {
        match d {
            Dictionary::FiniteSet { atoms } => DictionaryFile::FiniteSet { atoms },
            Dictionary::RankOneBall { order, dim, budget } => {
                DictionaryFile::RankOneBall { order, dim, budget }
            }
            Dictionary::CutProducts { mu } => DictionaryFile::CutProducts { mu },
        }
    }
}

/// Whether a reported seminorm is the supremum or only a value below it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueKind {
    Exact,
    LowerBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WitnessDetail {
    /// Index into a finite atom list.
    Atom { index: usize },
    /// Block sets `A` (rows) and `B` (columns).
    Cut { rows: Vec<usize>, cols: Vec<usize> },
    RankOne { factors: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub atom: Tensor,
    pub detail: WitnessDetail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeminormValue {
    pub value: f64,
    pub kind: ValueKind,
    /// An atom with `|<atom, x>| == value`.
    pub witness: Witness,
}

impl Dictionary {
    pub fn finite_set(atoms: Vec<Tensor>) -> Result<Self> {
        let Some(first) = atoms.first() else {
            return Err(Error::EmptyDictionary);
        };
        for (i, a) in atoms.iter().enumerate() {
            if !a.same_shape(first) {
                return Err(Error::InvalidDictionary(format!("atom {i} differs in shape from atom 0")));
            }
            let norm = a.hilbert_norm();
            if norm > 1.0 + 1e-12 {
                return Err(Error::InvalidDictionary(format!("atom {i} has norm {norm} > 1")));
            }
        }
        Ok(Dictionary::FiniteSet { atoms })
    }

    /// `{e_1, ..., e_dim}`; its seminorm is the largest absolute entry.
    pub fn standard_basis(dim: usize) -> Result<Self> {
        let atoms = (0..dim).map(|i| Tensor::basis(dim, i)).collect::<Result<Vec<_>>>()?;
        Self::finite_set(atoms)
    }

    /// `{±e_1, ..., ±e_dim}`, closed under signed permutations of the colours.
    pub fn signed_basis(dim: usize) -> Result<Self> {
        let mut atoms = Vec::with_capacity(2 * dim);
        for i in 0..dim {
            let e = Tensor::basis(dim, i)?;
            atoms.push(e.scaled(-1.0));
            atoms.push(e);
        }
        Self::finite_set(atoms)
    }

    pub fn rank_one_ball(order: usize, dim: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidDictionary("rank-one ball needs order >= 1".into()));
        }
        super::tensor::dense_len(order, dim)?;
        Ok(Dictionary::RankOneBall {
            order,
            dim,
            budget: SearchBudget::default(),
        })
    }

    pub fn with_budget(self, budget: SearchBudget) -> Self {
        match self {
            Dictionary::RankOneBall { order, dim, .. } => Dictionary::RankOneBall { order, dim, budget },
            other => other,
        }
    }

    pub fn cut_products(mu: Vec<f64>) -> Result<Self> {
        if mu.is_empty() {
            return Err(Error::InvalidDictionary("cut dictionary needs at least one block".into()));
        }
        if mu.iter().any(|&m| !(m.is_finite() && m > 0.0)) {
            return Err(Error::InvalidDictionary("block measures must be positive".into()));
        }
        let total: f64 = mu.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDictionary(format!("block measures sum to {total}, not 1")));
        }
        Ok(Dictionary::CutProducts { mu })
    }

    pub fn uniform_cut(q: usize) -> Result<Self> {
        Self::cut_products(vec![1.0 / q as f64; q])
    }

    /// Exact for everything except rank-one balls of order at least 3.
    pub fn kind(&self) -> ValueKind {
        match self {
            Dictionary::RankOneBall { order, .. } if *order >= 3 => ValueKind::LowerBound,
            _ => ValueKind::Exact,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.kind() == ValueKind::Exact
    }

    /// `(order, dim)` of the tensors this dictionary measures.
    pub fn shape(&self) -> (usize, usize) {
        match self {
            Dictionary::FiniteSet { atoms } => (atoms[0].order(), atoms[0].dim()),
            Dictionary::RankOneBall { order, dim, .. } => (*order, *dim),
            Dictionary::CutProducts { mu } => (2, mu.len()),
        }
    }

    fn check_input(&self, x: &Tensor) -> Result<()> {
        let (order, dim) = self.shape();
        if x.order() != order || (order > 0 && x.dim() != dim) {
            return Err(Error::ShapeMismatch(format!(
                "dictionary measures order {order} dim {dim}, got order {} dim {}",
                x.order(),
                x.dim()
            )));
        }
        Ok(())
    }
}

/// `||x||_R` with default tolerances.
pub fn seminorm(x: &Tensor, dict: &Dictionary) -> Result<SeminormValue> {
    seminorm_with(x, dict, &Tolerances::default())
}

pub fn seminorm_with(x: &Tensor, dict: &Dictionary, tol: &Tolerances) -> Result<SeminormValue> {
    dict.check_input(x)?;
    let witness = match dict {
        Dictionary::FiniteSet { atoms } => best_atom(x, atoms)?,
        Dictionary::CutProducts { mu } => best_cut(x, mu)?,
        Dictionary::RankOneBall { order, budget, .. } => best_rank_one(x, *order, budget, tol)?,
    };
    let value = witness.atom.inner(x)?.abs();
    Ok(SeminormValue {
        value,
        kind: dict.kind(),
        witness,
    })
}

fn best_atom(x: &Tensor, atoms: &[Tensor]) -> Result<Witness> {
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, a) in atoms.iter().enumerate() {
        let v = a.inner(x)?.abs();
        if v > best.1 {
            best = (i, v);
        }
    }
    Ok(Witness {
        atom: atoms[best.0].clone(),
        detail: WitnessDetail::Atom { index: best.0 },
    })
}

fn mask_members(mask: usize, q: usize) -> Vec<usize> {
    (0..q).filter(|i| mask >> i & 1 == 1).collect()
}

/// Exact max over block-set pairs `(S, T)` of `|sum_{i in S, j in T} mu_i mu_j x_ij|`.
///
/// For a fixed `S` the best `T` collects the columns whose weighted sums
/// share a sign, so the search is `2^q` row sets instead of `4^q` pairs.
/// Sets are encoded as bitmasks (bit `i` = block `i`); among maximizers the
/// pair with the smallest `(S, T)` mask is returned.
fn best_cut(x: &Tensor, mu: &[f64]) -> Result<Witness> {
    let q = mu.len();
    if q > MAX_CUT_BLOCKS {
        return Err(Error::BudgetExceeded(format!(
            "cut enumeration over {q} blocks exceeds the limit of {MAX_CUT_BLOCKS}"
        )));
    }
    let weighted: Vec<f64> = (0..q * q)
        .map(|f| mu[f / q] * mu[f % q] * x.values()[f])
        .collect();

    let mut best = (0usize, 0usize, 0.0f64);
    let mut col = vec![0.0; q];
    for s in 0..(1usize << q) {
        col.iter_mut().for_each(|c| *c = 0.0);
        for i in mask_members(s, q) {
            for j in 0..q {
                col[j] += weighted[i * q + j];
            }
        }
        let (mut pos_mask, mut pos) = (0usize, 0.0);
        let (mut neg_mask, mut neg) = (0usize, 0.0);
        for (j, &c) in col.iter().enumerate() {
            if c > 0.0 {
                pos_mask |= 1 << j;
                pos += c;
            } else if c < 0.0 {
                neg_mask |= 1 << j;
                neg -= c;
            }
        }
        let (t, v) = if pos > neg || (pos == neg && pos_mask <= neg_mask) {
            (pos_mask, pos)
        } else {
            (neg_mask, neg)
        };
        if v > best.2 {
            best = (s, t, v);
        }
    }

    let (rows, cols) = (mask_members(best.0, q), mask_members(best.1, q));
    let mut values = vec![0.0; q * q];
    for &i in &rows {
        for &j in &cols {
            values[i * q + j] = mu[i] * mu[j];
        }
    }
    Ok(Witness {
        atom: Tensor::new(2, q, values)?,
        detail: WitnessDetail::Cut { rows, cols },
    })
}

fn best_rank_one(x: &Tensor, order: usize, budget: &SearchBudget, tol: &Tolerances) -> Result<Witness> {
    let n = x.dim();
    let factors = match order {
        1 => {
            let norm = x.hilbert_norm();
            let v = if norm > 0.0 {
                x.values().iter().map(|c| c / norm).collect()
            } else {
                Tensor::basis(n, 0)?.into_values()
            };
            vec![v]
        }
        2 => {
            let t = top_singular_triple(x.values(), n, tol.svd);
            vec![t.left, t.right]
        }
        _ => alternating_rank_one(x, budget, tol.alternating).factors,
    };
    Ok(Witness {
        atom: Tensor::outer(&factors)?,
        detail: WitnessDetail::RankOne { factors },
    })
}
