//! Step graphons: homomorphism densities, the cut seminorm over rectangles
//! `chi^A x chi^B`, and cut distance up to block relabeling.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SimpleGraph;
use crate::hilbert::{seminorm, Dictionary, SeminormValue, Tensor};

/// Work limit for [`tau`]: `q^|V(F)|` block assignments.
pub const TAU_BUDGET: u128 = 100_000_000;
/// Largest block count [`cut_distance_aligned`] enumerates permutations for.
pub const MAX_ALIGN_BLOCKS: usize = 8;

const MEASURE_TOL: f64 = 1e-12;

/// `w(x, y) = vals[i][j]` for `x` in block `i`, `y` in block `j`; block `i` has measure `mu[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GraphonFile", into = "GraphonFile")]
pub struct StepGraphon {
    mu: Vec<f64>,
    vals: Tensor,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GraphonFile {
    q: usize,
    mu: Vec<f64>,
    vals: Vec<Vec<f64>>,
}

impl TryFrom<GraphonFile> for StepGraphon {
    type Error = Error;

    fn try_from(file: GraphonFile) -> Result<Self> {
        if file.mu.len() != file.q || file.vals.len() != file.q {
            return Err(Error::InvalidGraphon(format!(
                "q = {} but mu has {} entries and vals {} rows",
                file.q,
                file.mu.len(),
                file.vals.len()
            )));
        }
        StepGraphon::new(file.mu, &file.vals)
    }
}

impl From<StepGraphon> for GraphonFile {
    fn from(w: StepGraphon) -> Self {
        let q = w.q();
        GraphonFile {
            q,
            vals: w.vals.values().chunks(q).map(<[f64]>::to_vec).collect(),
            mu: w.mu,
        }
    }
}

fn check_measures(mu: &[f64]) -> Result<()> {
    if mu.is_empty() {
        return Err(Error::InvalidGraphon("a step graphon needs at least one block".into()));
    }
    if mu.iter().any(|&m| !(m.is_finite() && m > 0.0)) {
        return Err(Error::InvalidGraphon("block measures must be positive".into()));
    }
    let total: f64 = mu.iter().sum();
    if (total - 1.0).abs() > MEASURE_TOL {
        return Err(Error::InvalidGraphon(format!("block measures sum to {total}, not 1")));
    }
    Ok(())
}

impl StepGraphon {
    pub fn new(mu: Vec<f64>, vals: &[Vec<f64>]) -> Result<Self> {
        check_measures(&mu)?;
        let q = mu.len();
        if vals.len() != q || vals.iter().any(|r| r.len() != q) {
            return Err(Error::InvalidGraphon(format!("vals must be {q} x {q}")));
        }
        for i in 0..q {
            for j in 0..q {
                let v = vals[i][j];
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidGraphon(format!("vals[{i}][{j}] = {v} is outside [0, 1]")));
                }
                if v != vals[j][i] {
                    return Err(Error::InvalidGraphon(format!("vals[{i}][{j}] != vals[{j}][{i}]")));
                }
            }
        }
        Ok(Self {
            mu,
            vals: Tensor::matrix(vals)?,
        })
    }

    /// Equal block measures `1/q`.
    pub fn uniform(vals: &[Vec<f64>]) -> Result<Self> {
        Self::new(vec![1.0 / vals.len() as f64; vals.len()], vals)
    }

    pub fn constant(p: f64) -> Result<Self> {
        Self::new(vec![1.0], &[vec![p]])
    }

    pub fn q(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn val(&self, i: usize, j: usize) -> f64 {
        self.vals.values()[i * self.q() + j]
    }

    /// Block values as an order-2 tensor.
    pub fn vals(&self) -> &Tensor {
        &self.vals
    }

    pub fn is_uniform(&self) -> bool {
        let q = self.q() as f64;
        self.mu.iter().all(|&m| (m * q - 1.0).abs() <= MEASURE_TOL * q)
    }

    /// `(sigma . w)[i][j] = w[sigma(i)][sigma(j)]`, carrying the measures along.
    pub fn permuted(&self, sigma: &[usize]) -> Result<Self> {
        let q = self.q();
        if sigma.iter().copied().sorted().ne(0..q) {
            return Err(Error::Precondition(format!("{sigma:?} is not a permutation of 0..{q}")));
        }
        let rows: Vec<Vec<f64>> = (0..q)
            .map(|i| (0..q).map(|j| self.val(sigma[i], sigma[j])).collect())
            .collect();
        Self::new(sigma.iter().map(|&s| self.mu[s]).collect(), &rows)
    }

    /// The same function with every block cut into `parts` equal pieces.
    pub fn refined(&self, parts: usize) -> Result<Self> {
        if parts == 0 {
            return Err(Error::Precondition("refinement needs at least one part".into()));
        }
        let q = self.q();
        let rows: Vec<Vec<f64>> = (0..q * parts)
            .map(|i| (0..q * parts).map(|j| self.val(i / parts, j / parts)).collect())
            .collect();
        let mu = (0..q * parts).map(|i| self.mu[i / parts] / parts as f64).collect();
        Self::new(mu, &rows)
    }
}

/// `tau(w)(F) = sum_b prod_v mu_b(v) prod_{uv in E} vals[b(u)][b(v)]`.
///
/// The sum is nested vertex by vertex, `sum_{b_0} mu_{b_0} (... sum_{b_{n-1}} ...)`,
/// so rounding grows with `|V(F)| q` rather than with the `q^|V(F)|` terms.
pub fn tau(w: &StepGraphon, f: &SimpleGraph) -> Result<f64> {
    let q = w.q();
    let n = f.n_vertices();
    let work = (q as u128).checked_pow(n as u32).filter(|&c| c <= TAU_BUDGET);
    if work.is_none() {
        return Err(Error::BudgetExceeded(format!(
            "{q}^{n} block assignments exceed the budget of {TAU_BUDGET}"
        )));
    }
    // earlier[v]: neighbours of v that come before it
    let mut earlier = vec![Vec::new(); n];
    for &(a, b) in f.edges() {
        earlier[a.max(b)].push(a.min(b));
    }
    let mut blocks = vec![0usize; n];
    Ok(nested_sum(w, &earlier, &mut blocks, 0))
}

fn nested_sum(w: &StepGraphon, earlier: &[Vec<usize>], blocks: &mut [usize], v: usize) -> f64 {
    if v == blocks.len() {
        return 1.0;
    }
    let mut total = 0.0;
    for c in 0..w.q() {
        let factor = earlier[v].iter().fold(w.mu[c], |acc, &u| acc * w.val(blocks[u], c));
        if factor != 0.0 {
            blocks[v] = c;
            total += factor * nested_sum(w, earlier, blocks, v + 1);
        }
    }
    total
}

/// Adjacency matrix of `g` on `|V(g)|` equal blocks.
pub fn graph_to_graphon(g: &SimpleGraph) -> Result<StepGraphon> {
    if g.n_vertices() == 0 {
        return Err(Error::InvalidGraph("the empty vertex set has no graphon".into()));
    }
    let rows: Vec<Vec<f64>> = g
        .adjacency()
        .into_iter()
        .map(|r| r.into_iter().map(|a| if a { 1.0 } else { 0.0 }).collect())
        .collect();
    StepGraphon::uniform(&rows)
}

/// Cut seminorm of a symmetric block kernel over measures `mu`.
///
/// The optimal rectangle for a step function is a union of blocks, so the
/// enumeration over block subsets is exact.
pub fn cut_seminorm_kernel(mu: &[f64], kernel: &Tensor) -> Result<SeminormValue> {
    seminorm(kernel, &Dictionary::cut_products(mu.to_vec())?)
}

pub fn cut_seminorm(w: &StepGraphon) -> Result<SeminormValue> {
    cut_seminorm_kernel(&w.mu, &w.vals)
}

fn check_same_measures(w1: &StepGraphon, w2: &StepGraphon) -> Result<()> {
    if w1.q() != w2.q() {
        return Err(Error::ShapeMismatch(format!("{} blocks vs {} blocks", w1.q(), w2.q())));
    }
    if w1.mu.iter().zip(&w2.mu).any(|(a, b)| (a - b).abs() > MEASURE_TOL) {
        return Err(Error::Precondition("block measures differ".into()));
    }
    Ok(())
}

/// `||w1 - w2||_cut` for graphons on the same blocks.
pub fn cut_distance(w1: &StepGraphon, w2: &StepGraphon) -> Result<SeminormValue> {
    check_same_measures(w1, w2)?;
    cut_seminorm_kernel(&w1.mu, &w1.vals.sub(&w2.vals)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignedDistance {
    pub value: f64,
    /// Block permutation `sigma` attaining the minimum of `||w1 - sigma . w2||_cut`.
    pub permutation: Vec<usize>,
    pub cut: SeminormValue,
}

/// `min_sigma ||w1 - sigma . w2||_cut` over block permutations.
///
/// An upper bound on the distance between the measure-preserving orbits.
/// Ties keep the lexicographically first permutation.
pub fn cut_distance_aligned(w1: &StepGraphon, w2: &StepGraphon) -> Result<AlignedDistance> {
    check_same_measures(w1, w2)?;
    if !w1.is_uniform() || !w2.is_uniform() {
        return Err(Error::Precondition("alignment needs equal block measures".into()));
    }
    let q = w1.q();
    if q > MAX_ALIGN_BLOCKS {
        return Err(Error::BudgetExceeded(format!(
            "{q}! block permutations exceed the limit of {MAX_ALIGN_BLOCKS} blocks"
        )));
    }
    let mut best: Option<AlignedDistance> = None;
    for sigma in (0..q).permutations(q) {
        let cut = cut_distance(w1, &w2.permuted(&sigma)?)?;
        if best.as_ref().is_none_or(|b| cut.value < b.value) {
            best = Some(AlignedDistance {
                value: cut.value,
                permutation: sigma,
                cut,
            });
        }
    }
    Ok(best.expect("at least the identity permutation"))
}
