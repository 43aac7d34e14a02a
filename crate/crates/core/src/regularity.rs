//! Greedy weak-regularity decomposition.
//!
//! Any `a` in the unit ball is written as `sum_i c_i r_i + residual` with at
//! most `k` dictionary atoms `r_i`, coefficients `c_i in [-1, 1]` and
//! `||residual||_R <= 1/sqrt(k)`. Each step removes the best-correlated atom:
//! `a_{i+1} = a_i - <r, a_i> r`, which lowers the energy by
//! `<r, a_i>^2 (2 - ||r||^2) >= 1/k`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{seminorm_with, Dictionary, Tensor, ValueKind};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub original: Tensor,
    pub atoms: Vec<Tensor>,
    pub coeffs: Vec<f64>,
    pub residual: Tensor,
    /// `||a_i||^2` for `i = 0..=steps`.
    pub energy_log: Vec<f64>,
    pub steps: usize,
    pub k: usize,
    /// Seminorm of the residual when the loop stopped.
    pub residual_seminorm: f64,
    /// False when the dictionary seminorm is only a lower bound, in which case
    /// the `1/sqrt(k)` guarantee is not certified.
    pub certified: bool,
}

impl Decomposition {
    pub fn threshold(&self) -> f64 {
        1.0 / (self.k as f64).sqrt()
    }

    /// `sum_i c_i r_i + residual`
    pub fn reconstruct(&self) -> Result<Tensor> {
        let mut out = self.residual.clone();
        for (c, r) in self.coeffs.iter().zip(&self.atoms) {
            out.add_scaled(*c, r)?;
        }
        Ok(out)
    }

    /// `||original - reconstruct()||`
    pub fn reconstruction_defect(&self) -> Result<f64> {
        if self.coeffs.len() != self.atoms.len() {
            return Err(Error::InconsistentDecomposition(f64::INFINITY));
        }
        Ok(self.original.sub(&self.reconstruct()?)?.hilbert_norm())
    }
}

pub fn greedy_decompose(a: &Tensor, dict: &Dictionary, k: usize) -> Result<Decomposition> {
    greedy_decompose_with(a, dict, k, &Tolerances::default())
}

/// Runs the greedy loop, always taking the seminorm maximizer as the next atom.
///
/// The loop continues while `||a_i||_R >= 1/sqrt(k) - greedy_slack` and never
/// takes more than `k` steps.
pub fn greedy_decompose_with(
    a: &Tensor,
    dict: &Dictionary,
    k: usize,
    tol: &Tolerances,
) -> Result<Decomposition> {
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    let norm = a.hilbert_norm();
    if norm > 1.0 + tol.ball {
        return Err(Error::Precondition(format!("||a|| = {norm} exceeds 1")));
    }
    let threshold = 1.0 / (k as f64).sqrt();

    let mut current = a.clone();
    let mut atoms = Vec::new();
    let mut coeffs = Vec::new();
    let mut energy_log = vec![current.norm_squared()];
    let mut value = seminorm_with(&current, dict, tol)?;
    while atoms.len() < k && value.value >= threshold - tol.greedy_slack {
        let r = value.witness.atom;
        let c = r.inner(&current)?;
        current.add_scaled(-c, &r)?;
        energy_log.push(current.norm_squared());
        atoms.push(r);
        coeffs.push(c);
        value = seminorm_with(&current, dict, tol)?;
    }

    Ok(Decomposition {
        original: a.clone(),
        steps: atoms.len(),
        atoms,
        coeffs,
        residual: current,
        energy_log,
        k,
        residual_seminorm: value.value,
        certified: value.kind == ValueKind::Exact,
    })
}

/// Per-step audit of the energy identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepAudit {
    pub step: usize,
    /// Recomputed `<r, a_i>`.
    pub coeff: f64,
    /// `||a_{i+1}||^2` from the replayed iterate.
    pub energy_after: f64,
    /// `||a_i||^2 - <r, a_i>^2 (2 - ||r||^2)`
    pub predicted: f64,
    pub violation: f64,
    /// `1 - (i + 1)/k`
    pub chained_bound: f64,
    pub chained_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub steps: Vec<StepAudit>,
    pub max_violation: f64,
    /// Largest gap between the logged and replayed energies or coefficients.
    pub log_mismatch: f64,
    pub chained_ok: bool,
    pub residual_seminorm: f64,
    /// `Some(ok)` when the dictionary is exact, `None` when the bound is not certified.
    pub residual_certified: Option<bool>,
    pub passed: bool,
}

pub fn verify_energy_identity(dec: &Decomposition, dict: &Dictionary) -> Result<EnergyReport> {
    verify_energy_identity_with(dec, dict, &Tolerances::default())
}

/// Replays the decomposition from its atoms and checks every step.
pub fn verify_energy_identity_with(
    dec: &Decomposition,
    dict: &Dictionary,
    tol: &Tolerances,
) -> Result<EnergyReport> {
    let defect = dec.reconstruction_defect()?;
    if defect > tol.eq {
        return Err(Error::InconsistentDecomposition(defect));
    }
    let k = dec.k.max(1) as f64;

    let mut current = dec.original.clone();
    let mut steps = Vec::with_capacity(dec.atoms.len());
    let mut log_mismatch = 0.0f64;
    for (i, r) in dec.atoms.iter().enumerate() {
        let before = current.norm_squared();
        let c = r.inner(&current)?;
        current.add_scaled(-c, r)?;
        let energy_after = current.norm_squared();
        let predicted = before - c * c * (2.0 - r.norm_squared());
        let violation = (energy_after - predicted).abs();
        let chained_bound = 1.0 - (i + 1) as f64 / k;
        log_mismatch = log_mismatch.max((c - dec.coeffs[i]).abs());
        if let Some(logged) = dec.energy_log.get(i + 1) {
            log_mismatch = log_mismatch.max((logged - energy_after).abs());
        }
        steps.push(StepAudit {
            step: i,
            coeff: c,
            energy_after,
            predicted,
            violation,
            chained_bound,
            chained_ok: energy_after <= chained_bound + tol.eq,
        });
    }

    let residual = seminorm_with(&dec.residual, dict, tol)?;
    let residual_certified = (residual.kind == ValueKind::Exact)
        .then(|| residual.value <= 1.0 / k.sqrt() + tol.eq);
    let max_violation = steps.iter().fold(0.0f64, |m, s| m.max(s.violation));
    let chained_ok = steps.iter().all(|s| s.chained_ok);
    let passed = max_violation <= tol.eq
        && log_mismatch <= tol.eq
        && chained_ok
        && residual_certified != Some(false);
    Ok(EnergyReport {
        steps,
        max_violation,
        log_mismatch,
        chained_ok,
        residual_seminorm: residual.value,
        residual_certified,
        passed,
    })
}

/// Whether the approximant `a - residual` lies in `Q_k`: coefficients in `[-1, 1]`
/// and a reconstruction that closes.
pub fn q_k_membership(dec: &Decomposition) -> bool {
    q_k_membership_with(dec, &Tolerances::default())
}

pub fn q_k_membership_with(dec: &Decomposition, tol: &Tolerances) -> bool {
    dec.coeffs.iter().all(|c| (-1.0..=1.0).contains(c))
        && matches!(dec.reconstruction_defect(), Ok(d) if d <= tol.eq)
}
