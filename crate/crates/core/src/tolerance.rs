use serde::{Deserialize, Serialize};

/// Every numerical threshold used by the crate, in one record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Absolute slack for equality and inequality checks.
    pub eq: f64,
    /// Convergence target for the two-sided Jacobi sweep behind the order-2 seminorm.
    pub svd: f64,
    /// Convergence threshold of the alternating rank-one maximization.
    pub alternating: f64,
    /// Slack on the greedy stopping threshold `1/sqrt(k)`.
    pub greedy_slack: f64,
    /// Allowed deviation of `g^T g` from the identity.
    pub orthogonality: f64,
    /// Allowed norm excess over 1 for ball membership.
    pub ball: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eq: 1e-9,
            svd: 1e-12,
            alternating: 1e-10,
            greedy_slack: 1e-12,
            orthogonality: 1e-9,
            ball: 1e-9,
        }
    }
}
