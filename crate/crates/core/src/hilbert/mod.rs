//! Finite-dimensional Hilbert-space primitives: dense tensors, symmetric
//! tensors, and the seminorms `||x||_R = sup_{r in R} |<r, x>|` for the three
//! dictionary families (finite atom sets, rank-one balls, cut products).

mod dictionary;
mod linalg;
mod rank_one;
mod tensor;

pub use dictionary::{
    seminorm, seminorm_with, Dictionary, SeminormValue, ValueKind, Witness, WitnessDetail,
    MAX_CUT_BLOCKS,
};
pub use rank_one::SearchBudget;
pub use tensor::{dense_len, hilbert_norm, inner, symmetrize, SymTensor, Tensor, MAX_DENSE_LEN};

