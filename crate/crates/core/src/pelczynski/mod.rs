//! Positive operators on truncated `ℓᵖ` direct sums `Y ⊕ X ⊕ X ⊕ …` as
//! commutators of positive operators, and the embedding pairs that drive
//! the construction.

pub mod blocks;
pub mod dominance;
pub mod embedding;
pub mod operators;
pub mod pipeline;
pub mod regroup;

pub use blocks::{block_operator_from_json, block_operator_to_json, BlockOperator, BlockPartition, BlockValue};
pub use dominance::{band_projection_decay, check_dominance, dominating_matrix_u, DecayRow, DominanceReport};
pub use embedding::{lp_embedding, EmbeddingPair, EmbeddingValue, LpEmbedding};
pub use operators::{build_a, build_b, verify_commutator_window, WindowVerdict};
pub use pipeline::{end_to_end, end_to_end_value, Pipeline};
pub use regroup::{regroup_blocks, EpsilonSchedule, Regrouped};
