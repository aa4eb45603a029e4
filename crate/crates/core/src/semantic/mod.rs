//! Embedding geometry, token-level similarity, and verb/object/modifier profiles.

mod bertscore;
mod pca;
mod profiles;
mod verbs;

pub use bertscore::{bertscore_f1, bertscore_prepared, TokenVectors};
pub use pca::{
    components_for_ratio, pca, pca_components_95, pca_streaming, Covariance, CovarianceAccumulator, PcaResult,
    BLOCK_ROWS, VARIANCE_THRESHOLD,
};
pub use profiles::{adverbial_profile, classify_modifier, numeric_profile, AdverbialClass, AdverbialEntry, AdverbialProfile, NumericProfile};
pub use verbs::{
    unique_verbs_per_object, verb_object_matrix, verb_object_pairs, verbs_per_object_histogram, VerbObjectMatrix,
};
