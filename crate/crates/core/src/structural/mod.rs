//! POS templates, constituency-tree similarity, and structure flags.

mod detect;
mod kernel;
mod patterns;
mod report;

pub use detect::{detect_structures, StructureLabel};
pub use kernel::{prepared_kernel, tree_kernel, tree_kernel_raw, PreparedTree, ProductionTable, DEFAULT_LAMBDA};
pub use patterns::{pos_pattern_frequencies, summarize_patterns, PatternFrequency, PatternSummary, PosPattern, TAIL_THRESHOLD};
pub use report::{binomial_se, structure_labels, structure_report, FlagStats, GoldSummary, StructureReport};
