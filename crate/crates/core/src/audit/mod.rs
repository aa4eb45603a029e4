//! Sampling, report assembly, rendering and cross-dataset comparison.

mod compare;
mod config;
mod engine;
mod render;
mod report;
pub mod sampling;

pub use compare::{compare_reports, Comparison};
pub use config::AuditConfig;
pub use engine::{run_audit, AnnotationBundle, AuditRun, EmbeddingSource};
pub use render::{plot_csvs, render_markdown};
pub use report::{
    to_canonical_json, AnnotationCoverage, AuditReport, ConfigEcho, KernelEcho, Metric, SectionA1, SectionA2,
    SectionA3, SCHEMA_VERSION,
};
pub use sampling::{draw_sample, draw_sample_for, pairwise_mean_by, MetricValue, SamplingPlan, GENERATOR_ID};
