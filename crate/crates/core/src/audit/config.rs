use std::collections::BTreeMap;

use super::sampling::SamplingPlan;
use crate::error::{Error, Result};
use crate::lexicons::{Lexicons, NAMES};
use crate::structural::DEFAULT_LAMBDA;
use crate::text::Cleaner;

/// Resolved audit settings. Every field is echoed into the report.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditConfig {
    pub cleaner: Cleaner,
    pub plan: SamplingPlan,
    pub tree_kernel_lambda: f64,
    pub pairwise_on_unique: bool,
    pub pca_on_all: bool,
    pub lexicons: Lexicons,
    /// Lexicon name -> "builtin" or the file it was loaded from.
    pub lexicon_sources: BTreeMap<String, String>,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            cleaner: Cleaner::Default,
            plan: SamplingPlan::default(),
            tree_kernel_lambda: DEFAULT_LAMBDA,
            pairwise_on_unique: false,
            pca_on_all: false,
            lexicons: Lexicons::default(),
            lexicon_sources: NAMES.iter().map(|n| (n.to_string(), "builtin".to_string())).collect(),
        }
    }
}

impl AuditConfig {
    pub fn validate(&self) -> Result<()> {
        self.plan.validate()?;
        if !(self.tree_kernel_lambda > 0.0 && self.tree_kernel_lambda <= 1.0) {
            return Err(Error::invalid(format!(
                "tree_kernel.lambda must be in (0, 1], got {}",
                self.tree_kernel_lambda
            )));
        }
        Ok(())
    }
}
