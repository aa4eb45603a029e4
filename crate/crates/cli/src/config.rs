use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use lingaudit::audit::AuditConfig;
use lingaudit::lexicons::NAMES;
use lingaudit::Cleaner;

use crate::AuditArgs;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeKernelFile {
    pub lambda: Option<f64>,
}

/// Keys accepted in the TOML file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub cleaner: Option<String>,
    pub sample_size: Option<usize>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub pairwise_on_unique: Option<bool>,
    pub pca_on_all: Option<bool>,
    pub require: Option<Vec<String>>,
    pub tree_kernel: Option<TreeKernelFile>,
    /// Lexicon name -> word list path, relative to the config file.
    pub lexicons: Option<BTreeMap<String, PathBuf>>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

pub const REQUIRE_KINDS: &[&str] = &["a1", "a2", "a3", "conllu", "trees", "embeddings", "token_embeddings", "gold"];

/// Annotation kinds implied by a `require` entry.
pub fn required_kinds(entries: &[String]) -> Result<Vec<&'static str>> {
    let mut out = Vec::new();
    for e in entries {
        let e = e.trim();
        let kinds: &[&'static str] = match e {
            "a1" => &[],
            "a2" => &["conllu", "embeddings", "token_embeddings"],
            "a3" => &["conllu", "trees"],
            _ => match REQUIRE_KINDS.iter().find(|k| **k == e) {
                Some(k) => std::slice::from_ref(k),
                None => bail!("unknown require entry {e:?} (expected one of {})", REQUIRE_KINDS.join(", ")),
            },
        };
        for k in kinds {
            if !out.contains(k) {
                out.push(*k);
            }
        }
    }
    Ok(out)
}

pub struct Resolved {
    pub config: AuditConfig,
    pub require: Vec<&'static str>,
}

/// Merges file values and flags; flags win.
pub fn resolve(args: &AuditArgs) -> Result<Resolved> {
    let (file, base) = match &args.config {
        Some(p) => (FileConfig::load(p)?, p.parent().map(Path::to_path_buf).unwrap_or_default()),
        None => (FileConfig::default(), PathBuf::new()),
    };
    let mut cfg = AuditConfig::default();

    if let Some(lex) = &file.lexicons {
        for (name, path) in lex {
            if !NAMES.contains(&name.as_str()) {
                bail!("unknown lexicon {name:?} (expected one of {})", NAMES.join(", "));
            }
            let full = base.join(path);
            cfg.lexicons.replace(name, &full)?;
            cfg.lexicon_sources.insert(name.clone(), path.display().to_string());
        }
    }

    let cleaner_id = args.cleaner.clone().or(file.cleaner).unwrap_or_else(|| "default".to_string());
    cfg.cleaner = Cleaner::from_id(&cleaner_id, Some(cfg.lexicons.fillers.clone()))?;
    cfg.plan.sample_size = args.sample_size.or(file.sample_size).unwrap_or(cfg.plan.sample_size);
    cfg.plan.trials = args.trials.or(file.trials).unwrap_or(cfg.plan.trials);
    cfg.plan.seed = args.seed.or(file.seed).unwrap_or(cfg.plan.seed);
    cfg.tree_kernel_lambda = args
        .lambda
        .or(file.tree_kernel.and_then(|t| t.lambda))
        .unwrap_or(cfg.tree_kernel_lambda);
    cfg.pairwise_on_unique = args.pairwise_on_unique.or(file.pairwise_on_unique).unwrap_or(false);
    cfg.pca_on_all = args.pca_on_all.or(file.pca_on_all).unwrap_or(false);
    cfg.validate()?;

    let require_entries = if args.require.is_empty() {
        file.require.unwrap_or_default()
    } else {
        args.require.clone()
    };
    Ok(Resolved {
        config: cfg,
        require: required_kinds(&require_entries)?,
    })
}
