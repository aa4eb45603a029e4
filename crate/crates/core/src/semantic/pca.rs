use log::debug;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::{EmbeddingMatrix, EmbeddingRows};

/// Cumulative explained-variance target.
pub const VARIANCE_THRESHOLD: f64 = 0.95;

/// Rows per covariance block. Block boundaries depend only on row order, so
/// the merged result does not depend on how many blocks run at once.
pub const BLOCK_ROWS: usize = 1024;

/// Upper bound on memory held by in-flight partial covariance matrices.
const PARTIAL_BUDGET_BYTES: usize = 256 << 20;

struct BlockStats {
    n: f64,
    mean: DVector<f64>,
    m2: DMatrix<f64>,
}

impl BlockStats {
    fn from_rows(rows: &[f64], dims: usize) -> Self {
        let r = rows.len() / dims;
        // column j of `ct` is row j of the block
        let mut ct = DMatrix::from_column_slice(dims, r, rows);
        let mean = ct.column_mean();
        for mut col in ct.column_iter_mut() {
            col -= &mean;
        }
        let m2 = &ct * ct.transpose();
        BlockStats { n: r as f64, mean, m2 }
    }
}

/// Single-pass sample covariance in 64-bit floats.
///
/// Rows are shifted by the first row seen before accumulation, which keeps
/// the per-block sums small when embeddings share a large common offset.
/// Blocks of [`BLOCK_ROWS`] rows are centred and multiplied independently,
/// then merged in row order with the pairwise update of Chan et al.
pub struct CovarianceAccumulator {
    dims: usize,
    shift: Option<Vec<f64>>,
    pending: Vec<f64>,
    n: f64,
    mean: DVector<f64>,
    m2: DMatrix<f64>,
    batch_blocks: usize,
}

impl CovarianceAccumulator {
    pub fn new(dims: usize) -> Result<Self> {
        if dims == 0 {
            return Err(Error::invalid("covariance needs at least one dimension"));
        }
        let partial = dims * dims * 8;
        let by_memory = (PARTIAL_BUDGET_BYTES / partial).max(1);
        let batch_blocks = rayon::current_num_threads().clamp(1, by_memory);
        Ok(CovarianceAccumulator {
            dims,
            shift: None,
            pending: Vec::new(),
            n: 0.0,
            mean: DVector::zeros(dims),
            m2: DMatrix::zeros(dims, dims),
            batch_blocks,
        })
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    /// Rows pushed so far.
    pub fn rows(&self) -> usize {
        self.n as usize + self.pending.len() / self.dims
    }

    pub fn push_row(&mut self, row: &[f32]) -> Result<()> {
        if row.len() != self.dims {
            return Err(Error::invalid(format!("row has {} values, expected {}", row.len(), self.dims)));
        }
        let shift = self.shift.get_or_insert_with(|| row.iter().map(|&v| v as f64).collect());
        self.pending.extend(row.iter().zip(shift.iter()).map(|(&v, s)| v as f64 - s));
        if self.pending.len() >= self.batch_blocks * BLOCK_ROWS * self.dims {
            self.flush(false);
        }
        Ok(())
    }

    /// Pushes a row-major block of rows.
    pub fn push_rows(&mut self, values: &[f32]) -> Result<()> {
        if values.len() % self.dims != 0 {
            return Err(Error::invalid("block length is not a multiple of dims"));
        }
        for row in values.chunks_exact(self.dims) {
            self.push_row(row)?;
        }
        Ok(())
    }

    fn flush(&mut self, all: bool) {
        let block_len = BLOCK_ROWS * self.dims;
        let full = self.pending.len() / block_len * block_len;
        let take = if all { self.pending.len() } else { full };
        if take == 0 {
            return;
        }
        let dims = self.dims;
        let blocks: Vec<BlockStats> = self.pending[..take]
            .par_chunks(block_len)
            .map(|rows| BlockStats::from_rows(rows, dims))
            .collect();
        for b in blocks {
            self.merge(b);
        }
        self.pending.drain(..take);
    }

    fn merge(&mut self, b: BlockStats) {
        if self.n == 0.0 {
            self.n = b.n;
            self.mean = b.mean;
            self.m2 = b.m2;
            return;
        }
        let n = self.n + b.n;
        let delta = &b.mean - &self.mean;
        self.m2 += b.m2;
        self.m2.ger(self.n * b.n / n, &delta, &delta, 1.0);
        self.mean.axpy(b.n / n, &delta, 1.0);
        self.n = n;
    }

    pub fn finish(mut self) -> Result<Covariance> {
        self.flush(true);
        let n = self.n as usize;
        if n < 2 {
            return Err(Error::invalid(format!("covariance needs at least two rows, got {n}")));
        }
        let matrix = self.m2 / (self.n - 1.0);
        Ok(Covariance { n_rows: n, matrix })
    }
}

/// Sample covariance (divisor n-1).
#[derive(Debug, Clone)]
pub struct Covariance {
    pub n_rows: usize,
    pub matrix: DMatrix<f64>,
}

impl Covariance {
    /// Eigenvalues in descending order, negatives from rounding clamped to 0.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let eig = SymmetricEigen::new(self.matrix.clone());
        let mut values: Vec<f64> = eig.eigenvalues.iter().map(|&v| v.max(0.0)).collect();
        values.sort_by(|a, b| b.total_cmp(a));
        values
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PcaResult {
    pub components: usize,
    pub rows_used: usize,
    pub dims: usize,
    /// Cumulative explained-variance ratio at `components`.
    pub explained: f64,
}

/// Smallest k whose leading eigenvalues reach `threshold` of the total,
/// clamped to `[1, min(n_rows - 1, dims)]`.
pub fn components_for_ratio(eigenvalues: &[f64], n_rows: usize, threshold: f64) -> Result<(usize, f64)> {
    let mut values: Vec<f64> = eigenvalues.iter().map(|&v| v.max(0.0)).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    let total: f64 = values.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::DegenerateEmbedding);
    }
    let max_k = (n_rows.saturating_sub(1)).min(values.len()).max(1);
    let mut cum = 0.0;
    let mut k = values.len();
    for (i, v) in values.iter().enumerate() {
        cum += v;
        if cum / total >= threshold {
            k = i + 1;
            break;
        }
    }
    let k = k.clamp(1, max_k);
    let explained = values[..k].iter().sum::<f64>() / total;
    Ok((k, explained))
}

fn finish_pca(acc: CovarianceAccumulator) -> Result<PcaResult> {
    let dims = acc.dims();
    let cov = acc.finish()?;
    let (components, explained) = components_for_ratio(&cov.eigenvalues(), cov.n_rows, VARIANCE_THRESHOLD)?;
    debug!("pca: {} rows, {dims} dims -> {components} components", cov.n_rows);
    Ok(PcaResult {
        components,
        rows_used: cov.n_rows,
        dims,
        explained,
    })
}

/// PCA over the selected rows of an in-memory matrix (all rows when `rows` is `None`).
pub fn pca(emb: &EmbeddingMatrix, rows: Option<&[usize]>) -> Result<PcaResult> {
    let mut acc = CovarianceAccumulator::new(emb.dims())?;
    match rows {
        Some(idx) => {
            for &i in idx {
                acc.push_row(emb.row(i))?;
            }
        }
        None => acc.push_rows(emb.values())?,
    }
    finish_pca(acc)
}

pub fn pca_components_95(emb: &EmbeddingMatrix) -> Result<usize> {
    pca(emb, None).map(|r| r.components)
}

/// PCA over an ICEM file read in blocks, keeping rows whose id passes `keep`.
pub fn pca_streaming<F: FnMut(usize, &str) -> bool>(reader: &mut EmbeddingRows, mut keep: F) -> Result<PcaResult> {
    let dims = reader.dims();
    let ids: Vec<String> = reader.row_ids().to_vec();
    let mut acc = CovarianceAccumulator::new(dims)?;
    let mut buf = Vec::new();
    while let Some((first, n)) = reader.next_block(&mut buf, 8 * BLOCK_ROWS)? {
        for (i, row) in buf.chunks_exact(dims).take(n).enumerate() {
            if keep(first + i, &ids[first + i]) {
                acc.push_row(row)?;
            }
        }
    }
    finish_pca(acc)
}
