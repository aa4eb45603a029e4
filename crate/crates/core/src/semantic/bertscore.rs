use crate::error::{Error, Result};

/// Token vectors scaled to unit length, ready for cosine matching.
#[derive(Debug, Clone)]
pub struct TokenVectors {
    dims: usize,
    unit: Vec<f64>,
}

impl TokenVectors {
    /// `values` is row-major, one row per token.
    pub fn new(values: &[f32], dims: usize) -> Result<Self> {
        if dims == 0 || values.is_empty() || values.len() % dims != 0 {
            return Err(Error::invalid("token matrix must be non-empty with whole rows"));
        }
        let mut unit = Vec::with_capacity(values.len());
        for (i, row) in values.chunks_exact(dims).enumerate() {
            let norm = row.iter().map(|&v| v as f64 * v as f64).sum::<f64>().sqrt();
            if !(norm > 0.0) || !norm.is_finite() {
                return Err(Error::invalid(format!("zero-norm token vector at token {i}")));
            }
            unit.extend(row.iter().map(|&v| v as f64 / norm));
        }
        Ok(TokenVectors { dims, unit })
    }

    pub fn len(&self) -> usize {
        self.unit.len() / self.dims
    }

    pub fn is_empty(&self) -> bool {
        self.unit.is_empty()
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.unit[i * self.dims..(i + 1) * self.dims]
    }
}

/// Greedy max-cosine F1 with no idf weighting and no baseline rescaling.
pub fn bertscore_prepared(a: &TokenVectors, b: &TokenVectors) -> Result<f64> {
    if a.dims != b.dims {
        return Err(Error::invalid(format!("token dims differ: {} vs {}", a.dims, b.dims)));
    }
    let (na, nb) = (a.len(), b.len());
    let mut best_a = vec![f64::NEG_INFINITY; na];
    let mut best_b = vec![f64::NEG_INFINITY; nb];
    for i in 0..na {
        let ra = a.row(i);
        for j in 0..nb {
            let s: f64 = ra.iter().zip(b.row(j)).map(|(x, y)| x * y).sum();
            best_a[i] = best_a[i].max(s);
            best_b[j] = best_b[j].max(s);
        }
    }
    let recall = best_a.iter().sum::<f64>() / na as f64;
    let precision = best_b.iter().sum::<f64>() / nb as f64;
    if precision + recall == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * precision * recall / (precision + recall))
}

pub fn bertscore_f1(a: &[f32], b: &[f32], dims: usize) -> Result<f64> {
    let a = TokenVectors::new(a, dims).map_err(|e| Error::invalid(format!("A: {e}")))?;
    let b = TokenVectors::new(b, dims).map_err(|e| Error::invalid(format!("B: {e}")))?;
    bertscore_prepared(&a, &b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_and_orthogonal() {
        let a = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        assert!((bertscore_f1(&a, &a, 3).unwrap() - 1.0).abs() < 1e-15);
        let b = [0.0, 0.0, 1.0];
        assert_eq!(bertscore_f1(&a, &b, 3).unwrap(), 0.0);
    }

    #[test]
    fn half_overlap() {
        // A = {e1, e2}, B = {e1, e3}
        let a = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        let b = [1.0, 0.0, 0.0, 0.0, 0.0, 1.0];
        assert_eq!(bertscore_f1(&a, &b, 3).unwrap(), 0.5);
    }

    #[test]
    fn zero_norm_names_token() {
        let a = [1.0, 0.0, 0.0, 0.0];
        let err = bertscore_f1(&[1.0, 1.0], &a, 2).unwrap_err().to_string();
        assert!(err.contains("B:") && err.contains("token 1"), "{err}");
    }

    #[test]
    fn dims_mismatch() {
        let a = TokenVectors::new(&[1.0, 0.0], 2).unwrap();
        let b = TokenVectors::new(&[1.0, 0.0, 0.0], 3).unwrap();
        assert!(bertscore_prepared(&a, &b).is_err());
    }

    fn tokens() -> impl Strategy<Value = Vec<f32>> {
        (1usize..5).prop_flat_map(|n| proptest::collection::vec(0.05f32..1.0, n * 4))
    }

    proptest! {
        #[test]
        fn symmetric_and_scale_invariant(a in tokens(), b in tokens(), c in 0.1f32..10.0) {
            let ab = bertscore_f1(&a, &b, 4).unwrap();
            let ba = bertscore_f1(&b, &a, 4).unwrap();
            prop_assert!((ab - ba).abs() < 1e-12);
            let scaled: Vec<f32> = a.iter().map(|v| v * c).collect();
            prop_assert!((bertscore_f1(&scaled, &b, 4).unwrap() - ab).abs() < 1e-6);
            prop_assert!((-1.0..=1.0 + 1e-12).contains(&ab));
        }
    }
}
