use std::collections::BTreeMap;

use xxhash_rust::xxh3::xxh3_64_with_seed;

use super::PreprocessError;

/// 2^18 buckets.
pub const DEFAULT_FEATURE_DIM: usize = 1 << 18;

/// Seed for the XXH3-64 token hash. Changing it invalidates saved models.
pub const HASH_SEED: u64 = 0x5350_414e_434c_4631;

/// Lowercased maximal runs of alphanumeric characters.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Sparse hashed bag-of-words vector; entries sorted by index.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    dim: usize,
    entries: Vec<(u32, f64)>,
}

impl FeatureVector {
    pub fn zeros(dim: usize) -> Self {
        FeatureVector {
            dim,
            entries: Vec::new(),
        }
    }

    /// Build from raw (index, value) pairs. Indices must be in range; they are
    /// sorted and duplicates summed.
    pub fn from_pairs(dim: usize, pairs: impl IntoIterator<Item = (u32, f64)>) -> Self {
        let mut acc: BTreeMap<u32, f64> = BTreeMap::new();
        for (i, v) in pairs {
            assert!((i as usize) < dim, "feature index {i} out of range for dimension {dim}");
            *acc.entry(i).or_insert(0.0) += v;
        }
        FeatureVector {
            dim,
            entries: acc.into_iter().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v * v).sum::<f64>().sqrt()
    }

    /// Dot product with a dense row of length `dim`.
    pub fn dot(&self, row: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, v)| v * row[i as usize]).sum()
    }
}

/// Hash `words` into `dim` buckets (XXH3-64 with [`HASH_SEED`], low bits),
/// count, and L2-normalize.
pub fn featurize<S: AsRef<str>>(words: &[S], dim: usize) -> Result<FeatureVector, PreprocessError> {
    if !dim.is_power_of_two() || dim > u32::MAX as usize + 1 {
        return Err(PreprocessError::DimNotPowerOfTwo(dim));
    }
    let mask = (dim - 1) as u64;
    let mut v = FeatureVector::from_pairs(
        dim,
        words
            .iter()
            .map(|w| ((xxh3_64_with_seed(w.as_ref().as_bytes(), HASH_SEED) & mask) as u32, 1.0)),
    );
    let norm = v.norm();
    if norm > 0.0 {
        for e in &mut v.entries {
            e.1 /= norm;
        }
    }
    Ok(v)
}
