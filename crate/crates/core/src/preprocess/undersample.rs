use std::collections::BTreeMap;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::PreprocessError;
use crate::corpus::{LabeledSample, Manifest, TechniqueLabel};

/// Per-class keep fractions keyed by canonical class name. Classes not
/// listed keep every sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UndersampleConfig {
    pub keep_fraction: BTreeMap<String, f64>,
    #[serde(default)]
    pub seed: u64,
}

impl Default for UndersampleConfig {
    fn default() -> Self {
        let mut keep_fraction = BTreeMap::new();
        keep_fraction.insert("Loaded Language".to_string(), 0.2);
        keep_fraction.insert("Name Calling,Labeling".to_string(), 0.5);
        UndersampleConfig {
            keep_fraction,
            seed: 0,
        }
    }
}

impl UndersampleConfig {
    /// Validate against `manifest` and produce one fraction per class.
    pub fn resolve(&self, manifest: &Manifest) -> Result<KeepFractions, PreprocessError> {
        let mut fractions = vec![1.0; manifest.len()];
        for (name, &value) in &self.keep_fraction {
            if !(value > 0.0 && value <= 1.0) {
                return Err(PreprocessError::InvalidFraction {
                    class: name.clone(),
                    value,
                });
            }
            let label = manifest
                .resolve(name)
                .ok_or_else(|| PreprocessError::UnknownClass(name.clone()))?;
            fractions[label.index()] = value;
        }
        Ok(KeepFractions(fractions))
    }
}

/// Validated keep fraction for every class index.
#[derive(Debug, Clone, PartialEq)]
pub struct KeepFractions(Vec<f64>);

impl KeepFractions {
    pub fn new(fractions: Vec<f64>) -> Result<Self, PreprocessError> {
        for (i, &value) in fractions.iter().enumerate() {
            if !(value > 0.0 && value <= 1.0) {
                return Err(PreprocessError::InvalidFraction {
                    class: format!("#{i}"),
                    value,
                });
            }
        }
        Ok(KeepFractions(fractions))
    }

    pub fn get(&self, label: TechniqueLabel) -> f64 {
        self.0.get(label.index()).copied().unwrap_or(1.0)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// `max(1, round_half_up(n * f))` for a non-empty class, 0 for an empty one.
pub fn retained_count(n: usize, fraction: f64) -> usize {
    if n == 0 {
        return 0;
    }
    let rounded = (n as f64 * fraction + 0.5).floor() as usize;
    rounded.clamp(1, n)
}

/// Indices (ascending) of the samples that survive undersampling.
///
/// Classes are visited in index order and each class with fraction below 1
/// draws its subset from one ChaCha8 stream seeded with `seed`, so the result
/// depends only on the labels, the fractions and the seed.
pub fn undersample_indices(labels: &[TechniqueLabel], fractions: &KeepFractions, seed: u64) -> Vec<usize> {
    let mut by_class: BTreeMap<TechniqueLabel, Vec<usize>> = BTreeMap::new();
    for (i, &label) in labels.iter().enumerate() {
        by_class.entry(label).or_default().push(i);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keep = Vec::with_capacity(labels.len());
    for (label, members) in &by_class {
        let fraction = fractions.get(*label);
        if fraction >= 1.0 {
            keep.extend_from_slice(members);
            continue;
        }
        let m = retained_count(members.len(), fraction);
        let mut chosen = index::sample(&mut rng, members.len(), m).into_vec();
        chosen.sort_unstable();
        keep.extend(chosen.into_iter().map(|j| members[j]));
    }
    keep.sort_unstable();
    keep
}

/// Undersample `samples`, preserving the relative order of what is kept.
pub fn undersample(samples: &[LabeledSample], fractions: &KeepFractions, seed: u64) -> Vec<LabeledSample> {
    let labels: Vec<TechniqueLabel> = samples.iter().map(LabeledSample::label).collect();
    undersample_indices(&labels, fractions, seed)
        .into_iter()
        .map(|i| samples[i].clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(counts: &[usize]) -> Vec<TechniqueLabel> {
        let mut out = Vec::new();
        // interleave classes so order preservation is actually exercised
        let max = counts.iter().copied().max().unwrap_or(0);
        for i in 0..max {
            for (c, &n) in counts.iter().enumerate() {
                if i < n {
                    out.push(TechniqueLabel::new(c));
                }
            }
        }
        out
    }

    #[test]
    fn retained_count_closed_form() {
        assert_eq!(retained_count(2123, 0.2), 425);
        assert_eq!(retained_count(1058, 0.5), 529);
        assert_eq!(retained_count(3, 0.1), 1);
        assert_eq!(retained_count(0, 0.1), 0);
        assert_eq!(retained_count(5, 1.0), 5);
        assert_eq!(retained_count(3, 0.5), 2);
    }

    #[test]
    fn per_class_counts_and_identity_classes() {
        let labels = labels(&[2123, 1058, 40]);
        let fr = KeepFractions::new(vec![0.2, 0.5, 1.0]).unwrap();
        let keep = undersample_indices(&labels, &fr, 7);
        let count = |c: usize| keep.iter().filter(|&&i| labels[i].index() == c).count();
        assert_eq!(count(0), 425);
        assert_eq!(count(1), 529);
        assert_eq!(count(2), 40);
        assert!(keep.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn seed_changes_subset_not_size() {
        let labels = labels(&[200, 10]);
        let fr = KeepFractions::new(vec![0.3, 1.0]).unwrap();
        let a = undersample_indices(&labels, &fr, 1);
        let b = undersample_indices(&labels, &fr, 1);
        let c = undersample_indices(&labels, &fr, 2);
        assert_eq!(a, b);
        assert_eq!(a.len(), c.len());
        assert_ne!(a, c);
    }

    #[test]
    fn config_validation() {
        let m = Manifest::default_set();
        let cfg = UndersampleConfig::default();
        let fr = cfg.resolve(&m).unwrap();
        assert_eq!(fr.get(TechniqueLabel::new(1)), 0.2);
        assert_eq!(fr.get(TechniqueLabel::new(2)), 0.5);
        assert_eq!(fr.get(TechniqueLabel::new(0)), 1.0);

        let mut bad = UndersampleConfig::default();
        bad.keep_fraction.insert("Doubt".into(), 0.0);
        assert!(matches!(bad.resolve(&m), Err(PreprocessError::InvalidFraction { .. })));
        let mut bad = UndersampleConfig::default();
        bad.keep_fraction.insert("Doubt".into(), 1.5);
        assert!(bad.resolve(&m).is_err());
        let mut bad = UndersampleConfig::default();
        bad.keep_fraction.insert("Nope".into(), 0.5);
        assert_eq!(bad.resolve(&m), Err(PreprocessError::UnknownClass("Nope".into())));
    }
}
