use super::ModelError;
use crate::preprocess::FeatureVector;

/// Probability floor inside the log of the loss.
const PROB_FLOOR: f64 = 1e-12;

/// `k x d` weight matrix (row-major) plus a bias per class.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    k: usize,
    d: usize,
    w: Vec<f64>,
    b: Vec<f64>,
    manifest_hash: [u8; 32],
}

impl LinearModel {
    pub fn zeros(k: usize, d: usize, manifest_hash: [u8; 32]) -> Self {
        LinearModel {
            k,
            d,
            w: vec![0.0; k * d],
            b: vec![0.0; k],
            manifest_hash,
        }
    }

    pub fn from_parts(
        k: usize,
        d: usize,
        w: Vec<f64>,
        b: Vec<f64>,
        manifest_hash: [u8; 32],
    ) -> Result<Self, ModelError> {
        if w.len() != k * d || b.len() != k {
            return Err(ModelError::Format(format!(
                "expected {} weights and {} biases, got {} and {}",
                k * d,
                k,
                w.len(),
                b.len()
            )));
        }
        if w.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(ModelError::Format("non-finite parameter".into()));
        }
        Ok(LinearModel {
            k,
            d,
            w,
            b,
            manifest_hash,
        })
    }

    pub fn num_classes(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.w
    }

    pub fn bias(&self) -> &[f64] {
        &self.b
    }

    pub fn bias_mut(&mut self) -> &mut [f64] {
        &mut self.b
    }

    pub fn row(&self, class: usize) -> &[f64] {
        &self.w[class * self.d..(class + 1) * self.d]
    }

    pub fn manifest_hash(&self) -> &[u8; 32] {
        &self.manifest_hash
    }

    fn check_dim(&self, x: &FeatureVector) -> Result<(), ModelError> {
        if x.dim() != self.d {
            return Err(ModelError::DimensionMismatch {
                expected: self.d,
                got: x.dim(),
            });
        }
        Ok(())
    }

    pub fn logits(&self, x: &FeatureVector) -> Result<Vec<f64>, ModelError> {
        self.check_dim(x)?;
        Ok((0..self.k).map(|j| x.dot(self.row(j)) + self.b[j]).collect())
    }

    /// `softmax(Wx + b)`.
    pub fn predict_proba(&self, x: &FeatureVector) -> Result<Vec<f64>, ModelError> {
        Ok(softmax(&self.logits(x)?))
    }

    /// Argmax of [`predict_proba`](Self::predict_proba); ties go to the lowest index.
    pub fn predict(&self, x: &FeatureVector) -> Result<usize, ModelError> {
        Ok(argmax_lowest(&self.predict_proba(x)?))
    }
}

pub(crate) fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

pub fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// `-w[y] * ln(max(probs[y], 1e-12))`.
pub fn weighted_ce_loss(probs: &[f64], y: usize, weights: &[f64]) -> Result<f64, ModelError> {
    if y >= probs.len() {
        return Err(ModelError::LabelOutOfRange {
            label: y,
            k: probs.len(),
        });
    }
    if weights.len() != probs.len() {
        return Err(ModelError::WeightCount {
            got: weights.len(),
            k: probs.len(),
        });
    }
    Ok(-weights[y] * probs[y].max(PROB_FLOOR).ln())
}

/// Per-sample objective: weighted cross-entropy plus `l2/2 * ||W||^2`.
/// The bias is not regularized.
pub fn objective(
    model: &LinearModel,
    x: &FeatureVector,
    y: usize,
    weights: &[f64],
    l2: f64,
) -> Result<f64, ModelError> {
    let p = model.predict_proba(x)?;
    let ce = weighted_ce_loss(&p, y, weights)?;
    let sq: f64 = model.w.iter().map(|v| v * v).sum();
    Ok(ce + 0.5 * l2 * sq)
}

/// Dense gradient of [`objective`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    /// `k x d`, row-major.
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

/// `w[y] * (p - onehot(y))`, the loss gradient with respect to the logits.
pub(crate) fn logit_gradient(probs: &[f64], y: usize, class_weight: f64) -> Vec<f64> {
    probs
        .iter()
        .enumerate()
        .map(|(j, &p)| class_weight * (p - if j == y { 1.0 } else { 0.0 }))
        .collect()
}

/// Analytic gradient of [`objective`] for one sample.
pub fn loss_gradient(
    model: &LinearModel,
    x: &FeatureVector,
    y: usize,
    weights: &[f64],
    l2: f64,
) -> Result<Gradient, ModelError> {
    let p = model.predict_proba(x)?;
    // validates y and weights
    weighted_ce_loss(&p, y, weights)?;
    let g = logit_gradient(&p, y, weights[y]);
    let mut w: Vec<f64> = model.w.iter().map(|v| l2 * v).collect();
    for (j, gj) in g.iter().enumerate() {
        let row = &mut w[j * model.d..(j + 1) * model.d];
        for &(c, xc) in x.entries() {
            row[c as usize] += gj * xc;
        }
    }
    Ok(Gradient { w, b: g })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn x(d: usize, pairs: &[(u32, f64)]) -> FeatureVector {
        FeatureVector::from_pairs(d, pairs.iter().copied())
    }

    #[test]
    fn zero_model_is_uniform_and_picks_class_zero() {
        let m = LinearModel::zeros(5, 8, [0; 32]);
        let p = m.predict_proba(&x(8, &[(1, 0.5)])).unwrap();
        for v in &p {
            assert_abs_diff_eq!(*v, 0.2, epsilon = 1e-15);
        }
        assert_eq!(m.predict(&x(8, &[(1, 0.5)])).unwrap(), 0);
    }

    #[test]
    fn log_two_bias() {
        let k = 4;
        let mut m = LinearModel::zeros(k, 4, [0; 32]);
        m.bias_mut()[0] = 2f64.ln();
        let p = m.predict_proba(&FeatureVector::zeros(4)).unwrap();
        assert_abs_diff_eq!(p[0], 2.0 / (k as f64 + 1.0), epsilon = 1e-12);
    }

    #[test]
    fn shift_invariance() {
        let a = softmax(&[0.3, -1.2, 2.0]);
        let b = softmax(&[5.3, 3.8, 7.0]);
        for (u, v) in a.iter().zip(&b) {
            assert_abs_diff_eq!(u, v, epsilon = 1e-12);
        }
        let big = softmax(&[1000.0, 999.0]);
        assert!(big.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn dominant_bias_wins() {
        let mut m = LinearModel::zeros(4, 2, [0; 32]);
        m.bias_mut().copy_from_slice(&[0.1, 0.2, 0.9, 0.0]);
        assert_eq!(m.predict(&FeatureVector::zeros(2)).unwrap(), 2);
    }

    #[test]
    fn loss_examples() {
        let l = weighted_ce_loss(&[0.25; 4], 2, &[0.25; 4]).unwrap();
        assert_abs_diff_eq!(l, 0.25 * 4f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(l, 0.34657, epsilon = 1e-5);
        assert_eq!(weighted_ce_loss(&[0.0, 1.0], 1, &[0.5, 0.5]).unwrap(), 0.0);
        let p = [0.1, 0.6, 0.3];
        let unweighted = weighted_ce_loss(&p, 2, &[1.0; 3]).unwrap();
        let uniform = weighted_ce_loss(&p, 2, &[1.0 / 3.0; 3]).unwrap();
        assert_abs_diff_eq!(uniform, unweighted / 3.0, epsilon = 1e-15);
        // clamped at zero probability
        assert_abs_diff_eq!(weighted_ce_loss(&[1.0, 0.0], 1, &[1.0, 1.0]).unwrap(), -(1e-12f64).ln());
        assert!(matches!(
            weighted_ce_loss(&p, 3, &[1.0; 3]),
            Err(ModelError::LabelOutOfRange { label: 3, k: 3 })
        ));
    }

    #[test]
    fn gradient_vanishes_at_one_hot() {
        let g = logit_gradient(&[0.0, 1.0, 0.0], 1, 0.7);
        assert_eq!(g, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn gradient_linear_in_class_weight() {
        let mut m = LinearModel::zeros(3, 6, [0; 32]);
        m.weights_mut()[4] = 0.3;
        m.bias_mut()[2] = -0.2;
        let xv = x(6, &[(1, 0.6), (4, 0.8)]);
        let g1 = loss_gradient(&m, &xv, 1, &[0.2, 0.3, 0.5], 0.0).unwrap();
        let g2 = loss_gradient(&m, &xv, 1, &[0.2, 0.6, 0.5], 0.0).unwrap();
        for (a, b) in g1.w.iter().chain(&g1.b).zip(g2.w.iter().chain(&g2.b)) {
            assert_abs_diff_eq!(2.0 * a, *b, epsilon = 1e-15);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let m = LinearModel::zeros(2, 8, [0; 32]);
        assert!(matches!(
            m.predict_proba(&FeatureVector::zeros(16)),
            Err(ModelError::DimensionMismatch { expected: 8, got: 16 })
        ));
    }
}
