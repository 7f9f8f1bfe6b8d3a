//! Reference computations that share no code with the implementation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spanclf::model::{loss_gradient, objective, LinearModel};
use spanclf::preprocess::FeatureVector;

fn is_delim(c: char, subsentence: bool) -> bool {
    c == '.' || c == '?' || c == '!' || c == '\n' || (subsentence && c == ',')
}

/// Window by exhaustive search: the latest prefix boundary at or before
/// `start` and the earliest suffix boundary at or after `end`, where a
/// boundary is a text edge or a position right after a delimiter.
pub fn expand_oracle(text: &[char], start: usize, end: usize, subsentence: bool) -> (usize, usize) {
    let opens = |p: usize| p == 0 || is_delim(text[p - 1], subsentence);
    let closes = |q: usize| q == text.len() || is_delim(text[q - 1], subsentence);
    let new_start = (0..=start).filter(|&p| opens(p)).max().unwrap();
    let new_end = (end..=text.len()).filter(|&q| closes(q)).min().unwrap();
    (new_start, new_end)
}

/// Median by repeatedly discarding the current minimum and maximum.
fn peel_median(values: &[usize]) -> f64 {
    let mut v = values.to_vec();
    while v.len() > 2 {
        let (imin, _) = v.iter().enumerate().min_by_key(|(_, x)| **x).unwrap();
        v.remove(imin);
        let (imax, _) = v.iter().enumerate().max_by_key(|(_, x)| **x).unwrap();
        v.remove(imax);
    }
    v.iter().sum::<usize>() as f64 / v.len() as f64
}

/// (min, q1, median, q3, max) with quartiles as medians of the lower and
/// upper halves (middle element excluded for odd counts).
pub fn five_numbers_oracle(values: &[usize]) -> (f64, f64, f64, f64, f64) {
    let mut sorted = values.to_vec();
    sorted.sort();
    let n = sorted.len();
    let (lower, upper) = if n == 1 {
        (sorted.clone(), sorted.clone())
    } else {
        (sorted[..n / 2].to_vec(), sorted[n.div_ceil(2)..].to_vec())
    };
    (
        sorted[0] as f64,
        peel_median(&lower),
        peel_median(&sorted),
        peel_median(&upper),
        sorted[n - 1] as f64,
    )
}

/// Per-class (precision, recall, f1) and micro-F1 by walking the samples.
pub fn f1_oracle(golds: &[usize], preds: &[usize], k: usize) -> (Vec<(f64, f64, f64)>, f64) {
    let safe = |a: f64, b: f64| if b == 0.0 { 0.0 } else { a / b };
    let mut per = Vec::new();
    let (mut tps, mut fps, mut fns) = (0.0, 0.0, 0.0);
    for c in 0..k {
        let (mut tp, mut fp, mut fneg) = (0.0, 0.0, 0.0);
        for (&g, &p) in golds.iter().zip(preds) {
            if g == c && p == c {
                tp += 1.0;
            } else if p == c {
                fp += 1.0;
            } else if g == c {
                fneg += 1.0;
            }
        }
        tps += tp;
        fps += fp;
        fns += fneg;
        let p = safe(tp, tp + fp);
        let r = safe(tp, tp + fneg);
        per.push((p, r, safe(2.0 * p * r, p + r)));
    }
    let p = safe(tps, tps + fps);
    let r = safe(tps, tps + fns);
    (per, safe(2.0 * p * r, p + r))
}

pub struct GradCase {
    pub model: LinearModel,
    pub x: FeatureVector,
    pub y: usize,
    pub weights: Vec<f64>,
    pub l2: f64,
}

pub fn random_grad_case(seed: u64) -> GradCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(2..=5);
    let d = rng.gen_range(1..=20);
    let w: Vec<f64> = (0..k * d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let b: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let model = LinearModel::from_parts(k, d, w, b, [0; 32]).unwrap();
    let nnz = rng.gen_range(1..=d);
    let x = FeatureVector::from_pairs(d, (0..nnz).map(|_| (rng.gen_range(0..d) as u32, rng.gen_range(0.0..1.0))));
    let weights: Vec<f64> = (0..k).map(|_| rng.gen_range(0.01..1.0)).collect();
    GradCase {
        model,
        x,
        y: rng.gen_range(0..k),
        weights,
        l2: if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(0.0..0.1) },
    }
}

/// Largest relative error between the analytic gradient and central
/// differences with step `h`. Components where both values are below
/// 1e-8 in magnitude are compared absolutely.
pub fn max_grad_rel_error(case: &GradCase, h: f64) -> f64 {
    let analytic = loss_gradient(&case.model, &case.x, case.y, &case.weights, case.l2).unwrap();
    let f = |m: &LinearModel| objective(m, &case.x, case.y, &case.weights, case.l2).unwrap();
    let rel = |a: f64, n: f64| {
        let scale = a.abs().max(n.abs());
        if scale < 1e-8 {
            (a - n).abs()
        } else {
            (a - n).abs() / scale
        }
    };
    let mut worst: f64 = 0.0;
    for i in 0..case.model.weights().len() {
        let mut plus = case.model.clone();
        plus.weights_mut()[i] += h;
        let mut minus = case.model.clone();
        minus.weights_mut()[i] -= h;
        let numeric = (f(&plus) - f(&minus)) / (2.0 * h);
        worst = worst.max(rel(analytic.w[i], numeric));
    }
    for j in 0..case.model.bias().len() {
        let mut plus = case.model.clone();
        plus.bias_mut()[j] += h;
        let mut minus = case.model.clone();
        minus.bias_mut()[j] -= h;
        let numeric = (f(&plus) - f(&minus)) / (2.0 * h);
        worst = worst.max(rel(analytic.b[j], numeric));
    }
    worst
}
