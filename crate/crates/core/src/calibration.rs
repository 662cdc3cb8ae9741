//! Platt scaling: `p = 1 / (1 + exp(A s + B))` fitted by damped Newton on
//! the logistic loss with smoothed targets.

use serde::{Deserialize, Serialize};

use crate::forest::sigmoid;
use crate::{Error, Result};

pub const MAX_ITERATIONS: usize = 200;
pub const GRADIENT_TOLERANCE: f64 = 1e-10;
const MIN_STEP: f64 = 1e-10;
const HESSIAN_RIDGE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlattModel {
    pub a: f64,
    pub b: f64,
}

impl PlattModel {
    /// True when higher raw scores map to higher probabilities.
    pub fn is_increasing(&self) -> bool {
        self.a < 0.0
    }

    pub fn apply_one(&self, score: f64) -> f64 {
        sigmoid(-(self.a * score + self.b))
    }

    pub fn apply(&self, scores: &[f64]) -> Vec<f64> {
        scores.iter().map(|&s| self.apply_one(s)).collect()
    }
}

/// Loss of `(a, b)` with targets `t`: sum of `t f + log(1 + exp(-f))`
/// rewritten stably, where `f = a s + b`.
fn objective(a: f64, b: f64, scores: &[f64], targets: &[f64]) -> f64 {
    scores
        .iter()
        .zip(targets)
        .map(|(&s, &t)| {
            let f = a * s + b;
            if f >= 0.0 {
                t * f + (-f).exp().ln_1p()
            } else {
                (t - 1.0) * f + f.exp().ln_1p()
            }
        })
        .sum()
}

pub fn fit_platt(scores: &[f64], labels: &[bool]) -> Result<PlattModel> {
    if scores.len() != labels.len() {
        return Err(Error::Calibration(format!("{} scores but {} labels", scores.len(), labels.len())));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::Calibration("scores must be finite".into()));
    }
    let n_pos = labels.iter().filter(|&&y| y).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::Calibration("calibration data needs both classes".into()));
    }
    let hi = (n_pos as f64 + 1.0) / (n_pos as f64 + 2.0);
    let lo = 1.0 / (n_neg as f64 + 2.0);
    let targets: Vec<f64> = labels.iter().map(|&y| if y { hi } else { lo }).collect();

    let mut a = 0.0;
    let mut b = ((n_neg as f64 + 1.0) / (n_pos as f64 + 1.0)).ln();
    let mut fval = objective(a, b, scores, &targets);

    for _ in 0..MAX_ITERATIONS {
        let (mut h11, mut h22, mut h21, mut g1, mut g2) = (HESSIAN_RIDGE, HESSIAN_RIDGE, 0.0, 0.0, 0.0);
        for (&s, &t) in scores.iter().zip(&targets) {
            let p = sigmoid(-(a * s + b));
            let d2 = p * (1.0 - p);
            h11 += s * s * d2;
            h22 += d2;
            h21 += s * d2;
            let d1 = t - p;
            g1 += s * d1;
            g2 += d1;
        }
        if g1.abs() < GRADIENT_TOLERANCE && g2.abs() < GRADIENT_TOLERANCE {
            break;
        }
        let det = h11 * h22 - h21 * h21;
        let da = -(h22 * g1 - h21 * g2) / det;
        let db = -(-h21 * g1 + h11 * g2) / det;
        let descent = g1 * da + g2 * db;

        let mut step = 1.0;
        let mut accepted = false;
        while step >= MIN_STEP {
            let (na, nb) = (a + step * da, b + step * db);
            let nf = objective(na, nb, scores, &targets);
            if nf < fval + 1e-4 * step * descent {
                a = na;
                b = nb;
                fval = nf;
                accepted = true;
                break;
            }
            step /= 2.0;
        }
        if !accepted {
            break;
        }
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Calibration("Newton iterations diverged".into()));
    }
    Ok(PlattModel { a, b })
}

pub fn apply_platt(model: &PlattModel, scores: &[f64]) -> Vec<f64> {
    model.apply(scores)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_at_zero() {
        let m = PlattModel { a: -1.0, b: 0.0 };
        assert_eq!(m.apply_one(0.0), 0.5);
    }

    #[test]
    fn inverted_labels_give_decreasing_map() {
        let scores: Vec<f64> = (0..50).map(|i| i as f64 / 49.0).collect();
        let labels: Vec<bool> = scores.iter().map(|&s| s < 0.5).collect();
        let m = fit_platt(&scores, &labels).unwrap();
        assert!(m.a > 0.0);
        assert!(!m.is_increasing());
    }

    #[test]
    fn two_point_dataset_orders_correctly() {
        let m = fit_platt(&[0.2, 0.8], &[false, true]).unwrap();
        assert!(m.apply_one(0.8) > m.apply_one(0.2));
        // grid oracle over (a, b) agrees on the sign of a
        let targets = [1.0 / 3.0, 2.0 / 3.0];
        let mut best = (f64::INFINITY, 0.0);
        for i in -200..=200 {
            for j in -100..=100 {
                let (a, b) = (i as f64 * 0.05, j as f64 * 0.05);
                let f = objective(a, b, &[0.2, 0.8], &targets);
                if f < best.0 {
                    best = (f, a);
                }
            }
        }
        assert!(best.1 < 0.0);
        assert!(m.a < 0.0);
    }

    #[test]
    fn single_class_is_rejected() {
        assert!(fit_platt(&[0.1, 0.2], &[true, true]).is_err());
    }

    #[test]
    fn fitting_is_deterministic() {
        let scores = [0.1, 0.3, 0.35, 0.6, 0.9, 0.95];
        let labels = [false, false, true, false, true, true];
        assert_eq!(fit_platt(&scores, &labels).unwrap(), fit_platt(&scores, &labels).unwrap());
    }
}
