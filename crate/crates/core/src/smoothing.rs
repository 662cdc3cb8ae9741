//! Causal single exponential smoothing of score series:
//! `s_1 = y_1`, `s_t = (1 - alpha) y_t + alpha s_{t-1}`.

use serde::{Deserialize, Serialize};

use crate::metrics::ScoreSeries;
use crate::{Error, Result};

/// Smoothing grid swept by default.
pub const DEFAULT_ALPHA_GRID: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 0.9];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingParams {
    pub alpha: f64,
}

impl SmoothingParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Param(format!("alpha must lie in [0, 1], got {alpha}")));
        }
        Ok(SmoothingParams { alpha })
    }
}

pub fn smooth_scores(scores: &[f64], alpha: f64) -> Result<Vec<f64>> {
    let params = SmoothingParams::new(alpha)?;
    let mut out = Vec::with_capacity(scores.len());
    let mut previous: Option<f64> = None;
    for &y in scores {
        let s = match previous {
            None => y,
            Some(p) => (1.0 - params.alpha) * y + params.alpha * p,
        };
        out.push(s);
        previous = Some(s);
    }
    Ok(out)
}

pub fn smooth(series: &ScoreSeries, params: SmoothingParams) -> Result<ScoreSeries> {
    if series.scores.is_empty() {
        return Err(Error::Param(format!("series of case `{}` is empty", series.case_id)));
    }
    Ok(ScoreSeries {
        case_id: series.case_id.clone(),
        outcome: series.outcome,
        scores: smooth_scores(&series.scores, params.alpha)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_zero_is_identity() {
        let y = [0.1, 0.7, 0.3];
        assert_eq!(smooth_scores(&y, 0.0).unwrap(), y);
    }

    #[test]
    fn alpha_one_is_constant() {
        assert_eq!(smooth_scores(&[0.4, 0.9, 0.1], 1.0).unwrap(), vec![0.4; 3]);
    }

    #[test]
    fn lagged_response_to_a_jump() {
        let s = smooth_scores(&[0.5, 0.5, 0.5, 0.5, 0.5, 0.9, 0.9], 0.8).unwrap();
        let expected = [0.5, 0.5, 0.5, 0.5, 0.5, 0.58, 0.644];
        for (a, b) in s.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{s:?}");
        }
    }

    #[test]
    fn alpha_out_of_range() {
        assert!(smooth_scores(&[0.1], 1.5).is_err());
        assert!(smooth_scores(&[0.1], -0.1).is_err());
    }
}
