use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{HarpError, Result};

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Sample standard deviation (n - 1 denominator).
pub fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    pub t: f64,
    pub p_value: f64,
    pub df: usize,
}

/// Two-sided paired t-test on `b - a`.
///
/// With zero spread in the differences the test is degenerate: all-zero
/// differences give `t = 0, p = 1`; a constant nonzero difference gives
/// `t = +-inf, p = 0`. Fewer than two pairs give `p = 1`.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTest> {
    if a.len() != b.len() {
        return Err(HarpError::ShapeMismatch {
            expected: format!("{} pairs", a.len()),
            actual: format!("{}", b.len()),
        });
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let n = diffs.len();
    if n < 2 {
        return Ok(TTest {
            t: 0.0,
            p_value: 1.0,
            df: 0,
        });
    }
    let df = n - 1;
    let m = mean(&diffs);
    let s = sample_std(&diffs);
    if s == 0.0 {
        return Ok(if m == 0.0 {
            TTest {
                t: 0.0,
                p_value: 1.0,
                df,
            }
        } else {
            TTest {
                t: m.signum() * f64::INFINITY,
                p_value: 0.0,
                df,
            }
        });
    }
    let t = m / (s / (n as f64).sqrt());
    let dist = StudentsT::new(0.0, 1.0, df as f64).expect("df >= 1");
    let p_value = (2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0);
    Ok(TTest { t, p_value, df })
}
