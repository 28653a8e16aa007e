//! Paired t-test with Student-t tail probabilities computed from the
//! regularized incomplete beta function.
//!
//! Differences are taken as `baseline - refined`, so an improvement produces
//! a negative t statistic. The standard deviation uses the `n - 1`
//! denominator.

use serde::{Deserialize, Serialize};
use thiserror::Error;

const BETA_MAX_ITERATIONS: usize = 200;
const BETA_EPSILON: f64 = 1e-14;
const TINY: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("length mismatch: {baseline} baseline values vs {refined} refined values")]
    LengthMismatch { baseline: usize, refined: usize },
    #[error("need at least 2 pairs, got {0}")]
    TooFewSamples(usize),
    #[error("degenerate: zero variance of differences")]
    ZeroVariance,
    #[error("empty input")]
    Empty,
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("incomplete beta continued fraction did not converge for a={a}, b={b}, x={x}")]
    NoConvergence { a: f64, b: f64, x: f64 },
}

/// Lanczos approximation (g = 7, nine coefficients), relative error around
/// 1e-15 for positive arguments.
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    #[allow(clippy::excessive_precision)]
    const COEFFS: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut sum = COEFFS[0];
    for (i, &c) in COEFFS.iter().enumerate().skip(1) {
        sum += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + sum.ln()
}

// Modified Lentz evaluation of the incomplete beta continued fraction.
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> Result<f64, StatsError> {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=BETA_MAX_ITERATIONS {
        let m = m as f64;
        let m2 = 2.0 * m;

        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;

        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < BETA_EPSILON {
            return Ok(h);
        }
    }
    Err(StatsError::NoConvergence { a, b, x })
}

/// Regularized incomplete beta `I_x(a, b)`.
///
/// Uses the continued fraction directly for `x < (a + 1) / (a + b + 2)` and
/// the symmetry `I_x(a, b) = 1 - I_{1-x}(b, a)` otherwise.
pub fn reg_inc_beta(a: f64, b: f64, x: f64) -> Result<f64, StatsError> {
    if !(a > 0.0 && b > 0.0) {
        return Err(StatsError::Domain(format!("shape parameters must be positive (a={a}, b={b})")));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(StatsError::Domain(format!("x={x} outside [0, 1]")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    let value = if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(a, b, x)? / a
    } else {
        1.0 - front * beta_continued_fraction(b, a, 1.0 - x)? / b
    };
    Ok(value.clamp(0.0, 1.0))
}

// Two-sided tail mass P(|T| >= |t|) = I_{df/(df+t²)}(df/2, 1/2).
fn two_sided_tail(t: f64, df: u32) -> Result<f64, StatsError> {
    let df = f64::from(df);
    reg_inc_beta(df / 2.0, 0.5, df / (df + t * t))
}

/// Student-t cumulative distribution function.
pub fn t_cdf(t: f64, df: u32) -> Result<f64, StatsError> {
    if df == 0 {
        return Err(StatsError::Domain("degrees of freedom must be at least 1".to_owned()));
    }
    if t.is_nan() {
        return Err(StatsError::Domain("t is NaN".to_owned()));
    }
    let half_tail = 0.5 * two_sided_tail(t, df)?;
    Ok(if t >= 0.0 { 1.0 - half_tail } else { half_tail })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub n: usize,
    pub mean_diff: f64,
    pub sd_diff: f64,
    pub t_stat: f64,
    pub df: u32,
    pub p_two_tailed: f64,
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn sample_sd(values: &[f64], mean: f64) -> f64 {
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

pub fn paired_t_test(baseline: &[f64], refined: &[f64]) -> Result<TTestResult, StatsError> {
    if baseline.len() != refined.len() {
        return Err(StatsError::LengthMismatch {
            baseline: baseline.len(),
            refined: refined.len(),
        });
    }
    let n = baseline.len();
    if n < 2 {
        return Err(StatsError::TooFewSamples(n));
    }
    let diffs: Vec<f64> = baseline.iter().zip(refined).map(|(b, r)| b - r).collect();
    let mean_diff = mean(&diffs);
    let sd_diff = sample_sd(&diffs, mean_diff);
    if sd_diff == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let t_stat = mean_diff / (sd_diff / (n as f64).sqrt());
    let df = (n - 1) as u32;
    Ok(TTestResult {
        n,
        mean_diff,
        sd_diff,
        t_stat,
        df,
        p_two_tailed: two_sided_tail(t_stat, df)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Absent for a single value.
    pub sd: Option<f64>,
    pub min: f64,
    pub max: f64,
}

pub fn summarize(scores: &[f64]) -> Result<Summary, StatsError> {
    if scores.is_empty() {
        return Err(StatsError::Empty);
    }
    let m = mean(scores);
    Ok(Summary {
        mean: m,
        sd: (scores.len() >= 2).then(|| sample_sd(scores, m)),
        min: scores.iter().copied().fold(f64::INFINITY, f64::min),
        max: scores.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}
