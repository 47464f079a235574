//! Two-sample Kolmogorov-Smirnov comparison and tuned-minus-untuned deltas.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Critical coefficient at the 95% level.
pub const KS_COEFFICIENT: f64 = 1.36;

/// A named sample of per-dataset scores, keyed so two series can be aligned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSeries {
    pub label: String,
    pub keys: Vec<String>,
    pub values: Vec<f64>,
}

impl SampleSeries {
    pub fn new(label: impl Into<String>, keys: Vec<String>, values: Vec<f64>) -> Result<Self> {
        if keys.len() != values.len() {
            return Err(Error::LengthMismatch {
                left: keys.len(),
                right: values.len(),
            });
        }
        Ok(SampleSeries {
            label: label.into(),
            keys,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn sorted(xs: &[f64]) -> Result<Vec<f64>> {
    if xs.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidConfig("sample contains a non-finite value".into()));
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Largest absolute gap between the two empirical CDFs.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("KS test needs two non-empty samples".into()));
    }
    let (a, b) = (sorted(a)?, sorted(b)?);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    Ok(d)
}

/// `1.36 · sqrt((n + m) / (n m))`.
pub fn ks_threshold(n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    KS_COEFFICIENT * ((n + m) / (n * m)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsOutcome {
    pub statistic: f64,
    pub threshold: f64,
    pub not_different: bool,
}

/// Two samples are "not different" when the statistic is below the threshold.
pub fn ks_test(a: &[f64], b: &[f64]) -> Result<KsOutcome> {
    let statistic = ks_statistic(a, b)?;
    let threshold = ks_threshold(a.len(), b.len());
    Ok(KsOutcome {
        statistic,
        threshold,
        not_different: statistic < threshold,
    })
}

pub fn ks_not_different(a: &SampleSeries, b: &SampleSeries) -> Result<bool> {
    Ok(ks_test(&a.values, &b.values)?.not_different)
}

/// Per-key `tuned - untuned`, sorted ascending. Both series must cover the
/// same keys in the same order.
pub fn delta_series(tuned: &SampleSeries, untuned: &SampleSeries) -> Result<Vec<f64>> {
    if tuned.keys != untuned.keys {
        return Err(Error::Misaligned(format!(
            "`{}` and `{}` cover different datasets",
            tuned.label, untuned.label
        )));
    }
    let mut d: Vec<f64> = tuned
        .values
        .iter()
        .zip(&untuned.values)
        .map(|(t, u)| t - u)
        .collect();
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Median of a sample; the mean of the two middle values for even sizes.
pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[k] } else { (v[k - 1] + v[k]) / 2.0 })
}
