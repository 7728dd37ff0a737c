use serde::Serialize;

use crate::error::{validation, Result};

/// A finite, uniformly sampled real-valued series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSeries {
    values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sampling: Option<String>,
}

impl TimeSeries {
    /// Requires at least two values, all finite.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(validation(format!(
                "time series needs at least 2 values, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(validation(format!(
                "value {i} is not finite: {}",
                values[i]
            )));
        }
        Ok(TimeSeries {
            values,
            sampling: None,
        })
    }

    pub fn with_sampling(mut self, tag: impl Into<String>) -> Self {
        self.sampling = Some(tag.into());
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sampling(&self) -> Option<&str> {
        self.sampling.as_deref()
    }

    /// Unbiased sample standard deviation.
    pub fn std_dev(&self) -> f64 {
        let n = self.values.len() as f64;
        let mean = self.values.iter().sum::<f64>() / n;
        let ss: f64 = self.values.iter().map(|v| (v - mean).powi(2)).sum();
        (ss / (n - 1.0)).sqrt()
    }

    /// Applies `f` pointwise; the result must stay finite.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        TimeSeries::new(self.values.iter().map(|&v| f(v)).collect())
    }
}
