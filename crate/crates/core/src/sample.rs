use crate::error::{domain, Error, Result};
use crate::transforms::SupportTransform;

/// Observations on `[0, 1]` together with the transform that put them there.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    transform: SupportTransform,
}

impl Sample {
    /// Wraps observations that already live on the unit interval.
    pub fn unit(values: Vec<f64>) -> Result<Self> {
        Self::with_transform(values, SupportTransform::Identity)
    }

    /// Maps raw observations through `transform` onto `[0, 1]`.
    pub fn from_raw(raw: &[f64], transform: SupportTransform) -> Result<Self> {
        let values = raw
            .iter()
            .map(|&x| transform.forward(x))
            .collect::<Result<Vec<_>>>()?;
        Self::with_transform(values, transform)
    }

    fn with_transform(values: Vec<f64>, transform: SupportTransform) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(domain(format!(
                "observation {i} = {v} is outside [0, 1]; apply a support transform first"
            )));
        }
        Ok(Self { values, transform })
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

    pub fn transform(&self) -> SupportTransform {
        self.transform
    }

    /// The sample with observation `i` removed (same transform).
    pub fn without(&self, i: usize) -> Self {
        let mut values = self.values.clone();
        values.remove(i);
        Self {
            values,
            transform: self.transform,
        }
    }
}
