//! Streaming min-max normalization: each feature is scaled so the minimum
//! and maximum seen in training map to 0 and 1.
//! Outputs are deliberately not clipped, so inputs outside the training range
//! map outside `[0, 1]`.

use super::KitnetError;

#[derive(Debug, Clone, PartialEq)]
pub struct MinMaxNormalizer {
    mins: Vec<f64>,
    maxs: Vec<f64>,
}

impl MinMaxNormalizer {
    /// Initializes the statistics from the first observed vector.
    pub fn from_first(x: &[f64]) -> Result<Self, KitnetError> {
        check_finite(x)?;
        if x.is_empty() {
            return Err(KitnetError::Data("empty feature vector".into()));
        }
        Ok(Self {
            mins: x.to_vec(),
            maxs: x.to_vec(),
        })
    }

    pub fn from_bounds(mins: Vec<f64>, maxs: Vec<f64>) -> Result<Self, KitnetError> {
        if mins.len() != maxs.len() || mins.is_empty() {
            return Err(KitnetError::Shape {
                expected: mins.len(),
                got: maxs.len(),
            });
        }
        check_finite(&mins)?;
        check_finite(&maxs)?;
        if mins.iter().zip(&maxs).any(|(lo, hi)| lo > hi) {
            return Err(KitnetError::Data("normalizer min exceeds max".into()));
        }
        Ok(Self { mins, maxs })
    }

    pub fn dim(&self) -> usize {
        self.mins.len()
    }

    pub fn mins(&self) -> &[f64] {
        &self.mins
    }

    pub fn maxs(&self) -> &[f64] {
        &self.maxs
    }

    /// Widens the per-feature bounds to cover `x`.
    pub fn update(&mut self, x: &[f64]) -> Result<(), KitnetError> {
        self.check_len(x)?;
        check_finite(x)?;
        for (i, &v) in x.iter().enumerate() {
            if v < self.mins[i] {
                self.mins[i] = v;
            }
            if v > self.maxs[i] {
                self.maxs[i] = v;
            }
        }
        Ok(())
    }

    /// `(x_i - min_i) / (max_i - min_i)`; a degenerate feature (max == min)
    /// normalizes to 0.
    pub fn normalize(&self, x: &[f64]) -> Result<Vec<f64>, KitnetError> {
        self.check_len(x)?;
        Ok(x.iter()
            .enumerate()
            .map(|(i, &v)| (v - self.mins[i]) * self.scale(i))
            .collect())
    }

    /// Derivative of the normalized value with respect to the raw input;
    /// 0 for degenerate features.
    pub fn scale(&self, i: usize) -> f64 {
        let range = self.maxs[i] - self.mins[i];
        if range > 0.0 {
            1.0 / range
        } else {
            0.0
        }
    }

    fn check_len(&self, x: &[f64]) -> Result<(), KitnetError> {
        if x.len() != self.mins.len() {
            return Err(KitnetError::Shape {
                expected: self.mins.len(),
                got: x.len(),
            });
        }
        Ok(())
    }
}

fn check_finite(x: &[f64]) -> Result<(), KitnetError> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(KitnetError::Data("non-finite feature value".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_map_to_zero_and_one() {
        let norm = MinMaxNormalizer::from_bounds(vec![2.0], vec![6.0]).unwrap();
        assert_eq!(norm.normalize(&[2.0]).unwrap(), vec![0.0]);
        assert_eq!(norm.normalize(&[6.0]).unwrap(), vec![1.0]);
        assert_eq!(norm.normalize(&[4.0]).unwrap(), vec![0.5]);
    }

    #[test]
    fn degenerate_feature_normalizes_to_zero() {
        let norm = MinMaxNormalizer::from_bounds(vec![3.0], vec![3.0]).unwrap();
        assert_eq!(norm.normalize(&[7.0]).unwrap(), vec![0.0]);
        assert_eq!(norm.scale(0), 0.0);
    }

    #[test]
    fn out_of_range_inputs_map_outside_unit_interval() {
        let norm = MinMaxNormalizer::from_bounds(vec![0.0], vec![2.0]).unwrap();
        assert_eq!(norm.normalize(&[4.0]).unwrap(), vec![2.0]);
        assert_eq!(norm.normalize(&[-2.0]).unwrap(), vec![-1.0]);
    }

    #[test]
    fn update_traces_running_extremes() {
        let mut norm = MinMaxNormalizer::from_first(&[1.0, 5.0]).unwrap();
        norm.update(&[3.0, 2.0]).unwrap();
        assert_eq!(norm.mins(), &[1.0, 2.0]);
        assert_eq!(norm.maxs(), &[3.0, 5.0]);

        // in-range update leaves the stats unchanged
        norm.update(&[2.0, 3.0]).unwrap();
        assert_eq!(norm.mins(), &[1.0, 2.0]);
        assert_eq!(norm.maxs(), &[3.0, 5.0]);

        // idempotent
        let snapshot = norm.clone();
        norm.update(&[3.0, 2.0]).unwrap();
        assert_eq!(norm, snapshot);
    }

    #[test]
    fn rejects_non_finite_input() {
        let mut norm = MinMaxNormalizer::from_first(&[1.0]).unwrap();
        assert!(norm.update(&[f64::NAN]).is_err());
        assert!(MinMaxNormalizer::from_first(&[f64::INFINITY]).is_err());
    }
}
