//! Finite probability vectors on `{0, .., k-1}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A probability vector `p` in the simplex `S_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    /// Inputs whose total mass is within this distance of 1 are renormalized
    /// silently.
    pub const TOLERANCE: f64 = 1e-9;

    /// Builds a probability vector, renormalizing only round-off level drift.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        Self::with_renormalize(weights, false)
    }

    /// Builds a probability vector. With `renormalize` set, any nonnegative
    /// vector of positive mass is rescaled to sum to 1.
    pub fn with_renormalize(mut weights: Vec<f64>, renormalize: bool) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyVector);
        }
        for (index, &value) in weights.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if value < 0.0 {
                return Err(Error::NegativeProbability { index, value });
            }
        }
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 {
            return Err(Error::DegenerateInput);
        }
        if !renormalize && (sum - 1.0).abs() > Self::TOLERANCE {
            return Err(Error::NotNormalized { sum });
        }
        if sum != 1.0 {
            weights.iter_mut().for_each(|w| *w /= sum);
        }
        Ok(ProbVector(weights))
    }

    /// The uniform vector `p_(k)`.
    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::EmptyVector);
        }
        Ok(ProbVector(vec![1.0 / k as f64; k]))
    }

    /// The Dirac mass at `index` in `S_k`.
    pub fn point_mass(k: usize, index: usize) -> Result<Self> {
        if index >= k {
            return Err(Error::LengthMismatch(index + 1, k));
        }
        let mut w = vec![0.0; k];
        w[index] = 1.0;
        Ok(ProbVector(w))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    /// Indices carrying positive mass.
    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] > 0.0).collect()
    }

    /// Whether `self << other`, i.e. `other_i = 0` implies `self_i = 0`.
    pub fn is_abs_continuous_wrt(&self, other: &ProbVector) -> Result<bool> {
        check_same_len(self, other)?;
        Ok(self.iter().zip(other.iter()).all(|(&p, &q)| q > 0.0 || p == 0.0))
    }

    /// Copy with `count` zero atoms appended.
    pub fn padded(&self, count: usize) -> ProbVector {
        let mut w = self.0.clone();
        w.extend(std::iter::repeat(0.0).take(count));
        ProbVector(w)
    }

    /// Copy reordered so that entry `i` of the result is `self[perm[i]]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<ProbVector> {
        if perm.len() != self.len() {
            return Err(Error::LengthMismatch(perm.len(), self.len()));
        }
        let mut seen = vec![false; perm.len()];
        for &j in perm {
            if j >= perm.len() || std::mem::replace(&mut seen[j], true) {
                return Err(Error::BadGrid(format!("{perm:?} is not a permutation")));
            }
        }
        Ok(ProbVector(perm.iter().map(|&j| self.0[j]).collect()))
    }

    /// Convex combination `a * self + (1 - a) * other`.
    pub fn mix(&self, other: &ProbVector, a: f64) -> Result<ProbVector> {
        check_same_len(self, other)?;
        let w = self
            .iter()
            .zip(other.iter())
            .map(|(&x, &y)| a * x + (1.0 - a) * y)
            .collect();
        ProbVector::new(w)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for ProbVector {
    type Error = Error;

    fn try_from(weights: Vec<f64>) -> Result<Self> {
        ProbVector::new(weights)
    }
}

impl From<ProbVector> for Vec<f64> {
    fn from(p: ProbVector) -> Self {
        p.0
    }
}

impl std::ops::Index<usize> for ProbVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

pub(crate) fn check_same_len(p: &ProbVector, q: &ProbVector) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch(p.len(), q.len()));
    }
    Ok(())
}
