//! Cosine-based association statistics.
//!
//! `s(w, A, B)` is the mean cosine of `w` to the attribute set `A` minus its
//! mean cosine to `B`. The test statistic sums `s` over `X` and subtracts the
//! sum over `Y`; the effect size divides the difference of the two group means
//! by the sample standard deviation (divisor `2n - 1`) over `X ∪ Y`.

use alloc::vec::Vec;

use crate::embedding::CategorySet;
use crate::{Error, Result};

pub(crate) fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Cosine similarity, clamped to `[-1, 1]`.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            id: "cosine operand".into(),
            expected: u.len(),
            found: v.len(),
        });
    }
    let uu = dot(u, u);
    let vv = dot(v, v);
    if uu == 0.0 || vv == 0.0 {
        return Err(Error::ZeroNorm("cosine operand".into()));
    }
    let c = dot(u, v) / (libm::sqrt(uu) * libm::sqrt(vv));
    Ok(c.clamp(-1.0, 1.0))
}

fn mean_cosine(w: &[f64], set: &CategorySet) -> Result<f64> {
    let mut sum = 0.0;
    for v in set.vectors() {
        sum += cosine(w, v)?;
    }
    Ok(sum / set.size() as f64)
}

/// Differential association `s(w, A, B)` of one vector with two attribute sets.
pub fn differential_association(w: &[f64], a: &CategorySet, b: &CategorySet) -> Result<f64> {
    if a.size() == 0 {
        return Err(Error::EmptySet("attribute set A"));
    }
    if b.size() == 0 {
        return Err(Error::EmptySet("attribute set B"));
    }
    Ok(mean_cosine(w, a)? - mean_cosine(w, b)?)
}

/// Cached `s(w, A, B)` values for every element of `X ∪ Y`.
///
/// Elements `0..n` are the members of `X` in input order, `n..2n` those of `Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociationProfile {
    values: Vec<f64>,
    x_size: usize,
    x_sum: f64,
    y_sum: f64,
}

impl AssociationProfile {
    /// Builds a profile directly from s-values; the first `x_size` belong to `X`.
    pub fn from_values(values: Vec<f64>, x_size: usize) -> Result<Self> {
        if x_size == 0 {
            return Err(Error::EmptySet("target set X"));
        }
        if values.len() != 2 * x_size {
            return Err(Error::SizeMismatch {
                x: x_size,
                y: values.len().saturating_sub(x_size),
            });
        }
        let x_sum = values[..x_size].iter().sum();
        let y_sum = values[x_size..].iter().sum();
        Ok(Self {
            values,
            x_size,
            x_sum,
            y_sum,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `(element index in X ∪ Y, s-value)` pairs in input order.
    pub fn per_element(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().copied().enumerate()
    }

    pub fn x_values(&self) -> &[f64] {
        &self.values[..self.x_size]
    }

    pub fn y_values(&self) -> &[f64] {
        &self.values[self.x_size..]
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    /// Sum of every s-value.
    pub fn total(&self) -> f64 {
        self.x_sum + self.y_sum
    }

    /// `Σ_X s - Σ_Y s`.
    pub fn statistic(&self) -> f64 {
        self.x_sum - self.y_sum
    }

    /// Largest `|s|`; used to scale tie tolerances.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// The same profile with the roles of `X` and `Y` exchanged.
    pub fn swapped(&self) -> Self {
        let mut values = Vec::with_capacity(self.values.len());
        values.extend_from_slice(self.y_values());
        values.extend_from_slice(self.x_values());
        Self {
            values,
            x_size: self.x_size,
            x_sum: self.y_sum,
            y_sum: self.x_sum,
        }
    }
}

/// Computes the test statistic and the profile of per-element s-values.
pub fn test_statistic(
    x: &CategorySet,
    y: &CategorySet,
    a: &CategorySet,
    b: &CategorySet,
) -> Result<(f64, AssociationProfile)> {
    if x.size() != y.size() {
        return Err(Error::SizeMismatch {
            x: x.size(),
            y: y.size(),
        });
    }
    let dim = x.dimension();
    for set in [y, a, b] {
        if set.dimension() != dim {
            return Err(Error::DimensionMismatch {
                id: set.name().into(),
                expected: dim,
                found: set.dimension(),
            });
        }
    }
    let mut values = Vec::with_capacity(2 * x.size());
    for w in x.vectors().iter().chain(y.vectors()) {
        values.push(differential_association(w, a, b)?);
    }
    let profile = AssociationProfile::from_values(values, x.size())?;
    Ok((profile.statistic(), profile))
}

/// Standardized effect size of a profile.
///
/// Group sums are combined with a single commutative addition, so swapping
/// `X` and `Y` negates the result exactly.
pub fn effect_size(profile: &AssociationProfile) -> Result<f64> {
    let n = profile.x_size() as f64;
    let mean_x = profile.x_sum / n;
    let mean_y = profile.y_sum / n;
    let mean = profile.total() / (2.0 * n);

    let sq_dev = |vals: &[f64]| -> f64 { vals.iter().map(|s| (s - mean) * (s - mean)).sum() };
    let var = (sq_dev(profile.x_values()) + sq_dev(profile.y_values())) / (2.0 * n - 1.0);
    let std = libm::sqrt(var);

    let first = profile.values[0];
    let constant = profile.values.iter().all(|v| *v == first);
    if constant || std == 0.0 || !std.is_finite() {
        return Err(Error::DegenerateData);
    }
    Ok((mean_x - mean_y) / std)
}
