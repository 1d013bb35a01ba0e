//! Finitely supported measures `μ = Σ wᵢ δ_{xᵢ}` over ℝᵈ.
//!
//! Points are stored point-major: point `i` occupies `points[i*d..(i+1)*d]`.
//! Duplicate points are kept as separate atoms and zero-weight atoms are
//! allowed; neither is ever merged or dropped here.

use std::ops::Deref;

use crate::error::{Error, Result};

/// Absolute tolerance on `|Σwᵢ - 1|` for probability measures.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Default mass threshold for [`DiscreteMeasure::regularize`].
pub const DEFAULT_RHO: f64 = 0.5;

/// Order-independent compensated sum: terms are sorted before a Neumaier
/// summation, so any permutation of the input gives the same bits.
pub(crate) fn stable_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    neumaier(terms.iter().copied())
}

pub(crate) fn neumaier(iter: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in iter {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// A nonnegative weighted point cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    dim: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(dim: usize, points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        if weights.is_empty() {
            return Err(Error::Empty("measure needs at least one support point"));
        }
        if points.len() != dim * weights.len() {
            if !points.len().is_multiple_of(dim) {
                return Err(Error::Shape { len: points.len(), dim });
            }
            return Err(Error::LengthMismatch(points.len() / dim, weights.len()));
        }
        if let Some(i) = points.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        for (index, &value) in weights.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite(index));
            }
            if value < 0.0 {
                return Err(Error::NegativeWeight { index, value });
            }
        }
        Ok(Self { dim, points, weights })
    }

    /// Builds a measure from one row per point.
    pub fn from_rows(rows: &[Vec<f64>], weights: Vec<f64>) -> Result<Self> {
        let dim = rows.first().map(Vec::len).ok_or(Error::Empty("no points"))?;
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: bad.len() });
        }
        Self::new(dim, rows.concat(), weights)
    }

    /// The zero measure in ℝᵈ, stored as a single zero-weight atom at the origin.
    pub fn zero(dim: usize) -> Self {
        Self { dim: dim.max(1), points: vec![0.0; dim.max(1)], weights: vec![0.0] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored atoms, including zero-weight ones.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        stable_sum(self.weights.clone())
    }

    pub fn normalize(&self) -> Result<ProbabilityMeasure> {
        let mass = self.total_mass();
        if mass <= 0.0 {
            return Err(Error::ZeroMass);
        }
        let weights = self.weights.iter().map(|w| w / mass).collect();
        ProbabilityMeasure::new(self.dim, self.points.clone(), weights)
    }

    /// Pads light measures with mass at the origin so that the result is a
    /// probability measure that depends continuously on `self`, including at
    /// the zero measure.
    ///
    /// When the total mass is below `rho`, the origin is appended as a new
    /// last atom with weight `1 - mass/rho` and the original weights are
    /// divided by `rho`.
    pub fn regularize(&self, rho: f64) -> Result<ProbabilityMeasure> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidParameter(format!("rho must be positive, got {rho}")));
        }
        let mass = self.total_mass();
        if mass >= rho {
            return self.normalize();
        }
        let mut points = self.points.clone();
        points.extend(std::iter::repeat_n(0.0, self.dim));
        let mut weights: Vec<f64> = self.weights.iter().map(|w| w / rho).collect();
        weights.push((1.0 - mass / rho).max(0.0));
        ProbabilityMeasure::new(self.dim, points, weights)
    }

    /// `W_p(μ, δ₀)` for a probability measure; `p = ∞` gives the largest norm
    /// over atoms with positive weight.
    pub fn pseudonorm(&self, p: f64) -> f64 {
        assert!(p >= 1.0, "pseudonorm needs p >= 1, got {p}");
        let norms = (0..self.len()).map(|i| self.point(i).iter().map(|x| x * x).sum::<f64>().sqrt());
        if p.is_infinite() {
            return norms
                .zip(&self.weights)
                .filter(|(_, &w)| w > 0.0)
                .map(|(n, _)| n)
                .fold(0.0, f64::max);
        }
        let terms = norms.zip(&self.weights).map(|(n, &w)| w * n.powf(p)).collect();
        stable_sum(terms).powf(1.0 / p)
    }

    /// Multiplies every support point by `alpha`; weights are untouched.
    pub fn scale_points(&self, alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale must be nonnegative, got {alpha}")));
        }
        Ok(Self {
            dim: self.dim,
            points: self.points.iter().map(|x| x * alpha).collect(),
            weights: self.weights.clone(),
        })
    }

    /// Reorders atoms so that new atom `i` is old atom `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.len());
        let mut points = Vec::with_capacity(self.points.len());
        for &j in perm {
            points.extend_from_slice(self.point(j));
        }
        Self { dim: self.dim, points, weights: perm.iter().map(|&j| self.weights[j]).collect() }
    }
}

/// A discrete measure whose weights sum to one within [`SIMPLEX_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMeasure(DiscreteMeasure);

impl ProbabilityMeasure {
    pub fn new(dim: usize, points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        Self::try_from(DiscreteMeasure::new(dim, points, weights)?)
    }

    /// Uniform weights `1/n` over the given points; repeated points carry
    /// their multiplicity.
    pub fn from_multiset(dim: usize, points: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        let n = points.len() / dim;
        if n == 0 {
            return Err(Error::Empty("the empty multiset has no embedding"));
        }
        Self::new(dim, points, vec![1.0 / n as f64; n])
    }

    pub fn from_multiset_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Empty("the empty multiset has no embedding"));
        }
        Self::try_from(DiscreteMeasure::from_rows(rows, vec![1.0 / n as f64; n])?)
    }

    /// The point mass at the origin of ℝᵈ.
    pub fn dirac_origin(dim: usize) -> Self {
        Self(DiscreteMeasure { dim, points: vec![0.0; dim], weights: vec![1.0] })
    }

    pub fn as_measure(&self) -> &DiscreteMeasure {
        &self.0
    }

    pub fn into_measure(self) -> DiscreteMeasure {
        self.0
    }

    pub fn scale_points(&self, alpha: f64) -> Result<Self> {
        Ok(Self(self.0.scale_points(alpha)?))
    }

    pub fn permute(&self, perm: &[usize]) -> Self {
        Self(self.0.permute(perm))
    }
}

impl TryFrom<DiscreteMeasure> for ProbabilityMeasure {
    type Error = Error;

    fn try_from(m: DiscreteMeasure) -> Result<Self> {
        let mass = m.total_mass();
        if (mass - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::NotNormalized(mass));
        }
        Ok(Self(m))
    }
}

impl Deref for ProbabilityMeasure {
    type Target = DiscreteMeasure;

    fn deref(&self) -> &DiscreteMeasure {
        &self.0
    }
}
