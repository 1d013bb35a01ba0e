//! One-dimensional projections, quantile step functions and the exact 1-D
//! Wasserstein distance between them.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::measure::{neumaier, DiscreteMeasure, ProbabilityMeasure};

/// Tolerance on `‖v‖ - 1` for projection directions.
pub const UNIT_TOL: f64 = 1e-10;

pub(crate) fn check_unit(v: &[f64]) -> Result<()> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > UNIT_TOL || !norm.is_finite() {
        return Err(Error::NotUnit(norm));
    }
    Ok(())
}

/// `vᵀxᵢ` for every atom, summed over coordinates in index order.
pub(crate) fn projected_values(mu: &DiscreteMeasure, v: &[f64]) -> Vec<f64> {
    mu.points()
        .chunks_exact(mu.dim())
        .map(|x| x.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// Indices of atoms sorted by value, ties kept in original index order.
pub(crate) fn sort_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    order
}

/// Pushforward of `mu` under `x ↦ vᵀx`, as a measure on the line.
pub fn project(mu: &DiscreteMeasure, v: &[f64]) -> Result<DiscreteMeasure> {
    if v.len() != mu.dim() {
        return Err(Error::DimensionMismatch { expected: mu.dim(), got: v.len() });
    }
    check_unit(v)?;
    DiscreteMeasure::new(1, projected_values(mu, v), mu.weights().to_vec())
}

pub fn project_probability(mu: &ProbabilityMeasure, v: &[f64]) -> Result<ProbabilityMeasure> {
    ProbabilityMeasure::try_from(project(mu, v)?)
}

/// Right-continuous nondecreasing step function on `[0, 1]`.
///
/// On `[breakpoints[k], breakpoints[k+1])` the function equals `values[k]`;
/// at `t = 1` it equals the last value.
#[derive(Debug, Clone, PartialEq)]
pub struct StepQuantile {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl StepQuantile {
    /// Quantile function of a 1-D probability measure.
    pub fn from_measure(nu: &ProbabilityMeasure) -> Result<Self> {
        if nu.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: nu.dim() });
        }
        Self::from_weighted(nu.points(), nu.weights())
    }

    /// Quantile function of `Σ wᵢ δ_{valuesᵢ}` rescaled to unit mass.
    pub fn from_weighted(values: &[f64], weights: &[f64]) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(Error::LengthMismatch(values.len(), weights.len()));
        }
        let order: Vec<usize> = sort_order(values).into_iter().filter(|&i| weights[i] > 0.0).collect();
        if order.is_empty() {
            return Err(Error::ZeroMass);
        }
        let mut cumulative = Vec::with_capacity(order.len());
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for &i in &order {
            let x = weights[i];
            let t = sum + x;
            comp += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
            sum = t;
            cumulative.push(sum + comp);
        }
        let total = *cumulative.last().unwrap();

        let mut breakpoints = Vec::with_capacity(order.len() + 1);
        let mut out_values = Vec::with_capacity(order.len());
        breakpoints.push(0.0);
        for (k, &i) in order.iter().enumerate() {
            let b = if k + 1 == order.len() { 1.0 } else { cumulative[k] / total };
            if b > *breakpoints.last().unwrap() {
                breakpoints.push(b);
                out_values.push(values[i]);
            }
        }
        Ok(Self { breakpoints, values: out_values })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of constant pieces.
    pub fn pieces(&self) -> usize {
        self.values.len()
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter(format!("quantile level {t} outside [0, 1]")));
        }
        if t == 1.0 {
            return Ok(*self.values.last().unwrap());
        }
        // first k with breakpoints[k+1] > t
        let k = self.breakpoints[1..].partition_point(|&b| b <= t);
        Ok(self.values[k.min(self.values.len() - 1)])
    }

    /// Walks the common refinement of both partitions, yielding
    /// `(length, self value, other value)` for every nonempty piece.
    fn merged_pieces<'a>(&'a self, other: &'a StepQuantile) -> impl Iterator<Item = (f64, f64, f64)> + 'a {
        let (mut i, mut j, mut start) = (0usize, 0usize, 0.0f64);
        std::iter::from_fn(move || {
            if i >= self.values.len() || j >= other.values.len() {
                return None;
            }
            let (a, b) = (self.breakpoints[i + 1], other.breakpoints[j + 1]);
            let end = a.min(b);
            let piece = (end - start, self.values[i], other.values[j]);
            start = end;
            match a.partial_cmp(&b) {
                Some(Ordering::Less) => i += 1,
                Some(Ordering::Greater) => j += 1,
                _ => {
                    i += 1;
                    j += 1;
                }
            }
            Some(piece)
        })
    }

    /// `(∫₀¹ |Q₁ - Q₂|ᵖ dt)^{1/p}`, or the sup of `|Q₁ - Q₂|` for `p = ∞`.
    ///
    /// Equal to `W_p` between the underlying 1-D measures.
    pub fn lp_distance(&self, other: &StepQuantile, p: f64) -> f64 {
        assert!(p >= 1.0, "p must be at least 1, got {p}");
        if p.is_infinite() {
            return self
                .merged_pieces(other)
                .map(|(_, a, b)| (a - b).abs())
                .fold(0.0, f64::max);
        }
        let integral = neumaier(self.merged_pieces(other).map(|(len, a, b)| {
            let diff = (a - b).abs();
            len * if p == 2.0 { diff * diff } else { diff.powf(p) }
        }));
        integral.max(0.0).powf(1.0 / p)
    }
}

pub fn quantile_lp_distance(q1: &StepQuantile, q2: &StepQuantile, p: f64) -> f64 {
    q1.lp_distance(q2, p)
}

/// `W₂` between uniform measures on equal-size samples:
/// `‖sort(x) - sort(y)‖ / √n`.
pub fn wasserstein_sorted(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.is_empty() {
        return Err(Error::Empty("wasserstein_sorted needs at least one value"));
    }
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let sq: f64 = xs.iter().zip(&ys).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((sq / x.len() as f64).sqrt())
}

/// Exact `W_p` between two 1-D measures given as raw values and weights.
pub fn wasserstein_1d(xv: &[f64], xw: &[f64], yv: &[f64], yw: &[f64], p: f64) -> Result<f64> {
    let q1 = StepQuantile::from_weighted(xv, xw)?;
    let q2 = StepQuantile::from_weighted(yv, yw)?;
    Ok(q1.lp_distance(&q2, p))
}
