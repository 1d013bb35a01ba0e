//! Reference distances: exact `W_p` by linear programming on small supports,
//! Monte-Carlo sliced Wasserstein, and the closed form for collinear inputs.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::ProbabilityMeasure;
use crate::quantile::{projected_values, StepQuantile};
use crate::{rng, transport};

/// Largest support (positive-weight atoms) accepted by [`wasserstein_exact`].
pub const EXACT_LIMIT: usize = 64;

/// Tolerance on plan marginals.
pub const MARGINAL_TOL: f64 = 1e-9;

/// Nonnegative `rows × cols` coupling, row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransportPlan {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl TransportPlan {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.data.chunks_exact(self.cols).map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self.get(i, j)).sum()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks_exact(self.cols).map(<[f64]>::to_vec).collect()
    }

    /// `{"cost": …, "p": …, "plan": [[…], …]}`.
    pub fn to_json(&self, cost: f64, p: f64) -> serde_json::Value {
        serde_json::json!({ "cost": cost, "p": p, "plan": self.to_rows() })
    }
}

fn positive_atoms(mu: &ProbabilityMeasure) -> Vec<usize> {
    (0..mu.len()).filter(|&i| mu.weights()[i] > 0.0).collect()
}

/// Exact `W_p(μ, ν)` with an optimal coupling, for `1 ≤ p < ∞`.
pub fn wasserstein_exact(mu: &ProbabilityMeasure, nu: &ProbabilityMeasure, p: f64) -> Result<(f64, TransportPlan)> {
    if mu.dim() != nu.dim() {
        return Err(Error::DimensionMismatch { expected: mu.dim(), got: nu.dim() });
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("exact solver needs 1 <= p < inf, got {p}")));
    }
    let rows = positive_atoms(mu);
    let cols = positive_atoms(nu);
    for size in [rows.len(), cols.len()] {
        if size > EXACT_LIMIT {
            return Err(Error::TooLarge { size, limit: EXACT_LIMIT });
        }
    }
    let supply: Vec<f64> = rows.iter().map(|&i| mu.weights()[i]).collect();
    let demand: Vec<f64> = cols.iter().map(|&j| nu.weights()[j]).collect();
    let mut cost = Vec::with_capacity(rows.len() * cols.len());
    for &i in &rows {
        for &j in &cols {
            let sq: f64 = mu.point(i).iter().zip(nu.point(j)).map(|(a, b)| (a - b) * (a - b)).sum();
            cost.push(if p == 2.0 { sq } else { sq.sqrt().powf(p) });
        }
    }
    let sol = transport::solve(&supply, &demand, &cost)?;
    let mut data = vec![0.0; mu.len() * nu.len()];
    for (a, &i) in rows.iter().enumerate() {
        for (b, &j) in cols.iter().enumerate() {
            data[i * nu.len() + j] = sol.flow[a * cols.len() + b];
        }
    }
    let plan = TransportPlan { rows: mu.len(), cols: nu.len(), data };
    Ok((sol.cost.max(0.0).powf(1.0 / p), plan))
}

/// `W₂²(vᵀμ, vᵀν)`, exact.
pub fn projected_w2_squared(mu: &ProbabilityMeasure, nu: &ProbabilityMeasure, v: &[f64]) -> f64 {
    let q1 = StepQuantile::from_weighted(&projected_values(mu, v), mu.weights()).expect("probability measure");
    let q2 = StepQuantile::from_weighted(&projected_values(nu, v), nu.weights()).expect("probability measure");
    let w = q1.lp_distance(&q2, 2.0);
    w * w
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlicedEstimate {
    /// `√(mean W₂²)` over the sampled directions.
    pub estimate: f64,
    /// Mean of the squared 1-D distances.
    pub mean_squared: f64,
    /// Sample standard deviation of the squared 1-D distances.
    pub std_squared: f64,
    /// Standard error of `mean_squared`.
    pub std_error: f64,
    pub directions: usize,
}

/// Monte-Carlo sliced Wasserstein over `directions` uniform slices; each
/// slice distance is exact.
pub fn sliced_wasserstein_mc(mu: &ProbabilityMeasure, nu: &ProbabilityMeasure, directions: usize, seed: u64) -> Result<SlicedEstimate> {
    if mu.dim() != nu.dim() {
        return Err(Error::DimensionMismatch { expected: mu.dim(), got: nu.dim() });
    }
    if directions < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 directions, got {directions}")));
    }
    let d = mu.dim();
    let samples: Vec<f64> = (0..directions as u64)
        .into_par_iter()
        .map(|l| {
            let v = rng::unit_direction(&mut rng::stream(seed, rng::NS_SLICES, l), d);
            projected_w2_squared(mu, nu, &v)
        })
        .collect();
    Ok(summarize(&samples))
}

pub(crate) fn summarize(samples: &[f64]) -> SlicedEstimate {
    let n = samples.len() as f64;
    let mean = crate::measure::neumaier(samples.iter().copied()) / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0).max(1.0);
    SlicedEstimate {
        estimate: mean.max(0.0).sqrt(),
        mean_squared: mean,
        std_squared: var.sqrt(),
        std_error: (var / n).sqrt(),
        directions: samples.len(),
    }
}

/// Sliced Wasserstein between measures on one line through the origin:
/// `W₂(μ, ν) / √d`.
pub fn sliced_wasserstein_collinear(mu: &ProbabilityMeasure, nu: &ProbabilityMeasure) -> Result<f64> {
    if mu.dim() != nu.dim() {
        return Err(Error::DimensionMismatch { expected: mu.dim(), got: nu.dim() });
    }
    let d = mu.dim();
    let atoms = || {
        positive_atoms(mu)
            .into_iter()
            .map(|i| mu.point(i))
            .chain(positive_atoms(nu).into_iter().map(|j| nu.point(j)))
    };
    let norm = |x: &[f64]| x.iter().map(|a| a * a).sum::<f64>().sqrt();
    let anchor = atoms().fold(None::<&[f64]>, |best, x| match best {
        Some(b) if norm(b) >= norm(x) => Some(b),
        _ => Some(x),
    });
    let anchor = anchor.expect("probability measures have positive atoms");
    let anchor_norm = norm(anchor);
    if anchor_norm == 0.0 {
        return Ok(0.0);
    }
    let u: Vec<f64> = anchor.iter().map(|a| a / anchor_norm).collect();
    for x in atoms() {
        let t: f64 = x.iter().zip(&u).map(|(a, b)| a * b).sum();
        let resid = x.iter().zip(&u).map(|(a, b)| (a - t * b).powi(2)).sum::<f64>().sqrt();
        if resid > 1e-10 * norm(x).max(1.0) {
            return Err(Error::NotCollinear);
        }
    }
    let w = crate::quantile::wasserstein_1d(&projected_values(mu, &u), mu.weights(), &projected_values(nu, &u), nu.weights(), 2.0)?;
    Ok(w / (d as f64).sqrt())
}

/// Uniform multisets `{ i/(n+1)·𝟙 : i = 1..n }` in ℝᵈ for `n = n1` and `n = n2`.
///
/// Methods that interpolate a multiset to a continuous distribution map both
/// to the uniform law on the diagonal segment and cannot tell them apart.
pub fn pswe_counterexample_pair(d: usize, n1: usize, n2: usize) -> Result<(ProbabilityMeasure, ProbabilityMeasure)> {
    if d == 0 || n1 == 0 || n2 == 0 {
        return Err(Error::InvalidParameter("need d, n1, n2 >= 1".into()));
    }
    if n1 == n2 {
        return Err(Error::InvalidParameter("the pair must have distinct sizes".into()));
    }
    let build = |n: usize| {
        let pts: Vec<f64> = (1..=n).flat_map(|i| std::iter::repeat_n(i as f64 / (n + 1) as f64, d)).collect();
        ProbabilityMeasure::from_multiset(d, pts)
    };
    Ok((build(n1)?, build(n2)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(r: &[&[f64]]) -> ProbabilityMeasure {
        ProbabilityMeasure::from_multiset_rows(&r.iter().map(|x| x.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn identical_measures_cost_nothing() {
        let mu = rows(&[&[0.0, 1.0], &[2.0, -1.0], &[0.5, 0.5]]);
        let (w, plan) = wasserstein_exact(&mu, &mu, 2.0).unwrap();
        assert!(w.abs() < 1e-12);
        for i in 0..3 {
            assert!((plan.get(i, i) - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn translation_by_unit_vector() {
        let a = rows(&[&[0.0, 0.0], &[1.0, 0.0]]);
        let b = rows(&[&[0.0, 1.0], &[1.0, 1.0]]);
        let (w, plan) = wasserstein_exact(&a, &b, 2.0).unwrap();
        assert!((w - 1.0).abs() < 1e-12);
        for s in plan.row_sums().into_iter().chain(plan.col_sums()) {
            assert!((s - 0.5).abs() < MARGINAL_TOL);
        }
    }

    #[test]
    fn oversize_and_bad_p() {
        let big = ProbabilityMeasure::from_multiset(1, (0..65).map(|i| i as f64).collect()).unwrap();
        let small = rows(&[&[0.0]]);
        assert!(matches!(wasserstein_exact(&big, &small, 2.0), Err(Error::TooLarge { size: 65, .. })));
        assert!(wasserstein_exact(&small, &small, f64::INFINITY).is_err());
        assert!(wasserstein_exact(&small, &small, 0.5).is_err());
    }

    #[test]
    fn zero_weight_atoms_ignored_in_size_guard() {
        let mut w = vec![0.0; 80];
        w[0] = 1.0;
        let mu = ProbabilityMeasure::new(1, (0..80).map(|i| i as f64).collect(), w).unwrap();
        let (dist, plan) = wasserstein_exact(&mu, &rows(&[&[2.0]]), 1.0).unwrap();
        assert!((dist - 2.0).abs() < 1e-12);
        assert_eq!(plan.rows(), 80);
    }

    #[test]
    fn mc_identical_and_one_dimensional() {
        let mu = rows(&[&[0.0], &[1.0]]);
        let est = sliced_wasserstein_mc(&mu, &mu, 16, 3).unwrap();
        assert_eq!(est.estimate, 0.0);
        assert_eq!(est.std_error, 0.0);
        let nu = rows(&[&[0.5], &[3.0]]);
        let exact = crate::quantile::wasserstein_1d(mu.points(), mu.weights(), nu.points(), nu.weights(), 2.0).unwrap();
        let est = sliced_wasserstein_mc(&mu, &nu, 16, 3).unwrap();
        assert!((est.estimate - exact).abs() < 1e-12);
        assert!(est.std_error < 1e-12);
        assert!(sliced_wasserstein_mc(&mu, &nu, 1, 3).is_err());
    }

    #[test]
    fn collinear_small_pair() {
        let (a, b) = pswe_counterexample_pair(3, 2, 3).unwrap();
        let sw = sliced_wasserstein_collinear(&a, &b).unwrap();
        assert!((sw - (1.0f64 / 72.0).sqrt()).abs() < 1e-14);
        let (w, _) = wasserstein_exact(&a, &b, 2.0).unwrap();
        assert!((sw - w / 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(sliced_wasserstein_collinear(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn collinear_rejects_off_line_points() {
        let a = rows(&[&[1.0, 1.0]]);
        let b = rows(&[&[1.0, 0.0]]);
        assert_eq!(sliced_wasserstein_collinear(&a, &b), Err(Error::NotCollinear));
    }

    #[test]
    fn collinear_in_one_dimension_is_plain_w2() {
        let a = rows(&[&[0.0], &[1.0]]);
        let b = rows(&[&[0.0], &[1.0], &[2.0]]);
        assert!((sliced_wasserstein_collinear(&a, &b).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn counterexample_pair_shapes() {
        let (a, b) = pswe_counterexample_pair(3, 5, 200).unwrap();
        assert_eq!((a.len(), b.len(), a.dim()), (5, 200, 3));
        assert_eq!(a.point(0), &[1.0 / 6.0; 3]);
        let (s, _) = pswe_counterexample_pair(2, 1, 4).unwrap();
        assert_eq!(s.point(0), &[0.5, 0.5]);
        assert!(pswe_counterexample_pair(3, 4, 4).is_err());
    }
}
