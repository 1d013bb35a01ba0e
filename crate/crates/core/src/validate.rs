//! Statistical and structural checks of the embedding.
//!
//! Stochastic checks compare two sides of an exact identity and pass when
//! they agree within three combined standard errors. Every check draws its
//! randomness from `(suite seed, check name)`, so reruns are bit-identical.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fsw::{embed, embed_grad, embed_unnormalized, embedding_distance, one_sample, EmbeddingParams};
use crate::measure::{DiscreteMeasure, ProbabilityMeasure};
use crate::quantile::{project_probability, wasserstein_1d, wasserstein_sorted, StepQuantile};
use crate::wasserstein::{self, projected_w2_squared, summarize};
use crate::rng;

/// Outcome of a single check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub statistic: f64,
    pub bound: f64,
    /// Zero for deterministic checks.
    pub std_error: f64,
    pub pass: bool,
    pub samples: u64,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl CheckReport {
    fn le(name: &str, statistic: f64, bound: f64, std_error: f64, samples: u64) -> Self {
        Self { name: name.into(), statistic, bound, std_error, pass: statistic <= bound, samples, note: String::new() }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

/// Stream `index` of the named check.
pub fn check_rng(seed: u64, check: &str, index: u64) -> ChaCha8Rng {
    rng::stream(seed, rng::label_hash(check), index)
}

/// Probability measure on `n` points drawn uniformly from the ball of radius
/// `radius`; uniform weights or random positive weights.
pub fn random_measure<R: Rng + ?Sized>(r: &mut R, dim: usize, n: usize, radius: f64, uniform: bool) -> ProbabilityMeasure {
    let points: Vec<f64> = (0..n).flat_map(|_| rng::point_in_ball(r, dim, radius)).collect();
    if uniform {
        return ProbabilityMeasure::from_multiset(dim, points).expect("n >= 1");
    }
    let raw: Vec<f64> = (0..n).map(|_| 0.05 + r.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    ProbabilityMeasure::new(dim, points, raw.iter().map(|w| w / total).collect()).expect("normalized")
}

fn radius_of(mu: &ProbabilityMeasure, nu: &ProbabilityMeasure) -> f64 {
    mu.pseudonorm(f64::INFINITY).max(nu.pseudonorm(f64::INFINITY))
}

/// `Δ²_k = (E_k(μ) - E_k(ν))²` for every parameter pair.
pub fn squared_differences(mu: &ProbabilityMeasure, nu: &ProbabilityMeasure, params: &EmbeddingParams) -> Result<Vec<f64>> {
    let a = embed(mu, params)?;
    let b = embed(nu, params)?;
    Ok(a.coords.iter().zip(&b.coords).map(|(x, y)| (x - y) * (x - y)).collect())
}

const MAX_SLICES: usize = 20_000_000;

/// Mean of `Δ²` over random `(v, ξ)` against `SW²(μ, ν)`.
///
/// The slicing side uses enough directions that its standard error is below
/// a third of the `Δ²` side's. In one dimension `SW = W` and the target is
/// exact.
pub fn check_expectation_identity(mu: &ProbabilityMeasure, nu: &ProbabilityMeasure, samples: usize, seed: u64) -> Result<CheckReport> {
    const NAME: &str = "expectation_identity";
    if mu.dim() != nu.dim() {
        return Err(Error::DimensionMismatch { expected: mu.dim(), got: nu.dim() });
    }
    let mut r = check_rng(seed, NAME, 0);
    let params = EmbeddingParams::sample(mu.dim(), samples, r.random())?;
    let delta = summarize(&squared_differences(mu, nu, &params)?);

    let (target, target_se, slices) = if mu.dim() == 1 {
        let w = wasserstein_1d(mu.points(), mu.weights(), nu.points(), nu.weights(), 2.0)?;
        (w * w, 0.0, 0)
    } else if delta.std_error == 0.0 {
        let est = wasserstein::sliced_wasserstein_mc(mu, nu, 2, r.random())?;
        (est.mean_squared, est.std_error, 2)
    } else {
        let slice_seed: u64 = r.random();
        let pilot = wasserstein::sliced_wasserstein_mc(mu, nu, 2000, slice_seed)?;
        let ratio = pilot.std_squared / delta.std_error;
        let mut count = ((10.0 * ratio * ratio).ceil() as usize).clamp(2000, MAX_SLICES);
        loop {
            let est = wasserstein::sliced_wasserstein_mc(mu, nu, count, slice_seed)?;
            if est.std_error < delta.std_error / 3.0 || count >= MAX_SLICES {
                break (est.mean_squared, est.std_error, count);
            }
            count = (count * 2).min(MAX_SLICES);
        }
    };
    let combined = (delta.std_error.powi(2) + target_se.powi(2)).sqrt();
    let report = CheckReport::le(NAME, (delta.mean_squared - target).abs(), 3.0 * combined, combined, samples as u64)
        .with_note(format!("mean_delta2={:.6e} sw2={:.6e} slices={slices}", delta.mean_squared, target));
    Ok(report)
}

/// Same identity for one fixed direction: averaging over `ξ` alone gives
/// the exact `W₂²(vᵀμ, vᵀν)`.
pub fn check_expectation_identity_direction(mu: &ProbabilityMeasure, nu: &ProbabilityMeasure, v: &[f64], samples: usize, seed: u64) -> Result<CheckReport> {
    const NAME: &str = "expectation_identity_direction";
    let mu1 = project_probability(mu, v)?;
    let nu1 = project_probability(nu, v)?;
    let mut r = check_rng(seed, NAME, 0);
    let params = EmbeddingParams::sample(1, samples, r.random())?;
    // directions in 1-D are ±1; fix +1 and keep the sampled frequencies
    let fixed = EmbeddingParams::from_parts(1, vec![1.0; samples], params.frequencies().to_vec(), params.seed())?;
    let delta = summarize(&squared_differences(&mu1, &nu1, &fixed)?);
    let target = projected_w2_squared(mu, nu, v);
    Ok(CheckReport::le(NAME, (delta.mean_squared - target).abs(), 3.0 * delta.std_error, delta.std_error, samples as u64)
        .with_note(format!("mean_delta2={:.6e} w2={:.6e}", delta.mean_squared, target)))
}

/// Standard deviation of `Δ²` against `13R²(1 + 5/√samples)`.
pub fn check_variance_bound(mu: &ProbabilityMeasure, nu: &ProbabilityMeasure, samples: usize, seed: u64) -> Result<CheckReport> {
    const NAME: &str = "variance_bound";
    let mut r = check_rng(seed, NAME, 0);
    let params = EmbeddingParams::sample(mu.dim(), samples, r.random())?;
    let delta = summarize(&squared_differences(mu, nu, &params)?);
    let radius = radius_of(mu, nu);
    let bound = 13.0 * radius * radius * (1.0 + 5.0 / (samples as f64).sqrt());
    Ok(CheckReport::le(NAME, delta.std_squared, bound, 0.0, samples as u64).with_note(format!("R={radius:.6}")))
}

/// Counts draws with `|E(μ; v, ξ)| > factor·‖μ‖_{W∞}` over random measures
/// in the unit ball; passes iff there are none. The proven factor is 3.
pub fn check_boundedness(measure_count: usize, samples_per: usize, seed: u64, factor: f64) -> Result<CheckReport> {
    const NAME: &str = "boundedness";
    let per_measure: Vec<(usize, f64)> = (0..measure_count as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = check_rng(seed, NAME, i);
            let dim = r.random_range(1..=4);
            let n = r.random_range(1..=10);
            let uniform = r.random_bool(0.5);
            let mu = random_measure(&mut r, dim, n, 1.0, uniform);
            bounded_draws(&mu, samples_per, &mut r, factor)
        })
        .collect();
    let violations: usize = per_measure.iter().map(|p| p.0).sum();
    let worst = per_measure.iter().map(|p| p.1).fold(0.0, f64::max);
    let mut report = CheckReport::le(NAME, worst, factor, 0.0, (measure_count * samples_per) as u64)
        .with_note(format!("violations={violations}"));
    report.pass = violations == 0;
    Ok(report)
}

/// Returns the violation count and the largest `|E| / ‖μ‖_{W∞}` seen.
fn bounded_draws(mu: &ProbabilityMeasure, draws: usize, r: &mut ChaCha8Rng, factor: f64) -> (usize, f64) {
    let norm = mu.pseudonorm(f64::INFINITY);
    let mut violations = 0;
    let mut worst = 0.0f64;
    for _ in 0..draws {
        let v = rng::unit_direction(r, mu.dim());
        let xi = rng::frequency(r);
        let e = one_sample(mu, &v, xi).expect("valid draw");
        if e.abs() > factor * norm {
            violations += 1;
        }
        if norm > 0.0 {
            worst = worst.max(e.abs() / norm);
        }
    }
    (violations, worst)
}

/// [`check_boundedness`] restricted to given measures.
pub fn check_boundedness_on(measures: &[ProbabilityMeasure], samples_per: usize, seed: u64, factor: f64) -> CheckReport {
    let per: Vec<(usize, f64)> = measures
        .par_iter()
        .enumerate()
        .map(|(i, mu)| bounded_draws(mu, samples_per, &mut check_rng(seed, "boundedness_on", i as u64), factor))
        .collect();
    let violations: usize = per.iter().map(|p| p.0).sum();
    let worst = per.iter().map(|p| p.1).fold(0.0, f64::max);
    let mut report = CheckReport::le("boundedness", worst, factor, 0.0, (measures.len() * samples_per) as u64)
        .with_note(format!("violations={violations}"));
    report.pass = violations == 0;
    report
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationRow {
    pub m: usize,
    pub mean_distance: f64,
    /// Mean of `|distance - sw_target|` over seeds.
    pub mean_abs_error: f64,
    pub sw_target: f64,
    /// Fraction of seeds with distance above `1e-6`.
    pub separated_fraction: f64,
}

/// Embedding distance between the interpolation counterexample pair for
/// each `m`, over parameter seeds `0..seeds`.
pub fn separation_experiment(d: usize, n1: usize, n2: usize, m_list: &[usize], seeds: usize) -> Result<Vec<SeparationRow>> {
    if n1 == n2 {
        let (mu, _) = wasserstein::pswe_counterexample_pair(d, n1, n1 + 1)?;
        return m_list
            .iter()
            .map(|&m| {
                let p = EmbeddingParams::sample(d, m, 0)?;
                let e = embed(&mu, &p)?;
                let dist = embedding_distance(&e, &e)?;
                Ok(SeparationRow { m, mean_distance: dist, mean_abs_error: dist, sw_target: 0.0, separated_fraction: 0.0 })
            })
            .collect();
    }
    let (a, b) = wasserstein::pswe_counterexample_pair(d, n1, n2)?;
    let target = wasserstein::sliced_wasserstein_collinear(&a, &b)?;
    m_list
        .iter()
        .map(|&m| {
            let dists: Vec<f64> = (0..seeds as u64)
                .map(|s| {
                    let p = EmbeddingParams::sample(d, m, s)?;
                    embedding_distance(&embed(&a, &p)?, &embed(&b, &p)?)
                })
                .collect::<Result<_>>()?;
            let count = dists.len().max(1) as f64;
            Ok(SeparationRow {
                m,
                mean_distance: dists.iter().sum::<f64>() / count,
                mean_abs_error: dists.iter().map(|x| (x - target).abs()).sum::<f64>() / count,
                sw_target: target,
                separated_fraction: dists.iter().filter(|&&x| x > 1e-6).count() as f64 / count,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distortion {
    pub c_hat: f64,
    pub big_c_hat: f64,
    pub ratios: Vec<f64>,
}

impl Distortion {
    pub fn distortion(&self) -> f64 {
        self.big_c_hat / self.c_hat
    }
}

/// Empirical bi-Lipschitz constants `min/max ‖E(μ) - E(ν)‖ / W₂(μ, ν)`.
pub fn distortion_scan(pairs: &[(ProbabilityMeasure, ProbabilityMeasure)], params: &EmbeddingParams) -> Result<Distortion> {
    if pairs.is_empty() {
        return Err(Error::Empty("distortion scan needs at least one pair"));
    }
    let ratios: Vec<f64> = pairs
        .par_iter()
        .map(|(mu, nu)| {
            let (w, _) = wasserstein::wasserstein_exact(mu, nu, 2.0)?;
            if w <= 1e-12 * (1.0 + radius_of(mu, nu)) {
                return Err(Error::InvalidParameter("pair of identical multisets has W2 = 0".into()));
            }
            let a = embed(mu, params)?;
            let b = embed(nu, params)?;
            let diff: f64 = a.coords.iter().zip(&b.coords).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
            Ok(diff / w)
        })
        .collect::<Result<_>>()?;
    let c_hat = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let big_c_hat = ratios.iter().copied().fold(0.0, f64::max);
    Ok(Distortion { c_hat, big_c_hat, ratios })
}

/// `(1-θ)δ₀ + θδ_x`.
pub fn two_point_measure(x: &[f64], theta: f64) -> Result<ProbabilityMeasure> {
    let mut points = vec![0.0; x.len()];
    points.extend_from_slice(x);
    ProbabilityMeasure::new(x.len(), points, vec![1.0 - theta, theta])
}

/// Ratios `‖E(μ(θ_t)) - E(μ̃_t)‖ / W_p(μ(θ_t), μ̃_t)` for `t ≥ 1`, where
/// `μ̃_t` is `μ(θ_{t-1})` with points scaled by `(θ_t/θ_{t-1})^{1/p}`.
///
/// Both measures live on the line through `x`, so `W_p` is computed exactly
/// in 1-D. A ratio sequence tending to zero rules out a lower Lipschitz bound.
pub fn non_blip_ratios(x: &[f64], p: f64, thetas: &[f64], params: &EmbeddingParams) -> Result<Vec<f64>> {
    let norm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::InvalidParameter("x must be nonzero".into()));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("p must be in [1, inf), got {p}")));
    }
    if thetas.iter().any(|t| !(*t > 0.0 && *t <= 1.0)) {
        return Err(Error::InvalidParameter("theta values must lie in (0, 1]".into()));
    }
    if thetas.windows(2).any(|w| w[1] > 0.5 * w[0]) {
        return Err(Error::InvalidParameter("theta must at least halve at every step".into()));
    }
    let u: Vec<f64> = x.iter().map(|a| a / norm).collect();
    thetas
        .windows(2)
        .map(|w| {
            let (prev, cur) = (w[0], w[1]);
            let mu = two_point_measure(x, cur)?;
            let tilde = two_point_measure(x, prev)?.scale_points((cur / prev).powf(1.0 / p))?;
            let e1 = embed(&mu, params)?;
            let e2 = embed(&tilde, params)?;
            let num = e1.coords.iter().zip(&e2.coords).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            let along = |m: &ProbabilityMeasure| crate::quantile::project_probability(m, &u);
            let (m1, m2) = (along(&mu)?, along(&tilde)?);
            let den = wasserstein_1d(m1.points(), m1.weights(), m2.points(), m2.weights(), p)?;
            Ok(num / den)
        })
        .collect()
}

/// [`non_blip_ratios`] with `θ_t = 2⁻ᵗ`, returning `r_2 … r_steps`.
pub fn non_blip_demo(x: &[f64], p: f64, steps: usize, params: &EmbeddingParams) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::InvalidParameter("need at least 2 steps".into()));
    }
    let thetas: Vec<f64> = (1..=steps).map(|t| 0.5f64.powi(t as i32)).collect();
    non_blip_ratios(x, p, &thetas, params)
}

/// Fourth-order central difference with step `h`.
fn central_difference(f: impl Fn(f64) -> Vec<f64>, x0: f64, h: f64) -> Vec<f64> {
    let (p1, m1, p2, m2) = (f(x0 + h), f(x0 - h), f(x0 + 2.0 * h), f(x0 - 2.0 * h));
    (0..p1.len()).map(|k| (8.0 * (p1[k] - m1[k]) - (p2[k] - m2[k])) / (12.0 * h)).collect()
}

/// Relative gradient error with the denominator floored at `1e-3`, so an
/// absolute error of `1e-8` meets the `1e-5` relative tolerance.
fn grad_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(1e-3)
}

pub const GRADIENT_STEP: f64 = 1e-6;
pub const GRADIENT_TOL: f64 = 1e-5;

/// Largest [`grad_error`] of [`embed_grad`] against finite differences of
/// [`embed_unnormalized`] over every point coordinate and weight.
pub fn gradient_error(mu: &DiscreteMeasure, params: &EmbeddingParams) -> Result<f64> {
    let grad = embed_grad(mu, params)?;
    let d = mu.dim();
    let mut worst = 0.0f64;
    for i in 0..mu.len() {
        for c in 0..d {
            let f = |t: f64| {
                let mut pts = mu.points().to_vec();
                pts[i * d + c] = t;
                embed_unnormalized(&DiscreteMeasure::new(d, pts, mu.weights().to_vec()).unwrap(), params).unwrap()
            };
            let fd = central_difference(f, mu.point(i)[c], GRADIENT_STEP);
            for (k, num) in fd.iter().enumerate() {
                worst = worst.max(grad_error(grad.d_point(k, i, c), *num));
            }
        }
        let f = |t: f64| {
            let mut w = mu.weights().to_vec();
            w[i] = t;
            embed_unnormalized(&DiscreteMeasure::new(d, mu.points().to_vec(), w).unwrap(), params).unwrap()
        };
        let fd = central_difference(f, mu.weights()[i], GRADIENT_STEP);
        for (k, num) in fd.iter().enumerate() {
            worst = worst.max(grad_error(grad.d_weight(k, i), *num));
        }
    }
    Ok(worst)
}

fn min_projected_gap(mu: &DiscreteMeasure, params: &EmbeddingParams) -> f64 {
    (0..params.m())
        .map(|k| {
            let mut y = crate::quantile::projected_values(mu, params.direction(k));
            y.sort_by(f64::total_cmp);
            y.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Analytic gradients against finite differences on random generic-position
/// instances (`d = 3`, `N = 6`, `m = 16`), plus one tied instance that must
/// be rejected.
pub fn gradient_suite(instances: usize, seed: u64) -> Result<CheckReport> {
    const NAME: &str = "gradient";
    let (d, n, m) = (3, 6, 16);
    let errors: Vec<f64> = (0..instances as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = check_rng(seed, NAME, i);
            loop {
                let mu = random_measure(&mut r, d, n, 1.0, false).into_measure();
                let params = EmbeddingParams::sample(d, m, r.random())?;
                // keep every pair of projections at least 1e-4 apart so the
                // stencil never crosses a tie
                if min_projected_gap(&mu, &params) > 1e-4 {
                    return gradient_error(&mu, &params);
                }
            }
        })
        .collect::<Result<_>>()?;
    let worst = errors.iter().copied().fold(0.0, f64::max);

    let tied = DiscreteMeasure::new(d, vec![0.1, 0.2, 0.3, 0.1, 0.2, 0.3], vec![0.5, 0.5])?;
    let tie_rejected = matches!(embed_grad(&tied, &EmbeddingParams::sample(d, m, seed)?), Err(Error::TiedProjection { .. }));
    let mut report = CheckReport::le(NAME, worst, GRADIENT_TOL, 0.0, instances as u64)
        .with_note(format!("tie_rejected={tie_rejected}"));
    report.pass &= tie_rejected;
    Ok(report)
}

/// Quantile-integral `W₂` against the transport LP on random 1-D instances
/// with at most 8 atoms, and against the sort formula on equal-size uniform
/// instances. The statistic is the larger of the two normalized errors.
pub fn check_oracle_1d(instances: usize, seed: u64) -> Result<CheckReport> {
    const NAME: &str = "oracle_1d";
    let lp_err = (0..instances as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = check_rng(seed, NAME, i);
            let (n1, n2) = (r.random_range(1..=8), r.random_range(1..=8));
            let mu = random_line_measure(&mut r, n1);
            let nu = random_line_measure(&mut r, n2);
            let q = StepQuantile::from_measure(&mu)?.lp_distance(&StepQuantile::from_measure(&nu)?, 2.0);
            let (w, _) = wasserstein::wasserstein_exact(&mu, &nu, 2.0)?;
            Ok((q - w).abs())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let sort_err = (0..instances as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = check_rng(seed, "oracle_1d_sorted", i);
            let n = r.random_range(1..=8);
            let x: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
            let y: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
            let a = StepQuantile::from_measure(&ProbabilityMeasure::from_multiset(1, x.clone())?)?;
            let b = StepQuantile::from_measure(&ProbabilityMeasure::from_multiset(1, y.clone())?)?;
            Ok((a.lp_distance(&b, 2.0) - wasserstein_sorted(&x, &y)?).abs())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let statistic = (lp_err / 1e-9).max(sort_err / 1e-12);
    Ok(CheckReport::le(NAME, statistic, 1.0, 0.0, 2 * instances as u64)
        .with_note(format!("lp_err={lp_err:.3e} (tol 1e-9) sort_err={sort_err:.3e} (tol 1e-12)")))
}

fn random_line_measure(r: &mut ChaCha8Rng, n: usize) -> ProbabilityMeasure {
    let pts: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
    if r.random_bool(0.5) {
        return ProbabilityMeasure::from_multiset(1, pts).unwrap();
    }
    let raw: Vec<f64> = (0..n).map(|_| 0.05 + r.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    ProbabilityMeasure::new(1, pts, raw.iter().map(|w| w / total).collect()).unwrap()
}

/// Permutation invariance (bit-exact) and positive homogeneity (`1e-12`
/// relative, `α ∈ {0, 0.5, 2, 10}`) on random measures.
pub fn check_symmetries(measures: usize, seed: u64) -> Result<CheckReport> {
    const NAME: &str = "symmetries";
    let results: Vec<(bool, f64)> = (0..measures as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = check_rng(seed, NAME, i);
            let dim = r.random_range(1..=4);
            let n = r.random_range(1..=12);
            let radius = 1.0 + 3.0 * r.random::<f64>();
            let uniform = r.random_bool(0.5);
            let mu = random_measure(&mut r, dim, n, radius, uniform);
            let params = EmbeddingParams::sample(dim, 32, r.random())?;
            let base = embed(&mu, &params)?;

            let mut perm: Vec<usize> = (0..n).collect();
            for j in (1..n).rev() {
                perm.swap(j, r.random_range(0..=j));
            }
            let permuted = embed(&mu.permute(&perm), &params)?;
            let bit_exact = permuted.coords.iter().zip(&base.coords).all(|(a, b)| a.to_bits() == b.to_bits());

            let scale = base.coords.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            let mut worst = 0.0f64;
            for alpha in [0.0, 0.5, 2.0, 10.0] {
                let scaled = embed(&mu.scale_points(alpha)?, &params)?;
                for (s, b) in scaled.coords.iter().zip(&base.coords) {
                    let denom = (alpha * scale).max(f64::MIN_POSITIVE);
                    worst = worst.max((s - alpha * b).abs() / denom);
                }
            }
            Ok((bit_exact, worst))
        })
        .collect::<Result<_>>()?;
    let all_exact = results.iter().all(|r| r.0);
    let worst = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let mut report = CheckReport::le(NAME, worst, 1e-12, 0.0, measures as u64)
        .with_note(format!("permutation_bit_exact={all_exact}"));
    report.pass &= all_exact;
    Ok(report)
}

/// Names accepted by [`run_suite`], in execution order.
pub const SUITE: &[&str] = &[
    "expectation_identity",
    "variance_bound",
    "boundedness",
    "oracle_1d",
    "separation",
    "non_blip",
    "symmetries",
    "gradient",
];

/// Sample sizes for [`run_suite`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteSize {
    pub pairs: usize,
    pub draws: usize,
    pub bounded_measures: usize,
    pub bounded_draws: usize,
    pub oracle_instances: usize,
    pub separation_seeds: usize,
    pub separation_large_m: usize,
    pub symmetry_measures: usize,
    pub gradient_instances: usize,
}

impl SuiteSize {
    pub const QUICK: SuiteSize = SuiteSize {
        pairs: 3,
        draws: 20_000,
        bounded_measures: 200,
        bounded_draws: 500,
        oracle_instances: 100,
        separation_seeds: 20,
        separation_large_m: 2_000,
        symmetry_measures: 20,
        gradient_instances: 10,
    };

    pub const FULL: SuiteSize = SuiteSize {
        pairs: 10,
        draws: 100_000,
        bounded_measures: 1_000,
        bounded_draws: 1_000,
        oracle_instances: 500,
        separation_seeds: 100,
        separation_large_m: 10_000,
        symmetry_measures: 100,
        gradient_instances: 50,
    };
}

/// Tolerance on the normalized separation distance at large `m`.
pub const SEPARATION_REL_TOL: f64 = 0.05;

/// Random pairs of 10-point uniform multisets in the unit ball of ℝ³.
pub fn unit_ball_pairs(count: usize, seed: u64) -> Vec<(ProbabilityMeasure, ProbabilityMeasure)> {
    (0..count as u64)
        .map(|i| {
            let mut r = check_rng(seed, "unit_ball_pairs", i);
            (random_measure(&mut r, 3, 10, 1.0, true), random_measure(&mut r, 3, 10, 1.0, true))
        })
        .collect()
}

fn worst_of(name: &str, reports: Vec<CheckReport>, samples: u64) -> CheckReport {
    let pass = reports.iter().all(|r| r.pass);
    let worst = reports
        .iter()
        .max_by(|a, b| (a.statistic / a.bound.max(f64::MIN_POSITIVE)).total_cmp(&(b.statistic / b.bound.max(f64::MIN_POSITIVE))))
        .cloned()
        .expect("at least one report");
    CheckReport {
        name: name.into(),
        pass,
        samples,
        note: format!("{} of {} passed; worst: {}", reports.iter().filter(|r| r.pass).count(), reports.len(), worst.note),
        ..worst
    }
}

/// Runs one named check of the suite.
pub fn run_check(name: &str, size: &SuiteSize, seed: u64) -> Result<CheckReport> {
    let seed = seed ^ rng::label_hash(name);
    match name {
        "expectation_identity" => {
            let reports = unit_ball_pairs(size.pairs, seed)
                .iter()
                .enumerate()
                .map(|(i, (a, b))| check_expectation_identity(a, b, size.draws, seed.wrapping_add(i as u64)))
                .collect::<Result<Vec<_>>>()?;
            Ok(worst_of(name, reports, (size.pairs * size.draws) as u64))
        }
        "variance_bound" => {
            let reports = unit_ball_pairs(size.pairs, seed)
                .iter()
                .enumerate()
                .map(|(i, (a, b))| check_variance_bound(a, b, size.draws, seed.wrapping_add(i as u64)))
                .collect::<Result<Vec<_>>>()?;
            Ok(worst_of(name, reports, (size.pairs * size.draws) as u64))
        }
        "boundedness" => check_boundedness(size.bounded_measures, size.bounded_draws, seed, 3.0),
        "oracle_1d" => check_oracle_1d(size.oracle_instances, seed),
        "separation" => {
            let rows = separation_experiment(3, 5, 200, &[1, size.separation_large_m], size.separation_seeds)?;
            let rel = (rows[1].mean_distance - rows[1].sw_target).abs() / rows[1].sw_target;
            let mut report = CheckReport::le(name, rel, SEPARATION_REL_TOL, 0.0, size.separation_seeds as u64)
                .with_note(format!("separated_at_m1={:.3} mean_distance={:.6} sw={:.6}", rows[0].separated_fraction, rows[1].mean_distance, rows[1].sw_target));
            report.pass &= rows[0].separated_fraction >= 0.99;
            Ok(report)
        }
        "non_blip" => {
            let params = EmbeddingParams::sample(1, 64, seed)?;
            let ratios = non_blip_demo(&[1.0], 2.0, 20, &params)?;
            let (first, last) = (ratios[0], *ratios.last().unwrap());
            Ok(CheckReport::le(name, last, 0.1 * first, 0.0, ratios.len() as u64).with_note(format!("r2={first:.6e} r20={last:.6e}")))
        }
        "symmetries" => check_symmetries(size.symmetry_measures, seed),
        "gradient" => gradient_suite(size.gradient_instances, seed),
        other => Err(Error::InvalidParameter(format!("unknown check {other:?}"))),
    }
}

pub fn run_suite(names: &[&str], size: &SuiteSize, seed: u64) -> Result<Vec<CheckReport>> {
    names.iter().map(|n| run_check(n, size, seed)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_pair_has_zero_mean() {
        let mut r = check_rng(1, "t", 0);
        let mu = random_measure(&mut r, 3, 5, 1.0, true);
        let rep = check_expectation_identity(&mu, &mu, 1000, 3).unwrap();
        assert_eq!(rep.statistic, 0.0);
        assert!(rep.pass);
        let var = check_variance_bound(&mu, &mu, 1000, 3).unwrap();
        assert_eq!(var.statistic, 0.0);
        assert!(var.pass);
    }

    #[test]
    fn one_dimensional_target_is_exact() {
        let mu = ProbabilityMeasure::from_multiset(1, vec![-0.5, 0.2, 0.9]).unwrap();
        let nu = ProbabilityMeasure::new(1, vec![0.1, -0.8], vec![0.3, 0.7]).unwrap();
        let rep = check_expectation_identity(&mu, &nu, 50_000, 9).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(rep.note.contains("slices=0"));
    }

    #[test]
    fn per_direction_identity() {
        let mut r = check_rng(2, "t", 0);
        let mu = random_measure(&mut r, 3, 6, 1.0, false);
        let nu = random_measure(&mut r, 3, 4, 1.0, true);
        let v = rng::unit_direction(&mut r, 3);
        let rep = check_expectation_identity_direction(&mu, &nu, &v, 50_000, 4).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn boundedness_on_dirac_origin() {
        let rep = check_boundedness_on(&[ProbabilityMeasure::dirac_origin(3)], 100, 0, 3.0);
        assert!(rep.pass);
        assert_eq!(rep.statistic, 0.0);
    }

    #[test]
    fn boundedness_harness_can_fail() {
        let rep = check_boundedness(50, 200, 0, 3.0).unwrap();
        assert!(rep.pass);
        let tight = check_boundedness(50, 200, 0, 1.0).unwrap();
        assert!(!tight.pass);
    }

    #[test]
    fn separation_identical_sizes() {
        let rows = separation_experiment(3, 4, 4, &[1, 8], 3).unwrap();
        assert!(rows.iter().all(|r| r.mean_distance == 0.0));
    }

    #[test]
    fn distortion_single_pair_and_scaling() {
        let mut r = check_rng(3, "t", 0);
        let pairs: Vec<_> = (0..5).map(|_| (random_measure(&mut r, 2, 5, 1.0, true), random_measure(&mut r, 2, 5, 1.0, true))).collect();
        let params = EmbeddingParams::sample(2, 21, 0).unwrap();
        let one = distortion_scan(&pairs[..1], &params).unwrap();
        assert_eq!(one.c_hat, one.big_c_hat);
        let base = distortion_scan(&pairs, &params).unwrap();
        let mut doubled = pairs.clone();
        doubled.extend(pairs.iter().map(|(a, b)| (a.scale_points(2.0).unwrap(), b.scale_points(2.0).unwrap())));
        let both = distortion_scan(&doubled, &params).unwrap();
        assert!((both.c_hat - base.c_hat).abs() < 1e-9 * base.c_hat);
        assert!((both.big_c_hat - base.big_c_hat).abs() < 1e-9 * base.big_c_hat);
        let same = (pairs[0].0.clone(), pairs[0].0.clone());
        assert!(distortion_scan(&[same], &params).is_err());
    }

    #[test]
    fn non_blip_rejects_bad_input() {
        let params = EmbeddingParams::sample(2, 8, 0).unwrap();
        assert!(non_blip_demo(&[0.0, 0.0], 2.0, 10, &params).is_err());
        assert!(non_blip_ratios(&[1.0, 0.0], 2.0, &[0.5, 0.4], &params).is_err());
        assert!(non_blip_ratios(&[1.0, 0.0], 2.0, &[0.5, 0.25, 0.125], &params).is_ok());
    }

    #[test]
    fn non_blip_ratio_is_scale_invariant() {
        let params = EmbeddingParams::sample(2, 16, 2).unwrap();
        let a = non_blip_demo(&[0.3, -0.4], 2.0, 8, &params).unwrap();
        let b = non_blip_demo(&[3.0, -4.0], 2.0, 8, &params).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9 * x.abs());
        }
    }

    #[test]
    fn reports_are_reproducible() {
        let size = SuiteSize { draws: 2000, pairs: 1, ..SuiteSize::QUICK };
        let a = run_suite(&["expectation_identity", "boundedness"], &size, 5).unwrap();
        let b = run_suite(&["expectation_identity", "boundedness"], &size, 5).unwrap();
        assert_eq!(a, b);
        assert!(run_suite(&[], &size, 5).unwrap().is_empty());
        assert!(run_check("nope", &size, 5).is_err());
    }
}
