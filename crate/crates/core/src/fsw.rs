//! The Fourier sliced-Wasserstein embedding.
//!
//! Coordinate `k` of the embedding of `μ` is
//!
//! ```text
//! E(μ; v, ξ) = 2(1+ξ) ∫₀¹ Q_{vᵀμ}(t) cos(2πξt) dt
//! ```
//!
//! where `Q_{vᵀμ}` is the quantile function of the projection of `μ` onto
//! `v`. Because `Q` is a step function the integral has a closed form. With
//! `y₍₁₎ ≤ … ≤ y₍ₙ₎` the sorted projected support, `S_k` the cumulative
//! weights in that order and `y₍ₙ₊₁₎ = 0`,
//!
//! ```text
//! E(μ; v, ξ) = 2(1+ξ) Σ_k S_k·sinc(2ξS_k)·(y₍ₖ₎ - y₍ₖ₊₁₎)
//! ```
//!
//! which never divides by `ξ`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{DiscreteMeasure, ProbabilityMeasure};
use crate::quantile::{check_unit, projected_values, sort_order};
use crate::rng;

/// Normalized sinc, `sin(πx)/(πx)` with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = PI * x;
        px.sin() / px
    }
}

/// `t·sinc(2ξt)`, which equals `sin(2πξt)/(2πξ)` and is `t` at `ξ = 0`.
#[inline]
fn t_sinc(t: f64, xi: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t * sinc(2.0 * xi * t)
    }
}

/// Smallest `m` for which the basic embedding is injective on multisets of
/// at most `n` points in ℝᵈ (with probability one over the parameters).
pub fn m_multiset(n: usize, d: usize) -> usize {
    2 * n * d + 1
}

/// Same threshold for probability measures with at most `n` atoms.
pub fn m_measure(n: usize, d: usize) -> usize {
    2 * n * d + 2 * n - 1
}

/// `m` (direction, frequency) pairs together with the seed that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingParams {
    d: usize,
    seed: u64,
    directions: Vec<f64>,
    frequencies: Vec<f64>,
}

impl EmbeddingParams {
    /// Draws `m` i.i.d. pairs: `v` uniform on the sphere, `ξ` with density
    /// `(1+ξ)⁻²`. Pair `k` depends only on `(seed, k)`.
    pub fn sample(d: usize, m: usize, seed: u64) -> Result<Self> {
        if d == 0 || m == 0 {
            return Err(Error::InvalidParameter(format!("need d >= 1 and m >= 1, got d={d}, m={m}")));
        }
        let pairs: Vec<(Vec<f64>, f64)> = (0..m as u64)
            .into_par_iter()
            .map(|k| {
                let mut r = rng::stream(seed, rng::NS_PARAMS, k);
                let v = rng::unit_direction(&mut r, d);
                (v, rng::frequency(&mut r))
            })
            .collect();
        let mut directions = Vec::with_capacity(m * d);
        let mut frequencies = Vec::with_capacity(m);
        for (v, xi) in pairs {
            directions.extend(v);
            frequencies.push(xi);
        }
        Ok(Self { d, seed, directions, frequencies })
    }

    /// Explicit parameters; `directions` holds `m` unit vectors back to back.
    pub fn from_parts(d: usize, directions: Vec<f64>, frequencies: Vec<f64>, seed: u64) -> Result<Self> {
        if d == 0 || frequencies.is_empty() {
            return Err(Error::InvalidParameter("need d >= 1 and at least one frequency".into()));
        }
        if directions.len() != d * frequencies.len() {
            return Err(Error::LengthMismatch(directions.len() / d, frequencies.len()));
        }
        for v in directions.chunks_exact(d) {
            check_unit(v)?;
        }
        if let Some(xi) = frequencies.iter().find(|xi| !(xi.is_finite() && **xi >= 0.0)) {
            return Err(Error::InvalidParameter(format!("frequency {xi} is not a finite nonnegative number")));
        }
        Ok(Self { d, seed, directions, frequencies })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.frequencies.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn direction(&self, k: usize) -> &[f64] {
        &self.directions[k * self.d..(k + 1) * self.d]
    }

    pub fn frequency(&self, k: usize) -> f64 {
        self.frequencies[k]
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    /// The first `m` pairs.
    pub fn head(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.m() {
            return Err(Error::InvalidParameter(format!("cannot take {m} of {} parameter pairs", self.m())));
        }
        Ok(Self {
            d: self.d,
            seed: self.seed,
            directions: self.directions[..m * self.d].to_vec(),
            frequencies: self.frequencies[..m].to_vec(),
        })
    }

    /// JSON form; the explicit values are optional since the seed regenerates them.
    pub fn to_json(&self, include_values: bool) -> serde_json::Value {
        let file = ParamsFile {
            d: self.d,
            m: self.m(),
            seed: self.seed,
            directions: include_values.then(|| self.directions.chunks_exact(self.d).map(<[f64]>::to_vec).collect()),
            frequencies: include_values.then(|| self.frequencies.clone()),
        };
        serde_json::to_value(file).expect("params serialize")
    }

    /// Reads the JSON form. Explicit directions and frequencies are used
    /// as given; missing ones are regenerated from the seed.
    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let file: ParamsFile = serde_json::from_value(value.clone())
            .map_err(|e| Error::InvalidParameter(format!("bad params JSON: {e}")))?;
        let sampled = match (&file.directions, &file.frequencies) {
            (Some(_), Some(_)) => None,
            _ => Some(Self::sample(file.d, file.m, file.seed)?),
        };
        let directions = match file.directions {
            Some(rows) => {
                if rows.len() != file.m || rows.iter().any(|r| r.len() != file.d) {
                    return Err(Error::InvalidParameter("directions do not match d and m".into()));
                }
                rows.concat()
            }
            None => sampled.as_ref().unwrap().directions.clone(),
        };
        let frequencies = match file.frequencies {
            Some(f) => f,
            None => sampled.as_ref().unwrap().frequencies.clone(),
        };
        if frequencies.len() != file.m {
            return Err(Error::LengthMismatch(frequencies.len(), file.m));
        }
        Self::from_parts(file.d, directions, frequencies, file.seed)
    }
}

#[derive(Serialize, Deserialize)]
struct ParamsFile {
    d: usize,
    m: usize,
    seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    directions: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    frequencies: Option<Vec<f64>>,
}

/// Which map produced an [`EmbeddingVector`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Basic,
    MassPlain,
    #[serde(rename = "mass-reg")]
    MassRegularized,
    #[serde(rename = "mass-homog")]
    MassHomogeneous,
}

/// How the total mass of a general measure is folded into the output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MassMode {
    /// `[mass, E(μ/mass)]`; undefined at the zero measure.
    Plain,
    /// `[mass, E(μ_ρ)]` with the regularized measure `μ_ρ`.
    Regularized,
    /// `[‖E(μ_ρ)‖·mass, E(μ_ρ)]`, positively homogeneous in the points.
    Homogeneous,
}

impl MassMode {
    pub fn variant(self) -> Variant {
        match self {
            MassMode::Plain => Variant::MassPlain,
            MassMode::Regularized => Variant::MassRegularized,
            MassMode::Homogeneous => Variant::MassHomogeneous,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingVector {
    pub variant: Variant,
    pub coords: Vec<f64>,
}

impl EmbeddingVector {
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

/// Closed-form coordinate for projected values `y` and weights `w`,
/// integrating over `[0, Σw]`.
fn coordinate(y: &[f64], w: &[f64], xi: f64) -> f64 {
    let mut atoms: Vec<(f64, f64)> = y.iter().zip(w).filter(|(_, &w)| w > 0.0).map(|(&y, &w)| (y, w)).collect();
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));

    let (mut cum, mut comp) = (0.0f64, 0.0f64);
    let mut acc = 0.0;
    for (k, &(yk, wk)) in atoms.iter().enumerate() {
        let t = cum + wk;
        comp += if cum.abs() >= wk.abs() { (cum - t) + wk } else { (wk - t) + cum };
        cum = t;
        let next = atoms.get(k + 1).map_or(0.0, |a| a.0);
        acc += t_sinc(cum + comp, xi) * (yk - next);
    }
    2.0 * (1.0 + xi) * acc
}

/// One coordinate of the embedding for a single `(v, ξ)`.
pub fn one_sample(mu: &ProbabilityMeasure, v: &[f64], xi: f64) -> Result<f64> {
    if v.len() != mu.dim() {
        return Err(Error::DimensionMismatch { expected: mu.dim(), got: v.len() });
    }
    check_unit(v)?;
    if !(xi >= 0.0 && xi.is_finite()) {
        return Err(Error::InvalidParameter(format!("frequency must be finite and nonnegative, got {xi}")));
    }
    Ok(coordinate(&projected_values(mu, v), mu.weights(), xi))
}

/// Evaluates the closed form on a measure of arbitrary total mass, without
/// normalizing; equals `2(1+ξ)∫₀^{mass} Q(t)cos(2πξt)dt`. This is the
/// function [`embed_grad`] differentiates.
pub fn embed_unnormalized(mu: &DiscreteMeasure, params: &EmbeddingParams) -> Result<Vec<f64>> {
    if mu.dim() != params.d() {
        return Err(Error::DimensionMismatch { expected: params.d(), got: mu.dim() });
    }
    Ok((0..params.m())
        .into_par_iter()
        .map(|k| coordinate(&projected_values(mu, params.direction(k)), mu.weights(), params.frequency(k)))
        .collect())
}

/// The basic embedding `(E(μ; v_k, ξ_k))_{k=1..m}`.
pub fn embed(mu: &ProbabilityMeasure, params: &EmbeddingParams) -> Result<EmbeddingVector> {
    Ok(EmbeddingVector { variant: Variant::Basic, coords: embed_unnormalized(mu, params)? })
}

/// Single-threaded [`embed`], used for timing.
pub fn embed_serial(mu: &ProbabilityMeasure, params: &EmbeddingParams) -> Result<EmbeddingVector> {
    if mu.dim() != params.d() {
        return Err(Error::DimensionMismatch { expected: params.d(), got: mu.dim() });
    }
    let coords = (0..params.m())
        .map(|k| coordinate(&projected_values(mu, params.direction(k)), mu.weights(), params.frequency(k)))
        .collect();
    Ok(EmbeddingVector { variant: Variant::Basic, coords })
}

/// `√(‖e₁ - e₂‖² / m)`, the sliced-Wasserstein estimate carried by two embeddings.
pub fn embedding_distance(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<f64> {
    if a.variant != b.variant {
        return Err(Error::VariantMismatch(a.variant, b.variant));
    }
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(Error::Empty("empty embedding"));
    }
    let sq: f64 = a.coords.iter().zip(&b.coords).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok((sq / a.len() as f64).sqrt())
}

/// Embedding of a measure with arbitrary total mass. The first output is a
/// mass channel; the remaining `m - 1` use the first `m - 1` parameter pairs.
pub fn embed_measure(mu: &DiscreteMeasure, params: &EmbeddingParams, rho: f64, mode: MassMode) -> Result<EmbeddingVector> {
    if params.m() < 2 {
        return Err(Error::InvalidParameter("mass variants need m >= 2".into()));
    }
    if mu.dim() != params.d() {
        return Err(Error::DimensionMismatch { expected: params.d(), got: mu.dim() });
    }
    let inner_params = params.head(params.m() - 1)?;
    let mass = mu.total_mass();
    let inner_measure = match mode {
        MassMode::Plain => mu.normalize()?,
        MassMode::Regularized | MassMode::Homogeneous => mu.regularize(rho)?,
    };
    let inner = embed(&inner_measure, &inner_params)?.coords;
    let first = match mode {
        MassMode::Homogeneous => inner.iter().map(|x| x * x).sum::<f64>().sqrt() * mass,
        _ => mass,
    };
    let mut coords = Vec::with_capacity(params.m());
    coords.push(first);
    coords.extend(inner);
    Ok(EmbeddingVector { variant: mode.variant(), coords })
}

/// Partial derivatives of every embedding coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingGradient {
    d: usize,
    n: usize,
    points: Vec<Vec<f64>>,
    weights: Vec<Vec<f64>>,
}

impl EmbeddingGradient {
    /// `∂E_k / ∂x_{i,c}`.
    pub fn d_point(&self, k: usize, i: usize, c: usize) -> f64 {
        self.points[k][i * self.d + c]
    }

    /// `∂E_k / ∂w_i`, with weights treated as free variables.
    pub fn d_weight(&self, k: usize, i: usize) -> f64 {
        self.weights[k][i]
    }

    /// Gradient of coordinate `k` with respect to all points, point-major.
    pub fn point_grad(&self, k: usize) -> &[f64] {
        &self.points[k]
    }

    pub fn weight_grad(&self, k: usize) -> &[f64] {
        &self.weights[k]
    }

    pub fn m(&self) -> usize {
        self.points.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Analytic gradient of [`embed_unnormalized`] with respect to points and
/// weights.
///
/// With `g(s) = sin(2πξs)/(2πξ)`, each coordinate equals
/// `2(1+ξ) Σ_k y₍ₖ₎ (g(S_k) - g(S_{k-1}))`, so it is linear in the sorted
/// projections and `g'(s) = cos(2πξs)` drives the weight derivatives. The map
/// is only piecewise smooth: tied projections make the gradient undefined and
/// are reported as [`Error::TiedProjection`].
pub fn embed_grad(mu: &DiscreteMeasure, params: &EmbeddingParams) -> Result<EmbeddingGradient> {
    if mu.dim() != params.d() {
        return Err(Error::DimensionMismatch { expected: params.d(), got: mu.dim() });
    }
    let d = mu.dim();
    let n = mu.len();
    let per_coord: Vec<(Vec<f64>, Vec<f64>)> = (0..params.m())
        .into_par_iter()
        .map(|k| {
            let v = params.direction(k);
            let xi = params.frequency(k);
            let scale = 2.0 * (1.0 + xi);
            let y = projected_values(mu, v);
            let order = sort_order(&y);
            if order.windows(2).any(|p| y[p[0]] == y[p[1]]) {
                return Err(Error::TiedProjection { direction: k });
            }
            let w = mu.weights();
            let mut cumulative = Vec::with_capacity(n);
            let mut s = 0.0;
            for &i in &order {
                s += w[i];
                cumulative.push(s);
            }

            let mut dp = vec![0.0; n * d];
            let mut prev = 0.0;
            for (pos, &i) in order.iter().enumerate() {
                let cur = t_sinc(cumulative[pos], xi);
                let coef = scale * (cur - prev);
                prev = cur;
                for c in 0..d {
                    dp[i * d + c] = coef * v[c];
                }
            }

            // ∂E/∂w_{σ(j)} = 2(1+ξ) Σ_{k≥j} cos(2πξS_k)(y₍ₖ₎ - y₍ₖ₊₁₎)
            let mut dw = vec![0.0; n];
            let mut suffix = 0.0;
            for pos in (0..n).rev() {
                let yk = y[order[pos]];
                let next = if pos + 1 < n { y[order[pos + 1]] } else { 0.0 };
                suffix += (2.0 * PI * xi * cumulative[pos]).cos() * (yk - next);
                dw[order[pos]] = scale * suffix;
            }
            Ok((dp, dw))
        })
        .collect::<Result<_>>()?;
    let (points, weights) = per_coord.into_iter().unzip();
    Ok(EmbeddingGradient { d, n, points, weights })
}
