//! Fourier sliced-Wasserstein embeddings of multisets and discrete measures.
//!
//! A probability measure `μ = Σ wᵢ δ_{xᵢ}` on ℝᵈ is mapped to ℝᵐ by taking,
//! for each of `m` random (direction, frequency) pairs `(v, ξ)`, the cosine
//! transform of the quantile function of the projection `vᵀμ` at frequency
//! `ξ`, scaled by `2(1+ξ)`. With directions uniform on the sphere and
//! frequencies drawn from the density `(1+ξ)⁻²`, the mean squared coordinate
//! difference between two embeddings is an unbiased estimate of the squared
//! sliced-Wasserstein distance.
//!
//! Modules:
//!
//! - [`measure`]: weighted point clouds, normalization, regularization
//! - [`quantile`]: projections, quantile step functions, exact 1-D `W_p`
//! - [`fsw`]: parameter sampling, the embedding and its gradient
//! - [`wasserstein`]: exact transport on small instances, Monte-Carlo slicing
//! - [`validate`]: statistical and structural checks of the embedding
//! - [`io`]: CSV point clouds and JSON artifacts
//! - [`cli`]: the `fsw` command-line front end

pub mod bench;
pub mod cli;
pub mod error;
pub mod fsw;
pub mod io;
pub mod measure;
pub mod quantile;
pub mod rng;
pub mod transport;
pub mod validate;
pub mod wasserstein;

pub use error::{Error, Result};
pub use fsw::{embed, embed_measure, EmbeddingParams, EmbeddingVector, MassMode, Variant};
pub use measure::{DiscreteMeasure, ProbabilityMeasure};
pub use quantile::StepQuantile;
