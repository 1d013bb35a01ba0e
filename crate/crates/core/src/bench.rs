//! Wall-clock scaling of the embedding over an `(m, N)` grid.

use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::fsw::{embed_serial, EmbeddingParams};
use crate::measure::ProbabilityMeasure;
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchCell {
    pub m: usize,
    pub n: usize,
    pub d: usize,
    /// Median seconds per embedding.
    pub seconds: f64,
    /// Time relative to the cell with `m/2` (same `n`), if present.
    pub m_ratio: Option<f64>,
    /// Time relative to the cell with `n/2` (same `m`), if present.
    pub n_ratio: Option<f64>,
}

/// Minimum wall time of one timed run; short calls are repeated to reach it.
const MIN_RUN_SECS: f64 = 0.02;

fn time_one(mu: &ProbabilityMeasure, params: &EmbeddingParams) -> Result<f64> {
    let mut reps = 0usize;
    let start = Instant::now();
    loop {
        std::hint::black_box(embed_serial(std::hint::black_box(mu), params)?);
        reps += 1;
        let elapsed = start.elapsed().as_secs_f64();
        if elapsed >= MIN_RUN_SECS {
            return Ok(elapsed / reps as f64);
        }
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Median-of-`runs` single-threaded embedding time for every `(m, n)` pair.
pub fn bench_grid(ms: &[usize], ns: &[usize], d: usize, runs: usize, seed: u64) -> Result<Vec<BenchCell>> {
    let mut cells = Vec::with_capacity(ms.len() * ns.len());
    for &n in ns {
        let mut r = rng::stream(seed, rng::NS_DATA, n as u64);
        let pts: Vec<f64> = (0..n * d).map(|_| r.random_range(-1.0..1.0)).collect();
        let mu = ProbabilityMeasure::from_multiset(d, pts)?;
        for &m in ms {
            let params = EmbeddingParams::sample(d, m, seed)?;
            time_one(&mu, &params)?; // warm-up
            let samples = (0..runs.max(1)).map(|_| time_one(&mu, &params)).collect::<Result<Vec<_>>>()?;
            cells.push(BenchCell { m, n, d, seconds: median(samples), m_ratio: None, n_ratio: None });
        }
    }
    let lookup: Vec<(usize, usize, f64)> = cells.iter().map(|c| (c.m, c.n, c.seconds)).collect();
    let find = |m: usize, n: usize| lookup.iter().find(|c| c.0 == m && c.1 == n).map(|c| c.2);
    for c in &mut cells {
        if c.m % 2 == 0 {
            c.m_ratio = find(c.m / 2, c.n).map(|t| c.seconds / t);
        }
        if c.n % 2 == 0 {
            c.n_ratio = find(c.m, c.n / 2).map(|t| c.seconds / t);
        }
    }
    Ok(cells)
}

/// Plain-text table of a grid.
pub fn format_table(cells: &[BenchCell]) -> String {
    let mut out = format!("{:>6} {:>6} {:>3} {:>12} {:>8} {:>8}\n", "m", "N", "d", "ms/embed", "m x2", "N x2");
    let fmt = |r: Option<f64>| r.map_or("-".to_string(), |x| format!("{x:.2}"));
    for c in cells {
        out.push_str(&format!("{:>6} {:>6} {:>3} {:>12.4} {:>8} {:>8}\n", c.m, c.n, c.d, c.seconds * 1e3, fmt(c.m_ratio), fmt(c.n_ratio)));
    }
    out
}
