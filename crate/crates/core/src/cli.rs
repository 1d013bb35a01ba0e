//! The `fsw` command-line front end.
//!
//! Exit codes: 0 success, 1 failed validation, 2 unreadable or invalid
//! input, 3 dimension mismatch between inputs, 4 input too large for the
//! exact solver.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::bench;
use crate::error::Error;
use crate::fsw::{embed, embed_measure, embedding_distance, m_multiset, EmbeddingParams, MassMode};
use crate::io::{read_csv_file, PointCloud};
use crate::measure::{ProbabilityMeasure, DEFAULT_RHO};
use crate::quantile::wasserstein_1d;
use crate::validate::{self, SuiteSize};
use crate::wasserstein;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_SHAPE: i32 = 3;
pub const EXIT_SIZE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "fsw", version, about = "Fourier sliced-Wasserstein embeddings and transport distances")]
pub struct RunConfig {
    /// Seed for all random draws; drawn from entropy and printed when omitted.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Basic,
    MassPlain,
    MassReg,
    MassHomog,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Embed one or more CSV point clouds.
    Embed {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Embedding dimension; defaults to 2Nd+1 for the largest input.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, value_enum, default_value = "basic")]
        variant: VariantArg,
        #[arg(long, default_value_t = DEFAULT_RHO)]
        rho: f64,
        /// Also write the explicit directions and frequencies.
        #[arg(long)]
        with_params: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact p-Wasserstein distance between two small point clouds.
    Distance {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Write the optimal plan as JSON to this path.
        #[arg(long)]
        plan: Option<PathBuf>,
    },
    /// Sliced-Wasserstein estimate between two point clouds.
    Sw {
        a: PathBuf,
        b: PathBuf,
        /// Number of Monte-Carlo slices.
        #[arg(long = "L", default_value_t = 1000)]
        slices: usize,
        /// Use the embedding distance with this many coordinates instead of slicing.
        #[arg(long)]
        m: Option<usize>,
        /// Exact W2 for 1-D inputs from the quantile functions.
        #[arg(long)]
        exact_1d: bool,
    },
    /// Run the validation checks and write a JSON report.
    Validate {
        /// Comma-separated check names; all checks when omitted.
        #[arg(long)]
        checks: Option<String>,
        /// Use the full sample sizes instead of the quick ones.
        #[arg(long)]
        full: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time the embedding over an (m, N) grid.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = vec![256, 512, 1024, 2048, 4096])]
        ms: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![128, 256, 512, 1024, 2048])]
        ns: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long, default_value_t = 5)]
        runs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Error carrying the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DimensionMismatch { .. } => EXIT_SHAPE,
            Error::TooLarge { .. } => EXIT_SIZE,
            _ => EXIT_PARSE,
        };
        CliError { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError { code: EXIT_PARSE, message: message.into() }
}

fn io_err(e: std::io::Error) -> CliError {
    CliError { code: EXIT_PARSE, message: e.to_string() }
}

fn load(path: &Path) -> Result<PointCloud, CliError> {
    read_csv_file(path).map_err(|e| CliError { code: EXIT_PARSE, message: format!("{}: {e}", path.display()) })
}

fn load_probability(path: &Path) -> Result<ProbabilityMeasure, CliError> {
    let pc = load(path)?;
    ProbabilityMeasure::try_from(pc.measure).map_err(|e| usage(format!("{}: {e}; weights must sum to 1", path.display())))
}

fn load_pair(a: &Path, b: &Path) -> Result<(ProbabilityMeasure, ProbabilityMeasure), CliError> {
    let (mu, nu) = (load_probability(a)?, load_probability(b)?);
    if mu.dim() != nu.dim() {
        return Err(Error::DimensionMismatch { expected: mu.dim(), got: nu.dim() }.into());
    }
    Ok((mu, nu))
}

/// `x` with 12 significant digits.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&magnitude) {
        return format!("{x:.11e}");
    }
    format!("{:.*}", (11 - magnitude).max(0) as usize, x)
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(io_err),
        None => writeln!(stdout, "{text}").map_err(io_err),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_embed(
    inputs: &[PathBuf],
    m: Option<usize>,
    variant: VariantArg,
    rho: f64,
    with_params: bool,
    seed: u64,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let clouds = inputs.iter().map(|p| load(p)).collect::<Result<Vec<_>, _>>()?;
    let d = clouds[0].measure.dim();
    if let Some(bad) = clouds.iter().find(|c| c.measure.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: bad.measure.dim() }.into());
    }
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(usage(format!("--rho must be positive, got {rho}")));
    }
    let n_max = clouds.iter().map(|c| c.measure.len()).max().unwrap_or(1);
    let m = m.unwrap_or_else(|| m_multiset(n_max, d) + usize::from(variant != VariantArg::Basic));
    if m == 0 {
        return Err(usage("--m must be at least 1"));
    }
    let params = EmbeddingParams::sample(d, m, seed)?;
    let mut embeddings = Vec::with_capacity(clouds.len());
    for (path, cloud) in inputs.iter().zip(&clouds) {
        let e = match variant {
            VariantArg::Basic => {
                let mu = ProbabilityMeasure::try_from(cloud.measure.clone())
                    .map_err(|e| usage(format!("{}: {e}; use a mass-* variant for unnormalized weights", path.display())))?;
                embed(&mu, &params)?
            }
            VariantArg::MassPlain => embed_measure(&cloud.measure, &params, rho, MassMode::Plain)?,
            VariantArg::MassReg => embed_measure(&cloud.measure, &params, rho, MassMode::Regularized)?,
            VariantArg::MassHomog => embed_measure(&cloud.measure, &params, rho, MassMode::Homogeneous)?,
        };
        embeddings.push(json!({
            "input": path.display().to_string(),
            "n": cloud.measure.len(),
            "uniform_weights": !cloud.weighted,
            "coords": e.coords,
        }));
    }
    let variant_name = match variant {
        VariantArg::Basic => "basic",
        VariantArg::MassPlain => "mass-plain",
        VariantArg::MassReg => "mass-reg",
        VariantArg::MassHomog => "mass-homog",
    };
    let doc = json!({
        "seed": seed,
        "d": d,
        "m": m,
        "variant": variant_name,
        "rho": rho,
        "params": params.to_json(with_params),
        "embeddings": embeddings,
    });
    emit(out, &serde_json::to_string_pretty(&doc).expect("json"), stdout)
}

fn cmd_distance(a: &Path, b: &Path, p: f64, plan_path: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (mu, nu) = load_pair(a, b)?;
    let (cost, plan) = wasserstein::wasserstein_exact(&mu, &nu, p).map_err(|e| match e {
        Error::TooLarge { .. } => CliError { code: EXIT_SIZE, message: format!("{e}; try `fsw sw`") },
        other => other.into(),
    })?;
    if let Some(path) = plan_path {
        let text = serde_json::to_string_pretty(&plan.to_json(cost, p)).expect("json");
        std::fs::write(path, text).map_err(io_err)?;
    }
    writeln!(stdout, "{}", format_sig12(cost)).map_err(io_err)
}

fn cmd_sw(a: &Path, b: &Path, slices: usize, m: Option<usize>, exact_1d: bool, seed: u64, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (mu, nu) = load_pair(a, b)?;
    let line = if exact_1d {
        if mu.dim() != 1 {
            return Err(usage("--exact-1d needs one-dimensional inputs"));
        }
        let w = wasserstein_1d(mu.points(), mu.weights(), nu.points(), nu.weights(), 2.0)?;
        format!("{} ± 0 (exact 1-D)", format_sig12(w))
    } else if let Some(m) = m {
        let params = EmbeddingParams::sample(mu.dim(), m, seed)?;
        let dist = embedding_distance(&embed(&mu, &params)?, &embed(&nu, &params)?)?;
        format!("{} (fsw, m={m})", format_sig12(dist))
    } else {
        if slices < 2 {
            return Err(usage("--L must be at least 2"));
        }
        let est = wasserstein::sliced_wasserstein_mc(&mu, &nu, slices, seed)?;
        // delta method: se(√X) ≈ se(X) / (2√X)
        let se = if est.estimate > 0.0 { est.std_error / (2.0 * est.estimate) } else { 0.0 };
        format!("{} ± {} (L={slices})", format_sig12(est.estimate), format_sig12(se))
    };
    writeln!(stdout, "{line}").map_err(io_err)
}

fn cmd_validate(checks: Option<&str>, full: bool, seed: u64, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let names: Vec<&str> = match checks {
        None => validate::SUITE.to_vec(),
        Some(list) => list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect(),
    };
    let size = if full { SuiteSize::FULL } else { SuiteSize::QUICK };
    let reports = validate::run_suite(&names, &size, seed)?;
    for r in &reports {
        writeln!(
            stdout,
            "{:<24} {:<4} statistic={:.4e} bound={:.4e} samples={} {}",
            r.name,
            if r.pass { "PASS" } else { "FAIL" },
            r.statistic,
            r.bound,
            r.samples,
            r.note
        )
        .map_err(io_err)?;
    }
    let text = serde_json::to_string_pretty(&reports).expect("json");
    match out {
        Some(path) => std::fs::write(path, &text).map_err(io_err)?,
        None => writeln!(stdout, "{text}").map_err(io_err)?,
    }
    let failed: Vec<&str> = reports.iter().filter(|r| !r.pass).map(|r| r.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError { code: EXIT_VALIDATION, message: format!("failed checks: {}", failed.join(", ")) })
    }
}

fn cmd_bench(ms: &[usize], ns: &[usize], d: usize, runs: usize, seed: u64, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cells = bench::bench_grid(ms, ns, d, runs, seed)?;
    write!(stdout, "{}", bench::format_table(&cells)).map_err(io_err)?;
    if let Some(path) = out {
        std::fs::write(path, serde_json::to_string_pretty(&cells).expect("json")).map_err(io_err)?;
    }
    Ok(())
}

/// Executes a parsed command, writing results to `stdout` and the seed
/// notice to `stderr`.
pub fn execute(config: RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let random = match &config.command {
        Command::Distance { .. } => false,
        Command::Sw { m, exact_1d, .. } => m.is_some() || !exact_1d,
        _ => true,
    };
    let seed = match config.seed {
        Some(s) => s,
        None if !random => 0,
        None => {
            let s: u64 = rand::random();
            writeln!(stderr, "seed: {s}").map_err(io_err)?;
            s
        }
    };
    match &config.command {
        Command::Embed { inputs, m, variant, rho, with_params, out } => {
            cmd_embed(inputs, *m, *variant, *rho, *with_params, seed, out.as_deref(), stdout)
        }
        Command::Distance { a, b, p, plan } => {
            if p.is_nan() || *p < 1.0 {
                return Err(usage(format!("--p must be at least 1, got {p}")));
            }
            cmd_distance(a, b, *p, plan.as_deref(), stdout)
        }
        Command::Sw { a, b, slices, m, exact_1d } => cmd_sw(a, b, *slices, *m, *exact_1d, seed, stdout),
        Command::Validate { checks, full, out } => cmd_validate(checks.as_deref(), *full, seed, out.as_deref(), stdout),
        Command::Bench { ms, ns, d, runs, out } => cmd_bench(ms, ns, *d, *runs, seed, out.as_deref(), stdout),
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("FSW_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // a pool may already exist when embedded in a larger program
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    configure_threads();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    match execute(config, &mut stdout.lock(), &mut stderr.lock()) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig12_formatting() {
        assert_eq!(format_sig12(1.0), "1.00000000000");
        assert_eq!(format_sig12(0.0), "0");
        assert_eq!(format_sig12(0.117851130197758), "0.117851130198");
        assert_eq!(format_sig12(1234.5), "1234.50000000");
    }

    #[test]
    fn parses_flags() {
        let c = RunConfig::try_parse_from(["fsw", "--seed", "7", "embed", "a.csv", "--variant", "mass-reg", "--m", "9"]).unwrap();
        assert_eq!(c.seed, Some(7));
        match c.command {
            Command::Embed { m, variant, .. } => {
                assert_eq!(m, Some(9));
                assert_eq!(variant, VariantArg::MassReg);
            }
            _ => panic!("wrong command"),
        }
        let c = RunConfig::try_parse_from(["fsw", "sw", "a", "b", "--L", "50"]).unwrap();
        assert!(matches!(c.command, Command::Sw { slices: 50, .. }));
    }
}
