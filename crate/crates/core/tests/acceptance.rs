//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Run with `cargo test -p fsw-core --test acceptance`.

use std::time::{Duration, Instant};

use fsw_core::bench::bench_grid;
use fsw_core::validate::{run_check, CheckReport, SuiteSize};

const SEED: u64 = 20_261_015;

struct Outcome {
    name: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
    budget: Duration,
}

fn from_report(name: &'static str, budget_secs: u64, f: impl FnOnce() -> fsw_core::Result<CheckReport>) -> Outcome {
    let start = Instant::now();
    let (pass, detail) = match f() {
        Ok(r) => (
            r.pass,
            format!("statistic={:.4e} bound={:.4e} std_error={:.2e} samples={} {}", r.statistic, r.bound, r.std_error, r.samples, r.note),
        ),
        Err(e) => (false, format!("error: {e}")),
    };
    Outcome { name, pass, detail, elapsed: start.elapsed(), budget: Duration::from_secs(budget_secs) }
}

fn geometric_mean(xs: &[f64]) -> f64 {
    (xs.iter().map(|x| x.ln()).sum::<f64>() / xs.len() as f64).exp()
}

fn complexity() -> Outcome {
    let start = Instant::now();
    let ms = [256, 512, 1024, 2048, 4096];
    let ns = [128, 256, 512, 1024, 2048];
    let (pass, detail) = match bench_grid(&ms, &ns, 3, 5, SEED) {
        Ok(cells) => {
            let m_ratios: Vec<f64> = cells.iter().filter_map(|c| c.m_ratio).collect();
            let n_ratios: Vec<f64> = cells.iter().filter_map(|c| c.n_ratio).collect();
            let (gm, gn) = (geometric_mean(&m_ratios), geometric_mean(&n_ratios));
            let m_in = m_ratios.iter().filter(|r| (1.6..=2.6).contains(*r)).count();
            let n_in = n_ratios.iter().filter(|r| (1.8..=3.0).contains(*r)).count();
            (
                (1.6..=2.6).contains(&gm) && (1.8..=3.0).contains(&gn),
                format!(
                    "m-doubling ratio={gm:.3} (band [1.6,2.6], {m_in}/{} cells in band) N-doubling ratio={gn:.3} (band [1.8,3.0], {n_in}/{} cells in band)",
                    m_ratios.len(),
                    n_ratios.len()
                ),
            )
        }
        Err(e) => (false, format!("error: {e}")),
    };
    Outcome { name: "complexity_scaling", pass, detail, elapsed: start.elapsed(), budget: Duration::from_secs(300) }
}

fn main() {
    let full = SuiteSize::FULL;
    let criteria: [(&'static str, u64); 8] = [
        ("expectation_identity", 120),
        ("variance_bound", 60),
        ("boundedness", 60),
        ("oracle_1d", 30),
        ("separation", 120),
        ("non_blip", 10),
        ("symmetries", 10),
        ("gradient", 30),
    ];
    let mut outcomes: Vec<Outcome> = criteria.iter().map(|&(name, budget)| from_report(name, budget, || run_check(name, &full, SEED))).collect();
    outcomes.push(complexity());

    println!();
    for o in &outcomes {
        let in_time = o.elapsed <= o.budget;
        let ok = o.pass && in_time;
        println!(
            "[{}] {:<22} {} runtime={:.1}s (limit {}s{})",
            if ok { "PASS" } else { "FAIL" },
            o.name,
            o.detail,
            o.elapsed.as_secs_f64(),
            o.budget.as_secs(),
            if in_time { "" } else { ", exceeded" }
        );
    }
    let failed: Vec<&str> = outcomes.iter().filter(|o| !(o.pass && o.elapsed <= o.budget)).map(|o| o.name).collect();
    println!("acceptance: {} of {} criteria passed", outcomes.len() - failed.len(), outcomes.len());
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
