//! The benchmark protocol: fit a tree, compile it, then time every query
//! class over `runs` independent runs on the full dataset.
//!
//! Masks are drawn once per run (seeded from the base seed and the run
//! index) and shared by MAR, MPE and conditional sampling within that run.
//! Mask generation and I/O are not timed.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use statrs::statistics::Statistics;
use treepc::clt::{fit_clt, CltEngine, SmoothingSpec};
use treepc::compile::compile_clt;
use treepc::data::{gen_mask, BitMatrix, MaskSpec};
use treepc::infer::Engine;
use treepc::{LogReal, Precision};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchConfig {
    pub runs: usize,
    pub jobs: usize,
    pub precision: Precision,
    pub mask_p: f64,
    pub seed: u64,
    pub smoothing: SmoothingSpec,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            runs: 10,
            jobs: 1,
            precision: Precision::F32,
            mask_p: 0.5,
            seed: 0,
            smoothing: SmoothingSpec::default(),
        }
    }
}

/// One timed algorithm on one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub dataset: String,
    pub algorithm: String,
    pub runs: usize,
    pub mean_seconds: f64,
    pub two_sigma_seconds: f64,
    /// Mean per-row log-likelihood averaged over runs; `None` for learning.
    pub mean_ll: Option<f64>,
}

pub const ALGORITHMS: [&str; 8] = [
    "Chow-Liu",
    "CLT EVI",
    "CLT MAR",
    "CLT MPE",
    "PC EVI",
    "PC MAR",
    "PC MPE",
    "PC C.Sampling",
];

/// Seed of run `run`: a splitmix64 step so neighbouring runs decorrelate.
pub fn run_seed(base: u64, run: usize) -> u64 {
    let mut z = base.wrapping_add((run as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().mean()
}

#[derive(Default)]
struct Samples {
    seconds: Vec<f64>,
    ll: Vec<f64>,
}

impl Samples {
    fn time<R>(&mut self, f: impl FnOnce() -> R) -> R {
        let start = Instant::now();
        let out = f();
        self.seconds.push(start.elapsed().as_secs_f64());
        out
    }

    fn report(&self, dataset: &str, algorithm: &str) -> BenchReport {
        let runs = self.seconds.len();
        let sd = if runs > 1 { self.seconds.iter().std_dev() } else { 0.0 };
        BenchReport {
            dataset: dataset.to_string(),
            algorithm: algorithm.to_string(),
            runs,
            mean_seconds: self.seconds.iter().mean(),
            two_sigma_seconds: 2.0 * sd,
            mean_ll: (!self.ll.is_empty()).then(|| mean(&self.ll)),
        }
    }
}

pub fn run_bench(dataset: &str, data: &BitMatrix, config: &BenchConfig) -> treepc::Result<Vec<BenchReport>> {
    if config.runs == 0 || config.jobs == 0 {
        return Err(treepc::Error::InvalidArgument("runs and jobs must be at least 1".into()));
    }
    match config.precision {
        Precision::F32 => run_typed::<f32>(dataset, data, config),
        Precision::F64 => run_typed::<f64>(dataset, data, config),
    }
}

fn run_typed<T: LogReal>(dataset: &str, data: &BitMatrix, config: &BenchConfig) -> treepc::Result<Vec<BenchReport>> {
    let jobs = config.jobs;
    let mut samples: Vec<Samples> = ALGORITHMS.iter().map(|_| Samples::default()).collect();
    let mut model = None;
    for _ in 0..config.runs {
        let fitted = samples[0].time(|| fit_clt(data, config.smoothing, None, jobs))?;
        model = Some(fitted);
    }
    let model = model.expect("at least one run");
    let circuit = compile_clt(&model)?;
    let tree = CltEngine::<T>::new(&model);
    let engine = Engine::<T>::new(&circuit);

    for run in 0..config.runs {
        let seed = run_seed(config.seed, run);
        let mask = gen_mask(data, MaskSpec::new(config.mask_p, seed)?);

        let ll = samples[1].time(|| tree.evi(data, jobs))?;
        samples[1].ll.push(mean(&ll));
        let ll = samples[2].time(|| tree.mar(&mask, jobs))?;
        samples[2].ll.push(mean(&ll));
        let res = samples[3].time(|| tree.mpe(&mask, jobs))?;
        samples[3].ll.push(mean(&res.iter().map(|r| r.log_value).collect::<Vec<_>>()));

        let ll = samples[4].time(|| engine.evi(data, jobs))?;
        samples[4].ll.push(mean(&ll));
        let ll = samples[5].time(|| engine.mar(&mask, jobs))?;
        samples[5].ll.push(mean(&ll));
        let res = samples[6].time(|| engine.mpe(&mask, jobs))?;
        samples[6].ll.push(mean(&res.results.iter().map(|r| r.log_value).collect::<Vec<_>>()));
        let res = samples[7].time(|| engine.conditional_sample(&mask, seed, jobs))?;
        samples[7].ll.push(mean(&res.log_values));
    }
    Ok(samples
        .iter()
        .zip(ALGORITHMS)
        .map(|(s, name)| s.report(dataset, name))
        .collect())
}

pub const REPORT_HEADER: &str = "dataset\talgorithm\truns\tmean_s\ttwo_sigma_s\tmean_ll";

/// Tab-separated report; an absent `mean_ll` is written as `---`.
pub fn format_report(rows: &[BenchReport]) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for r in rows {
        let ll = r.mean_ll.map_or_else(|| "---".to_string(), |v| format!("{v}"));
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{:.6}\t{:.6}\t{}",
            r.dataset, r.algorithm, r.runs, r.mean_seconds, r.two_sigma_seconds, ll
        );
    }
    out
}

pub fn write_report(rows: &[BenchReport], path: impl AsRef<Path>) -> std::io::Result<()> {
    fs::write(path, format_report(rows))
}

/// Aligned table for the terminal.
pub fn format_table(rows: &[BenchReport]) -> String {
    let mut out = format!("{:<12} {:<14} {:>18} {:>10}\n", "dataset", "algorithm", "time (s)", "mu_LL");
    for r in rows {
        let ll = r.mean_ll.map_or_else(|| "---".to_string(), |v| format!("{v:.2}"));
        let time = format!("{:.2} ± {:.2}", r.mean_seconds, r.two_sigma_seconds);
        let _ = writeln!(out, "{:<12} {:<14} {:>18} {:>10}", r.dataset, r.algorithm, time, ll);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use treepc::clt::clt_sample;
    use treepc::oracle::random_clt;

    #[test]
    fn report_rows_and_format() {
        let data = clt_sample(&random_clt(12, 0.1, 1), 300, 2).unwrap();
        let config = BenchConfig {
            runs: 3,
            precision: Precision::F64,
            ..BenchConfig::default()
        };
        let rows = run_bench("toy", &data, &config).unwrap();
        assert_eq!(rows.len(), ALGORITHMS.len());
        assert!(rows[0].mean_ll.is_none());
        assert!(rows[1..].iter().all(|r| r.mean_ll.unwrap().is_finite()));
        assert!(rows.iter().all(|r| r.two_sigma_seconds >= 0.0 && r.runs == 3));
        // EVI agrees between the tree and its circuit.
        assert!((rows[1].mean_ll.unwrap() - rows[4].mean_ll.unwrap()).abs() < 1e-9);
        assert!((rows[2].mean_ll.unwrap() - rows[5].mean_ll.unwrap()).abs() < 1e-9);
        assert!((rows[3].mean_ll.unwrap() - rows[6].mean_ll.unwrap()).abs() < 1e-9);
        let text = format_report(&rows);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], REPORT_HEADER);
        assert!(lines[1].starts_with("toy\tChow-Liu\t3\t") && lines[1].ends_with("\t---"));
        assert_eq!(lines.len(), 9);
        let again = run_bench("toy", &data, &config).unwrap();
        for (a, b) in rows.iter().zip(&again) {
            assert_eq!(a.mean_ll, b.mean_ll);
        }
    }

    #[test]
    fn single_run_has_zero_spread() {
        let data = clt_sample(&random_clt(4, 0.1, 1), 50, 2).unwrap();
        let config = BenchConfig {
            runs: 1,
            ..BenchConfig::default()
        };
        let rows = run_bench("one", &data, &config).unwrap();
        assert!(rows.iter().all(|r| r.two_sigma_seconds == 0.0));
    }

    #[test]
    fn run_seeds_differ() {
        assert_ne!(run_seed(0, 0), run_seed(0, 1));
        assert_eq!(run_seed(5, 3), run_seed(5, 3));
    }
}
