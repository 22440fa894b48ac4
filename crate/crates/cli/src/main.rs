use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use treepc::circuit::save_circuit;
use treepc::clt::{fit_clt, save_clt, CltEngine, SmoothingSpec};
use treepc::data::{gen_mask, load_binary_csv, write_binary_csv, BitMatrix, Manifest, MaskSpec, MaskedBatch};
use treepc::infer::Engine;
use treepc::{LogReal, Precision};
use treepc_cli::bench::{format_table, run_bench, write_report, BenchConfig, BenchReport};
use treepc_cli::{load_model, Model};

const EXIT_OTHER: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_DATA: u8 = 3;
const EXIT_MODEL: u8 = 4;

#[derive(Parser)]
#[command(name = "treepc", version, about = "Chow-Liu trees and probabilistic circuits for binary data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn a Chow-Liu tree from a 0/1 CSV file.
    FitClt {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = SmoothingSpec::DEFAULT_ALPHA)]
        alpha: f64,
        #[arg(long)]
        root: Option<usize>,
        #[arg(long, default_value_t = 1, value_parser = parse_jobs)]
        jobs: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compile a tree model into a circuit file.
    Compile {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Answer EVI, MAR or MPE queries and print the mean log-likelihood.
    Query {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, default_value_t = 0.5)]
        mask_p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1, value_parser = parse_jobs)]
        jobs: usize,
        #[arg(long, default_value = "64", value_parser = parse_precision)]
        precision: Precision,
    },
    /// Complete randomly marginalized rows by conditional sampling.
    Sample {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        mask_p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1, value_parser = parse_jobs)]
        jobs: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the full timing protocol and write a TSV report.
    Bench {
        /// Dataset CSV files; the file stem names the dataset.
        #[arg(long)]
        data: Vec<PathBuf>,
        /// Dataset manifest; every entry (or those named by --dataset) is benchmarked.
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        dataset: Vec<String>,
        #[arg(long, default_value_t = 10)]
        runs: usize,
        #[arg(long, default_value_t = 1, value_parser = parse_jobs)]
        jobs: usize,
        #[arg(long, default_value_t = 0.5)]
        mask_p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "32", value_parser = parse_precision)]
        precision: Precision,
        #[arg(long, default_value_t = SmoothingSpec::DEFAULT_ALPHA)]
        alpha: f64,
        #[arg(long)]
        report: PathBuf,
    },
    /// Check every manifest entry's checksum and shape.
    Verify {
        #[arg(long)]
        manifest: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Evi,
    Mar,
    Mpe,
}

fn parse_jobs(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_precision(s: &str) -> Result<Precision, String> {
    s.parse()
}

/// An error tagged with the exit status it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

trait Tag<T> {
    fn data_err(self) -> Result<T, Failure>;
    fn model_err(self) -> Result<T, Failure>;
    fn other_err(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Tag<T> for Result<T, E> {
    fn data_err(self) -> Result<T, Failure> {
        self.map_err(|e| Failure { code: EXIT_DATA, error: e.into() })
    }
    fn model_err(self) -> Result<T, Failure> {
        self.map_err(|e| Failure { code: EXIT_MODEL, error: e.into() })
    }
    fn other_err(self) -> Result<T, Failure> {
        self.map_err(|e| Failure { code: EXIT_OTHER, error: e.into() })
    }
}

fn usage(msg: String) -> Failure {
    Failure {
        code: EXIT_USAGE,
        error: anyhow!(msg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::FitClt {
            data,
            alpha,
            root,
            jobs,
            out,
        } => {
            let smoothing = SmoothingSpec::new(alpha).map_err(|e| usage(e.to_string()))?;
            let data = load_binary_csv(&data).data_err()?;
            let start = Instant::now();
            let model = fit_clt(&data, smoothing, root, jobs).model_err()?;
            let elapsed = start.elapsed().as_secs_f64();
            save_clt(&model, &out).other_err()?;
            println!("fitted Chow-Liu tree over {} variables in {elapsed:.3} s", model.var_count());
        }
        Command::Compile { model, out } => {
            let circuit = load_model(&model)
                .and_then(Model::into_circuit)
                .with_context(|| format!("loading model {}", model.display()))
                .model_err()?;
            save_circuit(&circuit, &out).other_err()?;
            let r = circuit.structure();
            println!(
                "compiled circuit: {} sums, {} products, {} leaves",
                r.counts.sums, r.counts.products, r.counts.leaves
            );
        }
        Command::Query {
            model,
            data,
            kind,
            mask_p,
            seed,
            jobs,
            precision,
        } => {
            let model = load_model(&model)
                .with_context(|| format!("loading model {}", model.display()))
                .model_err()?;
            let data = load_checked(&data, &model)?;
            let spec = MaskSpec::new(mask_p, seed).map_err(|e| usage(e.to_string()))?;
            let mask = gen_mask(&data, spec);
            let (mean_ll, seconds) = match precision {
                Precision::F32 => query::<f32>(&model, &data, &mask, kind, jobs),
                Precision::F64 => query::<f64>(&model, &data, &mask, kind, jobs),
            }
            .data_err()?;
            println!("mean_ll\t{mean_ll}");
            println!("seconds\t{seconds:.6}");
        }
        Command::Sample {
            model,
            data,
            mask_p,
            seed,
            jobs,
            out,
        } => {
            let model = load_model(&model)
                .with_context(|| format!("loading model {}", model.display()))
                .model_err()?;
            let data = load_checked(&data, &model)?;
            let circuit = model.into_circuit().model_err()?;
            let spec = MaskSpec::new(mask_p, seed).map_err(|e| usage(e.to_string()))?;
            let mask = gen_mask(&data, spec);
            let start = Instant::now();
            let samples = Engine::<f64>::new(&circuit)
                .conditional_sample(&mask, seed, jobs)
                .data_err()?;
            let seconds = start.elapsed().as_secs_f64();
            write_binary_csv(&samples.completions, &out).other_err()?;
            let mean_ll = samples.log_values.iter().sum::<f64>() / samples.log_values.len() as f64;
            println!("mean_ll\t{mean_ll}");
            println!("seconds\t{seconds:.6}");
        }
        Command::Bench {
            data,
            manifest,
            dataset,
            runs,
            jobs,
            mask_p,
            seed,
            precision,
            alpha,
            report,
        } => {
            if runs == 0 || jobs == 0 {
                return Err(usage("--runs and --jobs must be at least 1".into()));
            }
            MaskSpec::new(mask_p, seed).map_err(|e| usage(e.to_string()))?;
            let config = BenchConfig {
                runs,
                jobs,
                precision,
                mask_p,
                seed,
                smoothing: SmoothingSpec::new(alpha).map_err(|e| usage(e.to_string()))?,
            };
            let sets = collect_datasets(&data, manifest.as_deref(), &dataset)?;
            if sets.is_empty() {
                return Err(usage("no datasets given (use --data or --manifest)".into()));
            }
            let mut rows: Vec<BenchReport> = Vec::new();
            for (name, matrix) in &sets {
                rows.extend(run_bench(name, matrix, &config).data_err()?);
            }
            write_report(&rows, &report)
                .with_context(|| format!("writing report {}", report.display()))
                .other_err()?;
            print!("{}", format_table(&rows));
        }
        Command::Verify { manifest } => {
            let m = Manifest::load(&manifest).data_err()?;
            for entry in &m.datasets {
                let d = m.load_dataset(entry).data_err()?;
                println!("{}\tok\t{}x{}", entry.name, d.rows(), d.cols());
            }
        }
    }
    Ok(())
}

fn load_checked(path: &Path, model: &Model) -> Result<BitMatrix, Failure> {
    let data = load_binary_csv(path).data_err()?;
    if data.cols() != model.var_count() {
        return Err(Failure {
            code: EXIT_DATA,
            error: anyhow!(treepc::Error::DimensionMismatch {
                expected: model.var_count(),
                actual: data.cols(),
            }),
        });
    }
    Ok(data)
}

fn collect_datasets(
    files: &[PathBuf],
    manifest: Option<&Path>,
    names: &[String],
) -> Result<Vec<(String, BitMatrix)>, Failure> {
    let mut sets = Vec::new();
    for path in files {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        sets.push((name, load_binary_csv(path).data_err()?));
    }
    if let Some(path) = manifest {
        let m = Manifest::load(path).data_err()?;
        for name in names {
            if m.get(name).is_none() {
                return Err(usage(format!("dataset {name:?} is not in {}", path.display())));
            }
        }
        for entry in &m.datasets {
            if names.is_empty() || names.contains(&entry.name) {
                sets.push((entry.name.clone(), m.load_dataset(entry).data_err()?));
            }
        }
    }
    Ok(sets)
}

/// Runs one query kind, timing only the query itself.
fn query<T: LogReal>(
    model: &Model,
    data: &BitMatrix,
    mask: &MaskedBatch,
    kind: Kind,
    jobs: usize,
) -> treepc::Result<(f64, f64)> {
    let start = Instant::now();
    let values: Vec<f64> = match (model, kind) {
        (Model::Clt(m), Kind::Evi) => CltEngine::<T>::new(m).evi(data, jobs)?,
        (Model::Clt(m), Kind::Mar) => CltEngine::<T>::new(m).mar(mask, jobs)?,
        (Model::Clt(m), Kind::Mpe) => CltEngine::<T>::new(m)
            .mpe(mask, jobs)?
            .into_iter()
            .map(|r| r.log_value)
            .collect(),
        (Model::Circuit(c), Kind::Evi) => Engine::<T>::new(c).evi(data, jobs)?,
        (Model::Circuit(c), Kind::Mar) => Engine::<T>::new(c).mar(mask, jobs)?,
        (Model::Circuit(c), Kind::Mpe) => Engine::<T>::new(c)
            .mpe(mask, jobs)?
            .results
            .into_iter()
            .map(|r| r.log_value)
            .collect(),
    };
    let seconds = start.elapsed().as_secs_f64();
    Ok((values.iter().sum::<f64>() / values.len() as f64, seconds))
}
