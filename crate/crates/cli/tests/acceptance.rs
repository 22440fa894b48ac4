//! Acceptance suite. Runs every criterion in sequence and prints one
//! PASS / FAIL / SKIP line per criterion; exits nonzero if any fails.
//!
//! Dataset-dependent checks read `datasets/datasets.toml` at the workspace
//! root and are skipped with a notice when the files are absent.

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treepc::circuit::{validate, Circuit};
use treepc::clt::{clt_evi, clt_mar, clt_mpe, clt_sample, fit_clt, Clt, CltEngine, SmoothingSpec};
use treepc::compile::compile_clt;
use treepc::data::{gen_mask, pairwise_counts, BitMatrix, Manifest, MaskSpec, MaskedBatch};
use treepc::infer::{pc_conditional_sample, pc_evi, pc_mar, pc_mpe, Engine};
use treepc::logspace::{log_close, log_sum_exp};
use treepc::oracle::{assignment, brute_evi_table, mar_from_table, mpe_from_table, random_clt};
use treepc::Error;

const ORACLE_TOL: f64 = 1e-6;
const PARITY_TOL: f64 = 1e-9;
const PRECISION_TOL: f64 = 1e-3;
const SUITE_SIZE: usize = 200;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

struct Instance {
    clt: Clt,
    pc: Circuit,
    alpha: f64,
    all: BitMatrix,
    masks: MaskedBatch,
}

/// 200 trees fitted to N=64 rows sampled from random generators, V in 2..=12,
/// alpha cycling through {0, 0.01, 1}. A draw whose alpha = 0 fit hits a 0/0
/// table is redrawn from the next seed.
fn build_suite() -> (Vec<Instance>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let alphas = [0.0, 0.01, 1.0];
    let mut out = Vec::with_capacity(SUITE_SIZE);
    let mut redraws = 0;
    let mut seed = 0u64;
    while out.len() < SUITE_SIZE {
        let v = rng.random_range(2..=12usize);
        let alpha = alphas[out.len() % 3];
        seed += 1;
        let generator = random_clt(v, 0.2, seed);
        let data = clt_sample(&generator, 64, seed).unwrap();
        let clt = match fit_clt(&data, SmoothingSpec::new(alpha).unwrap(), None, 1) {
            Ok(m) => m,
            Err(Error::DegenerateTable { .. }) => {
                redraws += 1;
                continue;
            }
            Err(e) => panic!("unexpected fit error: {e}"),
        };
        let pc = compile_clt(&clt).unwrap();
        let rows: Vec<Vec<u8>> = (0..1usize << v).map(|k| assignment(k, v)).collect();
        let all = BitMatrix::from_rows(&rows).unwrap();
        let masks = gen_mask(&data, MaskSpec::new(0.5, seed).unwrap());
        out.push(Instance {
            clt,
            pc,
            alpha,
            all,
            masks,
        });
    }
    (out, redraws)
}

fn oracle_equivalence(suite: &[Instance]) -> Check {
    let mut worst = 0.0f64;
    let mut track = |a: f64, b: f64, what: &str, k: usize| -> Result<(), String> {
        if a != b {
            worst = worst.max((a - b).abs());
        }
        ensure(log_close(a, b, ORACLE_TOL), || format!("instance {k}: {what} {a} vs oracle {b}"))
    };
    for (k, inst) in suite.iter().enumerate() {
        let tree_table = brute_evi_table(&inst.clt).unwrap();
        let pc_table = brute_evi_table(&inst.pc).unwrap();
        let evi = clt_evi(&inst.clt, &inst.all, 1).unwrap();
        let pevi = pc_evi(&inst.pc, &inst.all, 1).unwrap();
        for j in 0..tree_table.len() {
            track(evi[j], tree_table[j], "clt_evi", k)?;
            track(pevi[j], pc_table[j], "pc_evi", k)?;
        }
        let mar = clt_mar(&inst.clt, &inst.masks, 1).unwrap();
        let pmar = pc_mar(&inst.pc, &inst.masks, 1).unwrap();
        let mpe = clt_mpe(&inst.clt, &inst.masks, 1).unwrap();
        let pmpe = pc_mpe(&inst.pc, &inst.masks, 1).unwrap();
        for r in 0..inst.masks.rows() {
            let row = inst.masks.row(r);
            track(mar[r], mar_from_table(&tree_table, row), "clt_mar", k)?;
            track(pmar[r], mar_from_table(&pc_table, row), "pc_mar", k)?;
            track(mpe[r].log_value, mpe_from_table(&tree_table, row).1, "clt_mpe", k)?;
            track(pmpe.results[r].log_value, mpe_from_table(&pc_table, row).1, "pc_mpe", k)?;
        }
    }
    let by_alpha = [0.0, 0.01, 1.0].map(|a| suite.iter().filter(|i| i.alpha == a).count());
    Ok(format!(
        "{} instances (alpha 0/0.01/1: {:?}), max |diff| {worst:.2e} <= {ORACLE_TOL:e}",
        suite.len(),
        by_alpha
    ))
}

fn normalization(suite: &[Instance]) -> Check {
    let mut worst = 0.0f64;
    for (k, inst) in suite.iter().enumerate() {
        for total in [
            log_sum_exp(&clt_evi(&inst.clt, &inst.all, 1).unwrap()),
            log_sum_exp(&pc_evi(&inst.pc, &inst.all, 1).unwrap()),
        ] {
            worst = worst.max(total.abs());
            ensure(total.abs() <= ORACLE_TOL, || format!("instance {k}: logsumexp {total}"))?;
        }
    }
    Ok(format!("max |logsumexp EVI| {worst:.2e} <= {ORACLE_TOL:e}"))
}

fn parity_on(clt: &Clt, pc: &Circuit, data: &BitMatrix, masks: &MaskedBatch, label: &str) -> Result<f64, String> {
    let mut worst = 0.0f64;
    let mut cmp = |a: &[f64], b: &[f64], what: &str| -> Result<(), String> {
        for (r, (x, y)) in a.iter().zip(b).enumerate() {
            if x != y {
                worst = worst.max((x - y).abs());
            }
            ensure(log_close(*x, *y, PARITY_TOL), || format!("{label} {what} row {r}: {x} vs {y}"))?;
        }
        Ok(())
    };
    cmp(&clt_evi(clt, data, 1).unwrap(), &pc_evi(pc, data, 1).unwrap(), "EVI")?;
    cmp(&clt_mar(clt, masks, 1).unwrap(), &pc_mar(pc, masks, 1).unwrap(), "MAR")?;
    let a: Vec<f64> = clt_mpe(clt, masks, 1).unwrap().iter().map(|r| r.log_value).collect();
    let b: Vec<f64> = pc_mpe(pc, masks, 1).unwrap().results.iter().map(|r| r.log_value).collect();
    cmp(&a, &b, "MPE")?;
    Ok(worst)
}

fn compilation_parity(suite: &[Instance]) -> Check {
    let mut worst = 0.0f64;
    for (k, inst) in suite.iter().enumerate() {
        worst = worst.max(parity_on(&inst.clt, &inst.pc, &inst.all, &inst.masks, &format!("instance {k}"))?);
    }
    // A wide tree on realistic row counts.
    let generator = random_clt(300, 0.05, 77);
    let data = clt_sample(&generator, 2000, 1).unwrap();
    let clt = fit_clt(&data, SmoothingSpec::default(), None, 1).unwrap();
    let pc = compile_clt(&clt).unwrap();
    let masks = gen_mask(&data, MaskSpec::new(0.5, 3).unwrap());
    worst = worst.max(parity_on(&clt, &pc, &data, &masks, "V=300")?);
    Ok(format!("suite + V=300 x 2000 rows, max |diff| {worst:.2e} <= {PARITY_TOL:e}"))
}

fn size_formulas() -> Check {
    let lp = |p: f64| [(1.0 - p).ln(), p.ln()];
    let mut trees: Vec<(String, Clt)> = Vec::new();
    for v in [2usize, 10, 50] {
        let star = (0..v).map(|i| if i == 0 { None } else { Some(0) }).collect();
        trees.push((format!("star{v}"), Clt::new(0, star, lp(0.3), vec![[lp(0.2), lp(0.7)]; v]).unwrap()));
        let chain = (0..v).map(|i| i.checked_sub(1)).collect();
        trees.push((format!("chain{v}"), Clt::new(0, chain, lp(0.3), vec![[lp(0.2), lp(0.7)]; v]).unwrap()));
    }
    for seed in 0..100u64 {
        trees.push((format!("random{seed}"), random_clt(2 + (seed as usize * 13) % 200, 0.05, seed)));
    }
    for (name, clt) in &trees {
        let v = clt.var_count();
        let internal = (0..v).filter(|&i| !clt.children(i).is_empty()).count();
        let r = validate(&compile_clt(clt).unwrap());
        let got = (r.counts.sums, r.counts.leaves, r.counts.products);
        let want = (2 * (v - 1) + 1, 2 * v, 2 * internal);
        ensure(got == want, || format!("{name}: (sums, leaves, products) {got:?} != {want:?}"))?;
        ensure(r.smooth && r.decomposable && r.is_deterministic(), || format!("{name}: {r:?}"))?;
    }
    Ok(format!("{} trees (star, chain, 100 random): counts exact; smooth, decomposable, deterministic", trees.len()))
}

struct ReferenceRow {
    name: &'static str,
    evi: f64,
    mar: f64,
    mpe: f64,
}

const REFERENCE_ROWS: [ReferenceRow; 3] = [
    ReferenceRow { name: "msweb", evi: -10.10, mar: -5.30, mpe: -6.72 },
    ReferenceRow { name: "bmnist", evi: -135.85, mar: -78.92, mpe: -106.56 },
    ReferenceRow { name: "ad", evi: -15.48, mar: -10.97, mpe: -12.19 },
];

fn workspace_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

/// Loads a manifest dataset, or explains why it is unavailable.
fn load_dataset(name: &str) -> Result<BitMatrix, String> {
    let path = workspace_root().join("datasets/datasets.toml");
    let manifest = Manifest::load(&path).map_err(|e| format!("manifest unavailable: {e}"))?;
    let entry = manifest.get(name).ok_or_else(|| format!("{name} not in manifest"))?;
    let file = manifest.resolve(entry);
    if !file.exists() {
        return Err(format!("{} not present", file.display()));
    }
    manifest.load_dataset(entry).map_err(|e| e.to_string())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn dataset_reproduction() -> Outcome {
    let mut lines = Vec::new();
    let mut missing = Vec::new();
    for row in &REFERENCE_ROWS {
        let data = match load_dataset(row.name) {
            Ok(d) => d,
            Err(why) => {
                missing.push(why);
                continue;
            }
        };
        let clt = fit_clt(&data, SmoothingSpec::default(), None, 1).unwrap();
        let mask = gen_mask(&data, MaskSpec::new(0.5, 0).unwrap());
        let evi = mean(&clt_evi(&clt, &data, 1).unwrap());
        let mar = mean(&clt_mar(&clt, &mask, 1).unwrap());
        let mpe = mean(&clt_mpe(&clt, &mask, 1).unwrap().iter().map(|r| r.log_value).collect::<Vec<_>>());
        let pc = compile_clt(&clt).unwrap();
        if let Err(e) = parity_on(&clt, &pc, &data, &mask, row.name) {
            return Outcome::Fail(e);
        }
        let ok = (evi - row.evi).abs() <= 0.2 && (mar - row.mar).abs() <= 0.5 && (mpe - row.mpe).abs() <= 0.5;
        let line = format!(
            "{}: EVI {evi:.2} (target {} ±0.2), MAR {mar:.2} ({} ±0.5), MPE {mpe:.2} ({} ±0.5)",
            row.name, row.evi, row.mar, row.mpe
        );
        if !ok {
            return Outcome::Fail(line);
        }
        lines.push(line);
    }
    match (lines.is_empty(), missing.is_empty()) {
        (true, _) => Outcome::Skip(format!("no benchmark datasets available ({})", missing.join("; "))),
        (false, true) => Outcome::Pass(lines.join(" | ")),
        (false, false) => Outcome::Pass(format!("{} | skipped: {}", lines.join(" | "), missing.join("; "))),
    }
}

fn performance() -> Outcome {
    let (data, source) = match load_dataset("bmnist") {
        Ok(d) => (d, "bmnist train split"),
        Err(_) => {
            let generator = random_clt(784, 0.05, 784);
            (clt_sample(&generator, 50_000, 1).unwrap(), "synthetic 50000x784 (bmnist absent)")
        }
    };
    let start = Instant::now();
    let clt = fit_clt(&data, SmoothingSpec::default(), None, 1).unwrap();
    let fit_s = start.elapsed().as_secs_f64();
    let pc = compile_clt(&clt).unwrap();
    let mask = gen_mask(&data, MaskSpec::new(0.5, 1).unwrap());
    let engine = Engine::<f32>::new(&pc);
    let start = Instant::now();
    let single = engine.mar(&mask, 1).unwrap();
    let mar1_s = start.elapsed().as_secs_f64();
    let mut detail = format!("{source}: fit {fit_s:.2}s (<= 5), MAR jobs=1 {mar1_s:.2}s (<= 60)");
    if fit_s > 5.0 || mar1_s > 60.0 {
        return Outcome::Fail(detail);
    }
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let start = Instant::now();
    let quad = engine.mar(&mask, 4).unwrap();
    let mar4_s = start.elapsed().as_secs_f64();
    if quad != single {
        return Outcome::Fail("jobs=4 MAR output differs from jobs=1".into());
    }
    let ratio = mar4_s / mar1_s;
    if cores < 4 {
        detail.push_str(&format!(
            "; speedup check SKIPPED: needs a 4-core machine, found {cores} core(s) (jobs=4/jobs=1 = {ratio:.2})"
        ));
        return Outcome::Pass(detail);
    }
    detail.push_str(&format!("; jobs=4 {mar4_s:.2}s, ratio {ratio:.2} (<= 0.6)"));
    if ratio <= 0.6 {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn parallel_determinism() -> Check {
    let generator = random_clt(60, 0.05, 60);
    let data = clt_sample(&generator, 5000, 2).unwrap();
    let mask = gen_mask(&data, MaskSpec::new(0.5, 9).unwrap());
    let run = |jobs: usize| {
        let counts = pairwise_counts(&data, jobs).unwrap();
        let clt = fit_clt(&data, SmoothingSpec::default(), None, jobs).unwrap();
        let pc = compile_clt(&clt).unwrap();
        (
            counts,
            clt.to_json(),
            clt_evi(&clt, &data, jobs).unwrap(),
            clt_mar(&clt, &mask, jobs).unwrap(),
            clt_mpe(&clt, &mask, jobs).unwrap(),
            pc_evi(&pc, &data, jobs).unwrap(),
            pc_mar(&pc, &mask, jobs).unwrap(),
            pc_mpe(&pc, &mask, jobs).unwrap(),
            pc_conditional_sample(&pc, &mask, 4, jobs).unwrap(),
            Engine::<f32>::new(&pc).mar(&mask, jobs).unwrap(),
        )
    };
    let base = run(1);
    for jobs in [2, 4] {
        ensure(run(jobs) == base, || format!("jobs={jobs} output differs from jobs=1"))?;
    }

    // Repeated seeded bench invocations through the binary.
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let csv = dir.path().join("toy.csv");
    treepc::data::write_binary_csv(&data.slice_rows(0, 800).unwrap(), &csv).unwrap();
    let bench = |jobs: &str, tag: &str| -> Result<Vec<String>, String> {
        let report = dir.path().join(format!("report_{tag}.tsv"));
        let status = Command::new(env!("CARGO_BIN_EXE_treepc"))
            .args(["bench", "--runs", "2", "--seed", "7", "--jobs", jobs, "--data"])
            .arg(&csv)
            .arg("--report")
            .arg(&report)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(status.status.success(), || String::from_utf8_lossy(&status.stderr).into_owned())?;
        let text = std::fs::read_to_string(&report).map_err(|e| e.to_string())?;
        Ok(text.lines().skip(1).map(|l| l.rsplit('\t').next().unwrap().to_string()).collect())
    };
    let first = bench("1", "a")?;
    let second = bench("1", "b")?;
    let parallel = bench("4", "c")?;
    ensure(first.len() == 8, || format!("expected 8 report rows, got {}", first.len()))?;
    ensure(first == second && first == parallel, || {
        format!("mean_ll columns differ: {first:?} / {second:?} / {parallel:?}")
    })?;
    Ok("counts, fit and all 7 query outputs bit-identical for jobs 1/2/4; bench mean_ll columns identical across 3 seeded runs".into())
}

fn sampling_statistics() -> Outcome {
    let lp = |p: f64| [(1.0 - p).ln(), p.ln()];
    //      0
    //     / \
    //    1   2
    //   / \   \
    //  3   4   5
    let clt = Clt::new(
        0,
        vec![None, Some(0), Some(0), Some(1), Some(1), Some(2)],
        lp(0.35),
        vec![
            [lp(0.5), lp(0.5)],
            [lp(0.2), lp(0.85)],
            [lp(0.7), lp(0.3)],
            [lp(0.1), lp(0.6)],
            [lp(0.45), lp(0.9)],
            [lp(0.25), lp(0.8)],
        ],
    )
    .unwrap();
    let pc = compile_clt(&clt).unwrap();
    let evidence = [None, Some(1), None, None, Some(0), Some(1)];
    let n = 200_000;
    let batch = MaskedBatch::from_options(&vec![evidence; n]).unwrap();
    let out = pc_conditional_sample(&pc, &batch, 11, 1).unwrap();

    let table = brute_evi_table(&clt).unwrap();
    let row = batch.row(0);
    let log_evidence = mar_from_table(&table, row);
    let mut worst = 0.0f64;
    for var in 0..6 {
        let mut with_one = row.to_vec();
        if with_one[var].value().is_none() {
            with_one[var] = treepc::data::CellState::Obs1;
        }
        let exact = if let Some(b) = row[var].value() {
            b as f64
        } else {
            (mar_from_table(&table, &with_one) - log_evidence).exp()
        };
        let freq = out.completions.count_ones(var) as f64 / n as f64;
        worst = worst.max((freq - exact).abs());
        if (freq - exact).abs() > 0.01 {
            return Outcome::Fail(format!("variable {var}: frequency {freq:.4} vs exact {exact:.4}"));
        }
    }
    let mut detail = format!("V=6 tree, 3 observed, {n} samples: max |freq - exact| {worst:.4} <= 0.01");
    match load_dataset("msweb") {
        Ok(data) => {
            let clt = fit_clt(&data, SmoothingSpec::default(), None, 1).unwrap();
            let pc = compile_clt(&clt).unwrap();
            let mask = gen_mask(&data, MaskSpec::new(0.5, 0).unwrap());
            let s = pc_conditional_sample(&pc, &mask, 0, 1).unwrap();
            let m = mean(&s.log_values);
            detail.push_str(&format!("; msweb C.Sampling mean {m:.2} (target -10.08 ±0.1)"));
            if (m + 10.08).abs() > 0.1 {
                return Outcome::Fail(detail);
            }
        }
        Err(why) => detail.push_str(&format!("; msweb part skipped ({why})")),
    }
    Outcome::Pass(detail)
}

fn precision_modes(suite: &[Instance]) -> Check {
    let mut worst = 0.0f64;
    for (k, inst) in suite.iter().enumerate() {
        let pairs = [
            (clt_evi(&inst.clt, &inst.all, 1).unwrap(), CltEngine::<f32>::new(&inst.clt).evi(&inst.all, 1).unwrap()),
            (clt_mar(&inst.clt, &inst.masks, 1).unwrap(), CltEngine::<f32>::new(&inst.clt).mar(&inst.masks, 1).unwrap()),
            (
                clt_mpe(&inst.clt, &inst.masks, 1).unwrap().iter().map(|r| r.log_value).collect(),
                CltEngine::<f32>::new(&inst.clt).mpe(&inst.masks, 1).unwrap().iter().map(|r| r.log_value).collect(),
            ),
            (pc_evi(&inst.pc, &inst.all, 1).unwrap(), Engine::<f32>::new(&inst.pc).evi(&inst.all, 1).unwrap()),
            (pc_mar(&inst.pc, &inst.masks, 1).unwrap(), Engine::<f32>::new(&inst.pc).mar(&inst.masks, 1).unwrap()),
            (
                pc_mpe(&inst.pc, &inst.masks, 1).unwrap().results.iter().map(|r| r.log_value).collect(),
                Engine::<f32>::new(&inst.pc).mpe(&inst.masks, 1).unwrap().results.iter().map(|r| r.log_value).collect(),
            ),
        ];
        for (wide, narrow) in pairs {
            for (a, b) in wide.iter().zip(&narrow) {
                if a != b {
                    worst = worst.max((a - b).abs());
                }
                ensure(log_close(*a, *b, PRECISION_TOL), || format!("instance {k}: f64 {a} vs f32 {b}"))?;
            }
        }
    }
    Ok(format!("EVI/MAR/MPE on tree and circuit, max |f32 - f64| {worst:.2e} <= {PRECISION_TOL:e}"))
}

fn main() {
    let start = Instant::now();
    let (suite, redraws) = build_suite();
    println!("acceptance suite: {} instances built ({redraws} alpha=0 redraws)", suite.len());
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("oracle equivalence", Box::new(|| oracle_equivalence(&suite).into())),
        ("normalization", Box::new(|| normalization(&suite).into())),
        ("compilation parity", Box::new(|| compilation_parity(&suite).into())),
        ("compiled size formulas", Box::new(|| size_formulas().into())),
        ("dataset reproduction", Box::new(dataset_reproduction)),
        ("performance sanity", Box::new(performance)),
        ("parallel determinism", Box::new(|| parallel_determinism().into())),
        ("sampling statistics", Box::new(sampling_statistics)),
        ("precision modes", Box::new(|| precision_modes(&suite).into())),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        let t = Instant::now();
        let outcome = check();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Outcome::Pass(d) => println!("PASS  {name} [{secs:.1}s]: {d}"),
            Outcome::Skip(d) => println!("SKIP  {name} [{secs:.1}s]: {d}"),
            Outcome::Fail(d) => {
                failed += 1;
                println!("FAIL  {name} [{secs:.1}s]: {d}");
            }
        }
    }
    println!(
        "acceptance: {} criteria, {failed} failed, {:.1}s total",
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

impl From<Check> for Outcome {
    fn from(c: Check) -> Self {
        match c {
            Ok(d) => Outcome::Pass(d),
            Err(d) => Outcome::Fail(d),
        }
    }
}
