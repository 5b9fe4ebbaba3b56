//! Corpus benchmark: one row per (image, payload, mode) plus per-payload
//! means.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use mdrdh::metrics::{format_psnr, EvalReport};
use mdrdh::pipeline::{embed, extract, Mode};
use rayon::prelude::*;

use crate::payload::{random_bits, PRNG_NAME};

/// One benchmark measurement, in CSV column order.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub image: String,
    pub qf: String,
    pub payload_bits: usize,
    pub mode: String,
    pub l1: usize,
    pub l2: usize,
    pub expansion_bits: i64,
    pub expansion_excl_sideinfo_bits: i64,
    pub psnr_db: f64,
    pub elapsed_ms: Option<f64>,
    pub reversibility: bool,
}

pub const HEADER: [&str; 13] = [
    "image",
    "qf",
    "payload_bits",
    "mode",
    "l1",
    "l2",
    "expansion_bits",
    "expansion_excl_sideinfo_bits",
    "psnr_db",
    "elapsed_ms",
    "reversibility",
    "prng",
    "seed",
];

pub const AGGREGATE_HEADER: [&str; 8] = [
    "qf",
    "mode",
    "payload_bits",
    "images",
    "mean_expansion_bits",
    "mean_expansion_excl_sideinfo_bits",
    "mean_psnr_db",
    "failures",
];

pub struct BenchConfig {
    pub corpus: PathBuf,
    pub payloads: Vec<usize>,
    pub modes: Vec<Mode>,
    pub qf: Option<String>,
    pub seed: u64,
    pub timing: bool,
}

/// A (image, payload, mode) combination that produced no row.
pub struct Skipped {
    pub image: String,
    pub payload_bits: usize,
    pub mode: Mode,
    pub reason: String,
}

pub struct BenchResult {
    pub qf: String,
    pub rows: Vec<Row>,
    pub skipped: Vec<Skipped>,
}

/// Quality label from the first path component named `qfNN`, innermost first.
pub fn qf_from_path(path: &Path) -> Option<String> {
    path.components().rev().find_map(|c| {
        let s = c.as_os_str().to_str()?.to_ascii_lowercase();
        let digits = s.strip_prefix("qf")?;
        (!digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())).then(|| digits.to_string())
    })
}

fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| e.eq_ignore_ascii_case("jpg") || e.eq_ignore_ascii_case("jpeg"))
        })
        .collect();
    files.sort();
    Ok(files)
}

fn measure(name: &str, bytes: &[u8], qf: &str, bits: &[bool], mode: Mode, timing: bool) -> Result<Row, String> {
    let start = Instant::now();
    let (marked, report) = embed(bytes, bits, mode).map_err(|e| e.name().to_string())?;
    let elapsed = start.elapsed().as_secs_f64() * 1000.0;
    let reversibility = match extract(&marked) {
        Ok((payload, restored)) => payload == bits && restored == bytes,
        Err(_) => false,
    };
    let eval = EvalReport::evaluate(bytes, &marked, bits.len(), qf).map_err(|e| e.name().to_string())?;
    Ok(Row {
        image: name.to_string(),
        qf: qf.to_string(),
        payload_bits: bits.len(),
        mode: mode.to_string(),
        l1: report.l1(),
        l2: report.l2(),
        expansion_bits: eval.expansion_bits,
        expansion_excl_sideinfo_bits: eval.expansion_excl_sideinfo_bits,
        psnr_db: eval.psnr_db,
        elapsed_ms: timing.then_some(elapsed),
        reversibility,
    })
}

pub fn run(cfg: &BenchConfig) -> Result<BenchResult> {
    let qf = cfg.qf.clone().or_else(|| qf_from_path(&cfg.corpus)).unwrap_or_else(|| "unknown".into());
    let files = corpus_files(&cfg.corpus)?;
    let images: Vec<(String, Vec<u8>)> = files
        .iter()
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            fs::read(p).map(|b| (name, b)).with_context(|| format!("reading {}", p.display()))
        })
        .collect::<Result<_>>()?;
    let payloads: Vec<Vec<bool>> = cfg.payloads.iter().map(|&n| random_bits(n, cfg.seed)).collect();
    let jobs: Vec<(usize, usize, Mode)> = (0..images.len())
        .flat_map(|i| (0..payloads.len()).flat_map(move |j| cfg.modes.iter().map(move |&m| (i, j, m))))
        .collect();
    let outcomes: Vec<Result<Row, String>> = jobs
        .par_iter()
        .map(|&(i, j, mode)| measure(&images[i].0, &images[i].1, &qf, &payloads[j], mode, cfg.timing))
        .collect();
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (&(i, j, mode), outcome) in jobs.iter().zip(outcomes) {
        match outcome {
            Ok(row) => rows.push(row),
            Err(reason) => skipped.push(Skipped {
                image: images[i].0.clone(),
                payload_bits: cfg.payloads[j],
                mode,
                reason,
            }),
        }
    }
    Ok(BenchResult { qf, rows, skipped })
}

fn fmt_ms(v: Option<f64>) -> String {
    v.map_or_else(String::new, |ms| format!("{ms:.3}"))
}

pub fn write_rows(path: &Path, rows: &[Row], seed: u64) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record([
            r.image.clone(),
            r.qf.clone(),
            r.payload_bits.to_string(),
            r.mode.clone(),
            r.l1.to_string(),
            r.l2.to_string(),
            r.expansion_bits.to_string(),
            r.expansion_excl_sideinfo_bits.to_string(),
            format_psnr(r.psnr_db),
            fmt_ms(r.elapsed_ms),
            if r.reversibility { "pass" } else { "fail" }.to_string(),
            PRNG_NAME.to_string(),
            seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Per (mode, payload) means, in the order modes and payloads were given.
pub fn write_aggregate(path: &Path, result: &BenchResult, cfg: &BenchConfig) -> Result<()> {
    let mut groups: BTreeMap<(usize, usize), Vec<&Row>> = BTreeMap::new();
    for r in &result.rows {
        let m = cfg.modes.iter().position(|m| m.as_str() == r.mode).unwrap();
        let p = cfg.payloads.iter().position(|&p| p == r.payload_bits).unwrap();
        groups.entry((m, p)).or_default().push(r);
    }
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(AGGREGATE_HEADER)?;
    for (mi, mode) in cfg.modes.iter().enumerate() {
        for (pi, &payload) in cfg.payloads.iter().enumerate() {
            let rows = groups.get(&(mi, pi)).map(Vec::as_slice).unwrap_or(&[]);
            let failures = result.skipped.iter().filter(|s| s.mode == *mode && s.payload_bits == payload).count()
                + rows.iter().filter(|r| !r.reversibility).count();
            let n = rows.len();
            let mean = |f: &dyn Fn(&Row) -> f64| {
                if n == 0 {
                    String::new()
                } else {
                    let v = rows.iter().map(|r| f(r)).sum::<f64>() / n as f64;
                    if v.is_infinite() { "inf".to_string() } else { format!("{v:.3}") }
                }
            };
            w.write_record([
                result.qf.clone(),
                mode.to_string(),
                payload.to_string(),
                n.to_string(),
                mean(&|r| r.expansion_bits as f64),
                mean(&|r| r.expansion_excl_sideinfo_bits as f64),
                mean(&|r| r.psnr_db),
                failures.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
