//! Sample CSV files and the diagnostics document.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use geohmc::sampler::summarize;
use geohmc::{ChainResult, DMatrix};
use serde::Serialize;

use crate::spec::RunSpec;

pub const SCHEMA_VERSION: &str = "v1";

#[derive(Debug, Serialize)]
pub struct DeltaHSummary {
    /// Statistics over finite values only.
    pub mean: Option<f64>,
    pub mean_abs: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub non_finite: usize,
}

impl DeltaHSummary {
    fn new(values: &[f64]) -> Self {
        let finite: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
        let n = finite.len() as f64;
        let some = |x: f64| (!finite.is_empty()).then_some(x);
        Self {
            mean: some(finite.iter().sum::<f64>() / n),
            mean_abs: some(finite.iter().map(|x| x.abs()).sum::<f64>() / n),
            min: some(finite.iter().copied().fold(f64::INFINITY, f64::min)),
            max: some(finite.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
            non_finite: values.len() - finite.len(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ChainSummary {
    pub chain: usize,
    pub samples_file: String,
    pub accept_rate: f64,
    pub divergence_count: usize,
    pub mean: Vec<f64>,
    pub ess: Vec<Option<f64>>,
}

#[derive(Debug, Serialize)]
pub struct DiagnosticsDoc {
    pub schema_version: &'static str,
    pub target: String,
    pub dim: usize,
    pub seed: u64,
    pub chains: usize,
    pub num_samples: usize,
    pub accept_rate: f64,
    pub delta_h: DeltaHSummary,
    pub divergence_count: usize,
    pub mean: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    /// Summed over chains; `null` when a chain is too short to estimate.
    pub ess: Vec<Option<f64>>,
    pub wall_time: f64,
    pub per_chain: Vec<ChainSummary>,
}

fn write_csv(path: &Path, samples: &DMatrix<f64>) -> io::Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    let header: Vec<String> = (1..=samples.ncols()).map(|i| format!("q{i}")).collect();
    writeln!(w, "{}", header.join(","))?;
    for row in samples.row_iter() {
        let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()
}

/// Writes one CSV per chain (a single `<prefix>.csv` for one chain) and the
/// merged `<prefix>.diagnostics.json`.
pub fn write_outputs(dir: &Path, run: &RunSpec, results: &[ChainResult], wall_time: f64) -> io::Result<DiagnosticsDoc> {
    fs::create_dir_all(dir)?;
    let n = run.model.dim();
    let mut per_chain = Vec::with_capacity(results.len());
    for (k, r) in results.iter().enumerate() {
        let name = if results.len() == 1 { format!("{}.csv", run.prefix) } else { format!("{}.chain{k}.csv", run.prefix) };
        write_csv(&dir.join(&name), &r.samples)?;
        per_chain.push(ChainSummary {
            chain: k,
            samples_file: name,
            accept_rate: r.accept_rate,
            divergence_count: r.divergence_count,
            mean: r.diagnostics.mean.iter().copied().collect(),
            ess: r.diagnostics.ess.clone(),
        });
    }

    let rows: usize = results.iter().map(|r| r.samples.nrows()).sum();
    let mut pooled = DMatrix::zeros(rows, n);
    let mut offset = 0;
    for r in results {
        pooled.rows_mut(offset, r.samples.nrows()).copy_from(&r.samples);
        offset += r.samples.nrows();
    }
    let merged = summarize(&pooled);
    let ess = (0..n)
        .map(|i| results.iter().map(|r| r.diagnostics.ess[i]).sum::<Option<f64>>())
        .collect();
    let all_dh: Vec<f64> = results.iter().flat_map(|r| r.delta_h.iter().copied()).collect();
    let accepted: usize = results.iter().map(|r| r.accepted.iter().filter(|&&a| a).count()).sum();

    let doc = DiagnosticsDoc {
        schema_version: SCHEMA_VERSION,
        target: run.model.name().to_string(),
        dim: n,
        seed: run.chain.seed,
        chains: results.len(),
        num_samples: run.chain.num_samples,
        accept_rate: accepted as f64 / rows.max(1) as f64,
        delta_h: DeltaHSummary::new(&all_dh),
        divergence_count: results.iter().map(|r| r.divergence_count).sum(),
        mean: merged.mean.iter().copied().collect(),
        covariance: (0..n).map(|i| (0..n).map(|j| merged.covariance[(i, j)]).collect()).collect(),
        ess,
        wall_time,
        per_chain,
    };
    let json = serde_json::to_string_pretty(&doc).map_err(io::Error::other)?;
    fs::write(dir.join(format!("{}.diagnostics.json", run.prefix)), json + "\n")?;
    Ok(doc)
}
