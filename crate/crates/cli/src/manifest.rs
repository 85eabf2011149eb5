//! Replayable run manifests.

use std::fs;
use std::path::{Path, PathBuf};

use harp_core::eval::{curves_csv, evaluate, EvalConfig};
use harp_core::io::format_embedding;
use harp_core::pipeline::{run_mode, HarpConfig, Mode, PhaseTimings, RunOutput, SampleBudget};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::args::{ReplayArgs, RunArgs};
use crate::error::{CliError, CliResult, Context};
use crate::{load_graph, load_label_file};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub input: PathBuf,
    pub labels: Option<PathBuf>,
    pub mode: Mode,
    pub config: HarpConfig,
    pub eval: Option<EvalConfig>,
    pub ratios: Vec<f64>,
    #[serde(default)]
    pub skip_unknown_labels: bool,
    pub budget: SampleBudget,
    pub executed_samples: u64,
    pub timings: PhaseTimings,
    pub embedding: PathBuf,
    pub embedding_sha256: String,
    pub report: Option<PathBuf>,
}

pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn absolute(p: &Path) -> PathBuf {
    fs::canonicalize(p).unwrap_or_else(|_| p.to_path_buf())
}

impl RunManifest {
    pub fn new(input: &Path, mode: Mode, config: &HarpConfig, out: &RunOutput, embedding: &Path, text: &str) -> Self {
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            input: absolute(input),
            labels: None,
            mode,
            config: config.clone(),
            eval: None,
            ratios: Vec::new(),
            skip_unknown_labels: false,
            budget: out.budget.clone(),
            executed_samples: out.executed_samples,
            timings: out.timings,
            embedding: absolute(embedding),
            embedding_sha256: sha256_hex(text),
            report: None,
        }
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        fs::write(path, serde_json::to_string_pretty(self)?).ctx("io")
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path).ctx("io")?)?)
    }
}

pub fn cmd_run(a: RunArgs) -> CliResult<()> {
    let g = load_graph(&a.input)?;
    let config = a.train.harp_config(a.method, a.seed.seed);
    fs::create_dir_all(&a.out_dir).ctx("io")?;
    let out = run_mode(&g, &config, a.mode).ctx("pipeline")?;
    let text = format_embedding(&out.embedding, |u| g.external_id(u));
    let emb_path = a.out_dir.join("embedding.txt");
    fs::write(&emb_path, &text).ctx("io")?;
    let mut manifest = RunManifest::new(&a.input, a.mode, &config, &out, &emb_path, &text);

    if let Some(labels_path) = &a.labels {
        let labels = load_label_file(labels_path, &g, a.eval.skip_unknown)?;
        let eval = a.eval.config(a.seed.seed);
        let name = match a.mode {
            Mode::Baseline => a.method.name().to_string(),
            Mode::Harp => harp_core::eval::harp_name(a.method),
        };
        let mut reports = Vec::new();
        for &ratio in &a.eval.ratios {
            let r = evaluate(&name, &out.embedding, &labels, ratio, &eval).ctx("evaluation")?;
            eprintln!("{name} ratio {ratio}: macro-F1 {:.4}", r.mean);
            reports.push(r);
        }
        let report_path = a.out_dir.join("report.csv");
        fs::write(&report_path, curves_csv(&reports)).ctx("io")?;
        manifest.labels = Some(absolute(labels_path));
        manifest.eval = Some(eval);
        manifest.ratios = a.eval.ratios.clone();
        manifest.skip_unknown_labels = a.eval.skip_unknown;
        manifest.report = Some(absolute(&report_path));
    }
    manifest.write(&a.out_dir.join("manifest.json"))?;
    eprintln!(
        "{} samples (budget {}), embedding sha256 {}",
        out.executed_samples, out.budget.total, manifest.embedding_sha256
    );
    Ok(())
}

pub fn cmd_replay(a: ReplayArgs) -> CliResult<()> {
    let m = RunManifest::read(&a.manifest)?;
    let g = load_graph(&m.input)?;
    let out = run_mode(&g, &m.config, m.mode).ctx("pipeline")?;
    let text = format_embedding(&out.embedding, |u| g.external_id(u));
    if let Some(path) = &a.output {
        fs::write(path, &text).ctx("io")?;
    }
    let digest = sha256_hex(&text);
    if digest != m.embedding_sha256 {
        return Err(CliError::ReplayMismatch {
            expected: m.embedding_sha256,
            actual: digest,
        });
    }
    println!("replay ok: {digest}");
    Ok(())
}
