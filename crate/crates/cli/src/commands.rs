//! One function per subcommand. Each returns the text to print and the exit
//! code; hard errors come back as [`CliError`].

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use gestaug::baselines::{mix_dataset, MixConfig};
use gestaug::datasets::{ingest_dataset, ingest_normalized, IngestFailure, IngestReport};
use gestaug::pipeline::{
    augment_dataset, render_dataset, verify_manifest, AugmentConfig, Manifest, Rederive,
    RenderConfig, MANIFEST_FILE,
};
use gestaug::report::{param_stats, summarize, summarize_with_images};
use gestaug::Error;
use sha2::{Digest, Sha256};

use crate::config::IngestSource;
use crate::error::{CliError, ExitCode};

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// Report for stdout.
    pub text: String,
    /// Per-item problems for stderr.
    pub problems: Vec<String>,
    pub code: ExitCode,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome {
            text,
            problems: Vec::new(),
            code: ExitCode::Success,
        }
    }
}

/// Accept either a manifest file or the directory holding `manifest.jsonl`.
/// Returns the manifest and the root its image paths are relative to.
pub fn load_manifest(path: &Path) -> Result<(Manifest, PathBuf), CliError> {
    let file = if path.is_dir() {
        path.join(MANIFEST_FILE)
    } else {
        path.to_path_buf()
    };
    let manifest = Manifest::read(&file)?;
    let root = file
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    Ok((manifest, root))
}

fn failure_code<'a>(mut errors: impl Iterator<Item = &'a Error>) -> ExitCode {
    errors
        .next()
        .map_or(ExitCode::Success, |e| ExitCode::for_class(e.class()))
}

pub fn cmd_ingest(
    dataset_dir: &Path,
    source: &IngestSource,
    out: &Path,
    workers: usize,
) -> Result<Outcome, CliError> {
    if !dataset_dir.is_dir() {
        return Err(CliError::runtime(format!(
            "{}: not a directory",
            dataset_dir.display()
        )));
    }
    let (report, profile): (IngestReport, String) = match source {
        IngestSource::Native(p) => (
            ingest_dataset(dataset_dir, p, out, workers)?,
            p.name.clone(),
        ),
        IngestSource::Normalized { joint_count } => (
            ingest_normalized(dataset_dir, *joint_count, out, workers)?,
            "normalized".into(),
        ),
    };
    let index = &report.index;
    let mut text = format!(
        "ingested {} sequences ({profile}, {} joints) into {}\n",
        index.entries.len(),
        index.joint_count,
        out.display()
    );
    let mut splits = std::collections::BTreeMap::<&str, usize>::new();
    for e in &index.entries {
        *splits.entry(e.split.as_deref().unwrap_or("-")).or_default() += 1;
    }
    for (split, n) in splits {
        let _ = writeln!(text, "split {split}: {n}");
    }
    if !report.failures.is_empty() {
        let _ = writeln!(text, "failed: {}", report.failures.len());
    }
    let problems = report
        .failures
        .iter()
        .map(|IngestFailure { path, error }| format!("{}: {error}", path.display()))
        .collect();
    Ok(Outcome {
        text,
        problems,
        code: failure_code(report.failures.iter().map(|f| &f.error)),
    })
}

pub fn cmd_render(
    index_dir: &Path,
    config: &RenderConfig,
    out: &Path,
) -> Result<Outcome, CliError> {
    let report = render_dataset(index_dir, config, out)?;
    let mut text = format!(
        "rendered {} sequences ({} view, {}x{}) into {}\n",
        report.manifest.entries.len(),
        config.view,
        config.settings.width,
        config.settings.height,
        out.display()
    );
    if !report.failures.is_empty() {
        let _ = writeln!(text, "failed: {}", report.failures.len());
    }
    Ok(Outcome {
        text,
        problems: report
            .failures
            .iter()
            .map(|(id, e)| format!("{id}: {e}"))
            .collect(),
        code: failure_code(report.failures.iter().map(|(_, e)| e)),
    })
}

pub fn cmd_augment(
    manifest: &Path,
    config: &AugmentConfig,
    out: &Path,
) -> Result<Outcome, CliError> {
    let (input, root) = load_manifest(manifest)?;
    let start = Instant::now();
    let result = augment_dataset(&input, &root, out, config)?;
    let secs = start.elapsed().as_secs_f64();
    let originals = result.original_entries().count();
    let t = config.chain.toggles;
    let on: Vec<&str> = [
        (t.crop, "crop"),
        (t.rotate, "rotate"),
        (t.zoom, "zoom"),
        (t.brightness_contrast, "brightness-contrast"),
    ]
    .iter()
    .filter(|(enabled, _)| *enabled)
    .map(|(_, name)| *name)
    .collect();
    let text = format!(
        "augmented {originals} originals into {} entries in {secs:.2}s\nseed {} copies {} transforms [{}]\nwrote {}\n",
        result.entries.len(),
        config.global_seed,
        config.copies,
        on.join(", "),
        out.join(MANIFEST_FILE).display()
    );
    Ok(Outcome::ok(text))
}

pub fn cmd_baseline(manifest: &Path, config: &MixConfig, out: &Path) -> Result<Outcome, CliError> {
    let (input, root) = load_manifest(manifest)?;
    let mixed = mix_dataset(&input, &root, out, config)?;
    let mean = if mixed.entries.is_empty() {
        0.0
    } else {
        mixed.entries.iter().map(|e| e.lambda).sum::<f64>() / mixed.entries.len() as f64
    };
    Ok(Outcome::ok(format!(
        "{:?}: {} mixed samples, mean lambda {mean:.4}, seed {}\nwrote {}\n",
        config.method,
        mixed.entries.len(),
        config.seed,
        out.display()
    )))
}

/// Summary and parameter statistics. With `csv_dir`, also writes
/// `classes.csv`, `params.csv` and `histograms.csv` there.
pub fn cmd_stats(
    manifest: &Path,
    csv_dir: Option<&Path>,
    read_images: bool,
) -> Result<Outcome, CliError> {
    let (m, root) = load_manifest(manifest)?;
    let summary = if read_images {
        summarize_with_images(&m, &root)?
    } else {
        summarize(&m)
    };
    let params = param_stats(&m);
    let mut text = summary.to_text();
    text.push('\n');
    text.push_str(&params.to_text());
    if let Some(dir) = csv_dir {
        fs::create_dir_all(dir).map_err(|e| CliError::from(Error::io(dir, e)))?;
        for (name, body) in [
            ("classes.csv", summary.class_csv()),
            ("params.csv", params.summary_csv()),
            ("histograms.csv", params.histogram_csv()),
        ] {
            let path = dir.join(name);
            fs::write(&path, body).map_err(|e| CliError::from(Error::io(&path, e)))?;
        }
        let _ = writeln!(text, "wrote CSV reports to {}", dir.display());
    }
    let problems: Vec<String> = params
        .violating_entries
        .iter()
        .map(|id| format!("{id}: parameter out of range"))
        .collect();
    let code = if params.violations > 0 || params.missing_params > 0 {
        ExitCode::Verify
    } else {
        ExitCode::Success
    };
    Ok(Outcome {
        text,
        problems,
        code,
    })
}

pub fn cmd_verify(manifest: &Path, rederive: Rederive) -> Result<Outcome, CliError> {
    let (m, root) = load_manifest(manifest)?;
    let report = verify_manifest(&m, &root, rederive);
    let status = if report.is_ok() {
        "ok".to_string()
    } else {
        format!("{} violations", report.violations.len())
    };
    Ok(Outcome {
        text: format!(
            "checked {} entries, replayed {}: {status}\n",
            report.checked_entries, report.replayed
        ),
        problems: report.violations.iter().map(ToString::to_string).collect(),
        code: if report.is_ok() {
            ExitCode::Success
        } else {
            ExitCode::Verify
        },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRun {
    pub workers: usize,
    pub seconds: f64,
    pub inputs: usize,
    pub outputs: usize,
    /// SHA-256 of the written manifest, which records every image digest.
    pub manifest_sha256: String,
}

impl BenchRun {
    pub fn inputs_per_sec(&self) -> f64 {
        if self.seconds > 0.0 {
            self.inputs as f64 / self.seconds
        } else {
            0.0
        }
    }
}

/// Full augmentation of `manifest` once per worker count, into scratch
/// directories that are removed afterwards.
pub fn bench_runs(
    manifest: &Path,
    config: &AugmentConfig,
    worker_counts: &[usize],
    scratch: Option<&Path>,
) -> Result<Vec<BenchRun>, CliError> {
    let (input, root) = load_manifest(manifest)?;
    let inputs = input.original_entries().count();
    let tmp = match scratch {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| CliError::from(Error::io(dir, e)))?;
            tempfile::tempdir_in(dir)
        }
        None => tempfile::tempdir(),
    }
    .map_err(|e| CliError::runtime(format!("scratch directory: {e}")))?;
    let mut runs = Vec::new();
    for (i, &workers) in worker_counts.iter().enumerate() {
        let out = tmp.path().join(format!("run{i}"));
        let cfg = AugmentConfig { workers, ..*config };
        let start = Instant::now();
        let result = augment_dataset(&input, &root, &out, &cfg)?;
        let seconds = start.elapsed().as_secs_f64();
        let path = out.join(MANIFEST_FILE);
        let bytes = fs::read(&path).map_err(|e| CliError::from(Error::io(&path, e)))?;
        runs.push(BenchRun {
            workers,
            seconds,
            inputs,
            outputs: result.entries.len(),
            manifest_sha256: hex::encode(Sha256::digest(&bytes)),
        });
        fs::remove_dir_all(&out).map_err(|e| CliError::from(Error::io(&out, e)))?;
    }
    Ok(runs)
}

pub fn cmd_bench(
    manifest: &Path,
    config: &AugmentConfig,
    worker_counts: &[usize],
    scratch: Option<&Path>,
) -> Result<Outcome, CliError> {
    if worker_counts.is_empty() {
        return Err(CliError::config("no worker counts to benchmark"));
    }
    let runs = bench_runs(manifest, config, worker_counts, scratch)?;
    let mut text = format!(
        "{} inputs, {} copies each, {} cores available\n",
        runs[0].inputs,
        config.copies,
        std::thread::available_parallelism().map_or(1, |n| n.get())
    );
    let _ = writeln!(
        text,
        "{:>7} {:>10} {:>12} {:>12} {:>8}  manifest sha256",
        "workers", "wall s", "inputs/s", "outputs/s", "speedup"
    );
    let base = runs[0].seconds;
    for r in &runs {
        let speedup = if r.seconds > 0.0 {
            base / r.seconds
        } else {
            1.0
        };
        let outputs_per_sec = if r.seconds > 0.0 {
            r.outputs as f64 / r.seconds
        } else {
            0.0
        };
        let _ = writeln!(
            text,
            "{:>7} {:>10.3} {:>12.1} {:>12.1} {:>8.2}  {}",
            r.workers,
            r.seconds,
            r.inputs_per_sec(),
            outputs_per_sec,
            speedup,
            r.manifest_sha256
        );
    }
    let identical = runs
        .iter()
        .all(|r| r.manifest_sha256 == runs[0].manifest_sha256);
    let _ = writeln!(
        text,
        "outputs identical across worker counts: {}",
        if identical { "yes" } else { "NO" }
    );
    Ok(Outcome {
        text,
        problems: Vec::new(),
        code: if identical {
            ExitCode::Success
        } else {
            ExitCode::Verify
        },
    })
}
