//! Dataset tree → one normalized document per sequence plus an index.
//!
//! Output layout:
//!
//! ```text
//! <out>/index.json                      NormalizedIndex
//! <out>/sequences/<sample_id>.json      normalized documents
//! ```

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    export_normalized, import_normalized, parse_skeleton_text, parse_split_index, DatasetProfile,
    IndexEntry, NormalizedSequence,
};
use crate::error::{Error, Result};
use crate::output::{build_output_dir, ensure_parent};
use crate::pipeline::worker_pool;
use crate::sample::id_rel_path;

pub const INDEX_FILE: &str = "index.json";
pub const INDEX_FORMAT: &str = "gestaug-index";
pub const INDEX_VERSION: u32 = 1;

/// Index of an ingested dataset. `sequence_path` of every entry is relative
/// to the directory holding the index and points at a normalized document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedIndex {
    pub format: String,
    pub version: u32,
    pub profile: String,
    pub joint_count: usize,
    pub entries: Vec<IndexEntry>,
}

impl NormalizedIndex {
    pub fn new(profile: &str, joint_count: usize, entries: Vec<IndexEntry>) -> Self {
        NormalizedIndex {
            format: INDEX_FORMAT.into(),
            version: INDEX_VERSION,
            profile: profile.into(),
            joint_count,
            entries,
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let index: NormalizedIndex = serde_json::from_str(&text)
            .map_err(|e| Error::format(path, format!("malformed index: {e}")))?;
        if index.format != INDEX_FORMAT {
            return Err(Error::format(
                path,
                format!("unknown format {:?}", index.format),
            ));
        }
        if index.version != INDEX_VERSION {
            return Err(Error::format(
                path,
                format!(
                    "schema version {} not supported (expected {INDEX_VERSION})",
                    index.version
                ),
            ));
        }
        Ok(index)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }
}

/// A source file that could not be ingested.
#[derive(Debug)]
pub struct IngestFailure {
    pub path: PathBuf,
    pub error: Error,
}

#[derive(Debug)]
pub struct IngestReport {
    pub index: NormalizedIndex,
    pub failures: Vec<IngestFailure>,
}

fn failure(path: &Path, error: Error) -> IngestFailure {
    IngestFailure {
        path: path.to_path_buf(),
        error,
    }
}

/// Ingest a native dataset tree described by `profile`. Missing index files
/// are skipped with a warning; unparsable index files and sequences are
/// reported as failures while everything else is still written.
pub fn ingest_dataset(
    root: &Path,
    profile: &DatasetProfile,
    out_dir: &Path,
    workers: usize,
) -> Result<IngestReport> {
    let scheme = *profile.labels.keys().next().ok_or_else(|| {
        Error::InvalidParameter(format!("profile {} declares no labels", profile.name))
    })?;
    let mut failures = Vec::new();
    let mut rows = Vec::new();
    for name in &profile.index_files {
        let path = root.join(name);
        if !path.is_file() {
            log::warn!("{}: index file not found, skipping", path.display());
            continue;
        }
        match parse_split_index(&path, profile, scheme) {
            Ok(index) => rows.extend(index.entries),
            Err(e) => failures.push(failure(&path, e)),
        }
    }
    let mut seen = BTreeSet::new();
    rows.retain(|e| {
        let fresh = seen.insert(e.sample_id.clone());
        if !fresh {
            failures.push(failure(
                &e.sequence_path,
                Error::InvalidParameter(format!("{} listed more than once", e.sample_id)),
            ));
        }
        fresh
    });
    if rows.is_empty() {
        log::warn!("{}: no sequences found", root.display());
    }

    let load = |e: &IndexEntry| -> std::result::Result<NormalizedSequence, IngestFailure> {
        let path = root.join(&e.sequence_path);
        let sequence =
            parse_skeleton_text(&path, profile.joint_count).map_err(|err| failure(&path, err))?;
        Ok(NormalizedSequence {
            sample_id: e.sample_id.clone(),
            labels: e.labels.clone(),
            subject: e.subject,
            trial: e.trial,
            split: e.split.clone(),
            sequence,
        })
    };
    write_ingested(
        out_dir,
        &profile.name,
        profile.joint_count,
        &rows,
        load,
        workers,
        failures,
    )
}

/// Ingest a tree of already-normalized documents (e.g. converted JHMDB data),
/// walking `root` recursively for `*.json`. Documents whose joint count
/// differs from `joint_count` (or from the first document, when `None`) fail.
pub fn ingest_normalized(
    root: &Path,
    joint_count: Option<usize>,
    out_dir: &Path,
    workers: usize,
) -> Result<IngestReport> {
    let mut files = Vec::new();
    collect_json(root, &mut files)?;
    files.sort();
    if files.is_empty() {
        log::warn!("{}: no normalized documents found", root.display());
    }
    let mut failures = Vec::new();
    let mut docs = Vec::new();
    for path in &files {
        match import_normalized(path) {
            Ok(doc) => docs.push((path.clone(), doc)),
            Err(e) => failures.push(failure(path, e)),
        }
    }
    let joints = joint_count
        .or_else(|| docs.first().map(|(_, d)| d.sequence.joint_count()))
        .unwrap_or(0);
    let mut seen = BTreeSet::new();
    let mut rows = Vec::new();
    let mut by_id = std::collections::BTreeMap::new();
    for (path, doc) in docs {
        if doc.sequence.joint_count() != joints {
            failures.push(failure(
                &path,
                Error::InvalidParameter(format!(
                    "{} joints per frame, expected {joints}",
                    doc.sequence.joint_count()
                )),
            ));
            continue;
        }
        if !seen.insert(doc.sample_id.clone()) {
            failures.push(failure(
                &path,
                Error::InvalidParameter(format!("duplicate sample id {}", doc.sample_id)),
            ));
            continue;
        }
        rows.push(IndexEntry {
            sample_id: doc.sample_id.clone(),
            sequence_path: path.strip_prefix(root).unwrap_or(&path).to_path_buf(),
            labels: doc.labels.clone(),
            gesture: None,
            finger: None,
            subject: doc.subject,
            trial: doc.trial,
            split: doc.split.clone(),
        });
        by_id.insert(doc.sample_id.clone(), doc);
    }
    let load = |e: &IndexEntry| Ok(by_id[&e.sample_id].clone());
    write_ingested(
        out_dir,
        "normalized",
        joints,
        &rows,
        load,
        workers,
        failures,
    )
}

fn collect_json(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    if !dir.exists() {
        return Ok(());
    }
    for item in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = item.map_err(|e| Error::io(dir, e))?.path();
        if path.is_dir() {
            collect_json(&path, out)?;
        } else if path.extension().is_some_and(|x| x == "json") {
            out.push(path);
        }
    }
    Ok(())
}

fn write_ingested(
    out_dir: &Path,
    profile: &str,
    joint_count: usize,
    rows: &[IndexEntry],
    load: impl Fn(&IndexEntry) -> std::result::Result<NormalizedSequence, IngestFailure> + Sync,
    workers: usize,
    mut failures: Vec<IngestFailure>,
) -> Result<IngestReport> {
    build_output_dir(out_dir, INDEX_FILE, |staging| {
        let pool = worker_pool(workers)?;
        let results: Vec<std::result::Result<IndexEntry, IngestFailure>> = pool.install(|| {
            rows.par_iter()
                .map(|row| {
                    let doc = load(row)?;
                    let rel = id_rel_path("sequences", &row.sample_id, ".json")
                        .map_err(|e| failure(&row.sequence_path, e))?;
                    let dst = staging.join(&rel);
                    ensure_parent(&dst)
                        .and_then(|_| export_normalized(&dst, &doc))
                        .map_err(|e| failure(&row.sequence_path, e))?;
                    Ok(IndexEntry {
                        sequence_path: rel,
                        ..row.clone()
                    })
                })
                .collect()
        });
        let mut entries = Vec::new();
        for r in results {
            match r {
                Ok(e) => entries.push(e),
                Err(f) => failures.push(f),
            }
        }
        entries.sort_by(|a, b| a.sample_id.cmp(&b.sample_id));
        let index = NormalizedIndex::new(profile, joint_count, entries);
        index.write(&staging.join(INDEX_FILE))?;
        Ok(IngestReport {
            index,
            failures: std::mem::take(&mut failures),
        })
    })
}
