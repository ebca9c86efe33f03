//! Dataset summaries, manifest diffs, parameter statistics and golden files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::png_dims;
use crate::pipeline::Manifest;
use crate::sample::Origin;
use crate::transforms::{
    AugmentationParams, BETA_RANGE, GAMMA_RANGE, OFFSET_RANGE, THETA_RANGE, ZETA_RANGE,
};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClassCounts {
    pub original: usize,
    pub total: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DatasetSummary {
    pub total: usize,
    pub originals: usize,
    pub augmented: usize,
    pub per_class: BTreeMap<usize, ClassCounts>,
    pub per_split: BTreeMap<String, usize>,
    /// `(width, height, channels)` → image count; empty unless images were read.
    pub dims: BTreeMap<(usize, usize, usize), usize>,
}

impl DatasetSummary {
    /// Augmented images per original, if there are any originals.
    pub fn augmented_ratio(&self) -> Option<f64> {
        (self.originals > 0).then(|| self.augmented as f64 / self.originals as f64)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "entries: {} (original {}, augmented {})",
            self.total, self.originals, self.augmented
        );
        if let Some(r) = self.augmented_ratio() {
            let _ = writeln!(s, "augmented:original = {r}:1");
        }
        for (split, n) in &self.per_split {
            let _ = writeln!(s, "split {split}: {n}");
        }
        for ((w, h, c), n) in &self.dims {
            let _ = writeln!(s, "size {w}x{h}x{c}: {n}");
        }
        s
    }

    pub fn class_csv(&self) -> String {
        let mut s = String::from("class,original,total\n");
        for (c, n) in &self.per_class {
            let _ = writeln!(s, "{c},{},{}", n.original, n.total);
        }
        s
    }
}

pub fn summarize(manifest: &Manifest) -> DatasetSummary {
    let mut out = DatasetSummary {
        total: manifest.entries.len(),
        ..Default::default()
    };
    for e in &manifest.entries {
        let class = out.per_class.entry(e.label.class_index()).or_default();
        class.total += 1;
        if e.origin == Origin::Original {
            out.originals += 1;
            class.original += 1;
        } else {
            out.augmented += 1;
        }
        let split = e.split.clone().unwrap_or_else(|| "-".into());
        *out.per_split.entry(split).or_default() += 1;
    }
    out
}

/// [`summarize`] plus the image size histogram, read from PNG headers under `root`.
pub fn summarize_with_images(manifest: &Manifest, root: &Path) -> Result<DatasetSummary> {
    let mut out = summarize(manifest);
    for e in &manifest.entries {
        let d = png_dims(&root.join(&e.image_path)).map_err(|err| err.in_sample(&e.sample_id))?;
        *out.dims.entry(d).or_default() += 1;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ManifestDiff {
    /// Present only in the second manifest.
    Added(String),
    /// Present only in the first manifest.
    Removed(String),
    DigestMismatch {
        sample_id: String,
        a: String,
        b: String,
    },
}

impl ManifestDiff {
    pub fn sample_id(&self) -> &str {
        match self {
            ManifestDiff::Added(id) | ManifestDiff::Removed(id) => id,
            ManifestDiff::DigestMismatch { sample_id, .. } => sample_id,
        }
    }
}

pub fn diff_manifests(a: &Manifest, b: &Manifest) -> Vec<ManifestDiff> {
    let (ma, mb) = (a.by_id(), b.by_id());
    let mut out = Vec::new();
    for (id, ea) in &ma {
        match mb.get(id) {
            None => out.push(ManifestDiff::Removed(id.to_string())),
            Some(eb) if eb.content_digest != ea.content_digest => {
                out.push(ManifestDiff::DigestMismatch {
                    sample_id: id.to_string(),
                    a: ea.content_digest.clone(),
                    b: eb.content_digest.clone(),
                })
            }
            Some(_) => {}
        }
    }
    out.extend(
        mb.keys()
            .filter(|id| !ma.contains_key(*id))
            .map(|id| ManifestDiff::Added(id.to_string())),
    );
    out.sort();
    out
}

pub const HISTOGRAM_BINS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct FieldStats {
    pub name: &'static str,
    pub range: (f64, f64),
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// Equal-width bins over `range`; out-of-range values are not binned.
    pub histogram: Vec<usize>,
}

impl FieldStats {
    fn new(name: &'static str, range: (f64, f64), bins: usize) -> Self {
        FieldStats {
            name,
            range,
            count: 0,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
            mean: 0.0,
            histogram: vec![0; bins],
        }
    }

    fn add(&mut self, v: f64) {
        self.count += 1;
        self.min = self.min.min(v);
        self.max = self.max.max(v);
        self.mean += (v - self.mean) / self.count as f64;
        let (lo, hi) = self.range;
        if v >= lo && v <= hi {
            let bins = self.histogram.len();
            let i = (((v - lo) / (hi - lo)) * bins as f64) as usize;
            self.histogram[i.min(bins - 1)] += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamStats {
    pub fields: Vec<FieldStats>,
    /// Augmented entries with at least one out-of-range parameter.
    pub violating_entries: Vec<String>,
    /// Number of individual out-of-range values.
    pub violations: usize,
    pub missing_params: usize,
}

pub fn param_stats(manifest: &Manifest) -> ParamStats {
    let mut fields = vec![
        FieldStats::new("crop_scale", (0.875, 0.975), 2),
        FieldStats::new("crop_offset_x", OFFSET_RANGE, HISTOGRAM_BINS),
        FieldStats::new("crop_offset_y", OFFSET_RANGE, HISTOGRAM_BINS),
        FieldStats::new("theta_deg", THETA_RANGE, HISTOGRAM_BINS),
        FieldStats::new("zeta", ZETA_RANGE, HISTOGRAM_BINS),
        FieldStats::new("beta", BETA_RANGE, HISTOGRAM_BINS),
        FieldStats::new("gamma", GAMMA_RANGE, HISTOGRAM_BINS),
    ];
    let mut stats = ParamStats {
        fields: vec![],
        violating_entries: vec![],
        violations: 0,
        missing_params: 0,
    };
    for e in manifest.augmented_entries() {
        let Some(p) = &e.params else {
            stats.missing_params += 1;
            continue;
        };
        let AugmentationParams {
            crop_scale,
            crop_offset_x,
            crop_offset_y,
            theta_deg,
            zeta,
            beta,
            gamma,
        } = *p;
        let values = [
            crop_scale,
            crop_offset_x,
            crop_offset_y,
            theta_deg,
            zeta,
            beta,
            gamma,
        ];
        for (f, v) in fields.iter_mut().zip(values) {
            f.add(v);
        }
        let bad = p.range_violations();
        if !bad.is_empty() {
            stats.violations += bad.len();
            stats.violating_entries.push(e.sample_id.clone());
        }
    }
    stats.fields = fields;
    stats
}

impl ParamStats {
    pub fn field(&self, name: &str) -> Option<&FieldStats> {
        self.fields.iter().find(|f| f.name == name)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<14} {:>8} {:>12} {:>12} {:>12}",
            "param", "count", "min", "max", "mean"
        );
        for f in &self.fields {
            if f.count == 0 {
                let _ = writeln!(s, "{:<14} {:>8}", f.name, 0);
                continue;
            }
            let _ = writeln!(
                s,
                "{:<14} {:>8} {:>12.6} {:>12.6} {:>12.6}",
                f.name, f.count, f.min, f.max, f.mean
            );
        }
        let _ = writeln!(s, "range violations: {}", self.violations);
        if self.missing_params > 0 {
            let _ = writeln!(
                s,
                "augmented entries without params: {}",
                self.missing_params
            );
        }
        s
    }

    /// `param,bin,lo,hi,count` rows for every histogram bin.
    pub fn histogram_csv(&self) -> String {
        let mut s = String::from("param,bin,lo,hi,count\n");
        for f in &self.fields {
            let (lo, hi) = f.range;
            let w = (hi - lo) / f.histogram.len() as f64;
            for (i, n) in f.histogram.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "{},{i},{},{},{n}",
                    f.name,
                    lo + w * i as f64,
                    lo + w * (i + 1) as f64
                );
            }
        }
        s
    }

    pub fn summary_csv(&self) -> String {
        let mut s = String::from("param,count,min,max,mean\n");
        for f in &self.fields {
            let _ = writeln!(s, "{},{},{},{},{}", f.name, f.count, f.min, f.max, f.mean);
        }
        s
    }
}

/// Environment variable that makes [`check_golden`] (re)write golden files.
pub const UPDATE_GOLDEN_ENV: &str = "GESTAUG_UPDATE_GOLDEN";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GoldenOutcome {
    Match,
    Written,
    /// First differing line (1-based) with expected and actual text.
    Mismatch {
        line: usize,
        expected: String,
        actual: String,
    },
}

/// Compare `actual` to the golden file at `path`. With
/// `GESTAUG_UPDATE_GOLDEN=1` the file is written instead.
pub fn check_golden(path: &Path, actual: &str) -> Result<GoldenOutcome> {
    if std::env::var(UPDATE_GOLDEN_ENV).is_ok_and(|v| v == "1") {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        fs::write(path, actual).map_err(|e| Error::io(path, e))?;
        return Ok(GoldenOutcome::Written);
    }
    let expected = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(compare_text(&expected, actual))
}

pub fn compare_text(expected: &str, actual: &str) -> GoldenOutcome {
    if expected == actual {
        return GoldenOutcome::Match;
    }
    let (mut e, mut a) = (expected.lines(), actual.lines());
    let mut line = 1;
    loop {
        match (e.next(), a.next()) {
            (Some(x), Some(y)) if x == y => line += 1,
            (x, y) => {
                return GoldenOutcome::Mismatch {
                    line,
                    expected: x.unwrap_or("<eof>").to_string(),
                    actual: y.unwrap_or("<eof>").to_string(),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::HardLabel;
    use crate::pipeline::{augmented_id, ManifestEntry};
    use crate::sampler::params_for;
    use crate::transforms::ChainConfig;

    fn fixture(classes: usize, per_class: usize, copies: u32) -> Manifest {
        let mut entries = vec![];
        for c in 0..classes {
            for i in 0..per_class {
                let id = format!("d/g{c}/s{i}");
                entries.push(ManifestEntry {
                    sample_id: id.clone(),
                    origin: Origin::Original,
                    parent_id: None,
                    label: HardLabel::new(c, classes).unwrap(),
                    split: Some(if i == 0 { "train" } else { "test" }.into()),
                    image_path: format!("{id}.png").into(),
                    params: None,
                    content_digest: format!("o{c}{i}"),
                });
                for k in 1..=copies {
                    entries.push(ManifestEntry {
                        sample_id: augmented_id(&id, k),
                        origin: Origin::Augmented(k),
                        parent_id: Some(id.clone()),
                        label: HardLabel::new(c, classes).unwrap(),
                        split: Some(if i == 0 { "train" } else { "test" }.into()),
                        image_path: format!("{id}_{k}.png").into(),
                        params: Some(params_for(1, &id, k)),
                        content_digest: format!("a{c}{i}{k}"),
                    });
                }
            }
        }
        Manifest {
            global_seed: 1,
            copies_per_sample: copies,
            chain: ChainConfig::default(),
            entries,
        }
    }

    #[test]
    fn summary_counts() {
        let s = summarize(&fixture(14, 2, 3));
        assert_eq!(s.total, 112);
        assert_eq!(s.augmented_ratio(), Some(3.0));
        assert_eq!(s.per_class.len(), 14);
        assert!(s.per_class.values().all(|c| *c
            == ClassCounts {
                original: 2,
                total: 8
            }));
        assert_eq!(s.per_split["train"], 56);
        let sum: usize = s.per_class.values().map(|c| c.total).sum();
        assert_eq!(sum, s.total);
    }

    #[test]
    fn empty_summary() {
        let s = summarize(&Manifest::originals(vec![]));
        assert_eq!(s, DatasetSummary::default());
        assert_eq!(s.augmented_ratio(), None);
    }

    #[test]
    fn diff_cases() {
        let a = fixture(2, 2, 1);
        assert!(diff_manifests(&a, &a).is_empty());
        let mut b = a.clone();
        b.entries[3].content_digest = "zz".into();
        let d = diff_manifests(&a, &b);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].sample_id(), b.entries[3].sample_id);
        let removed = b.entries.pop().unwrap();
        let d = diff_manifests(&a, &b);
        assert!(d.contains(&ManifestDiff::Removed(removed.sample_id.clone())));
        let back = diff_manifests(&b, &a);
        assert!(back.contains(&ManifestDiff::Added(removed.sample_id)));
        assert_eq!(d.len(), back.len());
    }

    #[test]
    fn stats_flag_corrupted_param() {
        let mut m = fixture(3, 10, 3);
        let s = param_stats(&m);
        assert_eq!(s.violations, 0);
        assert_eq!(s.field("theta_deg").unwrap().count, 90);
        let total: usize = s.field("zeta").unwrap().histogram.iter().sum();
        assert_eq!(total, 90);
        m.entries[1].params.as_mut().unwrap().theta_deg = 40.0;
        let s = param_stats(&m);
        assert_eq!(s.violations, 1);
        assert_eq!(s.violating_entries, vec![m.entries[1].sample_id.clone()]);
        assert!(s
            .histogram_csv()
            .starts_with("param,bin,lo,hi,count\ncrop_scale,0,"));
    }

    #[test]
    fn text_compare() {
        assert_eq!(compare_text("a\nb\n", "a\nb\n"), GoldenOutcome::Match);
        assert_eq!(
            compare_text("a\nb\n", "a\nc\n"),
            GoldenOutcome::Mismatch {
                line: 2,
                expected: "b".into(),
                actual: "c".into()
            }
        );
    }
}
