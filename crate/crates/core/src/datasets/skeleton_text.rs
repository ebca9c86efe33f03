use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::SkeletonSequence;
use crate::error::{Error, Result};

/// Parse a whitespace-separated skeleton file: one frame per nonempty line,
/// `joint_count * 3` numbers per line (x, y, z for each joint in order).
pub fn parse_skeleton_text(path: &Path, joint_count: usize) -> Result<SkeletonSequence<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_skeleton_str(&text, joint_count, path)
}

pub fn parse_skeleton_str(
    text: &str,
    joint_count: usize,
    source: &Path,
) -> Result<SkeletonSequence<f64>> {
    let expected = joint_count * 3;
    let mut frames = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut values = Vec::with_capacity(expected);
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| Error::parse(source, lineno, format!("not a number: {tok:?}")))?;
            if !v.is_finite() {
                return Err(Error::parse(
                    source,
                    lineno,
                    format!("non-finite value {tok:?}"),
                ));
            }
            values.push(v);
        }
        if values.len() != expected {
            return Err(Error::parse(
                source,
                lineno,
                format!(
                    "expected {expected} values ({joint_count} joints x 3), found {}",
                    values.len()
                ),
            ));
        }
        frames.push(values.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect());
    }
    SkeletonSequence::new(joint_count, frames)
}

/// Inverse of [`parse_skeleton_str`]; values use shortest round-trip formatting.
pub fn write_skeleton_text(seq: &SkeletonSequence<f64>) -> String {
    let mut out = String::new();
    for frame in seq.frames() {
        let mut first = true;
        for v in frame.iter().flatten() {
            if !first {
                out.push(' ');
            }
            first = false;
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}
