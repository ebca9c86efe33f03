//! All-or-nothing output directories.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

fn staging_dir(out_dir: &Path) -> PathBuf {
    let name = out_dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    out_dir.with_file_name(format!(".{name}.partial-{}", std::process::id()))
}

/// An existing output directory may be replaced only if it is empty or holds
/// `marker`, i.e. looks like a previous run of the same command.
fn replaceable(out_dir: &Path, marker: &str) -> Result<bool> {
    if !out_dir.exists() {
        return Ok(true);
    }
    let empty = fs::read_dir(out_dir)
        .map_err(|e| Error::io(out_dir, e))?
        .next()
        .is_none();
    Ok(empty || out_dir.join(marker).is_file())
}

/// Run `build` against a hidden sibling of `out_dir`, then rename it into
/// place. On error the partial tree is removed and `out_dir` is untouched.
pub(crate) fn build_output_dir<T>(
    out_dir: &Path,
    marker: &str,
    build: impl FnOnce(&Path) -> Result<T>,
) -> Result<T> {
    if !replaceable(out_dir, marker)? {
        return Err(Error::InvalidParameter(format!(
            "{} exists and is not a previous output directory (no {marker})",
            out_dir.display()
        )));
    }
    let staging = staging_dir(out_dir);
    if staging.exists() {
        fs::remove_dir_all(&staging).map_err(|e| Error::io(&staging, e))?;
    }
    fs::create_dir_all(&staging).map_err(|e| Error::io(&staging, e))?;
    let result = build(&staging).and_then(|value| {
        if out_dir.exists() {
            fs::remove_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
        }
        if let Some(parent) = out_dir.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        fs::rename(&staging, out_dir).map_err(|e| Error::io(out_dir, e))?;
        Ok(value)
    });
    if result.is_err() {
        let _ = fs::remove_dir_all(&staging);
    }
    result
}

/// Create the parent directory of `path`.
pub(crate) fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failure_leaves_previous_output_alone() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out");
        build_output_dir(&out, "m", |s| {
            fs::write(s.join("m"), "one").map_err(|e| Error::io(s, e))
        })
        .unwrap();
        let err = build_output_dir(&out, "m", |_| -> Result<()> {
            Err(Error::InvalidParameter("boom".into()))
        });
        assert!(err.is_err());
        assert_eq!(fs::read_to_string(out.join("m")).unwrap(), "one");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn foreign_directory_is_refused() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("precious.txt"), "x").unwrap();
        assert!(build_output_dir(dir.path(), "m", |_| Ok(())).is_err());
        assert!(dir.path().join("precious.txt").exists());
    }
}
