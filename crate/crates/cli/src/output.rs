//! Output directory management: one directory per invocation, refusing to
//! clobber existing results, with deterministic file contents.

use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};
use zagff::{Error, Result};

pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    /// Creates (or reuses empty) `path`; refuses a non-empty directory
    /// unless `force`, so runs never mutate earlier results in place.
    pub fn create(path: &Path, force: bool) -> Result<Self> {
        if path.exists() {
            let non_empty = fs::read_dir(path)?.next().is_some();
            if non_empty && !force {
                return Err(Error::InvalidParameter {
                    name: "out",
                    reason: format!(
                        "output directory {} is not empty (pass --force to overwrite)",
                        path.display()
                    ),
                });
            }
        }
        fs::create_dir_all(path)?;
        Ok(OutputDir {
            root: path.to_path_buf(),
        })
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Format {
            what: "json report",
            detail: e.to_string(),
        })?;
        text.push('\n');
        fs::write(self.root.join(name), text)?;
        Ok(())
    }

    pub fn write_with<F>(&self, name: &str, writer: F) -> Result<()>
    where
        F: FnOnce(&mut Vec<u8>) -> Result<()>,
    {
        let mut buf = Vec::new();
        writer(&mut buf)?;
        fs::write(self.root.join(name), buf)?;
        Ok(())
    }
}
