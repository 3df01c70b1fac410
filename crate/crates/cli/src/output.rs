use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use spnorm::{Error, Result};

/// Self-describing record of one command invocation.
#[derive(Debug, Serialize)]
pub struct ResultDocument<C: Serialize, R: Serialize, D: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub config: C,
    pub results: R,
    pub diagnostics: D,
}

impl<C: Serialize, R: Serialize, D: Serialize> ResultDocument<C, R, D> {
    pub fn new(command: &'static str, seed: u64, config: C, results: R, diagnostics: D) -> Self {
        Self {
            tool: "spnorm",
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            config,
            results,
            diagnostics,
        }
    }
}

/// Output directory; files are written to a temporary sibling and renamed
/// into place.
pub struct OutDir(PathBuf);

impl OutDir {
    pub fn create(path: &Path) -> Result<Self> {
        std::fs::create_dir_all(path)
            .map_err(|e| Error::Config(format!("cannot create output directory {}: {e}", path.display())))?;
        Ok(Self(path.to_path_buf()))
    }

    pub fn write_with(&self, name: &str, f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<PathBuf> {
        let mut buf = Vec::new();
        f(&mut buf)?;
        let target = self.0.join(name);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.0)?;
        tmp.write_all(&buf)?;
        tmp.as_file().sync_all()?;
        tmp.persist(&target).map_err(|e| Error::Io(e.error))?;
        Ok(target)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf> {
        self.write_with(name, |buf| {
            serde_json::to_writer_pretty(&mut *buf, value)
                .map_err(|e| Error::Numerical(format!("serializing {name}: {e}")))?;
            buf.push(b'\n');
            Ok(())
        })
    }

    /// Effective configuration as TOML, ready to pass back via `--config`.
    pub fn write_toml<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf> {
        let text = toml::to_string(value).map_err(|e| Error::Config(format!("serializing {name}: {e}")))?;
        self.write_with(name, |buf| {
            buf.extend_from_slice(text.as_bytes());
            Ok(())
        })
    }
}
