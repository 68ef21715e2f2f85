//! Output files: the manifest and CSVs written through a temporary file.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::CliError;

#[derive(Debug, Serialize)]
struct Seeds {
    master: u64,
    dictionary: u64,
    signal: u64,
    width: u64,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    command: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    preset: Option<&'a str>,
    version: &'a str,
    seeds: Seeds,
    config: &'a RunConfig,
}

pub const MANIFEST: &str = "manifest.toml";

pub fn write_manifest(
    dir: &Path,
    command: &str,
    preset: Option<&str>,
    cfg: &RunConfig,
) -> Result<PathBuf, CliError> {
    let manifest = Manifest {
        command,
        preset,
        version: env!("CARGO_PKG_VERSION"),
        seeds: Seeds {
            master: cfg.master_seed,
            dictionary: cfg.dictionary_seed(),
            signal: cfg.signal_seed(),
            width: cfg.width_seed(),
        },
        config: cfg,
    };
    let text = toml::to_string(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
    let path = dir.join(MANIFEST);
    fs::write(&path, text)?;
    Ok(path)
}

/// A CSV that appears under its final name only once complete.
pub struct CsvTarget {
    path: PathBuf,
    tmp: PathBuf,
}

impl CsvTarget {
    pub fn new(dir: &Path, name: &str) -> Self {
        CsvTarget {
            path: dir.join(name),
            tmp: dir.join(format!(".{name}.partial")),
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn write<F>(&self, body: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut BufWriter<fs::File>) -> Result<(), CliError>,
    {
        let result = (|| {
            let mut out = BufWriter::new(fs::File::create(&self.tmp)?);
            body(&mut out)?;
            out.flush()?;
            drop(out);
            fs::rename(&self.tmp, &self.path)?;
            Ok(())
        })();
        if result.is_err() {
            self.remove();
        }
        result
    }

    /// Deletes the temporary and any earlier output under the final name.
    pub fn remove(&self) {
        let _ = fs::remove_file(&self.tmp);
        let _ = fs::remove_file(&self.path);
    }
}
