//! Output directory bookkeeping; the manifest is written last.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;

pub const MANIFEST: &str = "manifest.json";

pub fn version() -> &'static str {
    env!("LERAY_VERSION")
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_path: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub version: String,
    pub seed: Option<u64>,
    /// Seconds per phase.
    pub timings: BTreeMap<String, f64>,
    pub files: Vec<String>,
}

/// Tracks files written under one output directory.
pub struct OutDir {
    root: PathBuf,
    manifest: RunManifest,
    clock: Instant,
}

impl OutDir {
    pub fn create(root: &Path, command: &str, config_path: Option<&Path>) -> Result<Self> {
        std::fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(Self {
            root: root.to_path_buf(),
            manifest: RunManifest {
                command: command.into(),
                config_path: config_path.map(Path::to_path_buf),
                out_dir: root.to_path_buf(),
                version: version().into(),
                seed: None,
                timings: BTreeMap::new(),
                files: Vec::new(),
            },
            clock: Instant::now(),
        })
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.manifest.seed = Some(seed);
    }

    pub fn lap(&mut self, phase: &str) {
        let now = Instant::now();
        let secs = (now - self.clock).as_secs_f64();
        self.manifest.timings.insert(phase.into(), secs);
        self.clock = now;
    }

    /// Write `rel` through `body` and record it.
    pub fn write(&mut self, rel: &str, body: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
        let path = self.root.join(rel);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let mut w = BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?);
        body(&mut w)?;
        w.flush()?;
        self.manifest.files.push(rel.into());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<()> {
        self.write(rel, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)?;
            Ok(())
        })
    }

    /// Write the manifest through a temporary file and rename it into place.
    pub fn finish(mut self) -> Result<PathBuf> {
        self.manifest.files.push(MANIFEST.into());
        let tmp = self.root.join(format!(".{MANIFEST}.tmp"));
        let dst = self.root.join(MANIFEST);
        {
            let mut w = BufWriter::new(File::create(&tmp)?);
            serde_json::to_writer_pretty(&mut w, &self.manifest)?;
            writeln!(w)?;
            w.flush()?;
        }
        std::fs::rename(&tmp, &dst)?;
        Ok(dst)
    }
}
