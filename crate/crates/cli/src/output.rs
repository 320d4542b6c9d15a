use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use oblique_core::solver::{write_manifest, Manifest};

use crate::error::CliError;

/// Output directory plus the relative names of everything written into it.
pub struct OutDir {
    root: PathBuf,
    files: Vec<String>,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|e| CliError::Config(format!("cannot create {}: {e}", root.display())))?;
        Ok(Self {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    /// Records a file written by other code; `path` must lie inside the root.
    pub fn record(&mut self, path: &Path) {
        let rel = path.strip_prefix(&self.root).unwrap_or(path);
        self.files.push(rel.display().to_string());
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let path = self.root.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, body)?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let body = serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
        self.text(name, &(body + "\n"))
    }

    /// Writes `manifest.json` listing every recorded file.
    pub fn finish(self, mut manifest: Manifest) -> Result<(), CliError> {
        manifest.files = self.files;
        write_manifest(&self.root.join("manifest.json"), &manifest)?;
        Ok(())
    }
}

pub fn to_value<T: Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("plain data serializes")
}
