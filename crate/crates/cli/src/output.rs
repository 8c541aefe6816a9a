//! Output directory. Commands compute first and write here in sequence.

use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone)]
pub struct OutDir {
    dir: PathBuf,
}

impl OutDir {
    pub fn create(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| {
            CliError::Config(format!(
                "output directory `{}` is not writable: {e}",
                dir.display()
            ))
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write_with(
        &self,
        name: &str,
        fill: impl FnOnce(&mut Vec<u8>) -> io::Result<()>,
    ) -> Result<PathBuf> {
        let path = self.path(name);
        let mut buf = Vec::new();
        fill(&mut buf)
            .and_then(|_| std::fs::write(&path, &buf))
            .map_err(|source| CliError::Write {
                path: path.clone(),
                source,
            })?;
        Ok(path)
    }

    pub fn write_json<S: Serialize>(&self, name: &str, value: &S) -> Result<PathBuf> {
        self.write_with(name, |buf| {
            serde_json::to_writer_pretty(&mut *buf, value)?;
            buf.push(b'\n');
            Ok(())
        })
    }
}

/// Least-squares slope of `ln v` against `t`.
pub fn log_slope(ts: &[f64], vs: &[f64]) -> f64 {
    let n = ts.len() as f64;
    let (mut st, mut sv, mut stt, mut stv) = (0.0, 0.0, 0.0, 0.0);
    for (&t, &v) in ts.iter().zip(vs) {
        let l = v.ln();
        st += t;
        sv += l;
        stt += t * t;
        stv += t * l;
    }
    (n * stv - st * sv) / (n * stt - st * st)
}
