//! Run directories `<out>/<command>/<name>/` and their manifest.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};

pub struct RunDir {
    path: PathBuf,
    files: Vec<String>,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Output(format!("{}: {e}", path.display()))
}

impl RunDir {
    pub fn create(out: &Path, command: &str, name: &str) -> CliResult<Self> {
        let path = out.join(command).join(name);
        fs::create_dir_all(&path).map_err(|e| io_err(&path, e))?;
        Ok(RunDir { path, files: Vec::new() })
    }

    /// Creates `file` in the run directory and hands a buffered writer to
    /// `write`. Core errors from `write` are output errors here.
    pub fn write_with(
        &mut self,
        file: &str,
        write: impl FnOnce(BufWriter<File>) -> dirichlet_core::Result<()>,
    ) -> CliResult<()> {
        let p = self.path.join(file);
        let f = File::create(&p).map_err(|e| io_err(&p, e))?;
        write(BufWriter::new(f)).map_err(|e| io_err(&p, e))?;
        self.files.push(file.to_string());
        Ok(())
    }

    pub fn write_json(&mut self, file: &str, value: &impl Serialize) -> CliResult<()> {
        self.write_with(file, |mut w| {
            serde_json::to_writer_pretty(&mut w, value)?;
            use std::io::Write;
            writeln!(w)?;
            w.flush()?;
            Ok(())
        })
    }

    /// Writes `manifest.json`: command, run name, resolved configuration and
    /// the files produced, in order.
    pub fn finish(mut self, command: &str, name: &str, config: &impl Serialize, status: &str) -> CliResult<PathBuf> {
        #[derive(Serialize)]
        struct Manifest<'a, C> {
            tool: &'static str,
            version: &'static str,
            command: &'a str,
            name: &'a str,
            status: &'a str,
            config: &'a C,
            files: Vec<String>,
        }
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            name,
            status,
            config,
            files: self.files.clone(),
        };
        self.write_json("manifest.json", &manifest)?;
        Ok(self.path)
    }
}
