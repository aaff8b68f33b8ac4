//! Output sinks. Files are written to a temporary sibling and renamed into
//! place only on success, so a failed run never leaves a partial file.

use std::fs::File;
use std::io::{self, BufWriter, Stdout, Write};
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::error::CliError;

pub enum Sink {
    Stdout(BufWriter<Stdout>),
    File {
        writer: BufWriter<NamedTempFile>,
        path: PathBuf,
    },
}

impl Sink {
    pub fn open(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Sink::Stdout(BufWriter::new(io::stdout()))),
            Some(path) => {
                let dir = match path.parent() {
                    Some(d) if !d.as_os_str().is_empty() => d,
                    _ => Path::new("."),
                };
                let tmp = NamedTempFile::new_in(dir).map_err(|e| CliError::io_at(path, e))?;
                Ok(Sink::File {
                    writer: BufWriter::new(tmp),
                    path: path.to_path_buf(),
                })
            }
        }
    }

    pub fn finish(self) -> Result<(), CliError> {
        match self {
            Sink::Stdout(mut w) => Ok(w.flush()?),
            Sink::File { writer, path } => {
                let tmp = writer
                    .into_inner()
                    .map_err(|e| CliError::io_at(&path, e.into_error()))?;
                tmp.as_file().sync_all().map_err(|e| CliError::io_at(&path, e))?;
                tmp.persist(&path).map_err(|e| CliError::io_at(&path, e.error))?;
                Ok(())
            }
        }
    }
}

impl Write for Sink {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        match self {
            Sink::Stdout(w) => w.write(buf),
            Sink::File { writer, .. } => writer.write(buf),
        }
    }

    fn flush(&mut self) -> io::Result<()> {
        match self {
            Sink::Stdout(w) => w.flush(),
            Sink::File { writer, .. } => writer.flush(),
        }
    }
}

/// Writes a whole document atomically (or to standard output).
pub fn write_all(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    let mut sink = Sink::open(path)?;
    sink.write_all(text.as_bytes())?;
    sink.finish()
}

pub fn open_input(path: Option<&Path>) -> Result<Box<dyn io::BufRead>, CliError> {
    match path {
        None => Ok(Box::new(io::BufReader::new(io::stdin()))),
        Some(p) => {
            let f = File::open(p).map_err(|e| CliError::io_at(p, e))?;
            Ok(Box::new(io::BufReader::new(f)))
        }
    }
}
