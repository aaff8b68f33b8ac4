//! Event stream ingestion.
//!
//! Each nonblank line is either a JSON object `{"t": int, "s": string}` or a
//! bare token, in which case `t` is the 1-based line number.

use std::io::BufRead;

use crate::error::{Error, Result};
use crate::memory::Observation;
use crate::symbol::SymbolId;

/// Parses one line. Returns `Ok(None)` for blank lines.
pub fn parse_line(line: &str, line_no: usize) -> Result<Option<Observation>> {
    let trimmed = line.trim();
    if trimmed.is_empty() {
        return Ok(None);
    }
    if trimmed.starts_with('{') {
        let obs: Observation = serde_json::from_str(trimmed).map_err(|e| Error::Parse {
            line: line_no,
            message: format!("bad event object: {e}"),
        })?;
        return Ok(Some(obs));
    }
    Ok(Some(Observation {
        t: line_no as u64,
        symbol: SymbolId::new(trimmed),
    }))
}

/// Iterator over `(line number, observation)` pairs of a reader.
pub struct EventReader<R> {
    inner: R,
    line_no: usize,
    buf: String,
}

impl<R: BufRead> EventReader<R> {
    pub fn new(inner: R) -> Self {
        EventReader {
            inner,
            line_no: 0,
            buf: String::new(),
        }
    }
}

impl<R: BufRead> Iterator for EventReader<R> {
    type Item = Result<(usize, Observation)>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            match self.inner.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {
                    self.line_no += 1;
                    match parse_line(&self.buf, self.line_no) {
                        Ok(Some(o)) => return Some(Ok((self.line_no, o))),
                        Ok(None) => continue,
                        Err(e) => return Some(Err(e)),
                    }
                }
                Err(e) => return Some(Err(Error::Io(e).at_line(self.line_no + 1))),
            }
        }
    }
}

/// Serialises an observation as one JSONL line (without the newline).
pub fn to_json_line(o: &Observation) -> String {
    serde_json::to_string(o).expect("observation serialises")
}
