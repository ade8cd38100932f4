use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use recurlab::numeric::{render_decimal, render_rational, to_f64};
use recurlab::{Enclosure, Q};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// CSV table built in memory, written atomically.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header).expect("in-memory write");
        Table { writer }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).expect("in-memory write");
    }

    pub fn write(self, path: &Path) -> Result<(), CliError> {
        let bytes = self.writer.into_inner().expect("in-memory flush");
        write_atomic(path, &bytes)
    }
}

pub fn rational(x: &Q) -> String {
    render_rational(x)
}

pub fn decimal(x: &Q) -> String {
    render_decimal(to_f64(x))
}

pub fn float(x: f64) -> String {
    render_decimal(x)
}

/// `p/q` when exact, otherwise `[lo, hi]` with rational endpoints.
pub fn enclosure(e: &Enclosure) -> String {
    match e.as_exact() {
        Some(x) => render_rational(x),
        None => format!("[{}, {}]", render_rational(e.lo()), render_rational(e.hi())),
    }
}

/// Outcome of one named check, stored as `<name>.check.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    pub passed: usize,
    pub total: usize,
    pub ok: bool,
    pub detail: String,
}

impl CheckRecord {
    pub fn new(check: &str, passed: usize, total: usize, detail: impl Into<String>) -> Self {
        CheckRecord {
            check: check.to_string(),
            passed,
            total,
            ok: passed == total,
            detail: detail.into(),
        }
    }

    pub fn path(dir: &Path, check: &str) -> PathBuf {
        dir.join(format!("{check}.check.json"))
    }

    pub fn save(&self, dir: &Path) -> Result<(), CliError> {
        write_json(&CheckRecord::path(dir, &self.check), self)
    }
}
