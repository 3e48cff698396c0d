use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use tempfile::NamedTempFile;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            _ => Err(format!("expected csv, json or svg, got {s:?}")),
        }
    }
}

/// Where outputs go and which kinds are wanted. Files are staged in memory
/// and only written by [`Output::commit`], so a failing command leaves
/// nothing behind.
pub struct Output {
    dir: PathBuf,
    formats: BTreeSet<Format>,
    staged: Vec<(String, Vec<u8>)>,
}

impl Output {
    pub fn new(dir: PathBuf, formats: &[Format]) -> Self {
        Self {
            dir,
            formats: formats.iter().copied().collect(),
            staged: Vec::new(),
        }
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    pub fn stage(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.staged.push((name.into(), bytes));
    }

    pub fn stage_csv(&mut self, name: &str, table: &Table) -> Result<(), CliError> {
        if self.wants(Format::Csv) {
            self.stage(name, table.to_bytes()?);
        }
        Ok(())
    }

    pub fn stage_json(&mut self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        if self.wants(Format::Json) {
            let mut bytes =
                serde_json::to_vec_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
            bytes.push(b'\n');
            self.stage(name, bytes);
        }
        Ok(())
    }

    pub fn stage_svg(&mut self, name: &str, render: impl FnOnce() -> String) {
        if self.wants(Format::Svg) {
            self.stage(name, render().into_bytes());
        }
    }

    pub fn commit(self) -> Result<Vec<PathBuf>, CliError> {
        std::fs::create_dir_all(&self.dir)?;
        let mut written = Vec::new();
        for (name, bytes) in self.staged {
            let path = self.dir.join(name);
            write_atomic(&path, &bytes)?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Writes through a sibling temp file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .map_err(|e| CliError::Io(e.error.to_string()))?;
    Ok(())
}

/// A header plus rows of already formatted cells.
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }
}

/// Nine significant digits, plain decimal where that stays short, trailing
/// zeros trimmed. Independent of locale.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let exp = v.abs().log10().floor() as i32;
    if !(-5..15).contains(&exp) {
        return format!("{v:.8e}");
    }
    let s = format!("{:.*}", (8 - exp).max(0) as usize, v);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
