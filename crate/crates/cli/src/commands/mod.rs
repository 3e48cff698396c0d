mod bnn;
mod model;
mod sweetspot;
mod track;

pub use bnn::{compare_bnn, Query};
pub use model::{compose, extract, layers, measure};
pub use sweetspot::sweetspot;
pub use track::track;

use std::path::Path;

use relgraph::model_io::{read_archive, validate_archive, ValidatedModel};

use crate::error::CliError;

pub fn load_model(path: &Path) -> Result<ValidatedModel, CliError> {
    Ok(validate_archive(read_archive(path)?)?)
}

pub fn parse_point(s: &str) -> Result<(f64, f64), String> {
    let (c, l) = s
        .split_once(',')
        .ok_or_else(|| format!("expected C,L, got {s:?}"))?;
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Ok((parse(c)?, parse(l)?))
}

pub fn report_written(paths: &[std::path::PathBuf]) {
    for p in paths {
        eprintln!("wrote {}", p.display());
    }
}
