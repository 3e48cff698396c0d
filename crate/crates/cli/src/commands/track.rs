use std::path::Path;

use relgraph::analysis::training_series;
use relgraph::builders::PipelineOptions;
use relgraph::model_io::{read_archive, validate_archive, ValidatedModel};
use serde::Serialize;

use super::bnn::list_files;
use super::report_written;
use crate::error::CliError;
use crate::output::{num, Output, Table};
use crate::svg::{Chart, Series, Style};

/// `N` from a file name ending in `_e<N>.rga`.
pub fn epoch_from_name(path: &Path) -> Option<u64> {
    let name = path.file_name()?.to_str()?;
    let stem = name.strip_suffix(".rga")?;
    let (_, digits) = stem.rsplit_once("_e")?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

fn load(path: &Path) -> Result<(u64, ValidatedModel), String> {
    let archive = read_archive(path).map_err(|e| e.to_string())?;
    let epoch = archive
        .epoch
        .or_else(|| epoch_from_name(path))
        .ok_or("no epoch in the manifest or the file name")?;
    let model = validate_archive(archive).map_err(|e| e.to_string())?;
    Ok((epoch, model))
}

pub fn track(dir: &Path, opts: &PipelineOptions, mut out: Output) -> Result<(), CliError> {
    let mut checkpoints = Vec::new();
    let mut sources = Vec::new();
    for file in list_files(dir)? {
        if file.extension().and_then(|e| e.to_str()) != Some("rga") {
            continue;
        }
        match load(&file) {
            Ok(c) => {
                sources.push((c.0, file));
                checkpoints.push(c);
            }
            Err(e) => eprintln!("warning: skipping {}: {e}", file.display()),
        }
    }
    if checkpoints.is_empty() {
        return Err(CliError::input(format!(
            "no checkpoint in {} could be read",
            dir.display()
        )));
    }
    checkpoints.sort_by_key(|c| c.0);
    sources.sort();
    if let Some(w) = sources.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(CliError::input(format!(
            "epoch {} appears in both {} and {}",
            w[0].0,
            w[0].1.display(),
            w[1].1.display()
        )));
    }
    let epochs: Vec<u64> = checkpoints.iter().map(|c| c.0).collect();
    if epochs.windows(3).any(|w| w[1] - w[0] != w[2] - w[1]) {
        eprintln!("warning: epochs are unevenly spaced: {epochs:?}");
    }

    let rows = training_series(&checkpoints, opts)?;
    let mut table = Table::new(&[
        "epoch",
        "agg_clustering",
        "agg_path_length",
        "aff_clustering",
        "aff_path_length",
    ]);
    for r in &rows {
        table.push(vec![
            r.epoch.to_string(),
            num(r.aggregation.clustering),
            num(r.aggregation.path_length),
            num(r.affine.clustering),
            num(r.affine.path_length),
        ]);
    }
    out.stage_csv("track.csv", &table)?;

    #[derive(Serialize)]
    struct Report<'a> {
        directory: String,
        family: String,
        rows: &'a [relgraph::analysis::SeriesRow],
    }
    out.stage_json(
        "track.json",
        &Report {
            directory: dir.display().to_string(),
            family: checkpoints[0].1.family().to_string(),
            rows: &rows,
        },
    )?;
    out.stage_svg("track.svg", || {
        let pts = |f: &dyn Fn(&relgraph::analysis::SeriesRow) -> f64| {
            rows.iter()
                .map(|r| (r.epoch as f64, f(r)))
                .collect::<Vec<_>>()
        };
        Chart {
            title: "graph measures during training".into(),
            x_label: "epoch".into(),
            y_label: "clustering coefficient".into(),
            y2_label: Some("average path length".into()),
            series: vec![
                Series::new(
                    "C aggregation",
                    pts(&|r| r.aggregation.clustering),
                    Style::Line,
                ),
                Series::new("C affine", pts(&|r| r.affine.clustering), Style::Line),
                Series::new(
                    "L aggregation",
                    pts(&|r| r.aggregation.path_length),
                    Style::Line,
                )
                .secondary(),
                Series::new("L affine", pts(&|r| r.affine.path_length), Style::Line).secondary(),
            ],
        }
        .render()
    });
    for r in &rows {
        println!(
            "epoch {:>5}: C = {}, L = {} (aggregation)",
            r.epoch,
            num(r.aggregation.clustering),
            num(r.aggregation.path_length)
        );
    }
    report_written(&out.commit()?);
    Ok(())
}
