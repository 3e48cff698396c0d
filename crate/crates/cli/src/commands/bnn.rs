use std::path::{Path, PathBuf};

use relgraph::analysis::{connectome_measures, rank_by_distance};
use relgraph::graph::GraphMeasures;
use relgraph::model_io::read_connectome;
use serde::Serialize;

use super::model::model_level;
use super::{load_model, report_written};
use crate::error::CliError;
use crate::output::{num, Output, Table};
use crate::svg::{Chart, Series, Style};
use crate::GraphArgs;

pub enum Query {
    Archive(PathBuf),
    Point((f64, f64)),
}

/// Regular, non-hidden files of `dir` in name order.
pub fn list_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();
    for entry in
        std::fs::read_dir(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?
    {
        let entry = entry?;
        let hidden = entry.file_name().to_string_lossy().starts_with('.');
        if !hidden && entry.file_type()?.is_file() {
            files.push(entry.path());
        }
    }
    files.sort();
    Ok(files)
}

pub fn compare_bnn(
    query: Query,
    dir: &Path,
    g: &GraphArgs,
    mut out: Output,
) -> Result<(), CliError> {
    let (label, query) = match query {
        Query::Point((c, l)) => ("query".to_string(), GraphMeasures::point(c, l)),
        Query::Archive(path) => {
            let model = load_model(&path)?;
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            (stem, model_level(&model, g)?.aggregation)
        }
    };

    let mut measured = Vec::new();
    let mut sizes = std::collections::HashMap::new();
    for file in list_files(dir)? {
        let graph = match read_connectome(&file) {
            Ok(graph) => graph,
            Err(e) => {
                eprintln!("warning: skipping {}: {e}", file.display());
                continue;
            }
        };
        match connectome_measures(&graph) {
            Ok(m) => {
                sizes.insert(
                    graph.name.clone(),
                    (graph.n, graph.to_binary().edge_count()),
                );
                measured.push((graph.name, m));
            }
            Err(e) => eprintln!("warning: skipping {}: {e}", file.display()),
        }
    }
    if measured.is_empty() {
        return Err(CliError::input(format!(
            "no connectome in {} could be read",
            dir.display()
        )));
    }
    let report = rank_by_distance(query, measured);

    let mut table = Table::new(&[
        "rank",
        "name",
        "nodes",
        "edges",
        "clustering",
        "path_length",
        "distance",
    ]);
    for (i, e) in report.ranked.iter().enumerate() {
        let (n, m) = sizes[&e.name];
        table.push(vec![
            (i + 1).to_string(),
            e.name.clone(),
            n.to_string(),
            m.to_string(),
            num(e.measures.clustering),
            num(e.measures.path_length),
            num(e.distance),
        ]);
    }
    out.stage_csv("bnn_ranking.csv", &table)?;

    #[derive(Serialize)]
    struct Report<'a> {
        query_label: &'a str,
        #[serde(flatten)]
        report: &'a relgraph::analysis::BnnSimilarityReport,
    }
    out.stage_json(
        "bnn_ranking.json",
        &Report {
            query_label: &label,
            report: &report,
        },
    )?;
    out.stage_svg("bnn_ranking.svg", || {
        let pts = report
            .ranked
            .iter()
            .map(|e| (e.measures.clustering, e.measures.path_length))
            .collect();
        Chart {
            title: "graph measures of biological networks".into(),
            x_label: "clustering coefficient".into(),
            y_label: "average path length".into(),
            y2_label: None,
            series: vec![
                Series::new("connectomes", pts, Style::Markers),
                Series::new(
                    label.clone(),
                    vec![(query.clustering, query.path_length)],
                    Style::Highlight,
                ),
            ],
        }
        .render()
    });

    println!(
        "{label}: C = {}, L = {}",
        num(query.clustering),
        num(query.path_length)
    );
    for e in &report.ranked {
        println!("  {:<24} distance {}", e.name, num(e.distance));
    }
    report_written(&out.commit()?);
    Ok(())
}
