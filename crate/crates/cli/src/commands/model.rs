use std::path::Path;

use relgraph::builders::{
    canonical_layers, final_aggregation, layer_affine, per_layer_measures, ModelMeasures,
};
use relgraph::graph::{graph_measures, DenseGraph, GraphMeasures, Tau};
use relgraph::model_io::ValidatedModel;
use serde::Serialize;

use super::{load_model, report_written};
use crate::error::CliError;
use crate::output::{num, Output, Table};
use crate::svg::{Chart, Series, Style};
use crate::{GraphArgs, ModelMode};

#[derive(Serialize)]
struct Options {
    tau: String,
    class_token: String,
    head_mode: String,
    mode: String,
}

impl From<&GraphArgs> for Options {
    fn from(g: &GraphArgs) -> Self {
        Self {
            tau: match g.tau {
                Tau::Auto => "auto".into(),
                Tau::Fixed(t) => num(t),
            },
            class_token: format!("{:?}", g.class_token).to_lowercase(),
            head_mode: format!("{:?}", g.head_mode).to_lowercase(),
            mode: format!("{:?}", g.mode).to_lowercase(),
        }
    }
}

fn measure_cells(m: &GraphMeasures) -> [String; 3] {
    [
        num(m.clustering),
        num(m.path_length),
        num(m.connected_pair_fraction),
    ]
}

pub struct ModelLevel {
    pub per_layer: ModelMeasures,
    pub aggregation: GraphMeasures,
    pub affine: GraphMeasures,
    pub n_tokens: usize,
}

/// Per-layer measures plus the model-level row selected by `--mode`. The
/// affine row is always the layer mean since channel graphs do not compose.
pub fn model_level(model: &ValidatedModel, g: &GraphArgs) -> Result<ModelLevel, CliError> {
    let opts = g.pipeline();
    let per_layer = per_layer_measures(model, g.tau, &opts)?;
    let (aggregation, n_tokens) = match g.mode {
        ModelMode::Compose => {
            let composed = final_aggregation(model, &opts)?;
            (graph_measures(&composed, g.tau)?, composed.n())
        }
        ModelMode::LayerMean => (per_layer.aggregation_mean, per_layer.layers[0].n_tokens),
    };
    Ok(ModelLevel {
        affine: per_layer.affine_mean,
        per_layer,
        aggregation,
        n_tokens,
    })
}

pub fn extract(path: &Path, mut out: Output) -> Result<(), CliError> {
    let model = load_model(path)?;
    let mut tensors = Table::new(&["name", "dtype", "shape", "elements"]);
    for t in model.archive().tensors() {
        let shape: Vec<String> = t.shape().iter().map(|d| d.to_string()).collect();
        tensors.push(vec![
            t.name().to_string(),
            t.dtype().as_str().to_string(),
            shape.join("x"),
            t.data().len().to_string(),
        ]);
    }
    let mut layers = Table::new(&[
        "layer",
        "stage",
        "grid_h",
        "grid_w",
        "embed_dim",
        "heads",
        "window",
        "shift",
        "scale_dim",
    ]);
    for l in model.layers() {
        layers.push(vec![
            l.index.to_string(),
            l.stage.to_string(),
            l.grid.0.to_string(),
            l.grid.1.to_string(),
            l.embed_dim.to_string(),
            l.heads.to_string(),
            l.window_size.map(|w| w.to_string()).unwrap_or_default(),
            l.shift_size.to_string(),
            l.scale_dim.to_string(),
        ]);
    }
    out.stage_csv("tensors.csv", &tensors)?;
    out.stage_csv("layers.csv", &layers)?;

    #[derive(Serialize)]
    struct Report<'a> {
        archive: String,
        meta: &'a relgraph::model_io::ModelMeta,
        epoch: Option<u64>,
        tensors: Vec<(&'a str, &'a [usize])>,
    }
    out.stage_json(
        "extract.json",
        &Report {
            archive: path.display().to_string(),
            meta: model.meta(),
            epoch: model.archive().epoch,
            tensors: model
                .archive()
                .tensors()
                .iter()
                .map(|t| (t.name(), t.shape()))
                .collect(),
        },
    )?;
    println!(
        "{}: {} with {} layers, {} tensors",
        path.display(),
        model.family(),
        model.depth(),
        model.archive().tensors().len()
    );
    report_written(&out.commit()?);
    Ok(())
}

pub fn measure(path: &Path, g: &GraphArgs, mut out: Output) -> Result<(), CliError> {
    let model = load_model(path)?;
    let level = model_level(&model, g)?;
    let mut table = Table::new(&[
        "scope",
        "layer",
        "n_tokens",
        "n_channels",
        "agg_clustering",
        "agg_path_length",
        "agg_connected_fraction",
        "aff_clustering",
        "aff_path_length",
        "aff_connected_fraction",
    ]);
    for l in &level.per_layer.layers {
        let mut row = vec![
            "layer".into(),
            l.layer.to_string(),
            l.n_tokens.to_string(),
            l.n_channels.to_string(),
        ];
        row.extend(measure_cells(&l.aggregation));
        row.extend(measure_cells(&l.affine));
        table.push(row);
    }
    let channels = level.per_layer.layers[0].n_channels;
    let uniform_channels = level
        .per_layer
        .layers
        .iter()
        .all(|l| l.n_channels == channels);
    let mut row = vec![
        "model".into(),
        String::new(),
        level.n_tokens.to_string(),
        if uniform_channels {
            channels.to_string()
        } else {
            String::new()
        },
    ];
    row.extend(measure_cells(&level.aggregation));
    row.extend(measure_cells(&level.affine));
    table.push(row);
    out.stage_csv("measures.csv", &table)?;

    #[derive(Serialize)]
    struct Report<'a> {
        archive: String,
        family: String,
        depth: usize,
        options: Options,
        layers: &'a [relgraph::builders::LayerMeasures],
        model: ModelRow,
    }
    #[derive(Serialize)]
    struct ModelRow {
        n_tokens: usize,
        aggregation: GraphMeasures,
        affine: GraphMeasures,
    }
    out.stage_json(
        "measures.json",
        &Report {
            archive: path.display().to_string(),
            family: model.family().to_string(),
            depth: model.depth(),
            options: g.into(),
            layers: &level.per_layer.layers,
            model: ModelRow {
                n_tokens: level.n_tokens,
                aggregation: level.aggregation,
                affine: level.affine,
            },
        },
    )?;
    out.stage_svg("measures.svg", || {
        let layers = &level.per_layer.layers;
        let pts = |f: &dyn Fn(&relgraph::builders::LayerMeasures) -> f64| {
            layers
                .iter()
                .map(|l| (l.layer as f64, f(l)))
                .collect::<Vec<_>>()
        };
        Chart {
            title: format!("{} per-layer aggregation graph", model.family()),
            x_label: "layer".into(),
            y_label: "clustering coefficient".into(),
            y2_label: Some("average path length".into()),
            series: vec![
                Series::new("C", pts(&|l| l.aggregation.clustering), Style::Line),
                Series::new("L", pts(&|l| l.aggregation.path_length), Style::Line).secondary(),
                Series::new("", pts(&|l| l.aggregation.clustering), Style::Markers).colored_like(0),
                Series::new("", pts(&|l| l.aggregation.path_length), Style::Markers)
                    .secondary()
                    .colored_like(1),
            ],
        }
        .render()
    });
    println!(
        "model: C = {}, L = {} (aggregation, {} nodes); C = {}, L = {} (affine)",
        num(level.aggregation.clustering),
        num(level.aggregation.path_length),
        level.n_tokens,
        num(level.affine.clustering),
        num(level.affine.path_length)
    );
    report_written(&out.commit()?);
    Ok(())
}

fn matrix_csv(g: &DenseGraph) -> Vec<u8> {
    let mut s = String::new();
    for row in g.weights().rows() {
        let cells: Vec<String> = row.iter().map(|&v| num(v)).collect();
        s.push_str(&cells.join(","));
        s.push_str("\r\n");
    }
    s.into_bytes()
}

pub fn layers(path: &Path, g: &GraphArgs, mut out: Output) -> Result<(), CliError> {
    let model = load_model(path)?;
    let canonical = canonical_layers(&model, &g.pipeline())?;
    let mut summary = Table::new(&["layer", "kind", "nodes", "file"]);
    for c in &canonical {
        let l = c.layer_index;
        let agg = format!("layer{l:02}_aggregation.csv");
        let aff = format!("layer{l:02}_affine.csv");
        let affine = layer_affine(&model, l)?;
        summary.push(vec![
            l.to_string(),
            "aggregation".into(),
            c.graph.n().to_string(),
            agg.clone(),
        ]);
        summary.push(vec![
            l.to_string(),
            "affine".into(),
            affine.n().to_string(),
            aff.clone(),
        ]);
        if out.wants(crate::output::Format::Csv) {
            out.stage(agg, matrix_csv(&c.graph));
            out.stage(aff, matrix_csv(&affine));
        }
    }
    out.stage_csv("layers.csv", &summary)?;
    report_written(&out.commit()?);
    Ok(())
}

pub fn compose(path: &Path, g: &GraphArgs, mut out: Output) -> Result<(), CliError> {
    let model = load_model(path)?;
    let composed = final_aggregation(&model, &g.pipeline())?;
    let m = graph_measures(&composed, g.tau)?;
    if out.wants(crate::output::Format::Csv) {
        out.stage("composed.csv", matrix_csv(&composed));
    }

    #[derive(Serialize)]
    struct Report {
        archive: String,
        options: Options,
        nodes: usize,
        tau: f64,
        measures: GraphMeasures,
    }
    out.stage_json(
        "composed.json",
        &Report {
            archive: path.display().to_string(),
            options: g.into(),
            nodes: composed.n(),
            tau: g.tau.resolve(composed.n()),
            measures: m,
        },
    )?;
    println!(
        "composed: {} nodes, C = {}, L = {}",
        composed.n(),
        num(m.clustering),
        num(m.path_length)
    );
    report_written(&out.commit()?);
    Ok(())
}
