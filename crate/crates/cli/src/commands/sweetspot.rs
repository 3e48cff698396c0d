use std::collections::BTreeMap;
use std::path::Path;

use relgraph::analysis::{
    fit_quadratic, linear_correlation, sweet_spot, Correlation, Curvature, MeasureName,
    MeasurePoint, QuadraticFit, SweetSpot,
};
use relgraph::reference::{CLUSTERING_SWEET_SPOT, PATH_LENGTH_SWEET_SPOT};
use serde::Serialize;

use super::report_written;
use crate::error::CliError;
use crate::output::{num, Output, Table};
use crate::svg::{sample, Chart, Series, Style};

#[derive(Serialize)]
struct FitRow {
    dataset: String,
    measure: MeasureName,
    n: usize,
    fit: Option<QuadraticFit>,
    correlation: Option<Correlation>,
    error: Option<String>,
}

#[derive(Serialize)]
struct Interval {
    #[serde(flatten)]
    spot: Option<SweetSpot>,
    measure: MeasureName,
    single_dataset: bool,
    reference: (f64, f64),
    error: Option<String>,
}

fn read_points(path: &Path) -> Result<Vec<MeasurePoint>, CliError> {
    let file =
        std::fs::File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut points = Vec::new();
    for rec in csv::Reader::from_reader(file).deserialize() {
        let p: MeasurePoint = rec?;
        if ![p.measure_c, p.measure_l, p.accuracy]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(CliError::input(format!(
                "non-finite value for model {}",
                p.model_id
            )));
        }
        points.push(p);
    }
    if points.is_empty() {
        return Err(CliError::input(format!("{} has no rows", path.display())));
    }
    Ok(points)
}

fn value(p: &MeasurePoint, m: MeasureName) -> f64 {
    match m {
        MeasureName::Clustering => p.measure_c,
        MeasureName::PathLength => p.measure_l,
    }
}

pub fn sweetspot(path: &Path, mut out: Output) -> Result<(), CliError> {
    let points = read_points(path)?;
    let mut by_dataset: BTreeMap<&str, Vec<&MeasurePoint>> = BTreeMap::new();
    for p in &points {
        by_dataset.entry(&p.dataset).or_default().push(p);
    }

    let measures = [MeasureName::Clustering, MeasureName::PathLength];
    let mut fits = Vec::new();
    for m in measures {
        for (dataset, pts) in &by_dataset {
            let xy: Vec<(f64, f64)> = pts.iter().map(|p| (value(p, m), p.accuracy)).collect();
            let fit = fit_quadratic(&xy);
            let error = match &fit {
                Ok(f) if f.curvature == Curvature::Degenerate => Some("degenerate fit".to_string()),
                Ok(_) => None,
                Err(e) => Some(e.to_string()),
            };
            fits.push(FitRow {
                dataset: dataset.to_string(),
                measure: m,
                n: xy.len(),
                fit: fit.ok(),
                correlation: linear_correlation(&xy).ok(),
                error,
            });
        }
    }

    let mut intervals = Vec::new();
    for m in measures {
        let reference = match m {
            MeasureName::Clustering => CLUSTERING_SWEET_SPOT,
            MeasureName::PathLength => PATH_LENGTH_SWEET_SPOT,
        };
        let rows: Vec<&FitRow> = fits.iter().filter(|f| f.measure == m).collect();
        let usable: Vec<(String, QuadraticFit)> = rows
            .iter()
            .filter_map(|r| {
                r.fit
                    .filter(|_| r.error.is_none())
                    .map(|f| (r.dataset.clone(), f))
            })
            .collect();
        let single = rows.len() == 1;
        let (spot, error) = if usable.len() < rows.len() {
            (None, Some("some fits are degenerate".to_string()))
        } else if single {
            let (name, f) = &usable[0];
            let x = f.extremum_x.expect("usable fits have an extremum");
            eprintln!("warning: only one dataset ({name}); the {m} interval has zero width");
            let spot = SweetSpot {
                measure: m,
                low: x,
                high: x,
                datasets: vec![name.clone()],
            };
            (Some(spot), None)
        } else {
            match sweet_spot(m, &usable) {
                Ok(s) => (Some(s), None),
                Err(e) => (None, Some(e.to_string())),
            }
        };
        intervals.push(Interval {
            spot,
            measure: m,
            single_dataset: single,
            reference,
            error,
        });
    }

    let mut fit_table = Table::new(&[
        "dataset",
        "measure",
        "n",
        "a",
        "b",
        "c",
        "extremum",
        "curvature",
        "r_squared",
        "pearson_r",
        "t_statistic",
        "flag",
    ]);
    for r in &fits {
        let f = r.fit.as_ref();
        let cell = |v: Option<f64>| v.map(num).unwrap_or_default();
        fit_table.push(vec![
            r.dataset.clone(),
            r.measure.to_string(),
            r.n.to_string(),
            cell(f.map(|f| f.a)),
            cell(f.map(|f| f.b)),
            cell(f.map(|f| f.c)),
            cell(f.and_then(|f| f.extremum_x)),
            f.map(|f| format!("{:?}", f.curvature).to_lowercase())
                .unwrap_or_default(),
            cell(f.map(|f| f.r_squared)),
            cell(r.correlation.map(|c| c.r)),
            cell(r.correlation.map(|c| c.t_statistic)),
            r.error.clone().unwrap_or_default(),
        ]);
    }
    let mut spot_table = Table::new(&[
        "measure",
        "low",
        "high",
        "datasets",
        "single_dataset",
        "reference_low",
        "reference_high",
        "flag",
    ]);
    for i in &intervals {
        spot_table.push(vec![
            i.measure.to_string(),
            i.spot.as_ref().map(|s| num(s.low)).unwrap_or_default(),
            i.spot.as_ref().map(|s| num(s.high)).unwrap_or_default(),
            i.spot
                .as_ref()
                .map(|s| s.datasets.join(";"))
                .unwrap_or_default(),
            i.single_dataset.to_string(),
            num(i.reference.0),
            num(i.reference.1),
            i.error.clone().unwrap_or_default(),
        ]);
    }
    out.stage_csv("fits.csv", &fit_table)?;
    out.stage_csv("sweetspot.csv", &spot_table)?;

    #[derive(Serialize)]
    struct Report<'a> {
        points: String,
        fits: &'a [FitRow],
        intervals: &'a [Interval],
    }
    out.stage_json(
        "sweetspot.json",
        &Report {
            points: path.display().to_string(),
            fits: &fits,
            intervals: &intervals,
        },
    )?;
    for m in measures {
        out.stage_svg(format!("sweetspot_{m}.svg").as_str(), || {
            plot(m, &by_dataset, &fits)
        });
    }

    for r in &fits {
        let ext = r
            .fit
            .and_then(|f| f.extremum_x)
            .map(num)
            .unwrap_or_else(|| "-".into());
        let flag = r
            .error
            .as_deref()
            .map(|e| format!("  [{e}]"))
            .unwrap_or_default();
        println!(
            "{:<16} {:<12} extremum {ext}{flag}",
            r.dataset,
            r.measure.to_string()
        );
    }
    for i in &intervals {
        match &i.spot {
            Some(s) => println!(
                "{} sweet spot: [{}, {}]",
                i.measure,
                num(s.low),
                num(s.high)
            ),
            None => println!("{} sweet spot: none", i.measure),
        }
    }
    println!(
        "reference: clustering [{}, {}], path length [{}, {}]",
        num(CLUSTERING_SWEET_SPOT.0),
        num(CLUSTERING_SWEET_SPOT.1),
        num(PATH_LENGTH_SWEET_SPOT.0),
        num(PATH_LENGTH_SWEET_SPOT.1)
    );
    report_written(&out.commit()?);

    if let Some(bad) = fits.iter().find(|r| r.error.is_some()) {
        return Err(CliError::Degenerate(format!(
            "{} fit for {}: {}",
            bad.measure,
            bad.dataset,
            bad.error.as_deref().unwrap_or_default()
        )));
    }
    Ok(())
}

fn plot(
    m: MeasureName,
    by_dataset: &BTreeMap<&str, Vec<&MeasurePoint>>,
    fits: &[FitRow],
) -> String {
    let mut series = Vec::new();
    for (i, (dataset, pts)) in by_dataset.iter().enumerate() {
        let xy: Vec<(f64, f64)> = pts.iter().map(|p| (value(p, m), p.accuracy)).collect();
        let (lo, hi) = xy
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
                (a.min(p.0), b.max(p.0))
            });
        let fit = fits
            .iter()
            .find(|f| f.measure == m && f.dataset == *dataset)
            .and_then(|f| f.fit);
        series.push(Series::new(*dataset, xy, Style::Markers));
        if let Some(f) = fit {
            series.push(
                Series::new("", sample(lo, hi, 64, |x| f.eval(x)), Style::Line).colored_like(2 * i),
            );
        }
    }
    Chart {
        title: format!("accuracy against {m}"),
        x_label: match m {
            MeasureName::Clustering => "clustering coefficient".into(),
            MeasureName::PathLength => "average path length".into(),
        },
        y_label: "accuracy".into(),
        y2_label: None,
        series,
    }
    .render()
}
