//! Aggregates a run directory into `aggregate.csv` and SVG plots.

use crate::io;
use anyhow::{anyhow, Context, Result};
use plotters::prelude::*;
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Clone, Debug, Default)]
struct Run {
    key: (String, String, String, String),
    delta0: Option<f64>,
    d0: Option<f64>,
    framework: Option<f64>,
    engine: Option<f64>,
    ratio: Option<f64>,
    engine_ratio: Option<f64>,
}

fn field(v: &str) -> Option<f64> {
    if v.is_empty() {
        None
    } else {
        v.parse().ok()
    }
}

fn read_runs(path: &Path) -> Result<Vec<Run>> {
    let mut rd = csv::Reader::from_path(path).with_context(|| format!("{}: cannot read", path.display()))?;
    let headers = rd.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name).ok_or_else(|| anyhow!("{}:1: missing column {name}", path.display()));
    let c: Vec<usize> = ["source", "drop_rate", "add_rate", "radius", "delta_at_zero_d", "d_at_zero_delta", "framework_cost", "engine_cost", "framework_ratio", "engine_ratio"]
        .iter()
        .map(|n| col(n))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| anyhow!("{}:{}: {e}", path.display(), i + 2))?;
        let s = |j: usize| rec.get(c[j]).unwrap_or("").to_string();
        let source = if s(0) == "perturbed" { "perturbed".to_string() } else { s(0) };
        out.push(Run {
            key: (source, s(1), s(2), s(3)),
            delta0: field(&s(4)),
            d0: field(&s(5)),
            framework: field(&s(6)),
            engine: field(&s(7)),
            ratio: field(&s(8)),
            engine_ratio: field(&s(9)),
        });
    }
    Ok(out)
}

fn read_frontier(path: &Path) -> Result<Vec<(f64, f64)>> {
    let mut rd = csv::Reader::from_path(path).with_context(|| format!("{}: cannot read", path.display()))?;
    let mut out = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| anyhow!("{}:{}: {e}", path.display(), i + 2))?;
        let get = |j: usize| rec.get(j).and_then(field).ok_or_else(|| anyhow!("{}:{}: bad number", path.display(), i + 2));
        out.push((get(1)?, get(2)?));
    }
    Ok(out)
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let v: Vec<f64> = xs.collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn opt_str(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.6}")).unwrap_or_default()
}

fn scatter(path: &Path, title: &str, x_label: &str, y_label: &str, series: &[(&str, Vec<(f64, f64)>)]) -> Result<()> {
    let pts = series.iter().flat_map(|(_, p)| p.iter());
    let (mut x1, mut y1) = (1e-9f64, 1e-9f64);
    for &(x, y) in pts {
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    let mut svg = String::new();
    {
        let root = SVGBackend::with_string(&mut svg, (720, 480)).into_drawing_area();
        root.fill(&WHITE).map_err(|e| anyhow!("{e}"))?;
        let mut chart = ChartBuilder::on(&root)
            .caption(title, ("sans-serif", 20))
            .margin(12)
            .x_label_area_size(40)
            .y_label_area_size(56)
            .build_cartesian_2d(0f64..x1 * 1.05, 0f64..y1 * 1.1)
            .map_err(|e| anyhow!("{e}"))?;
        chart.configure_mesh().x_desc(x_label).y_desc(y_label).draw().map_err(|e| anyhow!("{e}"))?;
        let colors = [BLUE, RED, GREEN, MAGENTA];
        for (i, (name, points)) in series.iter().enumerate() {
            let color = colors[i % colors.len()];
            chart
                .draw_series(points.iter().map(|&p| Circle::new(p, 3, color.filled())))
                .map_err(|e| anyhow!("{e}"))?
                .label(*name)
                .legend(move |(x, y)| Circle::new((x, y), 3, color.filled()));
        }
        chart.configure_series_labels().background_style(WHITE).border_style(BLACK).draw().map_err(|e| anyhow!("{e}"))?;
        root.present().map_err(|e| anyhow!("{e}"))?;
    }
    io::write(path, svg)
}

/// Writes `aggregate.csv`, `ratio_vs_delta.svg`, `ratio_vs_d.svg` and
/// `frontier.svg` into `out`.
pub fn report(dir: &Path, out: &Path) -> Result<usize> {
    let runs = read_runs(&dir.join("runs.csv"))?;
    let frontier = read_frontier(&dir.join("frontier.csv"))?;
    let mut groups: BTreeMap<(String, String, String, String), Vec<&Run>> = BTreeMap::new();
    for r in &runs {
        groups.entry(r.key.clone()).or_default().push(r);
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "source",
        "drop_rate",
        "add_rate",
        "radius",
        "episodes",
        "mean_delta_at_zero_d",
        "mean_d_at_zero_delta",
        "mean_framework_cost",
        "mean_engine_cost",
        "mean_framework_ratio",
        "max_framework_ratio",
        "mean_engine_ratio",
    ])?;
    for (key, rs) in &groups {
        let max_ratio = rs.iter().filter_map(|r| r.ratio).fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))));
        w.write_record([
            key.0.clone(),
            key.1.clone(),
            key.2.clone(),
            key.3.clone(),
            rs.len().to_string(),
            opt_str(mean(rs.iter().filter_map(|r| r.delta0))),
            opt_str(mean(rs.iter().filter_map(|r| r.d0))),
            opt_str(mean(rs.iter().filter_map(|r| r.framework))),
            opt_str(mean(rs.iter().filter_map(|r| r.engine))),
            opt_str(mean(rs.iter().filter_map(|r| r.ratio))),
            opt_str(max_ratio),
            opt_str(mean(rs.iter().filter_map(|r| r.engine_ratio))),
        ])?;
    }
    io::write(&out.join("aggregate.csv"), w.into_inner()?)?;

    // cost stands in for the ratio when no optimum was available
    let has_ratio = runs.iter().any(|r| r.ratio.is_some());
    let y = |r: &Run| if has_ratio { r.ratio } else { r.framework };
    let y_label = if has_ratio { "ALG / OPT" } else { "ALG" };
    let by_delta: Vec<(f64, f64)> = runs.iter().filter_map(|r| Some((r.delta0?, y(r)?))).collect();
    let by_d: Vec<(f64, f64)> = runs.iter().filter_map(|r| Some((r.d0?, y(r)?))).collect();
    scatter(&out.join("ratio_vs_delta.svg"), "ratio vs outliers at D = 0", "delta", y_label, &[("framework", by_delta)])?;
    scatter(&out.join("ratio_vs_d.svg"), "ratio vs matching cost at delta = 0", "D", y_label, &[("framework", by_d)])?;
    scatter(&out.join("frontier.svg"), "error frontier", "delta", "D", &[("frontier points", frontier)])?;
    Ok(groups.len())
}
