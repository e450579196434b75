use std::io::{Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::metrics::{EnsembleStats, MetricSeries};

/// One replicate sample of a coverage curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageRow {
    pub time_s: f64,
    pub run_id: usize,
    pub coverage: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub time_s: f64,
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HittingRow {
    pub tile_x: f64,
    pub tile_y: f64,
    pub alpha: f64,
    pub t0_pde_s: Option<f64>,
    pub t0_analytic_s: f64,
    pub t0_agents_mean_s: Option<f64>,
    pub t0_agents_std_s: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdeCoverageRow {
    pub time_s: f64,
    pub coverage: f64,
    pub coverage_avg: f64,
}

pub fn write_rows<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<T: DeserializeOwned, R: Read>(input: R) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for rec in r.deserialize() {
        out.push(rec?);
    }
    Ok(out)
}

pub fn write_rows_to<T: Serialize>(rows: &[T], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_rows(rows, std::io::BufWriter::new(file))
}

pub fn coverage_rows(series: &[MetricSeries]) -> Vec<CoverageRow> {
    let mut rows = Vec::new();
    for (run_id, s) in series.iter().enumerate() {
        for (&time_s, &coverage) in s.times.iter().zip(&s.values) {
            rows.push(CoverageRow { time_s, run_id, coverage });
        }
    }
    rows
}

/// Inverse of [`coverage_rows`].
pub fn series_from_rows(rows: &[CoverageRow]) -> Result<Vec<MetricSeries>> {
    let runs = rows.iter().map(|r| r.run_id + 1).max().unwrap_or(0);
    let mut times = vec![Vec::new(); runs];
    let mut values = vec![Vec::new(); runs];
    for r in rows {
        times[r.run_id].push(r.time_s);
        values[r.run_id].push(r.coverage);
    }
    times.into_iter().zip(values).map(|(t, v)| MetricSeries::new(t, v)).collect()
}

pub fn aggregate_rows(stats: &EnsembleStats) -> Vec<AggregateRow> {
    (0..stats.times.len())
        .map(|k| AggregateRow {
            time_s: stats.times[k],
            mean: stats.mean[k],
            std: stats.std[k],
            n: stats.n,
        })
        .collect()
}

pub fn stats_from_rows(rows: &[AggregateRow]) -> EnsembleStats {
    EnsembleStats {
        times: rows.iter().map(|r| r.time_s).collect(),
        mean: rows.iter().map(|r| r.mean).collect(),
        std: rows.iter().map(|r| r.std).collect(),
        n: rows.first().map_or(0, |r| r.n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coverage_rows_round_trip() {
        let a = MetricSeries::new(vec![0.0, 1.0], vec![0.1, 0.30000000000000004]).unwrap();
        let b = MetricSeries::new(vec![0.0, 1.0], vec![1e-300, 1.0 / 3.0]).unwrap();
        let rows = coverage_rows(&[a.clone(), b.clone()]);
        let mut buf = Vec::new();
        write_rows(&rows, &mut buf).unwrap();
        assert!(buf.starts_with(b"time_s,run_id,coverage\n"));
        let back: Vec<CoverageRow> = read_rows(&buf[..]).unwrap();
        assert_eq!(back, rows);
        assert_eq!(series_from_rows(&back).unwrap(), vec![a, b]);
    }

    #[test]
    fn optional_cells_round_trip() {
        let rows = vec![HittingRow {
            tile_x: -0.55,
            tile_y: 0.55,
            alpha: 1.3,
            t0_pde_s: None,
            t0_analytic_s: 12.5,
            t0_agents_mean_s: Some(3.25),
            t0_agents_std_s: None,
        }];
        let mut buf = Vec::new();
        write_rows(&rows, &mut buf).unwrap();
        assert_eq!(read_rows::<HittingRow, _>(&buf[..]).unwrap(), rows);
    }
}
