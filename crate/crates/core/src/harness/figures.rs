use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::compare::{compare, point_label, ComparisonReport};
use crate::harness::io::write_rows_to;
use crate::harness::runs::{run_pde_with, InitialCondition, SweepSpec};
use crate::metrics::hitmap_empirical;
use crate::params::ModelParams;

/// Figure data sets that can be emitted from a comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Figure {
    CovVsT,
    CovVsAlpha,
    T50VsAlpha,
    Hitmap,
    TileHitting,
    IcSensitivity,
    NScaling,
}

impl Figure {
    pub const ALL: [Figure; 7] = [
        Figure::CovVsT,
        Figure::CovVsAlpha,
        Figure::T50VsAlpha,
        Figure::Hitmap,
        Figure::TileHitting,
        Figure::IcSensitivity,
        Figure::NScaling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Figure::CovVsT => "cov_vs_t",
            Figure::CovVsAlpha => "cov_vs_alpha",
            Figure::T50VsAlpha => "t50_vs_alpha",
            Figure::Hitmap => "hitmap",
            Figure::TileHitting => "tile_hitting",
            Figure::IcSensitivity => "ic_sensitivity",
            Figure::NScaling => "n_scaling",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovVsTRow {
    pub time_s: f64,
    pub mean: f64,
    pub std: f64,
    pub n: usize,
    pub pde: f64,
    pub pde_avg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovVsAlphaRow {
    pub alpha: f64,
    pub mean: f64,
    pub std: f64,
    pub n: usize,
    pub pde: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct T50Row {
    pub alpha: f64,
    pub t50_mean_s: Option<f64>,
    pub t50_std_s: Option<f64>,
    pub reached: usize,
    pub n: usize,
    pub t50_pde_s: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HitmapRow {
    pub i: usize,
    pub j: usize,
    pub mean_t_s: Option<f64>,
    pub unreached: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IcRow {
    pub time_s: f64,
    pub ring: f64,
    pub spread: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NScalingRow {
    pub n_robots: usize,
    pub time_s: f64,
    pub coverage: f64,
}

/// Swarm sizes of the continuum-only size comparison, on top of the sweep's.
pub const N_SCALING_SIZES: [usize; 3] = [5, 20, 100];

pub fn figure_file(which: Figure, n: Option<usize>, alpha: Option<f64>) -> String {
    let n = n.map_or("all".to_string(), |n| n.to_string());
    let a = alpha.map_or("all".to_string(), |a| a.to_string());
    format!("fig_{}_N{n}_a{a}.csv", which.name())
}

/// Writes the CSVs of one figure into `out` and returns their paths.
pub fn emit_figure_data(report: &ComparisonReport, which: Figure, out: &Path) -> Result<Vec<PathBuf>> {
    if report.points.is_empty() {
        return Err(Error::UnsupportedFigure(format!("{}: the report is empty", which.name())));
    }
    std::fs::create_dir_all(out)?;
    let mut written = Vec::new();
    let mut put = |name: String, write: &dyn Fn(&Path) -> Result<()>| -> Result<()> {
        let path = out.join(name);
        write(&path)?;
        written.push(path);
        Ok(())
    };
    let alphas = &report.sweep.alpha_values;
    match which {
        Figure::CovVsT => {
            for p in &report.points {
                let s = &p.agents.stats;
                let rows: Vec<CovVsTRow> = (0..s.times.len())
                    .map(|k| CovVsTRow {
                        time_s: s.times[k],
                        mean: s.mean[k],
                        std: s.std[k],
                        n: s.n,
                        pde: p.pde.coverage.values[k],
                        pde_avg: p.pde.coverage_avg.values[k],
                    })
                    .collect();
                put(figure_file(which, Some(p.n_robots), Some(p.alpha)), &|f| write_rows_to(&rows, f))?;
            }
        }
        Figure::CovVsAlpha | Figure::T50VsAlpha | Figure::TileHitting => {
            if which != Figure::TileHitting && alphas.len() < 2 {
                return Err(Error::UnsupportedFigure(format!("{} needs at least two exponents", which.name())));
            }
            for &n in &report.sweep.n_values {
                let pts: Vec<_> = report.points.iter().filter(|p| p.n_robots == n).collect();
                let name = figure_file(which, Some(n), None);
                match which {
                    Figure::CovVsAlpha => {
                        let rows: Vec<CovVsAlphaRow> = pts
                            .iter()
                            .map(|p| CovVsAlphaRow {
                                alpha: p.alpha,
                                mean: p.final_agents.mean.unwrap_or(f64::NAN),
                                std: p.final_agents.std.unwrap_or(f64::NAN),
                                n: p.final_agents.n,
                                pde: p.final_pde,
                            })
                            .collect();
                        put(name, &|f| write_rows_to(&rows, f))?;
                    }
                    Figure::T50VsAlpha => {
                        let rows: Vec<T50Row> = pts
                            .iter()
                            .map(|p| T50Row {
                                alpha: p.alpha,
                                t50_mean_s: p.t50_agents.mean,
                                t50_std_s: p.t50_agents.std,
                                reached: p.t50_agents.reached,
                                n: p.t50_agents.n,
                                t50_pde_s: p.t50_pde,
                            })
                            .collect();
                        put(name, &|f| write_rows_to(&rows, f))?;
                    }
                    _ => {
                        let rows: Vec<_> = pts.iter().flat_map(|p| p.hitting.iter().copied()).collect();
                        put(name, &|f| write_rows_to(&rows, f))?;
                    }
                }
            }
        }
        Figure::Hitmap => {
            for p in &report.points {
                let h = hitmap_empirical(&p.agents.maps)?;
                let mut rows = Vec::with_capacity(h.grid.len());
                for i in 0..h.grid.nx {
                    for j in 0..h.grid.ny {
                        let k = h.grid.flat(i, j);
                        rows.push(HitmapRow {
                            i,
                            j,
                            mean_t_s: h.mean[k],
                            unreached: h.unreached[k],
                        });
                    }
                }
                put(figure_file(which, Some(p.n_robots), Some(p.alpha)), &|f| write_rows_to(&rows, f))?;
                if let Some(pde) = &p.pde.hitmap {
                    let mut rows = Vec::with_capacity(pde.grid.len());
                    for i in 0..pde.grid.nx {
                        for j in 0..pde.grid.ny {
                            let t = pde.times[pde.grid.flat(i, j)];
                            rows.push(HitmapRow {
                                i,
                                j,
                                mean_t_s: t,
                                unreached: usize::from(t.is_none()),
                            });
                        }
                    }
                    let name = format!("fig_hitmap_pde_{}.csv", point_label(p.n_robots, p.alpha));
                    put(name, &|f| write_rows_to(&rows, f))?;
                }
            }
        }
        Figure::IcSensitivity => {
            for p in &report.points {
                let spread = run_pde_with(&p.pde.config, &report.params, p.pde.coeffs, InitialCondition::Spread)?;
                let rows: Vec<IcRow> = (0..p.pde.coverage.len())
                    .map(|k| IcRow {
                        time_s: p.pde.coverage.times[k],
                        ring: p.pde.coverage.values[k],
                        spread: spread.coverage.values[k],
                    })
                    .collect();
                put(figure_file(which, Some(p.n_robots), Some(p.alpha)), &|f| write_rows_to(&rows, f))?;
            }
        }
        Figure::NScaling => {
            let mut sizes: Vec<usize> = N_SCALING_SIZES.iter().chain(&report.sweep.n_values).copied().collect();
            sizes.sort_unstable();
            sizes.dedup();
            for &alpha in alphas {
                let Some(p) = report.points.iter().find(|p| p.alpha == alpha) else {
                    continue;
                };
                let mut rows = Vec::new();
                for &n in &sizes {
                    let mut cfg = p.pde.config.clone();
                    cfg.n_robots = n;
                    cfg.placement = crate::model::Placement::Ring {
                        diameter_m: crate::model::reference_ring_diameter(n),
                    };
                    let run = run_pde_with(&cfg, &report.params, p.pde.coeffs, InitialCondition::Ring)?;
                    for (&time_s, &coverage) in run.coverage.times.iter().zip(&run.coverage.values) {
                        rows.push(NScalingRow {
                            n_robots: n,
                            time_s,
                            coverage,
                        });
                    }
                }
                put(figure_file(which, None, Some(alpha)), &|f| write_rows_to(&rows, f))?;
            }
        }
    }
    Ok(written)
}

/// The full sweep: comparison outputs in `out` and every figure data set
/// the sweep supports in `out/figures`.
pub fn run_sweep(sweep: &SweepSpec, params: &ModelParams, out: &Path) -> Result<ComparisonReport> {
    let report = compare(sweep, params)?;
    report.write_outputs(out)?;
    let fig_dir = out.join("figures");
    for which in Figure::ALL {
        match emit_figure_data(&report, which, &fig_dir) {
            Ok(_) | Err(Error::UnsupportedFigure(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_names_follow_pattern() {
        assert_eq!(figure_file(Figure::CovVsT, Some(20), Some(1.3)), "fig_cov_vs_t_N20_a1.3.csv");
        assert_eq!(figure_file(Figure::CovVsAlpha, Some(5), None), "fig_cov_vs_alpha_N5_aall.csv");
        assert_eq!(figure_file(Figure::NScaling, None, Some(1.5)), "fig_n_scaling_Nall_a1.5.csv");
    }
}
