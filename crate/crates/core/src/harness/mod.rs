//! Experiment orchestration: sweeps over swarm size and exponent, replicate
//! fan-out, agent/continuum comparison and CSV output.

mod compare;
mod figures;
pub mod io;
mod runs;

pub use compare::{
    band_fraction, calibrated_coefficients, compare, compare_runs, fit_diffusivity, pde_rows, ComparisonPoint,
    ComparisonReport, SpreadStat, Summary, SummaryPoint, BAND_THRESHOLD,
};
pub use figures::{
    emit_figure_data, figure_file, run_sweep, CovVsAlphaRow, CovVsTRow, Figure, HitmapRow, IcRow, NScalingRow, T50Row,
    N_SCALING_SIZES,
};
pub use runs::{
    continuum_coefficients, density_scale, run_agents, run_pde, run_pde_with, with_workers, AgentEnsemble,
    InitialCondition, PdeOutcome, SweepSpec, TileHitting,
};
