use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use levy_swarm::harness::{
    self, io::write_rows_to, pde_rows, with_workers, InitialCondition, SweepSpec,
};
use levy_swarm::model::{ExperimentConfig, Mode, RngStream};
use levy_swarm::params::ModelParams;
use levy_swarm::sampling::{sample_run_time, sample_stable_step, sample_turn};
use levy_swarm::{Error, Result};

#[derive(Parser)]
#[command(name = "levy-swarm", version, about = "Lévy-walk swarm coverage: agents, continuum model and comparisons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Experiment JSON (`agents`, `pde`) or sweep JSON (`compare`, `sweep`).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Model parameter JSON; missing keys take their defaults.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
}

#[derive(Subcommand)]
enum Command {
    /// Agent replicates: coverage curves and hit maps.
    Agents(Common),
    /// One continuum run: coverage, tile hitting times, final density.
    Pde {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "ring")]
        ic: InitialCondition,
    },
    /// Agents against the continuum; exits with 2 when a point leaves the band.
    Compare(Common),
    /// Full sweep with every figure data set.
    Sweep(Common),
    /// Raw draws of step length, turn angle and run time.
    SampleAudit {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1.5)]
        alpha: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Malformed(format!("cannot read {}: {e}", path.display())))
}

fn params(c: &Common) -> Result<ModelParams> {
    match &c.params {
        Some(p) => ModelParams::from_json(&read(p)?),
        None => Ok(ModelParams::default()),
    }
}

fn experiment(c: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &c.config {
        Some(p) => ExperimentConfig::from_json(&read(p)?)?,
        None => ExperimentConfig::reference(20, 1.3, Mode::Point),
    };
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(m) = c.mode {
        cfg.mode = m;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn sweep(c: &Common) -> Result<SweepSpec> {
    let mut s = match &c.config {
        Some(p) => SweepSpec::from_json(&read(p)?)?,
        None => SweepSpec {
            n_values: vec![20],
            alpha_values: vec![1.3],
            base: ExperimentConfig::reference(20, 1.3, Mode::Point),
        },
    };
    if let Some(seed) = c.seed {
        s.base.seed = seed;
    }
    if let Some(m) = c.mode {
        s.base.mode = m;
    }
    s.validate()?;
    Ok(s)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Agents(c) => {
            let (cfg, p) = (experiment(&c)?, params(&c)?);
            let e = with_workers(c.workers, || harness::run_agents(&cfg, &p))??;
            std::fs::create_dir_all(&c.out)?;
            write_rows_to(&harness::io::coverage_rows(&e.series), &c.out.join("agents_coverage.csv"))?;
            write_rows_to(&harness::io::aggregate_rows(&e.stats), &c.out.join("agents_aggregate.csv"))?;
            let first = &e.maps[0];
            first.write_csv(std::fs::File::create(c.out.join("hitmap_run0.csv"))?)?;
            first.write_pgm(std::fs::File::create(c.out.join("hitmap_run0.pgm"))?, cfg.duration_s)?;
            println!("{} replicates, final mean coverage {:.4}", e.series.len(), e.stats.mean.last().unwrap_or(&0.0));
            Ok(true)
        }
        Command::Pde { common: c, ic } => {
            let (cfg, p) = (experiment(&c)?, params(&c)?);
            let k = harness::continuum_coefficients(cfg.alpha, &p)?;
            let r = harness::run_pde_with(&cfg, &p, k, ic)?;
            std::fs::create_dir_all(&c.out)?;
            write_rows_to(&pde_rows(&r), &c.out.join("pde_coverage.csv"))?;
            let rows: Vec<harness::io::HittingRow> = r
                .tiles
                .iter()
                .map(|t| harness::io::HittingRow {
                    tile_x: t.tile.center.x,
                    tile_y: t.tile.center.y,
                    alpha: cfg.alpha,
                    t0_pde_s: t.t0_pde,
                    t0_analytic_s: t.t0_analytic,
                    t0_agents_mean_s: None,
                    t0_agents_std_s: None,
                })
                .collect();
            write_rows_to(&rows, &c.out.join("hitting_times.csv"))?;
            r.final_field.write_csv(std::fs::File::create(c.out.join("density_final.csv"))?)?;
            r.final_field.write_binary(std::fs::File::create(c.out.join("density_final.ufld"))?)?;
            println!(
                "D = {:.4e}, final coverage {:.4}, {} steps",
                r.coeffs.d_eff,
                r.coverage.last().unwrap_or(0.0),
                r.report.steps
            );
            Ok(true)
        }
        Command::Compare(c) => {
            let (s, p) = (sweep(&c)?, params(&c)?);
            let report = with_workers(c.workers, || harness::compare(&s, &p))??;
            report.write_outputs(&c.out)?;
            print!("{}", report.summary_text());
            Ok(report.passed())
        }
        Command::Sweep(c) => {
            let (s, p) = (sweep(&c)?, params(&c)?);
            let report = with_workers(c.workers, || harness::run_sweep(&s, &p, &c.out))??;
            print!("{}", report.summary_text());
            Ok(true)
        }
        Command::SampleAudit { common: c, alpha, samples } => {
            let p = params(&c)?;
            let k = p.agent_kinetics(alpha, Mode::Kinetic);
            k.validate()?;
            let mut rng = RngStream::with_domain(c.seed.unwrap_or(1), 0, 0, 2);
            std::fs::create_dir_all(&c.out)?;
            let mut w = csv::Writer::from_path(c.out.join("sample_audit.csv")).map_err(Error::from)?;
            w.write_record(["r", "theta", "tau"]).map_err(Error::from)?;
            for _ in 0..samples {
                let r = sample_stable_step(alpha, &mut rng);
                let theta = sample_turn(&p.turn_kernel, 0.0, &mut rng);
                let tau = sample_run_time(&k, &mut rng);
                w.write_record(&[r.to_string(), theta.to_string(), tau.to_string()]).map_err(Error::from)?;
            }
            w.flush()?;
            Ok(true)
        }
    }
}
