use std::path::PathBuf;
use std::process::ExitCode;

use buoyspec::inference::Objective;
use buoyspec_pipeline::format::float;
use buoyspec_pipeline::*;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "buoyspec",
    version,
    about = "Directional wave spectra from buoy displacement records"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Args, Clone, Default)]
struct Band {
    #[arg(long)]
    low_cut: Option<f64>,
    #[arg(long)]
    high_cut: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic record of simulated sea states.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long)]
        sea_states: Option<usize>,
        #[arg(long)]
        omega_p_end: Option<f64>,
        /// File name inside the output directory.
        #[arg(long)]
        output: Option<String>,
    },
    /// Fit the parametric model to every sea state of a record.
    Fit {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        band: Band,
        #[arg(long, value_parser = parse_objective)]
        objective: Option<Objective>,
    },
    /// Monte Carlo comparison of the estimators on simulated scenarios.
    SimStudy {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        replications: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        /// Ignore replications already in the output directory.
        #[arg(long)]
        fresh: bool,
    },
    /// Spectrogram, error function, wave height and mean direction tables.
    Diagnose {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        band: Band,
    },
    /// List the sea states of a record.
    Partition {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

fn parse_objective(s: &str) -> std::result::Result<Objective, String> {
    match s {
        "debiased" => Ok(Objective::Debiased),
        "whittle" => Ok(Objective::Whittle),
        _ => Err(format!("unknown objective `{s}` (debiased or whittle)")),
    }
}

fn load(common: &Common) -> Result<PipelineConfig> {
    let mut cfg = match &common.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(d) = &common.out_dir {
        cfg.out_dir = d.clone();
    }
    if let Some(t) = common.threads {
        cfg.threads = t;
    }
    Ok(cfg)
}

fn apply_band(cfg: &mut PipelineConfig, band: &Band) {
    if let Some(l) = band.low_cut {
        cfg.low_cut = l;
    }
    if let Some(h) = band.high_cut {
        cfg.high_cut = Some(h);
    }
}

fn input_record(cfg: &mut PipelineConfig, input: Option<PathBuf>) -> Result<RecordFile> {
    if input.is_some() {
        cfg.input = input;
    }
    let path = cfg.input.clone().ok_or_else(|| {
        PipelineError::Usage("no input record (use --input or `input` in the config)".into())
    })?;
    ingest(&path)
}

fn create_out_dir(cfg: &PipelineConfig) -> Result<()> {
    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| PipelineError::io(&cfg.out_dir, e))
}

fn create_file(path: &std::path::Path) -> Result<std::io::BufWriter<std::fs::File>> {
    Ok(std::io::BufWriter::new(
        std::fs::File::create(path).map_err(|e| PipelineError::io(path, e))?,
    ))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            common,
            scenario,
            sea_states,
            omega_p_end,
            output,
        } => {
            let mut cfg = load(&common)?;
            if let Some(s) = scenario {
                cfg.simulate.scenario = s;
            }
            if let Some(k) = sea_states {
                cfg.simulate.sea_states = k;
            }
            if omega_p_end.is_some() {
                cfg.simulate.omega_p_end = omega_p_end;
            }
            if let Some(o) = output {
                cfg.simulate.output = o;
            }
            let record = simulate_record(&cfg)?;
            create_out_dir(&cfg)?;
            let path = cfg.out_dir.join(&cfg.simulate.output);
            let mut f = create_file(&path)?;
            write_record(&record, &mut f).map_err(|e| PipelineError::io(&path, e))?;
            log::info!("wrote {}", path.display());
        }
        Command::Fit {
            common,
            input,
            band,
            objective,
        } => {
            let mut cfg = load(&common)?;
            apply_band(&mut cfg, &band);
            if let Some(o) = objective {
                cfg.objective = o;
            }
            let record = input_record(&mut cfg, input)?;
            let rows = run_fits(&record, &cfg)?;
            create_out_dir(&cfg)?;
            let path = cfg.out_dir.join("fits.csv");
            write_fit_table(&rows, create_file(&path)?)?;
            let failed = rows.iter().filter(|r| !r.result.converged).count();
            log::info!(
                "wrote {} ({} sea states, {failed} not converged)",
                path.display(),
                rows.len()
            );
        }
        Command::SimStudy {
            common,
            replications,
            n,
            fresh,
        } => {
            let mut cfg = load(&common)?;
            if let Some(r) = replications {
                cfg.study.replications = r;
            }
            if let Some(n) = n {
                cfg.study.n = n;
            }
            if fresh {
                cfg.study.resume = false;
            }
            run_sim_study(&cfg)?;
            log::info!("wrote study outputs to {}", cfg.out_dir.display());
        }
        Command::Diagnose {
            common,
            input,
            band,
        } => {
            let mut cfg = load(&common)?;
            apply_band(&mut cfg, &band);
            let record = input_record(&mut cfg, input)?;
            let diags = diagnose(&record, &cfg)?;
            write_diagnostics(&diags, &cfg.out_dir)?;
        }
        Command::Partition { common, input } => {
            let mut cfg = load(&common)?;
            let record = input_record(&mut cfg, input)?;
            let states = partition_sea_states(&record, &cfg)?;
            create_out_dir(&cfg)?;
            let path = cfg.out_dir.join("sea_states.csv");
            let mut w = csv::Writer::from_writer(create_file(&path)?);
            let err = |e: csv::Error| PipelineError::Data(e.to_string());
            w.write_record(["sea_state", "start_time", "first_row", "n", "hs"])
                .map_err(err)?;
            for s in &states {
                w.write_record([
                    s.index.to_string(),
                    s.start_time.clone(),
                    s.first_row.to_string(),
                    s.sample.len().to_string(),
                    float(s.sample.significant_wave_height()),
                ])
                .map_err(err)?;
            }
            w.flush().map_err(|e| PipelineError::io(&path, e))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
