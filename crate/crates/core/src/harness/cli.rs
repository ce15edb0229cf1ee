use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use super::config::{ExperimentConfig, ExperimentKind};
use super::gradcheck;
use super::runners::{run_experiment, surface_csv};
use crate::benchmarks::{FunctionKind, TestFunction};
use crate::error::{Error, Result};
use crate::network::{Checkpoint, Mlp};
use crate::tsdata::ETT_FEATURES;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "learnact", version, about = "Train and evaluate networks with learnable activations")]
struct Cli {
    /// Experiment config (alternative to the positional argument).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overriding the config's `output_dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed, overriding the config's `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for pentagon sweeps.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment and write its report and artifacts.
    Run {
        #[arg(value_name = "CONFIG")]
        path: Option<PathBuf>,
    },
    /// Finite-difference check of the analytic gradients.
    Gradcheck {
        #[arg(long, default_value_t = 20)]
        settings: usize,
        #[arg(long, default_value_t = 1e-5)]
        step: f64,
    },
    /// Print the parameter count of the network a config describes.
    Paramcount {
        #[arg(value_name = "CONFIG")]
        path: Option<PathBuf>,
    },
    /// Write surface.csv for a trained 2-D checkpoint.
    ExportSurface {
        checkpoint: PathBuf,
        function: String,
        #[arg(long, default_value_t = 101)]
        grid: usize,
    },
}

enum Failure {
    Config(Error),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_config() {
            Failure::Config(e)
        } else {
            Failure::Runtime(e)
        }
    }
}

fn load_config(cli: &Cli, positional: &Option<PathBuf>) -> std::result::Result<ExperimentConfig, Failure> {
    let path = match (positional, &cli.config) {
        (Some(p), None) | (None, Some(p)) => p,
        (Some(_), Some(_)) => return Err(Failure::Config(Error::Usage("give the config once".into()))),
        (None, None) => return Err(Failure::Config(Error::Usage("a config path is required".into()))),
    };
    let mut cfg = ExperimentConfig::load(path).map_err(Failure::Config)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    if let Some(t) = cli.threads {
        if let Some(p) = cfg.pentagon.as_mut() {
            p.threads = t;
        } else if cfg.kind == ExperimentKind::Pentagon {
            cfg.pentagon = Some(super::config::PentagonConfig {
                threads: t,
                ..Default::default()
            });
        }
    }
    cfg.validate().map_err(Failure::Config)?;
    Ok(cfg)
}

fn network_for(cfg: &ExperimentConfig) -> Result<Mlp> {
    let (input, output) = match cfg.kind {
        ExperimentKind::Synthetic | ExperimentKind::Pentagon => (cfg.synthetic.as_ref().map_or(2, |s| s.dim), 1),
        ExperimentKind::Forecast => {
            let f = cfg.forecast.as_ref().ok_or_else(|| Error::Config("missing 'forecast' section".into()))?;
            (f.history * ETT_FEATURES.len(), f.horizon * ETT_FEATURES.len())
        }
    };
    let arch = cfg.network.architecture(input, output)?;
    Mlp::init(&arch, cfg.library()?.as_ref(), cfg.seed)
}

fn execute(cli: &Cli, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Runtime(Error::io("stdout", e));
    match &cli.command {
        Command::Run { path } => {
            let cfg = load_config(cli, path)?;
            let result = run_experiment(&cfg)?;
            let path = result.write(&cfg.output_dir)?;
            let r = &result.report;
            if let Some(m) = r.eval {
                writeln!(out, "{}: eval mse {} mae {}", r.name, m.mse, m.mae).map_err(io)?;
            }
            if let Some(p) = &r.pentagon {
                writeln!(out, "{}: {} sweep points, mse in [{}, {}]", r.name, p.points, p.min_mse, p.max_mse).map_err(io)?;
            }
            writeln!(out, "report: {}", path.display()).map_err(io)?;
        }
        Command::Gradcheck { settings, step } => {
            let s = gradcheck::run_suite(cli.seed.unwrap_or(0), *settings, *step)?;
            writeln!(
                out,
                "gradcheck: {} settings x {} parameters, max relative error {:e}",
                s.settings, s.parameters, s.max_rel_error
            )
            .map_err(io)?;
            if !(s.max_rel_error < 1e-6) {
                return Err(Failure::Runtime(Error::Internal(format!(
                    "gradient check failed: {:e} >= 1e-6",
                    s.max_rel_error
                ))));
            }
        }
        Command::Paramcount { path } => {
            let cfg = load_config(cli, path)?;
            writeln!(out, "{}", network_for(&cfg)?.count_parameters().total).map_err(io)?;
        }
        Command::ExportSurface { checkpoint, function, grid } => {
            let kind: FunctionKind = function.parse().map_err(Failure::Config)?;
            let ckpt = Checkpoint::load(checkpoint)?;
            let f = TestFunction::new(kind, 2).map_err(Failure::Config)?;
            let csv = surface_csv(&f, &ckpt.network, *grid)?;
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
            std::fs::create_dir_all(&dir).map_err(|e| Failure::Runtime(Error::io(&dir, e)))?;
            let path = dir.join("surface.csv");
            std::fs::write(&path, csv).map_err(|e| Failure::Runtime(Error::io(&path, e)))?;
            writeln!(out, "surface: {}", path.display()).map_err(io)?;
        }
    }
    Ok(())
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code: 0 on success, 1 for usage or config errors, 2 for
/// runtime failures.
pub fn cli_with_output<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Config(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_CONFIG
        }
        Err(Failure::Runtime(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_RUNTIME
        }
    }
}

pub fn cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    cli_with_output(argv, &mut std::io::stdout(), &mut std::io::stderr())
}
