use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, ExperimentKind};
use super::metrics::{metrics, Metrics};
use super::pentagon::{sweep_points, SweepPoint};
use super::reference::{self, ReferenceValue};
use crate::activations::{ActivationKind, ActivationLibrary, ActivationSpec, BaseActivation};
use crate::benchmarks::{eval_rows, make_dataset, TestFunction};
use crate::error::{Error, Result};
use crate::network::{Architecture, Checkpoint, LayerParamCount, Mlp, ParamId, TensorKind};
use crate::optim::{train, Dataset, EpochRecord, TrainHistory};
use crate::sampling::{grid2d, HaltonSampler};
use crate::tsdata::{self, NormStats, RawSeries, SplitRanges, INPUT_LAYOUT};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowCounts {
    pub train: usize,
    pub val: usize,
    pub test: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ForecastSummary {
    pub rows: usize,
    pub rejected_rows: usize,
    pub split: SplitRanges,
    pub windows: WindowCounts,
    pub norm: NormStats,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PentagonSummary {
    pub points: usize,
    pub mean_mse: f64,
    pub min_mse: f64,
    pub max_mse: f64,
}

/// Everything a run reports, plus the resolved config it came from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricsReport {
    pub name: String,
    pub kind: ExperimentKind,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub parameter_count: usize,
    pub parameters_per_layer: Vec<LayerParamCount>,
    pub train_loss: Vec<EpochRecord>,
    pub steps: usize,
    pub stopped_early: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_epoch: Option<usize>,
    /// Metrics on the training inputs after training.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train: Option<Metrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub val: Option<Metrics>,
    /// Held-out points (synthetic) or the test split (forecast).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eval: Option<Metrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forecast: Option<ForecastSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pentagon: Option<PentagonSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceValue>,
    pub outputs: Vec<String>,
    pub wall_clock_seconds: f64,
}

impl MetricsReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// A named file produced by a run.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: MetricsReport,
    pub artifacts: Vec<Artifact>,
    /// Per-point results of a pentagon sweep.
    pub sweep: Vec<(SweepPoint, f64)>,
}

impl RunOutput {
    /// Writes `report.json` and every artifact under `dir`.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for a in &self.artifacts {
            let p = dir.join(&a.name);
            std::fs::write(&p, &a.contents).map_err(|e| Error::io(&p, e))?;
        }
        let p = dir.join("report.json");
        std::fs::write(&p, self.report.to_json()?).map_err(|e| Error::io(&p, e))?;
        Ok(p)
    }

    pub fn artifact(&self, name: &str) -> Option<&str> {
        self.artifacts.iter().find(|a| a.name == name).map(|a| a.contents.as_str())
    }
}

/// Runs the experiment described by `cfg`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let result = match cfg.kind {
        ExperimentKind::Synthetic => run_synthetic(cfg),
        ExperimentKind::Forecast => run_forecast(cfg),
        ExperimentKind::Pentagon => run_pentagon(cfg),
    };
    result.map_err(|e| match cfg.to_json() {
        Ok(echo) => e.context(format!("experiment '{}' with config {}", cfg.name, echo)),
        Err(_) => e,
    })
}

fn activation_label(kinds: &[ActivationKind]) -> Option<String> {
    let first = *kinds.first()?;
    if kinds.iter().any(|k| *k != first) {
        return None;
    }
    Some(match first {
        ActivationKind::Fixed(b) => b.name().to_string(),
        ActivationKind::Lla { .. } => "lla".into(),
        ActivationKind::Qla { .. } => "qla".into(),
    })
}

fn loss_csv(history: &TrainHistory) -> String {
    let with_val = history.epochs.iter().any(|e| e.val_mse.is_some());
    let mut s = String::from(if with_val { "epoch,train_mse,val_mse\n" } else { "epoch,train_mse\n" });
    for e in &history.epochs {
        match (with_val, e.val_mse) {
            (true, Some(v)) => writeln!(s, "{},{},{}", e.epoch, e.train_mse, v),
            (true, None) => writeln!(s, "{},{},", e.epoch, e.train_mse),
            _ => writeln!(s, "{},{}", e.epoch, e.train_mse),
        }
        .unwrap();
    }
    s
}

fn library_members(lib: &Option<ActivationLibrary>) -> Vec<BaseActivation> {
    lib.as_ref().map(|l| l.members().to_vec()).unwrap_or_default()
}

fn report_skeleton(cfg: &ExperimentConfig, net: &Mlp, history: &TrainHistory, train: Option<Metrics>) -> MetricsReport {
    let count = net.count_parameters();
    MetricsReport {
        name: cfg.name.clone(),
        kind: cfg.kind,
        seed: cfg.seed,
        config: cfg.clone(),
        parameter_count: count.total,
        parameters_per_layer: count.per_layer,
        train_loss: history.epochs.clone(),
        steps: history.steps,
        stopped_early: history.stopped_early,
        best_epoch: history.best_epoch,
        train,
        val: None,
        eval: None,
        forecast: None,
        pentagon: None,
        reference: None,
        outputs: Vec::new(),
        wall_clock_seconds: 0.0,
    }
}

/// Grid of `(x1, x2, f_true, f_pred)` over a 2-D function's domain.
pub fn surface_csv(f: &TestFunction, net: &Mlp, n: usize) -> Result<String> {
    if f.dim != 2 || net.input_dim() != 2 {
        return Err(Error::Config("surface export needs a 2-D function and network".into()));
    }
    let grid = grid2d([f.domain[0].0, f.domain[1].0], [f.domain[0].1, f.domain[1].1], n)?;
    let truth = eval_rows(f, &grid)?;
    let pred = net.predict(&grid)?;
    let mut s = String::from("x1,x2,f_true,f_pred\n");
    for i in 0..grid.rows() {
        writeln!(s, "{},{},{},{}", grid.get(i, 0), grid.get(i, 1), truth.get(i, 0), pred.get(i, 0)).unwrap();
    }
    Ok(s)
}

/// Trains on the first `train_points` Halton points and evaluates on the
/// next `eval_points` of the same sequence.
pub fn run_synthetic(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let start = Instant::now();
    let cfg = cfg.resolved()?;
    let s = cfg
        .synthetic
        .as_ref()
        .ok_or_else(|| Error::Config("missing 'synthetic' section".into()))?;
    let f = s.test_function()?;
    let mut sampler = HaltonSampler::new(f.dim)?;
    let (x_train, y_train) = make_dataset(&f, &mut sampler, s.train_points)?;
    let (x_eval, y_eval) = make_dataset(&f, &mut sampler, s.eval_points)?;

    let library = cfg.library()?;
    let arch = cfg.network.architecture(f.dim, 1)?;
    let mut net = Mlp::init(&arch, library.as_ref(), cfg.seed)?;
    let data = Dataset::new(x_train, y_train)?;
    let history = train(&mut net, &data, None, &cfg.optimizer.train_config(), cfg.seed)?;

    let train_m = metrics(&net.predict(&data.x)?, &data.y)?;
    let mut report = report_skeleton(&cfg, &net, &history, Some(train_m));
    report.eval = Some(metrics(&net.predict(&x_eval)?, &y_eval)?);
    report.reference = activation_label(&cfg.network.kinds()?).and_then(|a| reference::synthetic(f.name(), &a));

    let mut artifacts = vec![Artifact {
        name: "loss.csv".into(),
        contents: loss_csv(&history),
    }];
    if f.dim == 2 && s.surface_grid >= 2 {
        artifacts.push(Artifact {
            name: "surface.csv".into(),
            contents: surface_csv(&f, &net, s.surface_grid)?,
        });
    }
    artifacts.push(Artifact {
        name: "checkpoint.json".into(),
        contents: Checkpoint::new(net, cfg.seed, library_members(&library)).to_json()?,
    });
    report.outputs = artifacts.iter().map(|a| a.name.clone()).collect();
    report.wall_clock_seconds = start.elapsed().as_secs_f64();
    Ok(RunOutput {
        report,
        artifacts,
        sweep: Vec::new(),
    })
}

/// Loads the configured CSV and forecasts on it.
pub fn run_forecast(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let fc = cfg
        .forecast
        .as_ref()
        .ok_or_else(|| Error::Config("missing 'forecast' section".into()))?;
    let path = fc
        .csv
        .as_ref()
        .ok_or_else(|| Error::Config("forecast.csv is required".into()))?;
    let series = tsdata::load_csv(path)?;
    let dataset = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
    run_forecast_series(cfg, &series, &dataset)
}

/// Split, normalize on train, window each split separately, train and
/// score the test split in normalized units.
pub fn run_forecast_series(cfg: &ExperimentConfig, series: &RawSeries, dataset: &str) -> Result<RunOutput> {
    let start = Instant::now();
    let cfg = cfg.resolved()?;
    let fc = cfg
        .forecast
        .as_ref()
        .ok_or_else(|| Error::Config("missing 'forecast' section".into()))?;
    let ranges = fc.split.ranges(series.len())?;
    let (tr, va, te) = tsdata::split_chronological(series, &fc.split)?;
    let (norm, ntr, nva, nte) = tsdata::normalize(&tr.features, &va.features, &te.features, fc.normalization)?;
    let w_train = tsdata::window(&ntr, fc.history, fc.horizon)?;
    let w_val = if va.is_empty() {
        None
    } else {
        Some(tsdata::window(&nva, fc.history, fc.horizon)?)
    };
    let w_test = tsdata::window(&nte, fc.history, fc.horizon)?;

    let n_features = series.n_features();
    let library = cfg.library()?;
    let arch = cfg.network.architecture(fc.history * n_features, fc.horizon * n_features)?;
    let mut net = Mlp::init(&arch, library.as_ref(), cfg.seed)?;
    let data = Dataset::new(w_train.x.clone(), w_train.y.clone())?;
    let val = w_val.as_ref().map(|w| Dataset::new(w.x.clone(), w.y.clone())).transpose()?;
    let tcfg = cfg.optimizer.train_config();
    let history = train(&mut net, &data, val.as_ref().filter(|_| tcfg.early_stopping.is_some()), &tcfg, cfg.seed)?;

    let train_m = metrics(&net.predict(&data.x)?, &data.y)?;
    let mut report = report_skeleton(&cfg, &net, &history, Some(train_m));
    report.val = val.as_ref().map(|v| metrics(&net.predict(&v.x)?, &v.y)).transpose()?;
    let test_pred = net.predict(&w_test.x)?;
    report.eval = Some(metrics(&test_pred, &w_test.y)?);
    report.forecast = Some(ForecastSummary {
        rows: series.len(),
        rejected_rows: series.rejected_rows,
        split: ranges,
        windows: WindowCounts {
            train: w_train.len(),
            val: w_val.as_ref().map_or(0, |w| w.len()),
            test: w_test.len(),
        },
        norm,
    });
    report.reference = activation_label(&cfg.network.kinds()?).and_then(|a| reference::forecast(dataset, &a));

    let mut pred_csv = String::from("window_index,step,feature,actual,predicted\n");
    for step in 0..fc.horizon {
        for (f, name) in series.names.iter().enumerate() {
            let c = step * n_features + f;
            writeln!(pred_csv, "0,{step},{name},{},{}", w_test.y.get(0, c), test_pred.get(0, c)).unwrap();
        }
    }
    let mut ckpt = Checkpoint::new(net, cfg.seed, library_members(&library));
    ckpt.input_layout = Some(INPUT_LAYOUT.to_string());
    let artifacts = vec![
        Artifact {
            name: "loss.csv".into(),
            contents: loss_csv(&history),
        },
        Artifact {
            name: "predictions.csv".into(),
            contents: pred_csv,
        },
        Artifact {
            name: "checkpoint.json".into(),
            contents: ckpt.to_json()?,
        },
    ];
    report.outputs = artifacts.iter().map(|a| a.name.clone()).collect();
    report.wall_clock_seconds = start.elapsed().as_secs_f64();
    Ok(RunOutput {
        report,
        artifacts,
        sweep: Vec::new(),
    })
}

/// How the hidden layers of a pentagon-sweep network are set up.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SweepActivation {
    /// Unconstrained LLA with coefficients fixed to `λ`.
    Lambda([f64; 5]),
    /// A plain fixed activation, the reference for vertex points.
    Fixed(BaseActivation),
}

/// Trains one sweep network on `data` and returns it with its final
/// training MSE. All weights come from `seed`; only `λ` is held fixed.
pub fn sweep_point_run(
    cfg: &ExperimentConfig,
    library: &ActivationLibrary,
    data: &Dataset,
    activation: SweepActivation,
    seed: u64,
) -> Result<(f64, Mlp)> {
    let kind = match activation {
        SweepActivation::Lambda(_) => ActivationKind::Lla { constrained: false },
        SweepActivation::Fixed(b) => ActivationKind::Fixed(b),
    };
    let arch = Architecture {
        input_dim: data.x.cols(),
        hidden: cfg.network.hidden.iter().map(|&w| (w, kind)).collect(),
        output_dim: 1,
    };
    let mut net = Mlp::init(&arch, Some(library), seed)?;
    let mut tcfg = cfg.optimizer.train_config();
    if let SweepActivation::Lambda(lambda) = activation {
        for (i, layer) in net.layers_mut().iter_mut().enumerate() {
            if let Some(ActivationSpec::Lla(lla)) = layer.activation.as_mut() {
                lla.theta = lambda.to_vec();
                tcfg.frozen.insert(ParamId {
                    layer: i,
                    tensor: TensorKind::ActivationLinear,
                });
            }
        }
    }
    train(&mut net, data, None, &tcfg, seed)?;
    let mse = metrics(&net.predict(&data.x)?, &data.y)?.mse;
    Ok((mse, net))
}

/// Training set shared by every point of a sweep.
pub fn sweep_dataset(cfg: &ExperimentConfig) -> Result<Dataset> {
    let s = cfg
        .synthetic
        .as_ref()
        .ok_or_else(|| Error::Config("missing 'synthetic' section".into()))?;
    let f = s.test_function()?;
    let (x, y) = make_dataset(&f, &mut HaltonSampler::new(f.dim)?, s.train_points)?;
    Dataset::new(x, y)
}

/// Trains one network per pentagon point, with point `i` seeded
/// `seed + i`; points run in parallel and are reported in grid order.
pub fn run_pentagon(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let start = Instant::now();
    let cfg = cfg.resolved()?;
    let pc = cfg.pentagon.clone().unwrap_or_default();
    if cfg.network.kinds()?.iter().any(|k| *k != ActivationKind::Lla { constrained: false }) {
        return Err(Error::Config(
            "pentagon sweeps use unconstrained LLA in every hidden layer ({\"lla\": {\"constrained\": false}})".into(),
        ));
    }
    let library = cfg
        .library()?
        .filter(|l| l.len() == 5)
        .ok_or_else(|| Error::Config("pentagon sweep needs a library of exactly 5 activations".into()))?;
    let data = sweep_dataset(&cfg)?;
    let points = sweep_points(pc.resolution, pc.include_vertices);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(pc.threads)
        .build()
        .map_err(|e| Error::Internal(e.to_string()))?;
    let results: Vec<Result<f64>> = pool.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(i, p)| {
                sweep_point_run(&cfg, &library, &data, SweepActivation::Lambda(p.lambda), cfg.seed + i as u64)
                    .map(|(mse, _)| mse)
            })
            .collect()
    });
    let mses = results.into_iter().collect::<Result<Vec<f64>>>()?;

    let mut csv = String::from("u,v,lambda1,lambda2,lambda3,lambda4,lambda5,mse\n");
    for (p, mse) in points.iter().zip(&mses) {
        let l = p.lambda;
        writeln!(csv, "{},{},{},{},{},{},{},{}", p.u, p.v, l[0], l[1], l[2], l[3], l[4], mse).unwrap();
    }
    let sweep: Vec<(SweepPoint, f64)> = points.into_iter().zip(mses.iter().copied()).collect();

    // The report's network fields describe the sweep architecture at the
    // first point; there is no single trained model.
    let arch = cfg.network.architecture(data.x.cols(), 1)?;
    let net = Mlp::init(&arch, Some(&library), cfg.seed)?;
    let empty = TrainHistory::default();
    let mut report = report_skeleton(&cfg, &net, &empty, None);
    report.pentagon = Some(PentagonSummary {
        points: mses.len(),
        mean_mse: mses.iter().sum::<f64>() / mses.len().max(1) as f64,
        min_mse: mses.iter().cloned().fold(f64::INFINITY, f64::min),
        max_mse: mses.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    });
    let artifacts = vec![Artifact {
        name: "pentagon.csv".into(),
        contents: csv,
    }];
    report.outputs = artifacts.iter().map(|a| a.name.clone()).collect();
    report.wall_clock_seconds = start.elapsed().as_secs_f64();
    Ok(RunOutput {
        report,
        artifacts,
        sweep,
    })
}
