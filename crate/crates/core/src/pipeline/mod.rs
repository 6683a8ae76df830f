//! Staged, file-backed pipeline: simulate → features → graphs → train →
//! evaluate. Each stage reads its inputs from the previous stage's
//! directory under the artifact root and writes a `manifest.json`.

pub mod config;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::baselines::{gcn_train, GcnModel, RidgeModel};
use crate::eval::{build_report, scenario_masks, split_days, EvalIndex, EvalReport, ScenarioSpec};
use crate::features::{assemble_dataset, Dataset, FeatureOptions, SampleSet, TripIndex};
use crate::graphs::{build_graph_set, GraphSet};
use crate::model::{init_model, predict_samples, train, MGraphSage};
use crate::network::{enumerate_od_pairs, Network, OdPair, PairMode};
use crate::simulator::{derive_seed, simulate, SimConfig, TrainLog, TripLog};
use crate::time::ServiceCalendar;
use crate::{Error, Result};

pub use config::{PipelineConfig, Scale, ARTIFACT_ROOT_ENV};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Simulate,
    Features,
    Graphs,
    Train,
    Evaluate,
    All,
}

impl Stage {
    fn dir_name(self) -> &'static str {
        match self {
            Stage::Simulate => "simulate",
            Stage::Features => "features",
            Stage::Graphs => "graphs",
            Stage::Train => "train",
            Stage::Evaluate | Stage::All => "evaluate",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Stage::All => "all",
            other => other.dir_name(),
        })
    }
}

/// Written last into every stage directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub stage: String,
    pub scale: Scale,
    pub seed: u64,
    pub config_hash: String,
    /// SHA-256 of every file the stage wrote.
    pub files: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct DaySplit {
    train: BTreeSet<NaiveDate>,
    test: BTreeSet<NaiveDate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct GcnStatus {
    trained: bool,
    message: String,
}

mod seeds {
    pub const SIMULATE: u64 = 1;
    pub const SPLIT: u64 = 2;
    pub const VALIDATION: u64 = 3;
    pub const TRAIN: u64 = 4;
    pub const GCN: u64 = 5;
    pub const EVAL: u64 = 6;
}

pub const METHOD_MGRAPHSAGE: &str = "mgraphsage";
pub const METHOD_CLAMPED: &str = "mgraphsage_clamped";
pub const METHOD_RIDGE: &str = "ridge";
pub const METHOD_GCN: &str = "gcn";
pub const METHOD_NO_RELIABILITY: &str = "mgraphsage_no_reliability";

pub struct Pipeline {
    pub config: PipelineConfig,
    root: PathBuf,
}

/// The configured network before any OD filtering.
pub fn build_network(config: &PipelineConfig) -> Result<Network> {
    let full = config.network.layout.build()?;
    let keep = config.network.keep_stations;
    if keep == 0 || keep == full.n_stations() {
        return Ok(full);
    }
    let stations = full.contiguous_path(0, keep)?;
    full.subnetwork(&stations)
}

fn require(path: &Path) -> Result<&Path> {
    if path.exists() {
        Ok(path)
    } else {
        Err(Error::MissingArtifact(path.to_path_buf()))
    }
}

fn sha256_file(path: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(std::fs::read(path)?)))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    Ok(())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(std::io::BufReader::new(
        std::fs::File::open(require(path)?)?,
    ))?)
}

fn write_od_pairs(path: &Path, pairs: &[OdPair]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for p in pairs {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}

fn read_od_pairs(path: &Path) -> Result<Vec<OdPair>> {
    Ok(csv::Reader::from_path(require(path)?)?
        .deserialize()
        .collect::<Result<_, _>>()?)
}

impl Pipeline {
    /// Uses the artifact root from the environment if set, else the config.
    pub fn new(config: PipelineConfig) -> Result<Self> {
        config.validate()?;
        let root = config.resolved_root();
        Ok(Self { config, root })
    }

    pub fn with_root(config: PipelineConfig, root: impl Into<PathBuf>) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            root: root.into(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn stage_dir(&self, stage: Stage) -> PathBuf {
        self.root.join(stage.dir_name())
    }

    fn seed(&self, stream: u64) -> u64 {
        derive_seed(self.config.seed, &[stream])
    }

    fn fresh_dir(&self, stage: Stage) -> Result<PathBuf> {
        let dir = self.stage_dir(stage);
        std::fs::create_dir_all(&dir)?;
        let manifest = dir.join("manifest.json");
        if manifest.exists() {
            std::fs::remove_file(manifest)?;
        }
        Ok(dir)
    }

    fn finish(&self, stage: Stage, dir: &Path, files: &[&str]) -> Result<()> {
        let mut hashes = BTreeMap::new();
        for f in files {
            hashes.insert(f.to_string(), sha256_file(&dir.join(f))?);
        }
        let manifest = Manifest {
            stage: stage.to_string(),
            scale: self.config.scale,
            seed: self.config.seed,
            config_hash: self.config.hash(),
            files: hashes,
        };
        write_json(&dir.join("manifest.json"), &manifest)?;
        log::info!("{stage}: wrote {}", dir.display());
        Ok(())
    }

    pub fn run(&self, stage: Stage) -> Result<Option<EvalReport>> {
        match stage {
            Stage::Simulate => self.simulate().map(|_| None),
            Stage::Features => self.features().map(|_| None),
            Stage::Graphs => self.graphs().map(|_| None),
            Stage::Train => self.train().map(|_| None),
            Stage::Evaluate => self.evaluate().map(Some),
            Stage::All => self.all().map(Some),
        }
    }

    pub fn all(&self) -> Result<EvalReport> {
        self.simulate()?;
        self.features()?;
        self.graphs()?;
        self.train()?;
        self.evaluate()
    }

    fn calendar(&self) -> ServiceCalendar {
        let p = &self.config.simulator;
        ServiceCalendar::weekdays_from(p.start_date, p.n_days)
    }

    pub fn simulate(&self) -> Result<()> {
        let dir = self.fresh_dir(Stage::Simulate)?;
        let network = build_network(&self.config)?;
        let sim =
            SimConfig::from_params(&self.config.simulator, &network, self.seed(seeds::SIMULATE))?;
        let (trips, trains) = simulate(&sim, &network)?;
        log::info!(
            "simulated {} trips and {} train events",
            trips.len(),
            trains.len()
        );
        network.write_csv(&dir)?;
        trips.write_csv(&dir.join("trips.csv"))?;
        trains.write_csv(&dir.join("trains.csv"))?;
        self.finish(
            Stage::Simulate,
            &dir,
            &["stations.csv", "lines.csv", "trips.csv", "trains.csv"],
        )
    }

    fn load_network(&self) -> Result<Network> {
        let dir = self.stage_dir(Stage::Simulate);
        require(&dir.join("stations.csv"))?;
        require(&dir.join("lines.csv"))?;
        Network::read_csv(&dir)
    }

    fn load_trips(&self) -> Result<TripLog> {
        TripLog::read_csv(require(&self.stage_dir(Stage::Simulate).join("trips.csv"))?)
    }

    fn load_trains(&self) -> Result<TrainLog> {
        TrainLog::read_csv(require(
            &self.stage_dir(Stage::Simulate).join("trains.csv"),
        )?)
    }

    pub fn features(&self) -> Result<()> {
        let network = self.load_network()?;
        let trips = self.load_trips()?;
        let trains = self.load_trains()?;
        let dir = self.fresh_dir(Stage::Features)?;
        let calendar = self.calendar();
        let (train, test) = split_days(
            calendar.days(),
            self.config.eval.test_fraction,
            self.seed(seeds::SPLIT),
        )?;
        let mode = match self.config.network.top_k {
            Some(k) => PairMode::TopKByMeanDemand(k),
            None => PairMode::AllPairs,
        };
        let pairs = enumerate_od_pairs(&network, mode, Some(&trips))?;
        let network = network.with_od_pairs(pairs)?;
        let options = FeatureOptions {
            id_encoding: self.config.features.id_encoding,
            reliability: self.config.features.reliability,
            normalize_on: Some(train.clone()),
        };
        let dataset = assemble_dataset(&trips, &trains, &network, &calendar, &options)?;
        log::info!(
            "{} samples × {} ODs × {} features",
            dataset.samples.len(),
            dataset.n_nodes(),
            dataset.layout.width()
        );
        write_od_pairs(&dir.join("od_pairs.csv"), network.od_pairs())?;
        write_json(&dir.join("split.json"), &DaySplit { train, test })?;
        dataset.write_binary(&dir.join("dataset.bin"))?;
        dataset.write_targets_csv(&dir.join("targets.csv"))?;
        let mut files = vec!["od_pairs.csv", "split.json", "dataset.bin", "targets.csv"];
        if self.config.features.write_csv {
            dataset.write_csv(&dir.join("csv"))?;
            std::fs::rename(
                dir.join("csv").join("features.csv"),
                dir.join("features.csv"),
            )?;
            std::fs::remove_dir_all(dir.join("csv"))?;
            files.push("features.csv");
        }
        self.finish(Stage::Features, &dir, &files)
    }

    fn load_od_network(&self) -> Result<Network> {
        let pairs = read_od_pairs(&self.stage_dir(Stage::Features).join("od_pairs.csv"))?;
        self.load_network()?.with_od_pairs(pairs)
    }

    fn load_split(&self) -> Result<DaySplit> {
        read_json(&self.stage_dir(Stage::Features).join("split.json"))
    }

    fn load_dataset(&self) -> Result<Dataset> {
        Dataset::read_binary(require(
            &self.stage_dir(Stage::Features).join("dataset.bin"),
        )?)
    }

    pub fn graphs(&self) -> Result<()> {
        let network = self.load_od_network()?;
        let split = self.load_split()?;
        let trips = self.load_trips()?;
        let dir = self.fresh_dir(Stage::Graphs)?;
        let series = TripIndex::new(&trips, &self.calendar()).demand_series(&network, &split.train);
        drop(trips);
        let (set, metas) = build_graph_set(&network, &series, &self.config.graphs)?;
        for m in &metas {
            log::info!("{:?} graph: {} edges", m.kind, m.n_edges);
        }
        set.write(&dir, &metas)?;
        let mut files = Vec::new();
        for name in crate::graphs::CHANNEL_NAMES {
            files.push(format!("{name}_edges.csv"));
            files.push(format!("{name}_meta.json"));
        }
        let refs: Vec<&str> = files.iter().map(String::as_str).collect();
        self.finish(Stage::Graphs, &dir, &refs)
    }

    fn load_graphs(&self) -> Result<GraphSet> {
        let dir = self.stage_dir(Stage::Graphs);
        require(&dir.join("manifest.json"))?;
        Ok(GraphSet::read(&dir)?.0)
    }

    pub fn train(&self) -> Result<()> {
        let dataset = self.load_dataset()?;
        let split = self.load_split()?;
        let graphs = self.load_graphs()?;
        let dir = self.fresh_dir(Stage::Train)?;
        let (train_set, _) = dataset.split(&split.train);
        let cfg = &self.config;

        let ridge = fit_ridge(&train_set, &split.train, cfg, self.seed(seeds::VALIDATION))?;
        write_json(&dir.join("ridge.json"), &ridge)?;

        let mut tc = cfg.train.clone();
        tc.seed = self.seed(seeds::TRAIN);
        let mut model = init_model(&train_set, &tc)?;
        let report = train(&mut model, &train_set, &graphs, &tc)?;
        model.save(&dir.join("mgraphsage.json"))?;

        let mut metrics = csv::Writer::from_path(dir.join("metrics.csv"))?;
        metrics.write_record(["model", "epoch", "loss"])?;
        for (e, l) in report.epoch_losses.iter().enumerate() {
            metrics.write_record([METHOD_MGRAPHSAGE.to_string(), e.to_string(), l.to_string()])?;
        }
        let mut files = vec![
            "ridge.json",
            "mgraphsage.json",
            "metrics.csv",
            "gcn_status.json",
        ];
        if cfg.eval.reliability_ablation && dataset.layout.reliability {
            let ablated = dataset.without_reliability();
            let (ab_train, _) = ablated.split(&split.train);
            let mut ab_model = init_model(&ab_train, &tc)?;
            let ab_report = train(&mut ab_model, &ab_train, &graphs, &tc)?;
            ab_model.save(&dir.join("mgraphsage_no_reliability.json"))?;
            for (e, l) in ab_report.epoch_losses.iter().enumerate() {
                metrics.write_record([
                    METHOD_NO_RELIABILITY.to_string(),
                    e.to_string(),
                    l.to_string(),
                ])?;
            }
            files.push("mgraphsage_no_reliability.json");
        } else if dir.join("mgraphsage_no_reliability.json").exists() {
            std::fs::remove_file(dir.join("mgraphsage_no_reliability.json"))?;
        }
        let status = if cfg.eval.run_gcn {
            let mut gc = cfg.gcn.clone();
            gc.seed = self.seed(seeds::GCN);
            match gcn_train(&train_set, graphs.temporal(), &gc) {
                Ok((gcn, history)) => {
                    for (e, l) in history.iter().enumerate() {
                        metrics.write_record([
                            METHOD_GCN.to_string(),
                            e.to_string(),
                            l.to_string(),
                        ])?;
                    }
                    gcn.save(&dir.join("gcn.json"))?;
                    files.push("gcn.json");
                    GcnStatus {
                        trained: true,
                        message: "ok".into(),
                    }
                }
                Err(e @ Error::GcnNotScalable { .. }) => {
                    log::warn!("{e}");
                    GcnStatus {
                        trained: false,
                        message: e.to_string(),
                    }
                }
                Err(e) => return Err(e),
            }
        } else {
            GcnStatus {
                trained: false,
                message: "disabled".into(),
            }
        };
        metrics.flush()?;
        drop(metrics);
        let stale = dir.join("gcn.json");
        if !status.trained && stale.exists() {
            std::fs::remove_file(stale)?;
        }
        write_json(&dir.join("gcn_status.json"), &status)?;
        self.finish(Stage::Train, &dir, &files)
    }

    pub fn evaluate(&self) -> Result<EvalReport> {
        let network = self.load_od_network()?;
        let trains = self.load_trains()?;
        let dataset = self.load_dataset()?;
        let split = self.load_split()?;
        let graphs = self.load_graphs()?;
        let tdir = self.stage_dir(Stage::Train);
        require(&tdir.join("manifest.json"))?;
        let model = MGraphSage::load(&tdir.join("mgraphsage.json"))?;
        let ridge: RidgeModel = read_json(&tdir.join("ridge.json"))?;
        let status: GcnStatus = read_json(&tdir.join("gcn_status.json"))?;
        let dir = self.fresh_dir(Stage::Evaluate)?;

        let (_, test_set) = dataset.split(&split.test);
        let index = EvalIndex::new(&test_set);
        let sage: Vec<f64> = predict_samples(
            &model,
            &test_set,
            &graphs,
            self.config.eval.aggregation,
            self.seed(seeds::EVAL),
        )?
        .into_iter()
        .flat_map(|p| p.to_vec())
        .collect();
        let clamped: Vec<f64> = sage.iter().map(|v| v.max(0.0)).collect();
        let mut methods = vec![
            (METHOD_MGRAPHSAGE.to_string(), sage),
            (METHOD_CLAMPED.to_string(), clamped),
            (
                METHOD_RIDGE.to_string(),
                predict_all(&test_set, |x| ridge.predict(x))?,
            ),
        ];
        let ablated_path = tdir.join("mgraphsage_no_reliability.json");
        if self.config.eval.reliability_ablation && ablated_path.exists() {
            let ab_model = MGraphSage::load(&ablated_path)?;
            let ablated = dataset.without_reliability();
            let (_, ab_test) = ablated.split(&split.test);
            let preds = predict_samples(
                &ab_model,
                &ab_test,
                &graphs,
                self.config.eval.aggregation,
                self.seed(seeds::EVAL),
            )?;
            methods.push((
                METHOD_NO_RELIABILITY.to_string(),
                preds.into_iter().flat_map(|p| p.to_vec()).collect(),
            ));
        }
        if status.trained {
            let gcn = GcnModel::load(
                &tdir.join("gcn.json"),
                graphs.temporal(),
                self.config.gcn.memory_limit_bytes,
            )?;
            methods.push((
                METHOD_GCN.to_string(),
                predict_all(&test_set, |x| gcn.predict(x))?,
            ));
        }
        for ext in &self.config.eval.external {
            methods.push((ext.name.clone(), index.read_predictions(&ext.path)?));
        }

        let specs = ScenarioSpec::standard();
        let masks = scenario_masks(&trains, &network, &test_set, &specs);
        let scenarios: Vec<(ScenarioSpec, Vec<bool>)> = specs.into_iter().zip(masks).collect();
        let report = build_report(&methods, &index.truth, &scenarios)?;
        report.write_csv(&dir)?;
        write_predictions(&dir.join("predictions.csv"), &index, &methods)?;
        self.finish(
            Stage::Evaluate,
            &dir,
            &["report.csv", "pvalues.csv", "predictions.csv"],
        )?;
        Ok(report)
    }
}

fn predict_all(
    samples: &[&SampleSet],
    f: impl Fn(ndarray::ArrayView2<f64>) -> Result<ndarray::Array1<f64>>,
) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for s in samples {
        out.extend(f(s.features.view())?);
    }
    Ok(out)
}

/// Picks the penalty on held-out training days, then refits on all of them.
fn fit_ridge(
    train_set: &[&SampleSet],
    train_days: &BTreeSet<NaiveDate>,
    cfg: &PipelineConfig,
    seed: u64,
) -> Result<RidgeModel> {
    let grid = &cfg.eval.lambda_grid;
    let vf = cfg.eval.validation_fraction;
    let days: Vec<NaiveDate> = train_days.iter().copied().collect();
    if vf == 0.0 || grid.len() == 1 || days.len() < 2 {
        return RidgeModel::fit_samples(train_set, grid[0]);
    }
    let (fit_days, val_days) = split_days(&days, vf, seed)?;
    let (fit, val): (Vec<&SampleSet>, Vec<&SampleSet>) = train_set
        .iter()
        .partition(|s| fit_days.contains(&s.interval.date));
    debug_assert!(val.iter().all(|s| val_days.contains(&s.interval.date)));
    let chosen = RidgeModel::fit_with_validation(&fit, &val, grid)?;
    log::info!("ridge: lambda {:e}", chosen.lambda);
    RidgeModel::fit_samples(train_set, chosen.lambda)
}

fn write_predictions(path: &Path, index: &EvalIndex, methods: &[(String, Vec<f64>)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec![
        "day".to_string(),
        "slot".into(),
        "od_index".into(),
        "target".into(),
    ];
    header.extend(methods.iter().map(|(n, _)| n.clone()));
    w.write_record(&header)?;
    for (i, (d, s, o)) in index.keys.iter().enumerate() {
        let mut rec = vec![
            d.to_string(),
            s.to_string(),
            o.to_string(),
            index.truth[i].to_string(),
        ];
        rec.extend(methods.iter().map(|(_, p)| p[i].to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
