//! Day-level splits, error metrics, disruption strata, paired t-tests and
//! the CSV report.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use chrono::NaiveDate;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::features::{SampleSet, ServiceMap, RELIABILITY_DIM};
use crate::network::Network;
use crate::simulator::TrainLog;
use crate::{Error, Result};

/// Random day-level partition into `(train, test)`.
pub fn split_days(
    days: &[NaiveDate],
    test_fraction: f64,
    seed: u64,
) -> Result<(BTreeSet<NaiveDate>, BTreeSet<NaiveDate>)> {
    let unique: BTreeSet<NaiveDate> = days.iter().copied().collect();
    if unique.len() < 2 {
        return Err(Error::InvalidArgument(
            "splitting needs at least two days".into(),
        ));
    }
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "test fraction {test_fraction} outside (0, 1)"
        )));
    }
    let n = unique.len();
    let n_test = ((n as f64 * test_fraction).round() as usize).clamp(1, n - 1);
    let mut order: Vec<NaiveDate> = unique.into_iter().collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let test = order[..n_test].iter().copied().collect();
    let train = order[n_test..].iter().copied().collect();
    Ok((train, test))
}

/// Micro-averaged `(rmse, mae)`.
pub fn rmse_mae(pred: &[f64], truth: &[f64]) -> Result<(f64, f64)> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch(pred.len(), truth.len()));
    }
    if pred.is_empty() {
        return Err(Error::EmptySeries);
    }
    let (mut sq, mut abs) = (0.0, 0.0);
    for (p, t) in pred.iter().zip(truth) {
        let e = p - t;
        sq += e * e;
        abs += e.abs();
    }
    let n = pred.len() as f64;
    Ok(((sq / n).sqrt(), abs / n))
}

/// Two-sided paired t-test on `a - b`.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "t-test needs at least two pairs".into(),
        ));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = diffs.iter().sum::<f64>() / n as f64;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    if var == 0.0 {
        return Ok(if mean == 0.0 { 1.0 } else { 0.0 });
    }
    let t = mean / (var / n as f64).sqrt();
    let dist = StudentsT::new(0.0, 1.0, (n - 1) as f64)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok((2.0 * dist.sf(t.abs())).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioSpec {
    All,
    CancelOriginGt0,
    CancelDestGt0,
    /// Mean origin delay strictly above the given seconds.
    DelayOriginGt(u32),
    DelayDestGt(u32),
}

impl ScenarioSpec {
    /// The nine strata of the standard report.
    pub fn standard() -> Vec<ScenarioSpec> {
        let mut v = vec![
            ScenarioSpec::All,
            ScenarioSpec::CancelOriginGt0,
            ScenarioSpec::CancelDestGt0,
        ];
        v.extend([60, 180, 300].map(ScenarioSpec::DelayOriginGt));
        v.extend([60, 180, 300].map(ScenarioSpec::DelayDestGt));
        v
    }

    /// Whether a sample with these reliability features belongs to the stratum.
    pub fn matches(&self, reliability: &[f64; RELIABILITY_DIM]) -> bool {
        match *self {
            ScenarioSpec::All => true,
            ScenarioSpec::CancelOriginGt0 => reliability[4] > 0.0,
            ScenarioSpec::CancelDestGt0 => reliability[10] > 0.0,
            ScenarioSpec::DelayOriginGt(s) => reliability[2] > s as f64,
            ScenarioSpec::DelayDestGt(s) => reliability[8] > s as f64,
        }
    }
}

impl fmt::Display for ScenarioSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioSpec::All => write!(f, "all"),
            ScenarioSpec::CancelOriginGt0 => write!(f, "cancel_origin_gt0"),
            ScenarioSpec::CancelDestGt0 => write!(f, "cancel_dest_gt0"),
            ScenarioSpec::DelayOriginGt(s) => write!(f, "delay_origin_gt{s}"),
            ScenarioSpec::DelayDestGt(s) => write!(f, "delay_dest_gt{s}"),
        }
    }
}

/// Masks over `(sample, od)` in flattened sample-major order, computed from
/// the train log only.
pub fn scenario_masks(
    trains: &TrainLog,
    network: &Network,
    samples: &[&SampleSet],
    specs: &[ScenarioSpec],
) -> Vec<Vec<bool>> {
    let services = ServiceMap::new(network);
    let mut masks = vec![Vec::new(); specs.len()];
    for s in samples {
        for row in services.reliability_matrix(trains, network, s.prediction_time) {
            for (mask, spec) in masks.iter_mut().zip(specs) {
                mask.push(spec.matches(&row));
            }
        }
    }
    masks
}

/// Flattened `(day, slot, od)` keys and true counts for a set of samples.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalIndex {
    pub keys: Vec<(NaiveDate, usize, usize)>,
    pub truth: Vec<f64>,
}

impl EvalIndex {
    pub fn new(samples: &[&SampleSet]) -> Self {
        let mut keys = Vec::new();
        let mut truth = Vec::new();
        for s in samples {
            for (i, t) in s.targets.iter().enumerate() {
                keys.push((s.interval.date, s.interval.slot, i));
                truth.push(*t);
            }
        }
        Self { keys, truth }
    }

    /// Aligns an external `day,slot,od_index,prediction` file to the keys.
    pub fn read_predictions(&self, path: &Path) -> Result<Vec<f64>> {
        if !path.exists() {
            return Err(Error::MissingArtifact(path.to_path_buf()));
        }
        #[derive(Deserialize)]
        struct Row {
            day: NaiveDate,
            slot: usize,
            od_index: usize,
            prediction: f64,
        }
        let mut by_key = HashMap::new();
        for row in csv::Reader::from_path(path)?.deserialize() {
            let r: Row = row?;
            by_key.insert((r.day, r.slot, r.od_index), r.prediction);
        }
        self.keys
            .iter()
            .map(|k| {
                by_key.get(k).copied().ok_or_else(|| {
                    Error::parse(
                        "predictions",
                        format!("no prediction for {} slot {} od {}", k.0, k.1, k.2),
                    )
                })
            })
            .collect()
    }

    pub fn write_predictions(&self, path: &Path, predictions: &[f64]) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["day", "slot", "od_index", "prediction"])?;
        for ((d, s, o), p) in self.keys.iter().zip(predictions) {
            w.write_record([d.to_string(), s.to_string(), o.to_string(), p.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricRow {
    pub scenario: String,
    pub method: String,
    pub rmse: f64,
    pub mae: f64,
    pub n: usize,
    /// Lowest RMSE within its scenario.
    #[serde(skip)]
    pub best: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PValueRow {
    pub method_a: String,
    pub method_b: String,
    pub scenario: String,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvalReport {
    pub rows: Vec<MetricRow>,
    pub p_values: Vec<PValueRow>,
}

impl EvalReport {
    pub fn row(&self, scenario: &str, method: &str) -> Option<&MetricRow> {
        self.rows
            .iter()
            .find(|r| r.scenario == scenario && r.method == method)
    }

    pub fn p_value(&self, a: &str, b: &str, scenario: &str) -> Option<f64> {
        self.p_values
            .iter()
            .find(|r| r.method_a == a && r.method_b == b && r.scenario == scenario)
            .map(|r| r.p)
    }

    pub fn write_csv(&self, dir: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(dir.join("report.csv"))?;
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush()?;
        let mut w = csv::Writer::from_path(dir.join("pvalues.csv"))?;
        w.write_record(["method_a", "method_b", "scenario", "p"])?;
        for r in &self.p_values {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sw = self
            .rows
            .iter()
            .map(|r| r.scenario.len())
            .max()
            .unwrap_or(0)
            .max(8);
        let mw = self
            .rows
            .iter()
            .map(|r| r.method.len())
            .max()
            .unwrap_or(0)
            .max(6);
        writeln!(
            f,
            "{:<sw$} {:<mw$} {:>9} {:>9} {:>9}",
            "scenario", "method", "rmse", "mae", "n"
        )?;
        for r in &self.rows {
            let mark = if r.best { "*" } else { "" };
            writeln!(
                f,
                "{:<sw$} {:<mw$} {:>9.4} {:>9.4} {:>9}{mark}",
                r.scenario, r.method, r.rmse, r.mae, r.n
            )?;
        }
        Ok(())
    }
}

/// One metric row per populated scenario and method. The first method is
/// the reference tested against every other one, per scenario.
pub fn build_report(
    methods: &[(String, Vec<f64>)],
    truth: &[f64],
    scenarios: &[(ScenarioSpec, Vec<bool>)],
) -> Result<EvalReport> {
    for (name, p) in methods {
        if p.len() != truth.len() {
            return Err(Error::Dimension(format!(
                "{name}: {} predictions for {} targets",
                p.len(),
                truth.len()
            )));
        }
    }
    let mut report = EvalReport::default();
    for (spec, mask) in scenarios {
        if mask.len() != truth.len() {
            return Err(Error::LengthMismatch(truth.len(), mask.len()));
        }
        let idx: Vec<usize> = (0..truth.len()).filter(|i| mask[*i]).collect();
        if idx.is_empty() {
            log::warn!("scenario {spec} has no qualifying samples; skipped");
            continue;
        }
        let t: Vec<f64> = idx.iter().map(|i| truth[*i]).collect();
        let mut abs_errors: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        let first_row = report.rows.len();
        for (m, (name, pred)) in methods.iter().enumerate() {
            let p: Vec<f64> = idx.iter().map(|i| pred[*i]).collect();
            let (rmse, mae) = rmse_mae(&p, &t)?;
            abs_errors.insert(m, p.iter().zip(&t).map(|(a, b)| (a - b).abs()).collect());
            report.rows.push(MetricRow {
                scenario: spec.to_string(),
                method: name.clone(),
                rmse,
                mae,
                n: idx.len(),
                best: false,
            });
        }
        let best = report.rows[first_row..]
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.rmse.total_cmp(&b.1.rmse))
            .map(|(i, _)| first_row + i);
        if let Some(b) = best {
            report.rows[b].best = true;
        }
        if methods.len() > 1 && idx.len() >= 2 {
            for m in 1..methods.len() {
                report.p_values.push(PValueRow {
                    method_a: methods[0].0.clone(),
                    method_b: methods[m].0.clone(),
                    scenario: spec.to_string(),
                    p: paired_t_test(&abs_errors[&0], &abs_errors[&m])?,
                });
            }
        }
    }
    Ok(report)
}
