//! Prediction-time features and targets.
//!
//! At prediction time only trips that have tapped out are attributable to a
//! destination. For OD `i = (o, d)` and interval `t`:
//!
//! - `d` counts trips on the OD departing in `t` that completed by the
//!   prediction time,
//! - `p` counts trips departing `o` in `t` (any destination) still travelling,
//! - `x = d + p`.
//!
//! `p` is a station-level quantity shared by every OD with the same origin.

use std::collections::BTreeSet;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use ndarray::{s, Array1, Array2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::network::{write_node_id, IdEncoding, Network, OdPair, Service};
use crate::simulator::{TrainEvent, TrainLog, TripLog};
use crate::time::{IntervalIndex, ServiceCalendar, Timestamp, HOUR, SLOTS_PER_DAY, WEEKDAYS};
use crate::{Error, Result};

/// Intervals of tendency history: `t, t-1, .., t-7`.
pub const LAGS: usize = 8;
pub const RELIABILITY_DIM: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ObservedDemand {
    pub x: u32,
    pub d: u32,
    pub p: u32,
}

fn check_past(interval: &IntervalIndex, prediction_time: Timestamp) -> Result<()> {
    if interval.end() > prediction_time {
        return Err(Error::FutureInterval {
            interval_end: interval.end(),
            prediction_time,
        });
    }
    Ok(())
}

/// Direct scan of the trip log.
pub fn observed_demand(
    trips: &TripLog,
    od: &OdPair,
    interval: &IntervalIndex,
    prediction_time: Timestamp,
) -> Result<ObservedDemand> {
    check_past(interval, prediction_time)?;
    let (start, end) = (interval.start(), interval.end());
    let evs = trips.events();
    let lo = evs.partition_point(|e| e.tap_in < start);
    let mut out = ObservedDemand::default();
    for e in evs[lo..].iter().take_while(|e| e.tap_in < end) {
        if e.origin != od.origin {
            continue;
        }
        if e.tap_out > prediction_time {
            out.p += 1;
        } else if e.destination == od.destination {
            out.d += 1;
        }
    }
    out.x = out.d + out.p;
    Ok(out)
}

/// Hindsight count of trips on the OD departing in the interval.
pub fn target(trips: &TripLog, od: &OdPair, interval: &IntervalIndex) -> u32 {
    let (start, end) = (interval.start(), interval.end());
    let evs = trips.events();
    let lo = evs.partition_point(|e| e.tap_in < start);
    evs[lo..]
        .iter()
        .take_while(|e| e.tap_in < end)
        .filter(|e| e.origin == od.origin && e.destination == od.destination)
        .count() as u32
}

/// One-hot weekday (Monday = 0) and one-hot slot.
pub fn calendar_features(interval: &IntervalIndex) -> ([f64; WEEKDAYS], [f64; SLOTS_PER_DAY]) {
    let mut fw = [0.0; WEEKDAYS];
    let mut ft = [0.0; SLOTS_PER_DAY];
    fw[interval.weekday()] = 1.0;
    ft[interval.slot] = 1.0;
    (fw, ft)
}

/// Per-service last-hour statistics: (served trains, mean delay of served
/// trains, cancelled proportion).
fn service_stats(events: &[TrainEvent], service: Service) -> [f64; 3] {
    let (mut total, mut served, mut delay) = (0usize, 0usize, 0.0);
    for e in events.iter().filter(|e| e.service() == service) {
        total += 1;
        if !e.cancelled {
            served += 1;
            delay += e.delay as f64;
        }
    }
    if total == 0 {
        return [0.0; 3];
    }
    let mean_delay = if served > 0 {
        delay / served as f64
    } else {
        0.0
    };
    [
        served as f64,
        mean_delay,
        (total - served) as f64 / total as f64,
    ]
}

fn summarize(stats: impl Iterator<Item = [f64; 3]>, out: &mut [f64]) {
    let mut n = 0usize;
    let mut sum = [0.0; 3];
    let mut max = [f64::NEG_INFINITY; 3];
    for s in stats {
        n += 1;
        for k in 0..3 {
            sum[k] += s[k];
            max[k] = max[k].max(s[k]);
        }
    }
    for k in 0..3 {
        let (mean, mx) = if n == 0 {
            (0.0, 0.0)
        } else {
            (sum[k] / n as f64, max[k])
        };
        out[2 * k] = mean;
        out[2 * k + 1] = mx;
    }
}

/// The twelve reliability features, ordered
/// `[origin: count-mean, count-max, delay-mean, delay-max, cancel-mean, cancel-max, destination: same]`,
/// over the hour up to the prediction time.
pub fn reliability_features(
    trains: &TrainLog,
    od: &OdPair,
    prediction_time: Timestamp,
    network: &Network,
) -> [f64; RELIABILITY_DIM] {
    let mut out = [0.0; RELIABILITY_DIM];
    let origin = trains.last_hour(od.origin, prediction_time);
    summarize(
        network
            .origin_services(od)
            .into_iter()
            .map(|s| service_stats(origin, s)),
        &mut out[..6],
    );
    let dest = trains.last_hour(od.destination, prediction_time);
    summarize(
        network
            .destination_services(od)
            .into_iter()
            .map(|s| service_stats(dest, s)),
        &mut out[6..],
    );
    out
}

/// Relevant services per OD endpoint, resolved once per network.
#[derive(Debug, Clone)]
pub struct ServiceMap {
    origin: Vec<Vec<Service>>,
    destination: Vec<Vec<Service>>,
}

impl ServiceMap {
    pub fn new(network: &Network) -> Self {
        let ods = network.od_pairs();
        Self {
            origin: ods.iter().map(|od| network.origin_services(od)).collect(),
            destination: ods
                .iter()
                .map(|od| network.destination_services(od))
                .collect(),
        }
    }

    /// Reliability rows for every OD at one prediction time.
    pub fn reliability_matrix(
        &self,
        trains: &TrainLog,
        network: &Network,
        prediction_time: Timestamp,
    ) -> Vec<[f64; RELIABILITY_DIM]> {
        let s = network.n_stations();
        let windows: Vec<&[TrainEvent]> = (0..s)
            .map(|st| trains.window(st, prediction_time - HOUR, prediction_time))
            .collect();
        network
            .od_pairs()
            .iter()
            .map(|od| {
                let mut row = [0.0; RELIABILITY_DIM];
                summarize(
                    self.origin[od.index]
                        .iter()
                        .map(|sv| service_stats(windows[od.origin], *sv)),
                    &mut row[..6],
                );
                summarize(
                    self.destination[od.index]
                        .iter()
                        .map(|sv| service_stats(windows[od.destination], *sv)),
                    &mut row[6..],
                );
                row
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
struct IndexedTrip {
    origin: u32,
    destination: u32,
    tap_out: Timestamp,
}

/// Trips bucketed by the service interval of their tap-in.
#[derive(Debug, Clone)]
pub struct TripIndex {
    calendar: ServiceCalendar,
    offsets: Vec<usize>,
    trips: Vec<IndexedTrip>,
}

impl TripIndex {
    /// Trips whose tap-in lies outside the calendar's service windows are
    /// ignored.
    pub fn new(trips: &TripLog, calendar: &ServiceCalendar) -> Self {
        let n = calendar.n_global_slots();
        let mut buckets: Vec<Vec<IndexedTrip>> = vec![Vec::new(); n];
        for e in trips.events() {
            if let Some(g) = calendar
                .locate(e.tap_in)
                .and_then(|iv| calendar.global_slot(&iv))
            {
                buckets[g].push(IndexedTrip {
                    origin: e.origin as u32,
                    destination: e.destination as u32,
                    tap_out: e.tap_out,
                });
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut flat = Vec::with_capacity(trips.len());
        for b in buckets {
            flat.extend(b);
            offsets.push(flat.len());
        }
        Self {
            calendar: calendar.clone(),
            offsets,
            trips: flat,
        }
    }

    pub fn calendar(&self) -> &ServiceCalendar {
        &self.calendar
    }

    fn bucket(&self, g: usize) -> &[IndexedTrip] {
        &self.trips[self.offsets[g]..self.offsets[g + 1]]
    }

    fn global(&self, interval: &IntervalIndex) -> Result<usize> {
        self.calendar.global_slot(interval).ok_or_else(|| {
            Error::InvalidArgument(format!("{} is not a service day", interval.date))
        })
    }

    pub fn observed(
        &self,
        od: &OdPair,
        interval: &IntervalIndex,
        prediction_time: Timestamp,
    ) -> Result<ObservedDemand> {
        check_past(interval, prediction_time)?;
        let mut out = ObservedDemand::default();
        for t in self.bucket(self.global(interval)?) {
            if t.origin as usize != od.origin {
                continue;
            }
            if t.tap_out > prediction_time {
                out.p += 1;
            } else if t.destination as usize == od.destination {
                out.d += 1;
            }
        }
        out.x = out.d + out.p;
        Ok(out)
    }

    /// Writes `x` and `d` for every OD of `network` for global interval `g`.
    fn observe_all(
        &self,
        network: &Network,
        g: usize,
        prediction_time: Timestamp,
        x: &mut [f64],
        d: &mut [f64],
    ) {
        let mut pending = vec![0u32; network.n_stations()];
        d.iter_mut().for_each(|v| *v = 0.0);
        for t in self.bucket(g) {
            if t.tap_out > prediction_time {
                if let Some(p) = pending.get_mut(t.origin as usize) {
                    *p += 1;
                }
            } else if let Some(i) = network.od_index(t.origin as usize, t.destination as usize) {
                d[i] += 1.0;
            }
        }
        for od in network.od_pairs() {
            x[od.index] = d[od.index] + pending[od.origin] as f64;
        }
    }

    /// Complete per-interval demand of every OD over `days`, concatenated in
    /// calendar order. Row `i` is OD `i`.
    pub fn demand_series(&self, network: &Network, days: &BTreeSet<NaiveDate>) -> Vec<Vec<f64>> {
        let day_ix: Vec<usize> = days
            .iter()
            .filter_map(|d| self.calendar.day_index(*d))
            .collect();
        let len = day_ix.len() * SLOTS_PER_DAY;
        let mut out = vec![vec![0.0; len]; network.od_pairs().len()];
        for (k, day) in day_ix.iter().enumerate() {
            for slot in 0..SLOTS_PER_DAY {
                let col = k * SLOTS_PER_DAY + slot;
                for t in self.bucket(day * SLOTS_PER_DAY + slot) {
                    if let Some(i) = network.od_index(t.origin as usize, t.destination as usize) {
                        out[i][col] += 1.0;
                    }
                }
            }
        }
        out
    }

    pub fn targets(&self, network: &Network, interval: &IntervalIndex) -> Result<Vec<f64>> {
        let mut out = vec![0.0; network.od_pairs().len()];
        for t in self.bucket(self.global(interval)?) {
            if let Some(i) = network.od_index(t.origin as usize, t.destination as usize) {
                out[i] += 1.0;
            }
        }
        Ok(out)
    }
}

/// `x` and `d` for intervals `t, t-1, .., t-7` (columns in that order) for
/// every OD of the network, evaluated at `prediction_time`. Lookback crosses
/// into the previous service day when needed.
pub fn tendency_features(
    index: &TripIndex,
    network: &Network,
    t: &IntervalIndex,
    prediction_time: Timestamp,
) -> Result<(Array2<f64>, Array2<f64>)> {
    check_past(t, prediction_time)?;
    let g = index.global(t)?;
    if g + 1 < LAGS {
        return Err(Error::InvalidArgument(format!(
            "interval {} slot {} has fewer than {} predecessors",
            t.date,
            t.slot,
            LAGS - 1
        )));
    }
    let n = network.od_pairs().len();
    let mut xs = Array2::zeros((n, LAGS));
    let mut ds = Array2::zeros((n, LAGS));
    let (mut x, mut d) = (vec![0.0; n], vec![0.0; n]);
    for lag in 0..LAGS {
        index.observe_all(network, g - lag, prediction_time, &mut x, &mut d);
        xs.column_mut(lag).assign(&Array1::from(x.clone()));
        ds.column_mut(lag).assign(&Array1::from(d.clone()));
    }
    Ok((xs, ds))
}

/// Column-block layout `[X(8) | D(8) | f_w(5) | f_t(21) | f_id | f_s(12)]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureLayout {
    pub id_encoding: IdEncoding,
    pub id_dim: usize,
    pub reliability: bool,
}

impl FeatureLayout {
    pub fn width(&self) -> usize {
        2 * LAGS
            + WEEKDAYS
            + SLOTS_PER_DAY
            + self.id_dim
            + if self.reliability { RELIABILITY_DIM } else { 0 }
    }

    pub fn id_offset(&self) -> usize {
        2 * LAGS + WEEKDAYS + SLOTS_PER_DAY
    }

    pub fn reliability_offset(&self) -> Option<usize> {
        self.reliability.then(|| self.id_offset() + self.id_dim)
    }

    pub fn column_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.width());
        names.extend((0..LAGS).map(|l| format!("x_t-{l}")));
        names.extend((0..LAGS).map(|l| format!("d_t-{l}")));
        names.extend(
            ["mon", "tue", "wed", "thu", "fri"]
                .iter()
                .map(|d| format!("fw_{d}")),
        );
        names.extend((0..SLOTS_PER_DAY).map(|s| format!("ft_{s:02}")));
        names.extend((0..self.id_dim).map(|i| format!("fid_{i}")));
        if self.reliability {
            for end in ["o", "d"] {
                for dim in ["count", "delay", "cancel"] {
                    for stat in ["mean", "max"] {
                        names.push(format!("fs_{end}_{dim}_{stat}"));
                    }
                }
            }
        }
        names
    }
}

/// Features and targets at one prediction boundary. Row `i` is OD `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub features: Array2<f64>,
    pub targets: Array1<f64>,
    /// The interval being predicted.
    pub interval: IntervalIndex,
    /// Start of the predicted interval.
    pub prediction_time: Timestamp,
}

/// Per-column z-scoring. Constant columns pass through unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit<'a>(samples: impl IntoIterator<Item = &'a SampleSet>, width: usize) -> Self {
        let mut count = 0.0;
        let mut sum = vec![0.0; width];
        let mut sq = vec![0.0; width];
        let mut first: Option<Vec<f64>> = None;
        let mut constant = vec![true; width];
        for s in samples {
            for row in s.features.rows() {
                count += 1.0;
                let reference = first.get_or_insert_with(|| row.to_vec());
                for (j, v) in row.iter().enumerate() {
                    sum[j] += v;
                    sq[j] += v * v;
                    if *v != reference[j] {
                        constant[j] = false;
                    }
                }
            }
        }
        let mut mean = vec![0.0; width];
        let mut scale = vec![1.0; width];
        if count > 0.0 {
            for j in 0..width {
                if constant[j] {
                    continue;
                }
                let m = sum[j] / count;
                let var = (sq[j] / count - m * m).max(0.0);
                if var.sqrt() > 1e-12 {
                    mean[j] = m;
                    scale[j] = var.sqrt();
                }
            }
        }
        Self { mean, scale }
    }

    pub fn apply(&self, features: &mut Array2<f64>) {
        for mut row in features.rows_mut() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (*v - self.mean[j]) / self.scale[j];
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureOptions {
    pub id_encoding: IdEncoding,
    pub reliability: bool,
    /// Days whose samples define the z-scoring statistics; `None` keeps raw values.
    pub normalize_on: Option<BTreeSet<NaiveDate>>,
}

impl FeatureOptions {
    pub fn raw(id_encoding: IdEncoding) -> Self {
        Self {
            id_encoding,
            reliability: true,
            normalize_on: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub layout: FeatureLayout,
    pub samples: Vec<SampleSet>,
    pub standardizer: Option<Standardizer>,
}

/// One sample per prediction boundary that has a full eight-interval
/// history, ordered by time.
pub fn assemble_dataset(
    trips: &TripLog,
    trains: &TrainLog,
    network: &Network,
    calendar: &ServiceCalendar,
    options: &FeatureOptions,
) -> Result<Dataset> {
    if calendar.is_empty() {
        return Err(Error::InvalidArgument(
            "calendar covers no service day".into(),
        ));
    }
    let n = network.od_pairs().len();
    if options.id_encoding == IdEncoding::OnehotOd && n > 1000 {
        log::warn!(
            "one-hot OD ids with {n} ODs inflate the feature width; consider signed_station ids"
        );
    }
    let layout = FeatureLayout {
        id_encoding: options.id_encoding,
        id_dim: options.id_encoding.dim(network),
        reliability: options.reliability,
    };
    let index = TripIndex::new(trips, calendar);
    let services = ServiceMap::new(network);
    let width = layout.width();

    let samples: Vec<SampleSet> = (LAGS..calendar.n_global_slots())
        .into_par_iter()
        .map(|g| -> Result<SampleSet> {
            let interval = calendar.from_global_slot(g);
            let prediction_time = interval.start();
            let t = calendar.from_global_slot(g - 1);
            let (xs, ds) = tendency_features(&index, network, &t, prediction_time)?;
            let mut features = Array2::zeros((n, width));
            features.slice_mut(s![.., 0..LAGS]).assign(&xs);
            features.slice_mut(s![.., LAGS..2 * LAGS]).assign(&ds);
            let (fw, ft) = calendar_features(&interval);
            let base = 2 * LAGS;
            for mut row in features.rows_mut() {
                for (k, v) in fw.iter().enumerate() {
                    row[base + k] = *v;
                }
                for (k, v) in ft.iter().enumerate() {
                    row[base + WEEKDAYS + k] = *v;
                }
            }
            let id0 = layout.id_offset();
            for od in network.od_pairs() {
                let mut row = features.row_mut(od.index);
                let slice = row.as_slice_mut().expect("row-major");
                write_node_id(od, layout.id_encoding, &mut slice[id0..id0 + layout.id_dim]);
            }
            if let Some(r0) = layout.reliability_offset() {
                let rel = services.reliability_matrix(trains, network, prediction_time);
                for (i, r) in rel.iter().enumerate() {
                    for (k, v) in r.iter().enumerate() {
                        features[[i, r0 + k]] = *v;
                    }
                }
            }
            let targets = Array1::from(index.targets(network, &interval)?);
            Ok(SampleSet {
                features,
                targets,
                interval,
                prediction_time,
            })
        })
        .collect::<Result<_>>()?;

    let mut dataset = Dataset {
        layout,
        samples,
        standardizer: None,
    };
    if let Some(days) = &options.normalize_on {
        dataset.standardize(days);
    }
    Ok(dataset)
}

impl Dataset {
    pub fn n_nodes(&self) -> usize {
        self.samples.first().map_or(0, |s| s.features.nrows())
    }

    /// Fits z-scoring on samples whose predicted interval falls on one of
    /// `train_days` and applies it to every sample.
    pub fn standardize(&mut self, train_days: &BTreeSet<NaiveDate>) -> &Standardizer {
        let st = Standardizer::fit(
            self.samples
                .iter()
                .filter(|s| train_days.contains(&s.interval.date)),
            self.layout.width(),
        );
        self.samples
            .par_iter_mut()
            .for_each(|s| st.apply(&mut s.features));
        self.standardizer.insert(st)
    }

    /// Copy of the dataset with the reliability block removed.
    pub fn without_reliability(&self) -> Dataset {
        let Some(r0) = self.layout.reliability_offset() else {
            return self.clone();
        };
        let layout = FeatureLayout {
            reliability: false,
            ..self.layout
        };
        let samples = self
            .samples
            .iter()
            .map(|s| SampleSet {
                features: s.features.slice(s![.., ..r0]).to_owned(),
                ..s.clone()
            })
            .collect();
        let standardizer = self.standardizer.as_ref().map(|st| Standardizer {
            mean: st.mean[..r0].to_vec(),
            scale: st.scale[..r0].to_vec(),
        });
        Dataset {
            layout,
            samples,
            standardizer,
        }
    }

    /// Splits samples by whether their predicted interval is on a training day.
    pub fn split<'a>(
        &'a self,
        train_days: &BTreeSet<NaiveDate>,
    ) -> (Vec<&'a SampleSet>, Vec<&'a SampleSet>) {
        self.samples
            .iter()
            .partition(|s| train_days.contains(&s.interval.date))
    }

    /// Writes `features.csv` (a header naming every column, keyed by day,
    /// slot and OD index) and `targets.csv`.
    pub fn write_csv(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut w = csv::Writer::from_path(dir.join("features.csv"))?;
        let mut header = vec!["day".to_string(), "slot".into(), "od_index".into()];
        header.extend(self.layout.column_names());
        w.write_record(&header)?;
        for s in &self.samples {
            for (i, row) in s.features.rows().into_iter().enumerate() {
                let mut rec = vec![
                    s.interval.date.to_string(),
                    s.interval.slot.to_string(),
                    i.to_string(),
                ];
                rec.extend(row.iter().map(|v| v.to_string()));
                w.write_record(&rec)?;
            }
        }
        w.flush()?;
        self.write_targets_csv(&dir.join("targets.csv"))
    }

    pub fn write_targets_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["day", "slot", "od_index", "target"])?;
        for s in &self.samples {
            for (i, v) in s.targets.iter().enumerate() {
                w.write_record([
                    s.interval.date.to_string(),
                    s.interval.slot.to_string(),
                    i.to_string(),
                    v.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Compact binary dump: a JSON header line followed by little-endian
    /// f64 features then targets, sample by sample.
    pub fn write_binary(&self, path: &Path) -> Result<()> {
        let header = BinaryHeader {
            layout: self.layout,
            n_nodes: self.n_nodes(),
            intervals: self.samples.iter().map(|s| s.interval).collect(),
            prediction_times: self.samples.iter().map(|s| s.prediction_time).collect(),
            standardizer: self.standardizer.clone(),
        };
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        w.write_all(BINARY_MAGIC)?;
        serde_json::to_writer(&mut w, &header)?;
        w.write_all(b"\n")?;
        for s in &self.samples {
            for v in s.features.iter().chain(s.targets.iter()) {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_binary(path: &Path) -> Result<Dataset> {
        if !path.exists() {
            return Err(Error::MissingArtifact(path.to_path_buf()));
        }
        let mut r = BufReader::new(std::fs::File::open(path)?);
        let mut magic = [0u8; BINARY_MAGIC.len()];
        r.read_exact(&mut magic)?;
        if magic != *BINARY_MAGIC {
            return Err(Error::parse("dataset", "bad magic"));
        }
        let mut line = Vec::new();
        let mut byte = [0u8; 1];
        loop {
            r.read_exact(&mut byte)?;
            if byte[0] == b'\n' {
                break;
            }
            line.push(byte[0]);
        }
        let header: BinaryHeader = serde_json::from_slice(&line)?;
        let (n, f) = (header.n_nodes, header.layout.width());
        let mut buf = vec![0u8; 8 * (n * f + n)];
        let mut samples = Vec::with_capacity(header.intervals.len());
        for (interval, prediction_time) in header.intervals.into_iter().zip(header.prediction_times)
        {
            r.read_exact(&mut buf)?;
            let vals: Vec<f64> = buf
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
                .collect();
            let features = Array2::from_shape_vec((n, f), vals[..n * f].to_vec())
                .map_err(|e| Error::parse("dataset", e))?;
            samples.push(SampleSet {
                features,
                targets: Array1::from(vals[n * f..].to_vec()),
                interval,
                prediction_time,
            });
        }
        Ok(Dataset {
            layout: header.layout,
            samples,
            standardizer: header.standardizer,
        })
    }
}

const BINARY_MAGIC: &[u8; 6] = b"ODSG1\n";

#[derive(Serialize, Deserialize)]
struct BinaryHeader {
    layout: FeatureLayout,
    n_nodes: usize,
    intervals: Vec<IntervalIndex>,
    prediction_times: Vec<Timestamp>,
    standardizer: Option<Standardizer>,
}
