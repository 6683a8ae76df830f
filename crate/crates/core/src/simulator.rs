//! Seeded synthetic AFC and train-operation logs.
//!
//! Demand for OD `i` on day `w` in slot `s` is Poisson with mean
//! `base_i · weekday_w · profile_s · shock · exp(elasticity · disruption)`,
//! where `shock` is a log-normal AR(1) multiplier shared by all ODs whose
//! origin and destination lie in the same community (cross-community ODs
//! draw their own), and `disruption` is [`disruption_index`] at the origin
//! evaluated at the slot start.

use std::collections::BTreeSet;
use std::path::Path;

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::network::{Network, OdPair, Service};
use crate::time::{
    self, midnight, ServiceCalendar, Timestamp, HOUR, SERVICE_END, SERVICE_START, SLOTS_PER_DAY,
    SLOT_SECONDS, WEEKDAYS,
};
use crate::{Error, Result};

/// Mean delay, in seconds, that counts as one unit of disruption.
pub const DELAY_UNIT_S: f64 = 300.0;

/// Trains are scheduled from one hour before the demand window so that the
/// last-hour reliability window is populated at 05:00.
pub const TRAIN_SERVICE_START: i64 = SERVICE_START - HOUR;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripEvent {
    pub origin: usize,
    pub destination: usize,
    pub tap_in: Timestamp,
    pub tap_out: Timestamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainEvent {
    pub station: usize,
    pub line: usize,
    pub direction: u8,
    pub scheduled: Timestamp,
    pub delay: u32,
    pub cancelled: bool,
}

impl TrainEvent {
    pub fn service(&self) -> Service {
        Service {
            line: self.line,
            direction: self.direction,
        }
    }
}

/// Trip events ordered by tap-in time.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TripLog {
    events: Vec<TripEvent>,
}

impl TripLog {
    pub fn new(mut events: Vec<TripEvent>) -> Self {
        events.sort_by_key(|e| (e.tap_in, e.origin, e.destination, e.tap_out));
        Self { events }
    }

    pub fn events(&self) -> &[TripEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["origin", "destination", "tap_in", "tap_out"])?;
        for e in &self.events {
            w.write_record([
                e.origin.to_string(),
                e.destination.to_string(),
                time::format_iso(e.tap_in),
                time::format_iso(e.tap_out),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingArtifact(path.to_path_buf()));
        }
        let mut events = Vec::new();
        for rec in csv::Reader::from_path(path)?.records() {
            let rec = rec?;
            let field = |i: usize| {
                rec.get(i)
                    .ok_or_else(|| Error::parse("trips.csv", "short row"))
            };
            events.push(TripEvent {
                origin: field(0)?
                    .parse()
                    .map_err(|e| Error::parse("trips.csv", e))?,
                destination: field(1)?
                    .parse()
                    .map_err(|e| Error::parse("trips.csv", e))?,
                tap_in: time::parse_iso(field(2)?)?,
                tap_out: time::parse_iso(field(3)?)?,
            });
        }
        Ok(Self::new(events))
    }
}

/// Train events grouped by station, each group ordered by scheduled time.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrainLog {
    events: Vec<TrainEvent>,
    offsets: Vec<usize>,
}

impl TrainLog {
    pub fn new(mut events: Vec<TrainEvent>) -> Self {
        events.sort_by_key(|e| (e.station, e.scheduled, e.line, e.direction));
        let n_stations = events.iter().map(|e| e.station + 1).max().unwrap_or(0);
        let mut offsets = vec![0; n_stations + 1];
        for e in &events {
            offsets[e.station + 1] += 1;
        }
        for i in 0..n_stations {
            offsets[i + 1] += offsets[i];
        }
        Self { events, offsets }
    }

    pub fn events(&self) -> &[TrainEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn at_station(&self, station: usize) -> &[TrainEvent] {
        if station + 1 >= self.offsets.len() {
            return &[];
        }
        &self.events[self.offsets[station]..self.offsets[station + 1]]
    }

    /// Events at `station` scheduled in `(from, to]`.
    pub fn window(&self, station: usize, from: Timestamp, to: Timestamp) -> &[TrainEvent] {
        let evs = self.at_station(station);
        let lo = evs.partition_point(|e| e.scheduled <= from);
        let hi = evs.partition_point(|e| e.scheduled <= to);
        &evs[lo..hi.max(lo)]
    }

    /// Events at `station` scheduled in the hour up to and including `t`.
    pub fn last_hour(&self, station: usize, t: Timestamp) -> &[TrainEvent] {
        self.window(station, t - HOUR, t)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record([
            "station",
            "line",
            "direction",
            "scheduled",
            "delay_s",
            "cancelled",
        ])?;
        for e in &self.events {
            w.write_record([
                e.station.to_string(),
                e.line.to_string(),
                e.direction.to_string(),
                time::format_iso(e.scheduled),
                e.delay.to_string(),
                u8::from(e.cancelled).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingArtifact(path.to_path_buf()));
        }
        let bad = |e: &dyn std::fmt::Display| Error::parse("trains.csv", e);
        let mut events = Vec::new();
        for rec in csv::Reader::from_path(path)?.records() {
            let rec = rec?;
            let field = |i: usize| {
                rec.get(i)
                    .ok_or_else(|| Error::parse("trains.csv", "short row"))
            };
            events.push(TrainEvent {
                station: field(0)?.parse().map_err(|e| bad(&e))?,
                line: field(1)?.parse().map_err(|e| bad(&e))?,
                direction: field(2)?.parse().map_err(|e| bad(&e))?,
                scheduled: time::parse_iso(field(3)?)?,
                delay: field(4)?.parse().map_err(|e| bad(&e))?,
                cancelled: match field(5)? {
                    "0" => false,
                    "1" => true,
                    other => return Err(bad(&format!("cancelled must be 0 or 1, got {other}"))),
                },
            });
        }
        Ok(Self::new(events))
    }
}

/// `(mean delay of served trains)/300 s + (cancelled proportion)` over the
/// hour up to `prediction_time`; zero when no trains were scheduled.
pub fn disruption_index(train_log: &TrainLog, station: usize, prediction_time: Timestamp) -> f64 {
    disruption_of(train_log.last_hour(station, prediction_time))
}

pub(crate) fn disruption_of(events: &[TrainEvent]) -> f64 {
    if events.is_empty() {
        return 0.0;
    }
    let (mut served, mut delay_sum, mut cancelled) = (0usize, 0.0, 0usize);
    for e in events {
        if e.cancelled {
            cancelled += 1;
        } else {
            served += 1;
            delay_sum += e.delay as f64;
        }
    }
    let mean_delay = if served > 0 {
        delay_sum / served as f64
    } else {
        0.0
    };
    mean_delay / DELAY_UNIT_S + cancelled as f64 / events.len() as f64
}

/// Scalar simulation parameters; [`SimConfig::from_params`] expands them
/// into per-OD and per-line vectors for a concrete network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimParams {
    pub n_days: usize,
    pub start_date: NaiveDate,
    /// Mean base rate per OD and slot before multiplicative factors.
    pub demand_scale: f64,
    pub weekday_factors: Vec<f64>,
    /// Empty means the built-in morning-peak profile.
    pub slot_profile: Vec<f64>,
    /// Side of the square grid cells that define station communities.
    pub community_cell_m: f64,
    pub community_shock_sd: f64,
    pub shock_persistence: f64,
    pub headway_min: f64,
    pub per_hop_s: f64,
    pub delay_prob: f64,
    pub delay_mean_s: f64,
    pub cancel_prob: f64,
    pub episode_prob: f64,
    pub episode_min_minutes: u32,
    pub episode_max_minutes: u32,
    pub episode_delay_mean_s: f64,
    pub episode_cancel_prob: f64,
    pub reliability_elasticity: f64,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            n_days: 240,
            start_date: NaiveDate::from_ymd_opt(2021, 2, 1).expect("valid date"),
            demand_scale: 3.0,
            weekday_factors: vec![1.0, 1.04, 1.06, 1.02, 0.9],
            slot_profile: Vec::new(),
            community_cell_m: 5000.0,
            community_shock_sd: 0.3,
            shock_persistence: 0.85,
            headway_min: 10.0,
            per_hop_s: 150.0,
            delay_prob: 0.3,
            delay_mean_s: 45.0,
            cancel_prob: 0.01,
            episode_prob: 0.15,
            episode_min_minutes: 60,
            episode_max_minutes: 180,
            episode_delay_mean_s: 480.0,
            episode_cancel_prob: 0.2,
            reliability_elasticity: -0.8,
        }
    }
}

pub fn default_slot_profile() -> Vec<f64> {
    (0..SLOTS_PER_DAY)
        .map(|s| {
            let z = (s as f64 - 8.0) / 3.0;
            0.35 + 1.3 * (-z * z).exp()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DelayModel {
    pub prob: f64,
    pub mean_s: f64,
}

/// Disruption episodes: contiguous windows on a line (both directions) with
/// raised delays and cancellations.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeModel {
    pub prob_per_line_day: f64,
    pub min_minutes: u32,
    pub max_minutes: u32,
    pub delay_mean_s: f64,
    pub cancel_prob: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub seed: u64,
    pub n_days: usize,
    pub start_date: NaiveDate,
    /// Indexed by all-pairs order: origin-major, destination-minor, skipping o = d.
    pub base_rates: Vec<f64>,
    pub weekday_factors: Vec<f64>,
    pub slot_profile: Vec<f64>,
    pub community: Vec<usize>,
    pub community_shock_sd: f64,
    pub shock_persistence: f64,
    /// Minutes between trains, per line.
    pub headway_min: Vec<f64>,
    pub per_hop_s: f64,
    pub delay: DelayModel,
    /// Per-train cancellation probability, per line.
    pub cancel_prob: Vec<f64>,
    pub episodes: EpisodeModel,
    pub reliability_elasticity: f64,
}

fn pair_slot(s: usize, o: usize, d: usize) -> usize {
    o * (s - 1) + if d < o { d } else { d - 1 }
}

impl SimConfig {
    /// Gravity-model base rates over a seeded station popularity, grid
    /// communities and uniform line service.
    pub fn from_params(params: &SimParams, network: &Network, seed: u64) -> Result<Self> {
        let s = network.n_stations();
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[0x9e37, 1]));
        let pop_dist = Normal::new(0.0f64, 0.5).expect("valid normal");
        let popularity: Vec<f64> = (0..s).map(|_| pop_dist.sample(&mut rng).exp()).collect();
        let community = grid_communities(network, params.community_cell_m);
        let mut raw = vec![0.0; s * s.saturating_sub(1)];
        for o in 0..s {
            for d in 0..s {
                if o == d {
                    continue;
                }
                let h = network.hops(o, d) as f64;
                let boost = if community[o] == community[d] {
                    1.5
                } else {
                    1.0
                };
                raw[pair_slot(s, o, d)] = popularity[o] * popularity[d] * (-h / 6.0).exp() * boost;
            }
        }
        let mean = raw.iter().sum::<f64>() / raw.len().max(1) as f64;
        let base_rates = raw
            .iter()
            .map(|r| {
                if mean > 0.0 {
                    params.demand_scale * r / mean
                } else {
                    0.0
                }
            })
            .collect();
        let n_lines = network.lines().len();
        let cfg = Self {
            seed,
            n_days: params.n_days,
            start_date: params.start_date,
            base_rates,
            weekday_factors: params.weekday_factors.clone(),
            slot_profile: if params.slot_profile.is_empty() {
                default_slot_profile()
            } else {
                params.slot_profile.clone()
            },
            community,
            community_shock_sd: params.community_shock_sd,
            shock_persistence: params.shock_persistence,
            headway_min: vec![params.headway_min; n_lines],
            per_hop_s: params.per_hop_s,
            delay: DelayModel {
                prob: params.delay_prob,
                mean_s: params.delay_mean_s,
            },
            cancel_prob: vec![params.cancel_prob; n_lines],
            episodes: EpisodeModel {
                prob_per_line_day: params.episode_prob,
                min_minutes: params.episode_min_minutes,
                max_minutes: params.episode_max_minutes,
                delay_mean_s: params.episode_delay_mean_s,
                cancel_prob: params.episode_cancel_prob,
            },
            reliability_elasticity: params.reliability_elasticity,
        };
        cfg.validate(network)?;
        Ok(cfg)
    }

    pub fn base_rate(&self, s: usize, origin: usize, destination: usize) -> f64 {
        self.base_rates[pair_slot(s, origin, destination)]
    }

    pub fn validate(&self, network: &Network) -> Result<()> {
        let s = network.n_stations();
        let lines = network.lines().len();
        let check = |ok: bool, field: &str, reason: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::config(format!("simulator.{field}"), reason))
            }
        };
        check(
            self.base_rates.len() == s * s.saturating_sub(1),
            "base_rates",
            "one rate per ordered station pair",
        )?;
        check(
            self.base_rates.iter().all(|r| r.is_finite() && *r >= 0.0),
            "base_rates",
            "rates must be finite and >= 0",
        )?;
        check(
            self.weekday_factors.len() == WEEKDAYS && self.weekday_factors.iter().all(|f| *f > 0.0),
            "weekday_factors",
            "five positive factors",
        )?;
        check(
            self.slot_profile.len() == SLOTS_PER_DAY && self.slot_profile.iter().all(|f| *f > 0.0),
            "slot_profile",
            "21 positive values",
        )?;
        check(
            self.community.len() == s,
            "community",
            "one community per station",
        )?;
        check(
            self.community_shock_sd >= 0.0,
            "community_shock_sd",
            "must be >= 0",
        )?;
        check(
            (0.0..1.0).contains(&self.shock_persistence),
            "shock_persistence",
            "must lie in [0, 1)",
        )?;
        check(
            self.headway_min.len() == lines && self.headway_min.iter().all(|h| *h > 0.0),
            "headway_min",
            "positive headway per line",
        )?;
        check(self.per_hop_s > 0.0, "per_hop_s", "must be > 0")?;
        check(
            (0.0..=1.0).contains(&self.delay.prob),
            "delay_prob",
            "probability in [0, 1]",
        )?;
        check(self.delay.mean_s > 0.0, "delay_mean_s", "must be > 0")?;
        check(
            self.cancel_prob.len() == lines
                && self.cancel_prob.iter().all(|p| (0.0..=1.0).contains(p)),
            "cancel_prob",
            "probability in [0, 1] per line",
        )?;
        let ep = &self.episodes;
        check(
            (0.0..=1.0).contains(&ep.prob_per_line_day),
            "episode_prob",
            "probability in [0, 1]",
        )?;
        check(
            ep.min_minutes >= 1 && ep.min_minutes <= ep.max_minutes && ep.max_minutes <= 7 * 60,
            "episode_min_minutes",
            "need 1 <= min <= max <= 420",
        )?;
        check(ep.delay_mean_s > 0.0, "episode_delay_mean_s", "must be > 0")?;
        check(
            (0.0..=1.0).contains(&ep.cancel_prob),
            "episode_cancel_prob",
            "probability in [0, 1]",
        )?;
        check(
            self.reliability_elasticity <= 0.0,
            "reliability_elasticity",
            "must be <= 0",
        )?;
        Ok(())
    }

    pub fn calendar(&self) -> ServiceCalendar {
        ServiceCalendar::weekdays_from(self.start_date, self.n_days)
    }
}

/// Stations sharing a square grid cell form one community; ids are dense in
/// first-seen station order.
pub fn grid_communities(network: &Network, cell_m: f64) -> Vec<usize> {
    let mut keys: Vec<(i64, i64)> = Vec::new();
    network
        .stations()
        .iter()
        .map(|s| {
            let key = (
                (s.utm_x / cell_m).floor() as i64,
                (s.utm_y / cell_m).floor() as i64,
            );
            match keys.iter().position(|k| *k == key) {
                Some(i) => i,
                None => {
                    keys.push(key);
                    keys.len() - 1
                }
            }
        })
        .collect()
}

/// SplitMix64-style mixing of a base seed with stream identifiers.
pub fn derive_seed(seed: u64, stream: &[u64]) -> u64 {
    let mut z = seed ^ 0x243f_6a88_85a3_08d3;
    for &s in stream {
        z = z
            .wrapping_add(s.wrapping_mul(0x9e37_79b9_7f4a_7c15))
            .wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
    }
    z
}

/// Generates the trip and train logs. Each day draws from its own sub-seed of
/// `(seed, day)`, so days are produced in parallel without affecting output.
pub fn simulate(config: &SimConfig, network: &Network) -> Result<(TripLog, TrainLog)> {
    config.validate(network)?;
    let calendar = config.calendar();
    let days: Vec<(Vec<TripEvent>, Vec<TrainEvent>)> = (0..calendar.len())
        .into_par_iter()
        .map(|day| simulate_day(config, network, calendar.days()[day], day as u64))
        .collect();
    let mut trips = Vec::new();
    let mut trains = Vec::new();
    for (t, r) in days {
        trips.extend(t);
        trains.extend(r);
    }
    Ok((TripLog::new(trips), TrainLog::new(trains)))
}

fn simulate_day(
    config: &SimConfig,
    network: &Network,
    date: NaiveDate,
    day: u64,
) -> (Vec<TripEvent>, Vec<TrainEvent>) {
    let day_start = midnight(date);
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, &[day, 1]));
    let trains = TrainLog::new(simulate_trains(config, network, day_start, &mut rng));

    let s = network.n_stations();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, &[day, 2]));
    let weekday = time::weekday_index(date);

    // Disruption index per (origin station, slot) at the slot start.
    let disruption: Vec<f64> = (0..s)
        .flat_map(|st| {
            let trains = &trains;
            (0..SLOTS_PER_DAY).map(move |slot| {
                let t = day_start + SERVICE_START + slot as i64 * SLOT_SECONDS;
                disruption_index(trains, st, t)
            })
        })
        .collect();

    let n_comm = config.community.iter().copied().max().map_or(0, |m| m + 1);
    let community_shock: Vec<Vec<f64>> =
        (0..n_comm).map(|_| shock_path(config, &mut rng)).collect();

    let mut trips = Vec::new();
    for o in 0..s {
        for d in 0..s {
            if o == d {
                continue;
            }
            let base = config.base_rate(s, o, d) * config.weekday_factors[weekday];
            let own;
            let shock = if config.community[o] == config.community[d] {
                &community_shock[config.community[o]]
            } else {
                own = shock_path(config, &mut rng);
                &own
            };
            if base <= 0.0 {
                continue;
            }
            let od = OdPair {
                index: 0,
                origin: o,
                destination: d,
            };
            let services: BTreeSet<Service> = network.origin_services(&od).into_iter().collect();
            let travel = network.hops(o, d) as i64 * config.per_hop_s.round() as i64;
            for slot in 0..SLOTS_PER_DAY {
                let coupling =
                    (config.reliability_elasticity * disruption[o * SLOTS_PER_DAY + slot]).exp();
                let lambda = base * config.slot_profile[slot] * shock[slot] * coupling;
                let n = poisson(lambda, &mut rng);
                let slot_start = day_start + SERVICE_START + slot as i64 * SLOT_SECONDS;
                for _ in 0..n {
                    let tap_in = slot_start + rng.random_range(0..SLOT_SECONDS);
                    let delay = boarding_delay(&trains, o, &services, tap_in);
                    trips.push(TripEvent {
                        origin: o,
                        destination: d,
                        tap_in,
                        tap_out: tap_in + travel.max(1) + delay,
                    });
                }
            }
        }
    }
    (trips, trains.events)
}

/// Log-normal AR(1) multipliers over the day's slots with unit mean.
fn shock_path(config: &SimConfig, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let sd = config.community_shock_sd;
    if sd == 0.0 {
        return vec![1.0; SLOTS_PER_DAY];
    }
    let rho = config.shock_persistence;
    let normal = Normal::new(0.0, sd).expect("valid normal");
    let innovation = (1.0 - rho * rho).sqrt();
    let mut z = normal.sample(rng);
    let mut out = Vec::with_capacity(SLOTS_PER_DAY);
    for _ in 0..SLOTS_PER_DAY {
        out.push((z - sd * sd / 2.0).exp());
        z = rho * z + innovation * normal.sample(rng);
    }
    out
}

fn poisson(lambda: f64, rng: &mut ChaCha8Rng) -> u64 {
    if lambda <= 0.0 || !lambda.is_finite() {
        return 0;
    }
    Poisson::new(lambda).map_or(0, |p| p.sample(rng) as u64)
}

/// Delay of the first served train on a relevant service at or after tap-in.
fn boarding_delay(
    trains: &TrainLog,
    origin: usize,
    services: &BTreeSet<Service>,
    tap_in: Timestamp,
) -> i64 {
    let evs = trains.at_station(origin);
    let start = evs.partition_point(|e| e.scheduled < tap_in);
    evs[start..]
        .iter()
        .take_while(|e| e.scheduled < tap_in + 2 * HOUR)
        .find(|e| !e.cancelled && services.contains(&e.service()))
        .map_or(0, |e| e.delay as i64)
}

fn simulate_trains(
    config: &SimConfig,
    network: &Network,
    day_start: Timestamp,
    rng: &mut ChaCha8Rng,
) -> Vec<TrainEvent> {
    let window_start = day_start + TRAIN_SERVICE_START;
    let window_end = day_start + SERVICE_END;
    let per_hop = config.per_hop_s.round() as i64;
    let mut events = Vec::new();
    for line in network.lines() {
        let ep = &config.episodes;
        let episode = if rng.random_bool(ep.prob_per_line_day) {
            let minutes = rng.random_range(ep.min_minutes..=ep.max_minutes) as i64;
            let latest = (window_end - window_start - minutes * 60).max(0);
            let start = window_start + rng.random_range(0..=latest);
            Some((start, start + minutes * 60))
        } else {
            None
        };
        let headway = (config.headway_min[line.id] * 60.0).round().max(1.0) as i64;
        let len = line.stations.len() as i64;
        let run = (len - 1) * per_hop;
        for direction in 0..2u8 {
            let mut depart = window_start - run;
            while depart < window_end {
                for k in 0..len {
                    let scheduled = depart + k * per_hop;
                    if scheduled < window_start || scheduled >= window_end {
                        continue;
                    }
                    let pos = if direction == 0 { k } else { len - 1 - k } as usize;
                    let in_episode = episode.is_some_and(|(a, b)| scheduled >= a && scheduled < b);
                    let (cancel_p, delay_p, delay_mean) = if in_episode {
                        (
                            config.cancel_prob[line.id].max(ep.cancel_prob),
                            1.0,
                            ep.delay_mean_s,
                        )
                    } else {
                        (
                            config.cancel_prob[line.id],
                            config.delay.prob,
                            config.delay.mean_s,
                        )
                    };
                    let cancelled = rng.random_bool(cancel_p);
                    let delay = if !cancelled && rng.random_bool(delay_p) {
                        Exp::new(1.0 / delay_mean)
                            .expect("positive rate")
                            .sample(rng)
                            .round() as u32
                    } else {
                        0
                    };
                    events.push(TrainEvent {
                        station: line.stations[pos],
                        line: line.id,
                        direction,
                        scheduled,
                        delay,
                        cancelled,
                    });
                }
                depart += headway;
            }
        }
    }
    events
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::SyntheticLayout;
    use crate::time::ServiceCalendar;

    fn tiny() -> Network {
        let full = SyntheticLayout::default().build().unwrap();
        full.subnetwork(&full.contiguous_path(0, 12).unwrap())
            .unwrap()
    }

    fn config(net: &Network, days: usize) -> SimConfig {
        let params = SimParams {
            n_days: days,
            ..Default::default()
        };
        SimConfig::from_params(&params, net, 11).unwrap()
    }

    fn ev(delay: u32, cancelled: bool) -> TrainEvent {
        TrainEvent {
            station: 0,
            line: 0,
            direction: 0,
            scheduled: 100,
            delay,
            cancelled,
        }
    }

    #[test]
    fn disruption_index_formula() {
        assert_eq!(disruption_of(&[]), 0.0);
        assert_eq!(disruption_of(&[ev(0, false), ev(0, false)]), 0.0);
        assert!((disruption_of(&[ev(300, false), ev(300, false)]) - 1.0).abs() < 1e-12);
        let mixed = [ev(100, false), ev(200, false), ev(150, false), ev(0, true)];
        assert!((disruption_of(&mixed) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn zero_rates_give_empty_trip_log() {
        let net = tiny();
        let mut cfg = config(&net, 2);
        cfg.base_rates.iter_mut().for_each(|r| *r = 0.0);
        let (trips, trains) = simulate(&cfg, &net).unwrap();
        assert!(trips.is_empty());
        assert!(!trains.is_empty());
    }

    #[test]
    fn forced_cancellation_on_one_line() {
        let net = tiny();
        let mut cfg = config(&net, 2);
        cfg.cancel_prob[1] = 1.0;
        let (_, trains) = simulate(&cfg, &net).unwrap();
        let on_line: Vec<_> = trains.events().iter().filter(|e| e.line == 1).collect();
        assert!(!on_line.is_empty());
        assert!(on_line.iter().all(|e| e.cancelled && e.delay == 0));
    }

    #[test]
    fn seeded_determinism() {
        let net = tiny();
        let cfg = config(&net, 3);
        let a = simulate(&cfg, &net).unwrap();
        let b = simulate(&cfg, &net).unwrap();
        assert_eq!(a, b);
        let dir = tempfile::tempdir().unwrap();
        a.0.write_csv(&dir.path().join("a.csv")).unwrap();
        b.0.write_csv(&dir.path().join("b.csv")).unwrap();
        assert_eq!(
            std::fs::read(dir.path().join("a.csv")).unwrap(),
            std::fs::read(dir.path().join("b.csv")).unwrap()
        );
    }

    #[test]
    fn events_respect_service_windows() {
        let net = tiny();
        let cfg = config(&net, 5);
        let (trips, trains) = simulate(&cfg, &net).unwrap();
        let cal = cfg.calendar();
        assert!(!trips.is_empty());
        for t in trips.events() {
            assert!(cal.locate(t.tap_in).is_some(), "tap_in outside window");
            assert!(t.tap_out > t.tap_in);
            let date = chrono::DateTime::from_timestamp(t.tap_out, 0)
                .unwrap()
                .date_naive();
            assert!(cal.day_index(date).is_some());
        }
        for e in trains.events() {
            let date = chrono::DateTime::from_timestamp(e.scheduled, 0)
                .unwrap()
                .date_naive();
            let off = e.scheduled - midnight(date);
            assert!((TRAIN_SERVICE_START..SERVICE_END).contains(&off));
            if e.cancelled {
                assert_eq!(e.delay, 0);
            }
        }
    }

    #[test]
    fn regular_headway_gives_six_trains_per_hour() {
        let net = tiny();
        let mut cfg = config(&net, 1);
        cfg.delay.prob = 0.0;
        cfg.cancel_prob.iter_mut().for_each(|p| *p = 0.0);
        cfg.episodes.prob_per_line_day = 0.0;
        let (_, trains) = simulate(&cfg, &net).unwrap();
        let cal = cfg.calendar();
        let t = cal.interval(0, 9).start();
        let st = net.lines()[0].stations[3];
        let per_service = trains
            .last_hour(st, t)
            .iter()
            .filter(|e| e.line == 0 && e.direction == 0)
            .count();
        assert_eq!(per_service, 6);
        assert_eq!(disruption_index(&trains, st, t), 0.0);
    }

    #[test]
    fn csv_round_trip() {
        let net = tiny();
        let cfg = config(&net, 1);
        let (trips, trains) = simulate(&cfg, &net).unwrap();
        let dir = tempfile::tempdir().unwrap();
        trips.write_csv(&dir.path().join("trips.csv")).unwrap();
        trains.write_csv(&dir.path().join("trains.csv")).unwrap();
        assert_eq!(
            TripLog::read_csv(&dir.path().join("trips.csv")).unwrap(),
            trips
        );
        assert_eq!(
            TrainLog::read_csv(&dir.path().join("trains.csv")).unwrap(),
            trains
        );
    }

    #[test]
    fn calendar_is_weekdays() {
        let cal = ServiceCalendar::weekdays_from(SimParams::default().start_date, 10);
        assert!(cal.days().iter().all(|d| time::is_weekday(*d)));
    }
}
