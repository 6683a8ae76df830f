//! Rail network topology and the OD-pair vertex universe.

use std::collections::{BTreeSet, VecDeque};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::simulator::TripLog;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Station {
    pub id: usize,
    pub name: String,
    /// Easting in meters.
    pub utm_x: f64,
    /// Northing in meters.
    pub utm_y: f64,
    pub lines: BTreeSet<usize>,
}

/// A line is an ordered station sequence. Direction 0 runs from the first to
/// the last station, direction 1 the reverse.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Line {
    pub id: usize,
    pub stations: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OdPair {
    pub index: usize,
    pub origin: usize,
    pub destination: usize,
}

/// One line served in one direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Service {
    pub line: usize,
    pub direction: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairMode {
    AllPairs,
    TopKByMeanDemand(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdEncoding {
    OnehotOd,
    SignedStation,
}

impl IdEncoding {
    pub fn dim(self, network: &Network) -> usize {
        match self {
            IdEncoding::OnehotOd => network.od_pairs().len(),
            IdEncoding::SignedStation => network.n_stations(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Network {
    stations: Vec<Station>,
    lines: Vec<Line>,
    od_pairs: Vec<OdPair>,
    od_lookup: Vec<Option<usize>>,
    hops: Vec<u32>,
}

impl Network {
    /// Validates the topology, fills each station's line set and enumerates
    /// all ordered OD pairs.
    pub fn new(mut stations: Vec<Station>, lines: Vec<Line>) -> Result<Self> {
        let s = stations.len();
        for (i, st) in stations.iter().enumerate() {
            if st.id != i {
                return Err(Error::Network(format!(
                    "station ids must be dense 0..{s}, found {} at position {i}",
                    st.id
                )));
            }
            if !st.utm_x.is_finite() || !st.utm_y.is_finite() {
                return Err(Error::Network(format!(
                    "station {i} has non-finite coordinates"
                )));
            }
        }
        for st in stations.iter_mut() {
            st.lines.clear();
        }
        for (li, line) in lines.iter().enumerate() {
            if line.id != li {
                return Err(Error::Network(format!(
                    "line ids must be dense, found {}",
                    line.id
                )));
            }
            if line.stations.len() < 2 {
                return Err(Error::Network(format!(
                    "line {li} has fewer than 2 stations"
                )));
            }
            let unique: BTreeSet<_> = line.stations.iter().collect();
            if unique.len() != line.stations.len() {
                return Err(Error::Network(format!("line {li} visits a station twice")));
            }
            for &st in &line.stations {
                let station = stations.get_mut(st).ok_or_else(|| {
                    Error::Network(format!("line {li} references unknown station {st}"))
                })?;
                station.lines.insert(li);
            }
        }
        let hops = hop_matrix(s, &lines);
        let mut net = Self {
            stations,
            lines,
            od_pairs: Vec::new(),
            od_lookup: vec![None; s * s],
            hops,
        };
        let all = all_pairs(s);
        net.set_od_pairs(all)?;
        Ok(net)
    }

    pub fn stations(&self) -> &[Station] {
        &self.stations
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn n_stations(&self) -> usize {
        self.stations.len()
    }

    pub fn od_pairs(&self) -> &[OdPair] {
        &self.od_pairs
    }

    pub fn od_index(&self, origin: usize, destination: usize) -> Option<usize> {
        self.od_lookup
            .get(origin * self.n_stations() + destination)
            .copied()
            .flatten()
    }

    /// Replaces the vertex universe. Indices are reassigned densely in the
    /// given order.
    pub fn set_od_pairs(&mut self, pairs: Vec<OdPair>) -> Result<()> {
        let s = self.n_stations();
        let mut lookup = vec![None; s * s];
        let mut reindexed = Vec::with_capacity(pairs.len());
        for (i, p) in pairs.into_iter().enumerate() {
            if p.origin == p.destination || p.origin >= s || p.destination >= s {
                return Err(Error::Network(format!(
                    "invalid OD pair ({}, {})",
                    p.origin, p.destination
                )));
            }
            let slot = &mut lookup[p.origin * s + p.destination];
            if slot.is_some() {
                return Err(Error::Network(format!(
                    "duplicate OD pair ({}, {})",
                    p.origin, p.destination
                )));
            }
            *slot = Some(i);
            reindexed.push(OdPair { index: i, ..p });
        }
        self.od_pairs = reindexed;
        self.od_lookup = lookup;
        Ok(())
    }

    pub fn with_od_pairs(mut self, pairs: Vec<OdPair>) -> Result<Self> {
        self.set_od_pairs(pairs)?;
        Ok(self)
    }

    /// Shortest path length in line hops; `u32::MAX` when unreachable.
    pub fn hops(&self, a: usize, b: usize) -> u32 {
        self.hops[a * self.n_stations() + b]
    }

    fn position(&self, line: usize, station: usize) -> Option<usize> {
        self.lines[line].stations.iter().position(|&s| s == station)
    }

    /// Next station a train of `service` reaches after `station`.
    pub fn next_station(&self, service: Service, station: usize) -> Option<usize> {
        let seq = &self.lines[service.line].stations;
        let p = self.position(service.line, station)?;
        match service.direction {
            0 => seq.get(p + 1).copied(),
            _ => p.checked_sub(1).map(|q| seq[q]),
        }
    }

    /// Station a train of `service` visited just before `station`.
    pub fn previous_station(&self, service: Service, station: usize) -> Option<usize> {
        let reverse = Service {
            line: service.line,
            direction: 1 - service.direction.min(1),
        };
        self.next_station(reverse, station)
    }

    /// Services at the origin heading toward the destination: a direction
    /// qualifies when its next stop is strictly closer (in hops) to the
    /// destination. Lines with no qualifying direction contribute both.
    pub fn origin_services(&self, od: &OdPair) -> Vec<Service> {
        self.endpoint_services(od.origin, |svc| {
            self.next_station(svc, od.origin).is_some_and(|n| {
                self.hops(n, od.destination) < self.hops(od.origin, od.destination)
            })
        })
    }

    /// Services at the destination arriving from the origin side.
    pub fn destination_services(&self, od: &OdPair) -> Vec<Service> {
        self.endpoint_services(od.destination, |svc| {
            self.previous_station(svc, od.destination)
                .is_some_and(|p| self.hops(p, od.origin) < self.hops(od.destination, od.origin))
        })
    }

    fn endpoint_services(&self, station: usize, toward: impl Fn(Service) -> bool) -> Vec<Service> {
        let mut out = Vec::new();
        for &line in &self.stations[station].lines {
            let dirs: Vec<Service> = (0..2u8)
                .map(|direction| Service { line, direction })
                .filter(|s| toward(*s))
                .collect();
            if dirs.is_empty() {
                out.push(Service { line, direction: 0 });
                out.push(Service { line, direction: 1 });
            } else {
                out.extend(dirs);
            }
        }
        out
    }

    /// Restricts the network to a station subset. Stations are renumbered in
    /// ascending original-id order; lines are cut into maximal contiguous runs
    /// inside the subset and runs shorter than two stations are dropped.
    pub fn subnetwork(&self, keep: &[usize]) -> Result<Network> {
        let keep: BTreeSet<usize> = keep.iter().copied().collect();
        let mut remap = vec![None; self.n_stations()];
        let mut stations = Vec::new();
        for (new, &old) in keep.iter().enumerate() {
            let st = self
                .stations
                .get(old)
                .ok_or_else(|| Error::Network(format!("unknown station {old}")))?;
            remap[old] = Some(new);
            stations.push(Station {
                id: new,
                lines: BTreeSet::new(),
                ..st.clone()
            });
        }
        let mut lines = Vec::new();
        for line in &self.lines {
            let mut run = Vec::new();
            for &s in line.stations.iter().chain(std::iter::once(&usize::MAX)) {
                match remap.get(s).copied().flatten() {
                    Some(n) => run.push(n),
                    None => {
                        if run.len() >= 2 {
                            lines.push(Line {
                                id: lines.len(),
                                stations: std::mem::take(&mut run),
                            });
                        }
                        run.clear();
                    }
                }
            }
        }
        Network::new(stations, lines)
    }

    /// `count` consecutive stations along `line`, centred on the line's middle.
    pub fn contiguous_path(&self, line: usize, count: usize) -> Result<Vec<usize>> {
        let seq = &self
            .lines
            .get(line)
            .ok_or_else(|| Error::Network(format!("unknown line {line}")))?
            .stations;
        if count > seq.len() {
            return Err(Error::Network(format!(
                "line {line} has {} stations, {count} requested",
                seq.len()
            )));
        }
        let start = (seq.len() - count) / 2;
        Ok(seq[start..start + count].to_vec())
    }

    pub fn write_csv(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut w = csv::Writer::from_path(dir.join("stations.csv"))?;
        w.write_record(["station_id", "name", "utm_x", "utm_y"])?;
        for s in &self.stations {
            w.write_record([
                s.id.to_string(),
                s.name.clone(),
                s.utm_x.to_string(),
                s.utm_y.to_string(),
            ])?;
        }
        w.flush()?;
        let mut w = csv::Writer::from_path(dir.join("lines.csv"))?;
        w.write_record(["line_id", "seq", "station_id"])?;
        for l in &self.lines {
            for (seq, st) in l.stations.iter().enumerate() {
                w.write_record([l.id.to_string(), seq.to_string(), st.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reads `stations.csv` and `lines.csv`; the vertex universe is all pairs.
    pub fn read_csv(dir: &Path) -> Result<Network> {
        #[derive(Deserialize)]
        struct StationRow {
            station_id: usize,
            name: String,
            utm_x: f64,
            utm_y: f64,
        }
        #[derive(Deserialize)]
        struct LineRow {
            line_id: usize,
            seq: usize,
            station_id: usize,
        }
        let path = dir.join("stations.csv");
        if !path.exists() {
            return Err(Error::MissingArtifact(path));
        }
        let mut stations = Vec::new();
        for row in csv::Reader::from_path(&path)?.deserialize() {
            let r: StationRow = row?;
            stations.push(Station {
                id: r.station_id,
                name: r.name,
                utm_x: r.utm_x,
                utm_y: r.utm_y,
                lines: BTreeSet::new(),
            });
        }
        stations.sort_by_key(|s| s.id);
        let path = dir.join("lines.csv");
        if !path.exists() {
            return Err(Error::MissingArtifact(path));
        }
        let mut rows: Vec<LineRow> = csv::Reader::from_path(&path)?
            .deserialize()
            .collect::<Result<_, _>>()?;
        rows.sort_by_key(|r| (r.line_id, r.seq));
        let mut lines: Vec<Line> = Vec::new();
        for r in rows {
            if lines.len() <= r.line_id {
                lines.resize_with(r.line_id + 1, || Line {
                    id: 0,
                    stations: Vec::new(),
                });
            }
            lines[r.line_id].id = r.line_id;
            lines[r.line_id].stations.push(r.station_id);
        }
        Network::new(stations, lines)
    }
}

fn all_pairs(s: usize) -> Vec<OdPair> {
    let mut out = Vec::with_capacity(s * s.saturating_sub(1));
    for o in 0..s {
        for d in 0..s {
            if o != d {
                out.push(OdPair {
                    index: out.len(),
                    origin: o,
                    destination: d,
                });
            }
        }
    }
    out
}

fn hop_matrix(s: usize, lines: &[Line]) -> Vec<u32> {
    let mut adj = vec![Vec::new(); s];
    for line in lines {
        for w in line.stations.windows(2) {
            adj[w[0]].push(w[1]);
            adj[w[1]].push(w[0]);
        }
    }
    let mut hops = vec![u32::MAX; s * s];
    let mut queue = VecDeque::new();
    for src in 0..s {
        let row = &mut hops[src * s..(src + 1) * s];
        row[src] = 0;
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if row[v] == u32::MAX {
                    row[v] = row[u] + 1;
                    queue.push_back(v);
                }
            }
        }
    }
    hops
}

/// Enumerates the OD vertex set. The top-k mode ranks pairs by their mean
/// per-interval complete demand in `trips` (equivalently their trip count,
/// since every pair shares the same interval count); ties fall back to
/// (origin, destination) order. The returned pairs keep that ranking order
/// for top-k and lexicographic order for all pairs.
pub fn enumerate_od_pairs(
    network: &Network,
    mode: PairMode,
    trips: Option<&TripLog>,
) -> Result<Vec<OdPair>> {
    let s = network.n_stations();
    let all = all_pairs(s);
    match mode {
        PairMode::AllPairs => Ok(all),
        PairMode::TopKByMeanDemand(k) => {
            if k > all.len() {
                return Err(Error::KExceedsPairCount {
                    k,
                    pairs: all.len(),
                });
            }
            let trips = trips.ok_or_else(|| {
                Error::InvalidArgument("top-k OD selection requires a trip log".into())
            })?;
            let mut counts = vec![0u64; s * s];
            for t in trips.events() {
                if t.origin < s && t.destination < s {
                    counts[t.origin * s + t.destination] += 1;
                }
            }
            let mut ranked = all;
            ranked.sort_by(|a, b| {
                let ca = counts[a.origin * s + a.destination];
                let cb = counts[b.origin * s + b.destination];
                cb.cmp(&ca)
                    .then(a.origin.cmp(&b.origin))
                    .then(a.destination.cmp(&b.destination))
            });
            ranked.truncate(k);
            Ok(ranked
                .into_iter()
                .enumerate()
                .map(|(index, p)| OdPair { index, ..p })
                .collect())
        }
    }
}

pub fn node_id_encoding(od: &OdPair, network: &Network, mode: IdEncoding) -> Vec<f64> {
    let mut v = vec![0.0; mode.dim(network)];
    write_node_id(od, mode, &mut v);
    v
}

pub(crate) fn write_node_id(od: &OdPair, mode: IdEncoding, out: &mut [f64]) {
    match mode {
        IdEncoding::OnehotOd => out[od.index] = 1.0,
        IdEncoding::SignedStation => {
            out[od.origin] = 1.0;
            out[od.destination] = -1.0;
        }
    }
}

/// Parameters of the synthetic radial layout: a central trunk with branches
/// fanning out west and east. Every line runs branch → trunk → branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticLayout {
    pub n_stations: usize,
    pub trunk_len: usize,
    pub branches_per_side: usize,
    /// Mean spacing in meters between consecutive stations.
    pub spacing_m: f64,
    pub seed: u64,
}

impl Default for SyntheticLayout {
    fn default() -> Self {
        Self {
            n_stations: 84,
            trunk_len: 10,
            branches_per_side: 3,
            spacing_m: 2000.0,
            seed: 7,
        }
    }
}

impl SyntheticLayout {
    pub fn build(&self) -> Result<Network> {
        let b = self.branches_per_side;
        if b == 0 || self.trunk_len < 2 || self.n_stations < self.trunk_len + 2 * b {
            return Err(Error::config(
                "network",
                "need trunk_len >= 2, branches_per_side >= 1 and one station per branch",
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        // UTM-like origin so coordinates look like real eastings/northings.
        let (x0, y0) = (720_000.0, 6_175_000.0);
        let mut stations = Vec::with_capacity(self.n_stations);
        let push = |x: f64, y: f64, stations: &mut Vec<Station>| {
            let id = stations.len();
            stations.push(Station {
                id,
                name: format!("S{id:02}"),
                utm_x: x,
                utm_y: y,
                lines: BTreeSet::new(),
            });
            id
        };
        let half = (self.trunk_len as f64 - 1.0) / 2.0;
        let trunk_spacing = self.spacing_m * 0.75;
        let trunk: Vec<usize> = (0..self.trunk_len)
            .map(|i| {
                let jitter = rng.random_range(-0.1..0.1) * trunk_spacing;
                push(
                    x0 + (i as f64 - half) * trunk_spacing + jitter,
                    y0 + rng.random_range(-150.0..150.0),
                    &mut stations,
                )
            })
            .collect();
        let n_branches = 2 * b;
        let remaining = self.n_stations - self.trunk_len;
        let mut branches = Vec::with_capacity(n_branches);
        for k in 0..n_branches {
            let len = remaining / n_branches + usize::from(k < remaining % n_branches);
            let west = k < b;
            let j = (k % b) as f64;
            // Fan angles spread over ±50° around the trunk axis.
            let spread = if b == 1 {
                0.0
            } else {
                (j / (b as f64 - 1.0) - 0.5) * 100f64.to_radians()
            };
            let (anchor, base_angle) = if west {
                (trunk[0], std::f64::consts::PI - spread)
            } else {
                (trunk[self.trunk_len - 1], spread)
            };
            let (mut x, mut y) = (stations[anchor].utm_x, stations[anchor].utm_y);
            let mut branch = Vec::with_capacity(len);
            for _ in 0..len {
                let angle = base_angle + rng.random_range(-0.08..0.08);
                let step = self.spacing_m * rng.random_range(0.85..1.15);
                x += step * angle.cos();
                y += step * angle.sin();
                branch.push(push(x, y, &mut stations));
            }
            branches.push(branch);
        }
        let mut lines = Vec::new();
        let mut add_line = |w: &[usize], e: &[usize]| {
            let mut seq: Vec<usize> = w.iter().rev().copied().collect();
            seq.extend(&trunk);
            seq.extend(e);
            lines.push(Line {
                id: lines.len(),
                stations: seq,
            });
        };
        for i in 0..b {
            add_line(&branches[i], &branches[b + i]);
        }
        for i in 0..b.saturating_sub(1) {
            // Cross lines pair each west branch with the next east branch.
            add_line(&branches[i], &branches[b + i + 1]);
        }
        Network::new(stations, lines)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::TripEvent;

    fn line_network(s: usize) -> Network {
        let stations = (0..s)
            .map(|i| Station {
                id: i,
                name: format!("S{i}"),
                utm_x: i as f64 * 1000.0,
                utm_y: 0.0,
                lines: BTreeSet::new(),
            })
            .collect();
        let lines = vec![Line {
            id: 0,
            stations: (0..s).collect(),
        }];
        Network::new(stations, lines).unwrap()
    }

    #[test]
    fn all_pairs_counts() {
        assert_eq!(
            enumerate_od_pairs(&line_network(2), PairMode::AllPairs, None)
                .unwrap()
                .len(),
            2
        );
        assert_eq!(
            enumerate_od_pairs(&line_network(12), PairMode::AllPairs, None)
                .unwrap()
                .len(),
            132
        );
        let full = SyntheticLayout::default().build().unwrap();
        assert_eq!(full.n_stations(), 84);
        assert_eq!(
            enumerate_od_pairs(&full, PairMode::AllPairs, None)
                .unwrap()
                .len(),
            6972
        );
    }

    #[test]
    fn top_k_rejects_large_k() {
        let net = line_network(3);
        let err = enumerate_od_pairs(
            &net,
            PairMode::TopKByMeanDemand(7),
            Some(&TripLog::default()),
        );
        assert!(matches!(
            err,
            Err(Error::KExceedsPairCount { k: 7, pairs: 6 })
        ));
    }

    #[test]
    fn top_k_ranks_by_demand_with_index_ties() {
        let net = line_network(3);
        let trip = |o, d| TripEvent {
            origin: o,
            destination: d,
            tap_in: 0,
            tap_out: 1,
        };
        let log = TripLog::new(vec![trip(2, 1), trip(2, 1), trip(1, 0), trip(0, 2)]);
        let top = enumerate_od_pairs(&net, PairMode::TopKByMeanDemand(3), Some(&log)).unwrap();
        let pairs: Vec<_> = top.iter().map(|p| (p.origin, p.destination)).collect();
        assert_eq!(pairs, vec![(2, 1), (0, 2), (1, 0)]);
        assert_eq!(
            top.iter().map(|p| p.index).collect::<Vec<_>>(),
            vec![0, 1, 2]
        );
    }

    #[test]
    fn signed_station_encoding() {
        let net = line_network(4);
        let od = OdPair {
            index: net.od_index(1, 3).unwrap(),
            origin: 1,
            destination: 3,
        };
        assert_eq!(
            node_id_encoding(&od, &net, IdEncoding::SignedStation),
            vec![0.0, 1.0, 0.0, -1.0]
        );
        for od in net.od_pairs() {
            let v = node_id_encoding(od, &net, IdEncoding::SignedStation);
            assert_eq!(v.iter().sum::<f64>(), 0.0);
        }
    }

    #[test]
    fn onehot_encoding() {
        let net = line_network(4)
            .with_od_pairs(line_network(4).od_pairs()[..12].to_vec())
            .unwrap();
        let v = node_id_encoding(&net.od_pairs()[3], &net, IdEncoding::OnehotOd);
        let mut e3 = vec![0.0; 12];
        e3[3] = 1.0;
        assert_eq!(v, e3);
    }

    #[test]
    fn signed_encoding_is_injective() {
        let net = line_network(6);
        let codes: BTreeSet<Vec<i8>> = net
            .od_pairs()
            .iter()
            .map(|od| {
                node_id_encoding(od, &net, IdEncoding::SignedStation)
                    .into_iter()
                    .map(|x| x as i8)
                    .collect()
            })
            .collect();
        assert_eq!(codes.len(), net.od_pairs().len());
    }

    #[test]
    fn direction_resolution_on_a_single_line() {
        let net = line_network(5);
        let od = OdPair {
            index: 0,
            origin: 1,
            destination: 4,
        };
        assert_eq!(
            net.origin_services(&od),
            vec![Service {
                line: 0,
                direction: 0
            }]
        );
        assert_eq!(
            net.destination_services(&od),
            vec![Service {
                line: 0,
                direction: 0
            }]
        );
        let back = OdPair {
            index: 0,
            origin: 3,
            destination: 0,
        };
        assert_eq!(
            net.origin_services(&back),
            vec![Service {
                line: 0,
                direction: 1
            }]
        );
    }

    #[test]
    fn unrelated_line_contributes_both_directions() {
        // Line 1 only touches station 2 on its way from 5 to 6; an OD 2→0 gains
        // nothing from it.
        let stations = (0..7)
            .map(|i| Station {
                id: i,
                name: format!("S{i}"),
                utm_x: i as f64,
                utm_y: 0.0,
                lines: BTreeSet::new(),
            })
            .collect();
        let lines = vec![
            Line {
                id: 0,
                stations: vec![0, 1, 2, 3, 4],
            },
            Line {
                id: 1,
                stations: vec![5, 2, 6],
            },
        ];
        let net = Network::new(stations, lines).unwrap();
        let od = OdPair {
            index: 0,
            origin: 2,
            destination: 0,
        };
        let svc = net.origin_services(&od);
        assert_eq!(
            svc,
            vec![
                Service {
                    line: 0,
                    direction: 1
                },
                Service {
                    line: 1,
                    direction: 0
                },
                Service {
                    line: 1,
                    direction: 1
                },
            ]
        );
    }

    #[test]
    fn synthetic_layout_is_connected() {
        let net = SyntheticLayout::default().build().unwrap();
        for a in 0..net.n_stations() {
            for b in 0..net.n_stations() {
                assert_ne!(net.hops(a, b), u32::MAX);
            }
        }
        assert!(net.lines().len() >= 3);
    }

    #[test]
    fn contiguous_subnetwork() {
        let full = SyntheticLayout::default().build().unwrap();
        let path = full.contiguous_path(0, 12).unwrap();
        let tiny = full.subnetwork(&path).unwrap();
        assert_eq!(tiny.n_stations(), 12);
        assert_eq!(tiny.od_pairs().len(), 132);
        for a in 0..12 {
            for b in 0..12 {
                assert_ne!(tiny.hops(a, b), u32::MAX);
            }
        }
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let net = SyntheticLayout {
            n_stations: 20,
            ..Default::default()
        }
        .build()
        .unwrap();
        net.write_csv(dir.path()).unwrap();
        let back = Network::read_csv(dir.path()).unwrap();
        assert_eq!(back.stations(), net.stations());
        assert_eq!(back.lines(), net.lines());
    }

    #[test]
    fn rejects_invalid_pairs() {
        let net = line_network(3);
        let bad = vec![OdPair {
            index: 0,
            origin: 1,
            destination: 1,
        }];
        assert!(net.clone().with_od_pairs(bad).is_err());
        let dup = vec![
            OdPair {
                index: 0,
                origin: 0,
                destination: 1,
            },
            OdPair {
                index: 1,
                origin: 0,
                destination: 1,
            },
        ];
        assert!(net.with_od_pairs(dup).is_err());
    }
}
