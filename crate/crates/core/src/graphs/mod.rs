//! OD-pair graphs: one temporal-similarity graph and three spatial
//! distance graphs over the same vertex set.

pub mod dtw;
pub mod fft;

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::network::Network;
use crate::{Error, Result};

pub use dtw::dtw_distance;
pub use fft::{fft_distance, fft_in_place, magnitude_spectrum, spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceKind {
    TemporalDtw,
    TemporalFft,
    Centroid,
    Origin,
    Destination,
}

impl DistanceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DistanceKind::TemporalDtw => "temporal_dtw",
            DistanceKind::TemporalFft => "temporal_fft",
            DistanceKind::Centroid => "centroid",
            DistanceKind::Origin => "origin",
            DistanceKind::Destination => "destination",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemporalMethod {
    Dtw,
    Fft,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpatialKind {
    Centroid,
    Origin,
    Destination,
}

/// Dense symmetric `n × n` distance matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    values: Vec<f64>,
    kind: DistanceKind,
}

impl DistanceMatrix {
    /// Builds from a full row-major matrix, checking symmetry, sign and the
    /// zero diagonal.
    pub fn from_values(n: usize, values: Vec<f64>, kind: DistanceKind) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::Dimension(format!(
                "{} values for a {n}×{n} matrix",
                values.len()
            )));
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(Error::InvalidArgument(format!("non-zero diagonal at {i}")));
            }
            for j in 0..n {
                let v = values[i * n + j];
                if !(v >= 0.0) || v != values[j * n + i] {
                    return Err(Error::InvalidArgument(format!(
                        "distance ({i}, {j}) must be non-negative and symmetric"
                    )));
                }
            }
        }
        Ok(Self { n, values, kind })
    }

    /// Fills the upper triangle with `f(i, j)` and mirrors it.
    fn from_pairs(n: usize, kind: DistanceKind, f: impl Fn(usize, usize) -> f64 + Sync) -> Self {
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| ((i + 1)..n).map(|j| f(i, j)).collect())
            .collect();
        Self::from_upper_rows(n, kind, rows)
    }

    /// `rows[i]` holds the distances from `i` to `i+1 .. n`.
    fn from_upper_rows(n: usize, kind: DistanceKind, rows: Vec<Vec<f64>>) -> Self {
        let mut values = vec![0.0; n * n];
        for (i, row) in rows.into_iter().enumerate() {
            for (k, v) in row.into_iter().enumerate() {
                let j = i + 1 + k;
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        Self { n, values, kind }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> DistanceKind {
        self.kind
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Upper-triangle entries `(i, j, d)` with `i < j`, in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| ((i + 1)..self.n).map(move |j| (i, j, self.get(i, j))))
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n)
            .all(|i| self.get(i, i) == 0.0 && (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

/// Euclidean distances between OD midpoints (centroid), origin stations or
/// destination stations, over the network's OD vertex set.
pub fn spatial_distance_matrix(network: &Network, kind: SpatialKind) -> DistanceMatrix {
    let st = network.stations();
    let points: Vec<(f64, f64)> = network
        .od_pairs()
        .iter()
        .map(|od| {
            let (o, d) = (&st[od.origin], &st[od.destination]);
            match kind {
                SpatialKind::Centroid => ((o.utm_x + d.utm_x) / 2.0, (o.utm_y + d.utm_y) / 2.0),
                SpatialKind::Origin => (o.utm_x, o.utm_y),
                SpatialKind::Destination => (d.utm_x, d.utm_y),
            }
        })
        .collect();
    let dk = match kind {
        SpatialKind::Centroid => DistanceKind::Centroid,
        SpatialKind::Origin => DistanceKind::Origin,
        SpatialKind::Destination => DistanceKind::Destination,
    };
    DistanceMatrix::from_pairs(points.len(), dk, |i, j| {
        let (a, b) = (points[i], points[j]);
        (a.0 - b.0).hypot(a.1 - b.1)
    })
}

/// Pairwise DTW or FFT-spectrum distances between per-OD demand series.
pub fn temporal_distance_matrix(
    series: &[Vec<f64>],
    method: TemporalMethod,
) -> Result<DistanceMatrix> {
    let len = series.first().map_or(0, Vec::len);
    if len < 2 {
        return Err(Error::InvalidArgument(
            "temporal series need at least two points".into(),
        ));
    }
    if let Some(s) = series.iter().find(|s| s.len() != len) {
        return Err(Error::LengthMismatch(len, s.len()));
    }
    let n = series.len();
    Ok(match method {
        TemporalMethod::Dtw => {
            let refs: Vec<&[f64]> = series.iter().map(Vec::as_slice).collect();
            let rows: Vec<Vec<f64>> = (0..n)
                .into_par_iter()
                .map(|i| dtw::dtw_batch(refs[i], &refs[i + 1..]))
                .collect::<Result<_>>()?;
            DistanceMatrix::from_upper_rows(n, DistanceKind::TemporalDtw, rows)
        }
        TemporalMethod::Fft => {
            let spectra: Vec<Vec<f64>> = series
                .par_iter()
                .map(|s| magnitude_spectrum(s))
                .collect::<Result<_>>()?;
            DistanceMatrix::from_pairs(n, DistanceKind::TemporalFft, |i, j| {
                fft::euclidean(&spectra[i], &spectra[j])
            })
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub distance: f64,
}

/// Undirected graph over OD vertices, stored as a sorted edge list
/// (`src < dst`) plus adjacency in compressed rows.
#[derive(Debug, Clone, PartialEq)]
pub struct OdGraph {
    n: usize,
    kind: DistanceKind,
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
}

impl OdGraph {
    pub fn new(n: usize, kind: DistanceKind, mut edges: Vec<Edge>) -> Result<Self> {
        for e in edges.iter_mut() {
            if e.src == e.dst || e.src >= n || e.dst >= n {
                return Err(Error::InvalidArgument(format!(
                    "invalid edge ({}, {})",
                    e.src, e.dst
                )));
            }
            if e.src > e.dst {
                std::mem::swap(&mut e.src, &mut e.dst);
            }
        }
        edges.sort_by_key(|e| (e.src, e.dst));
        edges.dedup_by_key(|e| (e.src, e.dst));
        let mut degree = vec![0usize; n];
        for e in &edges {
            degree[e.src] += 1;
            degree[e.dst] += 1;
        }
        let mut offsets = vec![0; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let mut fill = offsets.clone();
        let mut neighbors = vec![0; offsets[n]];
        for e in &edges {
            neighbors[fill[e.src]] = e.dst;
            fill[e.src] += 1;
            neighbors[fill[e.dst]] = e.src;
            fill[e.dst] += 1;
        }
        for i in 0..n {
            neighbors[offsets[i]..offsets[i + 1]].sort_unstable();
        }
        Ok(Self {
            n,
            kind,
            edges,
            offsets,
            neighbors,
        })
    }

    /// Builds from unweighted pairs; edge distances are recorded as 0.
    pub fn from_pairs(n: usize, kind: DistanceKind, pairs: &[(usize, usize)]) -> Result<Self> {
        Self::new(
            n,
            kind,
            pairs
                .iter()
                .map(|&(src, dst)| Edge {
                    src,
                    dst,
                    distance: 0.0,
                })
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> DistanceKind {
        self.kind
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_set(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|e| (e.src, e.dst)).collect()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.neighbors(a).binary_search(&b).is_ok()
    }

    /// SHA-256 over kind, vertex count and the edge list.
    pub fn construction_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.kind.as_str().as_bytes());
        h.update((self.n as u64).to_le_bytes());
        for e in &self.edges {
            h.update((e.src as u64).to_le_bytes());
            h.update((e.dst as u64).to_le_bytes());
            h.update(e.distance.to_bits().to_le_bytes());
        }
        hex::encode(h.finalize())
    }

    pub fn write_edges_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["src", "dst", "distance"])?;
        for e in &self.edges {
            w.write_record([e.src.to_string(), e.dst.to_string(), e.distance.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_edges_csv(path: &Path, n: usize, kind: DistanceKind) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingArtifact(path.to_path_buf()));
        }
        let edges: Vec<Edge> = csv::Reader::from_path(path)?
            .deserialize()
            .collect::<Result<_, _>>()?;
        Self::new(n, kind, edges)
    }
}

/// `A_ij = 1` iff `i ≠ j` and `D_ij ≤ sigma`.
pub fn threshold_graph(distances: &DistanceMatrix, sigma: f64) -> Result<OdGraph> {
    if !(sigma >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "threshold {sigma} must be >= 0"
        )));
    }
    let edges = distances
        .pairs()
        .filter(|(_, _, d)| *d <= sigma)
        .map(|(src, dst, distance)| Edge { src, dst, distance })
        .collect();
    OdGraph::new(distances.n(), distances.kind(), edges)
}

/// Linear-interpolation quantile (the `(n-1)·q` rule). Reorders `values`.
pub fn quantile_linear(values: &mut [f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptySeries);
    }
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "quantile {q} outside (0, 1]"
        )));
    }
    let h = (values.len() - 1) as f64 * q;
    let k = h.floor() as usize;
    let (_, lo, rest) = values.select_nth_unstable_by(k, f64::total_cmp);
    let lo = *lo;
    let frac = h - k as f64;
    if frac == 0.0 || rest.is_empty() {
        return Ok(lo);
    }
    let hi = rest.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(lo + frac * (hi - lo))
}

/// The `q`-quantile of the off-diagonal distances, so that thresholding at
/// it keeps roughly a fraction `q` of all pairs.
pub fn percentile_threshold(distances: &DistanceMatrix, q: f64) -> Result<f64> {
    if distances.n() < 2 {
        return Err(Error::InvalidArgument("need at least two vertices".into()));
    }
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "quantile {q} outside (0, 1]"
        )));
    }
    let mut vals: Vec<f64> = distances.pairs().map(|(_, _, d)| d).collect();
    quantile_linear(&mut vals, q)
}

#[derive(PartialEq)]
struct Ranked(f64, usize, usize);

impl Eq for Ranked {}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .total_cmp(&other.0)
            .then(self.1.cmp(&other.1))
            .then(self.2.cmp(&other.2))
    }
}

/// Keeps the `max_edges` closest pairs, ties broken by `(i, j)`.
pub fn cap_edges(distances: &DistanceMatrix, max_edges: usize) -> OdGraph {
    let mut heap: BinaryHeap<Ranked> = BinaryHeap::with_capacity(max_edges + 1);
    if max_edges > 0 {
        for (i, j, d) in distances.pairs() {
            let cand = Ranked(d, i, j);
            if heap.len() < max_edges {
                heap.push(cand);
            } else if heap.peek().is_some_and(|worst| cand < *worst) {
                heap.pop();
                heap.push(cand);
            }
        }
    }
    let edges = heap
        .into_iter()
        .map(|Ranked(distance, src, dst)| Edge { src, dst, distance })
        .collect();
    OdGraph::new(distances.n(), distances.kind(), edges).expect("pairs come from the matrix")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgePolicy {
    /// Threshold at the given quantile of off-diagonal distances.
    Percentile(f64),
    Threshold(f64),
    Cap(usize),
}

/// Graph construction settings for the four channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphConfig {
    pub temporal_method: TemporalMethod,
    pub temporal: EdgePolicy,
    pub centroid: EdgePolicy,
    pub origin: EdgePolicy,
    pub destination: EdgePolicy,
}

impl Default for GraphConfig {
    fn default() -> Self {
        Self {
            temporal_method: TemporalMethod::Dtw,
            temporal: EdgePolicy::Percentile(0.05),
            centroid: EdgePolicy::Percentile(0.05),
            origin: EdgePolicy::Percentile(0.05),
            destination: EdgePolicy::Percentile(0.05),
        }
    }
}

impl GraphConfig {
    /// DTW up to 1000 ODs, FFT beyond.
    pub fn for_size(n_ods: usize) -> Self {
        Self {
            temporal_method: if n_ods <= 1000 {
                TemporalMethod::Dtw
            } else {
                TemporalMethod::Fft
            },
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("temporal", self.temporal),
            ("centroid", self.centroid),
            ("origin", self.origin),
            ("destination", self.destination),
        ] {
            match p {
                EdgePolicy::Percentile(q) if !(q > 0.0 && q <= 1.0) => {
                    return Err(Error::config(
                        format!("graphs.{name}.percentile"),
                        "must lie in (0, 1]",
                    ))
                }
                EdgePolicy::Threshold(s) if !(s >= 0.0) => {
                    return Err(Error::config(
                        format!("graphs.{name}.threshold"),
                        "must be >= 0",
                    ))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// What was built for one graph; serialised next to its edge list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphMeta {
    pub kind: DistanceKind,
    pub n: usize,
    pub policy: EdgePolicy,
    /// Resolved threshold for percentile and threshold policies.
    pub threshold: Option<f64>,
    pub cap: Option<usize>,
    pub n_edges: usize,
    pub construction_hash: String,
}

pub fn apply_policy(
    distances: &DistanceMatrix,
    policy: EdgePolicy,
) -> Result<(OdGraph, GraphMeta)> {
    let (graph, threshold, cap) = match policy {
        EdgePolicy::Percentile(q) => {
            let sigma = percentile_threshold(distances, q)?;
            (threshold_graph(distances, sigma)?, Some(sigma), None)
        }
        EdgePolicy::Threshold(sigma) => (threshold_graph(distances, sigma)?, Some(sigma), None),
        EdgePolicy::Cap(k) => (cap_edges(distances, k), None, Some(k)),
    };
    let meta = GraphMeta {
        kind: graph.kind(),
        n: graph.n(),
        policy,
        threshold,
        cap,
        n_edges: graph.n_edges(),
        construction_hash: graph.construction_hash(),
    };
    Ok((graph, meta))
}

/// The four channel graphs in fixed order: temporal, centroid, origin,
/// destination.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSet {
    pub graphs: [OdGraph; 4],
}

pub const CHANNEL_NAMES: [&str; 4] = ["temporal", "centroid", "origin", "destination"];

impl GraphSet {
    pub fn new(graphs: [OdGraph; 4]) -> Result<Self> {
        let n = graphs[0].n();
        if graphs.iter().any(|g| g.n() != n) {
            return Err(Error::Dimension(
                "channel graphs disagree on vertex count".into(),
            ));
        }
        Ok(Self { graphs })
    }

    /// The same graph in all four channels.
    pub fn uniform(graph: OdGraph) -> Self {
        Self {
            graphs: [graph.clone(), graph.clone(), graph.clone(), graph],
        }
    }

    pub fn n(&self) -> usize {
        self.graphs[0].n()
    }

    pub fn temporal(&self) -> &OdGraph {
        &self.graphs[0]
    }

    pub fn write(&self, dir: &Path, metas: &[GraphMeta; 4]) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for ((g, meta), name) in self.graphs.iter().zip(metas).zip(CHANNEL_NAMES) {
            g.write_edges_csv(&dir.join(format!("{name}_edges.csv")))?;
            let mut f = std::fs::File::create(dir.join(format!("{name}_meta.json")))?;
            serde_json::to_writer_pretty(&mut f, meta)?;
            f.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read(dir: &Path) -> Result<(Self, [GraphMeta; 4])> {
        let mut graphs = Vec::with_capacity(4);
        let mut metas = Vec::with_capacity(4);
        for name in CHANNEL_NAMES {
            let meta_path = dir.join(format!("{name}_meta.json"));
            if !meta_path.exists() {
                return Err(Error::MissingArtifact(meta_path));
            }
            let meta: GraphMeta = serde_json::from_reader(std::fs::File::open(&meta_path)?)?;
            let g =
                OdGraph::read_edges_csv(&dir.join(format!("{name}_edges.csv")), meta.n, meta.kind)?;
            graphs.push(g);
            metas.push(meta);
        }
        let graphs: [OdGraph; 4] = graphs.try_into().expect("four graphs");
        let metas: [GraphMeta; 4] = metas.try_into().expect("four metas");
        Ok((Self::new(graphs)?, metas))
    }
}

/// Builds all four graphs. `series` holds each OD's training-period
/// complete-demand series. Matrices are built and released one at a time.
pub fn build_graph_set(
    network: &Network,
    series: &[Vec<f64>],
    config: &GraphConfig,
) -> Result<(GraphSet, [GraphMeta; 4])> {
    config.validate()?;
    if series.len() != network.od_pairs().len() {
        return Err(Error::Dimension(format!(
            "{} demand series for {} ODs",
            series.len(),
            network.od_pairs().len()
        )));
    }
    let temporal = {
        let d = temporal_distance_matrix(series, config.temporal_method)?;
        apply_policy(&d, config.temporal)?
    };
    let spatial = |kind, policy| -> Result<(OdGraph, GraphMeta)> {
        let d = spatial_distance_matrix(network, kind);
        apply_policy(&d, policy)
    };
    let centroid = spatial(SpatialKind::Centroid, config.centroid)?;
    let origin = spatial(SpatialKind::Origin, config.origin)?;
    let destination = spatial(SpatialKind::Destination, config.destination)?;
    let set = GraphSet::new([temporal.0, centroid.0, origin.0, destination.0])?;
    Ok((set, [temporal.1, centroid.1, origin.1, destination.1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{Line, Station};
    use proptest::prelude::*;

    fn matrix(n: usize, upper: &[f64]) -> DistanceMatrix {
        let mut v = vec![0.0; n * n];
        let mut k = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                v[i * n + j] = upper[k];
                v[j * n + i] = upper[k];
                k += 1;
            }
        }
        DistanceMatrix::from_values(n, v, DistanceKind::Centroid).unwrap()
    }

    fn four_station_network() -> Network {
        let coords = [(0.0, 0.0), (2.0, 0.0), (4.0, 0.0), (6.0, 0.0)];
        let stations = coords
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| Station {
                id: i,
                name: format!("S{i}"),
                utm_x: x,
                utm_y: y,
                lines: Default::default(),
            })
            .collect();
        let net = Network::new(
            stations,
            vec![Line {
                id: 0,
                stations: vec![0, 1, 2, 3],
            }],
        )
        .unwrap();
        let pairs = vec![
            crate::network::OdPair {
                index: 0,
                origin: 0,
                destination: 1,
            },
            crate::network::OdPair {
                index: 1,
                origin: 2,
                destination: 3,
            },
        ];
        net.with_od_pairs(pairs).unwrap()
    }

    #[test]
    fn spatial_matrices() {
        let net = four_station_network();
        for (kind, want) in [
            (SpatialKind::Centroid, 4.0),
            (SpatialKind::Origin, 4.0),
            (SpatialKind::Destination, 4.0),
        ] {
            let d = spatial_distance_matrix(&net, kind);
            assert_eq!(d.get(0, 1), want);
            assert_eq!(d.get(0, 0), 0.0);
            assert!(d.is_symmetric());
        }
    }

    #[test]
    fn temporal_matrix_matches_kernels() {
        let series = vec![
            vec![1.0, 0.0, 1.0, 0.0],
            vec![0.0, 1.0, 0.0, 1.0],
            vec![3.0, 1.0, 2.0, 2.0],
        ];
        let d = temporal_distance_matrix(&series, TemporalMethod::Dtw).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j {
                    0.0
                } else {
                    dtw_distance(&series[i], &series[j]).unwrap()
                };
                assert_eq!(d.get(i, j), want);
            }
        }
        assert_eq!(d.get(0, 1), 2.0);
        let f = temporal_distance_matrix(&series, TemporalMethod::Fft).unwrap();
        assert!(f.get(0, 1) < 1e-12);
        let same =
            temporal_distance_matrix(&vec![vec![1.0, 2.0, 3.0]; 4], TemporalMethod::Dtw).unwrap();
        assert!(same.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn temporal_rejects_short_or_ragged() {
        assert!(temporal_distance_matrix(&[vec![1.0], vec![2.0]], TemporalMethod::Dtw).is_err());
        assert!(
            temporal_distance_matrix(&[vec![1.0, 2.0], vec![2.0]], TemporalMethod::Fft).is_err()
        );
    }

    #[test]
    fn threshold_extremes() {
        let d = matrix(4, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(threshold_graph(&d, 6.0).unwrap().n_edges(), 6);
        assert_eq!(threshold_graph(&d, 0.5).unwrap().n_edges(), 0);
        assert!(threshold_graph(&d, -1.0).is_err());
    }

    #[test]
    fn quantiles() {
        let mut v = vec![4.0, 1.0, 3.0, 2.0];
        assert_eq!(quantile_linear(&mut v, 0.5).unwrap(), 2.5);
        assert_eq!(quantile_linear(&mut v, 1.0).unwrap(), 4.0);
        assert!(quantile_linear(&mut v, 0.0).is_err());
        assert!(quantile_linear(&mut v, 1.5).is_err());
        let d = matrix(4, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(percentile_threshold(&d, 1.0).unwrap(), 6.0);
    }

    #[test]
    fn cap_examples() {
        let d = matrix(3, &[1.0, 2.0, 3.0]);
        assert_eq!(cap_edges(&d, 2).edge_set(), vec![(0, 1), (0, 2)]);
        assert_eq!(cap_edges(&d, 10).n_edges(), 3);
        assert_eq!(cap_edges(&d, 0).n_edges(), 0);
    }

    #[test]
    fn cap_ties_break_lexicographically() {
        let d = matrix(4, &[1.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
        assert_eq!(cap_edges(&d, 3).edge_set(), vec![(0, 1), (0, 2), (0, 3)]);
    }

    #[test]
    fn csr_adjacency() {
        let g = OdGraph::from_pairs(4, DistanceKind::Origin, &[(2, 0), (1, 2), (0, 2)]).unwrap();
        assert_eq!(g.n_edges(), 2);
        assert_eq!(g.neighbors(2), &[0, 1]);
        assert_eq!(g.neighbors(3), &[] as &[usize]);
        assert!(g.has_edge(0, 2) && g.has_edge(2, 0) && !g.has_edge(0, 1));
        assert!(OdGraph::from_pairs(3, DistanceKind::Origin, &[(1, 1)]).is_err());
    }

    #[test]
    fn graph_set_io() {
        let net = four_station_network();
        let series = vec![vec![1.0, 2.0, 3.0], vec![2.0, 2.0, 1.0]];
        let (set, metas) = build_graph_set(&net, &series, &GraphConfig::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        set.write(dir.path(), &metas).unwrap();
        let (back, back_metas) = GraphSet::read(dir.path()).unwrap();
        assert_eq!(back, set);
        assert_eq!(back_metas, metas);
        assert!(GraphSet::read(&dir.path().join("missing")).is_err());
    }

    proptest! {
        #[test]
        fn threshold_is_monotone(upper in proptest::collection::vec(0.0f64..10.0, 10), a in 0.0f64..10.0, b in 0.0f64..10.0) {
            let d = matrix(5, &upper);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let small = threshold_graph(&d, lo).unwrap().edge_set();
            let big = threshold_graph(&d, hi).unwrap().edge_set();
            prop_assert!(small.iter().all(|e| big.contains(e)));
        }

        #[test]
        fn cap_invariant_under_relabeling(perm_seed in 0u64..1000, k in 0usize..15) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let n = 6;
            let upper: Vec<f64> = (0..15).map(|i| (i * 7 % 15) as f64 + 0.5).collect();
            let d = matrix(n, &upper);
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(perm_seed));
            let mut pv = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    pv[perm[i] * n + perm[j]] = d.get(i, j);
                }
            }
            let pd = DistanceMatrix::from_values(n, pv, DistanceKind::Centroid).unwrap();
            let mut mapped: Vec<(usize, usize)> = cap_edges(&d, k)
                .edge_set()
                .into_iter()
                .map(|(a, b)| (perm[a].min(perm[b]), perm[a].max(perm[b])))
                .collect();
            mapped.sort();
            prop_assert_eq!(mapped, cap_edges(&pd, k).edge_set());
        }

        #[test]
        fn percentile_edge_count(upper in proptest::collection::hash_set(0u32..100_000, 21), q in 0.01f64..1.0) {
            let vals: Vec<f64> = upper.into_iter().map(f64::from).collect();
            let d = matrix(7, &vals);
            let sigma = percentile_threshold(&d, q).unwrap();
            let edges = threshold_graph(&d, sigma).unwrap().n_edges() as f64;
            prop_assert!((edges - q * 21.0).abs() <= 1.0);
        }
    }
}
