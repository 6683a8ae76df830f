//! Multi-graph GraphSAGE: one two-layer SAGE encoder per channel graph,
//! concatenated and read out by a linear head.

use std::collections::BTreeMap;
use std::path::Path;

use ndarray::{s, Array1, Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::layer::{aggregate, aggregate_transpose, Activation, Neighborhood, SageLayer};
use super::optim::{Optimizer, OptimizerKind};
use crate::features::SampleSet;
use crate::graphs::GraphSet;
use crate::simulator::derive_seed;
use crate::{Error, Result};

pub const CHANNELS: usize = 4;

/// How neighbourhoods are formed at each layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// Fixed-size samples with replacement, sizes for layers 1 and 2.
    Sampled([usize; 2]),
    Full,
}

impl Aggregation {
    fn neighborhood(
        &self,
        graphs: &GraphSet,
        channel: usize,
        layer: usize,
        rng: &mut ChaCha8Rng,
    ) -> Neighborhood {
        match self {
            Aggregation::Sampled(k) => Neighborhood::sample(&graphs.graphs[channel], k[layer], rng),
            Aggregation::Full => Neighborhood::full(&graphs.graphs[channel]),
        }
    }
}

/// All trainable tensors. Also used to hold gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct SageParams {
    pub w1: Vec<Array2<f64>>,
    pub b1: Vec<Array1<f64>>,
    pub w2: Vec<Array2<f64>>,
    pub b2: Vec<Array1<f64>>,
    pub w_out: Array1<f64>,
    pub b_out: Array1<f64>,
}

fn glorot<R: Rng>(rng: &mut R, fan_in: usize, fan_out: usize) -> Array2<f64> {
    let a = (6.0 / (fan_in + fan_out) as f64).sqrt();
    Array2::from_shape_fn((fan_in, fan_out), |_| rng.random_range(-a..a))
}

impl SageParams {
    pub fn init(in_dim: usize, hidden: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut w1 = Vec::new();
        let mut w2 = Vec::new();
        for _ in 0..CHANNELS {
            w1.push(glorot(&mut rng, in_dim, hidden));
            w2.push(glorot(&mut rng, hidden, hidden));
        }
        let w_out = glorot(&mut rng, CHANNELS * hidden, 1).remove_axis(Axis(1));
        Self {
            w1,
            b1: vec![Array1::zeros(hidden); CHANNELS],
            w2,
            b2: vec![Array1::zeros(hidden); CHANNELS],
            w_out,
            b_out: Array1::zeros(1),
        }
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            w1: self.w1.iter().map(|a| Array2::zeros(a.dim())).collect(),
            b1: self.b1.iter().map(|a| Array1::zeros(a.len())).collect(),
            w2: self.w2.iter().map(|a| Array2::zeros(a.dim())).collect(),
            b2: self.b2.iter().map(|a| Array1::zeros(a.len())).collect(),
            w_out: Array1::zeros(self.w_out.len()),
            b_out: Array1::zeros(1),
        }
    }

    pub fn in_dim(&self) -> usize {
        self.w1[0].nrows()
    }

    pub fn hidden(&self) -> usize {
        self.w1[0].ncols()
    }

    /// Tensors in a fixed order with their checkpoint names.
    pub fn named(&self) -> Vec<(String, Vec<usize>, &[f64])> {
        let mut out = Vec::new();
        for c in 0..CHANNELS {
            out.push((
                format!("w1.{c}"),
                self.w1[c].shape().to_vec(),
                self.w1[c].as_slice().unwrap(),
            ));
            out.push((
                format!("b1.{c}"),
                vec![self.b1[c].len()],
                self.b1[c].as_slice().unwrap(),
            ));
            out.push((
                format!("w2.{c}"),
                self.w2[c].shape().to_vec(),
                self.w2[c].as_slice().unwrap(),
            ));
            out.push((
                format!("b2.{c}"),
                vec![self.b2[c].len()],
                self.b2[c].as_slice().unwrap(),
            ));
        }
        out.push((
            "w_out".into(),
            vec![self.w_out.len()],
            self.w_out.as_slice().unwrap(),
        ));
        out.push(("b_out".into(), vec![1], self.b_out.as_slice().unwrap()));
        out
    }

    pub fn tensors(&self) -> Vec<&[f64]> {
        self.named().into_iter().map(|(_, _, t)| t).collect()
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out: Vec<&mut [f64]> = Vec::new();
        let Self {
            w1,
            b1,
            w2,
            b2,
            w_out,
            b_out,
        } = self;
        for (((a, b), c), d) in w1
            .iter_mut()
            .zip(b1.iter_mut())
            .zip(w2.iter_mut())
            .zip(b2.iter_mut())
        {
            out.push(a.as_slice_mut().unwrap());
            out.push(b.as_slice_mut().unwrap());
            out.push(c.as_slice_mut().unwrap());
            out.push(d.as_slice_mut().unwrap());
        }
        out.push(w_out.as_slice_mut().unwrap());
        out.push(b_out.as_slice_mut().unwrap());
        out
    }

    pub fn n_params(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn add_scaled(&mut self, other: &SageParams, alpha: f64) {
        for (a, b) in self.tensors_mut().into_iter().zip(other.tensors()) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += alpha * y;
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.tensors()
            .iter()
            .all(|t| t.iter().all(|v| v.is_finite()))
    }
}

struct ChannelCache {
    nb2: Neighborhood,
    m1: Array2<f64>,
    z1: Array2<f64>,
    m2: Array2<f64>,
}

/// Intermediate values kept for the backward pass.
pub struct ForwardCache {
    channels: Vec<ChannelCache>,
    concat: Array2<f64>,
    hidden: Array2<f64>,
    pub output: Array1<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MGraphSage {
    pub params: SageParams,
}

impl MGraphSage {
    pub fn new(in_dim: usize, hidden: usize, seed: u64) -> Self {
        Self {
            params: SageParams::init(in_dim, hidden, seed),
        }
    }

    pub fn in_dim(&self) -> usize {
        self.params.in_dim()
    }

    pub fn hidden(&self) -> usize {
        self.params.hidden()
    }

    /// The two layers of channel `c`.
    pub fn channel_layers(&self, c: usize) -> (SageLayer, SageLayer) {
        let p = &self.params;
        (
            SageLayer {
                weight: p.w1[c].clone(),
                bias: p.b1[c].clone(),
                activation: Activation::Relu,
            },
            SageLayer {
                weight: p.w2[c].clone(),
                bias: p.b2[c].clone(),
                activation: Activation::Identity,
            },
        )
    }

    fn check_input(&self, x: ArrayView2<f64>, graphs: &GraphSet) -> Result<()> {
        if x.ncols() != self.in_dim() {
            return Err(Error::Dimension(format!(
                "model expects {} features, got {}",
                self.in_dim(),
                x.ncols()
            )));
        }
        if x.nrows() != graphs.n() {
            return Err(Error::Dimension(format!(
                "{} feature rows for {} graph vertices",
                x.nrows(),
                graphs.n()
            )));
        }
        Ok(())
    }

    /// Forward pass with explicit neighbourhoods per channel and layer.
    pub fn forward_with(&self, x: ArrayView2<f64>, nbs: Vec<[Neighborhood; 2]>) -> ForwardCache {
        let p = &self.params;
        let h = self.hidden();
        let n = x.nrows();
        let mut concat = Array2::zeros((n, CHANNELS * h));
        let mut channels = Vec::with_capacity(CHANNELS);
        for (c, [nb1, nb2]) in nbs.into_iter().enumerate() {
            let m1 = aggregate(x, &nb1);
            let mut z1 = m1.dot(&p.w1[c]);
            z1 += &p.b1[c].view().insert_axis(Axis(0));
            let h1 = z1.mapv(|v| v.max(0.0));
            let m2 = aggregate(h1.view(), &nb2);
            let mut z2 = m2.dot(&p.w2[c]);
            z2 += &p.b2[c].view().insert_axis(Axis(0));
            concat.slice_mut(s![.., c * h..(c + 1) * h]).assign(&z2);
            channels.push(ChannelCache { nb2, m1, z1, m2 });
        }
        let hidden = concat.mapv(|v| v.max(0.0));
        let output = hidden.dot(&p.w_out) + p.b_out[0];
        ForwardCache {
            channels,
            concat,
            hidden,
            output,
        }
    }

    pub fn forward(
        &self,
        x: ArrayView2<f64>,
        graphs: &GraphSet,
        agg: Aggregation,
        seed: u64,
    ) -> Result<ForwardCache> {
        self.check_input(x, graphs)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nbs = (0..CHANNELS)
            .map(|c| {
                [
                    agg.neighborhood(graphs, c, 0, &mut rng),
                    agg.neighborhood(graphs, c, 1, &mut rng),
                ]
            })
            .collect();
        Ok(self.forward_with(x, nbs))
    }

    pub fn predict(
        &self,
        x: ArrayView2<f64>,
        graphs: &GraphSet,
        agg: Aggregation,
        seed: u64,
    ) -> Result<Array1<f64>> {
        Ok(self.forward(x, graphs, agg, seed)?.output)
    }

    /// Gradients of the loss given `dL/dŷ`.
    pub fn backward(&self, cache: &ForwardCache, d_out: &Array1<f64>) -> SageParams {
        let p = &self.params;
        let h = self.hidden();
        let mut g = p.zeros_like();
        g.w_out = cache.hidden.t().dot(d_out);
        g.b_out[0] = d_out.sum();
        let mut d_concat = d_out
            .view()
            .insert_axis(Axis(1))
            .dot(&p.w_out.view().insert_axis(Axis(0)));
        d_concat.zip_mut_with(&cache.concat, |d, z| {
            if *z <= 0.0 {
                *d = 0.0
            }
        });
        for (c, cc) in cache.channels.iter().enumerate() {
            let dz2 = d_concat.slice(s![.., c * h..(c + 1) * h]);
            g.w2[c].assign(&cc.m2.t().dot(&dz2));
            g.b2[c] = dz2.sum_axis(Axis(0));
            let dm2 = dz2.dot(&p.w2[c].t());
            let mut dz1 = aggregate_transpose(dm2.view(), &cc.nb2);
            dz1.zip_mut_with(&cc.z1, |d, z| {
                if *z <= 0.0 {
                    *d = 0.0
                }
            });
            g.w1[c].assign(&cc.m1.t().dot(&dz1));
            g.b1[c] = dz1.sum_axis(Axis(0));
        }
        g
    }

    /// Mean squared error over all vertices and its gradient.
    pub fn loss_and_gradients(
        &self,
        x: ArrayView2<f64>,
        targets: &Array1<f64>,
        graphs: &GraphSet,
        agg: Aggregation,
        seed: u64,
    ) -> Result<(f64, SageParams)> {
        if targets.len() != x.nrows() {
            return Err(Error::LengthMismatch(x.nrows(), targets.len()));
        }
        let cache = self.forward(x, graphs, agg, seed)?;
        let n = targets.len() as f64;
        let resid = &cache.output - targets;
        let loss = resid.mapv(|r| r * r).sum() / n;
        let d_out = resid * (2.0 / n);
        Ok((loss, self.backward(&cache, &d_out)))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let tensors = self
            .params
            .named()
            .into_iter()
            .map(|(name, shape, data)| {
                (
                    name,
                    StoredTensor {
                        shape,
                        data: data.iter().map(|v| v.to_string()).collect(),
                    },
                )
            })
            .collect();
        let ck = Checkpoint {
            format: CHECKPOINT_FORMAT.into(),
            in_dim: self.in_dim(),
            hidden: self.hidden(),
            tensors,
        };
        let f = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(f, &ck)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingArtifact(path.to_path_buf()));
        }
        let ck: Checkpoint = serde_json::from_reader(std::fs::File::open(path)?)?;
        if ck.format != CHECKPOINT_FORMAT {
            return Err(Error::parse(
                "checkpoint",
                format!("unknown format `{}`", ck.format),
            ));
        }
        let mut model = Self::new(ck.in_dim, ck.hidden, 0);
        let names: Vec<(String, Vec<usize>)> = model
            .params
            .named()
            .into_iter()
            .map(|(n, s, _)| (n, s))
            .collect();
        for ((name, shape), dst) in names.into_iter().zip(model.params.tensors_mut()) {
            let t = ck
                .tensors
                .get(&name)
                .ok_or_else(|| Error::parse("checkpoint", format!("missing tensor {name}")))?;
            if t.shape != shape || t.data.len() != dst.len() {
                return Err(Error::parse(
                    "checkpoint",
                    format!("tensor {name} has the wrong shape"),
                ));
            }
            for (d, v) in dst.iter_mut().zip(&t.data) {
                *d = v
                    .parse()
                    .map_err(|e| Error::parse("checkpoint", format!("{name}: {e}")))?;
            }
        }
        Ok(model)
    }
}

const CHECKPOINT_FORMAT: &str = "odsage-mgraphsage-v1";

#[derive(Serialize, Deserialize)]
struct StoredTensor {
    shape: Vec<usize>,
    data: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    format: String,
    in_dim: usize,
    hidden: usize,
    tensors: BTreeMap<String, StoredTensor>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub hidden: usize,
    pub sample_sizes: [usize; 2],
    pub learning_rate: f64,
    pub epochs: usize,
    /// Prediction boundaries per gradient step.
    pub batch_size: usize,
    pub optimizer: OptimizerKind,
    /// Set by the caller; not part of configuration files.
    #[serde(skip)]
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            hidden: 64,
            sample_sizes: [10, 10],
            learning_rate: 1e-3,
            epochs: 10,
            batch_size: 1,
            optimizer: OptimizerKind::Sgd,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden == 0 {
            return Err(Error::config("train.hidden", "must be positive"));
        }
        if self.sample_sizes.contains(&0) {
            return Err(Error::config("train.sample_sizes", "must be positive"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::config("train.learning_rate", "must be positive"));
        }
        if self.batch_size == 0 {
            return Err(Error::config("train.batch_size", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Mean training loss per epoch.
    pub epoch_losses: Vec<f64>,
}

/// Builds a model sized for `samples` with the head bias at the mean target.
pub fn init_model(samples: &[&SampleSet], config: &TrainConfig) -> Result<MGraphSage> {
    let first = samples
        .first()
        .ok_or_else(|| Error::InvalidArgument("no training samples".into()))?;
    let mut model = MGraphSage::new(
        first.features.ncols(),
        config.hidden,
        derive_seed(config.seed, &[0]),
    );
    let count: usize = samples.iter().map(|s| s.targets.len()).sum();
    let total: f64 = samples.iter().map(|s| s.targets.sum()).sum();
    model.params.b_out[0] = total / count.max(1) as f64;
    Ok(model)
}

/// Mini-batch training. Per-sample gradients are summed in sample order, so
/// results do not depend on the thread count.
pub fn train(
    model: &mut MGraphSage,
    samples: &[&SampleSet],
    graphs: &GraphSet,
    config: &TrainConfig,
) -> Result<TrainReport> {
    config.validate()?;
    let agg = Aggregation::Sampled(config.sample_sizes);
    let shapes: Vec<usize> = model.params.tensors().iter().map(|t| t.len()).collect();
    let mut opt = Optimizer::new(config.optimizer, config.learning_rate, &shapes);
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut losses = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(derive_seed(
            config.seed,
            &[1, epoch as u64],
        )));
        let mut epoch_loss = 0.0;
        for batch in order.chunks(config.batch_size) {
            let results: Vec<(f64, SageParams)> = batch
                .par_iter()
                .map(|&i| {
                    let s = samples[i];
                    let seed = derive_seed(config.seed, &[2, epoch as u64, i as u64]);
                    model.loss_and_gradients(s.features.view(), &s.targets, graphs, agg, seed)
                })
                .collect::<Result<_>>()?;
            let mut grad = model.params.zeros_like();
            let scale = 1.0 / batch.len() as f64;
            for (loss, g) in &results {
                epoch_loss += loss;
                grad.add_scaled(g, scale);
            }
            opt.update(model.params.tensors_mut(), grad.tensors());
            if !model.params.is_finite() {
                return Err(Error::Diverged(format!(
                    "non-finite parameters in epoch {epoch}"
                )));
            }
        }
        let mean = epoch_loss / samples.len().max(1) as f64;
        log::info!("epoch {epoch}: loss {mean:.5}");
        losses.push(mean);
    }
    Ok(TrainReport {
        epoch_losses: losses,
    })
}

/// Predictions for each sample; sampling seeds derive from `seed` and the
/// sample position.
pub fn predict_samples(
    model: &MGraphSage,
    samples: &[&SampleSet],
    graphs: &GraphSet,
    agg: Aggregation,
    seed: u64,
) -> Result<Vec<Array1<f64>>> {
    samples
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            model.predict(
                s.features.view(),
                graphs,
                agg,
                derive_seed(seed, &[3, i as u64]),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{DistanceKind, OdGraph};
    use crate::time::IntervalIndex;
    use chrono::NaiveDate;

    fn ring(n: usize) -> OdGraph {
        let pairs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        OdGraph::from_pairs(n, DistanceKind::Centroid, &pairs).unwrap()
    }

    fn graphs(n: usize) -> GraphSet {
        let chords: Vec<_> = (0..n).map(|i| (i, (i + 2) % n)).collect();
        GraphSet::new([
            ring(n),
            OdGraph::from_pairs(n, DistanceKind::Centroid, &chords).unwrap(),
            OdGraph::from_pairs(n, DistanceKind::Origin, &[(0, 1)]).unwrap(),
            OdGraph::from_pairs(n, DistanceKind::Destination, &[]).unwrap(),
        ])
        .unwrap()
    }

    fn inputs(n: usize, f: usize, seed: u64) -> (Array2<f64>, Array1<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Array2::from_shape_fn((n, f), |_| rng.random_range(-1.0..1.0));
        let y = Array1::from_shape_fn(n, |_| rng.random_range(0.0..3.0));
        (x, y)
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let (n, f) = (6, 3);
        let gs = graphs(n);
        let (x, y) = inputs(n, f, 1);
        let model = MGraphSage::new(f, 4, 5);
        let agg = Aggregation::Sampled([3, 2]);
        let (_, grad) = model
            .loss_and_gradients(x.view(), &y, &gs, agg, 11)
            .unwrap();
        let eps = 1e-6;
        let analytic: Vec<f64> = grad.tensors().concat();
        let mut numeric = Vec::new();
        let n_tensors = model.params.tensors().len();
        for t in 0..n_tensors {
            for i in 0..model.params.tensors()[t].len() {
                let mut plus = model.clone();
                plus.params.tensors_mut()[t][i] += eps;
                let mut minus = model.clone();
                minus.params.tensors_mut()[t][i] -= eps;
                let lp = plus
                    .loss_and_gradients(x.view(), &y, &gs, agg, 11)
                    .unwrap()
                    .0;
                let lm = minus
                    .loss_and_gradients(x.view(), &y, &gs, agg, 11)
                    .unwrap()
                    .0;
                numeric.push((lp - lm) / (2.0 * eps));
            }
        }
        let diff: f64 = analytic
            .iter()
            .zip(&numeric)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        let norm: f64 = analytic.iter().map(|a| a * a).sum::<f64>().sqrt();
        assert!(diff / norm < 1e-5, "relative error {}", diff / norm);
    }

    #[test]
    fn forward_rejects_bad_shapes() {
        let gs = graphs(5);
        let model = MGraphSage::new(3, 4, 0);
        assert!(model
            .predict(Array2::zeros((5, 2)).view(), &gs, Aggregation::Full, 0)
            .is_err());
        assert!(model
            .predict(Array2::zeros((4, 3)).view(), &gs, Aggregation::Full, 0)
            .is_err());
    }

    #[test]
    fn checkpoint_round_trip_is_exact() {
        let model = MGraphSage::new(5, 3, 42);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        model.save(&path).unwrap();
        assert_eq!(MGraphSage::load(&path).unwrap(), model);
        assert!(MGraphSage::load(&dir.path().join("nope.json")).is_err());
    }

    fn sample(x: Array2<f64>, y: Array1<f64>) -> SampleSet {
        let iv = IntervalIndex::new(NaiveDate::from_ymd_opt(2021, 2, 1).unwrap(), 9).unwrap();
        SampleSet {
            features: x,
            targets: y,
            interval: iv,
            prediction_time: iv.start(),
        }
    }

    #[test]
    fn training_is_deterministic_and_reduces_loss() {
        let gs = graphs(8);
        let set: Vec<SampleSet> = (0..6)
            .map(|k| {
                let (x, _) = inputs(8, 4, k);
                let y = x.column(0).mapv(|v| 2.0 + v);
                sample(x, y)
            })
            .collect();
        let refs: Vec<&SampleSet> = set.iter().collect();
        let cfg = TrainConfig {
            hidden: 8,
            sample_sizes: [3, 3],
            learning_rate: 0.01,
            epochs: 30,
            batch_size: 2,
            optimizer: OptimizerKind::Sgd,
            seed: 9,
        };
        let mut a = init_model(&refs, &cfg).unwrap();
        let mut b = a.clone();
        let ra = train(&mut a, &refs, &gs, &cfg).unwrap();
        let rb = train(&mut b, &refs, &gs, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(ra, rb);
        assert!(ra.epoch_losses.last().unwrap() < &ra.epoch_losses[0]);
    }

    #[test]
    fn zero_epochs_leave_parameters() {
        let gs = graphs(4);
        let (x, y) = inputs(4, 2, 0);
        let s = sample(x, y);
        let cfg = TrainConfig {
            epochs: 0,
            hidden: 3,
            ..Default::default()
        };
        let mut m = init_model(&[&s], &cfg).unwrap();
        let before = m.clone();
        let r = train(&mut m, &[&s], &gs, &cfg).unwrap();
        assert!(r.epoch_losses.is_empty());
        assert_eq!(m, before);
    }

    #[test]
    fn head_bias_starts_at_mean_target() {
        let s = sample(Array2::zeros((3, 2)), Array1::from(vec![1.0, 2.0, 6.0]));
        let m = init_model(&[&s], &TrainConfig::default()).unwrap();
        assert_eq!(m.params.b_out[0], 3.0);
    }
}
