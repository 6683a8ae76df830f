//! Two-layer graph convolutional network on a single dense graph.

use std::path::Path;

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::features::SampleSet;
use crate::graphs::OdGraph;
use crate::model::{Optimizer, OptimizerKind};
use crate::simulator::derive_seed;
use crate::{Error, Result};

/// Largest dense adjacency the baseline will allocate.
pub const DEFAULT_MEMORY_LIMIT: usize = 256 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GcnConfig {
    pub hidden: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub optimizer: OptimizerKind,
    pub memory_limit_bytes: usize,
    /// Set by the caller; not part of configuration files.
    #[serde(skip)]
    pub seed: u64,
}

impl Default for GcnConfig {
    fn default() -> Self {
        Self {
            hidden: 64,
            learning_rate: 1e-4,
            epochs: 10,
            batch_size: 1,
            optimizer: OptimizerKind::Sgd,
            memory_limit_bytes: DEFAULT_MEMORY_LIMIT,
            seed: 0,
        }
    }
}

/// `D̃^{-1/2} (A + I) D̃^{-1/2}` as a dense matrix.
pub fn normalized_adjacency(graph: &OdGraph, memory_limit: usize) -> Result<Array2<f64>> {
    let n = graph.n();
    let bytes = n
        .saturating_mul(n)
        .saturating_mul(std::mem::size_of::<f64>());
    if bytes > memory_limit {
        return Err(Error::GcnNotScalable {
            nodes: n,
            bytes,
            limit: memory_limit,
        });
    }
    let inv_sqrt: Vec<f64> = (0..n)
        .map(|v| 1.0 / ((graph.degree(v) + 1) as f64).sqrt())
        .collect();
    let mut a = Array2::zeros((n, n));
    for v in 0..n {
        a[[v, v]] = inv_sqrt[v] * inv_sqrt[v];
        for &u in graph.neighbors(v) {
            a[[v, u]] = inv_sqrt[v] * inv_sqrt[u];
        }
    }
    Ok(a)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GcnModel {
    pub adjacency: Array2<f64>,
    pub w1: Array2<f64>,
    pub w2: Array2<f64>,
    pub w_out: Array1<f64>,
    pub b_out: Array1<f64>,
}

#[derive(Serialize, Deserialize)]
struct StoredGcn {
    in_dim: usize,
    hidden: usize,
    w1: Vec<String>,
    w2: Vec<String>,
    w_out: Vec<String>,
    b_out: String,
}

struct Cache {
    ax: Array2<f64>,
    z1: Array2<f64>,
    q: Array2<f64>,
    h2: Array2<f64>,
    output: Array1<f64>,
}

fn glorot<R: Rng>(rng: &mut R, fan_in: usize, fan_out: usize) -> Array2<f64> {
    let a = (6.0 / (fan_in + fan_out) as f64).sqrt();
    Array2::from_shape_fn((fan_in, fan_out), |_| rng.random_range(-a..a))
}

impl GcnModel {
    pub fn new(graph: &OdGraph, in_dim: usize, config: &GcnConfig) -> Result<Self> {
        let adjacency = normalized_adjacency(graph, config.memory_limit_bytes)?;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, &[10]));
        let h = config.hidden;
        Ok(Self {
            adjacency,
            w1: glorot(&mut rng, in_dim, h),
            w2: glorot(&mut rng, h, h),
            w_out: glorot(&mut rng, h, 1).remove_axis(Axis(1)),
            b_out: Array1::zeros(1),
        })
    }

    fn check(&self, x: ArrayView2<f64>) -> Result<()> {
        if x.nrows() != self.adjacency.nrows() || x.ncols() != self.w1.nrows() {
            return Err(Error::Dimension(format!(
                "GCN expects {}×{} features, got {}×{}",
                self.adjacency.nrows(),
                self.w1.nrows(),
                x.nrows(),
                x.ncols()
            )));
        }
        Ok(())
    }

    fn forward(&self, x: ArrayView2<f64>) -> Cache {
        let ax = self.adjacency.dot(&x);
        let z1 = ax.dot(&self.w1);
        let h1 = z1.mapv(|v| v.max(0.0));
        let q = self.adjacency.dot(&h1);
        let h2 = q.dot(&self.w2);
        let output = h2.dot(&self.w_out) + self.b_out[0];
        Cache {
            ax,
            z1,
            q,
            h2,
            output,
        }
    }

    pub fn predict(&self, x: ArrayView2<f64>) -> Result<Array1<f64>> {
        self.check(x)?;
        Ok(self.forward(x).output)
    }

    /// MSE loss and gradients in the order `w1, w2, w_out, b_out`.
    pub fn loss_and_gradients(
        &self,
        x: ArrayView2<f64>,
        y: &Array1<f64>,
    ) -> Result<(f64, [Vec<f64>; 4])> {
        self.check(x)?;
        if y.len() != x.nrows() {
            return Err(Error::LengthMismatch(x.nrows(), y.len()));
        }
        let c = self.forward(x);
        let n = y.len() as f64;
        let resid = &c.output - y;
        let loss = resid.mapv(|r| r * r).sum() / n;
        let dy = resid * (2.0 / n);
        let d_wout = c.h2.t().dot(&dy);
        let d_bout = dy.sum();
        let d_h2 = dy
            .view()
            .insert_axis(Axis(1))
            .dot(&self.w_out.view().insert_axis(Axis(0)));
        let d_w2 = c.q.t().dot(&d_h2);
        let d_q = d_h2.dot(&self.w2.t());
        let mut d_z1 = self.adjacency.t().dot(&d_q);
        d_z1.zip_mut_with(&c.z1, |d, z| {
            if *z <= 0.0 {
                *d = 0.0
            }
        });
        let d_w1 = c.ax.t().dot(&d_z1);
        Ok((
            loss,
            [
                d_w1.iter().copied().collect(),
                d_w2.iter().copied().collect(),
                d_wout.to_vec(),
                vec![d_bout],
            ],
        ))
    }

    /// Stores the weights; the adjacency is rebuilt from the graph on load.
    pub fn save(&self, path: &Path) -> Result<()> {
        let enc = |v: &mut dyn Iterator<Item = &f64>| v.map(|x| x.to_string()).collect::<Vec<_>>();
        let stored = StoredGcn {
            in_dim: self.w1.nrows(),
            hidden: self.w1.ncols(),
            w1: enc(&mut self.w1.iter()),
            w2: enc(&mut self.w2.iter()),
            w_out: enc(&mut self.w_out.iter()),
            b_out: self.b_out[0].to_string(),
        };
        serde_json::to_writer(std::fs::File::create(path)?, &stored)?;
        Ok(())
    }

    pub fn load(path: &Path, graph: &OdGraph, memory_limit: usize) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingArtifact(path.to_path_buf()));
        }
        let s: StoredGcn =
            serde_json::from_reader(std::io::BufReader::new(std::fs::File::open(path)?))?;
        let dec = |v: &[String]| -> Result<Vec<f64>> {
            v.iter()
                .map(|x| x.parse().map_err(|e| Error::parse("gcn checkpoint", e)))
                .collect()
        };
        let shape = |r: usize, c: usize, v: Vec<f64>| {
            Array2::from_shape_vec((r, c), v).map_err(|e| Error::parse("gcn checkpoint", e))
        };
        Ok(Self {
            adjacency: normalized_adjacency(graph, memory_limit)?,
            w1: shape(s.in_dim, s.hidden, dec(&s.w1)?)?,
            w2: shape(s.hidden, s.hidden, dec(&s.w2)?)?,
            w_out: Array1::from(dec(&s.w_out)?),
            b_out: Array1::from(vec![s
                .b_out
                .parse()
                .map_err(|e| Error::parse("gcn checkpoint", e))?]),
        })
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        vec![
            self.w1.as_slice_mut().unwrap(),
            self.w2.as_slice_mut().unwrap(),
            self.w_out.as_slice_mut().unwrap(),
            self.b_out.as_slice_mut().unwrap(),
        ]
    }
}

/// Trains on one graph; returns the model and the mean loss per epoch.
pub fn gcn_train(
    samples: &[&SampleSet],
    graph: &OdGraph,
    config: &GcnConfig,
) -> Result<(GcnModel, Vec<f64>)> {
    let first = samples
        .first()
        .ok_or_else(|| Error::InvalidArgument("no training samples".into()))?;
    if config.hidden == 0 || config.batch_size == 0 || !(config.learning_rate > 0.0) {
        return Err(Error::config(
            "gcn",
            "hidden, batch_size and learning_rate must be positive",
        ));
    }
    let mut model = GcnModel::new(graph, first.features.ncols(), config)?;
    let count: usize = samples.iter().map(|s| s.targets.len()).sum();
    model.b_out[0] = samples.iter().map(|s| s.targets.sum()).sum::<f64>() / count as f64;
    let shapes = [model.w1.len(), model.w2.len(), model.w_out.len(), 1];
    let mut opt = Optimizer::new(config.optimizer, config.learning_rate, &shapes);
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut history = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(derive_seed(
            config.seed,
            &[11, epoch as u64],
        )));
        let mut total = 0.0;
        for batch in order.chunks(config.batch_size) {
            let mut grad: [Vec<f64>; 4] = shapes.map(|n| vec![0.0; n]);
            for &i in batch {
                let (loss, g) =
                    model.loss_and_gradients(samples[i].features.view(), &samples[i].targets)?;
                total += loss;
                for (acc, gi) in grad.iter_mut().zip(g) {
                    for (a, v) in acc.iter_mut().zip(gi) {
                        *a += v / batch.len() as f64;
                    }
                }
            }
            opt.update(
                model.tensors_mut(),
                grad.iter().map(|g| g.as_slice()).collect(),
            );
            if !model
                .w1
                .iter()
                .chain(model.w2.iter())
                .all(|v| v.is_finite())
            {
                return Err(Error::Diverged(format!(
                    "GCN parameters non-finite in epoch {epoch}"
                )));
            }
        }
        history.push(total / samples.len() as f64);
    }
    Ok((model, history))
}
