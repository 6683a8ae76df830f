//! Mean-with-self neighbourhood aggregation and the GraphSAGE layer.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng;

use crate::graphs::OdGraph;
use crate::{Error, Result};

/// Per-node neighbour lists in compressed rows, each sorted by id so that
/// summation order does not depend on how the list was produced. Sampled
/// lists may repeat a neighbour.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Neighborhood {
    offsets: Vec<usize>,
    indices: Vec<usize>,
}

impl Neighborhood {
    pub fn from_lists(lists: &[Vec<usize>]) -> Self {
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        offsets.push(0);
        let mut indices = Vec::new();
        for l in lists {
            let start = indices.len();
            indices.extend_from_slice(l);
            indices[start..].sort_unstable();
            offsets.push(indices.len());
        }
        Self { offsets, indices }
    }

    /// Every neighbour exactly once.
    pub fn full(graph: &OdGraph) -> Self {
        let mut offsets = Vec::with_capacity(graph.n() + 1);
        offsets.push(0);
        let mut indices = Vec::new();
        for v in 0..graph.n() {
            indices.extend_from_slice(graph.neighbors(v));
            offsets.push(indices.len());
        }
        Self { offsets, indices }
    }

    /// `k` uniform draws with replacement per node.
    pub fn sample<R: Rng + ?Sized>(graph: &OdGraph, k: usize, rng: &mut R) -> Self {
        let n = graph.n();
        let mut indices = Vec::with_capacity(n * k);
        for v in 0..n {
            let mut drawn = sample_neighbors(graph, v, k, rng);
            drawn.sort_unstable();
            indices.extend(drawn);
        }
        let offsets = (0..=n).map(|v| v * k).collect();
        Self { offsets, indices }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn of(&self, v: usize) -> &[usize] {
        &self.indices[self.offsets[v]..self.offsets[v + 1]]
    }
}

/// `k` neighbours of `v` drawn uniformly with replacement. An isolated node
/// stands in for itself.
pub fn sample_neighbors<R: Rng + ?Sized>(
    graph: &OdGraph,
    v: usize,
    k: usize,
    rng: &mut R,
) -> Vec<usize> {
    let nb = graph.neighbors(v);
    if nb.is_empty() {
        return vec![v; k];
    }
    (0..k).map(|_| nb[rng.random_range(0..nb.len())]).collect()
}

/// `m_v = (h_v + Σ_{u ∈ S(v)} h_u) / (1 + |S(v)|)`.
pub fn aggregate(h: ArrayView2<f64>, nb: &Neighborhood) -> Array2<f64> {
    let (n, f) = h.dim();
    assert_eq!(n, nb.n(), "neighbourhood size");
    let mut out = h.to_owned();
    for v in 0..n {
        let list = nb.of(v);
        if list.is_empty() {
            continue;
        }
        let mut row = out.row_mut(v);
        for &u in list {
            row += &h.row(u);
        }
        row /= (1 + list.len()) as f64;
    }
    debug_assert_eq!(out.ncols(), f);
    out
}

/// Adjoint of [`aggregate`]: maps a gradient on `m` to the gradient on `h`.
pub fn aggregate_transpose(grad: ArrayView2<f64>, nb: &Neighborhood) -> Array2<f64> {
    let n = grad.nrows();
    let mut out = Array2::zeros(grad.dim());
    for v in 0..n {
        let list = nb.of(v);
        let w = 1.0 / (1 + list.len()) as f64;
        let g = grad.row(v);
        out.row_mut(v).scaled_add(w, &g);
        for &u in list {
            out.row_mut(u).scaled_add(w, &g);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Identity,
}

impl Activation {
    pub fn apply(self, z: &Array2<f64>) -> Array2<f64> {
        match self {
            Activation::Relu => z.mapv(|v| v.max(0.0)),
            Activation::Identity => z.clone(),
        }
    }
}

/// `act(W · m_v + b)` with `W` stored input-major (`in × out`).
#[derive(Debug, Clone, PartialEq)]
pub struct SageLayer {
    pub weight: Array2<f64>,
    pub bias: Array1<f64>,
    pub activation: Activation,
}

impl SageLayer {
    pub fn new(weight: Array2<f64>, bias: Array1<f64>, activation: Activation) -> Result<Self> {
        if weight.ncols() != bias.len() {
            return Err(Error::Dimension(format!(
                "weight has {} outputs, bias {}",
                weight.ncols(),
                bias.len()
            )));
        }
        Ok(Self {
            weight,
            bias,
            activation,
        })
    }

    /// Returns the aggregated input, pre-activation and output.
    pub fn forward_parts(
        &self,
        h: ArrayView2<f64>,
        nb: &Neighborhood,
    ) -> (Array2<f64>, Array2<f64>, Array2<f64>) {
        let m = aggregate(h, nb);
        let mut z = m.dot(&self.weight);
        z += &self.bias.view().insert_axis(Axis(0));
        let out = self.activation.apply(&z);
        (m, z, out)
    }

    pub fn forward(&self, h: ArrayView2<f64>, nb: &Neighborhood) -> Array2<f64> {
        self.forward_parts(h, nb).2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::DistanceKind;
    use ndarray::array;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn path3() -> OdGraph {
        OdGraph::from_pairs(3, DistanceKind::Centroid, &[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn full_mean_includes_self() {
        let h = array![[1.0, 0.0], [2.0, 0.0], [6.0, 3.0]];
        let m = aggregate(h.view(), &Neighborhood::full(&path3()));
        assert_eq!(m, array![[1.5, 0.0], [3.0, 1.0], [4.0, 1.5]]);
    }

    #[test]
    fn sampling_with_replacement_and_isolated_nodes() {
        let g = OdGraph::from_pairs(3, DistanceKind::Centroid, &[(0, 1)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(sample_neighbors(&g, 0, 4, &mut rng), vec![1; 4]);
        assert_eq!(sample_neighbors(&g, 2, 3, &mut rng), vec![2; 3]);
        let nb = Neighborhood::sample(&path3(), 10, &mut rng);
        assert!(nb.of(1).iter().all(|u| *u == 0 || *u == 2));
        assert_eq!(nb.of(1).len(), 10);
    }

    #[test]
    fn isolated_node_keeps_its_state() {
        let g = OdGraph::from_pairs(2, DistanceKind::Centroid, &[]).unwrap();
        let h = array![[1.0, 2.0], [3.0, 4.0]];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let m = aggregate(h.view(), &Neighborhood::sample(&g, 5, &mut rng));
        assert_eq!(m, h);
    }

    #[test]
    fn transpose_is_adjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let nb = Neighborhood::sample(&path3(), 4, &mut rng);
        let h = Array2::from_shape_fn((3, 2), |(i, j)| (i * 2 + j) as f64 + 0.5);
        let g = Array2::from_shape_fn((3, 2), |(i, j)| (i as f64 - j as f64) * 0.3);
        let lhs = (&aggregate(h.view(), &nb) * &g).sum();
        let rhs = (&h * &aggregate_transpose(g.view(), &nb)).sum();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn layer_dimension_check() {
        assert!(SageLayer::new(Array2::zeros((2, 3)), Array1::zeros(2), Activation::Relu).is_err());
    }
}
