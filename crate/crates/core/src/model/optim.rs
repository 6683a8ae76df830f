use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    Sgd,
    Adam,
}

/// First-order update rule over a list of flat parameter tensors.
#[derive(Debug, Clone)]
pub enum Optimizer {
    Sgd { lr: f64 },
    Adam(Adam),
}

#[derive(Debug, Clone)]
pub struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    step: i32,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl Optimizer {
    pub fn new(kind: OptimizerKind, lr: f64, shapes: &[usize]) -> Self {
        match kind {
            OptimizerKind::Sgd => Optimizer::Sgd { lr },
            OptimizerKind::Adam => Optimizer::Adam(Adam {
                lr,
                beta1: 0.9,
                beta2: 0.999,
                eps: 1e-8,
                step: 0,
                m: shapes.iter().map(|n| vec![0.0; *n]).collect(),
                v: shapes.iter().map(|n| vec![0.0; *n]).collect(),
            }),
        }
    }

    pub fn update(&mut self, params: Vec<&mut [f64]>, grads: Vec<&[f64]>) {
        match self {
            Optimizer::Sgd { lr } => {
                for (p, g) in params.into_iter().zip(grads) {
                    for (pi, gi) in p.iter_mut().zip(g) {
                        *pi -= *lr * gi;
                    }
                }
            }
            Optimizer::Adam(a) => {
                a.step += 1;
                let c1 = 1.0 - a.beta1.powi(a.step);
                let c2 = 1.0 - a.beta2.powi(a.step);
                for (k, (p, g)) in params.into_iter().zip(grads).enumerate() {
                    let (m, v) = (&mut a.m[k], &mut a.v[k]);
                    for i in 0..p.len() {
                        m[i] = a.beta1 * m[i] + (1.0 - a.beta1) * g[i];
                        v[i] = a.beta2 * v[i] + (1.0 - a.beta2) * g[i] * g[i];
                        p[i] -= a.lr * (m[i] / c1) / ((v[i] / c2).sqrt() + a.eps);
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sgd_step() {
        let mut p = vec![1.0, 2.0];
        let mut opt = Optimizer::new(OptimizerKind::Sgd, 0.5, &[2]);
        opt.update(vec![&mut p], vec![&[2.0, -2.0]]);
        assert_eq!(p, vec![0.0, 3.0]);
    }

    #[test]
    fn adam_first_step_moves_by_lr() {
        let mut p = vec![0.0, 0.0];
        let mut opt = Optimizer::new(OptimizerKind::Adam, 0.1, &[2]);
        opt.update(vec![&mut p], vec![&[3.0, -0.01]]);
        assert!((p[0] + 0.1).abs() < 1e-6);
        assert!((p[1] - 0.1).abs() < 1e-4);
    }
}
