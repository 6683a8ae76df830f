//! Closed-form ridge regression with an unpenalised intercept.

use nalgebra::{DMatrix, DVector};
use ndarray::{Array1, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::features::SampleSet;
use crate::{Error, Result};

pub const LAMBDA_GRID: [f64; 5] = [1e-3, 1e-4, 1e-5, 1e-6, 1e-7];
pub const DEFAULT_LAMBDA: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub lambda: f64,
}

/// Sufficient statistics of centred data: `XcᵀXc`, `Xcᵀyc` and the means.
#[derive(Debug, Clone)]
pub struct Moments {
    gram: DMatrix<f64>,
    xty: DVector<f64>,
    x_mean: DVector<f64>,
    y_mean: f64,
}

impl Moments {
    /// Two passes over the rows: means first, then centred cross products.
    pub fn from_rows<'a, I>(rows: impl Fn() -> I, width: usize) -> Result<Self>
    where
        I: Iterator<Item = (ArrayView1<'a, f64>, f64)>,
    {
        let mut count = 0usize;
        let mut x_mean = DVector::zeros(width);
        let mut y_mean = 0.0;
        for (x, y) in rows() {
            if x.len() != width {
                return Err(Error::LengthMismatch(width, x.len()));
            }
            count += 1;
            for (j, v) in x.iter().enumerate() {
                x_mean[j] += v;
            }
            y_mean += y;
        }
        if count == 0 {
            return Err(Error::InvalidArgument(
                "ridge needs at least one sample".into(),
            ));
        }
        x_mean /= count as f64;
        y_mean /= count as f64;
        let mut gram = DMatrix::zeros(width, width);
        let mut xty = DVector::zeros(width);
        let mut xc = vec![0.0; width];
        for (x, y) in rows() {
            for j in 0..width {
                xc[j] = x[j] - x_mean[j];
            }
            let yc = y - y_mean;
            for i in 0..width {
                let xi = xc[i];
                if xi == 0.0 {
                    continue;
                }
                xty[i] += xi * yc;
                for j in i..width {
                    gram[(i, j)] += xi * xc[j];
                }
            }
        }
        for i in 0..width {
            for j in 0..i {
                gram[(i, j)] = gram[(j, i)];
            }
        }
        Ok(Self {
            gram,
            xty,
            x_mean,
            y_mean,
        })
    }

    pub fn from_matrix(x: ArrayView2<f64>, y: ArrayView1<f64>) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(Error::LengthMismatch(x.nrows(), y.len()));
        }
        Self::from_rows(|| x.rows().into_iter().zip(y.iter().copied()), x.ncols())
    }

    pub fn from_samples(samples: &[&SampleSet]) -> Result<Self> {
        let width = samples
            .first()
            .map(|s| s.features.ncols())
            .ok_or_else(|| Error::InvalidArgument("ridge needs at least one sample".into()))?;
        Self::from_rows(
            || {
                samples
                    .iter()
                    .flat_map(|s| s.features.rows().into_iter().zip(s.targets.iter().copied()))
            },
            width,
        )
    }

    /// Solves `(XcᵀXc + λI) w = Xcᵀyc`.
    pub fn solve(&self, lambda: f64) -> Result<RidgeModel> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "lambda {lambda} must be finite and >= 0"
            )));
        }
        let n = self.gram.nrows();
        let a = &self.gram + DMatrix::identity(n, n) * lambda;
        if lambda == 0.0 && n > 0 {
            let eig = a.clone().symmetric_eigenvalues();
            let max = eig.amax();
            if eig.min() <= max * n as f64 * f64::EPSILON {
                return Err(Error::Singular(
                    "normal equations are singular at lambda = 0; use a positive lambda".into(),
                ));
            }
        }
        let w = match a.clone().cholesky() {
            Some(ch) => ch.solve(&self.xty),
            None if lambda == 0.0 => {
                return Err(Error::Singular(
                    "normal equations are singular at lambda = 0; use a positive lambda".into(),
                ))
            }
            None => a.lu().solve(&self.xty).ok_or_else(|| {
                Error::Singular(format!("ridge system singular at lambda {lambda}"))
            })?,
        };
        let intercept = self.y_mean - w.dot(&self.x_mean);
        Ok(RidgeModel {
            weights: w.iter().copied().collect(),
            intercept,
            lambda,
        })
    }

    /// `‖(XcᵀXc + λI) w − Xcᵀyc‖∞`.
    pub fn residual(&self, model: &RidgeModel) -> f64 {
        let w = DVector::from_column_slice(&model.weights);
        let r = &self.gram * &w + &w * model.lambda - &self.xty;
        r.amax()
    }
}

impl RidgeModel {
    pub fn fit(x: ArrayView2<f64>, y: ArrayView1<f64>, lambda: f64) -> Result<Self> {
        Moments::from_matrix(x, y)?.solve(lambda)
    }

    pub fn fit_samples(samples: &[&SampleSet], lambda: f64) -> Result<Self> {
        Moments::from_samples(samples)?.solve(lambda)
    }

    /// Picks the grid value with the lowest validation RMSE; ties keep the
    /// earlier (larger) value.
    pub fn fit_with_validation(
        train: &[&SampleSet],
        validation: &[&SampleSet],
        grid: &[f64],
    ) -> Result<Self> {
        let moments = Moments::from_samples(train)?;
        if validation.is_empty() {
            return moments.solve(DEFAULT_LAMBDA);
        }
        let mut best: Option<(f64, RidgeModel)> = None;
        for &lambda in grid {
            let model = moments.solve(lambda)?;
            let (mut sq, mut n) = (0.0, 0usize);
            for s in validation {
                let pred = model.predict(s.features.view())?;
                sq += (&pred - &s.targets).mapv(|e| e * e).sum();
                n += pred.len();
            }
            let rmse = (sq / n as f64).sqrt();
            log::debug!("ridge lambda {lambda:e}: validation rmse {rmse:.5}");
            if best.as_ref().is_none_or(|(b, _)| rmse < *b) {
                best = Some((rmse, model));
            }
        }
        best.map(|(_, m)| m)
            .ok_or_else(|| Error::InvalidArgument("empty lambda grid".into()))
    }

    /// Single-feature fit through the origin: `w = Σxy / (Σx² + λ)`.
    pub fn fit_uncentered_1d(x: &[f64], y: &[f64], lambda: f64) -> Result<f64> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch(x.len(), y.len()));
        }
        let xx: f64 = x.iter().map(|v| v * v).sum();
        let xy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
        if xx + lambda == 0.0 {
            return Err(Error::Singular("zero design at lambda = 0".into()));
        }
        Ok(xy / (xx + lambda))
    }

    pub fn predict(&self, x: ArrayView2<f64>) -> Result<Array1<f64>> {
        if x.ncols() != self.weights.len() {
            return Err(Error::Dimension(format!(
                "ridge expects {} features, got {}",
                self.weights.len(),
                x.ncols()
            )));
        }
        let w = ArrayView1::from(&self.weights[..]);
        Ok(x.dot(&w) + self.intercept)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};
    use rand::{Rng, SeedableRng};

    #[test]
    fn exact_fit() {
        let m = RidgeModel::fit(array![[1.0], [2.0]].view(), array![1.0, 2.0].view(), 0.0).unwrap();
        assert!((m.weights[0] - 1.0).abs() < 1e-12);
        assert!(m.intercept.abs() < 1e-12);
    }

    #[test]
    fn uncentered_variant() {
        let w = RidgeModel::fit_uncentered_1d(&[1.0, 2.0], &[1.0, 2.0], 1.0).unwrap();
        assert!((w - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn heavy_regularisation_shrinks_to_zero() {
        let m = RidgeModel::fit(
            array![[1.0], [2.0], [4.0]].view(),
            array![1.0, 3.0, 2.0].view(),
            1e12,
        )
        .unwrap();
        assert!(m.weights[0].abs() < 1e-10);
        assert!((m.intercept - 2.0).abs() < 1e-9);
    }

    #[test]
    fn singular_without_regularisation() {
        let x = array![[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]];
        let err = RidgeModel::fit(x.view(), array![1.0, 2.0, 3.0].view(), 0.0).unwrap_err();
        assert!(err.to_string().contains("positive lambda"), "{err}");
        assert!(RidgeModel::fit(x.view(), array![1.0, 2.0, 3.0].view(), 1e-3).is_ok());
    }

    #[test]
    fn normal_equation_residual() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let x = Array2::from_shape_fn((50, 6), |_| rng.random_range(-2.0..2.0));
        let y = Array1::from_shape_fn(50, |_| rng.random_range(0.0..5.0));
        let mo = Moments::from_matrix(x.view(), y.view()).unwrap();
        for lambda in LAMBDA_GRID {
            let m = mo.solve(lambda).unwrap();
            assert!(mo.residual(&m) < 1e-8 * mo.gram.amax().max(1.0));
        }
    }
}
