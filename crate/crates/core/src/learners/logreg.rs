//! Multinomial logistic regression trained by full-batch gradient descent.
//!
//! The loss is mean softmax cross-entropy plus `l2/2 * sum(w^2)` over the
//! non-bias weights. Weights start at zero and training stops early once the
//! gradient infinity-norm falls below 1e-6.

use serde::{Deserialize, Serialize};

use crate::corpus::ModeLabel;
use crate::error::Result;
use crate::features::FeatureMatrix;
use crate::learners::{
    check_features, check_labels, require_multiclass, softmax_in_place, Learner, ProbRow,
    N_CLASSES,
};
use crate::scalar::{count, lit, Scalar};

const GRAD_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogRegParams {
    pub lr: f64,
    pub l2: f64,
    pub epochs: usize,
}

impl Default for LogRegParams {
    fn default() -> Self {
        LogRegParams {
            lr: 0.1,
            l2: 1e-4,
            epochs: 500,
        }
    }
}

/// Fitted multinomial logistic regression; `d + 1` parameters per class
/// (bias last).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogReg<T> {
    weights: Vec<T>,
    n_features: usize,
    l2: f64,
    feature_names: Vec<String>,
}

impl<T: Scalar> LogReg<T> {
    fn stride(&self) -> usize {
        self.n_features + 1
    }

    fn scores(&self, row: &[T]) -> ProbRow<T> {
        let mut scores = [T::zero(); N_CLASSES];
        let stride = self.stride();
        for c in 0..N_CLASSES {
            let w = &self.weights[c * stride..(c + 1) * stride];
            let mut s = w[self.n_features]; // bias
            for (j, &v) in row.iter().enumerate() {
                s += w[j] * v;
            }
            scores[c] = s;
        }
        scores
    }

    /// Flattened parameters, class-major, bias last within each class.
    pub fn parameters(&self) -> Vec<T> {
        self.weights.clone()
    }

    pub fn set_parameters(&mut self, params: &[T]) {
        assert_eq!(params.len(), self.weights.len());
        self.weights.copy_from_slice(params);
    }

    /// Training objective at the current parameters.
    pub fn mean_loss(&self, x: &FeatureMatrix<T>, y: &[ModeLabel]) -> T {
        let n = count::<T>(x.n_rows());
        let mut loss = T::zero();
        for i in 0..x.n_rows() {
            let mut p = self.scores(x.row(i));
            softmax_in_place(&mut p);
            loss -= p[y[i].code()].ln();
        }
        loss = loss / n;
        let l2 = lit::<T>(self.l2);
        let stride = self.stride();
        let mut reg = T::zero();
        for c in 0..N_CLASSES {
            for j in 0..self.n_features {
                let w = self.weights[c * stride + j];
                reg += w * w;
            }
        }
        loss + l2 / lit::<T>(2.0) * reg
    }

    /// Analytic gradient of [`mean_loss`](Self::mean_loss), same layout as
    /// [`parameters`](Self::parameters).
    pub fn gradients(&self, x: &FeatureMatrix<T>, y: &[ModeLabel]) -> Vec<T> {
        let n = count::<T>(x.n_rows());
        let stride = self.stride();
        let mut grad = vec![T::zero(); self.weights.len()];
        for i in 0..x.n_rows() {
            let row = x.row(i);
            let mut p = self.scores(row);
            softmax_in_place(&mut p);
            for c in 0..N_CLASSES {
                let mut coef = p[c];
                if y[i].code() == c {
                    coef = coef - T::one();
                }
                let g = &mut grad[c * stride..(c + 1) * stride];
                for (j, &v) in row.iter().enumerate() {
                    g[j] += coef * v;
                }
                g[self.n_features] += coef;
            }
        }
        let l2 = lit::<T>(self.l2);
        for c in 0..N_CLASSES {
            for j in 0..stride {
                let k = c * stride + j;
                grad[k] = grad[k] / n;
                if j < self.n_features {
                    grad[k] += l2 * self.weights[k];
                }
            }
        }
        grad
    }
}

/// Fits the model from zero initialization.
pub fn fit_logreg<T: Scalar>(
    x: &FeatureMatrix<T>,
    y: &[ModeLabel],
    params: &LogRegParams,
) -> Result<LogReg<T>> {
    check_labels(x, y)?;
    require_multiclass(y)?;
    let mut model = LogReg {
        weights: vec![T::zero(); N_CLASSES * (x.n_cols() + 1)],
        n_features: x.n_cols(),
        l2: params.l2,
        feature_names: x.names().to_vec(),
    };
    let lr = lit::<T>(params.lr);
    let tol = lit::<T>(GRAD_TOL);
    for _ in 0..params.epochs {
        let grad = model.gradients(x, y);
        let inf_norm = grad
            .iter()
            .fold(T::zero(), |a, &g| if g.abs() > a { g.abs() } else { a });
        if inf_norm < tol {
            break;
        }
        for (w, g) in model.weights.iter_mut().zip(&grad) {
            *w = *w - lr * *g;
        }
    }
    Ok(model)
}

impl<T: Scalar> Learner<T> for LogReg<T> {
    fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    fn predict_proba(&self, x: &FeatureMatrix<T>) -> Result<Vec<ProbRow<T>>> {
        check_features(&self.feature_names, x)?;
        Ok((0..x.n_rows())
            .map(|i| {
                let mut p = self.scores(x.row(i));
                softmax_in_place(&mut p);
                p
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::learners::test_util::{blobs, toy_matrix};

    #[test]
    fn zero_weights_give_uniform_probabilities() {
        let (x, y) = toy_matrix(&["f"], &[(&[1.0], 0), (&[2.0], 1)]);
        let mut model = fit_logreg(&x, &y, &LogRegParams::default()).unwrap();
        model.set_parameters(&vec![0.0; model.parameters().len()]);
        for row in model.predict_proba(&x).unwrap() {
            for p in row {
                assert!((p - 0.25).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn separable_pair_is_classified_perfectly() {
        let (x, y) = toy_matrix(&["f"], &[(&[-1.0], 0), (&[1.0], 1)]);
        let model = fit_logreg(&x, &y, &LogRegParams::default()).unwrap();
        assert_eq!(model.predict(&x).unwrap(), y);
    }

    #[test]
    fn single_class_input_is_rejected() {
        let (x, y) = toy_matrix(&["f"], &[(&[1.0], 2), (&[2.0], 2)]);
        assert!(matches!(
            fit_logreg(&x, &y, &LogRegParams::default()),
            Err(Error::SingleClass)
        ));
    }

    #[test]
    fn analytic_gradient_matches_central_differences() {
        let (x, y) = blobs(3);
        let mut model = fit_logreg(
            &x,
            &y,
            &LogRegParams {
                epochs: 3,
                ..LogRegParams::default()
            },
        )
        .unwrap();
        // move off the optimization path to arbitrary weights
        let mut params = model.parameters();
        let mut s = 0x9e3779b97f4a7c15u64;
        for p in params.iter_mut() {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            *p = (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
        }
        model.set_parameters(&params);

        let grad = model.gradients(&x, &y);
        let eps = 1e-6;
        for k in 0..params.len() {
            let mut up = params.clone();
            let mut down = params.clone();
            up[k] += eps;
            down[k] -= eps;
            model.set_parameters(&up);
            let lu = model.mean_loss(&x, &y);
            model.set_parameters(&down);
            let ld = model.mean_loss(&x, &y);
            model.set_parameters(&params);
            let fd = (lu - ld) / (2.0 * eps);
            let denom = grad[k].abs().max(fd.abs()).max(1e-6);
            assert!(
                ((grad[k] - fd) / denom).abs() < 1e-4,
                "param {k}: analytic {} vs fd {fd}",
                grad[k]
            );
        }
    }

    #[test]
    fn training_is_deterministic() {
        let (x, y) = blobs(4);
        let a = fit_logreg(&x, &y, &LogRegParams::default()).unwrap();
        let b = fit_logreg(&x, &y, &LogRegParams::default()).unwrap();
        assert_eq!(a, b);
    }
}
