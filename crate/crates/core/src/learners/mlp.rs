//! One-hidden-layer perceptron: ReLU hidden activation, softmax output,
//! cross-entropy loss, mini-batch gradient descent with classic momentum
//! (`v <- momentum*v - lr*grad; w <- w + v`), Glorot-uniform seeded
//! initialization and seeded per-epoch shuffling.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::ModeLabel;
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::learners::{
    check_features, check_labels, require_multiclass, softmax_in_place, Learner, ProbRow,
    N_CLASSES,
};
use crate::rng::seeded;
use crate::scalar::{count, lit, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    pub hidden: usize,
    pub lr: f64,
    pub momentum: f64,
    pub epochs: usize,
    pub batch: usize,
}

impl Default for MlpParams {
    fn default() -> Self {
        MlpParams {
            hidden: 64,
            lr: 0.01,
            momentum: 0.9,
            epochs: 200,
            batch: 32,
        }
    }
}

/// Fitted perceptron. Weight layouts: `w1[input * hidden + unit]`,
/// `w2[unit * N_CLASSES + class]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mlp<T> {
    w1: Vec<T>,
    b1: Vec<T>,
    w2: Vec<T>,
    b2: Vec<T>,
    hidden: usize,
    feature_names: Vec<String>,
}

struct Gradients<T> {
    w1: Vec<T>,
    b1: Vec<T>,
    w2: Vec<T>,
    b2: Vec<T>,
}

impl<T: Scalar> Mlp<T> {
    fn forward(&self, row: &[T]) -> (Vec<T>, ProbRow<T>) {
        let mut hidden = self.b1.clone();
        for (i, &v) in row.iter().enumerate() {
            let w = &self.w1[i * self.hidden..(i + 1) * self.hidden];
            for (h, &wj) in hidden.iter_mut().zip(w) {
                *h += wj * v;
            }
        }
        for h in hidden.iter_mut() {
            if *h < T::zero() {
                *h = T::zero();
            }
        }
        let mut out = [T::zero(); N_CLASSES];
        for c in 0..N_CLASSES {
            out[c] = self.b2[c];
        }
        for (j, &a) in hidden.iter().enumerate() {
            let w = &self.w2[j * N_CLASSES..(j + 1) * N_CLASSES];
            for c in 0..N_CLASSES {
                out[c] += w[c] * a;
            }
        }
        softmax_in_place(&mut out);
        (hidden, out)
    }

    /// Mean cross-entropy over the given rows (no regularization term).
    pub fn mean_loss(&self, x: &FeatureMatrix<T>, y: &[ModeLabel]) -> T {
        let mut loss = T::zero();
        for i in 0..x.n_rows() {
            let (_, p) = self.forward(x.row(i));
            loss -= p[y[i].code()].ln();
        }
        loss / count::<T>(x.n_rows())
    }

    fn batch_gradients(&self, x: &FeatureMatrix<T>, y: &[ModeLabel], rows: &[usize]) -> Gradients<T> {
        let mut g = Gradients {
            w1: vec![T::zero(); self.w1.len()],
            b1: vec![T::zero(); self.b1.len()],
            w2: vec![T::zero(); self.w2.len()],
            b2: vec![T::zero(); self.b2.len()],
        };
        let scale = T::one() / count::<T>(rows.len());
        for &r in rows {
            let row = x.row(r);
            let (hidden, p) = self.forward(row);
            let mut delta_out = p;
            delta_out[y[r].code()] = delta_out[y[r].code()] - T::one();

            for c in 0..N_CLASSES {
                let d = delta_out[c] * scale;
                g.b2[c] += d;
                for (j, &a) in hidden.iter().enumerate() {
                    g.w2[j * N_CLASSES + c] += d * a;
                }
            }

            for (j, &a) in hidden.iter().enumerate() {
                if a <= T::zero() {
                    continue; // ReLU gate closed
                }
                let mut dh = T::zero();
                for c in 0..N_CLASSES {
                    dh += delta_out[c] * self.w2[j * N_CLASSES + c];
                }
                let dh = dh * scale;
                g.b1[j] += dh;
                for (i, &v) in row.iter().enumerate() {
                    g.w1[i * self.hidden + j] += dh * v;
                }
            }
        }
        g
    }

    /// Full-batch analytic gradient, flattened `[w1, b1, w2, b2]`.
    pub fn gradients(&self, x: &FeatureMatrix<T>, y: &[ModeLabel]) -> Vec<T> {
        let rows: Vec<usize> = (0..x.n_rows()).collect();
        let g = self.batch_gradients(x, y, &rows);
        let mut flat = g.w1;
        flat.extend(g.b1);
        flat.extend(g.w2);
        flat.extend(g.b2);
        flat
    }

    /// Flattened parameters `[w1, b1, w2, b2]`.
    pub fn parameters(&self) -> Vec<T> {
        let mut flat = self.w1.clone();
        flat.extend_from_slice(&self.b1);
        flat.extend_from_slice(&self.w2);
        flat.extend_from_slice(&self.b2);
        flat
    }

    pub fn set_parameters(&mut self, params: &[T]) {
        let (a, b) = (self.w1.len(), self.b1.len());
        let (c, d) = (self.w2.len(), self.b2.len());
        assert_eq!(params.len(), a + b + c + d);
        self.w1.copy_from_slice(&params[..a]);
        self.b1.copy_from_slice(&params[a..a + b]);
        self.w2.copy_from_slice(&params[a + b..a + b + c]);
        self.b2.copy_from_slice(&params[a + b + c..]);
    }
}

/// Trains the perceptron with the given seed.
pub fn fit_mlp<T: Scalar>(
    x: &FeatureMatrix<T>,
    y: &[ModeLabel],
    params: &MlpParams,
    seed: u64,
) -> Result<Mlp<T>> {
    check_labels(x, y)?;
    require_multiclass(y)?;
    if params.hidden == 0 || params.batch == 0 {
        return Err(Error::InvalidParameter(
            "mlp hidden and batch sizes must be positive".to_string(),
        ));
    }
    let d = x.n_cols();
    let h = params.hidden;
    let mut rng = seeded(seed);
    let mut uniform = |limit: f64| -> T { lit((rng.gen::<f64>() * 2.0 - 1.0) * limit) };

    let limit1 = (6.0 / (d + h) as f64).sqrt();
    let w1: Vec<T> = (0..d * h).map(|_| uniform(limit1)).collect();
    let limit2 = (6.0 / (h + N_CLASSES) as f64).sqrt();
    let w2: Vec<T> = (0..h * N_CLASSES).map(|_| uniform(limit2)).collect();

    let mut model = Mlp {
        w1,
        b1: vec![T::zero(); h],
        w2,
        b2: vec![T::zero(); N_CLASSES],
        hidden: h,
        feature_names: x.names().to_vec(),
    };

    let lr = lit::<T>(params.lr);
    let momentum = lit::<T>(params.momentum);
    let mut v1 = vec![T::zero(); model.w1.len()];
    let mut vb1 = vec![T::zero(); model.b1.len()];
    let mut v2 = vec![T::zero(); model.w2.len()];
    let mut vb2 = vec![T::zero(); model.b2.len()];

    let mut indices: Vec<usize> = (0..x.n_rows()).collect();
    for _ in 0..params.epochs {
        indices.shuffle(&mut rng);
        for batch in indices.chunks(params.batch) {
            let g = model.batch_gradients(x, y, batch);
            let step = |w: &mut [T], v: &mut [T], grad: &[T]| {
                for k in 0..w.len() {
                    v[k] = momentum * v[k] - lr * grad[k];
                    w[k] += v[k];
                }
            };
            step(&mut model.w1, &mut v1, &g.w1);
            step(&mut model.b1, &mut vb1, &g.b1);
            step(&mut model.w2, &mut v2, &g.w2);
            step(&mut model.b2, &mut vb2, &g.b2);
        }
    }
    Ok(model)
}

impl<T: Scalar> Learner<T> for Mlp<T> {
    fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    fn predict_proba(&self, x: &FeatureMatrix<T>) -> Result<Vec<ProbRow<T>>> {
        check_features(&self.feature_names, x)?;
        Ok((0..x.n_rows()).map(|i| self.forward(x.row(i)).1).collect())
    }
}
