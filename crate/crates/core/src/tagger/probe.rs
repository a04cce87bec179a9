use super::TaggerError;
use crate::parallel::Execution;

/// A single linear layer followed by a softmax: `P(y | x) = softmax(W x + b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearProbe {
    classes: usize,
    dim: usize,
    /// Row-major `classes x dim`.
    weights: Vec<f64>,
    bias: Vec<f64>,
}

/// Whether the input vectors receive gradients.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mode {
    #[default]
    Frozen,
    FineTune,
}

/// Summed negative log-likelihood of a batch and its gradients.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    pub loss: f64,
    /// Same layout as the probe's weights.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    /// Gradient w.r.t. each input vector, in fine-tune mode only.
    pub inputs: Option<Vec<Vec<f64>>>,
}

impl LinearProbe {
    pub fn zeros(classes: usize, dim: usize) -> Self {
        LinearProbe {
            classes,
            dim,
            weights: vec![0.0; classes * dim],
            bias: vec![0.0; classes],
        }
    }

    pub fn from_parts(classes: usize, dim: usize, weights: Vec<f64>, bias: Vec<f64>) -> Result<Self, TaggerError> {
        if weights.len() != classes * dim || bias.len() != classes {
            return Err(TaggerError::DimensionMismatch {
                expected: classes * dim,
                found: weights.len(),
            });
        }
        Ok(LinearProbe {
            classes,
            dim,
            weights,
            bias,
        })
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn bias_mut(&mut self) -> &mut [f64] {
        &mut self.bias
    }

    fn row(&self, class: usize) -> &[f64] {
        &self.weights[class * self.dim..(class + 1) * self.dim]
    }

    fn check_dim(&self, x: &[f64]) -> Result<(), TaggerError> {
        if x.len() != self.dim {
            return Err(TaggerError::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(())
    }

    /// `W x + b`.
    pub fn logits(&self, x: &[f64]) -> Result<Vec<f64>, TaggerError> {
        self.check_dim(x)?;
        Ok((0..self.classes).map(|k| dot(self.row(k), x) + self.bias[k]).collect())
    }

    /// Class probabilities for `x`.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>, TaggerError> {
        let mut z = self.logits(x)?;
        softmax_in_place(&mut z);
        Ok(z)
    }

    /// Most probable class; ties go to the lowest index.
    pub fn predict(&self, x: &[f64]) -> Result<usize, TaggerError> {
        let z = self.logits(x)?;
        Ok(argmax(&z))
    }

    /// Loss `-sum log P(y_i | x_i)` over the batch with analytic gradients.
    ///
    /// Per-item work and per-class accumulation run through `execution`;
    /// every sum is taken in item order, so the result does not depend on
    /// the thread count.
    pub fn loss_and_gradients(
        &self,
        batch: &[(&[f64], usize)],
        mode: Mode,
        execution: Execution,
    ) -> Result<Gradients, TaggerError> {
        for &(x, y) in batch {
            self.check_dim(x)?;
            if y >= self.classes {
                return Err(TaggerError::LabelOutOfRange {
                    label: y,
                    classes: self.classes,
                });
            }
        }

        // Per item: loss and delta = p - onehot(y).
        let items: Vec<(f64, Vec<f64>)> = execution.map(batch, |&(x, y)| {
            let mut z: Vec<f64> = (0..self.classes).map(|k| dot(self.row(k), x) + self.bias[k]).collect();
            let log_norm = log_sum_exp(&z);
            let loss = log_norm - z[y];
            for v in z.iter_mut() {
                *v = (*v - log_norm).exp();
            }
            z[y] -= 1.0;
            (loss, z)
        });
        let loss = items.iter().map(|(l, _)| l).sum();

        let mut weights = vec![0.0; self.classes * self.dim];
        let dim = self.dim;
        execution.for_each_chunk_mut(&mut weights, dim, |k, row| {
            for (&(x, _), (_, delta)) in batch.iter().zip(&items) {
                let d = delta[k];
                if d != 0.0 {
                    for (g, xi) in row.iter_mut().zip(x) {
                        *g += d * xi;
                    }
                }
            }
        });
        let bias = (0..self.classes)
            .map(|k| items.iter().map(|(_, delta)| delta[k]).sum())
            .collect();

        let inputs = match mode {
            Mode::Frozen => None,
            Mode::FineTune => Some(execution.map(&items, |(_, delta)| {
                let mut g = vec![0.0; dim];
                for (k, &d) in delta.iter().enumerate() {
                    for (gi, w) in g.iter_mut().zip(self.row(k)) {
                        *gi += d * w;
                    }
                }
                g
            })),
        };

        Ok(Gradients {
            loss,
            weights,
            bias,
            inputs,
        })
    }

    /// Plain gradient step on the layer parameters.
    pub fn apply(&mut self, grads: &Gradients, learning_rate: f64) {
        for (w, g) in self.weights.iter_mut().zip(&grads.weights) {
            *w -= learning_rate * g;
        }
        for (b, g) in self.bias.iter_mut().zip(&grads.bias) {
            *b -= learning_rate * g;
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn argmax(z: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in z.iter().enumerate().skip(1) {
        if v > z[best] {
            best = k;
        }
    }
    best
}

fn log_sum_exp(z: &[f64]) -> f64 {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Softmax with max subtraction.
pub fn softmax_in_place(z: &mut [f64]) {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for v in z.iter_mut() {
        *v = (*v - max).exp();
        total += *v;
    }
    for v in z.iter_mut() {
        *v /= total;
    }
}
