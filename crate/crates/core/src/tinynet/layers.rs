//! Individual layers with cached-input manual backpropagation.
//!
//! Every layer accumulates parameter gradients (callers zero them between
//! optimizer steps) and returns the gradient with respect to its input, so
//! stacks can be differentiated back to the network input.

use ndarray::{Array1, Array2, Axis};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Fully-connected layer, `y = x W^T + b` with `W` stored as (out, in).
#[derive(Debug, Clone)]
pub struct Linear {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
    pub(crate) grad_weights: Array2<f64>,
    pub(crate) grad_bias: Array1<f64>,
    input_cache: Option<Array2<f64>>,
}

impl Linear {
    /// Kaiming-style uniform fan-in init scaled for a leaky-ReLU gain.
    pub fn new(in_dim: usize, out_dim: usize, leaky_slope: f64, rng: &mut ChaCha8Rng) -> Self {
        let gain = (2.0 / (1.0 + leaky_slope * leaky_slope)).sqrt();
        let limit = gain * (3.0 / in_dim as f64).sqrt();
        let weights =
            Array2::from_shape_fn((out_dim, in_dim), |_| rng.random_range(-limit..limit));
        Linear {
            weights,
            bias: Array1::zeros(out_dim),
            grad_weights: Array2::zeros((out_dim, in_dim)),
            grad_bias: Array1::zeros(out_dim),
            input_cache: None,
        }
    }

    pub fn in_dim(&self) -> usize {
        self.weights.ncols()
    }

    pub fn out_dim(&self) -> usize {
        self.weights.nrows()
    }

    pub fn forward(&mut self, x: &Array2<f64>, cache: bool) -> Array2<f64> {
        let y = x.dot(&self.weights.t()) + &self.bias;
        if cache {
            self.input_cache = Some(x.clone());
        }
        y
    }

    pub fn forward_pure(&self, x: &Array2<f64>) -> Array2<f64> {
        x.dot(&self.weights.t()) + &self.bias
    }

    pub fn backward(&mut self, dy: &Array2<f64>) -> Result<Array2<f64>> {
        let x = self
            .input_cache
            .take()
            .ok_or(Error::BackwardBeforeForward)?;
        self.grad_weights += &dy.t().dot(&x);
        self.grad_bias += &dy.sum_axis(Axis(0));
        Ok(dy.dot(&self.weights))
    }
}

struct BnCache {
    x_hat: Array2<f64>,
    inv_std: Array1<f64>,
}

/// Batch normalization over the batch axis with per-channel affine.
///
/// Normalization uses the biased batch variance; running statistics follow
/// the same convention and are blended as
/// `running = (1 - momentum) * running + momentum * batch`.
pub struct BatchNorm {
    pub gamma: Array1<f64>,
    pub beta: Array1<f64>,
    pub(crate) grad_gamma: Array1<f64>,
    pub(crate) grad_beta: Array1<f64>,
    pub running_mean: Array1<f64>,
    pub running_var: Array1<f64>,
    pub momentum: f64,
    pub eps: f64,
    cache: Option<BnCache>,
}

impl BatchNorm {
    pub fn new(channels: usize, momentum: f64, eps: f64) -> Self {
        BatchNorm {
            gamma: Array1::ones(channels),
            beta: Array1::zeros(channels),
            grad_gamma: Array1::zeros(channels),
            grad_beta: Array1::zeros(channels),
            running_mean: Array1::zeros(channels),
            running_var: Array1::ones(channels),
            momentum,
            eps,
            cache: None,
        }
    }

    pub fn channels(&self) -> usize {
        self.gamma.len()
    }

    pub fn forward_train(&mut self, x: &Array2<f64>) -> Result<Array2<f64>> {
        let k = x.nrows();
        if k < 2 {
            return Err(Error::BatchTooSmall { got: k, need: 2 });
        }
        let mean = x.mean_axis(Axis(0)).expect("non-empty batch");
        let centered = x - &mean;
        let var = centered.mapv(|v| v * v).mean_axis(Axis(0)).expect("var");
        let inv_std = var.mapv(|v| 1.0 / (v + self.eps).sqrt());
        let x_hat = &centered * &inv_std;
        let y = &x_hat * &self.gamma + &self.beta;

        self.running_mean = (1.0 - self.momentum) * &self.running_mean + self.momentum * &mean;
        self.running_var = (1.0 - self.momentum) * &self.running_var + self.momentum * &var;
        self.cache = Some(BnCache { x_hat, inv_std });
        Ok(y)
    }

    pub fn forward_eval(&self, x: &Array2<f64>) -> Array2<f64> {
        let inv_std = self.running_var.mapv(|v| 1.0 / (v + self.eps).sqrt());
        (x - &self.running_mean) * &inv_std * &self.gamma + &self.beta
    }

    pub fn backward(&mut self, dy: &Array2<f64>) -> Result<Array2<f64>> {
        let BnCache { x_hat, inv_std } =
            self.cache.take().ok_or(Error::BackwardBeforeForward)?;
        let k = dy.nrows() as f64;
        self.grad_gamma += &(dy * &x_hat).sum_axis(Axis(0));
        self.grad_beta += &dy.sum_axis(Axis(0));

        let dx_hat = dy * &self.gamma;
        let sum_dx_hat = dx_hat.sum_axis(Axis(0));
        let sum_dx_hat_x_hat = (&dx_hat * &x_hat).sum_axis(Axis(0));
        // Full backward through the batch statistics.
        let dx = (dx_hat * k - &sum_dx_hat - &x_hat * &sum_dx_hat_x_hat) * &inv_std / k;
        Ok(dx)
    }
}

/// Leaky ReLU with configurable negative slope.
#[derive(Debug, Clone)]
pub struct LeakyRelu {
    pub slope: f64,
    input_cache: Option<Array2<f64>>,
}

impl LeakyRelu {
    pub fn new(slope: f64) -> Self {
        LeakyRelu {
            slope,
            input_cache: None,
        }
    }

    pub fn forward(&mut self, x: &Array2<f64>, cache: bool) -> Array2<f64> {
        let slope = self.slope;
        let y = x.mapv(|v| if v > 0.0 { v } else { slope * v });
        if cache {
            self.input_cache = Some(x.clone());
        }
        y
    }

    pub fn backward(&mut self, dy: &Array2<f64>) -> Result<Array2<f64>> {
        let x = self
            .input_cache
            .take()
            .ok_or(Error::BackwardBeforeForward)?;
        let slope = self.slope;
        Ok(dy * &x.mapv(|v| if v > 0.0 { 1.0 } else { slope }))
    }
}

/// Inverted dropout: surviving activations are scaled by `1/keep` during
/// training so eval mode needs no rescaling.
pub struct Dropout {
    pub p: f64,
    mask: Option<Array2<f64>>,
    frozen: bool,
}

impl Dropout {
    pub fn new(p: f64) -> Self {
        Dropout {
            p,
            mask: None,
            frozen: false,
        }
    }

    /// Freeze reuses the last drawn mask; gradient checks need the forward
    /// map to stay fixed while parameters are perturbed.
    pub fn set_frozen(&mut self, frozen: bool) {
        self.frozen = frozen;
    }

    pub fn forward_train(&mut self, x: &Array2<f64>, rng: &mut ChaCha8Rng) -> Array2<f64> {
        let reuse = self.frozen
            && self
                .mask
                .as_ref()
                .is_some_and(|m| m.dim() == x.dim());
        if !reuse {
            let keep = 1.0 - self.p;
            let mask = Array2::from_shape_fn(x.dim(), |_| {
                if rng.random::<f64>() < keep {
                    1.0 / keep
                } else {
                    0.0
                }
            });
            self.mask = Some(mask);
        }
        x * self.mask.as_ref().expect("mask drawn above")
    }

    pub fn backward(&mut self, dy: &Array2<f64>) -> Result<Array2<f64>> {
        let mask = self.mask.as_ref().ok_or(Error::BackwardBeforeForward)?;
        Ok(dy * mask)
    }
}

/// Logistic head mapping logits into (0, 1).
#[derive(Debug, Clone, Default)]
pub struct Sigmoid {
    output_cache: Option<Array2<f64>>,
}

impl Sigmoid {
    pub fn new() -> Self {
        Sigmoid { output_cache: None }
    }

    pub fn forward(&mut self, x: &Array2<f64>, cache: bool) -> Array2<f64> {
        let y = x.mapv(sigmoid_scalar);
        if cache {
            self.output_cache = Some(y.clone());
        }
        y
    }

    pub fn backward(&mut self, dy: &Array2<f64>) -> Result<Array2<f64>> {
        let y = self
            .output_cache
            .take()
            .ok_or(Error::BackwardBeforeForward)?;
        Ok(dy * &y.mapv(|v| v * (1.0 - v)))
    }
}

pub(crate) fn sigmoid_scalar(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// One stage of a feed-forward stack.
pub enum Layer {
    Linear(Linear),
    BatchNorm(BatchNorm),
    LeakyRelu(LeakyRelu),
    Dropout(Dropout),
    Sigmoid(Sigmoid),
}

impl Layer {
    pub fn forward_train(&mut self, x: &Array2<f64>, rng: &mut ChaCha8Rng) -> Result<Array2<f64>> {
        match self {
            Layer::Linear(l) => Ok(l.forward(x, true)),
            Layer::BatchNorm(l) => l.forward_train(x),
            Layer::LeakyRelu(l) => Ok(l.forward(x, true)),
            Layer::Dropout(l) => Ok(l.forward_train(x, rng)),
            Layer::Sigmoid(l) => Ok(l.forward(x, true)),
        }
    }

    pub fn forward_eval(&self, x: &Array2<f64>) -> Array2<f64> {
        match self {
            Layer::Linear(l) => l.forward_pure(x),
            Layer::BatchNorm(l) => l.forward_eval(x),
            Layer::LeakyRelu(l) => {
                let slope = l.slope;
                x.mapv(|v| if v > 0.0 { v } else { slope * v })
            }
            Layer::Dropout(_) => x.clone(),
            Layer::Sigmoid(_) => x.mapv(sigmoid_scalar),
        }
    }

    pub fn backward(&mut self, dy: &Array2<f64>) -> Result<Array2<f64>> {
        match self {
            Layer::Linear(l) => l.backward(dy),
            Layer::BatchNorm(l) => l.backward(dy),
            Layer::LeakyRelu(l) => l.backward(dy),
            Layer::Dropout(l) => l.backward(dy),
            Layer::Sigmoid(l) => l.backward(dy),
        }
    }

    pub fn zero_grad(&mut self) {
        match self {
            Layer::Linear(l) => {
                l.grad_weights.fill(0.0);
                l.grad_bias.fill(0.0);
            }
            Layer::BatchNorm(l) => {
                l.grad_gamma.fill(0.0);
                l.grad_beta.fill(0.0);
            }
            _ => {}
        }
    }

    /// Trainable parameter count.
    pub fn num_params(&self) -> usize {
        match self {
            Layer::Linear(l) => l.weights.len() + l.bias.len(),
            Layer::BatchNorm(l) => l.gamma.len() + l.beta.len(),
            _ => 0,
        }
    }
}
