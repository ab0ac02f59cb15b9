//! Fully connected feed-forward network with rectifier hidden layers and an
//! identity output layer.

use rand::Rng;

use super::matrix::{axpy, dot, Matrix};
use crate::error::{Error, Result};

/// `y = W x + b` with `W` stored `out x in`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense {
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

impl Dense {
    /// Uniform in `±sqrt(3 / fan_in)`, zero bias.
    pub fn init<R: Rng>(inputs: usize, outputs: usize, rng: &mut R) -> Self {
        let limit = (3.0 / inputs as f64).sqrt();
        let data = (0..inputs * outputs).map(|_| rng.random_range(-limit..limit)).collect();
        Dense { weights: Matrix::from_vec(outputs, inputs, data), bias: vec![0.0; outputs] }
    }

    pub fn inputs(&self) -> usize {
        self.weights.cols()
    }

    pub fn outputs(&self) -> usize {
        self.weights.rows()
    }

    fn forward(&self, x: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(x.rows(), self.outputs());
        for s in 0..x.rows() {
            let xs = x.row(s);
            for (o, z) in out.row_mut(s).iter_mut().enumerate() {
                *z = dot(self.weights.row(o), xs) + self.bias[o];
            }
        }
        out
    }
}

/// Gradient buffers shaped like a network's parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct NetGrads {
    pub layers: Vec<Dense>,
}

impl NetGrads {
    /// Flattened view in layer order: weights then bias.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for l in &self.layers {
            out.extend_from_slice(l.weights.as_slice());
            out.extend_from_slice(&l.bias);
        }
        out
    }
}

/// Activations kept from a forward pass for backpropagation.
pub struct ForwardCache {
    /// `inputs[l]` is the input of layer `l`, already rectified for `l > 0`.
    inputs: Vec<Matrix>,
    pub output: Matrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureNet {
    layers: Vec<Dense>,
}

impl FeatureNet {
    /// `dims = [input, hidden..., output]`.
    pub fn new<R: Rng>(dims: &[usize], rng: &mut R) -> Result<Self> {
        if dims.len() < 2 || dims.contains(&0) {
            return Err(Error::InvalidParams(format!("layer dims {dims:?} need an input and an output, all nonzero")));
        }
        let layers = dims.windows(2).map(|w| Dense::init(w[0], w[1], rng)).collect();
        Ok(FeatureNet { layers })
    }

    pub fn from_layers(layers: Vec<Dense>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidParams("network without layers".into()));
        }
        for w in layers.windows(2) {
            if w[0].outputs() != w[1].inputs() {
                return Err(Error::InvalidParams(format!(
                    "layer output {} does not feed input {}",
                    w[0].outputs(),
                    w[1].inputs()
                )));
            }
        }
        for l in &layers {
            if l.bias.len() != l.outputs() {
                return Err(Error::InvalidParams("bias length differs from layer width".into()));
            }
        }
        Ok(FeatureNet { layers })
    }

    pub fn layers(&self) -> &[Dense] {
        &self.layers
    }

    pub fn dims(&self) -> Vec<usize> {
        let mut dims = vec![self.layers[0].inputs()];
        dims.extend(self.layers.iter().map(Dense::outputs));
        dims
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().outputs()
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.as_slice().len() + l.bias.len()).sum()
    }

    /// One row per sample in, one row per sample out.
    pub fn forward(&self, x: &Matrix) -> Matrix {
        self.forward_cached(x).output
    }

    pub fn forward_cached(&self, x: &Matrix) -> ForwardCache {
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut cur = x.clone();
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            let mut z = layer.forward(&cur);
            if l < last {
                z = z.map(|v| v.max(0.0));
            }
            inputs.push(cur);
            cur = z;
        }
        ForwardCache { inputs, output: cur }
    }

    /// Parameter gradients given `d loss / d output` for the cached batch.
    pub fn backward(&self, cache: &ForwardCache, grad_out: &Matrix) -> NetGrads {
        let mut grads: Vec<Dense> = Vec::with_capacity(self.layers.len());
        let mut delta = grad_out.clone();
        for (l, layer) in self.layers.iter().enumerate().rev() {
            let x = &cache.inputs[l];
            let mut gw = Matrix::zeros(layer.outputs(), layer.inputs());
            let mut gb = vec![0.0; layer.outputs()];
            for s in 0..x.rows() {
                let ds = delta.row(s);
                for (o, &d) in ds.iter().enumerate() {
                    if d != 0.0 {
                        axpy(d, x.row(s), gw.row_mut(o));
                        gb[o] += d;
                    }
                }
            }
            if l > 0 {
                let mut prev = Matrix::zeros(x.rows(), layer.inputs());
                for s in 0..x.rows() {
                    let ds = delta.row(s);
                    let ps = prev.row_mut(s);
                    for (o, &d) in ds.iter().enumerate() {
                        if d != 0.0 {
                            axpy(d, layer.weights.row(o), ps);
                        }
                    }
                    // Rectifier: x is the post-activation input of layer l.
                    for (p, &xv) in ps.iter_mut().zip(x.row(s)) {
                        if xv <= 0.0 {
                            *p = 0.0;
                        }
                    }
                }
                delta = prev;
            }
            grads.push(Dense { weights: gw, bias: gb });
        }
        grads.reverse();
        NetGrads { layers: grads }
    }

    /// Parameters flattened in the same order as [`NetGrads::flatten`].
    pub fn flatten(&self) -> Vec<f64> {
        NetGrads { layers: self.layers.clone() }.flatten()
    }

    pub fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.layers.iter_mut().flat_map(|l| l.weights.as_mut_slice().iter_mut().chain(l.bias.iter_mut()))
    }
}
