use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::activation::{bce_loss, sigmoid, Activation};
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Input width, hidden widths, and a single sigmoid output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Architecture {
    pub input_dim: usize,
    pub hidden_sizes: Vec<usize>,
}

impl Architecture {
    pub fn new(input_dim: usize, hidden_sizes: Vec<usize>) -> Result<Self> {
        let arch = Architecture {
            input_dim,
            hidden_sizes,
        };
        arch.validate()?;
        Ok(arch)
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 || self.hidden_sizes.contains(&0) {
            return Err(Error::Config(format!(
                "layer sizes must be >= 1, got input {} hidden {:?}",
                self.input_dim, self.hidden_sizes
            )));
        }
        Ok(())
    }

    pub fn output_dim(&self) -> usize {
        1
    }

    /// `[input, hidden.., 1]`
    pub fn widths(&self) -> Vec<usize> {
        let mut w = Vec::with_capacity(self.hidden_sizes.len() + 2);
        w.push(self.input_dim);
        w.extend(&self.hidden_sizes);
        w.push(1);
        w
    }
}

/// Dense layer; `weights` is row-major `fan_out x fan_in`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LayerRepr", into = "LayerRepr")]
pub struct Layer {
    fan_in: usize,
    fan_out: usize,
    weights: Vec<f64>,
    biases: Vec<f64>,
    activation: Activation,
}

#[derive(Serialize, Deserialize)]
struct LayerRepr {
    activation: Activation,
    weights: Vec<Vec<f64>>,
    biases: Vec<f64>,
}

impl From<Layer> for LayerRepr {
    fn from(l: Layer) -> Self {
        LayerRepr {
            activation: l.activation,
            weights: l.weights.chunks(l.fan_in).map(<[f64]>::to_vec).collect(),
            biases: l.biases,
        }
    }
}

impl TryFrom<LayerRepr> for Layer {
    type Error = Error;

    fn try_from(r: LayerRepr) -> Result<Self> {
        let rows: Vec<Vec<f64>> = r.weights;
        Layer::from_rows(&rows, r.biases, r.activation)
    }
}

impl Layer {
    pub fn new(
        fan_in: usize,
        fan_out: usize,
        weights: Vec<f64>,
        biases: Vec<f64>,
        activation: Activation,
    ) -> Result<Self> {
        if fan_in == 0 || fan_out == 0 {
            return Err(Error::Config("layer dimensions must be >= 1".into()));
        }
        if weights.len() != fan_in * fan_out {
            return Err(Error::DimensionMismatch {
                expected: fan_in * fan_out,
                got: weights.len(),
            });
        }
        if biases.len() != fan_out {
            return Err(Error::DimensionMismatch {
                expected: fan_out,
                got: biases.len(),
            });
        }
        if weights.iter().chain(&biases).any(|v| !v.is_finite()) {
            return Err(Error::Domain("layer parameters must be finite".into()));
        }
        Ok(Layer {
            fan_in,
            fan_out,
            weights,
            biases,
            activation,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], biases: Vec<f64>, activation: Activation) -> Result<Self> {
        let fan_out = rows.len();
        let fan_in = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != fan_in) {
            return Err(Error::Schema("ragged weight matrix".into()));
        }
        Layer::new(fan_in, fan_out, rows.concat(), biases, activation)
    }

    pub fn fan_in(&self) -> usize {
        self.fan_in
    }

    pub fn fan_out(&self) -> usize {
        self.fan_out
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    pub fn biases_mut(&mut self) -> &mut [f64] {
        &mut self.biases
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn set_activation(&mut self, a: Activation) {
        self.activation = a;
    }

    #[inline]
    fn affine(&self, input: &[f64], out: &mut [f64]) {
        for ((o, row), b) in out
            .iter_mut()
            .zip(self.weights.chunks_exact(self.fan_in))
            .zip(&self.biases)
        {
            *o = b + dot(row, input);
        }
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Per-layer gradient blocks shaped like the network's parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<LayerGrad>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerGrad {
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Gradients {
    pub fn zeros_like(net: &Mlp) -> Self {
        Gradients {
            layers: net
                .layers
                .iter()
                .map(|l| LayerGrad {
                    weights: vec![0.0; l.weights.len()],
                    biases: vec![0.0; l.biases.len()],
                })
                .collect(),
        }
    }

    fn clear(&mut self) {
        for g in &mut self.layers {
            g.weights.fill(0.0);
            g.biases.fill(0.0);
        }
    }

    fn scale(&mut self, k: f64) {
        for g in &mut self.layers {
            g.weights.iter_mut().chain(g.biases.iter_mut()).for_each(|v| *v *= k);
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.layers
            .iter()
            .flat_map(|g| g.weights.iter().chain(&g.biases))
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Buffers reused across forward/backward passes.
#[derive(Debug, Clone)]
pub struct Workspace {
    /// Pre-activations per layer.
    z: Vec<Vec<f64>>,
    /// Layer outputs; `a[0]` is the input.
    a: Vec<Vec<f64>>,
    delta: Vec<Vec<f64>>,
}

impl Workspace {
    pub fn new(net: &Mlp) -> Self {
        let mut a = vec![vec![0.0; net.input_dim()]];
        a.extend(net.layers.iter().map(|l| vec![0.0; l.fan_out]));
        Workspace {
            z: net.layers.iter().map(|l| vec![0.0; l.fan_out]).collect(),
            a,
            delta: net.layers.iter().map(|l| vec![0.0; l.fan_out]).collect(),
        }
    }

    /// Pre-activations of the last forward pass, per layer.
    pub fn pre_activations(&self) -> &[Vec<f64>] {
        &self.z
    }
}

/// Fully connected feed-forward network with one output unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MlpRepr")]
pub struct Mlp {
    layers: Vec<Layer>,
}

#[derive(Deserialize)]
struct MlpRepr {
    layers: Vec<Layer>,
}

impl TryFrom<MlpRepr> for Mlp {
    type Error = Error;

    fn try_from(r: MlpRepr) -> Result<Self> {
        Mlp::from_layers(r.layers)
    }
}

impl Mlp {
    /// Glorot-uniform weights, zero biases; relu hidden layers, sigmoid output.
    pub fn init(arch: &Architecture, rng: &mut Rng) -> Result<Self> {
        arch.validate()?;
        let widths = arch.widths();
        let n = widths.len() - 1;
        let layers = widths
            .windows(2)
            .enumerate()
            .map(|(k, w)| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
                let weights = (0..fan_in * fan_out)
                    .map(|_| rng.random_range(-limit..=limit))
                    .collect();
                let act = if k + 1 == n {
                    Activation::Sigmoid
                } else {
                    Activation::Relu
                };
                Layer::new(fan_in, fan_out, weights, vec![0.0; fan_out], act)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Mlp { layers })
    }

    pub fn from_layers(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Config("network has no layers".into()));
        }
        for pair in layers.windows(2) {
            if pair[0].fan_out != pair[1].fan_in {
                return Err(Error::DimensionMismatch {
                    expected: pair[0].fan_out,
                    got: pair[1].fan_in,
                });
            }
        }
        let last = layers.last().expect("nonempty");
        if last.fan_out != 1 {
            return Err(Error::Config("output layer must have exactly one unit".into()));
        }
        if last.activation != Activation::Sigmoid {
            return Err(Error::Config("output layer must use sigmoid".into()));
        }
        Ok(Mlp { layers })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].fan_in
    }

    pub fn architecture(&self) -> Architecture {
        Architecture {
            input_dim: self.input_dim(),
            hidden_sizes: self.layers[..self.layers.len() - 1]
                .iter()
                .map(|l| l.fan_out)
                .collect(),
        }
    }

    pub fn num_params(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.biases.len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.iter().chain(&l.biases).all(|v| v.is_finite()))
    }

    pub fn is_trainable(&self) -> bool {
        self.layers.iter().all(|l| l.activation.is_trainable())
    }

    /// Replaces every hidden activation, e.g. with the step function for inference.
    pub fn set_hidden_activation(&mut self, a: Activation) {
        let n = self.layers.len();
        for l in &mut self.layers[..n - 1] {
            l.activation = a;
        }
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// P(class 1 | x) for an already normalized feature vector.
    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        self.check_input(x)?;
        let mut ws = Workspace::new(self);
        Ok(self.forward_ws(x, &mut ws))
    }

    /// Forward pass that records every layer's pre-activation and output in `ws`.
    pub fn forward_ws(&self, x: &[f64], ws: &mut Workspace) -> f64 {
        ws.a[0].copy_from_slice(x);
        for (k, layer) in self.layers.iter().enumerate() {
            let (before, after) = ws.a.split_at_mut(k + 1);
            let input = &before[k];
            let out = &mut after[0];
            let z = &mut ws.z[k];
            layer.affine(input, z);
            let act = layer.activation;
            for (o, &zi) in out.iter_mut().zip(z.iter()) {
                *o = act.apply(zi);
            }
        }
        // Saturated logits round to exactly 0 or 1; keep the probability open.
        ws.a.last().expect("output layer")[0].clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
    }

    /// Accumulates d(BCE)/d(params) for one sample into `grads` and returns
    /// its loss. The output layer is sigmoid, so d(loss)/d(logit) = p - y.
    fn accumulate(&self, x: &[f64], y: u8, ws: &mut Workspace, grads: &mut Gradients) -> f64 {
        let p = self.forward_ws(x, ws);
        let loss = bce_loss(p, y);
        let n = self.layers.len();
        let out_logit = ws.z[n - 1][0];
        ws.delta[n - 1][0] = sigmoid(out_logit) - f64::from(y);

        for k in (0..n).rev() {
            let layer = &self.layers[k];
            let g = &mut grads.layers[k];
            {
                let delta = &ws.delta[k];
                let input = &ws.a[k];
                for ((gw_row, gb), &d) in g
                    .weights
                    .chunks_exact_mut(layer.fan_in)
                    .zip(g.biases.iter_mut())
                    .zip(delta)
                {
                    *gb += d;
                    if d != 0.0 {
                        for (gw, &xi) in gw_row.iter_mut().zip(input) {
                            *gw += d * xi;
                        }
                    }
                }
            }
            if k == 0 {
                break;
            }
            let (lower, upper) = ws.delta.split_at_mut(k);
            let prev = &mut lower[k - 1];
            prev.fill(0.0);
            for (row, &d) in layer.weights.chunks_exact(layer.fan_in).zip(&upper[0]) {
                if d != 0.0 {
                    for (pv, &w) in prev.iter_mut().zip(row) {
                        *pv += w * d;
                    }
                }
            }
            let act = self.layers[k - 1].activation;
            for ((pv, &z), &a) in prev.iter_mut().zip(&ws.z[k - 1]).zip(&ws.a[k]) {
                *pv *= act.derivative(z, a).unwrap_or(0.0);
            }
        }
        loss
    }

    /// Mean BCE over the selected rows and its exact gradient, written into
    /// `grads` (overwritten). Returns the mean loss.
    pub fn backward_into(
        &self,
        rows: &[&[f64]],
        labels: &[u8],
        ws: &mut Workspace,
        grads: &mut Gradients,
    ) -> Result<f64> {
        if rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if rows.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: rows.len(),
                got: labels.len(),
            });
        }
        if !self.is_trainable() {
            return Err(Error::Config(
                "step activation is inference-only and has no gradient".into(),
            ));
        }
        for r in rows {
            self.check_input(r)?;
        }
        grads.clear();
        let mut total = 0.0;
        for (x, &y) in rows.iter().zip(labels) {
            total += self.accumulate(x, y, ws, grads);
        }
        let k = 1.0 / rows.len() as f64;
        grads.scale(k);
        Ok(total * k)
    }

    /// Mean BCE loss and its gradient over a batch.
    pub fn backward(&self, rows: &[&[f64]], labels: &[u8]) -> Result<(f64, Gradients)> {
        let mut ws = Workspace::new(self);
        let mut grads = Gradients::zeros_like(self);
        let loss = self.backward_into(rows, labels, &mut ws, &mut grads)?;
        Ok((loss, grads))
    }

    /// Mean BCE loss over a batch, no gradient.
    pub fn loss(&self, rows: &[&[f64]], labels: &[u8]) -> Result<f64> {
        if rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut ws = Workspace::new(self);
        let mut total = 0.0;
        for (x, &y) in rows.iter().zip(labels) {
            self.check_input(x)?;
            total += bce_loss(self.forward_ws(x, &mut ws), y);
        }
        Ok(total / rows.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn single_neuron(w: Vec<f64>, b: f64) -> Mlp {
        let n = w.len();
        Mlp::from_layers(vec![Layer::new(n, 1, w, vec![b], Activation::Sigmoid).unwrap()]).unwrap()
    }

    #[test]
    fn init_is_seeded_bounded_and_bias_free() {
        let arch = Architecture::new(2, vec![]).unwrap();
        let net = Mlp::init(&arch, &mut rng::seeded(3)).unwrap();
        assert_eq!(net.layers()[0].biases(), &[0.0]);

        let arch = Architecture::new(3, vec![3]).unwrap();
        let a = Mlp::init(&arch, &mut rng::seeded(5)).unwrap();
        let b = Mlp::init(&arch, &mut rng::seeded(5)).unwrap();
        assert_eq!(a, b);
        assert!(a.layers()[0].weights().iter().all(|w| w.abs() <= 1.0));
        assert_eq!(a.layers()[0].activation(), Activation::Relu);
        assert_eq!(a.layers()[1].activation(), Activation::Sigmoid);
    }

    #[test]
    fn forward_hand_values() {
        let net = single_neuron(vec![1.0, 1.0], -1.0);
        assert_eq!(net.forward(&[0.5, 0.5]).unwrap(), 0.5);

        let zero = single_neuron(vec![0.0, 0.0, 0.0], 0.0);
        assert_eq!(zero.forward(&[3.0, -9.0, 1e6]).unwrap(), 0.5);

        // hidden relu layer with negative pre-activations: output is sigmoid(b_out)
        let hidden = Layer::new(2, 2, vec![-1.0, -1.0, -2.0, -0.5], vec![-0.1, -0.2], Activation::Relu).unwrap();
        let out = Layer::new(2, 1, vec![3.0, -4.0], vec![0.7], Activation::Sigmoid).unwrap();
        let net = Mlp::from_layers(vec![hidden, out]).unwrap();
        let p = net.forward(&[1.0, 2.0]).unwrap();
        assert!((p - sigmoid(0.7)).abs() < 1e-15);
    }

    #[test]
    fn forward_dimension_mismatch() {
        let net = single_neuron(vec![1.0, 1.0], 0.0);
        assert!(matches!(
            net.forward(&[1.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn from_layers_validates_shapes() {
        let a = Layer::new(2, 3, vec![0.0; 6], vec![0.0; 3], Activation::Relu).unwrap();
        let b = Layer::new(2, 1, vec![0.0; 2], vec![0.0], Activation::Sigmoid).unwrap();
        assert!(Mlp::from_layers(vec![a, b]).is_err());
        let relu_out = Layer::new(2, 1, vec![0.0; 2], vec![0.0], Activation::Relu).unwrap();
        assert!(Mlp::from_layers(vec![relu_out]).is_err());
        assert!(Layer::new(2, 1, vec![f64::NAN, 0.0], vec![0.0], Activation::Sigmoid).is_err());
    }

    #[test]
    fn duplicated_sample_gradient_equals_single() {
        let arch = Architecture::new(3, vec![4]).unwrap();
        let net = Mlp::init(&arch, &mut rng::seeded(8)).unwrap();
        let x = [0.3, -1.2, 0.8];
        let (l1, g1) = net.backward(&[&x], &[1]).unwrap();
        let (l2, g2) = net.backward(&[&x, &x], &[1, 1]).unwrap();
        assert!((l1 - l2).abs() < 1e-15);
        for (a, b) in g1.layers.iter().zip(&g2.layers) {
            for (u, v) in a.weights.iter().zip(&b.weights) {
                assert!((u - v).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn saturated_fit_has_vanishing_gradient() {
        let net = single_neuron(vec![50.0, 50.0], 0.0);
        let x = [1.0, 1.0];
        let (_, g) = net.backward(&[&x], &[1]).unwrap();
        assert!(g.max_abs() < 1e-9);
    }

    #[test]
    fn step_network_is_inference_only() {
        let arch = Architecture::new(2, vec![3]).unwrap();
        let mut net = Mlp::init(&arch, &mut rng::seeded(1)).unwrap();
        net.set_hidden_activation(Activation::Step);
        let p = net.forward(&[0.2, 0.4]).unwrap();
        assert!((0.0..=1.0).contains(&p));
        assert!(net.backward(&[&[0.2, 0.4]], &[1]).is_err());
    }

    #[test]
    fn json_round_trip_keeps_predictions() {
        let arch = Architecture::new(4, vec![5, 3]).unwrap();
        let net = Mlp::init(&arch, &mut rng::seeded(12)).unwrap();
        let text = serde_json::to_string(&net).unwrap();
        let back: Mlp = serde_json::from_str(&text).unwrap();
        assert_eq!(back, net);
        let x = [0.1, 0.2, -0.3, 0.9];
        assert_eq!(
            back.forward(&x).unwrap().to_bits(),
            net.forward(&x).unwrap().to_bits()
        );
        // weights are nested row-major arrays
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let w0 = &v["layers"][0]["weights"];
        assert_eq!(w0.as_array().unwrap().len(), 5);
        assert_eq!(w0[0].as_array().unwrap().len(), 4);
    }
}
