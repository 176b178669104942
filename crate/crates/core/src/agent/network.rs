use rand::Rng;

use super::AgentError;

const INV_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Exact GELU, `x Φ(x)`.
#[inline]
pub fn gelu(x: f64) -> f64 {
    0.5 * x * (1.0 + libm::erf(x * INV_SQRT_2))
}

#[inline]
pub fn gelu_derivative(x: f64) -> f64 {
    0.5 * (1.0 + libm::erf(x * INV_SQRT_2)) + x * INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Affine map `y = W x + b` with `W` stored row-major as `n_out × n_in`.
#[derive(Debug, Clone, PartialEq)]
pub struct Linear {
    pub n_in: usize,
    pub n_out: usize,
    pub weight: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Linear {
    /// Uniform initialization in ±1/√n_in for weights and biases.
    pub fn new(n_in: usize, n_out: usize, rng: &mut impl Rng) -> Self {
        let bound = 1.0 / (n_in as f64).sqrt();
        let weight = (0..n_in * n_out).map(|_| rng.random_range(-bound..bound)).collect();
        let bias = (0..n_out).map(|_| rng.random_range(-bound..bound)).collect();
        Self { n_in, n_out, weight, bias }
    }

    pub fn zeros(n_in: usize, n_out: usize) -> Self {
        Self { n_in, n_out, weight: vec![0.0; n_in * n_out], bias: vec![0.0; n_out] }
    }

    /// `Y = X Wᵀ + b` for a row-major batch `X` of `rows` inputs.
    fn forward_batch(&self, x: &[f64], rows: usize) -> Vec<f64> {
        let mut y = Vec::with_capacity(rows * self.n_out);
        for _ in 0..rows {
            y.extend_from_slice(&self.bias);
        }
        // SAFETY: every pointer covers the extent implied by its dimensions and strides.
        unsafe {
            matrixmultiply::dgemm(
                rows,
                self.n_in,
                self.n_out,
                1.0,
                x.as_ptr(),
                self.n_in as isize,
                1,
                self.weight.as_ptr(),
                1,
                self.n_in as isize,
                1.0,
                y.as_mut_ptr(),
                self.n_out as isize,
                1,
            );
        }
        y
    }
}

/// Gradients with the same layout as the network parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weight: Vec<Vec<f64>>,
    pub bias: Vec<Vec<f64>>,
}

/// Feedforward Q-network: affine layers with GELU between them.
#[derive(Debug, Clone, PartialEq)]
pub struct QNetwork {
    layers: Vec<Linear>,
}

/// Activations kept for backpropagation.
struct Tape {
    /// Input to each layer (post-activation of the previous one).
    inputs: Vec<Vec<f64>>,
    /// Pre-activations of the hidden layers.
    pre: Vec<Vec<f64>>,
    output: Vec<f64>,
}

impl QNetwork {
    /// Layer widths `widths[0] → widths[1] → … → widths[last]`.
    pub fn new(widths: &[usize], rng: &mut impl Rng) -> Result<Self, AgentError> {
        if widths.len() < 2 || widths.contains(&0) {
            return Err(AgentError::InvalidArchitecture(format!("{widths:?}")));
        }
        Ok(Self { layers: widths.windows(2).map(|w| Linear::new(w[0], w[1], rng)).collect() })
    }

    /// `n_layers` affine maps of `hidden` channels between input and output.
    pub fn with_shape(
        input: usize,
        hidden: usize,
        n_layers: usize,
        output: usize,
        rng: &mut impl Rng,
    ) -> Result<Self, AgentError> {
        if n_layers == 0 {
            return Err(AgentError::InvalidArchitecture("at least one layer required".into()));
        }
        let mut widths = vec![input];
        widths.extend(std::iter::repeat_n(hidden, n_layers - 1));
        widths.push(output);
        Self::new(&widths, rng)
    }

    pub fn from_layers(layers: Vec<Linear>) -> Result<Self, AgentError> {
        if layers.is_empty() || layers.windows(2).any(|w| w[0].n_out != w[1].n_in) {
            return Err(AgentError::InvalidArchitecture("layer widths do not chain".into()));
        }
        for l in &layers {
            if l.weight.len() != l.n_in * l.n_out || l.bias.len() != l.n_out {
                return Err(AgentError::InvalidArchitecture("parameter length mismatch".into()));
            }
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[Linear] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Linear] {
        &mut self.layers
    }

    pub fn input_width(&self) -> usize {
        self.layers[0].n_in
    }

    pub fn output_width(&self) -> usize {
        self.layers[self.layers.len() - 1].n_out
    }

    pub fn n_parameters(&self) -> usize {
        self.layers.iter().map(|l| l.weight.len() + l.bias.len()).sum()
    }

    /// Q-values for one input.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>, AgentError> {
        self.forward_batch(x, 1)
    }

    /// Q-values for a row-major batch of `rows` inputs.
    pub fn forward_batch(&self, x: &[f64], rows: usize) -> Result<Vec<f64>, AgentError> {
        self.check_input(x, rows)?;
        let last = self.layers.len() - 1;
        let mut h = self.layers[0].forward_batch(x, rows);
        for layer in &self.layers[1..] {
            h.iter_mut().for_each(|v| *v = gelu(*v));
            h = layer.forward_batch(&h, rows);
        }
        debug_assert_eq!(h.len(), rows * self.layers[last].n_out);
        Ok(h)
    }

    fn check_input(&self, x: &[f64], rows: usize) -> Result<(), AgentError> {
        if x.len() != rows * self.input_width() {
            return Err(AgentError::WidthMismatch { expected: rows * self.input_width(), got: x.len() });
        }
        Ok(())
    }

    fn forward_tape(&self, x: &[f64], rows: usize) -> Tape {
        let mut inputs = vec![x.to_vec()];
        let mut pre = Vec::with_capacity(self.layers.len() - 1);
        let mut h = self.layers[0].forward_batch(x, rows);
        for layer in &self.layers[1..] {
            let act: Vec<f64> = h.iter().map(|&v| gelu(v)).collect();
            pre.push(h);
            h = layer.forward_batch(&act, rows);
            inputs.push(act);
        }
        Tape { inputs, pre, output: h }
    }

    /// Outputs and parameter gradients of `Σ_rows Σ_j dout[row, j] · out[row, j]`.
    pub fn backward(
        &self,
        x: &[f64],
        rows: usize,
        output_grad: impl FnOnce(&[f64]) -> Vec<f64>,
    ) -> Result<(Vec<f64>, Gradients), AgentError> {
        self.check_input(x, rows)?;
        let tape = self.forward_tape(x, rows);
        let mut delta = output_grad(&tape.output);
        let n = self.layers.len();
        let mut gw = vec![Vec::new(); n];
        let mut gb = vec![Vec::new(); n];
        for li in (0..n).rev() {
            let layer = &self.layers[li];
            let input = &tape.inputs[li];
            let mut dw = vec![0.0; layer.n_out * layer.n_in];
            // SAFETY: dims and strides match the buffers (dW = δᵀ X).
            unsafe {
                matrixmultiply::dgemm(
                    layer.n_out,
                    rows,
                    layer.n_in,
                    1.0,
                    delta.as_ptr(),
                    1,
                    layer.n_out as isize,
                    input.as_ptr(),
                    layer.n_in as isize,
                    1,
                    0.0,
                    dw.as_mut_ptr(),
                    layer.n_in as isize,
                    1,
                );
            }
            let mut db = vec![0.0; layer.n_out];
            for row in delta.chunks_exact(layer.n_out) {
                for (d, v) in db.iter_mut().zip(row) {
                    *d += v;
                }
            }
            gw[li] = dw;
            gb[li] = db;
            if li > 0 {
                let mut dx = vec![0.0; rows * layer.n_in];
                // SAFETY: dims and strides match the buffers (dX = δ W).
                unsafe {
                    matrixmultiply::dgemm(
                        rows,
                        layer.n_out,
                        layer.n_in,
                        1.0,
                        delta.as_ptr(),
                        layer.n_out as isize,
                        1,
                        layer.weight.as_ptr(),
                        layer.n_in as isize,
                        1,
                        0.0,
                        dx.as_mut_ptr(),
                        layer.n_in as isize,
                        1,
                    );
                }
                for (d, &z) in dx.iter_mut().zip(&tape.pre[li - 1]) {
                    *d *= gelu_derivative(z);
                }
                delta = dx;
            }
        }
        Ok((tape.output, Gradients { weight: gw, bias: gb }))
    }

    /// Overwrites every parameter with those of `other`.
    pub fn copy_from(&mut self, other: &QNetwork) {
        assert_eq!(self.layers.len(), other.layers.len());
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            a.weight.copy_from_slice(&b.weight);
            a.bias.copy_from_slice(&b.bias);
        }
    }

    pub fn all_finite(&self) -> bool {
        self.layers.iter().all(|l| l.weight.iter().chain(&l.bias).all(|v| v.is_finite()))
    }
}
