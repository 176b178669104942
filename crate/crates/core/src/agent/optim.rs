use super::network::{Gradients, QNetwork};

/// Adam with decoupled weight decay.
///
/// Per parameter: `p ← p(1 − lr·wd)`, then the bias-corrected Adam step.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamW {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub weight_decay: f64,
    step: u64,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl AdamW {
    pub fn new(net: &QNetwork, learning_rate: f64, beta1: f64, beta2: f64, epsilon: f64, weight_decay: f64) -> Self {
        let shapes = param_lengths(net);
        Self {
            learning_rate,
            beta1,
            beta2,
            epsilon,
            weight_decay,
            step: 0,
            m: shapes.iter().map(|&n| vec![0.0; n]).collect(),
            v: shapes.iter().map(|&n| vec![0.0; n]).collect(),
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// First and second moments, one buffer per parameter tensor
    /// (weight then bias, layer by layer).
    pub fn moments(&self) -> (&[Vec<f64>], &[Vec<f64>]) {
        (&self.m, &self.v)
    }

    pub(crate) fn restore(&mut self, step: u64, m: Vec<Vec<f64>>, v: Vec<Vec<f64>>) {
        self.step = step;
        self.m = m;
        self.v = v;
    }

    pub fn update(&mut self, net: &mut QNetwork, grads: &Gradients) {
        self.step += 1;
        let t = self.step as i32;
        let bc1 = 1.0 - self.beta1.powi(t);
        let bc2 = 1.0 - self.beta2.powi(t);
        let decay = 1.0 - self.learning_rate * self.weight_decay;
        let mut slot = 0;
        for (li, layer) in net.layers_mut().iter_mut().enumerate() {
            for (params, g) in [(&mut layer.weight, &grads.weight[li]), (&mut layer.bias, &grads.bias[li])] {
                let (m, v) = (&mut self.m[slot], &mut self.v[slot]);
                for i in 0..params.len() {
                    params[i] *= decay;
                    m[i] = self.beta1 * m[i] + (1.0 - self.beta1) * g[i];
                    v[i] = self.beta2 * v[i] + (1.0 - self.beta2) * g[i] * g[i];
                    let m_hat = m[i] / bc1;
                    let v_hat = v[i] / bc2;
                    params[i] -= self.learning_rate * m_hat / (v_hat.sqrt() + self.epsilon);
                }
                slot += 1;
            }
        }
    }
}

pub(crate) fn param_lengths(net: &QNetwork) -> Vec<usize> {
    net.layers().iter().flat_map(|l| [l.weight.len(), l.bias.len()]).collect()
}
