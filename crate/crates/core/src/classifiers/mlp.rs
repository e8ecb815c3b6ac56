//! One-hidden-layer perceptron: tanh hidden units, logistic output,
//! cross-entropy loss, seeded mini-batch gradient descent.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::encoding::Matrix;
use super::{log_loss, sigmoid};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlpParams {
    pub hidden: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// Initial weights are uniform in `[-init_scale, init_scale]`.
    pub init_scale: f64,
}

/// Parameters flatten as `[w1 (hidden x inputs, row-major), b1, w2, b2]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    inputs: usize,
    hidden: usize,
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: f64,
}

impl Mlp {
    pub fn zeros(inputs: usize, hidden: usize) -> Mlp {
        Mlp {
            inputs,
            hidden,
            w1: vec![0.0; inputs * hidden],
            b1: vec![0.0; hidden],
            w2: vec![0.0; hidden],
            b2: 0.0,
        }
    }

    pub fn random<R: Rng>(inputs: usize, hidden: usize, scale: f64, rng: &mut R) -> Mlp {
        let mut m = Mlp::zeros(inputs, hidden);
        let params: Vec<f64> = (0..m.n_params())
            .map(|_| rng.random_range(-scale..=scale))
            .collect();
        m.set_params(&params);
        m
    }

    pub fn n_params(&self) -> usize {
        self.hidden * (self.inputs + 2) + 1
    }

    pub fn params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.n_params());
        p.extend(&self.w1);
        p.extend(&self.b1);
        p.extend(&self.w2);
        p.push(self.b2);
        p
    }

    pub fn set_params(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.n_params(), "parameter length mismatch");
        let (w1, rest) = p.split_at(self.inputs * self.hidden);
        let (b1, rest) = rest.split_at(self.hidden);
        let (w2, rest) = rest.split_at(self.hidden);
        self.w1.copy_from_slice(w1);
        self.b1.copy_from_slice(b1);
        self.w2.copy_from_slice(w2);
        self.b2 = rest[0];
    }

    fn hidden_layer(&self, x: &[f64], out: &mut [f64]) {
        for (h, a) in out.iter_mut().enumerate() {
            let w = &self.w1[h * self.inputs..(h + 1) * self.inputs];
            *a = (self.b1[h] + w.iter().zip(x).map(|(w, x)| w * x).sum::<f64>()).tanh();
        }
    }

    pub fn margin(&self, x: &[f64]) -> f64 {
        let mut a = vec![0.0; self.hidden];
        self.hidden_layer(x, &mut a);
        self.b2 + self.w2.iter().zip(&a).map(|(w, a)| w * a).sum::<f64>()
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        sigmoid(self.margin(x))
    }

    /// Mean cross-entropy over `rows` and its gradient in flattened layout.
    pub fn loss_and_gradient(&self, x: &Matrix, y: &[f64], rows: &[usize]) -> (f64, Vec<f64>) {
        let mut grad = vec![0.0; self.n_params()];
        let (gw1, rest) = grad.split_at_mut(self.inputs * self.hidden);
        let (gb1, rest) = rest.split_at_mut(self.hidden);
        let (gw2, gb2) = rest.split_at_mut(self.hidden);
        let mut a = vec![0.0; self.hidden];
        let mut loss = 0.0;
        for &i in rows {
            let xi = x.row(i);
            self.hidden_layer(xi, &mut a);
            let z = self.b2 + self.w2.iter().zip(&a).map(|(w, a)| w * a).sum::<f64>();
            loss += log_loss(z, y[i]);
            let dz = sigmoid(z) - y[i];
            gb2[0] += dz;
            for h in 0..self.hidden {
                gw2[h] += dz * a[h];
                let dpre = dz * self.w2[h] * (1.0 - a[h] * a[h]);
                gb1[h] += dpre;
                let row = &mut gw1[h * self.inputs..(h + 1) * self.inputs];
                for (g, xv) in row.iter_mut().zip(xi) {
                    *g += dpre * xv;
                }
            }
        }
        let n = rows.len() as f64;
        grad.iter_mut().for_each(|g| *g /= n);
        (loss / n, grad)
    }

    pub fn loss(&self, x: &Matrix, y: &[f64], rows: &[usize]) -> f64 {
        rows.iter()
            .map(|&i| log_loss(self.margin(x.row(i)), y[i]))
            .sum::<f64>()
            / rows.len() as f64
    }

    pub fn fit(x: &Matrix, y: &[f64], params: &MlpParams, seed: u64) -> Mlp {
        let mut init_rng = seed::stage_rng(seed, "mlp_init", 0);
        let mut net = Mlp::random(x.cols(), params.hidden, params.init_scale, &mut init_rng);
        let mut order: Vec<usize> = (0..x.rows()).collect();
        let mut p = net.params();
        for epoch in 0..params.epochs {
            order.shuffle(&mut seed::stage_rng(seed, "mlp_epoch", epoch as u64));
            for batch in order.chunks(params.batch_size.max(1)) {
                let (_, g) = net.loss_and_gradient(x, y, batch);
                for (w, g) in p.iter_mut().zip(&g) {
                    *w -= params.learning_rate * g;
                }
                net.set_params(&p);
            }
        }
        net
    }
}

/// Max relative error between the analytic gradient and central differences
/// over all parameters of `net` on the full `x`.
pub fn gradient_check(net: &Mlp, x: &Matrix, y: &[f64], epsilon: f64) -> f64 {
    let rows: Vec<usize> = (0..x.rows()).collect();
    let (_, analytic) = net.loss_and_gradient(x, y, &rows);
    let base = net.params();
    let mut probe = net.clone();
    let mut worst: f64 = 0.0;
    for j in 0..base.len() {
        let mut p = base.clone();
        p[j] = base[j] + epsilon;
        probe.set_params(&p);
        let up = probe.loss(x, y, &rows);
        p[j] = base[j] - epsilon;
        probe.set_params(&p);
        let down = probe.loss(x, y, &rows);
        let numeric = (up - down) / (2.0 * epsilon);
        let denom = analytic[j].abs().max(numeric.abs()).max(1e-6);
        worst = worst.max((analytic[j] - numeric).abs() / denom);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn output_bias_gradient_at_zero_weights() {
        let x = Matrix::zeros(8, 3);
        let y = [1.0, 1.0, 1.0, 0.0, 1.0, 0.0, 1.0, 1.0];
        let net = Mlp::zeros(3, 4);
        let rows: Vec<usize> = (0..8).collect();
        let (_, g) = net.loss_and_gradient(&x, &y, &rows);
        let mean_y = 6.0 / 8.0;
        assert_eq!(*g.last().unwrap(), 0.5 - mean_y);
        // every other gradient vanishes with zero inputs and zero weights
        assert!(g[..g.len() - 1].iter().all(|&v| v == 0.0));

        let eps = 1e-5;
        let mut p = net.params();
        let last = p.len() - 1;
        let mut probe = net.clone();
        p[last] = eps;
        probe.set_params(&p);
        let up = probe.loss(&x, &y, &rows);
        p[last] = -eps;
        probe.set_params(&p);
        let down = probe.loss(&x, &y, &rows);
        let numeric = (up - down) / (2.0 * eps);
        assert!((numeric - (0.5 - mean_y)).abs() < 1e-9, "{numeric}");
    }

    #[test]
    fn params_round_trip() {
        let mut rng = seed::rng(3);
        let net = Mlp::random(5, 3, 0.1, &mut rng);
        let mut other = Mlp::zeros(5, 3);
        other.set_params(&net.params());
        assert_eq!(other, net);
        assert_eq!(net.n_params(), 3 * 7 + 1);
    }
}
