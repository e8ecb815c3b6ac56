//! L2-regularized logistic regression fitted by damped Newton steps.
//!
//! Objective: mean log loss + (l2 / 2) * |w|^2, intercept unpenalized.
//! Iterates until the gradient norm is at most `tol` or `max_iter` steps.

use serde::{Deserialize, Serialize};

use super::encoding::Matrix;
use super::{log_loss, sigmoid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlmParams {
    pub l2: f64,
    pub tol: f64,
    pub max_iter: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Logistic {
    intercept: f64,
    coef: Vec<f64>,
    iterations: usize,
    grad_norm: f64,
}

impl Logistic {
    pub fn fit(x: &Matrix, y: &[f64], params: &GlmParams) -> Logistic {
        let d = x.cols();
        // theta = [intercept, coef...]
        let mut theta = vec![0.0; d + 1];
        let prior = (y.iter().sum::<f64>() / y.len() as f64).clamp(1e-6, 1.0 - 1e-6);
        theta[0] = (prior / (1.0 - prior)).ln();
        let mut obj = objective(x, y, &theta, params.l2);
        let mut iterations = 0;
        let mut grad_norm = f64::INFINITY;
        while iterations < params.max_iter {
            let (g, h) = gradient_hessian(x, y, &theta, params.l2);
            grad_norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if grad_norm <= params.tol {
                break;
            }
            iterations += 1;
            let dir = solve_spd(h, &g);
            let slope: f64 = g.iter().zip(&dir).map(|(a, b)| a * b).sum();
            let mut t = 1.0;
            let mut moved = false;
            for _ in 0..40 {
                let trial: Vec<f64> = theta.iter().zip(&dir).map(|(a, b)| a - t * b).collect();
                let trial_obj = objective(x, y, &trial, params.l2);
                if trial_obj <= obj - 1e-4 * t * slope {
                    theta = trial;
                    obj = trial_obj;
                    moved = true;
                    break;
                }
                t /= 2.0;
            }
            if !moved {
                break;
            }
        }
        Logistic {
            intercept: theta[0],
            coef: theta[1..].to_vec(),
            iterations,
            grad_norm,
        }
    }

    pub fn margin(&self, x: &[f64]) -> f64 {
        self.intercept + self.coef.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        sigmoid(self.margin(x))
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coef
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn grad_norm(&self) -> f64 {
        self.grad_norm
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }
}

fn margin(x: &Matrix, theta: &[f64], i: usize) -> f64 {
    theta[0]
        + theta[1..]
            .iter()
            .zip(x.row(i))
            .map(|(w, v)| w * v)
            .sum::<f64>()
}

fn objective(x: &Matrix, y: &[f64], theta: &[f64], l2: f64) -> f64 {
    let n = x.rows() as f64;
    let loss: f64 = (0..x.rows())
        .map(|i| log_loss(margin(x, theta, i), y[i]))
        .sum();
    loss / n + 0.5 * l2 * theta[1..].iter().map(|w| w * w).sum::<f64>()
}

fn gradient_hessian(x: &Matrix, y: &[f64], theta: &[f64], l2: f64) -> (Vec<f64>, Vec<Vec<f64>>) {
    let d = theta.len();
    let n = x.rows() as f64;
    let mut g = vec![0.0; d];
    let mut h = vec![vec![0.0; d]; d];
    let mut z = vec![0.0; d];
    z[0] = 1.0;
    for i in 0..x.rows() {
        z[1..].copy_from_slice(x.row(i));
        let p = sigmoid(margin(x, theta, i));
        let r = p - y[i];
        let w = p * (1.0 - p);
        for a in 0..d {
            g[a] += r * z[a];
            let wa = w * z[a];
            if wa != 0.0 {
                for b in a..d {
                    h[a][b] += wa * z[b];
                }
            }
        }
    }
    for a in 0..d {
        g[a] /= n;
        for b in a..d {
            h[a][b] /= n;
            h[b][a] = h[a][b];
        }
        if a > 0 {
            g[a] += l2 * theta[a];
            h[a][a] += l2;
        }
    }
    (g, h)
}

/// Solves `h x = g` for symmetric positive definite `h` by Cholesky, adding
/// diagonal jitter if the factorization breaks down.
fn solve_spd(h: Vec<Vec<f64>>, g: &[f64]) -> Vec<f64> {
    let d = g.len();
    let mut jitter = 0.0;
    loop {
        let mut l = vec![vec![0.0; d]; d];
        let mut ok = true;
        'outer: for i in 0..d {
            for j in 0..=i {
                let mut s = h[i][j] + if i == j { jitter } else { 0.0 };
                for k in 0..j {
                    s -= l[i][k] * l[j][k];
                }
                if i == j {
                    if s <= 0.0 || !s.is_finite() {
                        ok = false;
                        break 'outer;
                    }
                    l[i][i] = s.sqrt();
                } else {
                    l[i][j] = s / l[j][j];
                }
            }
        }
        if ok {
            let mut z = vec![0.0; d];
            for i in 0..d {
                let s: f64 = (0..i).map(|k| l[i][k] * z[k]).sum();
                z[i] = (g[i] - s) / l[i][i];
            }
            let mut x = vec![0.0; d];
            for i in (0..d).rev() {
                let s: f64 = (i + 1..d).map(|k| l[k][i] * x[k]).sum();
                x[i] = (z[i] - s) / l[i][i];
            }
            return x;
        }
        jitter = if jitter == 0.0 { 1e-10 } else { jitter * 10.0 };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_solves_small_system() {
        let h = vec![vec![4.0, 2.0], vec![2.0, 3.0]];
        let x = solve_spd(h, &[2.0, 1.0]);
        assert!((4.0 * x[0] + 2.0 * x[1] - 2.0).abs() < 1e-12);
        assert!((2.0 * x[0] + 3.0 * x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn converges_to_small_gradient() {
        let n = 200;
        let mut data = Vec::new();
        let mut y = Vec::new();
        for i in 0..n {
            let a = ((i * 7919) % 101) as f64 / 50.0 - 1.0;
            let b = ((i * 104729) % 89) as f64 / 44.0 - 1.0;
            data.push(a);
            data.push(b);
            // noisy but non-separable labelling
            y.push(if a + 0.5 * b + ((i % 5) as f64 - 2.0) * 0.4 > 0.0 {
                1.0
            } else {
                0.0
            });
        }
        let x = Matrix::new(n, 2, data);
        let m = Logistic::fit(
            &x,
            &y,
            &GlmParams {
                l2: 1e-4,
                tol: 1e-6,
                max_iter: 500,
            },
        );
        assert!(m.grad_norm() <= 1e-6, "{}", m.grad_norm());
        assert!(m.coefficients()[0] > 0.0 && m.coefficients()[1] > 0.0);
    }
}
