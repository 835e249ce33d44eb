use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{ColumnScale, ScalingInfo};

/// Anything that maps a regressor vector to a scalar prediction.
///
/// NARX simulation is generic over this so that closed-form maps can stand
/// in for a trained network.
pub trait StepModel {
    fn input_width(&self) -> usize;
    fn predict(&self, x: &[f64]) -> f64;
}

impl<F: Fn(&[f64]) -> f64> StepModel for (usize, F) {
    fn input_width(&self) -> usize {
        self.0
    }

    fn predict(&self, x: &[f64]) -> f64 {
        (self.1)(x)
    }
}

/// Network with one tanh hidden layer and a linear scalar output:
/// `y = W2 · tanh(W1 · scale(x) + b1) + b2`, then de-scaled.
///
/// Flat parameter order (used by Jacobians and the optimizers):
/// `w1` row-major (`n_hidden x n_in`), `b1`, `w2`, `b2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub n_in: usize,
    pub n_hidden: usize,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
    pub input_scaling: ScalingInfo,
    pub output_scaling: ColumnScale,
}

impl MlpModel {
    pub fn zeros(n_in: usize, n_hidden: usize) -> Self {
        MlpModel {
            n_in,
            n_hidden,
            w1: vec![0.0; n_hidden * n_in],
            b1: vec![0.0; n_hidden],
            w2: vec![0.0; n_hidden],
            b2: 0.0,
            input_scaling: ScalingInfo::identity(n_in),
            output_scaling: ColumnScale::IDENTITY,
        }
    }

    /// Uniform weights in `±1/sqrt(fan_in)` per layer.
    pub fn random<R: Rng + ?Sized>(n_in: usize, n_hidden: usize, rng: &mut R) -> Self {
        let mut m = Self::zeros(n_in, n_hidden);
        let a1 = 1.0 / (n_in as f64).sqrt();
        let a2 = 1.0 / (n_hidden as f64).sqrt();
        m.w1.iter_mut().chain(m.b1.iter_mut()).for_each(|w| *w = rng.random_range(-a1..=a1));
        m.w2.iter_mut().for_each(|w| *w = rng.random_range(-a2..=a2));
        m.b2 = rng.random_range(-a2..=a2);
        m
    }

    pub fn layer_sizes(&self) -> [usize; 3] {
        [self.n_in, self.n_hidden, 1]
    }

    pub fn n_params(&self) -> usize {
        self.n_hidden * (self.n_in + 2) + 1
    }

    pub fn params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.n_params());
        p.extend_from_slice(&self.w1);
        p.extend_from_slice(&self.b1);
        p.extend_from_slice(&self.w2);
        p.push(self.b2);
        p
    }

    pub fn set_params(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.n_params(), "parameter vector length");
        let (h, n) = (self.n_hidden, self.n_in);
        self.w1.copy_from_slice(&p[..h * n]);
        self.b1.copy_from_slice(&p[h * n..h * n + h]);
        self.w2.copy_from_slice(&p[h * n + h..h * n + 2 * h]);
        self.b2 = p[h * n + 2 * h];
    }

    pub fn with_params(&self, p: &[f64]) -> Self {
        let mut m = self.clone();
        m.set_params(p);
        m
    }

    /// Index of `w1[hidden][input]` in the flat parameter vector.
    pub fn w1_index(&self, hidden: usize, input: usize) -> usize {
        hidden * self.n_in + input
    }

    pub fn validate(&self) -> Result<()> {
        let (h, n) = (self.n_hidden, self.n_in);
        let ok = self.w1.len() == h * n
            && self.b1.len() == h
            && self.w2.len() == h
            && self.input_scaling.width() == n;
        if !ok {
            return Err(Error::Format(format!(
                "inconsistent layer dimensions for a {n}-{h}-1 network"
            )));
        }
        if !self.params().iter().all(|v| v.is_finite()) {
            return Err(Error::Format("non-finite network parameter".into()));
        }
        Ok(())
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_in {
            return Err(Error::Dimension {
                expected: self.n_in,
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        self.check(x)?;
        Ok(self.eval(x))
    }

    /// Unchecked forward pass.
    pub(crate) fn eval(&self, x: &[f64]) -> f64 {
        let mut xs = [0.0; 16];
        let xs: &mut [f64] = if self.n_in <= 16 {
            &mut xs[..self.n_in]
        } else {
            return self.eval_alloc(x);
        };
        self.input_scaling.apply_into(x, xs);
        let mut o = self.b2;
        for k in 0..self.n_hidden {
            let row = &self.w1[k * self.n_in..(k + 1) * self.n_in];
            let z = self.b1[k] + row.iter().zip(xs.iter()).map(|(w, v)| w * v).sum::<f64>();
            o += self.w2[k] * z.tanh();
        }
        self.output_scaling.invert(o)
    }

    fn eval_alloc(&self, x: &[f64]) -> f64 {
        let xs = self.input_scaling.apply(x);
        let mut o = self.b2;
        for k in 0..self.n_hidden {
            let row = &self.w1[k * self.n_in..(k + 1) * self.n_in];
            let z = self.b1[k] + row.iter().zip(&xs).map(|(w, v)| w * v).sum::<f64>();
            o += self.w2[k] * z.tanh();
        }
        self.output_scaling.invert(o)
    }

    /// Gradient of the de-scaled output with respect to all parameters.
    pub fn jacobian(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check(x)?;
        let mut g = vec![0.0; self.n_params()];
        self.eval_grad(x, &mut g, None);
        Ok(g)
    }

    /// Forward pass that also writes `d y / d params` into `dparams` and,
    /// when requested, `d y / d x` into `dinput`. Returns `y`.
    pub(crate) fn eval_grad(&self, x: &[f64], dparams: &mut [f64], mut dinput: Option<&mut [f64]>) -> f64 {
        let (h, n) = (self.n_hidden, self.n_in);
        let xs = self.input_scaling.apply(x);
        let gain = self.output_scaling.half_range;
        if let Some(d) = dinput.as_deref_mut() {
            d.iter_mut().for_each(|v| *v = 0.0);
        }
        let mut o = self.b2;
        for k in 0..h {
            let row = &self.w1[k * n..(k + 1) * n];
            let z = self.b1[k] + row.iter().zip(&xs).map(|(w, v)| w * v).sum::<f64>();
            let a = z.tanh();
            o += self.w2[k] * a;
            let delta = gain * self.w2[k] * (1.0 - a * a);
            for j in 0..n {
                dparams[k * n + j] = delta * xs[j];
            }
            dparams[h * n + k] = delta;
            dparams[h * n + h + k] = gain * a;
            if let Some(d) = dinput.as_deref_mut() {
                for j in 0..n {
                    d[j] += delta * row[j] / self.input_scaling.columns[j].half_range;
                }
            }
        }
        dparams[h * n + 2 * h] = gain;
        self.output_scaling.invert(o)
    }
}

impl StepModel for MlpModel {
    fn input_width(&self) -> usize {
        self.n_in
    }

    fn predict(&self, x: &[f64]) -> f64 {
        self.eval(x)
    }
}
