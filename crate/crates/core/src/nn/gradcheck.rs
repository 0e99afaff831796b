//! Central finite-difference verification of [`backward`](super::backward).

use std::ops::Range;

use super::loss::Loss;
use super::net::{backward_with_input, forward_layers, NetParams, NetSpec};
use super::tensor::Tensor3;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheck {
    /// `||analytic - numeric|| / (||analytic|| + ||numeric||)` over parameters.
    pub param_rel_error: f64,
    /// The same ratio over input gradients.
    pub input_rel_error: f64,
}

impl GradCheck {
    pub fn max_rel_error(&self) -> f64 {
        self.param_rel_error.max(self.input_rel_error)
    }
}

/// Relative error between two gradient vectors; 0 when both vanish.
pub fn relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    let diff = analytic
        .iter()
        .zip(numeric)
        .map(|(a, n)| (a - n).powi(2))
        .sum::<f64>()
        .sqrt();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let denom = norm(analytic) + norm(numeric);
    if denom < 1e-300 {
        0.0
    } else {
        diff / denom
    }
}

/// Checks layers `range` under the scalar objective `sum(probe * output)`.
pub fn check_layers(
    spec: &NetSpec,
    params: &NetParams,
    input: &Tensor3,
    probe: &Tensor3,
    range: Range<usize>,
    h: f64,
) -> Result<GradCheck> {
    let objective = |p: &NetParams, x: &Tensor3| -> Result<f64> {
        let (y, _) = forward_layers(spec, p, x, range.clone())?;
        Ok(y.data().iter().zip(probe.data()).map(|(a, b)| a * b).sum())
    };

    let (_, cache) = forward_layers(spec, params, input, range.clone())?;
    let (g_params, g_input) = backward_with_input(spec, params, &cache, probe)?;

    let mut p = params.clone();
    let mut numeric = vec![0.0; p.param_count()];
    for i in 0..p.param_count() {
        let w = p.weights[i];
        p.weights[i] = w + h;
        let up = objective(&p, input)?;
        p.weights[i] = w - h;
        let down = objective(&p, input)?;
        p.weights[i] = w;
        numeric[i] = (up - down) / (2.0 * h);
    }

    let mut x = input.clone();
    let mut numeric_x = vec![0.0; x.data().len()];
    for i in 0..numeric_x.len() {
        let v = x.data()[i];
        x.data_mut()[i] = v + h;
        let up = objective(params, &x)?;
        x.data_mut()[i] = v - h;
        let down = objective(params, &x)?;
        x.data_mut()[i] = v;
        numeric_x[i] = (up - down) / (2.0 * h);
    }

    Ok(GradCheck {
        param_rel_error: relative_error(&g_params, &numeric),
        input_rel_error: relative_error(g_input.data(), &numeric_x),
    })
}

/// Checks a loss gradient with respect to the prediction.
pub fn check_loss(loss: Loss, pred: &Tensor3, target: &Tensor3, h: f64) -> Result<f64> {
    let (_, analytic) = loss.eval(pred, target)?;
    let mut p = pred.clone();
    let mut numeric = vec![0.0; p.data().len()];
    for i in 0..numeric.len() {
        let v = p.data()[i];
        p.data_mut()[i] = v + h;
        let up = loss.eval(&p, target)?.0;
        p.data_mut()[i] = v - h;
        let down = loss.eval(&p, target)?.0;
        p.data_mut()[i] = v;
        numeric[i] = (up - down) / (2.0 * h);
    }
    Ok(relative_error(analytic.data(), &numeric))
}
