use serde::{Deserialize, Serialize};

use super::tensor::Tensor3;
use crate::error::{Error, Result};

/// Reconstruction loss, averaged over every element of the batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Loss {
    #[default]
    Mae,
    Mse,
}

impl Loss {
    pub fn eval(self, pred: &Tensor3, target: &Tensor3) -> Result<(f64, Tensor3)> {
        match self {
            Loss::Mae => loss_mae(pred, target),
            Loss::Mse => loss_mse(pred, target),
        }
    }
}

fn check(pred: &Tensor3, target: &Tensor3) -> Result<()> {
    if pred.shape() != target.shape() {
        return Err(Error::Validation(format!(
            "prediction shape {:?} vs target shape {:?}",
            pred.shape(),
            target.shape()
        )));
    }
    if pred.is_empty() {
        return Err(Error::InsufficientData("empty batch".into()));
    }
    Ok(())
}

/// Mean absolute error; the subgradient at zero residual is 0.
pub fn loss_mae(pred: &Tensor3, target: &Tensor3) -> Result<(f64, Tensor3)> {
    check(pred, target)?;
    let n = pred.data().len() as f64;
    let mut grad = pred.clone();
    let mut total = 0.0;
    for (g, &t) in grad.data_mut().iter_mut().zip(target.data()) {
        let r = *g - t;
        total += r.abs();
        *g = if r > 0.0 {
            1.0 / n
        } else if r < 0.0 {
            -1.0 / n
        } else {
            0.0
        };
    }
    Ok((total / n, grad))
}

pub fn loss_mse(pred: &Tensor3, target: &Tensor3) -> Result<(f64, Tensor3)> {
    check(pred, target)?;
    let n = pred.data().len() as f64;
    let mut grad = pred.clone();
    let mut total = 0.0;
    for (g, &t) in grad.data_mut().iter_mut().zip(target.data()) {
        let r = *g - t;
        total += r * r;
        *g = 2.0 * r / n;
    }
    Ok((total / n, grad))
}
