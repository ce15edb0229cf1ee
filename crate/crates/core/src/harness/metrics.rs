use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numcore::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub mse: f64,
    pub mae: f64,
}

/// Mean squared and mean absolute residual over all entries.
pub fn metrics(yhat: &Matrix, y: &Matrix) -> Result<Metrics> {
    if yhat.shape() != y.shape() {
        return Err(Error::Shape {
            op: "metrics",
            left: yhat.shape(),
            right: y.shape(),
        });
    }
    if y.is_empty() {
        return Err(Error::Data("metrics over an empty set".into()));
    }
    let n = y.len() as f64;
    let (mut sq, mut abs) = (0.0, 0.0);
    for (a, b) in yhat.as_slice().iter().zip(y.as_slice()) {
        let r = a - b;
        sq += r * r;
        abs += r.abs();
    }
    Ok(Metrics {
        mse: sq / n,
        mae: abs / n,
    })
}
