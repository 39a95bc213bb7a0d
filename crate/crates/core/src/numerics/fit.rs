use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub rate: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least-squares line through `(xs, log_values)`.
pub fn fit_exponent(xs: &[f64], log_values: &[f64]) -> Result<LineFit> {
    if xs.len() != log_values.len() {
        return Err(Error::invalid("xs and log_values differ in length"));
    }
    if xs.len() < 3 {
        return Err(Error::invalid(format!("need at least 3 samples, got {}", xs.len())));
    }
    if xs.iter().chain(log_values).any(|v| !v.is_finite()) {
        return Err(Error::invalid("samples must be finite"));
    }
    if xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("xs must be strictly increasing"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = log_values.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(log_values) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let rate = sxy / sxx;
    let intercept = my - rate * mx;
    let r_squared = if syy <= 1e-300 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok(LineFit {
        rate,
        intercept,
        r_squared,
    })
}
