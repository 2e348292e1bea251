use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub r: f64,
    /// Two-sided p-value of the t-test with n - 2 degrees of freedom.
    pub p: f64,
    pub n: usize,
}

/// Sample Pearson correlation with its two-sided p-value.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<Correlation> {
    if x.len() != y.len() {
        return Err(Error::ShapeMismatch(format!(
            "pearson inputs have lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::InvalidConfig(format!(
            "pearson needs at least 3 points, got {n}"
        )));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Numerical("pearson input is not finite".into()));
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        let which = if sxx == 0.0 { "x" } else { "y" };
        return Err(Error::ZeroVariance(format!("pearson input {which} is constant")));
    }
    // One square root of the product keeps exact linear relations at |r| = 1;
    // the split form is the fallback when the product leaves the f64 range.
    let prod = sxx * syy;
    let denom = if prod.is_finite() && prod > 0.0 {
        prod.sqrt()
    } else {
        sxx.sqrt() * syy.sqrt()
    };
    let r = (sxy / denom).clamp(-1.0, 1.0);
    Ok(Correlation {
        r,
        p: p_value(r, n),
        n,
    })
}

/// Two-sided p-value for a sample correlation `r` over `n` points.
pub fn p_value(r: f64, n: usize) -> f64 {
    let df = (n - 2) as f64;
    let r2 = r * r;
    if r2 >= 1.0 {
        return 0.0;
    }
    // P(|T| > t) = I_{df/(df+t²)}(df/2, 1/2) with t² = df·r²/(1-r²),
    // and df/(df+t²) simplifies to 1 - r².
    beta_reg(df / 2.0, 0.5, 1.0 - r2).clamp(0.0, 1.0)
}
