//! Temperature-scaled softmax, cross-entropy and its gradient.

use crate::error::{Error, Result};

/// Clamp applied to probabilities before taking the log.
pub const LOG_CLAMP: f64 = 1e-12;

/// Scales each row of a row-major `rows × cols` matrix to unit L2 norm.
pub fn normalize_rows(m: &[f64], cols: usize) -> Result<Vec<f64>> {
    if cols == 0 || !m.len().is_multiple_of(cols) {
        return Err(Error::ShapeMismatch(format!(
            "{} values do not form rows of width {cols}",
            m.len()
        )));
    }
    let mut out = m.to_vec();
    for (row, chunk) in out.chunks_exact_mut(cols).enumerate() {
        let norm = chunk.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroRow { row });
        }
        chunk.iter_mut().for_each(|v| *v /= norm);
    }
    Ok(out)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("alpha must be > 0, got {alpha}")))
    }
}

/// `p_c = exp(α z_c) / Σ_j exp(α z_j)`, evaluated with max subtraction.
pub fn softmax_temp(z: &[f64], alpha: f64) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    let mut out = vec![0.0; z.len()];
    softmax_into(z, alpha, &mut out);
    Ok(out)
}

/// Allocation-free softmax used by the training loop. `alpha` must be valid.
pub(crate) fn softmax_into(z: &[f64], alpha: f64, out: &mut [f64]) {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for (o, &v) in out.iter_mut().zip(z) {
        *o = (alpha * (v - max)).exp();
        sum += *o;
    }
    out.iter_mut().for_each(|o| *o /= sum);
}

/// Cross-entropy against a one-hot target: `-ln p[y]`.
pub fn ce_loss(p: &[f64], y: usize) -> Result<f64> {
    let py = p.get(y).ok_or(Error::LabelOutOfRange {
        label: y,
        classes: p.len(),
    })?;
    Ok(-py.max(LOG_CLAMP).ln())
}

/// Cross-entropy divided by the (non-differentiated) constant `alpha`.
pub fn rescaled_ce_loss(p: &[f64], y: usize, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(ce_loss(p, y)? / alpha)
}

/// Gradient of the (optionally rescaled) loss w.r.t. the weights.
///
/// Returns a `d × C` matrix stored column by column (`out[c * d + k]`).
/// Column `c` is `(p_c - q_c) x` for the rescaled loss and `α (p_c - q_c) x`
/// for the plain one.
pub fn grad_weights(x: &[f64], p: &[f64], y: usize, alpha: f64, rescaled: bool) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    let c = p.len();
    if y >= c {
        return Err(Error::LabelOutOfRange { label: y, classes: c });
    }
    let d = x.len();
    let mut g = vec![0.0; d * c];
    accumulate_grad(x, p, y, 1.0, &mut g);
    if !rescaled {
        g.iter_mut().for_each(|v| *v *= alpha);
    }
    Ok(g)
}

/// Adds `weight · (p - q) x^T` into a column-major `d × C` buffer.
pub(crate) fn accumulate_grad(x: &[f64], p: &[f64], y: usize, weight: f64, g: &mut [f64]) {
    let d = x.len();
    // p_y - 1 written as the negated mass of the other classes: `p_y - 1.0`
    // cancels to 0 once p_y rounds to 1, losing the whole column.
    let rest: f64 = p.iter().enumerate().filter(|&(c, _)| c != y).map(|(_, &v)| v).sum();
    for (c, (&pc, col)) in p.iter().zip(g.chunks_exact_mut(d)).enumerate() {
        let s = weight * if c == y { -rest } else { pc };
        if s == 0.0 {
            continue;
        }
        for (gk, &xk) in col.iter_mut().zip(x) {
            *gk += s * xk;
        }
    }
}

/// Mean gradient over a batch of unit rows (`xs` row-major, width `d`).
pub fn batch_grad_weights(
    xs: &[f64],
    d: usize,
    probs: &[f64],
    ys: &[usize],
    alpha: f64,
    rescaled: bool,
) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    let b = ys.len();
    if b == 0 || xs.len() != b * d || !probs.len().is_multiple_of(b) {
        return Err(Error::ShapeMismatch("batch gradient inputs disagree".into()));
    }
    let c = probs.len() / b;
    let mut g = vec![0.0; d * c];
    let w = 1.0 / b as f64;
    for ((x, p), &y) in xs.chunks_exact(d).zip(probs.chunks_exact(c)).zip(ys) {
        if y >= c {
            return Err(Error::LabelOutOfRange { label: y, classes: c });
        }
        accumulate_grad(x, p, y, w, &mut g);
    }
    if !rescaled {
        g.iter_mut().for_each(|v| *v *= alpha);
    }
    Ok(g)
}

pub(crate) fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}
