use crate::error::{dim, Error, Result};

/// Largest relative disagreement between `analytic` and the central-difference
/// gradient of `loss` at `params`:
/// `max_k |analytic_k − fd_k| / (|fd_k| + 1e-8)`.
pub fn finite_diff_check<F>(loss: F, params: &[f64], analytic: &[f64], eps: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    if params.len() != analytic.len() {
        return Err(dim(format!(
            "{} parameters but {} gradient entries",
            params.len(),
            analytic.len()
        )));
    }
    let base = loss(params);
    if !base.is_finite() {
        return Err(Error::NonFiniteLoss("at the unperturbed parameters".into()));
    }
    let mut p = params.to_vec();
    let mut worst = 0.0f64;
    for k in 0..p.len() {
        let orig = p[k];
        p[k] = orig + eps;
        let plus = loss(&p);
        p[k] = orig - eps;
        let minus = loss(&p);
        p[k] = orig;
        if !plus.is_finite() || !minus.is_finite() {
            return Err(Error::NonFiniteLoss(format!("perturbing parameter {k}")));
        }
        let fd = (plus - minus) / (2.0 * eps);
        worst = worst.max((analytic[k] - fd).abs() / (fd.abs() + 1e-8));
    }
    Ok(worst)
}
