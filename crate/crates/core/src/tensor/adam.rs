use crate::error::{dim, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 0.005,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Moment estimates for a fixed list of parameter arrays.
#[derive(Clone, Debug)]
pub struct AdamState {
    pub config: AdamConfig,
    pub step: u64,
    pub m: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
}

impl AdamState {
    pub fn new(config: AdamConfig, sizes: &[usize]) -> Self {
        Self {
            config,
            step: 0,
            m: sizes.iter().map(|&s| vec![0.0; s]).collect(),
            v: sizes.iter().map(|&s| vec![0.0; s]).collect(),
        }
    }
}

/// One parameter array with its gradient.
pub struct ParamGrad<'a> {
    pub name: &'a str,
    pub value: &'a mut [f64],
    pub grad: &'a [f64],
}

/// Bias-corrected Adam update. Validates every gradient before touching any
/// parameter, so a failed step leaves state and parameters unchanged.
pub fn adam_step(state: &mut AdamState, params: &mut [ParamGrad<'_>]) -> Result<()> {
    if params.len() != state.m.len() {
        return Err(dim(format!(
            "{} parameter arrays for an optimizer tracking {}",
            params.len(),
            state.m.len()
        )));
    }
    for (p, m) in params.iter().zip(&state.m) {
        if p.value.len() != m.len() || p.grad.len() != m.len() {
            return Err(dim(format!(
                "parameter `{}`: value {}, grad {}, state {}",
                p.name,
                p.value.len(),
                p.grad.len(),
                m.len()
            )));
        }
        if p.grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFiniteGradient(p.name.to_string()));
        }
    }
    let AdamConfig { lr, beta1, beta2, eps } = state.config;
    state.step += 1;
    let t = state.step as i32;
    let bc1 = 1.0 - beta1.powi(t);
    let bc2 = 1.0 - beta2.powi(t);
    for ((p, m), v) in params.iter_mut().zip(&mut state.m).zip(&mut state.v) {
        for (((x, &g), m), v) in p.value.iter_mut().zip(p.grad).zip(m.iter_mut()).zip(v.iter_mut()) {
            *m = beta1 * *m + (1.0 - beta1) * g;
            *v = beta2 * *v + (1.0 - beta2) * g * g;
            let m_hat = *m / bc1;
            let v_hat = *v / bc2;
            *x -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
    Ok(())
}
