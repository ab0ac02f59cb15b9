//! Adam with bias correction over a flat parameter vector.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig { learning_rate: 1e-3, beta1: 0.9, beta2: 0.999, epsilon: 1e-8 }
    }
}

/// First and second moment accumulators plus the step counter.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    step: i32,
}

impl AdamState {
    pub fn new(len: usize) -> Self {
        AdamState { m: vec![0.0; len], v: vec![0.0; len], step: 0 }
    }

    pub fn step(&self) -> i32 {
        self.step
    }
}

/// Updates `params` in place. `params` yields exactly `grads.len()` items.
pub fn adam_step<'a, I>(params: I, grads: &[f64], state: &mut AdamState, cfg: &AdamConfig)
where
    I: IntoIterator<Item = &'a mut f64>,
{
    assert_eq!(grads.len(), state.m.len(), "gradient length differs from optimizer state");
    state.step += 1;
    let bc1 = 1.0 - cfg.beta1.powi(state.step);
    let bc2 = 1.0 - cfg.beta2.powi(state.step);

    let mut count = 0;
    for (((p, &g), m), v) in params.into_iter().zip(grads).zip(state.m.iter_mut()).zip(state.v.iter_mut()) {
        *m = cfg.beta1 * *m + (1.0 - cfg.beta1) * g;
        *v = cfg.beta2 * *v + (1.0 - cfg.beta2) * g * g;
        let m_hat = *m / bc1;
        let v_hat = *v / bc2;
        *p -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon);
        count += 1;
    }
    assert_eq!(count, grads.len(), "parameter count differs from gradient length");
}
