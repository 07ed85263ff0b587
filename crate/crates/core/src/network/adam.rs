use super::{Gradients, Seq2SeqModel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamHyper {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamHyper {
    pub fn with_lr(lr: f64) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

impl Default for AdamHyper {
    fn default() -> Self {
        Self::with_lr(1e-3)
    }
}

/// First and second moments per parameter slot, plus the step counter.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AdamState {
    pub step: u64,
    moments: Vec<(Vec<f64>, Vec<f64>)>,
}

impl AdamState {
    pub fn new() -> Self {
        Self::default()
    }
}

/// A parameter buffer with its gradient.
#[derive(Debug)]
pub struct ParamSlot<'a> {
    pub name: &'a str,
    pub value: &'a mut [f64],
    pub grad: &'a [f64],
}

/// One bias-corrected Adam update over all slots. A non-finite gradient aborts
/// before anything is modified.
pub fn adam_step(slots: &mut [ParamSlot<'_>], state: &mut AdamState, hyper: &AdamHyper) -> Result<()> {
    for s in slots.iter() {
        if s.value.len() != s.grad.len() {
            return Err(Error::Shape {
                op: "adam: parameter vs gradient",
                left: (s.value.len(), 1),
                right: (s.grad.len(), 1),
            });
        }
        if let Some(i) = s.grad.iter().position(|g| !g.is_finite()) {
            return Err(Error::NonFiniteGradient(format!("{}[{i}] = {}", s.name, s.grad[i])));
        }
    }
    if state.moments.is_empty() {
        state.moments = slots.iter().map(|s| (vec![0.0; s.grad.len()], vec![0.0; s.grad.len()])).collect();
    }
    if state.moments.len() != slots.len() || state.moments.iter().zip(slots.iter()).any(|(m, s)| m.0.len() != s.grad.len()) {
        return Err(Error::domain("adam state does not match the parameter layout"));
    }
    state.step += 1;
    let t = state.step as i32;
    let c1 = 1.0 - hyper.beta1.powi(t);
    let c2 = 1.0 - hyper.beta2.powi(t);
    for (s, (m, v)) in slots.iter_mut().zip(&mut state.moments) {
        for (((p, &g), m), v) in s.value.iter_mut().zip(s.grad).zip(m.iter_mut()).zip(v.iter_mut()) {
            *m = hyper.beta1 * *m + (1.0 - hyper.beta1) * g;
            *v = hyper.beta2 * *v + (1.0 - hyper.beta2) * g * g;
            *p -= hyper.lr * (*m / c1) / ((*v / c2).sqrt() + hyper.eps);
        }
    }
    Ok(())
}

/// Adam update of the trainable blocks of `model`.
pub fn apply_adam(model: &mut Seq2SeqModel, grads: &Gradients, state: &mut AdamState, hyper: &AdamHyper) -> Result<()> {
    let mut slots: Vec<ParamSlot<'_>> = model
        .params_mut()
        .into_iter()
        .zip(&grads.blocks)
        .filter(|((_, _, trainable), _)| *trainable)
        .map(|((name, value, _), (_, grad))| ParamSlot { name, value, grad })
        .collect();
    adam_step(&mut slots, state, hyper)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(p: &mut [f64], g: &[f64], st: &mut AdamState, lr: f64) -> Result<()> {
        adam_step(&mut [ParamSlot { name: "p", value: p, grad: g }], st, &AdamHyper::with_lr(lr))
    }

    #[test]
    fn zero_gradient_is_a_no_op() {
        let mut p = vec![1.0, -2.0];
        step(&mut p, &[0.0, 0.0], &mut AdamState::new(), 0.1).unwrap();
        assert_eq!(p, vec![1.0, -2.0]);
    }

    #[test]
    fn first_step_moves_by_lr() {
        let mut p = vec![0.0, 0.0, 0.0];
        step(&mut p, &[3.0, -0.5, 1e-3], &mut AdamState::new(), 0.01).unwrap();
        // m̂ = g, v̂ = g², so the step is lr · g / (|g| + eps).
        for (x, g) in p.iter().zip([3.0, -0.5, 1e-3_f64]) {
            assert!((x + 0.01 * g / (g.abs() + 1e-8)).abs() < 1e-15);
        }
    }

    #[test]
    fn quadratic_bowl_descends() {
        // f(p) = (p − 3)², gradient 2(p − 3).
        let mut p = vec![0.0];
        let mut st = AdamState::new();
        let mut losses = Vec::new();
        for _ in 0..100 {
            let g = [2.0 * (p[0] - 3.0)];
            step(&mut p, &g, &mut st, 0.05).unwrap();
            losses.push((p[0] - 3.0_f64).powi(2));
        }
        assert!(losses.windows(2).skip(5).all(|w| w[1] <= w[0]));
        assert!(losses[99] < losses[0] * 1e-1);
    }

    #[test]
    fn non_finite_gradient_names_parameter() {
        let mut p = vec![1.0, 2.0];
        let mut st = AdamState::new();
        let err = adam_step(
            &mut [ParamSlot { name: "head.w", value: &mut p, grad: &[0.1, f64::NAN] }],
            &mut st,
            &AdamHyper::default(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("head.w[1]"), "{err}");
        assert_eq!(p, vec![1.0, 2.0]);
        assert_eq!(st.step, 0);
    }

    #[test]
    fn deterministic() {
        let run = || {
            let mut p = vec![0.3, -0.7];
            let mut st = AdamState::new();
            for k in 0..10 {
                let g = [p[0] * k as f64, p[1].sin()];
                step(&mut p, &g, &mut st, 0.01).unwrap();
            }
            p
        };
        assert_eq!(run(), run());
    }
}
