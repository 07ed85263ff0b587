use super::forward::{backward, forward, mse, predict};
use super::{Head, Seq2SeqModel};
use crate::error::Result;
use crate::numerics::RMatrix;

/// Gradient magnitudes below this are compared in absolute rather than relative terms.
pub const GRAD_CHECK_FLOOR: f64 = 1e-6;

/// Worst relative error between analytic gradients and central differences with
/// step `fd_step`, over every trainable parameter.
///
/// Per entry the error is `|g − ĝ| / max(|g|, |ĝ|, GRAD_CHECK_FLOOR)`.
pub fn grad_check(model: &Seq2SeqModel, v: &RMatrix, target: &RMatrix, fd_step: f64) -> Result<f64> {
    let (_, cache) = forward(model, v)?;
    let (_, grads) = backward(model, Some(&cache), target)?;
    let mut probe = model.clone();
    let mut worst: f64 = 0.0;
    for (bi, (_, analytic)) in grads.blocks.iter().enumerate() {
        if !model.params()[bi].trainable {
            continue;
        }
        for (j, &g) in analytic.iter().enumerate() {
            let orig = probe.params_mut()[bi].1[j];
            probe.params_mut()[bi].1[j] = orig + fd_step;
            let plus = mse(&predict(&probe, v)?, target)?;
            probe.params_mut()[bi].1[j] = orig - fd_step;
            let minus = mse(&predict(&probe, v)?, target)?;
            probe.params_mut()[bi].1[j] = orig;
            let numeric = (plus - minus) / (2.0 * fd_step);
            let denom = g.abs().max(numeric.abs()).max(GRAD_CHECK_FLOOR);
            worst = worst.max((g - numeric).abs() / denom);
        }
    }
    Ok(worst)
}

/// Shifts MLP first-layer biases so that no pre-activation on `v` lies within
/// `margin` of zero, keeping finite differences inside one linear piece of ReLU.
///
/// Each unit's bias moves by the smallest amount that puts zero at the middle of
/// a gap of width at least `2·margin` between its sorted pre-activations.
pub fn avoid_relu_kinks(model: &mut Seq2SeqModel, v: &RMatrix, margin: f64) -> Result<()> {
    let (_, cache) = forward(model, v)?;
    let Head::Mlp(mlp) = &mut model.head else {
        return Ok(());
    };
    let d = mlp.w1.rows();
    let t = cache.output().cols();
    let pre = cache.pre_activations();
    for unit in 0..d {
        let mut z: Vec<f64> = pre[unit * t..(unit + 1) * t].to_vec();
        if z.iter().all(|x| x.abs() >= margin) {
            continue;
        }
        z.sort_by(f64::total_cmp);
        // Candidate kink positions: below all values, between neighbours, above all values.
        let mut candidates = vec![z[0] - margin, z[z.len() - 1] + margin];
        for w in z.windows(2) {
            if w[1] - w[0] >= 2.0 * margin {
                candidates.push(0.5 * (w[0] + w[1]));
            }
        }
        let c = candidates.into_iter().min_by(|a, b| a.abs().total_cmp(&b.abs())).expect("non-empty");
        mlp.b1[unit] -= c;
    }
    Ok(())
}
