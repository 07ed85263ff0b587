//! Forward pass and reverse-mode gradients of the MSE loss.
//!
//! Complex adjoints use the real-pair convention `G = ∂L/∂Re z + i ∂L/∂Im z`, under
//! which `y = λx` gives `G_x = conj(λ) G_y`.

use super::gemm::gemm;
use super::{Gradients, Head, Readout, Seq2SeqModel};
use crate::error::{Error, Result};
use crate::numerics::RMatrix;

/// Intermediates kept by [`forward`] for [`backward`].
#[derive(Debug, Clone)]
pub struct ForwardCache {
    v: RMatrix,
    /// H × L encoder outputs.
    u: Vec<f64>,
    /// N × L, `B u_k` before scaling by `γ`.
    q_re: Vec<f64>,
    q_im: Vec<f64>,
    /// N × L hidden states.
    x_re: Vec<f64>,
    x_im: Vec<f64>,
    /// I × T head inputs (`T = L` per-step, 1 last-state).
    head_in: Vec<f64>,
    /// D × T pre-activations and activations (MLP only).
    pre: Vec<f64>,
    act: Vec<f64>,
    yhat: RMatrix,
}

impl ForwardCache {
    pub fn output(&self) -> &RMatrix {
        &self.yhat
    }

    /// MLP pre-activations, D × T (empty for a linear head).
    pub fn pre_activations(&self) -> &[f64] {
        &self.pre
    }
}

fn add_bias_rows(out: &mut [f64], bias: &[f64], cols: usize) {
    for (row, &b) in out.chunks_mut(cols).zip(bias) {
        row.iter_mut().for_each(|x| *x += b);
    }
}

/// Runs the model on `v` (M × L) and returns the output (S × L or S × 1) with a cache.
pub fn forward(model: &Seq2SeqModel, v: &RMatrix) -> Result<(RMatrix, ForwardCache)> {
    let m = model.input_dim();
    if v.rows() != m || v.cols() == 0 {
        return Err(Error::Shape {
            op: "forward: input",
            left: v.shape(),
            right: (m, v.cols().max(1)),
        });
    }
    let l = v.cols();
    let h = model.embed_dim();
    let n = model.state_dim();
    let i_dim = model.feature_dim();
    let rec = &model.recurrence;

    let mut u = vec![0.0; h * l];
    gemm(h, m, l, model.encoder.w.as_slice(), false, v.as_slice(), false, 0.0, &mut u);
    add_bias_rows(&mut u, &model.encoder.bias, l);

    let mut q_re = vec![0.0; n * l];
    let mut q_im = vec![0.0; n * l];
    gemm(n, h, l, rec.b_real.as_slice(), false, &u, false, 0.0, &mut q_re);
    gemm(n, h, l, rec.b_imag.as_slice(), false, &u, false, 0.0, &mut q_im);

    let lambda = rec.eigenvalues();
    let mut x_re = vec![0.0; n * l];
    let mut x_im = vec![0.0; n * l];
    for c in 0..n {
        let (lr, li) = (lambda[c].re, lambda[c].im);
        let g = rec.gamma[c];
        let (mut ar, mut ai) = (0.0, 0.0);
        let row = c * l..(c + 1) * l;
        for ((((xr, xi), &qr), &qi), _) in x_re[row.clone()]
            .iter_mut()
            .zip(&mut x_im[row.clone()])
            .zip(&q_re[row.clone()])
            .zip(&q_im[row.clone()])
            .zip(0..l)
        {
            let nr = lr * ar - li * ai + g * qr;
            let ni = lr * ai + li * ar + g * qi;
            ar = nr;
            ai = ni;
            *xr = ar;
            *xi = ai;
        }
    }

    let t = match model.readout {
        Readout::PerStep => l,
        Readout::LastState => 1,
    };
    let first = l - t;
    let mut head_in = vec![0.0; i_dim * t];
    for c in 0..n {
        head_in[c * t..(c + 1) * t].copy_from_slice(&x_re[c * l + first..(c + 1) * l]);
    }
    let mut next = n;
    if !model.state_view.drop_imaginary {
        for c in 0..n {
            head_in[(n + c) * t..(n + c + 1) * t].copy_from_slice(&x_im[c * l + first..(c + 1) * l]);
        }
        next += n;
    }
    if model.state_view.time_channel {
        for (j, x) in head_in[next * t..(next + 1) * t].iter_mut().enumerate() {
            *x = (first + j + 1) as f64;
        }
    }

    let s = model.output_dim();
    let mut y = vec![0.0; s * t];
    let (mut pre, mut act) = (Vec::new(), Vec::new());
    match &model.head {
        Head::Linear(lin) => {
            gemm(s, i_dim, t, lin.w.as_slice(), false, &head_in, false, 0.0, &mut y);
            add_bias_rows(&mut y, &lin.b, t);
        }
        Head::Mlp(mlp) => {
            let d = mlp.w1.rows();
            pre = vec![0.0; d * t];
            gemm(d, i_dim, t, mlp.w1.as_slice(), false, &head_in, false, 0.0, &mut pre);
            add_bias_rows(&mut pre, &mlp.b1, t);
            act = pre.iter().map(|&z| mlp.activation.apply(z)).collect();
            gemm(s, d, t, mlp.w2.as_slice(), false, &act, false, 0.0, &mut y);
            add_bias_rows(&mut y, &mlp.b2, t);
        }
    }
    let yhat = RMatrix::new(s, t, y)?;
    let cache = ForwardCache {
        v: v.clone(),
        u,
        q_re,
        q_im,
        x_re,
        x_im,
        head_in,
        pre,
        act,
        yhat: yhat.clone(),
    };
    Ok((yhat, cache))
}

/// Output only.
pub fn predict(model: &Seq2SeqModel, v: &RMatrix) -> Result<RMatrix> {
    forward(model, v).map(|(y, _)| y)
}

/// Mean squared error over all entries.
pub fn mse(yhat: &RMatrix, target: &RMatrix) -> Result<f64> {
    if yhat.shape() != target.shape() {
        return Err(Error::Shape {
            op: "mse",
            left: yhat.shape(),
            right: target.shape(),
        });
    }
    let n = yhat.as_slice().len().max(1) as f64;
    Ok(yhat
        .as_slice()
        .iter()
        .zip(target.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / n)
}

/// Loss and gradients of `mse(forward(v), target)` for every parameter block,
/// trainable or not.
pub fn backward(model: &Seq2SeqModel, cache: Option<&ForwardCache>, target: &RMatrix) -> Result<(f64, Gradients)> {
    let cache = cache.ok_or(Error::MissingCache)?;
    let loss = mse(&cache.yhat, target)?;
    let (s, t) = cache.yhat.shape();
    let (m, l) = cache.v.shape();
    let h = model.embed_dim();
    let n = model.state_dim();
    let i_dim = model.feature_dim();
    if cache.u.len() != h * l || cache.head_in.len() != i_dim * t {
        return Err(Error::domain("forward cache does not belong to this model"));
    }
    let rec = &model.recurrence;
    let scale = 2.0 / (s * t) as f64;
    let dy: Vec<f64> = cache
        .yhat
        .as_slice()
        .iter()
        .zip(target.as_slice())
        .map(|(a, b)| scale * (a - b))
        .collect();

    let mut grads = model.zero_gradients();
    let mut d_in = vec![0.0; i_dim * t];
    match &model.head {
        Head::Linear(lin) => {
            let (gw, gb) = head_slots(&mut grads, "head.w", "head.b");
            gemm(s, t, i_dim, &dy, false, &cache.head_in, true, 0.0, gw);
            row_sums(&dy, t, gb);
            gemm(i_dim, s, t, lin.w.as_slice(), true, &dy, false, 0.0, &mut d_in);
        }
        Head::Mlp(mlp) => {
            let d = mlp.w1.rows();
            {
                let (gw2, gb2) = head_slots(&mut grads, "head.w2", "head.b2");
                gemm(s, t, d, &dy, false, &cache.act, true, 0.0, gw2);
                row_sums(&dy, t, gb2);
            }
            let mut dz = vec![0.0; d * t];
            gemm(d, s, t, mlp.w2.as_slice(), true, &dy, false, 0.0, &mut dz);
            for ((g, &z), &a) in dz.iter_mut().zip(&cache.pre).zip(&cache.act) {
                *g *= mlp.activation.derivative(z, a);
            }
            let (gw1, gb1) = head_slots(&mut grads, "head.w1", "head.b1");
            gemm(d, t, i_dim, &dz, false, &cache.head_in, true, 0.0, gw1);
            row_sums(&dz, t, gb1);
            gemm(i_dim, d, t, mlp.w1.as_slice(), true, &dz, false, 0.0, &mut d_in);
        }
    }

    // Adjoint recursion a_k = g_k + conj(λ) a_{k+1}, fused with the λ, γ and B-input terms.
    let first = l - t;
    let lambda = rec.eigenvalues();
    let mut gq_re = vec![0.0; n * l];
    let mut gq_im = vec![0.0; n * l];
    let mut g_nu = vec![0.0; n];
    let mut g_theta = vec![0.0; n];
    let mut g_gamma = vec![0.0; n];
    for c in 0..n {
        let (lr, li) = (lambda[c].re, lambda[c].im);
        let gam = rec.gamma[c];
        let (mut ar, mut ai) = (0.0, 0.0);
        let (mut glr, mut gli) = (0.0, 0.0);
        let mut gg = 0.0;
        let base = c * l;
        for k in (0..l).rev() {
            let (cr, ci) = (lr * ar + li * ai, lr * ai - li * ar);
            ar = cr;
            ai = ci;
            if k >= first {
                let j = k - first;
                ar += d_in[c * t + j];
                if !model.state_view.drop_imaginary {
                    ai += d_in[(n + c) * t + j];
                }
            }
            if k > 0 {
                // conj(x_{k-1}) · a_k
                let (xr, xi) = (cache.x_re[base + k - 1], cache.x_im[base + k - 1]);
                glr += xr * ar + xi * ai;
                gli += xr * ai - xi * ar;
            }
            let (qr, qi) = (cache.q_re[base + k], cache.q_im[base + k]);
            gg += qr * ar + qi * ai;
            gq_re[base + k] = gam * ar;
            gq_im[base + k] = gam * ai;
        }
        // dλ/dν = −e^ν λ, dλ/dθ = iλ; dL/dp = Re(conj(dλ/dp) · G_λ).
        let (cr, ci) = (lr * glr + li * gli, lr * gli - li * glr);
        g_nu[c] = -rec.log_log_magnitude[c].exp() * cr;
        g_theta[c] = ci;
        g_gamma[c] = gg;
    }
    set_block(&mut grads, "recurrence.log_log_magnitude", g_nu);
    set_block(&mut grads, "recurrence.phase", g_theta);
    set_block(&mut grads, "recurrence.gamma", g_gamma);
    gemm(n, l, h, &gq_re, false, &cache.u, true, 0.0, block_mut(&mut grads, "recurrence.b_real"));
    gemm(n, l, h, &gq_im, false, &cache.u, true, 0.0, block_mut(&mut grads, "recurrence.b_imag"));

    let mut du = vec![0.0; h * l];
    gemm(h, n, l, rec.b_real.as_slice(), true, &gq_re, false, 0.0, &mut du);
    gemm(h, n, l, rec.b_imag.as_slice(), true, &gq_im, false, 1.0, &mut du);
    gemm(h, l, m, &du, false, cache.v.as_slice(), true, 0.0, block_mut(&mut grads, "encoder.w"));
    row_sums(&du, l, block_mut(&mut grads, "encoder.bias"));
    Ok((loss, grads))
}

fn row_sums(a: &[f64], cols: usize, out: &mut [f64]) {
    for (o, row) in out.iter_mut().zip(a.chunks(cols)) {
        *o = row.iter().sum();
    }
}

fn block_mut<'a>(g: &'a mut Gradients, name: &str) -> &'a mut [f64] {
    g.blocks
        .iter_mut()
        .find(|(n, _)| *n == name)
        .map(|(_, v)| v.as_mut_slice())
        .expect("gradient block exists")
}

fn head_slots<'a>(g: &'a mut Gradients, w: &str, b: &str) -> (&'a mut [f64], &'a mut [f64]) {
    let mut wi = None;
    let mut bi = None;
    for (name, v) in g.blocks.iter_mut() {
        if *name == w {
            wi = Some(v.as_mut_slice());
        } else if *name == b {
            bi = Some(v.as_mut_slice());
        }
    }
    (wi.expect("weight block"), bi.expect("bias block"))
}

fn set_block(g: &mut Gradients, name: &str, values: Vec<f64>) {
    block_mut(g, name).copy_from_slice(&values);
}
