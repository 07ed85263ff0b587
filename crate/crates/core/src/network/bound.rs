use crate::error::{Error, Result};

/// Hidden width sufficient for a 1-hidden-layer MLP to reach accuracy `eps`.
///
/// `D = ⌈2 r² c_f² s³ / eps²⌉`, or `D = ⌈4 r² c_f² ‖Ω‖² s³ / eps²⌉` when the norm of
/// a reconstruction map is given. `r` is the input radius, `c_f` the Barron constant
/// and `s` the output dimension.
pub fn mlp_width_bound(r: f64, c_f: f64, s: u64, eps: f64, omega_norm: Option<f64>) -> Result<u64> {
    if eps == 0.0 {
        return Err(Error::domain("eps must be non-zero"));
    }
    let positive = |x: f64| x > 0.0 && x.is_finite();
    if !(positive(r) && positive(c_f) && positive(eps) && s > 0 && omega_norm.is_none_or(positive)) {
        return Err(Error::domain("width bound arguments must be positive and finite"));
    }
    let s3 = (s as f64).powi(3);
    let d = match omega_norm {
        None => 2.0 * r * r * c_f * c_f * s3 / (eps * eps),
        Some(w) => 4.0 * r * r * c_f * c_f * w * w * s3 / (eps * eps),
    };
    if d >= u64::MAX as f64 {
        return Err(Error::domain(format!("width bound {d:e} overflows")));
    }
    Ok(d.ceil() as u64)
}
