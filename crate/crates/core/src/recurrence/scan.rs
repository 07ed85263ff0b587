//! Associative scan for scalar linear recurrences.
//!
//! An element `(a, w)` stands for the affine map `x ↦ a·x + w`. Composition
//! "first 1 then 2" is `(a₁, w₁) ∘ (a₂, w₂) = (a₁a₂, a₂w₁ + w₂)`, which is associative,
//! so inclusive prefixes can be evaluated with a balanced tree.

use num_complex::Complex64;

pub type ScanElement = (Complex64, Complex64);

const IDENTITY: ScanElement = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));

#[inline]
pub fn combine(first: ScanElement, second: ScanElement) -> ScanElement {
    (first.0 * second.0, second.0 * first.1 + second.1)
}

/// Inclusive prefix scan of `x_k = λ x_{k-1} + w_k` with `x_0 = 0`.
///
/// Up-sweep then down-sweep over a power-of-two padded buffer.
pub fn prefix_scan_channel(lambda: Complex64, w: &[Complex64]) -> Vec<Complex64> {
    let len = w.len();
    if len == 0 {
        return Vec::new();
    }
    let n = len.next_power_of_two();
    let mut elems: Vec<ScanElement> = w.iter().map(|&wk| (lambda, wk)).collect();
    elems.resize(n, IDENTITY);
    let original = elems.clone();

    let mut stride = 1;
    while stride < n {
        let step = 2 * stride;
        let mut k = 0;
        while k < n {
            let left = k + stride - 1;
            let right = k + step - 1;
            elems[right] = combine(elems[left], elems[right]);
            k += step;
        }
        stride = step;
    }

    // Down-sweep yields the exclusive prefix at every position.
    elems[n - 1] = IDENTITY;
    let mut stride = n / 2;
    while stride >= 1 {
        let step = 2 * stride;
        let mut k = 0;
        while k < n {
            let left = k + stride - 1;
            let right = k + step - 1;
            let left_total = elems[left];
            elems[left] = elems[right];
            elems[right] = combine(elems[right], left_total);
            k += step;
        }
        stride /= 2;
    }

    elems
        .iter()
        .zip(&original)
        .take(len)
        .map(|(&prefix, &own)| combine(prefix, own).1)
        .collect()
}
