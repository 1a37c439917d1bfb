//! Difference quotients on index vectors `F = (F_1, ..., F_N)`.
//!
//! Entries outside `1..=N` are read as zero. With `N = F.len()`:
//!
//! * `D+_k F = N (F_{k+1} - F_k)` for `k = 0..=N`,
//! * `D-_k F = N (F_k - F_{k-1})` for `k = 1..=N+1`,
//! * `Δ_k F = N² (F_{k+1} + F_{k-1} - 2 F_k)` for `k = 0..=N+1`.

#[inline]
fn padded(f: &[f64], k: usize) -> f64 {
    // k is 1-based; 0 and N+1 are the zero padding.
    if k == 0 || k > f.len() {
        0.0
    } else {
        f[k - 1]
    }
}

/// Forward difference `D+_k F` for `k = 0..=N`, returned as a vector of length `N + 1`.
pub fn forward_diff(f: &[f64]) -> Vec<f64> {
    let n = f.len() as f64;
    (0..=f.len())
        .map(|k| n * (padded(f, k + 1) - padded(f, k)))
        .collect()
}

/// Backward difference `D-_k F` for `k = 1..=N+1`; entry `j` of the result is `D-_{j+1} F`.
pub fn backward_diff(f: &[f64]) -> Vec<f64> {
    let n = f.len() as f64;
    (1..=f.len() + 1)
        .map(|k| n * (padded(f, k) - padded(f, k - 1)))
        .collect()
}

/// Discrete Laplacian `Δ_k F` over the full index range `k = 0..=N+1` (length `N + 2`).
///
/// Entry `0` is `N² F_1` and entry `N+1` is `N² F_N`; the interior entries are
/// the usual three-point stencil.
pub fn discrete_laplacian(f: &[f64]) -> Vec<f64> {
    let n2 = (f.len() as f64).powi(2);
    (0..f.len() + 2)
        .map(|k| {
            let right = padded(f, k + 1);
            let left = if k == 0 { 0.0 } else { padded(f, k - 1) };
            n2 * (right + left - 2.0 * padded(f, k))
        })
        .collect()
}

/// Interior part of the Laplacian, `Δ_k F` for `k = 1..=N` only.
pub(crate) fn laplacian_interior(f: &[f64]) -> Vec<f64> {
    let n2 = (f.len() as f64).powi(2);
    (1..=f.len())
        .map(|k| n2 * (padded(f, k + 1) + padded(f, k - 1) - 2.0 * f[k - 1]))
        .collect()
}
