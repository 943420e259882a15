//! Helpers for information-theoretic space accounting.

/// `ceil(log2(x))` for `x >= 1`, with `bits_for(1) == 0`.
pub fn ceil_log2(x: u64) -> u64 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros() as u64
    }
}

/// Bits needed to store any value in `0..=max`.
pub fn bits_for(max: u64) -> u64 {
    ceil_log2(max.saturating_add(1)).max(1)
}

/// Least-squares fit of `y = c * x` through the origin.
///
/// Returns `(c, r_squared)` where `R^2 = 1 - SS_res / SS_tot` with the usual
/// mean-centered total sum of squares.
pub fn fit_through_origin(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    let c = sxy / sxx;
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - c * a).powi(2)).sum();
    let ss_tot: f64 = y.iter().map(|b| (b - mean).powi(2)).sum();
    (c, 1.0 - ss_res / ss_tot)
}
