/// Sigmoid step `r/(1 + e^{-2x/s_l}) − r/2`, evaluated in the equivalent
/// form `(r/2)·tanh(x/s_l)`, which is exactly odd and does not overflow.
/// Panics unless `s_l > 0`.
#[inline]
pub fn sigmoid_step(x: f64, s_l: f64, r: f64) -> f64 {
    assert!(s_l > 0.0, "sigmoid slope must be positive");
    0.5 * r * (x / s_l).tanh()
}
