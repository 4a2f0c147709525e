//! Stochastic activity durations.

use super::Mode;
use rand::Rng;

/// Samples a realized duration for `mode`: triangular on
/// [optimistic, pessimistic] with the peak at the expected duration, rounded
/// to the nearest integer and clamped to the range.
pub fn sample_duration<R: Rng + ?Sized>(mode: &Mode, rng: &mut R) -> u32 {
    let (a, c, b) = (
        mode.optimistic as f64,
        mode.expected as f64,
        mode.pessimistic as f64,
    );
    if mode.optimistic == mode.pessimistic {
        return mode.expected;
    }
    let u: f64 = rng.gen();
    let peak_cdf = (c - a) / (b - a);
    let x = if u < peak_cdf {
        a + (u * (b - a) * (c - a)).sqrt()
    } else {
        b - ((1.0 - u) * (b - a) * (b - c)).sqrt()
    };
    (x.round() as u32).clamp(mode.optimistic, mode.pessimistic)
}
