//! Hit-or-miss Monte Carlo area estimation.

use super::{Point, Rect};
use crate::rng::Stream;

/// Unbiased hit-or-miss area estimate of `{p in window : membership(p)}`.
///
/// Returns `(estimate, standard_error)` where the standard error is
/// `window_area * sqrt(p_hat (1 - p_hat) / samples)`.
///
/// Requires `samples >= 1000`.
pub fn mc_area<F: Fn(Point) -> bool>(
    membership: F,
    window: Rect,
    samples: u64,
    seed: u64,
) -> (f64, f64) {
    assert!(samples >= 1000, "mc_area needs at least 1000 samples");
    let mut stream = Stream::new(seed, "mc-area", 0);
    let w = window.max.x - window.min.x;
    let h = window.max.y - window.min.y;
    let mut hits: u64 = 0;
    for _ in 0..samples {
        let p = Point::new(
            window.min.x + stream.uniform(w),
            window.min.y + stream.uniform(h),
        );
        if membership(p) {
            hits += 1;
        }
    }
    let area = window.area();
    let p_hat = hits as f64 / samples as f64;
    (
        area * p_hat,
        area * (p_hat * (1.0 - p_hat) / samples as f64).sqrt(),
    )
}
