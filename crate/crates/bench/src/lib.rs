//! Shared fixtures for the criterion benchmarks.

use triodflow::geometry::{DiscreteCurve, Vec2};
use triodflow::junction::Triod;

/// Perturbed unit triod with `n` nodes per curve.
pub fn bent_triod(n: usize) -> Triod {
    let up = Vec2::new(0.0, 1.0);
    let dirs = [
        up,
        up.rotated(2.0 * std::f64::consts::PI / 3.0),
        up.rotated(4.0 * std::f64::consts::PI / 3.0),
    ];
    let curves = dirs.map(|d| {
        DiscreteCurve::from_fn(n, |x| {
            let bump = 0.05 * (std::f64::consts::PI * x).sin().powi(2);
            d * x + d.perp() * bump
        })
        .unwrap()
    });
    Triod::new(curves).unwrap()
}
