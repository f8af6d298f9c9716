//! Central finite differences on momentum space.

use std::ops::{Add, Mul, Sub};

use crate::algebra::Axis;
use crate::error::Result;
use crate::linalg::Vec3;

/// Relative step of the five-point stencil: `h = STEP_FRACTION · ℓ` for a
/// local length scale `ℓ`.
pub const STEP_FRACTION: f64 = 1e-3;

/// Fourth-order five-point central derivative of `f` along `axis` at `p`.
pub fn derivative<T, F>(f: F, p: &Vec3, axis: Axis, h: f64) -> Result<T>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
    F: Fn(&Vec3) -> Result<T>,
{
    let at = |k: f64| {
        let mut q = *p;
        q[axis.index()] += k * h;
        f(&q)
    };
    let (p1, m1, p2, m2) = (at(1.0)?, at(-1.0)?, at(2.0)?, at(-2.0)?);
    Ok(((p1 - m1) * 8.0 - (p2 - m2)) * (1.0 / (12.0 * h)))
}

/// Step for a function varying on the scale `ℓ`.
pub fn step(length_scale: f64) -> f64 {
    STEP_FRACTION * length_scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_quartic() {
        let f = |p: &Vec3| Ok(p[0].powi(4) - 3.0 * p[0] * p[1]);
        let d = derivative(f, &[0.7, 2.0, 0.0], Axis::X, 0.1).unwrap();
        assert!((d - (4.0 * 0.7f64.powi(3) - 6.0)).abs() < 1e-12);
    }

    #[test]
    fn fourth_order_convergence() {
        let f = |p: &Vec3| Ok(p[2].sin());
        let err = |h: f64| (derivative(f, &[0.0, 0.0, 0.4], Axis::Z, h).unwrap() - 0.4f64.cos()).abs();
        let ratio = err(0.1) / err(0.05);
        assert!((ratio - 16.0).abs() < 1.0, "ratio {ratio}");
    }
}
