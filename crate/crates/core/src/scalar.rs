//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn of(x: f64) -> Self;

    fn of_usize(n: usize) -> Self {
        Self::of(n as f64)
    }

    fn to_f64_lossy(self) -> f64;
}

impl Scalar for f32 {
    #[inline]
    fn of(x: f64) -> Self {
        x as f32
    }
    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    #[inline]
    fn of(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self
    }
}

/// Volume of the unit sphere `S^k ⊂ R^{k+1}`.
pub fn sphere_volume<T: Scalar>(k: usize) -> T {
    // σ(0) = 2, σ(1) = 2π, σ(k) = 2π/(k-1) σ(k-2)
    let mut even = 2.0_f64;
    let mut odd = 2.0 * std::f64::consts::PI;
    if k == 0 {
        return T::of(even);
    }
    if k == 1 {
        return T::of(odd);
    }
    for j in 2..=k {
        let next = 2.0 * std::f64::consts::PI / (j as f64 - 1.0);
        if j % 2 == 0 {
            even *= next;
        } else {
            odd *= next;
        }
    }
    T::of(if k.is_multiple_of(2) { even } else { odd })
}

pub fn factorial<T: Scalar>(n: usize) -> T {
    T::of((1..=n).map(|k| k as f64).product::<f64>())
}

/// `C_N = π^{N-1}/(N-1)!`, the ratio between the energy infimum on `CP^N` and the line area.
pub fn line_constant<T: Scalar>(n: usize) -> T {
    assert!(n >= 1);
    T::PI().powi(n as i32 - 1) / factorial::<T>(n - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_volumes() {
        assert!((sphere_volume::<f64>(1) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_volume::<f64>(2) - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_volume::<f64>(3) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_volume::<f64>(4) - 8.0 * PI * PI / 3.0).abs() < 1e-12);
        assert!((sphere_volume::<f64>(5) - PI.powi(3)).abs() < 1e-12);
    }

    #[test]
    fn line_constants() {
        assert_eq!(line_constant::<f64>(1), 1.0);
        assert!((line_constant::<f64>(2) - PI).abs() < 1e-15);
        assert!((line_constant::<f64>(3) - PI * PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn f32_lane() {
        assert!((sphere_volume::<f32>(2) - 4.0 * std::f32::consts::PI).abs() < 1e-5);
    }
}
