//! Scalar abstraction for the geometry and kinematics core.
//!
//! The numerical core (rigid transforms, SDF queries, kinematics, spline
//! smoothing) is generic over the floating-point type. The pipeline layers
//! (scene generation, datasets, file formats) fix [`Real`](crate::Real) = `f64`
//! so that serialized artifacts are reproducible bit-for-bit.

use rand::distr::uniform::SampleUniform;

/// Floating-point scalar usable by the geometry core: `f32` or `f64`.
pub trait Scalar:
    nalgebra::RealField
    + Copy
    + Default
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + SampleUniform
    + Send
    + Sync
{
    /// Lossy conversion from `f64`, for constants baked into algorithms.
    fn from_config(value: f64) -> Self {
        Self::from_f64(value).expect("finite f64 converts to any Scalar")
    }

    /// Lossy conversion to `f64`, for reporting and serialization.
    fn to_config(self) -> f64 {
        self.to_f64().expect("Scalar converts to f64")
    }
}

impl<T> Scalar for T where
    T: nalgebra::RealField
        + Copy
        + Default
        + num_traits::FromPrimitive
        + num_traits::ToPrimitive
        + SampleUniform
        + Send
        + Sync
{
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip<S: Scalar>(x: f64) -> f64 {
        S::from_config(x).to_config()
    }

    #[test]
    fn conversions_hold_for_both_widths() {
        assert_eq!(roundtrip::<f64>(0.125), 0.125);
        assert_eq!(roundtrip::<f32>(0.125), 0.125);
    }
}
