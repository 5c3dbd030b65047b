//! Scalar abstraction for sample data.
//!
//! Physical parameters (frequencies, delays, dB values) are always `f64`.
//! Sample streams are generic over [`Real`] so the DSP chain can run in
//! either `f32` or `f64`.

use std::fmt::Debug;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rustfft::FftNum;

/// Floating-point sample type: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + FftNum
    + Default
    + Debug
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` parameter.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex sample.
pub type Cplx<T> = Complex<T>;

/// `e^{j theta}` evaluated in `f64` and narrowed to `T`.
#[inline]
pub fn cis<T: Real>(theta: f64) -> Complex<T> {
    Complex::new(T::of(theta.cos()), T::of(theta.sin()))
}

/// Widen a complex sample to `f64`.
#[inline]
pub fn widen<T: Real>(z: Complex<T>) -> Complex<f64> {
    Complex::new(z.re.to_f64_lossy(), z.im.to_f64_lossy())
}

/// Narrow an `f64` complex value to `T`.
#[inline]
pub fn narrow<T: Real>(z: Complex<f64>) -> Complex<T> {
    Complex::new(T::of(z.re), T::of(z.im))
}

/// Mean power `E|z|^2` of a sample slice, accumulated in `f64`.
pub fn mean_power<T: Real>(samples: &[Complex<T>]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().map(|z| widen(*z).norm_sqr()).sum::<f64>() / samples.len() as f64
}

/// Wrap an angle to `(-pi, pi]`.
pub fn wrap_angle(theta: f64) -> f64 {
    use std::f64::consts::PI;
    let mut t = theta % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

pub fn db_to_lin(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn lin_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}
