use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real number type the geometric and photometric math is written against.
///
/// Implemented for `f32` and `f64`. Pixel storage is always `u8`; the scalar
/// only controls the precision of the intermediate arithmetic.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("every f64 literal converts to a float scalar")
    }

    fn from_usize_lossy(v: usize) -> Self;

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("float scalar converts to f64")
    }

    /// Exact conversion of a channel value.
    fn from_byte(v: u8) -> Self;

    /// Truncation toward zero.
    ///
    /// # Safety
    /// `self` must lie in `[0, 2^31)`.
    unsafe fn trunc_index(self) -> usize;

    /// See [`quantize`].
    fn to_byte(self) -> u8;
}

macro_rules! impl_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            #[inline]
            fn from_byte(v: u8) -> Self {
                v as $t
            }

            #[inline]
            fn from_usize_lossy(v: usize) -> Self {
                v as $t
            }

            #[inline]
            unsafe fn trunc_index(self) -> usize {
                debug_assert!((0.0..2147483648.0).contains(&self));
                // SAFETY: the caller guarantees the value fits in i32
                unsafe { self.to_int_unchecked::<i32>() as usize }
            }

            #[inline]
            fn to_byte(self) -> u8 {
                // written as selects so they lower to single min/max
                // instructions; NaN fails the first test and maps to 0
                let v = if self > 0.0 { self } else { 0.0 };
                let v = if v < 255.0 { v } else { 255.0 };
                // For v in [0.5, 255], v + 0.5 is exact or rounds onto the correct
                // integer, so truncating it rounds half away from zero. Below 0.5
                // the sum can round up to 1.0, and the answer is 0 anyway.
                // SAFETY: v + 0.5 lies in [0.5, 255.5], representable as i32.
                let r = unsafe { (v + 0.5).to_int_unchecked::<i32>() } as u8;
                if v < 0.5 {
                    0
                } else {
                    r
                }
            }
        }
    };
}

impl_scalar!(f32);
impl_scalar!(f64);

/// Quantize a real channel value: round half away from zero, clamp to [0, 255].
#[inline]
pub fn quantize<S: Scalar>(v: S) -> u8 {
    v.to_byte()
}

/// Sine and cosine of an angle in degrees, exact at multiples of 90°.
pub fn sin_cos_deg<S: Scalar>(deg: S) -> (S, S) {
    let ninety = S::lit(90.0);
    let quarter = deg / ninety;
    if quarter == quarter.round() && quarter.is_finite() {
        let k = quarter.to_f64_lossy().rem_euclid(4.0) as u8;
        let (s, c) = match k {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        };
        return (S::lit(s), S::lit(c));
    }
    deg.to_radians().sin_cos()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantize_rounds_half_away_and_clamps() {
        assert_eq!(quantize(214.5f64), 215);
        assert_eq!(quantize(127.4f64), 127);
        assert_eq!(quantize(0.5f32), 1);
        assert_eq!(quantize(-0.4f64), 0);
        assert_eq!(quantize(-3.0f64), 0);
        assert_eq!(quantize(300.0f64), 255);
        assert_eq!(quantize(f64::NAN), 0);
    }

    fn reference<S: Scalar>(v: S) -> u8 {
        if v.is_nan() {
            0
        } else {
            v.round().max(S::zero()).min(S::lit(255.0)).to_u8().unwrap()
        }
    }

    #[test]
    fn quantize_matches_rounding_at_every_half_step() {
        for k in -2..=258i32 {
            for base in [k as f64, k as f64 + 0.5] {
                let mut lo = base;
                let mut hi = base;
                for _ in 0..4 {
                    lo = f64::from_bits(lo.to_bits().wrapping_sub(if lo > 0.0 { 1 } else { 0 }));
                    hi = hi.next_up();
                    for v in [lo, hi, base] {
                        assert_eq!(quantize(v), reference(v), "{v:e}");
                        let f = v as f32;
                        for g in [f, f.next_up(), f.next_down()] {
                            assert_eq!(quantize(g), reference(g), "{g:e}");
                        }
                    }
                }
            }
        }
        assert_eq!(quantize(0.5f64.next_down()), 0);
        assert_eq!(quantize(0.5f32.next_down()), 0);
        assert_eq!(quantize(f64::INFINITY), 255);
        assert_eq!(quantize(f32::NEG_INFINITY), 0);
    }

    #[test]
    fn axis_angles_are_exact() {
        assert_eq!(sin_cos_deg(90.0f64), (1.0, 0.0));
        assert_eq!(sin_cos_deg(-90.0f64), (-1.0, 0.0));
        assert_eq!(sin_cos_deg(180.0f32), (0.0, -1.0));
        assert_eq!(sin_cos_deg(450.0f64), (1.0, 0.0));
        let (s, c) = sin_cos_deg(30.0f64);
        assert!((s - 0.5).abs() < 1e-15);
        assert!((c - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }
}
