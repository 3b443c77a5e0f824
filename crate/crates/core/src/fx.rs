//! Scalar float math shim: `std` intrinsics when available, `libm` otherwise.

#![allow(clippy::needless_return)]

macro_rules! shim1 {
    ($name:ident) => {
        #[inline(always)]
        pub fn $name(x: f64) -> f64 {
            #[cfg(feature = "std")]
            {
                return x.$name();
            }
            #[cfg(not(feature = "std"))]
            {
                return libm::$name(x);
            }
        }
    };
}

shim1!(sqrt);
shim1!(exp);
shim1!(sin);
shim1!(cos);
shim1!(floor);
shim1!(ceil);
shim1!(round);

#[inline(always)]
pub fn ln(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        return x.ln();
    }
    #[cfg(not(feature = "std"))]
    {
        return libm::log(x);
    }
}

#[inline(always)]
pub fn abs(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        return x.abs();
    }
    #[cfg(not(feature = "std"))]
    {
        return libm::fabs(x);
    }
}

#[inline(always)]
pub fn powf(x: f64, y: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        return x.powf(y);
    }
    #[cfg(not(feature = "std"))]
    {
        return libm::pow(x, y);
    }
}

#[inline(always)]
pub fn atan2(y: f64, x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        return y.atan2(x);
    }
    #[cfg(not(feature = "std"))]
    {
        return libm::atan2(y, x);
    }
}

#[inline(always)]
pub fn hypot(x: f64, y: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        return x.hypot(y);
    }
    #[cfg(not(feature = "std"))]
    {
        return libm::hypot(x, y);
    }
}

#[inline(always)]
pub fn log2(x: f64) -> f64 {
    ln(x) / core::f64::consts::LN_2
}
