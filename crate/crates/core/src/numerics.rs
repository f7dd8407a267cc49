//! Signed fixed-point scalars and complex samples.
//!
//! Every value carries its [`FxFormat`]; arithmetic between mismatched formats is
//! rejected. Rounding is round-half-to-even and overflow always saturates.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A signed two's-complement `Q(int_bits.frac_bits)` format.
///
/// `int_bits` includes the sign bit, so `Q1.15` is the classic 16-bit Q15 format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FxFormat {
    pub int_bits: u32,
    pub frac_bits: u32,
}

impl FxFormat {
    /// Default sample format, Q2.15, which holds every value in `[-2, 2)` and
    /// therefore represents unit impulses exactly.
    pub const SAMPLE_DEFAULT: FxFormat = FxFormat {
        int_bits: 2,
        frac_bits: 15,
    };

    pub const Q1_15: FxFormat = FxFormat {
        int_bits: 1,
        frac_bits: 15,
    };

    pub fn new(int_bits: u32, frac_bits: u32) -> Result<Self> {
        if int_bits < 1 || frac_bits < 1 || int_bits + frac_bits > 64 {
            return Err(Error::InvalidFormat {
                int_bits,
                frac_bits,
            });
        }
        Ok(FxFormat {
            int_bits,
            frac_bits,
        })
    }

    /// Register format of an `n`-point folded processor fed with `sample` data.
    ///
    /// Adds `log2(n)` integer bits. A butterfly at most doubles the magnitude of
    /// its operands, so no stage can overflow while both input components stay
    /// within half of the sample range (`|re|, |im| <= 1` for Q2.f).
    pub fn internal_for(n: usize, sample: FxFormat) -> Result<Self> {
        let stages = crate::log2_exact(n)?;
        FxFormat::new(sample.int_bits + stages, sample.frac_bits)
    }

    pub fn total_bits(self) -> u32 {
        self.int_bits + self.frac_bits
    }

    pub fn max_raw(self) -> i64 {
        if self.total_bits() == 64 {
            i64::MAX
        } else {
            (1i64 << (self.total_bits() - 1)) - 1
        }
    }

    pub fn min_raw(self) -> i64 {
        if self.total_bits() == 64 {
            i64::MIN
        } else {
            -(1i64 << (self.total_bits() - 1))
        }
    }

    /// Value of one least-significant bit.
    pub fn ulp(self) -> f64 {
        (-(self.frac_bits as f64)).exp2()
    }

    pub fn is_valid(self) -> bool {
        FxFormat::new(self.int_bits, self.frac_bits).is_ok()
    }

    fn saturate(self, raw: i128) -> i64 {
        raw.clamp(self.min_raw() as i128, self.max_raw() as i128) as i64
    }
}

impl fmt::Display for FxFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q{}.{}", self.int_bits, self.frac_bits)
    }
}

/// Shift `value` right by `shift` bits, rounding half to even.
pub(crate) fn round_shift(value: i128, shift: u32) -> i128 {
    if shift == 0 {
        return value;
    }
    let floor = value >> shift;
    let rem = value - (floor << shift);
    let half = 1i128 << (shift - 1);
    if rem > half || (rem == half && floor & 1 == 1) {
        floor + 1
    } else {
        floor
    }
}

/// A fixed-point scalar: `raw * 2^-frac_bits`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fx {
    raw: i64,
    format: FxFormat,
}

impl Fx {
    /// Nearest representable value, ties to even mantissa, saturating outside the range.
    /// NaN quantizes to zero.
    pub fn quantize(value: f64, format: FxFormat) -> Fx {
        let scaled = value * (format.frac_bits as f64).exp2();
        let raw = if scaled.is_nan() {
            0
        } else if scaled >= format.max_raw() as f64 {
            format.max_raw()
        } else if scaled <= format.min_raw() as f64 {
            format.min_raw()
        } else {
            scaled.round_ties_even() as i64
        };
        Fx { raw, format }
    }

    /// Builds a value from a mantissa, saturating it into the format's range.
    pub fn from_raw(raw: i64, format: FxFormat) -> Fx {
        Fx {
            raw: format.saturate(raw as i128),
            format,
        }
    }

    pub fn zero(format: FxFormat) -> Fx {
        Fx { raw: 0, format }
    }

    pub fn raw(self) -> i64 {
        self.raw
    }

    pub fn format(self) -> FxFormat {
        self.format
    }

    pub fn to_f64(self) -> f64 {
        self.raw as f64 * self.format.ulp()
    }

    /// Re-expresses the value in another format (exact when widening).
    pub fn convert(self, target: FxFormat) -> Fx {
        let raw = self.raw as i128;
        let shifted = if target.frac_bits >= self.format.frac_bits {
            raw << (target.frac_bits - self.format.frac_bits)
        } else {
            round_shift(raw, self.format.frac_bits - target.frac_bits)
        };
        Fx {
            raw: target.saturate(shifted),
            format: target,
        }
    }

    pub fn try_add(self, rhs: Fx) -> Result<Fx> {
        check_formats(self.format, rhs.format)?;
        Ok(self.add_unchecked(rhs))
    }

    pub fn try_sub(self, rhs: Fx) -> Result<Fx> {
        check_formats(self.format, rhs.format)?;
        Ok(self.sub_unchecked(rhs))
    }

    /// Full-precision product rounded back to `frac_bits`, then saturated.
    pub fn try_mul(self, rhs: Fx) -> Result<Fx> {
        check_formats(self.format, rhs.format)?;
        Ok(self.mul_unchecked(rhs))
    }

    pub(crate) fn add_unchecked(self, rhs: Fx) -> Fx {
        Fx {
            raw: self.format.saturate(self.raw as i128 + rhs.raw as i128),
            format: self.format,
        }
    }

    pub(crate) fn sub_unchecked(self, rhs: Fx) -> Fx {
        Fx {
            raw: self.format.saturate(self.raw as i128 - rhs.raw as i128),
            format: self.format,
        }
    }

    pub(crate) fn mul_unchecked(self, rhs: Fx) -> Fx {
        let product = self.raw as i128 * rhs.raw as i128;
        Fx {
            raw: self
                .format
                .saturate(round_shift(product, self.format.frac_bits)),
            format: self.format,
        }
    }
}

impl fmt::Display for Fx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

fn check_formats(left: FxFormat, right: FxFormat) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::FormatMismatch { left, right })
    }
}

/// Complex sample with both parts in the same fixed-point format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FixedComplex {
    re: Fx,
    im: Fx,
}

impl FixedComplex {
    pub fn new(re: Fx, im: Fx) -> Result<Self> {
        check_formats(re.format, im.format)?;
        Ok(FixedComplex { re, im })
    }

    pub fn quantize(re: f64, im: f64, format: FxFormat) -> Self {
        FixedComplex {
            re: Fx::quantize(re, format),
            im: Fx::quantize(im, format),
        }
    }

    pub fn from_complex(z: Complex64, format: FxFormat) -> Self {
        Self::quantize(z.re, z.im, format)
    }

    pub fn from_raw(re: i64, im: i64, format: FxFormat) -> Self {
        FixedComplex {
            re: Fx::from_raw(re, format),
            im: Fx::from_raw(im, format),
        }
    }

    pub fn zero(format: FxFormat) -> Self {
        FixedComplex {
            re: Fx::zero(format),
            im: Fx::zero(format),
        }
    }

    pub fn re(self) -> Fx {
        self.re
    }

    pub fn im(self) -> Fx {
        self.im
    }

    pub fn raw(self) -> (i64, i64) {
        (self.re.raw, self.im.raw)
    }

    pub fn format(self) -> FxFormat {
        self.re.format
    }

    pub fn to_complex64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn convert(self, target: FxFormat) -> Self {
        FixedComplex {
            re: self.re.convert(target),
            im: self.im.convert(target),
        }
    }

    pub fn try_add(self, rhs: Self) -> Result<Self> {
        check_formats(self.format(), rhs.format())?;
        Ok(self.add_unchecked(rhs))
    }

    pub fn try_sub(self, rhs: Self) -> Result<Self> {
        check_formats(self.format(), rhs.format())?;
        Ok(self.sub_unchecked(rhs))
    }

    /// `(ac - bd, ad + bc)` with every partial product rounded before it is combined.
    pub fn try_mul(self, rhs: Self) -> Result<Self> {
        check_formats(self.format(), rhs.format())?;
        Ok(self.mul_unchecked(rhs))
    }

    pub(crate) fn add_unchecked(self, rhs: Self) -> Self {
        FixedComplex {
            re: self.re.add_unchecked(rhs.re),
            im: self.im.add_unchecked(rhs.im),
        }
    }

    pub(crate) fn sub_unchecked(self, rhs: Self) -> Self {
        FixedComplex {
            re: self.re.sub_unchecked(rhs.re),
            im: self.im.sub_unchecked(rhs.im),
        }
    }

    pub(crate) fn mul_unchecked(self, rhs: Self) -> Self {
        let rr = self.re.mul_unchecked(rhs.re);
        let ii = self.im.mul_unchecked(rhs.im);
        let ri = self.re.mul_unchecked(rhs.im);
        let ir = self.im.mul_unchecked(rhs.re);
        FixedComplex {
            re: rr.sub_unchecked(ii),
            im: ri.add_unchecked(ir),
        }
    }
}

impl fmt::Display for FixedComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.re, self.im)
    }
}
