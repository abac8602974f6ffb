use rug::{Complex, Float, Rational};

/// Decimal working precision plus guard digits.
///
/// Every numeric routine in the crate takes one of these. `decimal_digits` is
/// the precision the caller can rely on; `guard_digits` extra digits are
/// carried internally so that cancellation across products of ξ values does
/// not eat into the promised accuracy. "Is zero" always means
/// |x| ≤ 10^{-(decimal_digits-10)} relative to the largest magnitude in play.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrecisionContext {
    pub decimal_digits: u32,
    pub guard_digits: u32,
}

/// log2(10), rounded up a hair.
const LOG2_10: f64 = 3.321928094887363;

impl PrecisionContext {
    pub fn new(decimal_digits: u32) -> Self {
        assert!(decimal_digits >= 20, "need at least 20 decimal digits");
        PrecisionContext {
            decimal_digits,
            guard_digits: 15,
        }
    }

    pub fn with_guard(decimal_digits: u32, guard_digits: u32) -> Self {
        assert!(decimal_digits >= 20, "need at least 20 decimal digits");
        PrecisionContext {
            decimal_digits,
            guard_digits,
        }
    }

    /// Total working digits (promised + guard).
    pub fn work_digits(&self) -> u32 {
        self.decimal_digits + self.guard_digits
    }

    /// Binary precision for rug values.
    pub fn bits(&self) -> u32 {
        (self.work_digits() as f64 * LOG2_10).ceil() as u32 + 16
    }

    /// Relative zero-detection threshold: 10^{-(decimal_digits-10)}.
    pub fn zero_eps(&self) -> Float {
        let mut e = Float::with_val(self.bits(), 10);
        e.pow_assign(-((self.decimal_digits as i64) - 10));
        e
    }

    /// Tolerance for verification residuals: 10^{-decimal_digits/2}.
    pub fn residual_tol(&self) -> Float {
        let mut e = Float::with_val(self.bits(), 10);
        e.pow_assign(-((self.decimal_digits / 2) as i64));
        e
    }

    pub fn real<T>(&self, v: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.bits(), v)
    }

    pub fn complex_zero(&self) -> Complex {
        Complex::new(self.bits())
    }

    pub fn complex_from_real(&self, v: Float) -> Complex {
        Complex::with_val(self.bits(), (v, Float::new(self.bits())))
    }

    pub fn rational_to_real(&self, q: &Rational) -> Float {
        Float::with_val(self.bits(), q)
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.bits(), rug::float::Constant::Pi)
    }
}

use rug::ops::PowAssign;

/// Parse an exact rational from a "p/q" or integer string.
pub fn parse_rational(s: &str) -> crate::Result<Rational> {
    s.trim()
        .parse::<Rational>()
        .map_err(|e| crate::Error::Usage(format!("bad rational '{s}': {e}")))
}

/// Rational p/q from machine integers.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::from((p, q))
}

/// Rational from a machine integer.
pub fn rat_i(p: i64) -> Rational {
    Rational::from(p)
}

/// True if `q` is an integer.
pub fn is_integer(q: &Rational) -> bool {
    *q.denom() == 1
}

/// `q` as i64 if it is an integer in range.
pub fn to_integer(q: &Rational) -> Option<i64> {
    if is_integer(q) {
        q.numer().to_i64()
    } else {
        None
    }
}
