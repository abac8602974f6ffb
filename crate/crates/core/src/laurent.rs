//! Truncated Laurent expansions at an exact rational center.
//!
//! A series holds coefficients for the monomials (s-center)^k with
//! `lead_exp <= k <= trunc_order`. Exponents and the center are exact;
//! only coefficients are floating. Coefficients below `lead_exp` are exactly
//! zero by construction (pole orders are tracked structurally, never guessed
//! from numerics); coefficients above `trunc_order` are unknown.

use crate::error::{Error, Result};
use crate::precision::PrecisionContext;
use rug::{Complex, Float, Rational};

#[derive(Clone, Debug)]
pub struct LaurentSeries {
    pub center: Rational,
    lead: i64,
    coeffs: Vec<Complex>,
    digits: u32,
    zero: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LsOp {
    Add,
    Mul,
    Div,
    Scale,
}

impl LaurentSeries {
    /// Build from explicit data. `coeffs[k]` is the coefficient of
    /// (s-center)^(lead+k).
    pub fn new(center: Rational, lead: i64, coeffs: Vec<Complex>, ctx: &PrecisionContext) -> Self {
        assert!(!coeffs.is_empty(), "empty coefficient window");
        LaurentSeries {
            center,
            lead,
            coeffs,
            digits: ctx.decimal_digits,
            zero: false,
        }
    }

    /// The identically-zero series on the window [lead, hi].
    pub fn zero(center: Rational, lead: i64, hi: i64, ctx: &PrecisionContext) -> Self {
        let len = (hi - lead + 1).max(1) as usize;
        LaurentSeries {
            center,
            lead,
            coeffs: vec![ctx.complex_zero(); len],
            digits: ctx.decimal_digits,
            zero: true,
        }
    }

    /// Constant series c + 0·(s-center) + ... on [0, hi].
    pub fn constant(center: Rational, c: Complex, hi: i64, ctx: &PrecisionContext) -> Self {
        let mut v = vec![ctx.complex_zero(); (hi + 1).max(1) as usize];
        v[0] = c;
        LaurentSeries {
            center,
            lead: 0,
            coeffs: v,
            digits: ctx.decimal_digits,
            zero: false,
        }
    }

    pub fn lead_exp(&self) -> i64 {
        self.lead
    }

    pub fn trunc_order(&self) -> i64 {
        self.lead + self.coeffs.len() as i64 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    /// Pole order (0 for regular series).
    pub fn pole_order(&self) -> i64 {
        if self.zero {
            0
        } else {
            (-self.lead).max(0)
        }
    }

    fn prec(&self) -> u32 {
        PrecisionContext::with_guard(self.digits, 15).bits()
    }

    /// Coefficient of (s-center)^k. Errors outside the represented window.
    pub fn coeff(&self, k: i64) -> Result<Complex> {
        if k < self.lead || k > self.trunc_order() {
            return Err(Error::Range(format!(
                "coefficient index {k} outside window [{}, {}]",
                self.lead,
                self.trunc_order()
            )));
        }
        Ok(self.coeffs[(k - self.lead) as usize].clone())
    }

    /// Coefficient of (s-center)^k, exact zero below the lead.
    pub fn coeff_or_zero(&self, k: i64) -> Complex {
        if k < self.lead {
            Complex::new(self.prec())
        } else if k > self.trunc_order() {
            panic!(
                "coefficient index {k} above truncation order {}",
                self.trunc_order()
            );
        } else {
            self.coeffs[(k - self.lead) as usize].clone()
        }
    }

    /// Largest coefficient magnitude on the window.
    pub fn max_mag(&self) -> Float {
        let mut m = Float::new(self.prec());
        for c in &self.coeffs {
            let a = Float::with_val(self.prec(), c.abs_ref());
            if a > m {
                m = a;
            }
        }
        m
    }

    /// Strip leading coefficients that are zero relative to the window's
    /// largest magnitude; flags the series identically-zero when everything
    /// cancels. Used after additive cancellation.
    pub fn normalize(mut self) -> Self {
        if self.zero {
            return self;
        }
        let scale = self.max_mag();
        let prec = self.prec();
        let mut eps = PrecisionContext::with_guard(self.digits, 15).zero_eps();
        eps *= &scale;
        let mut drop = 0usize;
        for c in &self.coeffs {
            let a = Float::with_val(prec, c.abs_ref());
            if a <= eps {
                drop += 1;
            } else {
                break;
            }
        }
        if drop == self.coeffs.len() {
            self.zero = true;
            return self;
        }
        if drop > 0 {
            self.coeffs.drain(..drop);
            self.lead += drop as i64;
        }
        self
    }

    /// Multiply by the exact monomial (s-center)^k: shifts every exponent.
    pub fn shift(mut self, k: i64) -> Self {
        self.lead += k;
        self
    }

    /// Truncate the high end of the window to `hi` (no-op if already shorter).
    pub fn truncate_hi(mut self, hi: i64) -> Self {
        if self.trunc_order() > hi {
            let keep = (hi - self.lead + 1).max(1) as usize;
            self.coeffs.truncate(keep);
        }
        self
    }

    /// Drop the current leading coefficient exactly (used when it is known to
    /// vanish analytically, e.g. trivial zeros of ζ). Panics if the series is
    /// flagged zero or the window would empty.
    pub fn drop_lead_exact(mut self, ctx: &PrecisionContext) -> Self {
        assert!(!self.zero && self.coeffs.len() > 1);
        let lead_mag = Float::with_val(self.prec(), self.coeffs[0].abs_ref());
        let mut eps = ctx.zero_eps();
        eps *= self.max_mag();
        assert!(
            lead_mag <= eps,
            "drop_lead_exact: leading coefficient is not numerically zero"
        );
        self.coeffs.remove(0);
        self.lead += 1;
        self
    }

    pub fn add(&self, b: &LaurentSeries) -> Result<LaurentSeries> {
        if self.center != b.center {
            return Err(Error::Usage("center mismatch in series addition".into()));
        }
        if self.zero {
            return Ok(b.clone().truncate_hi(self.trunc_order()));
        }
        if b.zero {
            return Ok(self.clone().truncate_hi(b.trunc_order()));
        }
        let lead = self.lead.min(b.lead);
        let hi = self.trunc_order().min(b.trunc_order());
        if hi < lead {
            return Err(Error::Range("disjoint windows in series addition".into()));
        }
        let prec = self.prec();
        let mut coeffs = Vec::with_capacity((hi - lead + 1) as usize);
        for k in lead..=hi {
            let mut c = Complex::new(prec);
            if k >= self.lead {
                c += &self.coeffs[(k - self.lead) as usize];
            }
            if k >= b.lead {
                c += &b.coeffs[(k - b.lead) as usize];
            }
            coeffs.push(c);
        }
        let out = LaurentSeries {
            center: self.center.clone(),
            lead,
            coeffs,
            digits: self.digits,
            zero: false,
        };
        Ok(out.normalize())
    }

    pub fn sub(&self, b: &LaurentSeries) -> Result<LaurentSeries> {
        self.add(&b.clone().scale_complex(Complex::with_val(b.prec(), -1)))
    }

    pub fn mul(&self, b: &LaurentSeries) -> Result<LaurentSeries> {
        if self.center != b.center {
            return Err(Error::Usage(
                "center mismatch in series multiplication".into(),
            ));
        }
        let lead = self.lead + b.lead;
        let hi = (self.trunc_order() + b.lead).min(b.trunc_order() + self.lead);
        if self.zero || b.zero {
            let ctx = PrecisionContext::with_guard(self.digits, 15);
            return Ok(LaurentSeries::zero(
                self.center.clone(),
                lead,
                hi.max(lead),
                &ctx,
            ));
        }
        let prec = self.prec();
        let n = (hi - lead + 1) as usize;
        let mut coeffs = vec![Complex::new(prec); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, bb) in b.coeffs.iter().enumerate() {
                if i + j < n {
                    coeffs[i + j] += Complex::with_val(prec, a * bb);
                }
            }
        }
        Ok(LaurentSeries {
            center: self.center.clone(),
            lead,
            coeffs,
            digits: self.digits,
            zero: false,
        })
    }

    /// Series division a/b. The divisor's leading coefficient must be honest
    /// (b is normalized first); lead exponents subtract.
    pub fn div(&self, b: &LaurentSeries) -> Result<LaurentSeries> {
        if self.center != b.center {
            return Err(Error::Usage("center mismatch in series division".into()));
        }
        let b = b.clone().normalize();
        if b.zero {
            return Err(Error::Domain("division by identically-zero series".into()));
        }
        let prec = self.prec();
        let n = b.coeffs.len().min(if self.zero {
            self.coeffs.len()
        } else {
            self.coeffs.len()
        });
        // reciprocal of the unit part of b, to n terms
        let mut inv = vec![Complex::new(prec); n];
        inv[0] = Complex::with_val(prec, 1) / &b.coeffs[0];
        for k in 1..n {
            let mut acc = Complex::new(prec);
            for j in 1..=k {
                acc += Complex::with_val(prec, &b.coeffs[j] * &inv[k - j]);
            }
            let t = Complex::with_val(prec, &acc * &inv[0]);
            inv[k] = -t;
        }
        let recip = LaurentSeries {
            center: b.center.clone(),
            lead: -b.lead,
            coeffs: inv,
            digits: self.digits,
            zero: false,
        };
        self.mul(&recip)
    }

    pub fn scale_complex(mut self, z: Complex) -> LaurentSeries {
        for c in self.coeffs.iter_mut() {
            *c *= &z;
        }
        self
    }

    pub fn scale_real(self, x: &Float) -> LaurentSeries {
        let prec = self.prec();
        self.scale_complex(Complex::with_val(prec, (x, &Float::new(prec))))
    }

    /// Substitute s-center -> t·(s-center): coefficient k picks up t^k.
    /// Used when re-expanding f(scale·s + shift) around a new center.
    pub fn rescale_variable(mut self, t: &Rational) -> LaurentSeries {
        let prec = self.prec();
        let tf = Float::with_val(prec, t);
        for k in 0..self.coeffs.len() {
            let e = self.lead + k as i64;
            let mut p = Float::with_val(prec, &tf);
            p = p.pow(e as i32);
            self.coeffs[k] *= &p;
        }
        self
    }
}

use rug::ops::Pow;

/// Dispatching wrapper over the binary series operations.
pub fn ls_arith(op: LsOp, a: &LaurentSeries, b: &LaurentSeries) -> Result<LaurentSeries> {
    match op {
        LsOp::Add => a.add(b),
        LsOp::Mul => a.mul(b),
        LsOp::Div => a.div(b),
        LsOp::Scale => {
            // scale by b's constant coefficient
            let z = b.coeff(0)?;
            Ok(a.clone().scale_complex(z))
        }
    }
}
