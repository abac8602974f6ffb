//! Formal Eisenstein-coefficient atoms and their linear span.
//!
//! `Atom::E { m, r, d, s0 }` stands for the d-th Laurent coefficient of the
//! spherical Eisenstein series attached to the rank-r parabolic on the split
//! rank-m orthogonal group, expanded at s0. `Atom::Unit` is the constant
//! function. A `SymbolicCoeff` is a finite complex-linear combination of
//! atoms; a `SymSeries` is a truncated Laurent series whose coefficients are
//! such combinations.

use crate::precision::PrecisionContext;
use rug::{Complex, Float, Rational};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Atom {
    Unit,
    E { m: i64, r: i64, d: i64, s0: Rational },
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Unit => write!(f, "1"),
            Atom::E { m, r, d, s0 } => write!(f, "E[{d}]^({m},{r})({s0})"),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SymbolicCoeff {
    pub terms: BTreeMap<Atom, Complex>,
}

impl SymbolicCoeff {
    pub fn zero() -> Self {
        SymbolicCoeff::default()
    }

    pub fn single(atom: Atom, c: Complex) -> Self {
        let mut s = SymbolicCoeff::zero();
        s.terms.insert(atom, c);
        s
    }

    pub fn unit(c: Complex) -> Self {
        SymbolicCoeff::single(Atom::Unit, c)
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_assign(&mut self, other: &SymbolicCoeff, prec: u32) {
        for (a, c) in &other.terms {
            match self.terms.get_mut(a) {
                Some(slot) => *slot += c,
                None => {
                    self.terms.insert(a.clone(), Complex::with_val(prec, c));
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &SymbolicCoeff, z: &Complex, prec: u32) {
        for (a, c) in &other.terms {
            let t = Complex::with_val(prec, c * z);
            match self.terms.get_mut(a) {
                Some(slot) => *slot += t,
                None => {
                    self.terms.insert(a.clone(), t);
                }
            }
        }
    }

    pub fn scale(&mut self, z: &Complex) {
        for c in self.terms.values_mut() {
            *c *= z;
        }
    }

    pub fn sub(&self, other: &SymbolicCoeff, prec: u32) -> SymbolicCoeff {
        let mut out = self.clone();
        let minus_one = Complex::with_val(prec, -1);
        out.add_scaled(other, &minus_one, prec);
        out
    }

    pub fn coeff_of(&self, atom: &Atom, prec: u32) -> Complex {
        self.terms
            .get(atom)
            .cloned()
            .unwrap_or_else(|| Complex::new(prec))
    }

    pub fn max_mag(&self, prec: u32) -> Float {
        let mut m = Float::new(prec);
        for c in self.terms.values() {
            let a = Float::with_val(prec, c.abs_ref());
            if a > m {
                m = a;
            }
        }
        m
    }

    /// Drop entries that are zero relative to the combination's own largest
    /// magnitude.
    pub fn normalize(&mut self, ctx: &PrecisionContext) {
        let prec = ctx.bits();
        let scale = self.max_mag(prec);
        if scale.is_zero() {
            self.terms.clear();
            return;
        }
        let mut eps = ctx.zero_eps();
        eps *= &scale;
        self.terms.retain(|_, c| {
            let a = Float::with_val(prec, c.abs_ref());
            a > eps
        });
    }
}

impl fmt::Display for SymbolicCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(a, c)| format!("({:.6e})·{}", c.real().to_f64(), a))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Laurent window of symbolic coefficients: `coeffs[i]` sits at exponent
/// lo + i. Exponents below `lo` are exactly zero.
#[derive(Clone, Debug)]
pub struct SymSeries {
    pub lo: i64,
    pub coeffs: Vec<SymbolicCoeff>,
}

impl SymSeries {
    pub fn zero(lo: i64, hi: i64) -> Self {
        SymSeries {
            lo,
            coeffs: vec![SymbolicCoeff::zero(); (hi - lo + 1).max(1) as usize],
        }
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    pub fn at(&self, idx: i64) -> SymbolicCoeff {
        if idx < self.lo {
            SymbolicCoeff::zero()
        } else if idx > self.hi() {
            panic!("SymSeries index {idx} above window hi {}", self.hi());
        } else {
            self.coeffs[(idx - self.lo) as usize].clone()
        }
    }

    pub fn add_assign(&mut self, other: &SymSeries, prec: u32) {
        let lo = self.lo.min(other.lo);
        let hi = self.hi().min(other.hi());
        let mut coeffs = Vec::with_capacity((hi - lo + 1).max(1) as usize);
        for idx in lo..=hi {
            let mut c = if idx >= self.lo && idx <= self.hi() {
                self.coeffs[(idx - self.lo) as usize].clone()
            } else {
                SymbolicCoeff::zero()
            };
            if idx >= other.lo && idx <= other.hi() {
                c.add_assign(&other.coeffs[(idx - other.lo) as usize], prec);
            }
            coeffs.push(c);
        }
        self.lo = lo;
        self.coeffs = coeffs;
    }
}
