//! Formal finite products of shifted ξ factors.
//!
//! A `FactorExpr` is scalar · |D|^{αs+β} · Π ξ(scale·s + shift)^power with an
//! exact rational scalar and exact rational scale/shift data. The factor list
//! is kept canonical (sorted, merged, zero powers removed) so that equality
//! is structural and the text rendering is stable across runs. Constant
//! factors use scale = 0 and are evaluated through the residue convention.
//!
//! Over ℚ the |D|-exponent contributes nothing numerically; it is carried so
//! that emitted formulas stay faithful for general base fields.

use crate::error::{Error, Result};
use crate::laurent::LaurentSeries;
use crate::precision::{rat, rat_i, PrecisionContext};
use crate::xi::{xi_conv, xi_scaled_series};
use crate::zeta::zeta_partial_scaled_series;
use rug::{Float, Rational};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct XiFactor {
    pub scale: Rational,
    pub shift: Rational,
    pub power: i32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorExpr {
    pub scalar: Rational,
    /// |D|-exponent as an affine pair: d_lin·s + d_const.
    pub d_lin: Rational,
    pub d_const: Rational,
    pub factors: Vec<XiFactor>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorKind {
    F,
    G,
    H,
    Beta,
    Sph,
}

impl FactorExpr {
    pub fn one() -> Self {
        FactorExpr {
            scalar: rat_i(1),
            d_lin: rat_i(0),
            d_const: rat_i(0),
            factors: Vec::new(),
        }
    }

    pub fn xi(scale: Rational, shift: Rational, power: i32) -> Self {
        let mut f = FactorExpr::one();
        f.factors.push(XiFactor { scale, shift, power });
        f.canonicalize();
        f
    }

    fn canonicalize(&mut self) {
        self.factors
            .sort_by(|a, b| (&a.scale, &a.shift).cmp(&(&b.scale, &b.shift)));
        let mut merged: Vec<XiFactor> = Vec::with_capacity(self.factors.len());
        for f in self.factors.drain(..) {
            if let Some(last) = merged.last_mut() {
                if last.scale == f.scale && last.shift == f.shift {
                    last.power += f.power;
                    continue;
                }
            }
            merged.push(f);
        }
        merged.retain(|f| f.power != 0);
        self.factors = merged;
    }

    pub fn mul(&self, other: &FactorExpr) -> FactorExpr {
        let mut out = self.clone();
        out.scalar *= &other.scalar;
        out.d_lin += &other.d_lin;
        out.d_const += &other.d_const;
        out.factors.extend(other.factors.iter().cloned());
        out.canonicalize();
        out
    }

    pub fn inv(&self) -> FactorExpr {
        let mut out = self.clone();
        out.scalar = Rational::from(out.scalar.recip_ref());
        out.d_lin = -out.d_lin;
        out.d_const = -out.d_const;
        for f in out.factors.iter_mut() {
            f.power = -f.power;
        }
        out.canonicalize();
        out
    }

    pub fn div(&self, other: &FactorExpr) -> FactorExpr {
        self.mul(&other.inv())
    }

    /// Exact order of vanishing at s0 (negative = pole), from the pole set of
    /// ξ. ξ has no real zeros, so only poles of individual factors count.
    pub fn lead_order_at(&self, s0: &Rational) -> i64 {
        let mut ord = 0i64;
        for f in &self.factors {
            if f.scale == 0 {
                continue; // constant factor, convention value
            }
            let arg = Rational::from(&f.scale * s0) + &f.shift;
            if arg == 0 || arg == 1 {
                ord -= f.power as i64;
            }
        }
        ord
    }
}

fn render_arg(scale: &Rational, shift: &Rational) -> String {
    if *scale == 0 {
        return format!("{shift}");
    }
    let s_part = if *scale == 1 {
        "s".to_string()
    } else if *scale == -1 {
        "-s".to_string()
    } else if scale.is_integer() {
        format!("{scale}s")
    } else {
        format!("({scale})s")
    };
    if *shift == 0 {
        s_part
    } else if *shift > 0 {
        format!("{s_part}+{shift}")
    } else {
        format!("{s_part}{shift}")
    }
}

impl fmt::Display for FactorExpr {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut num = Vec::new();
        let mut den = Vec::new();
        for f in &self.factors {
            let base = format!("xi({})", render_arg(&f.scale, &f.shift));
            let p = f.power.unsigned_abs();
            let piece = if p == 1 { base } else { format!("{base}^{p}") };
            if f.power > 0 {
                num.push(piece);
            } else {
                den.push(piece);
            }
        }
        let mut head = String::new();
        if self.scalar != 1 {
            head.push_str(&format!("({})*", self.scalar));
        }
        if self.d_lin != 0 || self.d_const != 0 {
            head.push_str(&format!("|D|^({})*", render_arg(&self.d_lin, &self.d_const)));
        }
        let n = if num.is_empty() {
            "1".to_string()
        } else {
            num.join("*")
        };
        if den.is_empty() {
            write!(out, "{head}{n}")
        } else {
            write!(out, "{head}{n}/{}", den.join("*"))
        }
    }
}

/// The named meromorphic combinations from the rank-one constant term.
pub fn make_factor(kind: FactorKind, m: i64, r: i64) -> Result<FactorExpr> {
    let check = |ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(Error::Usage(format!("make_factor: {what}")))
        }
    };
    match kind {
        FactorKind::F => {
            check(1 <= r && r < m, "F needs 1 <= r < m")?;
            // ξ(s+m-(3r+1)/2) / ξ(s+m-(r+1)/2)
            let num = FactorExpr::xi(rat_i(1), rat_i(m) - rat(3 * r + 1, 2), 1);
            let den = FactorExpr::xi(rat_i(1), rat_i(m) - rat(r + 1, 2), 1);
            Ok(num.div(&den))
        }
        FactorKind::G => {
            check(1 <= r && r < m, "G needs 1 <= r < m")?;
            let mut g = FactorExpr::xi(rat_i(2), rat_i(0), 1)
                .div(&FactorExpr::xi(rat_i(2), rat_i(r - 1), 1));
            g = g.mul(&FactorExpr::xi(rat_i(1), rat(r - 1, 2), 1));
            g = g.div(&FactorExpr::xi(rat_i(1), rat_i(m) - rat(r + 1, 2), 1));
            g = g.mul(&FactorExpr::xi(rat_i(1), rat(3 * r + 1, 2) - rat_i(m), 1));
            g = g.div(&FactorExpr::xi(rat_i(1), rat(r + 1, 2), 1));
            Ok(g)
        }
        FactorKind::H => {
            check(m >= 2, "H needs m >= 2")?;
            let num = FactorExpr::xi(rat_i(2), rat_i(0), 1);
            let den = FactorExpr::xi(rat_i(2), rat_i(m - 1), 1);
            Ok(num.div(&den))
        }
        FactorKind::Beta => {
            check(m >= 2, "beta needs m >= 2")?;
            // Π_{i=0}^{m-2} ξ(2s-i)/ξ(2s+m-1-2i)
            let mut b = FactorExpr::one();
            for i in 0..=(m - 2) {
                b = b.mul(&FactorExpr::xi(rat_i(2), rat_i(-i), 1));
                b = b.div(&FactorExpr::xi(rat_i(2), rat_i(m - 1 - 2 * i), 1));
            }
            Ok(b)
        }
        FactorKind::Sph => {
            check(1 <= r && r < m, "sph needs 1 <= r < m")?;
            // Π_{i=1}^{r} ξ(s+m-(r+1)/2-(i-1))/ξ(i), |D|^{-r(s+m-(r+1)/2)/2}
            let mut f = FactorExpr::one();
            for i in 1..=r {
                f = f.mul(&FactorExpr::xi(
                    rat_i(1),
                    rat_i(m) - rat(r + 1, 2) - rat_i(i - 1),
                    1,
                ));
                f = f.div(&FactorExpr::xi(rat_i(0), rat_i(i), 1));
            }
            f.d_lin = rat(-r, 2);
            f.d_const = (rat_i(m) - rat(r + 1, 2)) * rat(-r, 2);
            Ok(f)
        }
    }
}

/// Laurent series of the product at s0. The |D|-exponent is numerically 1
/// over ℚ and is reported alongside by the callers that need it.
pub fn factor_series(
    f: &FactorExpr,
    s0: &Rational,
    order: i64,
    ctx: &PrecisionContext,
) -> Result<LaurentSeries> {
    let mut budget = 2i64;
    for x in &f.factors {
        budget += x.power.unsigned_abs() as i64;
    }
    let hi = order + budget;
    let scalar = ctx.complex_from_real(ctx.rational_to_real(&f.scalar));
    let mut acc = LaurentSeries::constant(s0.clone(), scalar, hi, ctx);
    for x in &f.factors {
        let single = if x.scale == 0 {
            let v = xi_conv(&x.shift, ctx)?;
            LaurentSeries::constant(s0.clone(), ctx.complex_from_real(v), hi, ctx)
        } else {
            xi_scaled_series(&x.scale, &x.shift, s0, hi, ctx)?
        };
        for _ in 0..x.power.unsigned_abs() {
            acc = if x.power > 0 {
                acc.mul(&single)?
            } else {
                acc.div(&single)?
            };
        }
    }
    Ok(acc.truncate_hi(order))
}

/// Exact value of the regularizing polynomial
/// P_z(s) = Π_{i=0}^{r-1} ((s-(r-1)/2+i)² - (m-r)²).
pub fn pz_eval(m: i64, r: i64, s: &Rational) -> Result<Rational> {
    if r < 1 || m < 1 {
        return Err(Error::Usage("pz_eval needs r >= 1, m >= 1".into()));
    }
    let mut acc = rat_i(1);
    let msq = rat_i((m - r) * (m - r));
    for i in 0..r {
        let base = Rational::from(s - rat(r - 1, 2)) + rat_i(i);
        let sq = Rational::from(&base * &base);
        acc *= sq - &msq;
    }
    Ok(acc)
}

/// λ_m, the constant value of the near-boundary Siegel residue, via the
/// recursion λ_m = λ_{m-1} ξ(m-1)/ξ(2m-2) seeded at λ_2 = ξ(1)/ξ(2).
pub fn lambda_m(m: i64, ctx: &PrecisionContext) -> Result<Float> {
    if m < 2 {
        return Err(Error::Usage("lambda_m needs m >= 2".into()));
    }
    let mut acc = xi_conv(&rat_i(1), ctx)?;
    acc /= xi_conv(&rat_i(2), ctx)?;
    for k in 3..=m {
        acc *= xi_conv(&rat_i(k - 1), ctx)?;
        acc /= xi_conv(&rat_i(2 * k - 2), ctx)?;
    }
    Ok(acc)
}

/// λ_m as the closed product ξ(m-1)···ξ(2) / (ξ(2m-2)···ξ(4)) · λ_2.
pub fn lambda_m_closed(m: i64, ctx: &PrecisionContext) -> Result<Float> {
    if m < 2 {
        return Err(Error::Usage("lambda_m needs m >= 2".into()));
    }
    let mut num = xi_conv(&rat_i(1), ctx)?;
    let mut den = xi_conv(&rat_i(2), ctx)?;
    for j in 2..m {
        num *= xi_conv(&rat_i(j), ctx)?;
        den *= xi_conv(&rat_i(2 * j), ctx)?;
    }
    Ok(num / den)
}

/// Doubling-method normalizing factor d_m^S(s) as a Laurent series at s0:
/// Π ζ^S(2s+2i-1) over i = 1..m/2 (m even) or Π ζ^S(2s+2i) over
/// i = 1..(m-1)/2 (m odd), with S removing finite Euler factors only.
pub fn dnorm_series(
    m: i64,
    s0: &Rational,
    removed_primes: &[u64],
    order: i64,
    ctx: &PrecisionContext,
) -> Result<LaurentSeries> {
    if m < 2 {
        return Err(Error::Usage("dnorm_series needs m >= 2".into()));
    }
    let count = if m % 2 == 0 { m / 2 } else { (m - 1) / 2 };
    let hi = order + count + 2;
    let one = ctx.complex_from_real(ctx.real(1));
    let mut acc = LaurentSeries::constant(s0.clone(), one, hi, ctx);
    for i in 1..=count {
        let shift = if m % 2 == 0 {
            rat_i(2 * i - 1)
        } else {
            rat_i(2 * i)
        };
        let z = zeta_partial_scaled_series(removed_primes, &rat_i(2), &shift, s0, hi, ctx)?;
        acc = acc.mul(&z)?;
    }
    Ok(acc.truncate_hi(order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Complex;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(50)
    }

    fn rel_err(got: &Float, want: &Float) -> f64 {
        let d = Float::with_val(got.prec(), got - want).abs();
        let w = Float::with_val(got.prec(), want.abs_ref());
        if w == 0 {
            d.to_f64()
        } else {
            (d / w).to_f64()
        }
    }

    fn re(z: &Complex) -> Float {
        z.real().clone()
    }

    #[test]
    fn rendering_is_canonical() {
        assert_eq!(
            make_factor(FactorKind::H, 5, 0).unwrap().to_string(),
            "xi(2s)/xi(2s+4)"
        );
        assert_eq!(
            make_factor(FactorKind::F, 4, 2).unwrap().to_string(),
            "xi(s+1/2)/xi(s+5/2)"
        );
        assert_eq!(
            make_factor(FactorKind::Beta, 2, 0).unwrap().to_string(),
            "xi(2s)/xi(2s+1)"
        );
    }

    #[test]
    fn g_at_rank_one_cancels_pair() {
        // ξ(2s)/ξ(2s) merges away for r = 1
        let g = make_factor(FactorKind::G, 4, 1).unwrap();
        assert_eq!(g.factors.len(), 4);
        assert_eq!(g.to_string(), "xi(s-2)*xi(s)/xi(s+1)*xi(s+3)");
    }

    #[test]
    fn h_residue_at_zero() {
        // H^{(5)}(s) = ξ(2s)/ξ(2s+4): residue at 0 is ξ(0)/(2ξ(4)) = -45/π²
        let ctx = ctx();
        let h = make_factor(FactorKind::H, 5, 0).unwrap();
        let s = factor_series(&h, &rat_i(0), 1, &ctx).unwrap();
        assert_eq!(s.lead_exp(), -1);
        let got = re(&s.coeff(-1).unwrap());
        let want = -Float::with_val(ctx.bits(), 45) / ctx.pi().square();
        assert!(rel_err(&got, &want) < 1e-44);
    }

    #[test]
    fn beta_zero_order_at_minus_half() {
        for r in 1..=5i64 {
            let ctx = ctx();
            let b = make_factor(FactorKind::Beta, 2 * r, 0).unwrap();
            let s = factor_series(&b, &rat(-1, 2), 2, &ctx).unwrap();
            assert_eq!(s.lead_exp(), 1, "r={r}");
        }
    }

    #[test]
    fn beta_first_coefficient_value() {
        // β_{2r,1}(-1/2) = 2ξ(2r)/ξ(0)
        let ctx = ctx();
        for r in 1..=5i64 {
            let b = make_factor(FactorKind::Beta, 2 * r, 0).unwrap();
            let s = factor_series(&b, &rat(-1, 2), 1, &ctx).unwrap();
            let got = re(&s.coeff(1).unwrap());
            let xi2r = xi_conv(&rat_i(2 * r), &ctx).unwrap();
            let xi0 = xi_conv(&rat_i(0), &ctx).unwrap();
            let want = Float::with_val(ctx.bits(), 2) * xi2r / xi0;
            assert!(rel_err(&got, &want) < 1e-40, "r={r}");
        }
    }

    #[test]
    fn one_plus_beta_h_is_two() {
        // 1 + β_{2r,1}(-1/2)·H^{(2r+1)}_{-1}(0) = 2
        let ctx = ctx();
        for r in 1..=6i64 {
            let b = make_factor(FactorKind::Beta, 2 * r, 0).unwrap();
            let beta1 = re(&factor_series(&b, &rat(-1, 2), 1, &ctx)
                .unwrap()
                .coeff(1)
                .unwrap());
            let h = make_factor(FactorKind::H, 2 * r + 1, 0).unwrap();
            let hm1 = re(&factor_series(&h, &rat_i(0), 0, &ctx)
                .unwrap()
                .coeff(-1)
                .unwrap());
            let got = ctx.real(1) + beta1 * hm1;
            assert!(rel_err(&got, &ctx.real(2)) < 1e-40, "r={r}");
        }
    }

    #[test]
    fn f_value_no_pole() {
        // F^{(5,2)}(3/2) = ξ(3)/ξ(5)
        let ctx = ctx();
        let f = make_factor(FactorKind::F, 5, 2).unwrap();
        let s = factor_series(&f, &rat(3, 2), 0, &ctx).unwrap();
        assert_eq!(s.lead_exp(), 0);
        let got = re(&s.coeff(0).unwrap());
        let want = xi_conv(&rat_i(3), &ctx).unwrap() / xi_conv(&rat_i(5), &ctx).unwrap();
        assert!(rel_err(&got, &want) < 1e-44);
    }

    #[test]
    fn f_definition_cross_check() {
        // factor series equals explicit quotient of shifted ξ series
        let ctx = ctx();
        for (m, r, s0) in [(5i64, 2i64, rat(3, 2)), (7, 3, rat_i(2)), (6, 1, rat(1, 2))] {
            let f = make_factor(FactorKind::F, m, r).unwrap();
            let fs = factor_series(&f, &s0, 2, &ctx).unwrap();
            let num =
                xi_scaled_series(&rat_i(1), &(rat_i(m) - rat(3 * r + 1, 2)), &s0, 4, &ctx).unwrap();
            let den =
                xi_scaled_series(&rat_i(1), &(rat_i(m) - rat(r + 1, 2)), &s0, 4, &ctx).unwrap();
            let q = num.div(&den).unwrap();
            for k in fs.lead_exp()..=2 {
                let a = re(&fs.coeff(k).unwrap());
                let b = re(&q.coeff(k).unwrap());
                assert!(rel_err(&a, &b) < 1e-40, "m={m} r={r} k={k}");
            }
        }
    }

    #[test]
    fn product_homomorphism() {
        // series(f·g) = series(f)·series(g) over random factor pairs
        let ctx = ctx();
        let mut seed = 0xabcdef1234567u64;
        let mut rnd = |lo: i64, hi: i64| {
            seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            lo + ((seed >> 33) as i64).rem_euclid(hi - lo + 1)
        };
        for _ in 0..50 {
            let f = FactorExpr::xi(rat_i(rnd(1, 2)), rat(rnd(-3, 5), 2), rnd(1, 2) as i32);
            let g = FactorExpr::xi(rat_i(1), rat_i(rnd(-2, 4)), if rnd(0, 1) == 0 { 1 } else { -1 });
            let s0 = rat(rnd(1, 5), 2);
            let lhs = factor_series(&f.mul(&g), &s0, 2, &ctx).unwrap();
            let rhs = {
                let a = factor_series(&f, &s0, 4, &ctx).unwrap();
                let b = factor_series(&g, &s0, 4, &ctx).unwrap();
                a.mul(&b).unwrap()
            };
            for k in lhs.lead_exp()..=lhs.trunc_order().min(rhs.trunc_order()) {
                let a = re(&lhs.coeff(k).unwrap());
                let b = re(&rhs.coeff(k).unwrap());
                if a.clone().abs() < ctx.real(1e-40) && b.clone().abs() < ctx.real(1e-40) {
                    continue;
                }
                assert!(rel_err(&a, &b) < 1e-38, "k={k} f={f} g={g} s0={s0}");
            }
        }
    }

    #[test]
    fn pz_exact_values() {
        assert_eq!(pz_eval(2, 1, &rat_i(0)).unwrap(), rat_i(-1));
        assert_eq!(pz_eval(3, 1, &rat_i(2)).unwrap(), rat_i(0));
        assert_eq!(pz_eval(4, 2, &rat(1, 2)).unwrap(), rat_i(12));
    }

    #[test]
    fn lambda_values_and_routes() {
        let ctx = ctx();
        let l2 = lambda_m(2, &ctx).unwrap();
        let want2 = Float::with_val(ctx.bits(), 6) / ctx.pi();
        assert!(rel_err(&l2, &want2) < 1e-44);
        let l3 = lambda_m(3, &ctx).unwrap();
        let want3 = Float::with_val(ctx.bits(), 90) / ctx.pi().square();
        assert!(rel_err(&l3, &want3) < 1e-44);
        for m in 2..=8i64 {
            let a = lambda_m(m, &ctx).unwrap();
            let b = lambda_m_closed(m, &ctx).unwrap();
            assert!(rel_err(&a, &b) < 1e-44, "m={m}");
        }
    }

    #[test]
    fn dnorm_examples() {
        let ctx = ctx();
        // m=2, s0=1/2, S={2}: ζ^S(2s+1) at 1/2 → ζ(2)(1-1/4) = π²/8
        let s = dnorm_series(2, &rat(1, 2), &[2], 0, &ctx).unwrap();
        let got = re(&s.coeff(0).unwrap());
        let want = ctx.pi().square() / 8u32;
        assert!(rel_err(&got, &want) < 1e-44);
        // m=3, s0=0, S=∅: ζ(2s+2) at 0 → ζ(2) = π²/6
        let s = dnorm_series(3, &rat_i(0), &[], 0, &ctx).unwrap();
        let got = re(&s.coeff(0).unwrap());
        let want = ctx.pi().square() / 6u32;
        assert!(rel_err(&got, &want) < 1e-44);
        // m=2, s0=0, S=∅: ζ(2s+1) pole at 0
        let s = dnorm_series(2, &rat_i(0), &[], 0, &ctx).unwrap();
        assert_eq!(s.lead_exp(), -1);
    }

    #[test]
    fn sph_factor_carries_affine_d_exponent() {
        let f = make_factor(FactorKind::Sph, 4, 2).unwrap();
        assert_eq!(f.d_lin, rat_i(-1));
        assert_eq!(f.d_const, rat(-5, 2));
        assert!(f.to_string().contains("xi(s+5/2)"));
        assert!(f.to_string().contains("xi(s+3/2)"));
    }

    #[test]
    fn lead_order_structural() {
        let ctx = ctx();
        let h = make_factor(FactorKind::H, 5, 0).unwrap();
        assert_eq!(h.lead_order_at(&rat_i(0)), -1);
        let b4 = make_factor(FactorKind::Beta, 4, 0).unwrap();
        assert_eq!(b4.lead_order_at(&rat(-1, 2)), 1);
        let s = factor_series(&b4, &rat(-1, 2), 2, &ctx).unwrap();
        assert_eq!(s.lead_exp(), b4.lead_order_at(&rat(-1, 2)));
    }
}
