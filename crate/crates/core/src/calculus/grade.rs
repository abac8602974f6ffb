//! Constant-term expansion along the rank-one parabolic and Laurent grading.
//!
//! `constant_term(m, r)` transcribes the three-case formula for the constant
//! term of the spherical Eisenstein series: each summand is
//! |a|^{αs+β} · factor(s) · family(s+δ) with α ∈ {-1, 0, 1}. `grade` expands
//! every summand at s = s0 + ε: the exponent contributes
//! |a|^{αs0+β} Σ (αL)^k ε^k / k! with L the formal log |a| (truncated at L²),
//! the factor by its numeric Laurent series, the family by Σ_d atom·ε^d with
//! d bounded below by the pole table. Products collect into buckets keyed by
//! the exact exponent value and the log degree.

use super::atom::{Atom, SymSeries, SymbolicCoeff};
use super::kb::KnowledgeBase;
use crate::error::{Error, Result};
use crate::factor::{factor_series, make_factor, FactorExpr, FactorKind};
use crate::laurent::LaurentSeries;
use crate::precision::{rat, rat_i};
use rug::{Complex, Float, Rational};
use std::collections::BTreeMap;

/// Family slot of an expansion term: the full series E^{(m,r)}(s + arg_shift),
/// or the constant function when r = 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    pub m: i64,
    pub r: i64,
    pub arg_shift: Rational,
}

impl Family {
    pub fn unit(m: i64) -> Self {
        Family {
            m,
            r: 0,
            arg_shift: rat_i(0),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExpansionTerm {
    /// |a|-exponent αs + β with α ∈ {-1, 0, 1}.
    pub alpha: i64,
    pub beta: Rational,
    pub factor: FactorExpr,
    pub family: Family,
}

/// The constant term of E^{(m,r)} along the rank-one parabolic, as a list of
/// expansion terms over the rank-(m-1) group.
pub fn constant_term(m: i64, r: i64) -> Result<Vec<ExpansionTerm>> {
    if !(1 <= r && r <= m && m >= 2) {
        return Err(Error::Usage(format!(
            "constant_term needs 1 <= r <= m, m >= 2, got m={m} r={r}"
        )));
    }
    if r == m {
        Ok(vec![
            ExpansionTerm {
                alpha: 1,
                beta: rat(m - 1, 2),
                factor: FactorExpr::one(),
                family: Family {
                    m: m - 1,
                    r: m - 1,
                    arg_shift: rat(1, 2),
                },
            },
            ExpansionTerm {
                alpha: -1,
                beta: rat(m - 1, 2),
                factor: make_factor(FactorKind::H, m, 0)?,
                family: Family {
                    m: m - 1,
                    r: m - 1,
                    arg_shift: rat(-1, 2),
                },
            },
        ])
    } else if r == 1 {
        Ok(vec![
            ExpansionTerm {
                alpha: 1,
                beta: rat_i(m - 1),
                factor: FactorExpr::one(),
                family: Family::unit(m - 1),
            },
            ExpansionTerm {
                alpha: 0,
                beta: rat_i(1),
                factor: make_factor(FactorKind::F, m, 1)?,
                family: Family {
                    m: m - 1,
                    r: 1,
                    arg_shift: rat_i(0),
                },
            },
            ExpansionTerm {
                alpha: -1,
                beta: rat_i(m - 1),
                factor: make_factor(FactorKind::G, m, 1)?,
                family: Family::unit(m - 1),
            },
        ])
    } else {
        Ok(vec![
            ExpansionTerm {
                alpha: 1,
                beta: rat_i(m) - rat(r + 1, 2),
                factor: FactorExpr::one(),
                family: Family {
                    m: m - 1,
                    r: r - 1,
                    arg_shift: rat(1, 2),
                },
            },
            ExpansionTerm {
                alpha: 0,
                beta: rat_i(r),
                factor: make_factor(FactorKind::F, m, r)?,
                family: Family {
                    m: m - 1,
                    r,
                    arg_shift: rat_i(0),
                },
            },
            ExpansionTerm {
                alpha: -1,
                beta: rat_i(m) - rat(r + 1, 2),
                factor: make_factor(FactorKind::G, m, r)?,
                family: Family {
                    m: m - 1,
                    r: r - 1,
                    arg_shift: rat(-1, 2),
                },
            },
        ])
    }
}

/// Buckets keyed by (exact |a|-exponent, log degree 0..2), each a Laurent
/// window of symbolic coefficients sharing the grading center.
#[derive(Clone, Debug)]
pub struct GradedExpansion {
    pub center: Rational,
    pub lo: i64,
    pub hi: i64,
    pub buckets: BTreeMap<(Rational, u8), SymSeries>,
}

impl GradedExpansion {
    pub fn extract(&self, exponent: &Rational, log_degree: u8) -> SymSeries {
        match self.buckets.get(&(exponent.clone(), log_degree)) {
            Some(s) => s.clone(),
            None => SymSeries::zero(self.lo, self.hi),
        }
    }
}

/// Lower-level grading over pre-expanded numeric factor series; `grade`
/// feeds it from `FactorExpr`s, tests feed it synthetic series.
pub fn grade_series_terms(
    terms: Vec<(i64, Rational, LaurentSeries, Family)>,
    s0: &Rational,
    lo: i64,
    hi: i64,
    kb: &KnowledgeBase,
) -> Result<GradedExpansion> {
    let ctx = &kb.ctx;
    let prec = ctx.bits();
    let mut out = GradedExpansion {
        center: s0.clone(),
        lo,
        hi,
        buckets: BTreeMap::new(),
    };
    for (alpha, beta, fs, fam) in terms {
        if !(-1..=1).contains(&alpha) {
            return Err(Error::Usage("grade: alpha must be -1, 0 or 1".into()));
        }
        let fam_point = Rational::from(s0 + &fam.arg_shift);
        let po = kb.pole_order(fam.m, fam.r, &fam_point);
        let flead = if fs.is_zero() { 0 } else { fs.lead_exp() };
        let plo = flead - po;
        // symbolic product P_i = Σ_{d+t=i} atom(d) · factor_t
        let mut prod = SymSeries::zero(plo, hi);
        if !fs.is_zero() {
            for i in plo..=hi {
                let mut c = SymbolicCoeff::zero();
                let d_min = -po;
                let d_max = if fam.r == 0 { 0 } else { i - flead };
                for d in d_min..=d_max {
                    let t = i - d;
                    if t < flead || t > fs.trunc_order() {
                        continue;
                    }
                    let coeff = fs.coeff(t)?;
                    if let Some(atom) = kb.atom(fam.m, fam.r, d, fam_point.clone()) {
                        c.add_assign(&SymbolicCoeff::single(atom, coeff), prec);
                    }
                }
                c.normalize(ctx);
                prod.coeffs[(i - plo) as usize] = c;
            }
        }
        let exp_val = Rational::from(&beta + Rational::from(s0 * rat_i(alpha)));
        let kmax = if alpha == 0 { 0 } else { 2 };
        let mut kfact = 1i64;
        for k in 0..=kmax {
            if k > 0 {
                kfact *= k;
            }
            // contribution α^k/k! · ε^k · P(ε)
            let mut shifted = SymSeries::zero(prod.lo + k, hi);
            for idx in shifted.lo..=hi {
                let src = idx - k;
                if src > prod.hi() {
                    continue;
                }
                let mut c = prod.at(src);
                let sign = if alpha < 0 && k % 2 == 1 { -1 } else { 1 };
                let mut z = Complex::with_val(prec, sign);
                z /= Float::with_val(prec, kfact as u32);
                c.scale(&z);
                shifted.coeffs[(idx - shifted.lo) as usize] = c;
            }
            let key = (exp_val.clone(), k as u8);
            match out.buckets.get_mut(&key) {
                Some(b) => b.add_assign(&shifted, prec),
                None => {
                    out.buckets.insert(key, shifted);
                }
            }
        }
    }
    // clip every bucket window to [lo, hi]
    for b in out.buckets.values_mut() {
        if b.lo > lo {
            let mut padded = SymSeries::zero(lo, hi);
            for idx in b.lo..=b.hi().min(hi) {
                padded.coeffs[(idx - lo) as usize] = b.at(idx);
            }
            *b = padded;
        }
    }
    Ok(out)
}

/// Grade a constant-term expansion at s0 on the Laurent window [lo, hi].
pub fn grade(
    terms: &[ExpansionTerm],
    s0: &Rational,
    lo: i64,
    hi: i64,
    kb: &KnowledgeBase,
) -> Result<GradedExpansion> {
    let mut prepared = Vec::with_capacity(terms.len());
    for t in terms {
        let fam_point = Rational::from(s0 + &t.family.arg_shift);
        let po = kb.pole_order(t.family.m, t.family.r, &fam_point);
        let fs = factor_series(&t.factor, s0, hi + po, &kb.ctx)?;
        prepared.push((t.alpha, t.beta.clone(), fs, t.family.clone()));
    }
    grade_series_terms(prepared, s0, lo, hi, kb)
}

/// Per-bucket symbolic coefficients at one fixed Laurent index.
#[derive(Clone, Debug, Default)]
pub struct CoeffTable {
    pub entries: BTreeMap<(Rational, u8), SymbolicCoeff>,
}

impl CoeffTable {
    pub fn from_graded(ge: &GradedExpansion, idx: i64) -> Self {
        let mut entries = BTreeMap::new();
        for (key, series) in &ge.buckets {
            let c = series.at(idx);
            if !c.is_empty() {
                entries.insert(key.clone(), c);
            }
        }
        CoeffTable { entries }
    }

    pub fn scale(&mut self, z: &Complex) {
        for c in self.entries.values_mut() {
            c.scale(z);
        }
    }

    pub fn add_scaled(&mut self, other: &CoeffTable, z: &Complex, prec: u32) {
        for (k, c) in &other.entries {
            let entry = self.entries.entry(k.clone()).or_default();
            entry.add_scaled(c, z, prec);
        }
    }

    pub fn sub(&self, other: &CoeffTable, prec: u32) -> CoeffTable {
        let mut out = self.clone();
        out.add_scaled(other, &Complex::with_val(prec, -1), prec);
        out
    }

    pub fn substitute(
        &self,
        kb: &KnowledgeBase,
        skip: &[Atom],
    ) -> Result<(CoeffTable, Vec<(String, Atom, (Rational, u8))>)> {
        let mut out = CoeffTable::default();
        let mut log = Vec::new();
        for (k, c) in &self.entries {
            let (s, steps) = kb.substitute_with_skip(c, skip)?;
            for (rule, atom) in steps {
                log.push((rule, atom, k.clone()));
            }
            if !s.is_empty() {
                out.entries.insert(k.clone(), s);
            }
        }
        Ok((out, log))
    }

    pub fn max_mag(&self, prec: u32) -> Float {
        let mut m = Float::new(prec);
        for c in self.entries.values() {
            let a = c.max_mag(prec);
            if a > m {
                m = a;
            }
        }
        m
    }

    pub fn get(&self, key: &(Rational, u8)) -> SymbolicCoeff {
        self.entries.get(key).cloned().unwrap_or_default()
    }
}

/// Numeric evaluation of a pure-unit graded expansion at |a| = a, s = s0 + e:
/// Σ_buckets a^{exp}·(ln a)^k · Σ_i coeff_i e^i. Used by the completeness
/// property test against direct term evaluation.
pub fn eval_unit_graded(ge: &GradedExpansion, a: &Float, e: &Float, prec: u32) -> Result<Float> {
    let ln_a = Float::with_val(prec, a.ln_ref());
    let mut total = Float::new(prec);
    for ((exp, k), series) in &ge.buckets {
        let mut w = Float::with_val(prec, exp);
        w *= &ln_a;
        let mut term = w.exp(); // a^{exp}
        for _ in 0..*k {
            term *= &ln_a;
        }
        let mut poly = Float::new(prec);
        let mut epow = Float::with_val(prec, 1);
        for idx in series.lo..=series.hi() {
            if idx < 0 {
                // negative powers: multiply separately
                let c = series.at(idx);
                let coeff = c.coeff_of(&Atom::Unit, prec).real().clone();
                let mut ep = Float::with_val(prec, e.pow(idx as i32));
                ep *= coeff;
                poly += ep;
                continue;
            }
            if idx > 0 {
                epow *= e;
            } else {
                epow = Float::with_val(prec, 1);
            }
            let c = series.at(idx);
            let coeff = c.coeff_of(&Atom::Unit, prec).real().clone();
            poly += coeff * &epow;
        }
        term *= poly;
        total += term;
    }
    Ok(total)
}

use rug::ops::Pow;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::kb::RuleSet;
    use crate::precision::PrecisionContext;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(50)
    }

    #[test]
    fn constant_term_cases() {
        // Siegel case: two terms with H
        let t = constant_term(5, 5).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].alpha, 1);
        assert_eq!(t[0].beta, rat_i(2));
        assert_eq!(t[0].family, Family { m: 4, r: 4, arg_shift: rat(1, 2) });
        assert_eq!(t[1].alpha, -1);
        assert_eq!(t[1].factor, make_factor(FactorKind::H, 5, 0).unwrap());
        assert_eq!(t[1].family.arg_shift, rat(-1, 2));

        // rank one: unit family first, exponent (1, m-1)
        let t = constant_term(4, 1).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t[0].alpha, 1);
        assert_eq!(t[0].beta, rat_i(3));
        assert_eq!(t[0].family.r, 0);
        assert_eq!(t[2].family.r, 0);

        // middle case (3,2): exponents (1, m-(r+1)/2), (0, r), (-1, ·)
        let t = constant_term(3, 2).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t[0].beta, rat(3, 2));
        assert_eq!(t[1].beta, rat_i(2));
        assert_eq!(t[1].factor, make_factor(FactorKind::F, 3, 2).unwrap());
        assert_eq!(t[2].factor, make_factor(FactorKind::G, 3, 2).unwrap());
        assert_eq!(t[2].family, Family { m: 2, r: 1, arg_shift: rat(-1, 2) });
    }

    #[test]
    fn grade_synthetic_exp_over_pole() {
        // single term |a|^{s+1}·(1/ε)·unit at s0 = 0:
        // bucket (1,0) has ε^{-1} coefficient 1; bucket (1,1) has ε^0 coeff 1
        let ctx = ctx();
        let kb = KnowledgeBase::new(&ctx, RuleSet::none());
        let one = ctx.complex_from_real(ctx.real(1));
        let pole = LaurentSeries::new(rat_i(0), -1, vec![one.clone(), ctx.complex_zero(), ctx.complex_zero(), ctx.complex_zero()], &ctx);
        let ge = grade_series_terms(
            vec![(1, rat_i(1), pole, Family::unit(3))],
            &rat_i(0),
            -2,
            2,
            &kb,
        )
        .unwrap();
        let b0 = ge.extract(&rat_i(1), 0);
        assert_eq!(
            b0.at(-1).coeff_of(&Atom::Unit, ctx.bits()).real().to_f64(),
            1.0
        );
        let b1 = ge.extract(&rat_i(1), 1);
        assert_eq!(
            b1.at(0).coeff_of(&Atom::Unit, ctx.bits()).real().to_f64(),
            1.0
        );
        // log degree 2 empty at these indices
        let b2 = ge.extract(&rat_i(1), 2);
        assert!(b2.at(0).is_empty());
        assert_eq!(
            b2.at(1).coeff_of(&Atom::Unit, ctx.bits()).real().to_f64(),
            0.5
        );
    }

    #[test]
    fn boundary_display_structure_r2() {
        // the index -1 grading of the (6,2) constant term at 3/2 is
        //   |a|^6·E_{-1}^{(5,1)}(2) + |a|^2·[E_{-1}^{(5,2)}(3/2)F_0 + E_{-2}F_1]
        //   + |a|^3·E_{-1}^{(5,1)}(1)·G_0
        use crate::calculus::kb::KnowledgeBase;
        use crate::factor::factor_series;
        let ctx = ctx();
        let prec = ctx.bits();
        let kb = KnowledgeBase::new(&ctx, RuleSet::all());
        let terms = constant_term(6, 2).unwrap();
        let ge = grade(&terms, &rat(3, 2), -3, 2, &kb).unwrap();

        let top = ge.extract(&rat_i(6), 0).at(-1);
        assert_eq!(top.terms.len(), 1);
        let a_top = Atom::E { m: 5, r: 1, d: -1, s0: rat_i(2) };
        assert!((top.coeff_of(&a_top, prec).real().to_f64() - 1.0).abs() < 1e-40);

        let mid = ge.extract(&rat_i(2), 0).at(-1);
        let a_m1 = Atom::E { m: 5, r: 2, d: -1, s0: rat(3, 2) };
        let a_m2 = Atom::E { m: 5, r: 2, d: -2, s0: rat(3, 2) };
        assert!(mid.terms.contains_key(&a_m1));
        assert!(mid.terms.contains_key(&a_m2)); // killed later by the no-pole rule
        let f0 = factor_series(&make_factor(FactorKind::F, 6, 2).unwrap(), &rat(3, 2), 0, &ctx)
            .unwrap()
            .coeff(0)
            .unwrap()
            .real()
            .to_f64();
        assert!((mid.coeff_of(&a_m1, prec).real().to_f64() - f0).abs() < 1e-12);

        let low = ge.extract(&rat_i(3), 0).at(-1);
        let a_g = Atom::E { m: 5, r: 1, d: -1, s0: rat_i(1) };
        let g0 = factor_series(&make_factor(FactorKind::G, 6, 2).unwrap(), &rat(3, 2), 0, &ctx)
            .unwrap()
            .coeff(0)
            .unwrap()
            .real()
            .to_f64();
        assert!((low.coeff_of(&a_g, prec).real().to_f64() - g0).abs() < 1e-12);

        // the mid bucket reduces to the display after the no-pole rule
        let (sub, _) = kb.substitute_with_skip(&mid, &[a_m1.clone()]).unwrap();
        assert!(!sub.terms.contains_key(&a_m2));
    }

    #[test]
    fn grade_no_negative_indices_for_regular_family() {
        let ctx = ctx();
        let kb = KnowledgeBase::new(&ctx, RuleSet::none());
        // E^{(4,4)}(s+1/2) at s0 = 2: point 5/2 beyond the ladder, order 0
        let one = ctx.complex_from_real(ctx.real(1));
        let flat = LaurentSeries::constant(rat_i(2), one, 3, &ctx);
        let fam = Family { m: 4, r: 4, arg_shift: rat(1, 2) };
        let ge = grade_series_terms(vec![(1, rat_i(0), flat, fam)], &rat_i(2), -2, 2, &kb).unwrap();
        for series in ge.buckets.values() {
            for idx in series.lo..=series.hi() {
                if idx < 0 {
                    assert!(series.at(idx).is_empty(), "negative index {idx} non-empty");
                }
            }
        }
    }

    #[test]
    fn extraction_partitions_unit_expansion() {
        // pure-numeric terms: Σ over buckets at random (a, s) reproduces
        // direct evaluation of |a|^{αs+β}·factor(s)
        let ctx = ctx();
        let kb = KnowledgeBase::new(&ctx, RuleSet::none());
        let prec = ctx.bits();
        let s0 = rat(3, 2);
        // terms: |a|^{s+1}·(2 + ε) and |a|^{-s+3}·(1/ε + 5)
        let c2 = ctx.complex_from_real(ctx.real(2));
        let one = ctx.complex_from_real(ctx.real(1));
        let c5 = ctx.complex_from_real(ctx.real(5));
        let t1 = LaurentSeries::new(s0.clone(), 0, vec![c2, one.clone(), ctx.complex_zero()], &ctx);
        let t2 = LaurentSeries::new(s0.clone(), -1, vec![one.clone(), c5, ctx.complex_zero()], &ctx);
        let ge = grade_series_terms(
            vec![
                (1, rat_i(1), t1, Family::unit(2)),
                (-1, rat_i(3), t2, Family::unit(2)),
            ],
            &s0,
            -2,
            2,
            &kb,
        )
        .unwrap();
        for (aa, ee) in [(0.7f64, 0.01f64), (1.9, -0.02), (3.3, 0.005)] {
            let a = ctx.real(aa);
            let e = ctx.real(ee);
            let got = eval_unit_graded(&ge, &a, &e, prec).unwrap();
            // direct: a^{s0+e+1}(2 + e) + a^{-(s0+e)+3}(1/e + 5)
            let s = Float::with_val(prec, &Float::with_val(prec, &s0) + &e);
            let la = a.clone().ln();
            let d1 = {
                let mut w = Float::with_val(prec, &s + &Float::with_val(prec, 1));
                w *= &la;
                w.exp() * (Float::with_val(prec, 2) + &e)
            };
            let d2 = {
                let mut w = Float::with_val(prec, 3) - &s;
                w *= &la;
                w.exp() * (e.clone().recip() + Float::with_val(prec, 5))
            };
            let want = d1 + d2;
            let diff = Float::with_val(prec, &got - &want).abs();
            let scale = Float::with_val(prec, want.abs_ref());
            // e^{±εL} truncated at L²·ε²: three-term Taylor error ~ (e·ln a)³
            let tol = (ee.abs() * aa.ln().abs()).powi(3) * 10.0 + 1e-40;
            assert!(
                (diff / scale).to_f64() < tol,
                "a={aa} e={ee}"
            );
        }
    }
}
