//! The knowledge base: static pole-order facts and the substitution rules
//! that replace Eisenstein atoms by combinations of "smaller" ones.
//!
//! Pole facts are structural data, consumed during grading to size the
//! Laurent window of every family; substitution rules re-play the
//! established first-term identities, the no-pole lemmas, the near-boundary
//! constant λ, and the Siegel functional equation at -1/2. Rules only ever
//! map non-terminal atoms toward Siegel atoms and the unit, so substitution
//! terminates; a depth guard protects against misconfigured rule sets.

use super::atom::{Atom, SymbolicCoeff};
use crate::constants::{c_mr, c_r_routes, d_mr, Route};
use crate::error::{Error, Result};
use crate::factor::{factor_series, lambda_m, make_factor, FactorKind};
use crate::precision::{is_integer, rat, rat_i, PrecisionContext};
use rug::{Complex, Rational};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PoleTable {
    /// The full static table.
    Standard,
    /// Non-Siegel orders weakened to 2 everywhere (used by the no-pole
    /// derivations so that their conclusions are not assumed).
    Weak,
}

/// Maximum pole order the table grants E^{(m,r)} at s0.
pub fn static_pole_order(table: PoleTable, m: i64, r: i64, s0: &Rational) -> i64 {
    if r == 0 {
        return 0;
    }
    if r == m {
        // Siegel: at most simple poles, located on the arithmetic ladder
        // {s > 0, s <= (m-1)/2, s ≡ (m-1)/2 mod 1}; regular at s <= 0.
        let rho = rat(m - 1, 2);
        let diff = Rational::from(&rho - s0);
        if *s0 > 0 && *s0 <= rho && is_integer(&diff) {
            1
        } else {
            0
        }
    } else {
        match table {
            PoleTable::Weak => 2,
            PoleTable::Standard => {
                if *s0 >= rat(r + 2, 2) {
                    1 // no double poles from (r+2)/2 on
                } else if m > 2 * r + 1 {
                    1 // first term range: simple poles only
                } else {
                    2
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RuleSet {
    pub no_pole_ii: bool,
    pub no_pole_iii: bool,
    pub first_b1: bool,
    pub first_a0: bool,
    pub first_b2: bool,
    pub lambda: bool,
    pub func_eq: bool,
}

impl RuleSet {
    pub fn all() -> Self {
        RuleSet {
            no_pole_ii: true,
            no_pole_iii: true,
            first_b1: true,
            first_a0: true,
            first_b2: true,
            lambda: true,
            func_eq: true,
        }
    }

    pub fn none() -> Self {
        RuleSet {
            no_pole_ii: false,
            no_pole_iii: false,
            first_b1: false,
            first_a0: false,
            first_b2: false,
            lambda: false,
            func_eq: false,
        }
    }
}

pub struct KnowledgeBase {
    pub ctx: PrecisionContext,
    pub table: PoleTable,
    pub rules: RuleSet,
    /// Exact-match overrides (derived facts; checked before the rule set).
    pub extra: BTreeMap<Atom, SymbolicCoeff>,
}

impl KnowledgeBase {
    pub fn new(ctx: &PrecisionContext, rules: RuleSet) -> Self {
        KnowledgeBase {
            ctx: ctx.clone(),
            table: PoleTable::Standard,
            rules,
            extra: BTreeMap::new(),
        }
    }

    pub fn pole_order(&self, m: i64, r: i64, s0: &Rational) -> i64 {
        static_pole_order(self.table, m, r, s0)
    }

    /// Build an atom, returning None when the pole table forces it to be the
    /// zero symbol (index below the granted pole order).
    pub fn atom(&self, m: i64, r: i64, d: i64, s0: Rational) -> Option<Atom> {
        if r == 0 {
            return if d == 0 { Some(Atom::Unit) } else { None };
        }
        if d < -self.pole_order(m, r, &s0) {
            None
        } else {
            Some(Atom::E { m, r, d, s0 })
        }
    }

    /// One rule application. Returns the replacement and the rule name, or
    /// None if the atom is terminal under the current rule set.
    fn apply_rule(&self, atom: &Atom, skip: &[Atom]) -> Result<Option<(SymbolicCoeff, String)>> {
        if skip.contains(atom) {
            return Ok(None);
        }
        if let Some(rep) = self.extra.get(atom) {
            return Ok(Some((rep.clone(), "derived".into())));
        }
        let (m, r, d, s0) = match atom {
            Atom::Unit => return Ok(None),
            Atom::E { m, r, d, s0 } => (*m, *r, *d, s0.clone()),
        };
        let prec = self.ctx.bits();
        let rho_r = rat(r + 1, 2);

        if r < m && r >= 1 {
            // no_pole (ii): E_{-2}^{(2r+1,r)}((r+1)/2) = 0
            if self.rules.no_pole_ii && m == 2 * r + 1 && d == -2 && s0 == rho_r {
                return Ok(Some((SymbolicCoeff::zero(), "no-pole-ii".into())));
            }
            // no_pole (iii), valid for m >= 2r+2: E_{-1}^{(m,r)}((r+3)/2) = 0
            if self.rules.no_pole_iii && m >= 2 * r + 2 && d == -1 && s0 == rat(r + 3, 2) {
                return Ok(Some((SymbolicCoeff::zero(), "no-pole-iii".into())));
            }
            // first term identity, first term range
            if self.rules.first_b1 && m > 2 * r + 1 && d == -1 && s0 == rho_r {
                let c = c_mr(m, r, Route::Closed, &self.ctx)?.value;
                let target = Atom::E {
                    m,
                    r: m,
                    d: -1,
                    s0: rat(m - 2 * r - 1, 2),
                };
                let z = Complex::with_val(prec, (c, rug::Float::new(prec)));
                return Ok(Some((SymbolicCoeff::single(target, z), "first-b1".into())));
            }
            // first term identity on the boundary
            if self.rules.first_a0 && m == 2 * r + 1 && d == -1 && s0 == rho_r {
                let (c, _) = c_r_routes(r, &self.ctx)?;
                let target = Atom::E {
                    m,
                    r: m,
                    d: 0,
                    s0: rat_i(0),
                };
                let z = Complex::with_val(prec, (c, rug::Float::new(prec)));
                return Ok(Some((SymbolicCoeff::single(target, z), "first-a0".into())));
            }
            // first term identity, second term range
            if self.rules.first_b2 && m >= r + 1 && m <= 2 * r && d == -2 && s0 == rho_r {
                let dv = d_mr(m, r, &self.ctx)?.value;
                let target = Atom::E {
                    m,
                    r: m,
                    d: -1,
                    s0: rat(2 * r - m + 1, 2),
                };
                let z = Complex::with_val(prec, (dv, rug::Float::new(prec)));
                return Ok(Some((SymbolicCoeff::single(target, z), "first-b2".into())));
            }
        }
        if r == m && m >= 2 {
            // near-boundary Siegel residue is the constant λ_m
            if self.rules.lambda && d == -1 && s0 == rat(m - 1, 2) {
                let l = lambda_m(m, &self.ctx)?;
                let z = Complex::with_val(prec, (l, rug::Float::new(prec)));
                return Ok(Some((SymbolicCoeff::unit(z), "lambda".into())));
            }
            // functional equation E(s) = β_m(s) E(-s), applied at -1/2
            if self.rules.func_eq && s0 == rat(-1, 2) && d >= 0 {
                let beta = make_factor(FactorKind::Beta, m, 0)?;
                let bs = factor_series(&beta, &rat(-1, 2), d + 2, &self.ctx)?;
                let z_ord = bs.lead_exp(); // zero order of β at -1/2
                let mut rep = SymbolicCoeff::zero();
                for a in z_ord..=(d + 1) {
                    let b = d - a;
                    if b < -1 {
                        continue;
                    }
                    let mut beta_a = bs.coeff(a)?;
                    if b % 2 != 0 {
                        beta_a = -beta_a; // (-1)^b from E(1/2 - ε)
                    }
                    if let Some(target) = self.atom(m, m, b, rat(1, 2)) {
                        rep.add_assign(&SymbolicCoeff::single(target, beta_a), prec);
                    }
                }
                rep.normalize(&self.ctx);
                return Ok(Some((rep, "func-eq".into())));
            }
        }
        Ok(None)
    }

    /// Substitute to fixpoint, skipping the listed atoms (a script's solve
    /// targets stay symbolic). Returns the result and the rule applications.
    pub fn substitute_with_skip(
        &self,
        sc: &SymbolicCoeff,
        skip: &[Atom],
    ) -> Result<(SymbolicCoeff, Vec<(String, Atom)>)> {
        let prec = self.ctx.bits();
        let mut cur = sc.clone();
        let mut log = Vec::new();
        for _round in 0..64 {
            let mut next = SymbolicCoeff::zero();
            let mut changed = false;
            for (atom, coeff) in &cur.terms {
                match self.apply_rule(atom, skip)? {
                    Some((rep, rule)) => {
                        changed = true;
                        log.push((rule, atom.clone()));
                        next.add_scaled(&rep, coeff, prec);
                    }
                    None => {
                        next.add_assign(&SymbolicCoeff::single(atom.clone(), coeff.clone()), prec);
                    }
                }
            }
            next.normalize(&self.ctx);
            if !changed {
                return Ok((next, log));
            }
            cur = next;
        }
        Err(Error::Internal(
            "substitution did not reach a fixpoint".into(),
        ))
    }

    pub fn substitute(&self, sc: &SymbolicCoeff) -> Result<SymbolicCoeff> {
        Ok(self.substitute_with_skip(sc, &[])?.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(50)
    }

    #[test]
    fn pole_table_facts() {
        // Siegel ladder
        assert_eq!(static_pole_order(PoleTable::Standard, 4, 4, &rat(3, 2)), 1);
        assert_eq!(static_pole_order(PoleTable::Standard, 4, 4, &rat(1, 2)), 1);
        assert_eq!(static_pole_order(PoleTable::Standard, 4, 4, &rat_i(1)), 0);
        assert_eq!(static_pole_order(PoleTable::Standard, 4, 4, &rat_i(0)), 0);
        assert_eq!(static_pole_order(PoleTable::Standard, 4, 4, &rat(-1, 2)), 0);
        assert_eq!(static_pole_order(PoleTable::Standard, 5, 5, &rat_i(2)), 1);
        assert_eq!(static_pole_order(PoleTable::Standard, 5, 5, &rat(5, 2)), 0);
        // convergent region
        assert_eq!(static_pole_order(PoleTable::Standard, 3, 3, &rat_i(2)), 0);
        // non-Siegel
        assert_eq!(static_pole_order(PoleTable::Standard, 4, 2, &rat(3, 2)), 2);
        assert_eq!(static_pole_order(PoleTable::Standard, 4, 2, &rat_i(2)), 1);
        assert_eq!(static_pole_order(PoleTable::Standard, 6, 2, &rat(3, 2)), 1);
        assert_eq!(static_pole_order(PoleTable::Weak, 6, 2, &rat(3, 2)), 2);
    }

    #[test]
    fn substitute_no_rule_is_identity() {
        let ctx = ctx();
        let kb = KnowledgeBase::new(&ctx, RuleSet::all());
        let atom = Atom::E { m: 6, r: 3, d: 0, s0: rat_i(2) };
        let sc = SymbolicCoeff::single(atom.clone(), Complex::with_val(ctx.bits(), 5));
        let out = kb.substitute(&sc).unwrap();
        assert_eq!(out.terms.len(), 1);
        assert!(out.terms.contains_key(&atom));
    }

    #[test]
    fn no_pole_ii_rule_kills_atom() {
        let ctx = ctx();
        let kb = KnowledgeBase::new(&ctx, RuleSet::all());
        // E_{-2}^{(2r+1,r)}((r+1)/2) -> 0 at r = 4
        let atom = Atom::E { m: 9, r: 4, d: -2, s0: rat(5, 2) };
        let sc = SymbolicCoeff::single(atom, Complex::with_val(ctx.bits(), 1));
        let out = kb.substitute(&sc).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn first_b2_substitution_example() {
        // E_{-2}^{(2r,r-1)}(r/2) -> c_{2r,r-1} E_{-1}^{(2r,2r)}(1/2) at r = 3:
        // first_b1 on E_{-1}^{(6,2)}(3/2)
        let ctx = ctx();
        let kb = KnowledgeBase::new(&ctx, RuleSet::all());
        let atom = Atom::E { m: 6, r: 2, d: -1, s0: rat(3, 2) };
        let sc = SymbolicCoeff::single(atom, Complex::with_val(ctx.bits(), 1));
        let out = kb.substitute(&sc).unwrap();
        assert_eq!(out.terms.len(), 1);
        let (target, coeff) = out.terms.iter().next().unwrap();
        assert_eq!(
            *target,
            Atom::E { m: 6, r: 6, d: -1, s0: rat(1, 2) }
        );
        let c = c_mr(6, 2, Route::Closed, &ctx).unwrap().value;
        let got = coeff.real().clone();
        let d = rug::Float::with_val(ctx.bits(), &got - &c).abs().to_f64();
        assert!(d < 1e-40);
    }

    #[test]
    fn func_eq_rewrite_shape() {
        // E_0^{(2r,2r)}(-1/2) = -β_{2r,1}(-1/2) E_{-1}^{(2r,2r)}(1/2)
        let ctx = ctx();
        let kb = KnowledgeBase::new(&ctx, RuleSet::all());
        let atom = Atom::E { m: 4, r: 4, d: 0, s0: rat(-1, 2) };
        let sc = SymbolicCoeff::single(atom, Complex::with_val(ctx.bits(), 1));
        let out = kb.substitute(&sc).unwrap();
        assert_eq!(out.terms.len(), 1);
        let target = Atom::E { m: 4, r: 4, d: -1, s0: rat(1, 2) };
        let got = out.coeff_of(&target, ctx.bits()).real().clone();
        // -β_{4,1}(-1/2) = -2ξ(4)/ξ(0) = 2ξ(4)
        let b = make_factor(FactorKind::Beta, 4, 0).unwrap();
        let b1 = factor_series(&b, &rat(-1, 2), 1, &ctx)
            .unwrap()
            .coeff(1)
            .unwrap()
            .real()
            .clone();
        let want = -b1;
        let d = rug::Float::with_val(ctx.bits(), &got - &want).abs().to_f64();
        assert!(d < 1e-40);
    }

    #[test]
    fn substitution_order_invariance() {
        // shuffling the insertion order of a combination does not change the
        // fixpoint (maps are ordered, rules are per-atom)
        let ctx = ctx();
        let kb = KnowledgeBase::new(&ctx, RuleSet::all());
        let prec = ctx.bits();
        let atoms = [
            Atom::E { m: 6, r: 2, d: -1, s0: rat(3, 2) },
            Atom::E { m: 9, r: 4, d: -2, s0: rat(5, 2) },
            Atom::E { m: 4, r: 4, d: 0, s0: rat(-1, 2) },
            Atom::Unit,
        ];
        let mut fwd = SymbolicCoeff::zero();
        for (i, a) in atoms.iter().enumerate() {
            fwd.add_assign(
                &SymbolicCoeff::single(a.clone(), Complex::with_val(prec, (i + 1) as u32)),
                prec,
            );
        }
        let mut rev = SymbolicCoeff::zero();
        for (i, a) in atoms.iter().enumerate().rev() {
            rev.add_assign(
                &SymbolicCoeff::single(a.clone(), Complex::with_val(prec, (i + 1) as u32)),
                prec,
            );
        }
        let x = kb.substitute(&fwd).unwrap();
        let y = kb.substitute(&rev).unwrap();
        assert_eq!(x.terms.len(), y.terms.len());
        for (a, c) in &x.terms {
            let d = Complex::with_val(prec, c - &y.coeff_of(a, prec));
            let mag = rug::Float::with_val(prec, d.abs_ref()).to_f64();
            assert!(mag < 1e-40);
        }
    }
}
