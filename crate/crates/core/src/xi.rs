//! The completed zeta function ξ(s) = π^{-s/2} Γ(s/2) ζ(s) over ℚ.
//!
//! ξ satisfies ξ(s) = ξ(1-s) and has simple poles exactly at s = 0, 1 with
//! residues -1 and +1. Following the residue convention used throughout this
//! crate, `xi_conv` returns those residues at 0 and 1 and the ordinary value
//! everywhere else; every "ξ(n)" in a constant formula means `xi_conv(n)`.
//!
//! Trivial-zero bookkeeping: at negative even centers the simple zero of ζ
//! and the pole of Γ(s/2) are cancelled by exact monomial division of each
//! factor before multiplying, so no 0×∞ ever reaches floating arithmetic.

use crate::error::Result;
use crate::gamma::archimedean_series;
use crate::laurent::LaurentSeries;
use crate::precision::PrecisionContext;
use crate::zeta::{is_trivial_zero, zeta_series};
use rug::{Float, Rational};
use std::collections::HashMap;
use std::sync::Mutex;

type CacheKey = (Rational, i64, u32);

static XI_CACHE: Mutex<Option<HashMap<CacheKey, LaurentSeries>>> = Mutex::new(None);

/// Laurent expansion of ξ at a rational center; pole order is exactly 1 at
/// centers 0 and 1, else 0.
pub fn xi_series(center: &Rational, order: i64, ctx: &PrecisionContext) -> Result<LaurentSeries> {
    let key = (center.clone(), order, ctx.decimal_digits);
    {
        let cache = XI_CACHE.lock().unwrap();
        if let Some(map) = cache.as_ref() {
            if let Some(hit) = map.get(&key) {
                return Ok(hit.clone());
            }
        }
    }
    let pad = order + 2;
    let out = if is_trivial_zero(center) {
        // ξ = [π^{-s/2}Γ(s/2)·(s-c)] · [ζ(s)/(s-c)]
        let am = archimedean_series(center, pad, ctx)?.shift(1);
        let ze = zeta_series(center, pad + 1, ctx)?.drop_lead_exact(ctx).shift(-1);
        am.mul(&ze)?.truncate_hi(order)
    } else {
        let am = archimedean_series(center, pad, ctx)?;
        let ze = zeta_series(center, pad, ctx)?;
        am.mul(&ze)?.truncate_hi(order)
    };
    let mut cache = XI_CACHE.lock().unwrap();
    cache
        .get_or_insert_with(HashMap::new)
        .insert(key, out.clone());
    Ok(out)
}

/// The convention table: ξ(0) and ξ(1) denote residues, every other argument
/// the ordinary value.
pub fn xi_conv(n: &Rational, ctx: &PrecisionContext) -> Result<Float> {
    if *n == 0 || *n == 1 {
        let s = xi_series(n, 0, ctx)?;
        debug_assert_eq!(s.lead_exp(), -1);
        return Ok(s.coeff(-1)?.real().clone());
    }
    let s = xi_series(n, 0, ctx)?;
    debug_assert_eq!(s.lead_exp(), 0);
    Ok(s.coeff(0)?.real().clone())
}

/// Laurent series in (s-center) of ξ(scale·s + shift).
pub fn xi_scaled_series(
    scale: &Rational,
    shift: &Rational,
    center: &Rational,
    order: i64,
    ctx: &PrecisionContext,
) -> Result<LaurentSeries> {
    if *scale == 0 {
        return Err(crate::Error::Usage(
            "xi_scaled_series: scale must be nonzero".into(),
        ));
    }
    let inner = Rational::from(scale * center) + shift;
    let s = xi_series(&inner, order, ctx)?;
    let mut s = s.rescale_variable(scale);
    s.center = center.clone();
    Ok(s)
}
