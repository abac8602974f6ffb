//! Riemann zeta Taylor/Laurent data at exact rational centers, by
//! Euler–Maclaurin summation carried out in truncated power-series
//! arithmetic over ε = s - center.
//!
//! Differentiating term-wise is free in this representation: n^{-s} expands
//! to n^{-c}·Σ (-ln n)^j ε^j / j!, the boundary term N^{1-s}/(s-1) supplies
//! the pole (and the Stieltjes constants) when the center is 1, and the
//! Bernoulli correction terms are short polynomial products. The tail cutoff
//! is chosen from the standard remainder bound and rechecked numerically.

use crate::error::{Error, Result};
use crate::laurent::LaurentSeries;
use crate::precision::{is_integer, to_integer, PrecisionContext};
use rug::{Complex, Float, Integer, Rational};
use std::sync::Mutex;

static BERNOULLI: Mutex<Vec<Rational>> = Mutex::new(Vec::new());

/// Bernoulli number B_n (B_1 = -1/2), exact.
pub fn bernoulli(n: usize) -> Rational {
    let mut cache = BERNOULLI.lock().unwrap();
    if cache.is_empty() {
        cache.push(Rational::from(1));
    }
    while cache.len() <= n {
        let m = cache.len();
        // B_m = -1/(m+1) Σ_{k<m} C(m+1,k) B_k
        let mut acc = Rational::new();
        let mut binom = Integer::from(1); // C(m+1, 0)
        for k in 0..m {
            acc += Rational::from((&binom, Integer::from(1))) * &cache[k];
            binom = binom * (m + 1 - k) / (k + 1);
        }
        acc /= Rational::from(-((m as i64) + 1));
        cache.push(acc);
    }
    cache[n].clone()
}

/// Pick Euler–Maclaurin cutoffs (N, K) so that the remainder after K
/// Bernoulli terms with summation cutoff N is below 10^{-target_digits}
/// at the real point `sigma`. Magnitudes estimated with f64 logs.
fn choose_cutoffs(sigma: f64, target_digits: f64) -> (usize, usize) {
    let t = target_digits * std::f64::consts::LN_10;
    let mut k = (target_digits * 0.75).ceil() as usize + 12;
    loop {
        let n = k.max((sigma.abs() as usize) + 2).max(8);
        // ln |B_{2K+2}/(2K+2)!| ~ ln 2 - (2K+2) ln(2π)
        let mut lb = std::f64::consts::LN_2 - (2.0 * k as f64 + 2.0) * (2.0 * std::f64::consts::PI).ln();
        // ln |(s)_{2K+1}| = Σ_{i=0}^{2K} ln|σ+i|
        for i in 0..=(2 * k) {
            let a = (sigma + i as f64).abs().max(1e-9);
            lb += a.ln();
        }
        lb += (-sigma - 2.0 * k as f64 - 1.0) * (n as f64).ln();
        if lb < -t - 8.0 {
            return (n, k);
        }
        k = k + k / 4 + 4;
        if k > 100_000 {
            // unreachable for sane inputs; guards the loop
            return (k, k);
        }
    }
}

/// Taylor (or Laurent, at center 1) expansion of ζ(s) at a rational center,
/// as real coefficient vectors. Returns (lead, coeffs).
fn em_zeta_real(center: &Rational, order: usize, prec: u32) -> (i64, Vec<Float>) {
    let cf = Float::with_val(prec, center);
    let sigma = cf.to_f64();
    let digits = prec as f64 / 3.3219280948873627;
    let (n_cut, k_cut) = choose_cutoffs(sigma, digits + (order as f64) * 1.5);
    let pole = *center == 1;
    let len = order + 1;

    // Σ_{n=1}^{N-1} n^{-s}
    let mut reg = vec![Float::new(prec); len];
    reg[0] += 1u32;
    for n in 2..n_cut {
        let w = Float::with_val(prec, n).ln();
        let mut t = Float::with_val(prec, &cf * &w);
        t = (-t).exp(); // n^{-c}
        reg[0] += &t;
        for item in reg.iter_mut().take(len).skip(1).enumerate() {
            let (jm1, slot) = item;
            let j = jm1 + 1;
            t *= &w;
            t /= j as u32;
            t = -t;
            *slot += &t;
        }
    }

    // e^{-ε ln N} coefficients, one extra for the pole shift
    let u = Float::with_val(prec, n_cut).ln();
    let mut epoly = vec![Float::new(prec); len + 1];
    epoly[0] = Float::with_val(prec, 1);
    for j in 1..=len {
        let mut t = Float::with_val(prec, &epoly[j - 1] * &u);
        t /= j as u32;
        epoly[j] = -t;
    }

    // N^{1-s}/(s-1)
    let n1c = {
        let mut e = Float::with_val(prec, 1 - cf.clone());
        e *= &u;
        e.exp()
    };
    let mut tail1_lead0 = vec![Float::new(prec); len]; // regular version
    let mut tail1_pole = vec![Float::new(prec); len + 1]; // coefficients of ε^{-1}..ε^{order}
    if pole {
        for j in 0..=len {
            if j < tail1_pole.len() {
                tail1_pole[j] = Float::with_val(prec, &epoly[j] * &n1c);
            }
        }
    } else {
        // divide by (c-1) + ε as a geometric series
        let cm1 = Float::with_val(prec, &cf - &Float::with_val(prec, 1));
        let mut binv = Vec::with_capacity(len);
        let mut cur = Float::with_val(prec, 1) / &cm1;
        binv.push(cur.clone());
        for _ in 1..len {
            cur = -(cur / &cm1);
            binv.push(cur.clone());
        }
        for (k, slot) in tail1_lead0.iter_mut().enumerate() {
            let mut acc = Float::new(prec);
            for i in 0..=k {
                acc += Float::with_val(prec, &epoly[i] * &binv[k - i]);
            }
            acc *= &n1c;
            *slot = acc;
        }
    }

    // N^{-s}/2
    let nmc = {
        let mut e = Float::with_val(prec, -cf.clone());
        e *= &u;
        e.exp()
    };
    let mut tail2 = vec![Float::new(prec); len];
    for j in 0..len {
        tail2[j] = Float::with_val(prec, &epoly[j] * &nmc);
        tail2[j] /= 2u32;
    }

    // Bernoulli corrections: Σ_k B_{2k}/(2k)! (s)_{2k-1} N^{-s-2k+1}
    let mut bern = vec![Float::new(prec); len];
    let mut poch = vec![Float::new(prec); len]; // (s)_{2k-1} as ε-poly
    poch[0] = cf.clone();
    if len > 1 {
        poch[1] = Float::with_val(prec, 1);
    }
    let mut fact = Integer::from(2); // (2k)!
    let nsq_inv = {
        let mut t = Float::with_val(prec, -2 * (u.clone()));
        t = t.exp();
        t
    };
    let mut scal = Float::with_val(prec, &nmc * &Float::with_val(prec, n_cut).recip()); // N^{-c-1}
    for k in 1..=k_cut {
        if k > 1 {
            // multiply poch by (c + 2k-3 + ε)(c + 2k-2 + ε)
            for step in 0..2 {
                let a = Float::with_val(prec, &cf + &Float::with_val(prec, (2 * k - 3 + step) as u32));
                let mut next = vec![Float::new(prec); len];
                for j in 0..len {
                    next[j] = Float::with_val(prec, &poch[j] * &a);
                    if j > 0 {
                        next[j] += &poch[j - 1];
                    }
                }
                poch = next;
            }
            fact *= Integer::from((2 * k - 1) * 2 * k);
            scal *= &nsq_inv;
        }
        let bk = bernoulli(2 * k);
        let mut coef = Float::with_val(prec, &bk);
        coef /= Float::with_val(prec, &fact);
        coef *= &scal;
        // bern += coef · conv(poch, epoly)
        for j in 0..len {
            let mut acc = Float::new(prec);
            for i in 0..=j {
                acc += Float::with_val(prec, &poch[i] * &epoly[j - i]);
            }
            acc *= &coef;
            bern[j] += &acc;
        }
    }

    if pole {
        let mut out = vec![Float::new(prec); len + 1];
        out[0] = tail1_pole[0].clone();
        for j in 0..len {
            let mut v = Float::with_val(prec, &reg[j] + &tail2[j]);
            v += &bern[j];
            v += &tail1_pole[j + 1];
            out[j + 1] = v;
        }
        (-1, out)
    } else {
        let mut out = vec![Float::new(prec); len];
        for j in 0..len {
            let mut v = Float::with_val(prec, &reg[j] + &tail1_lead0[j]);
            v += &tail2[j];
            v += &bern[j];
            out[j] = v;
        }
        (0, out)
    }
}

fn to_series(
    center: &Rational,
    lead: i64,
    reals: Vec<Float>,
    ctx: &PrecisionContext,
) -> LaurentSeries {
    let coeffs: Vec<Complex> = reals
        .into_iter()
        .map(|x| {
            let x = Float::with_val(ctx.bits(), x);
            ctx.complex_from_real(x)
        })
        .collect();
    LaurentSeries::new(center.clone(), lead, coeffs, ctx)
}

/// ζ(s) expanded at a rational center: Taylor coefficients up to
/// (s-center)^order, or the Laurent series 1/(s-1) + Σ (-1)^n γ_n (s-1)^n/n!
/// when the center is 1.
pub fn zeta_series(center: &Rational, order: i64, ctx: &PrecisionContext) -> Result<LaurentSeries> {
    if order < 0 {
        return Err(Error::Usage("zeta_series: order must be >= 0".into()));
    }
    let prec = ctx.bits() + 64;
    let (lead, reals) = em_zeta_real(center, order as usize, prec);
    Ok(to_series(center, lead, reals, ctx))
}

/// ζ(scale·s + shift) expanded at `center`: chain rule applied to the
/// expansion at scale·center + shift.
pub fn zeta_scaled_series(
    scale: &Rational,
    shift: &Rational,
    center: &Rational,
    order: i64,
    ctx: &PrecisionContext,
) -> Result<LaurentSeries> {
    if *scale == 0 {
        return Err(Error::Usage("zeta_scaled_series: scale must be nonzero".into()));
    }
    let inner = Rational::from(scale * center) + shift;
    let s = zeta_series(&inner, order, ctx)?;
    let mut s = s.rescale_variable(scale);
    s.center = center.clone();
    Ok(s)
}

/// ζ^S(s) = ζ(s)·Π_{p∈S}(1-p^{-s}), expanded via the scaled-argument form
/// ζ^S(scale·s+shift) at `center`. Finite primes only.
pub fn zeta_partial_scaled_series(
    primes: &[u64],
    scale: &Rational,
    shift: &Rational,
    center: &Rational,
    order: i64,
    ctx: &PrecisionContext,
) -> Result<LaurentSeries> {
    let mut out = zeta_scaled_series(scale, shift, center, order, ctx)?;
    let prec = ctx.bits();
    let hi = out.trunc_order();
    for &p in primes {
        // 1 - p^{-(scale·s+shift)} = 1 - p^{-a}·e^{-scale·ε·ln p}
        let a = Rational::from(scale * center) + shift;
        let lnp = Float::with_val(prec, p).ln();
        let pa = {
            let mut e = Float::with_val(prec, -Float::with_val(prec, &a));
            e *= &lnp;
            e.exp()
        };
        let w = Float::with_val(prec, -Float::with_val(prec, scale)) * &lnp;
        let mut coeffs = Vec::with_capacity((hi + 1).max(1) as usize);
        let mut term = Float::with_val(prec, &pa);
        for j in 0..=hi.max(0) {
            if j == 0 {
                let v = Float::with_val(prec, 1) - &term;
                coeffs.push(ctx.complex_from_real(v));
            } else {
                term *= &w;
                term /= Float::with_val(prec, j);
                coeffs.push(ctx.complex_from_real(Float::with_val(prec, -term.clone())));
            }
        }
        let euler = LaurentSeries::new(center.clone(), 0, coeffs, ctx);
        out = out.mul(&euler)?;
    }
    Ok(out)
}

/// True if the center is a trivial zero of ζ (negative even integer).
pub fn is_trivial_zero(center: &Rational) -> bool {
    if !is_integer(center) {
        return false;
    }
    match to_integer(center) {
        Some(n) => n < 0 && n % 2 == 0,
        None => false,
    }
}
