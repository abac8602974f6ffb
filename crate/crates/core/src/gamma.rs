//! The archimedean factor ζ_∞(s) = π^{-s/2} Γ(s/2) as a truncated Laurent
//! series at rational centers.
//!
//! Γ is expanded through its logarithm: polygamma values ψ^{(k)} are computed
//! by the shift recurrence plus the Bernoulli asymptotic series, the log-Γ
//! Taylor polynomial is exponentiated as a formal series, and poles at
//! non-positive even centers are produced by dividing out the explicit
//! linear factors of Γ(z+M)/((z)(z+1)...(z+M-1)), never by numeric limits.

use crate::error::{Error, Result};
use crate::laurent::LaurentSeries;
use crate::precision::{is_integer, PrecisionContext};
use crate::zeta::bernoulli;
use rug::{Float, Integer, Rational};

/// ψ^{(k)}(x) for rational x > 0.
pub fn polygamma(k: usize, x: &Rational, prec: u32) -> Float {
    assert!(*x > 0, "polygamma needs a positive argument");
    let digits = prec as f64 / 3.3219280948873627;
    let x0 = 0.4 * digits + k as f64 + 8.0;
    let xf = Float::with_val(prec, x);
    let shift = (x0 - xf.to_f64()).ceil().max(0.0) as u64;
    let y = Float::with_val(prec, xf.clone() + Float::with_val(prec, shift));

    let eps = Float::with_val(prec, 2f64).pow((-(prec as i64) - 8) as i32);

    // asymptotic expansion at y
    let yinv = Float::with_val(prec, y.recip_ref());
    let yinv2 = Float::with_val(prec, yinv.square_ref());
    // leading part, without the (-1)^{k-1} sign
    let lead = if k == 0 {
        let mut l = Float::with_val(prec, y.ln_ref());
        l -= Float::with_val(prec, &yinv / &Float::with_val(prec, 2));
        l
    } else {
        // (k-1)!/y^k + k!/(2 y^{k+1})
        let mut factk1 = Float::with_val(prec, Integer::from(Integer::factorial((k - 1) as u32)));
        let yk = yinv.clone().pow(k as u32);
        factk1 *= &yk;
        let mut half = Float::with_val(prec, Integer::from(Integer::factorial(k as u32)));
        half *= Float::with_val(prec, &yk * &yinv);
        half /= 2u32;
        factk1 + half
    };
    // bsum = Σ_n B_{2n}·(2n+k-1)!/(2n)! · y^{-2n-k}
    let mut ypow = yinv.clone().pow(k as u32);
    ypow *= &yinv2; // y^{-2-k}
    let mut ratio = Float::with_val(prec, Integer::from(Integer::factorial((k + 1) as u32)));
    ratio /= 2u32; // (2n+k-1)!/(2n)! at n=1
    let mut bsum = Float::new(prec);
    let mut n = 1usize;
    loop {
        let b = bernoulli(2 * n);
        let mut term = Float::with_val(prec, &b);
        term *= &ratio;
        term *= &ypow;
        let tmag = Float::with_val(prec, term.abs_ref());
        let mut bound = Float::with_val(prec, lead.abs_ref());
        bound += 1u32;
        bound *= &eps;
        bsum += &term;
        if tmag < bound {
            break;
        }
        // next n
        n += 1;
        ypow *= &yinv2;
        // ratio: ×(2n+k-2)(2n+k-1)/((2n-1)(2n))
        let a = (2 * n + k - 2) as u32;
        let bq = (2 * n + k - 1) as u32;
        ratio *= Float::with_val(prec, a);
        ratio *= Float::with_val(prec, bq);
        ratio /= Float::with_val(prec, (2 * n - 1) as u32);
        ratio /= Float::with_val(prec, (2 * n) as u32);
        assert!(n < 100_000, "polygamma asymptotic did not converge");
    }
    // ψ(y) = lead - bsum; ψ^{(k)}(y) = (-1)^{k-1}(lead + bsum) for k >= 1
    let mut val = if k == 0 {
        lead - bsum
    } else if k % 2 == 1 {
        lead + bsum
    } else {
        -(lead + bsum)
    };

    // recurrence back down: ψ^{(k)}(x) = ψ^{(k)}(x+M) - Σ_{j<M} (-1)^k k! (x+j)^{-k-1}
    if shift > 0 {
        let factk = Float::with_val(prec, Integer::from(Integer::factorial(k as u32)));
        let mut corr = Float::new(prec);
        for j in 0..shift {
            let t = Float::with_val(prec, &xf + &Float::with_val(prec, j));
            if k == 0 {
                corr += Float::with_val(prec, t.recip_ref());
            } else {
                let p = t.pow((k + 1) as u32).recip();
                corr += p;
            }
        }
        if k == 0 {
            val -= corr;
        } else {
            corr *= &factk;
            if k % 2 == 0 {
                val -= corr;
            } else {
                val += corr;
            }
        }
    }
    val
}

use rug::ops::Pow;

/// exp of a power series: g_0 = e^{f_0}, n·g_n = Σ k f_k g_{n-k}.
fn ps_exp(f: &[Float], prec: u32) -> Vec<Float> {
    let n = f.len();
    let mut g = vec![Float::new(prec); n];
    g[0] = Float::with_val(prec, f[0].exp_ref());
    for m in 1..n {
        let mut acc = Float::new(prec);
        for k in 1..=m {
            let mut t = Float::with_val(prec, &f[k] * &g[m - k]);
            t *= Float::with_val(prec, k as u32);
            acc += t;
        }
        acc /= Float::with_val(prec, m as u32);
        g[m] = acc;
    }
    g
}

/// quotient of power series with b[0] != 0, to a.len() terms.
fn ps_div(a: &[Float], b: &[Float], prec: u32) -> Vec<Float> {
    let n = a.len();
    let mut q = vec![Float::new(prec); n];
    for m in 0..n {
        let mut acc = a[m].clone();
        for k in 1..=m.min(b.len() - 1) {
            acc -= Float::with_val(prec, &b[k] * &q[m - k]);
        }
        acc /= &b[0];
        q[m] = acc;
    }
    q
}

/// Taylor coefficients of Γ at a positive rational center.
fn gamma_taylor_positive(x: &Rational, order: usize, prec: u32) -> Vec<Float> {
    let mut lg = vec![Float::new(prec); order + 1];
    lg[0] = {
        let xf = Float::with_val(prec, x);
        let (v, _sign) = xf.ln_abs_gamma();
        // x > 0 so Γ(x) > 0
        let _ = _sign;
        v
    };
    for k in 1..=order {
        let mut c = polygamma(k - 1, x, prec);
        c /= Float::with_val(prec, Integer::from(Integer::factorial(k as u32)));
        lg[k] = c;
    }
    ps_exp(&lg, prec)
}

/// Γ expanded at any rational center: (lead, coefficients of h^(lead+i)).
/// Simple pole (lead -1) exactly at non-positive integers.
pub fn gamma_taylor(z0: &Rational, order: usize, prec: u32) -> (i64, Vec<Float>) {
    if *z0 > 0 {
        return (0, gamma_taylor_positive(z0, order, prec));
    }
    let pole = is_integer(z0);
    // Γ(z0+h) = Γ(z0+M+h) / Π_{j=0}^{M-1} (z0+j+h), with z0+M in (0,1]
    let m_shift = {
        let neg = Rational::from(-z0.clone());
        let mut m = neg.clone().floor().numer().to_i64().unwrap();
        if is_integer(&neg) {
            m += 1; // lands exactly on 1
        } else {
            m += 1;
        }
        m as u64
    };
    let top = Rational::from(z0 + Rational::from(m_shift));
    let extra = order + 1;
    let num = gamma_taylor_positive(&top, extra, prec);
    // denominator polynomial, excluding an exact h factor at the pole index
    let mut den = vec![Float::with_val(prec, 1)];
    let mut exact_h = 0i64;
    for j in 0..m_shift {
        let cj = Rational::from(z0 + Rational::from(j));
        if cj == 0 {
            exact_h += 1;
            continue;
        }
        let c = Float::with_val(prec, &cj);
        let mut next = vec![Float::new(prec); den.len() + 1];
        for (i, d) in den.iter().enumerate() {
            next[i] += Float::with_val(prec, d * &c);
            next[i + 1] += d;
        }
        den = next;
    }
    den.resize(extra + 1, Float::new(prec));
    let q = ps_div(&num, &den, prec);
    if pole {
        assert_eq!(exact_h, 1);
        (-1, q)
    } else {
        assert_eq!(exact_h, 0);
        (0, q[..=order].to_vec())
    }
}

/// ζ_∞(s) = π^{-s/2} Γ(s/2) at a rational center. Simple poles exactly at
/// center ∈ {0, -2, -4, ...}.
pub fn archimedean_series(
    center: &Rational,
    order: i64,
    ctx: &PrecisionContext,
) -> Result<LaurentSeries> {
    if order < 0 {
        return Err(Error::Usage("archimedean_series: order must be >= 0".into()));
    }
    let prec = ctx.bits() + 32;
    let z0 = Rational::from(center / Rational::from(2));
    let (lead, g) = gamma_taylor(&z0, (order + 2) as usize, prec);
    // h = ε/2: coefficient of ε^k is 2^{-k} × coefficient of h^k
    let mut gam = Vec::with_capacity(g.len());
    for (i, c) in g.iter().enumerate() {
        let k = lead + i as i64;
        let mut v = c.clone();
        let two = Float::with_val(prec, 2);
        let p = two.pow(-k as i32);
        v *= p;
        gam.push(ctx.complex_from_real(Float::with_val(ctx.bits(), v)));
    }
    let gamma_ser = LaurentSeries::new(center.clone(), lead, gam, ctx);

    // π^{-s/2} = π^{-c/2} e^{-(ln π / 2) ε}
    let lnpi_half = {
        let mut t = ctx.pi().ln();
        t /= 2u32;
        t
    };
    let lead_val = {
        let mut e = Float::with_val(prec, center);
        e *= -Float::with_val(prec, &lnpi_half);
        e.exp()
    };
    let hi = order - lead; // enough terms so the product reaches `order`
    let mut coeffs = Vec::with_capacity((hi + 1).max(1) as usize);
    let mut term = Float::with_val(prec, &lead_val);
    for j in 0..=hi.max(0) {
        if j > 0 {
            term *= -Float::with_val(prec, &lnpi_half);
            term /= Float::with_val(prec, j as u32);
        }
        coeffs.push(ctx.complex_from_real(Float::with_val(ctx.bits(), term.clone())));
    }
    let pi_ser = LaurentSeries::new(center.clone(), 0, coeffs, ctx);
    Ok(gamma_ser.mul(&pi_ser)?.truncate_hi(order))
}
