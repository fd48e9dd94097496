//! European call prices and time values under Bachelier and Black-Scholes.
//!
//! Rates are zero and there are no dividends, so spot and strike are forward
//! quantities. All entry points take validated [`OptionTerms`] and a typed
//! volatility and are therefore total.

#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};
use crate::special::{
    check_order, erf, exp_neg_half_sq, gamma_neg_half, gamma_series_sum, gauss_cdf, gauss_pdf, RemainderKind,
    SeriesResult, FRAC_1_SQRT_2PI, ODD_DOUBLE_FACTORIAL, SQRT_PI,
};
use crate::terms::{LognormalVol, NormalVol, OptionTerms};

/// Below this `|S-K|/(σ_N√T)` the Gamma representation is replaced by its
/// at-the-money limit.
pub const ATM_GAMMA_THRESHOLD: f64 = 1e-8;

// The continued fraction for the Mills ratio converges for every d > 0 but
// needs many terms near 0; below this point the closed form loses less than a
// decimal digit to cancellation.
const MILLS_SWITCH: f64 = 1.25;
const MILLS_TERMS: u32 = 250;

/// `t / (d + t)` with `t = 1/(d + 2/(d + 3/(d + ...)))`, so that
/// `n(d) - d·Q(d) = n(d)·t/(d + t)`.
fn mills_factor(d: f64) -> f64 {
    let mut t = 0.0;
    for k in (1..=MILLS_TERMS).rev() {
        t = f64::from(k) / (d + t);
    }
    t / (d + t)
}

/// Bachelier time value from `a = |S-K|` and `s = σ_N√T`.
pub(crate) fn normal_time_value(a: f64, s: f64) -> f64 {
    let d = a / s;
    if d < MILLS_SWITCH {
        s * (gauss_pdf(d) - d * gauss_cdf(-d))
    } else {
        s * gauss_pdf(d) * mills_factor(d)
    }
}

/// `(ln TV, d ln TV / d ln s)` for the Bachelier time value. Stays finite
/// where the time value itself underflows.
pub(crate) fn ln_normal_time_value(a: f64, s: f64) -> (f64, f64) {
    let d = a / s;
    if d < MILLS_SWITCH {
        let n = gauss_pdf(d);
        let h = n - d * gauss_cdf(-d);
        ((s * h).ln(), n / h)
    } else {
        let f = mills_factor(d);
        let ln_n = -0.5 * d * d + FRAC_1_SQRT_2PI.ln();
        (s.ln() + ln_n + f.ln(), 1.0 / f)
    }
}

/// Black-Scholes time value from spot, strike and total volatility
/// `v = σ_LN√T`, evaluated on the out-of-the-money side.
pub(crate) fn lognormal_time_value(spot: f64, strike: f64, v: f64) -> f64 {
    if spot == strike {
        return spot * erf(v / (2.0 * std::f64::consts::SQRT_2));
    }
    let d1 = (spot / strike).ln() / v + 0.5 * v;
    let d2 = d1 - v;
    let tv = if strike > spot {
        spot * gauss_cdf(d1) - strike * gauss_cdf(d2)
    } else {
        strike * gauss_cdf(-d2) - spot * gauss_cdf(-d1)
    };
    tv.max(0.0)
}

/// Bachelier call price `C = (S-K)·N(d) + σ_N√T·n(d)` with
/// `d = (S-K)/(σ_N√T)`.
///
/// Evaluated as intrinsic plus time value, which keeps the time value at full
/// relative accuracy far from the money.
///
/// ```
/// use bachvol::{pricing::bachelier_call, NormalVol, OptionTerms};
/// let terms = OptionTerms::new(100.0, 90.0, 1.0).unwrap();
/// let c = bachelier_call(&terms, NormalVol::new(10.0).unwrap());
/// assert!((c - 10.833154705876864).abs() < 1e-12);
/// ```
pub fn bachelier_call(terms: &OptionTerms, vol: NormalVol) -> f64 {
    let s = vol.value() * terms.maturity().sqrt();
    terms.intrinsic() + normal_time_value(terms.distance(), s)
}

/// Natural logarithm of the Bachelier time value. Finite even where the time
/// value itself underflows, which makes it usable with
/// [`TimeValueQuote::from_ln_time_value`](crate::implied::TimeValueQuote::from_ln_time_value).
///
/// ```
/// use bachvol::{pricing::bachelier_ln_time_value, NormalVol, OptionTerms};
/// let terms = OptionTerms::new(100.0, 150.0, 0.01).unwrap();
/// let ln_tv = bachelier_ln_time_value(&terms, NormalVol::new(1.0).unwrap());
/// assert!(ln_tv < -1e4);
/// ```
pub fn bachelier_ln_time_value(terms: &OptionTerms, vol: NormalVol) -> f64 {
    let s = vol.value() * terms.maturity().sqrt();
    ln_normal_time_value(terms.distance(), s).0
}

/// Bachelier time value through the upper incomplete Gamma function:
/// `TV = |S-K|/(4√π) · Γ(-1/2, (S-K)²/(2σ_N²T))`, and `σ_N√T/√(2π)` at the
/// money.
///
/// The at-the-money branch is also used when `|S-K|/(σ_N√T)` is below
/// [`ATM_GAMMA_THRESHOLD`], where `Γ(-1/2, z) ~ 2/√z` would be evaluated
/// from a vanishing `z`.
pub fn bachelier_tv_gamma(terms: &OptionTerms, vol: NormalVol) -> f64 {
    let s = vol.value() * terms.maturity().sqrt();
    let a = terms.distance();
    let d = a / s;
    if d < ATM_GAMMA_THRESHOLD {
        return s * FRAC_1_SQRT_2PI;
    }
    let z = 0.5 * d * d;
    if !z.is_finite() {
        return 0.0;
    }
    a / (4.0 * SQRT_PI) * gamma_neg_half(z)
}

/// Truncated deep out-of-the-money expansion of the Bachelier time value,
///
/// `TV ≈ (σ_N²T)^{3/2}/(√(2π)(S-K)²) · e^{-(S-K)²/(2σ_N²T)} · Σ_{k<p} (-1)^k (2k+1)!! w^k`
///
/// with `w = σ_N²T/(S-K)²`. The remainder is bounded by the first omitted
/// term, so [`SeriesResult::kind`] is [`RemainderKind::Bound`].
///
/// ```
/// use bachvol::pricing::{bachelier_tv_gamma, bachelier_tv_series};
/// use bachvol::{NormalVol, OptionTerms};
/// let terms = OptionTerms::new(100.0, 90.0, 0.04).unwrap();
/// let vol = NormalVol::new(10.0).unwrap();
/// let s = bachelier_tv_series(&terms, vol, 3).unwrap();
/// assert!((s.value - bachelier_tv_gamma(&terms, vol)).abs() <= s.remainder_bound);
/// ```
pub fn bachelier_tv_series(terms: &OptionTerms, vol: NormalVol, p: usize) -> Result<SeriesResult> {
    check_order(p)?;
    if terms.is_atm() {
        return Err(Error::AtTheMoney);
    }
    let s = vol.value() * terms.maturity().sqrt();
    let a = terms.distance();
    let r = s / a;
    let w = r * r;
    let prefactor = s * w * gauss_pdf(a / s);
    let (sum, bound) = gamma_series_sum(w, p);
    Ok(SeriesResult {
        value: prefactor * sum,
        order: p,
        remainder_bound: prefactor * bound,
        kind: RemainderKind::Bound,
    })
}

/// The time-value expansion in normalized form, `(4√π/|x_N|)·TV/S` as a
/// series in `u_N = 2θ_N²/x_N²`:
///
/// `u_N^{3/2} e^{-1/u_N} Σ_{k<p} ((-1)^k/2^k) (2k+1)!! u_N^k`
///
/// with `x_N = K/S - 1` and `θ_N = σ_N√T/S`.
pub fn normalized_tv_normal(terms: &OptionTerms, vol: NormalVol, p: usize) -> Result<SeriesResult> {
    check_order(p)?;
    if terms.is_atm() {
        return Err(Error::AtTheMoney);
    }
    let s = vol.value() * terms.maturity().sqrt();
    let a = terms.distance();
    let r = s / a;
    let u = 2.0 * r * r;
    let factor = u * u.sqrt() * exp_neg_half_sq(a / s);
    let (sum, bound) = gamma_series_sum(0.5 * u, p);
    Ok(SeriesResult {
        value: factor * sum,
        order: p,
        remainder_bound: factor * bound,
        kind: RemainderKind::Bound,
    })
}

/// Black-Scholes call `C = S·N(d₁) - K·N(d₂)` at zero rates.
///
/// At the money this is `S·erf(σ_LN√T/(2√2))`.
///
/// ```
/// use bachvol::{pricing::black_scholes_call, LognormalVol, OptionTerms};
/// let terms = OptionTerms::new(100.0, 100.0, 1.0).unwrap();
/// let c = black_scholes_call(&terms, LognormalVol::new(0.2).unwrap());
/// assert!((c - 7.965567455405796).abs() < 1e-12);
/// ```
pub fn black_scholes_call(terms: &OptionTerms, vol: LognormalVol) -> f64 {
    let v = vol.value() * terms.maturity().sqrt();
    terms.intrinsic() + lognormal_time_value(terms.spot(), terms.strike(), v)
}

/// Bachelier time value `C - (S-K)⁺`, computed directly rather than by
/// subtracting the intrinsic value.
pub fn bachelier_time_value(terms: &OptionTerms, vol: NormalVol) -> f64 {
    normal_time_value(terms.distance(), vol.value() * terms.maturity().sqrt())
}

/// Black-Scholes time value `C - (S-K)⁺`.
pub fn black_scholes_time_value(terms: &OptionTerms, vol: LognormalVol) -> f64 {
    lognormal_time_value(terms.spot(), terms.strike(), vol.value() * terms.maturity().sqrt())
}

/// Lognormal counterpart of [`normalized_tv_normal`]:
/// `(4√π e^{-x_LN/2}/|x_LN|)·TV/S` as
///
/// `u_LN^{3/2} e^{-1/u_LN} Σ_{k<p} ((-1)^k/2^k) a_k u_LN^k`,
/// `a_k = (2k+1)!! Σ_{j≤k} (x_LN²/8)^j / (j!(2j+1)!!)`
///
/// with `x_LN = ln(K/S)` and `u_LN = 2σ_LN²T/x_LN²`. No constant is known for
/// the remainder, so the reported magnitude is the first omitted term and is
/// tagged [`RemainderKind::Estimate`].
pub fn normalized_tv_lognormal(
    terms: &OptionTerms,
    vol: LognormalVol,
    p: usize,
) -> Result<SeriesResult> {
    check_order(p)?;
    if terms.is_atm() {
        return Err(Error::AtTheMoney);
    }
    let x = ((terms.strike() - terms.spot()) / terms.spot()).ln_1p();
    let v = vol.value() * terms.maturity().sqrt();
    let r = v / x.abs();
    let u = 2.0 * r * r;
    let factor = u * u.sqrt() * exp_neg_half_sq(x.abs() / v);
    let coeff = lognormal_coefficients(x);
    let mut sum = 0.0;
    let mut power = 1.0;
    for (k, &a) in coeff.iter().enumerate().take(p) {
        let term = a * power;
        sum += if k % 2 == 0 { term } else { -term };
        power *= 0.5 * u;
    }
    Ok(SeriesResult {
        value: factor * sum,
        order: p,
        remainder_bound: factor * coeff[p] * power,
        kind: RemainderKind::Estimate,
    })
}

/// The coefficients `a_k`, `k = 0..=12`, of [`normalized_tv_lognormal`].
pub fn lognormal_coefficients(x_ln: f64) -> [f64; ODD_DOUBLE_FACTORIAL.len()] {
    let q = x_ln * x_ln / 8.0;
    let mut out = [0.0; ODD_DOUBLE_FACTORIAL.len()];
    let mut inner = 0.0;
    let mut q_pow = 1.0;
    let mut j_fact = 1.0;
    for (k, slot) in out.iter_mut().enumerate() {
        if k > 0 {
            j_fact *= k as f64;
            q_pow *= q;
        }
        inner += q_pow / (j_fact * ODD_DOUBLE_FACTORIAL[k] as f64);
        *slot = ODD_DOUBLE_FACTORIAL[k] as f64 * inner;
    }
    out
}
