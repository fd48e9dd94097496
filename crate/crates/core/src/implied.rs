//! Implied normal volatility: exact inversion, inversion of the incomplete
//! Gamma representation, the small-λ expansion and the at-the-money closed
//! form.
//!
//! Prices are normalized to time values first. Both the price and the time
//! value entry points check the no-arbitrage band `(S-K)_+ < C < S`.

use std::f64::consts::LN_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{finite, Error, Result};
use crate::pricing::{ln_normal_time_value, lognormal_time_value};
use crate::root::solve_increasing;
use crate::convert::shape_of_distance;
use crate::special::{gauss_pdf, ln_gamma_neg_half, SQRT_2PI, SQRT_PI};
use crate::terms::{LognormalVol, NormalVol, OptionTerms};

/// Strikes with `|K/S - 1|` below this are never sent to the expansion
/// routes, whose `γ_N` diverges at the money.
pub const ATM_DISPATCH_THRESHOLD: f64 = 1e-10;

/// Default upper limit on `λ` for the asymptotic route.
///
/// Measured against exact inversion over strikes `K/S ∈ [0.1, 2]` and
/// `σ_N ∈ [1, 50]`: the worst relative error in `σ_N` is about `1e-3` for
/// `λ < 0.02`, `1e-2` at `λ = 0.05`, `0.25` at `λ = 0.1`, and beyond `0.5`
/// at `λ = 0.2`. Errors grow with `γ_N`, so near-the-money strikes are the
/// worst case.
pub const DEFAULT_LAMBDA_MAX: f64 = 0.02;

/// Moneyness coordinates used by the expansions.
///
/// `gamma_n` and `gamma_ln` are `None` at the money, where they diverge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoneynessCoords {
    /// `K/S - 1`.
    pub x_n: f64,
    /// `ln(K/S)`.
    pub x_ln: f64,
    /// `ln(4√π/|x_N|)`.
    pub gamma_n: Option<f64>,
    /// `ln(4√π e^{-x_LN/2}/|x_LN|)`.
    pub gamma_ln: Option<f64>,
    /// `K/S`.
    pub m: f64,
}

/// ```
/// use bachvol::{implied::coords_from_terms, OptionTerms};
/// let c = coords_from_terms(&OptionTerms::new(100.0, 120.0, 1.0).unwrap());
/// assert!((c.x_n - 0.2).abs() < 1e-15);
/// assert!((c.x_ln - 1.2f64.ln()).abs() < 1e-15);
/// let atm = coords_from_terms(&OptionTerms::new(100.0, 100.0, 1.0).unwrap());
/// assert!(atm.gamma_n.is_none());
/// ```
pub fn coords_from_terms(terms: &OptionTerms) -> MoneynessCoords {
    let x_n = (terms.strike() - terms.spot()) / terms.spot();
    let x_ln = x_n.ln_1p();
    let (gamma_n, gamma_ln) = if x_n == 0.0 {
        (None, None)
    } else {
        let c = (4.0 * SQRT_PI).ln();
        (Some(c - x_n.abs().ln()), Some(c - x_ln.abs().ln() - 0.5 * x_ln))
    };
    MoneynessCoords {
        x_n,
        x_ln,
        gamma_n,
        gamma_ln,
        m: terms.moneyness(),
    }
}

/// A validated time value together with `λ = -1/ln(TV/S)`.
///
/// The time value is held as its logarithm, so quotes far out in the tail
/// (below the smallest `f64`) can be built with
/// [`TimeValueQuote::from_ln_time_value`] and still inverted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeValueQuote {
    terms: OptionTerms,
    ln_time_value: f64,
    lambda: f64,
}

impl TimeValueQuote {
    /// Requires `0 < TV` and `TV + (S-K)_+ < S`.
    pub fn new(terms: OptionTerms, time_value: f64) -> Result<Self> {
        finite("time value", time_value)?;
        let upper = terms.spot() - terms.intrinsic();
        if !(time_value > 0.0 && time_value < upper) {
            return Err(Error::Arbitrage {
                value: time_value,
                lower: 0.0,
                upper,
            });
        }
        Ok(Self::unchecked(terms, time_value.ln()))
    }

    /// Requires `(S-K)_+ < price < S`.
    pub fn from_price(terms: OptionTerms, price: f64) -> Result<Self> {
        finite("price", price)?;
        let lower = terms.intrinsic();
        let band = Error::Arbitrage {
            value: price,
            lower,
            upper: terms.spot(),
        };
        if !(price > lower && price < terms.spot()) {
            return Err(band);
        }
        Self::new(terms, price - lower).map_err(|_| band)
    }

    /// Quote given by `ln TV`, for time values that may underflow.
    pub fn from_ln_time_value(terms: OptionTerms, ln_time_value: f64) -> Result<Self> {
        finite("ln time value", ln_time_value)?;
        let upper = terms.spot() - terms.intrinsic();
        if ln_time_value >= upper.ln() {
            return Err(Error::Arbitrage {
                value: ln_time_value.exp(),
                lower: 0.0,
                upper,
            });
        }
        Ok(Self::unchecked(terms, ln_time_value))
    }

    fn unchecked(terms: OptionTerms, ln_time_value: f64) -> Self {
        Self {
            terms,
            ln_time_value,
            lambda: -1.0 / (ln_time_value - terms.spot().ln()),
        }
    }

    pub fn terms(&self) -> &OptionTerms {
        &self.terms
    }

    /// The time value; `0` if it underflows.
    pub fn time_value(&self) -> f64 {
        self.ln_time_value.exp()
    }

    pub fn ln_time_value(&self) -> f64 {
        self.ln_time_value
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Exact inversion, see [`implied_normal_exact`].
    pub fn implied_normal_exact(&self) -> Result<NormalVol> {
        let t = &self.terms;
        if t.is_atm() {
            return NormalVol::new(SQRT_2PI * self.time_value() / t.maturity().sqrt());
        }
        let ln_s = solve_normal_total(t.distance(), self.ln_time_value)?;
        vol_from_log(ln_s - 0.5 * t.maturity().ln()).map(NormalVol::from_positive)
    }

    /// Inversion of the Gamma representation, see
    /// [`implied_normal_via_gamma_inverse`].
    pub fn implied_normal_gamma(&self) -> Result<NormalVol> {
        let t = &self.terms;
        if t.is_atm() {
            return Err(Error::AtTheMoney);
        }
        let ln_a = t.distance().ln();
        let target = (4.0 * SQRT_PI).ln() + self.ln_time_value - ln_a;
        // z = a²/(2s²), decreasing in s
        let ln_z = |ln_s: f64| 2.0 * (ln_a - ln_s) - LN_2;
        let (s_lo, s_hi) = normal_bracket(t.distance(), self.ln_time_value);
        let y = solve_increasing(
            |y| {
                let (ln_g, slope) = ln_gamma_neg_half(y.exp());
                (target - ln_g, -slope)
            },
            ln_z(s_hi),
            ln_z(s_lo),
            ln_z(normal_guess(t.distance(), self.ln_time_value)),
        )?;
        vol_from_log(ln_a - 0.5 * (LN_2 + y) - 0.5 * t.maturity().ln())
            .map(NormalVol::from_positive)
    }

    /// Small-λ expansion, see [`implied_normal_asymptotic`].
    pub fn implied_normal_asymptotic(&self, config: &AsymptoticConfig) -> Result<NormalVol> {
        let t = &self.terms;
        let coords = coords_from_terms(t);
        let gamma_n = match coords.gamma_n {
            Some(g) if coords.x_n.abs() >= ATM_DISPATCH_THRESHOLD => g,
            _ => return Err(Error::AtTheMoney),
        };
        let lambda = self.lambda;
        let out_of_domain = Error::AsymptoticDomain {
            lambda,
            max: config.lambda_max,
        };
        if lambda >= config.lambda_max {
            return Err(out_of_domain);
        }
        let u = u_n_expansion(lambda, gamma_n)?;
        if u.is_nan() || u <= 0.0 {
            return Err(out_of_domain);
        }
        NormalVol::new(t.distance() * (0.5 * u).sqrt() / t.maturity().sqrt())
    }

    /// Exact Black-Scholes inversion, see [`implied_lognormal_exact`].
    pub fn implied_lognormal_exact(&self) -> Result<LognormalVol> {
        let t = &self.terms;
        let (spot, strike) = (t.spot(), t.strike());
        let tv = self.time_value();
        // the Black-Scholes time value at fixed σ√T peaks at the money, where
        // it is below S·σ√T/√(2π)
        let lo = SQRT_2PI.ln() + self.ln_time_value - spot.ln();
        let mut hi = (2.0 * lo.exp()).max(1.0);
        let mut doublings = 0;
        while lognormal_time_value(spot, strike, hi) < tv {
            hi *= 2.0;
            doublings += 1;
            if doublings > 16 {
                return Err(Error::Arbitrage {
                    value: tv,
                    lower: 0.0,
                    upper: spot - t.intrinsic(),
                });
            }
        }
        let hi = hi.ln();
        let start = solve_normal_total(t.distance(), self.ln_time_value)
            .map(|ln_s| ln_s - spot.ln() + shape_of_distance(t).ln())
            .unwrap_or(lo)
            .clamp(lo, hi);
        let target = self.ln_time_value;
        let y = solve_increasing(
            |y| {
                let v = y.exp();
                let tv_v = lognormal_time_value(spot, strike, v);
                let d1 = (spot / strike).ln() / v + 0.5 * v;
                (tv_v.ln() - target, spot * v * gauss_pdf(d1) / tv_v)
            },
            lo,
            hi,
            start,
        )?;
        vol_from_log(y - 0.5 * t.maturity().ln()).map(LognormalVol::from_positive)
    }
}

/// Configuration of the asymptotic route.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticConfig {
    /// Quotes with `λ ≥ lambda_max` are rejected by the asymptotic route and
    /// sent to exact inversion by [`ImpliedMethod::Auto`].
    pub lambda_max: f64,
}

impl Default for AsymptoticConfig {
    fn default() -> Self {
        Self {
            lambda_max: DEFAULT_LAMBDA_MAX,
        }
    }
}

impl AsymptoticConfig {
    pub fn new(lambda_max: f64) -> Result<Self> {
        finite("lambda_max", lambda_max)?;
        if !(lambda_max > 0.0 && lambda_max < 1.0) {
            return Err(Error::Domain {
                name: "lambda_max",
                value: lambda_max,
                requirement: "must lie in (0, 1)",
            });
        }
        Ok(Self { lambda_max })
    }
}

fn vol_from_log(ln_vol: f64) -> Result<f64> {
    let v = ln_vol.exp();
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NoConvergence {
            iterations: crate::root::MAX_ITERATIONS,
        })
    }
}

// Bachelier bounds s/√(2π) - |S-K|/2 ≤ TV ≤ s/√(2π), as logs of s = σ_N√T.
fn normal_bracket(a: f64, ln_tv: f64) -> (f64, f64) {
    let lo = SQRT_2PI.ln() + ln_tv;
    let hi = if a > 0.0 {
        SQRT_2PI.ln() + a.ln() + (ln_tv - a.ln()).exp().ln_1p()
    } else {
        lo
    };
    (lo, hi)
}

// Starting point for ln s. Far from the money TV ≈ |S-K|·n(d)/d³, which is
// solved for d by fixed-point iteration.
fn normal_guess(a: f64, ln_tv: f64) -> f64 {
    let ln_r = ln_tv - a.ln();
    if ln_r < 0.1f64.ln() {
        let l = -ln_r - SQRT_2PI.ln();
        let mut d = (2.0 * l).sqrt();
        for _ in 0..3 {
            d = (2.0 * (l - 3.0 * d.ln())).max(1.0).sqrt();
        }
        a.ln() - d.ln()
    } else {
        (SQRT_2PI * (ln_tv.exp() + 0.5 * a)).ln()
    }
}

/// Root-finding inversion of the Bachelier time value for `ln(σ_N√T)`.
fn solve_normal_total(a: f64, ln_tv: f64) -> Result<f64> {
    let (lo, hi) = normal_bracket(a, ln_tv);
    if a == 0.0 {
        return Ok(lo);
    }
    solve_increasing(
        |y| {
            let (ln_v, slope) = ln_normal_time_value(a, y.exp());
            (ln_v - ln_tv, slope)
        },
        lo,
        hi,
        normal_guess(a, ln_tv),
    )
}

pub(crate) fn solve_normal(terms: &OptionTerms, tv: f64) -> Result<NormalVol> {
    TimeValueQuote::new(*terms, tv)?.implied_normal_exact()
}

pub(crate) fn solve_lognormal(terms: &OptionTerms, tv: f64) -> Result<LognormalVol> {
    TimeValueQuote::new(*terms, tv)?.implied_lognormal_exact()
}

/// Implied normal volatility by root-finding on the Bachelier price.
///
/// The root is bracketed by `√(2π)·TV ≤ σ_N√T ≤ √(2π)·(TV + |S-K|)` and
/// polished by Newton steps on `ln TV` against `ln σ_N`, falling back to
/// bisection whenever a step leaves the bracket. At the money the closed form
/// `σ_N = √(2π/T)·C` is returned.
///
/// ```
/// use bachvol::{implied::implied_normal_exact, pricing::bachelier_call};
/// use bachvol::{NormalVol, OptionTerms};
/// let terms = OptionTerms::new(100.0, 90.0, 1.0).unwrap();
/// let price = bachelier_call(&terms, NormalVol::new(10.0).unwrap());
/// let vol = implied_normal_exact(&terms, price).unwrap();
/// assert!((vol.value() - 10.0).abs() < 1e-12);
/// ```
pub fn implied_normal_exact(terms: &OptionTerms, price: f64) -> Result<NormalVol> {
    let q = TimeValueQuote::from_price(*terms, price)?;
    if terms.is_atm() {
        return implied_normal_atm(terms, price);
    }
    q.implied_normal_exact()
}

/// Implied normal volatility from the incomplete Gamma representation:
/// solve `Γ(-1/2, z) = 4√π·TV/|S-K|` for `z`, then `σ_N = |S-K|/√(2zT)`.
///
/// `Γ(-1/2, ·)` is strictly decreasing; the equation is solved for `ln z` in
/// logarithmic form so that it stays well scaled far from the money.
pub fn implied_normal_via_gamma_inverse(terms: &OptionTerms, time_value: f64) -> Result<NormalVol> {
    TimeValueQuote::new(*terms, time_value)?.implied_normal_gamma()
}

fn check_lambda(lambda: f64) -> Result<()> {
    finite("lambda", lambda)?;
    if lambda > 0.0 && lambda < 1.0 {
        Ok(())
    } else {
        Err(Error::AsymptoticDomain { lambda, max: 1.0 })
    }
}

fn third_order(lambda: f64, gamma: f64, constant: f64) -> f64 {
    let l = lambda.ln();
    let l2 = lambda * lambda;
    let l3 = l2 * lambda;
    lambda - 1.5 * l2 * l + gamma * l2 + 2.25 * l3 * l * l + (2.25 - 3.0 * gamma) * l3 * l
        + constant * l3
}

/// Small-λ expansion of `u_N = 2σ_N²T/(S-K)²`:
///
/// `u_N = λ - (3/2)λ² ln λ + γ_N λ² + (9/4)λ³ ln²λ + (9/4 - 3γ_N)λ³ ln λ + (γ_N² - (3/2)γ_N + 3/2)λ³`.
///
/// ```
/// use bachvol::implied::u_n_expansion;
/// let u = u_n_expansion(0.1, 2.0).unwrap();
/// assert!((u - 0.177603).abs() < 1e-6);
/// assert!(u_n_expansion(1.5, 2.0).is_err());
/// ```
pub fn u_n_expansion(lambda: f64, gamma_n: f64) -> Result<f64> {
    check_lambda(lambda)?;
    finite("gamma_n", gamma_n)?;
    Ok(third_order(
        lambda,
        gamma_n,
        gamma_n * gamma_n - 1.5 * gamma_n + 1.5,
    ))
}

/// Lognormal counterpart of [`u_n_expansion`] for `u_LN = 2σ_LN²T/x_LN²`,
/// with the constant term `γ_LN² - (3/2)γ_LN - α′₁` and
/// `α′₁ = -x_LN²/16 - 3/2`.
pub fn u_ln_expansion(lambda: f64, gamma_ln: f64, x_ln: f64) -> Result<f64> {
    check_lambda(lambda)?;
    finite("gamma_ln", gamma_ln)?;
    finite("x_ln", x_ln)?;
    let alpha1 = -x_ln * x_ln / 16.0 - 1.5;
    Ok(third_order(
        lambda,
        gamma_ln,
        gamma_ln * gamma_ln - 1.5 * gamma_ln - alpha1,
    ))
}

/// Implied normal volatility from the small-λ expansion,
/// `σ_N = |S-K|·√(u_N/2)/√T`.
///
/// Only meaningful far from the money or at short maturity; quotes with
/// `λ ≥ config.lambda_max` are rejected.
pub fn implied_normal_asymptotic(
    terms: &OptionTerms,
    time_value: f64,
    config: &AsymptoticConfig,
) -> Result<NormalVol> {
    TimeValueQuote::new(*terms, time_value)?.implied_normal_asymptotic(config)
}

/// At-the-money closed form `σ_N = √(2π/T)·C`.
///
/// ```
/// use bachvol::{implied::implied_normal_atm, OptionTerms};
/// let terms = OptionTerms::new(100.0, 100.0, 1.0).unwrap();
/// let vol = implied_normal_atm(&terms, 7.978845608028654).unwrap();
/// assert!((vol.value() - 20.0).abs() < 1e-12);
/// ```
pub fn implied_normal_atm(terms: &OptionTerms, price: f64) -> Result<NormalVol> {
    if !terms.is_atm() {
        return Err(Error::NotAtTheMoney {
            spot: terms.spot(),
            strike: terms.strike(),
        });
    }
    TimeValueQuote::from_price(*terms, price)?;
    NormalVol::new(SQRT_2PI * price / terms.maturity().sqrt())
}

/// Implied Black-Scholes volatility by root-finding, same scheme as
/// [`implied_normal_exact`].
pub fn implied_lognormal_exact(terms: &OptionTerms, price: f64) -> Result<LognormalVol> {
    TimeValueQuote::from_price(*terms, price)?.implied_lognormal_exact()
}

/// Inversion route requested by the caller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ImpliedMethod {
    Exact,
    Gamma,
    Asymptotic,
    /// Asymptotic when `λ < lambda_max`, exact otherwise.
    Auto,
}

/// Route actually taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodUsed {
    Exact,
    ExactAtm,
    Gamma,
    Asymptotic,
}

impl MethodUsed {
    pub fn as_str(self) -> &'static str {
        match self {
            MethodUsed::Exact => "exact",
            MethodUsed::ExactAtm => "exact-atm",
            MethodUsed::Gamma => "gamma",
            MethodUsed::Asymptotic => "asymptotic",
        }
    }
}

impl fmt::Display for MethodUsed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An implied normal volatility with the route used and the quote's `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpliedNormal {
    pub vol: NormalVol,
    pub method: MethodUsed,
    pub lambda: f64,
}

/// Implied normal volatility from a call price by the requested route.
///
/// `K = S` always uses the closed form. Strikes within
/// [`ATM_DISPATCH_THRESHOLD`] of spot use exact inversion whatever the
/// request, because the expansion coordinates diverge there.
///
/// ```
/// use bachvol::implied::{implied_normal, AsymptoticConfig, ImpliedMethod, MethodUsed};
/// use bachvol::OptionTerms;
/// let terms = OptionTerms::new(100.0, 100.0, 1.0).unwrap();
/// let r = implied_normal(&terms, 8.0, ImpliedMethod::Auto, &AsymptoticConfig::default()).unwrap();
/// assert_eq!(r.method, MethodUsed::ExactAtm);
/// ```
pub fn implied_normal(
    terms: &OptionTerms,
    price: f64,
    method: ImpliedMethod,
    config: &AsymptoticConfig,
) -> Result<ImpliedNormal> {
    let q = TimeValueQuote::from_price(*terms, price)?;
    let lambda = q.lambda();
    let done = |vol, method| ImpliedNormal {
        vol,
        method,
        lambda,
    };
    if terms.is_atm() {
        return Ok(done(implied_normal_atm(terms, price)?, MethodUsed::ExactAtm));
    }
    let x_n = (terms.strike() - terms.spot()) / terms.spot();
    let method = if x_n.abs() < ATM_DISPATCH_THRESHOLD {
        ImpliedMethod::Exact
    } else {
        method
    };
    match method {
        ImpliedMethod::Exact => Ok(done(q.implied_normal_exact()?, MethodUsed::Exact)),
        ImpliedMethod::Gamma => Ok(done(q.implied_normal_gamma()?, MethodUsed::Gamma)),
        ImpliedMethod::Asymptotic => Ok(done(
            q.implied_normal_asymptotic(config)?,
            MethodUsed::Asymptotic,
        )),
        ImpliedMethod::Auto if lambda < config.lambda_max => Ok(done(
            q.implied_normal_asymptotic(config)?,
            MethodUsed::Asymptotic,
        )),
        ImpliedMethod::Auto => Ok(done(q.implied_normal_exact()?, MethodUsed::Exact)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pricing::{bachelier_call, bachelier_tv_gamma};

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn terms(s: f64, k: f64, t: f64) -> OptionTerms {
        OptionTerms::new(s, k, t).unwrap()
    }

    fn nv(v: f64) -> NormalVol {
        NormalVol::new(v).unwrap()
    }

    #[test]
    fn coords_identity() {
        let c = coords_from_terms(&terms(100.0, 120.0, 1.0));
        assert_eq!(c.m, 1.2);
        let lhs = c.gamma_n.unwrap() - c.gamma_ln.unwrap();
        let rhs = c.x_ln / 2.0 + (c.x_ln / c.x_n).ln();
        assert!((lhs - rhs).abs() < 1e-14);
        let c = coords_from_terms(&terms(100.0, 80.0, 1.0));
        assert!(c.x_n < 0.0 && c.x_ln < 0.0);
        let atm = coords_from_terms(&terms(50.0, 50.0, 1.0));
        assert_eq!((atm.x_n, atm.x_ln, atm.m), (0.0, 0.0, 1.0));
        assert!(atm.gamma_ln.is_none());
    }

    #[test]
    fn quote_band() {
        let t = terms(100.0, 90.0, 1.0);
        assert!(matches!(
            TimeValueQuote::from_price(t, 10.0),
            Err(Error::Arbitrage { lower, .. }) if lower == 10.0
        ));
        assert!(TimeValueQuote::from_price(t, 100.0).is_err());
        assert!(TimeValueQuote::from_price(t, f64::NAN).is_err());
        let q = TimeValueQuote::from_price(t, 11.0).unwrap();
        assert!((q.time_value() - 1.0).abs() < 1e-15);
        assert!(rel(q.lambda(), 1.0 / 100f64.ln()) < 1e-15);
        assert!(TimeValueQuote::new(t, 90.0).is_err());
        assert!(TimeValueQuote::new(t, 0.0).is_err());
    }

    #[test]
    fn exact_examples() {
        let atm = terms(100.0, 100.0, 1.0);
        let v = implied_normal_exact(&atm, 5.0).unwrap();
        assert_eq!(v.value(), SQRT_2PI * 5.0);
        let t = terms(100.0, 90.0, 1.0);
        let v = implied_normal_exact(&t, bachelier_call(&t, nv(10.0))).unwrap();
        assert!(rel(v.value(), 10.0) < 1e-12);
        let v = implied_normal_exact(&t, 10.0 + 1e-12).unwrap();
        assert!(v.value() < 2.0);
    }

    #[test]
    fn exact_round_trip_wide() {
        for &k in &[1.0, 50.0, 99.0, 99.999, 100.001, 101.0, 150.0, 400.0] {
            for &t in &[1e-4, 0.01, 1.0, 30.0] {
                for &s in &[0.5, 5.0, 20.0, 80.0] {
                    let terms = terms(100.0, k, t);
                    let tv = crate::pricing::normal_time_value(terms.distance(), s * t.sqrt());
                    if tv.is_nan() || tv <= 1e-300 || tv + terms.intrinsic() >= 100.0 {
                        continue;
                    }
                    let v = TimeValueQuote::new(terms, tv).unwrap().implied_normal_exact().unwrap();
                    assert!(rel(v.value(), s) < 1e-12, "K={k} T={t} σ={s}: {}", v.value());
                }
            }
        }
    }

    #[test]
    fn log_quotes_reach_below_underflow() {
        // TV ~ e^{-2048}
        let t = terms(100.0, 120.0, 1.0 / 1024.0);
        let s = 10.0 / 32.0;
        let (ln_tv, _) = crate::pricing::ln_normal_time_value(20.0, s);
        assert!(ln_tv.exp() == 0.0);
        let q = TimeValueQuote::from_ln_time_value(t, ln_tv).unwrap();
        assert!(rel(q.implied_normal_exact().unwrap().value(), 10.0) < 1e-12);
        assert!(rel(q.implied_normal_gamma().unwrap().value(), 10.0) < 1e-12);
        let a = q.implied_normal_asymptotic(&AsymptoticConfig::default()).unwrap();
        assert!(rel(a.value(), 10.0) < 1e-5);
        assert!(TimeValueQuote::from_ln_time_value(t, 100f64.ln()).is_err());
        assert!(TimeValueQuote::from_ln_time_value(t, f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn gamma_route_agrees() {
        let t = terms(100.0, 80.0, 0.3);
        let tv = bachelier_tv_gamma(&t, nv(15.0));
        let v = implied_normal_via_gamma_inverse(&t, tv).unwrap();
        assert!(rel(v.value(), 15.0) < 1e-10);
        // deep tail, TV ~ 1e-250
        let t = terms(100.0, 130.0, 0.01);
        let tv = crate::pricing::normal_time_value(30.0, 0.9);
        let v = implied_normal_via_gamma_inverse(&t, tv).unwrap();
        assert!(rel(v.value(), 9.0) < 1e-10);
        assert!(matches!(
            implied_normal_via_gamma_inverse(&terms(1.0, 1.0, 1.0), 0.1),
            Err(Error::AtTheMoney)
        ));
    }

    #[test]
    fn expansion_arithmetic() {
        let u = u_n_expansion(0.1, 2.0).unwrap();
        let l = 0.1f64.ln();
        let want = 0.1 - 1.5 * 0.01 * l + 0.02 + 2.25 * 0.001 * l * l - 3.75 * 0.001 * l
            + 2.5 * 0.001;
        assert!((u - want).abs() < 1e-15);
        assert!(rel(u, 0.1776028) < 1e-6);
        for &lam in &[1e-3, 1e-5, 1e-8] {
            assert!(rel(u_n_expansion(lam, 1.0).unwrap(), lam) < 50.0 * lam * lam.ln().abs());
        }
        assert!(u_n_expansion(0.0, 1.0).is_err());
        assert!(u_n_expansion(f64::NAN, 1.0).is_err());
        // α′₁ = -x²/16 - 3/2 enters with a minus sign
        let a = u_ln_expansion(0.1, 2.0, 0.2).unwrap();
        let b = u_ln_expansion(0.1, 2.0, 0.0).unwrap();
        assert!((a - b - 0.0025 * 0.001).abs() < 1e-15);
        assert!((b - u).abs() < 1e-15);
    }

    #[test]
    fn asymptotic_route() {
        let t = terms(100.0, 120.0, 1.0 / 128.0);
        let tv = bachelier_call(&t, nv(10.0));
        let cfg = AsymptoticConfig::default();
        let v = implied_normal_asymptotic(&t, tv, &cfg).unwrap();
        assert!(rel(v.value(), 10.0) < 1e-3);
        let near = terms(100.0, 101.0, 1.0);
        let tv = bachelier_call(&near, nv(10.0));
        assert!(matches!(
            implied_normal_asymptotic(&near, tv, &cfg),
            Err(Error::AsymptoticDomain { .. })
        ));
        assert!(matches!(
            implied_normal_asymptotic(&terms(100.0, 100.0, 1.0), 1.0, &cfg),
            Err(Error::AtTheMoney)
        ));
        assert!(AsymptoticConfig::new(1.0).is_err());
    }

    #[test]
    fn atm_closed_form() {
        let t = terms(100.0, 100.0, 2.0 * std::f64::consts::PI);
        assert!(rel(implied_normal_atm(&t, 1.0).unwrap().value(), 1.0) < 1e-15);
        let t = terms(100.0, 100.0, 0.7);
        let c = bachelier_call(&t, nv(13.0));
        assert!(rel(implied_normal_atm(&t, c).unwrap().value(), 13.0) < 4e-16);
        assert!(matches!(
            implied_normal_atm(&terms(100.0, 101.0, 1.0), 1.0),
            Err(Error::NotAtTheMoney { .. })
        ));
        assert!(implied_normal_atm(&t, 100.0).is_err());
    }

    #[test]
    fn lognormal_round_trip() {
        for &k in &[60.0, 95.0, 100.0, 105.0, 150.0] {
            for &t in &[0.01, 1.0, 5.0] {
                for &sig in &[0.05, 0.2, 1.0] {
                    let terms = terms(100.0, k, t);
                    let v = sig * t.sqrt();
                    let tv = crate::pricing::lognormal_time_value(100.0, k, v);
                    if tv < 1e-250 {
                        continue;
                    }
                    let q = TimeValueQuote::new(terms, tv).unwrap();
                    let got = q.implied_lognormal_exact().unwrap();
                    assert!(rel(got.value(), sig) < 1e-10, "K={k} T={t} σ={sig}");
                }
            }
        }
    }

    #[test]
    fn dispatcher() {
        let cfg = AsymptoticConfig::default();
        let t = terms(100.0, 150.0, 0.01);
        let price = bachelier_call(&t, nv(20.0));
        let r = implied_normal(&t, price, ImpliedMethod::Auto, &cfg).unwrap();
        assert_eq!(r.method, MethodUsed::Asymptotic);
        assert!(r.lambda < DEFAULT_LAMBDA_MAX);
        let r = implied_normal(&t, price, ImpliedMethod::Exact, &cfg).unwrap();
        assert_eq!(r.method, MethodUsed::Exact);
        let t = terms(100.0, 105.0, 1.0);
        let price = bachelier_call(&t, nv(20.0));
        let r = implied_normal(&t, price, ImpliedMethod::Auto, &cfg).unwrap();
        assert_eq!(r.method, MethodUsed::Exact);
        let r = implied_normal(&t, price, ImpliedMethod::Gamma, &cfg).unwrap();
        assert_eq!(r.method, MethodUsed::Gamma);
        assert!(implied_normal(&t, price, ImpliedMethod::Asymptotic, &cfg).is_err());
        let near = terms(100.0, 100.0 + 1e-9, 1.0);
        let r = implied_normal(&near, 8.0, ImpliedMethod::Asymptotic, &cfg).unwrap();
        assert_eq!(r.method, MethodUsed::Exact);
        assert_eq!(MethodUsed::ExactAtm.to_string(), "exact-atm");
    }
}
