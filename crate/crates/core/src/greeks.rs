//! First-order greeks in both models and the breakeven move of a
//! delta-hedged position.
//!
//! Theta is `∂C/∂T`, the sensitivity to time to maturity, so it is positive
//! for a long call; the holder loses `Θ·δt` over a period `δt`. Vega is the
//! derivative with respect to the model's own volatility, hence in currency
//! per currency unit of `σ_N` for Bachelier and currency per unit of `σ_LN`
//! for Black-Scholes.

use serde::{Deserialize, Serialize};

use crate::convert::{exact_conversion, shape_of_distance};
use crate::error::{finite, Error, Result};
use crate::special::{gauss_cdf, gauss_pdf};
use crate::terms::{LognormalVol, NormalVol, OptionTerms, Vol};

pub use crate::convert::smile_shape as breakeven_ratio;

/// Beyond this `|d|` gamma, vega and theta are flushed to 0 and delta to
/// 0 or 1.
pub const FLUSH_D: f64 = 38.0;

/// Greeks of one call plus its breakeven move over `δt = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreeksReport {
    pub delta: f64,
    pub gamma: f64,
    pub vega: f64,
    /// `∂C/∂T`.
    pub theta: f64,
    /// `μ = √(2Θ/Γ)`.
    pub breakeven: f64,
}

impl GreeksReport {
    /// Breakeven move over a period `dt` (years), `μ·√dt`.
    pub fn breakeven_over(&self, dt: f64) -> Result<f64> {
        crate::error::positive("dt", dt)?;
        Ok(self.breakeven * dt.sqrt())
    }
}

fn report(d: f64, gamma_per_pdf: f64, vega_per_pdf: f64, theta_per_pdf: f64, mu: f64) -> GreeksReport {
    if d.abs() > FLUSH_D {
        return GreeksReport {
            delta: if d > 0.0 { 1.0 } else { 0.0 },
            gamma: 0.0,
            vega: 0.0,
            theta: 0.0,
            breakeven: mu,
        };
    }
    let n = gauss_pdf(d);
    let gamma = gamma_per_pdf * n;
    let theta = theta_per_pdf * n;
    GreeksReport {
        delta: gauss_cdf(d),
        gamma,
        vega: vega_per_pdf * n,
        theta,
        breakeven: if gamma > 0.0 {
            (2.0 * theta / gamma).sqrt()
        } else {
            mu
        },
    }
}

/// Bachelier greeks, with `d = (S-K)/(σ_N√T)`:
/// `Δ = N(d)`, `Γ = n(d)/(σ_N√T)`, `ν = √T·n(d)`, `Θ = σ_N·n(d)/(2√T)`,
/// and `μ = σ_N`.
///
/// ```
/// use bachvol::{greeks::bachelier_greeks, NormalVol, OptionTerms};
/// let g = bachelier_greeks(&OptionTerms::new(100.0, 100.0, 1.0).unwrap(), NormalVol::new(20.0).unwrap());
/// assert_eq!(g.delta, 0.5);
/// assert!((g.breakeven - 20.0).abs() < 1e-12);
/// ```
pub fn bachelier_greeks(terms: &OptionTerms, vol: NormalVol) -> GreeksReport {
    let sigma = vol.value();
    let rt = terms.maturity().sqrt();
    let s = sigma * rt;
    let d = (terms.spot() - terms.strike()) / s;
    report(d, 1.0 / s, rt, 0.5 * sigma / rt, sigma)
}

/// Black-Scholes greeks at zero rates, with `v = σ_LN√T` and
/// `d₁ = ln(S/K)/v + v/2`:
/// `Δ = N(d₁)`, `Γ = n(d₁)/(S·v)`, `ν = S√T·n(d₁)`, `Θ = S·σ_LN·n(d₁)/(2√T)`,
/// and `μ = S·σ_LN`.
pub fn black_scholes_greeks(terms: &OptionTerms, vol: LognormalVol) -> GreeksReport {
    let sigma = vol.value();
    let spot = terms.spot();
    let rt = terms.maturity().sqrt();
    let v = sigma * rt;
    let d1 = (spot / terms.strike()).ln() / v + 0.5 * v;
    report(d1, 1.0 / (spot * v), spot * rt, 0.5 * spot * sigma / rt, spot * sigma)
}

/// Breakeven move `μ = √(2Θ·δt/Γ)`: a delta-hedged long option gains over
/// `δt` exactly when the underlying moves by more than `μ`.
///
/// ```
/// use bachvol::greeks::{bachelier_greeks, breakeven_move};
/// use bachvol::{NormalVol, OptionTerms};
/// let g = bachelier_greeks(&OptionTerms::new(100.0, 110.0, 0.5).unwrap(), NormalVol::new(15.0).unwrap());
/// let mu = breakeven_move(&g, 0.25).unwrap();
/// assert!((mu - 7.5).abs() < 1e-12);
/// ```
pub fn breakeven_move(report: &GreeksReport, dt: f64) -> Result<f64> {
    for (name, v) in [("dt", dt), ("gamma", report.gamma), ("theta", report.theta)] {
        finite(name, v)?;
        if v <= 0.0 {
            return Err(Error::Domain {
                name,
                value: v,
                requirement: "must be > 0",
            });
        }
    }
    Ok((2.0 * report.theta * dt / report.gamma).sqrt())
}

/// Ratios of Bachelier to Black-Scholes greeks.
///
/// Vega is compared as `S·ν_N/ν_LN`, which puts both on the scale of a
/// relative volatility move.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreekRatios {
    pub delta: f64,
    pub vega: f64,
    pub gamma: f64,
    pub theta: f64,
}

impl GreekRatios {
    fn between(n: &GreeksReport, ln: &GreeksReport, spot: f64) -> Self {
        Self {
            delta: n.delta / ln.delta,
            vega: spot * n.vega / ln.vega,
            gamma: n.gamma / ln.gamma,
            theta: n.theta / ln.theta,
        }
    }
}

/// The commonly quoted short-maturity limits of the greek ratios: delta and
/// vega ratios 1, gamma ratio `ℓ = S·(ln S - ln K)/(S-K)` and theta ratio
/// `1/ℓ`. At the money all four are 1.
///
/// With volatilities linked by price matching these are not the limits the
/// ratios reach; see [`price_matched_ratio_limits`].
///
/// ```
/// use bachvol::{greeks::greek_ratio_limits, OptionTerms};
/// let r = greek_ratio_limits(&OptionTerms::new(100.0, 120.0, 1e-4).unwrap());
/// assert!((r.gamma * r.theta - 1.0).abs() < 1e-15);
/// ```
pub fn greek_ratio_limits(terms: &OptionTerms) -> GreekRatios {
    let shape = shape_of_distance(terms);
    GreekRatios {
        delta: 1.0,
        vega: 1.0,
        gamma: shape,
        theta: 1.0 / shape,
    }
}

/// Limits of the greek ratios as `T → 0` when the two volatilities price the
/// same call: delta ratio `ℓ` out of the money and 1 in the money, vega
/// ratio `ℓ`, gamma ratio `ℓ²` and theta ratio 1, with
/// `ℓ = S·(ln S - ln K)/(S-K)`.
///
/// Matched prices share the leading exponent of the time value, so `Θ`
/// agrees across models; `Θ = σ²Γ/2` in each model and
/// `σ_N → S·σ_LN/ℓ` then give the gamma ratio.
///
/// ```
/// use bachvol::{greeks::{compare_models, price_matched_ratio_limits}, LognormalVol, OptionTerms, Vol};
/// let terms = OptionTerms::new(100.0, 120.0, 1e-4).unwrap();
/// let c = compare_models(&terms, Vol::Lognormal(LognormalVol::new(2.0).unwrap())).unwrap();
/// let lim = price_matched_ratio_limits(&terms);
/// assert!((c.measured.gamma / lim.gamma - 1.0).abs() < 1e-2);
/// assert!((c.measured.theta / lim.theta - 1.0).abs() < 1e-2);
/// ```
pub fn price_matched_ratio_limits(terms: &OptionTerms) -> GreekRatios {
    let shape = shape_of_distance(terms);
    GreekRatios {
        delta: if terms.strike() < terms.spot() { 1.0 } else { shape },
        vega: shape,
        gamma: shape * shape,
        theta: 1.0,
    }
}

/// Both models side by side, with volatilities linked by exact price
/// matching.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelComparison {
    pub normal_vol: NormalVol,
    pub lognormal_vol: LognormalVol,
    pub bachelier: GreeksReport,
    pub black_scholes: GreeksReport,
    /// Bachelier over Black-Scholes.
    pub measured: GreekRatios,
    /// [`greek_ratio_limits`].
    pub predicted: GreekRatios,
    /// [`price_matched_ratio_limits`].
    pub price_matched: GreekRatios,
}

/// Greeks in both models for the same price, with the measured and
/// predicted ratios.
pub fn compare_models(terms: &OptionTerms, vol: Vol) -> Result<ModelComparison> {
    let (normal_vol, lognormal_vol) = match (vol, exact_conversion(terms, vol)?) {
        (Vol::Normal(n), Vol::Lognormal(l)) | (Vol::Lognormal(l), Vol::Normal(n)) => (n, l),
        _ => unreachable!("conversion switches convention"),
    };
    let bachelier = bachelier_greeks(terms, normal_vol);
    let black_scholes = black_scholes_greeks(terms, lognormal_vol);
    Ok(ModelComparison {
        normal_vol,
        lognormal_vol,
        bachelier,
        black_scholes,
        measured: GreekRatios::between(&bachelier, &black_scholes, terms.spot()),
        predicted: greek_ratio_limits(terms),
        price_matched: price_matched_ratio_limits(terms),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pricing::{bachelier_call, black_scholes_call};

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn terms(s: f64, k: f64, t: f64) -> OptionTerms {
        OptionTerms::new(s, k, t).unwrap()
    }

    #[test]
    fn bachelier_against_differences() {
        let (s, k, t, sig) = (100.0, 110.0, 0.5, 15.0);
        let c = |s: f64, t: f64, sig: f64| bachelier_call(&terms(s, k, t), NormalVol::new(sig).unwrap());
        let g = bachelier_greeks(&terms(s, k, t), NormalVol::new(sig).unwrap());
        let h = 1e-3;
        assert!(rel(g.delta, (c(s + h, t, sig) - c(s - h, t, sig)) / (2.0 * h)) < 1e-8);
        let hg = 1e-2;
        let fd_gamma = (c(s + hg, t, sig) - 2.0 * c(s, t, sig) + c(s - hg, t, sig)) / (hg * hg);
        assert!(rel(g.gamma, fd_gamma) < 1e-6);
        assert!(rel(g.vega, (c(s, t, sig + h) - c(s, t, sig - h)) / (2.0 * h)) < 1e-8);
        let ht = 1e-5;
        assert!(rel(g.theta, (c(s, t + ht, sig) - c(s, t - ht, sig)) / (2.0 * ht)) < 1e-8);
    }

    #[test]
    fn black_scholes_against_differences() {
        let (s, k, t, sig) = (100.0, 90.0, 0.75, 0.3);
        let c = |s: f64, t: f64, sig: f64| {
            black_scholes_call(&terms(s, k, t), LognormalVol::new(sig).unwrap())
        };
        let g = black_scholes_greeks(&terms(s, k, t), LognormalVol::new(sig).unwrap());
        let h = 1e-3;
        assert!(rel(g.delta, (c(s + h, t, sig) - c(s - h, t, sig)) / (2.0 * h)) < 1e-8);
        let hg = 1e-2;
        let fd_gamma = (c(s + hg, t, sig) - 2.0 * c(s, t, sig) + c(s - hg, t, sig)) / (hg * hg);
        assert!(rel(g.gamma, fd_gamma) < 1e-6);
        let hv = 1e-5;
        assert!(rel(g.vega, (c(s, t, sig + hv) - c(s, t, sig - hv)) / (2.0 * hv)) < 1e-8);
        let ht = 1e-5;
        assert!(rel(g.theta, (c(s, t + ht, sig) - c(s, t - ht, sig)) / (2.0 * ht)) < 1e-8);
    }

    #[test]
    fn heat_equation_identities() {
        for &k in &[70.0, 100.0, 130.0] {
            let t = terms(100.0, k, 0.4);
            let g = bachelier_greeks(&t, NormalVol::new(12.0).unwrap());
            assert!(rel(g.theta, 0.5 * 144.0 * g.gamma) < 1e-14);
            let g = black_scholes_greeks(&t, LognormalVol::new(0.25).unwrap());
            assert!(rel(g.theta, 0.5 * 0.0625 * 1e4 * g.gamma) < 1e-14);
        }
    }

    #[test]
    fn breakeven() {
        let t = terms(100.0, 120.0, 0.3);
        let g = black_scholes_greeks(&t, LognormalVol::new(0.2).unwrap());
        assert!(rel(g.breakeven, 20.0) < 1e-14);
        assert!(rel(breakeven_move(&g, 4.0).unwrap(), 40.0) < 1e-14);
        assert!(breakeven_move(&g, 0.0).is_err());
        let flat = GreeksReport {
            gamma: 0.0,
            ..g
        };
        assert!(matches!(
            breakeven_move(&flat, 1.0),
            Err(Error::Domain { name: "gamma", .. })
        ));
        // P&L = -Θδt + Γ(ΔS)²/2 changes sign at μ
        let mu = breakeven_move(&g, 0.1).unwrap();
        let pnl = |ds: f64| -g.theta * 0.1 + 0.5 * g.gamma * ds * ds;
        assert!(pnl(1.01 * mu) > 0.0 && pnl(0.99 * mu) < 0.0);
    }

    #[test]
    fn flushing_far_from_money() {
        let g = bachelier_greeks(&terms(100.0, 200.0, 1e-4), NormalVol::new(10.0).unwrap());
        assert_eq!((g.delta, g.gamma, g.vega, g.theta), (0.0, 0.0, 0.0, 0.0));
        assert_eq!(g.breakeven, 10.0);
        let g = black_scholes_greeks(&terms(100.0, 10.0, 1e-4), LognormalVol::new(0.1).unwrap());
        assert_eq!(g.delta, 1.0);
        assert_eq!(g.breakeven, 10.0);
    }

    #[test]
    fn ratio_limits() {
        let r = greek_ratio_limits(&terms(100.0, 100.0, 1.0));
        assert_eq!((r.delta, r.vega, r.gamma, r.theta), (1.0, 1.0, 1.0, 1.0));
        let r = greek_ratio_limits(&terms(100.0, 80.0, 1.0));
        let want = 100.0 * (100.0f64 / 80.0).ln() / 20.0;
        assert!(rel(r.gamma, want) < 1e-15);
        assert_eq!(breakeven_ratio(0.8).unwrap(), crate::convert::smile_shape(0.8).unwrap());
    }

    #[test]
    fn comparison_links_prices() {
        let t = terms(100.0, 105.0, 0.5);
        let c = compare_models(&t, Vol::Lognormal(LognormalVol::new(0.2).unwrap())).unwrap();
        let pn = bachelier_call(&t, c.normal_vol);
        let pl = black_scholes_call(&t, c.lognormal_vol);
        assert!(rel(pn, pl) < 1e-12);
        assert!(c.measured.delta > 0.8 && c.measured.delta < 1.0);
    }

    #[test]
    fn price_matched_limits_are_reached() {
        for k in [80.0, 90.0, 110.0, 120.0] {
            let t = terms(100.0, k, 1e-4);
            let c = compare_models(&t, Vol::Lognormal(LognormalVol::new(2.0).unwrap())).unwrap();
            let (m, p) = (c.measured, c.price_matched);
            for (got, want) in [(m.delta, p.delta), (m.vega, p.vega), (m.gamma, p.gamma), (m.theta, p.theta)] {
                assert!(rel(got, want) < 2e-3, "K={k}: {got} vs {want}");
            }
        }
        let atm = price_matched_ratio_limits(&terms(100.0, 100.0, 1.0));
        assert_eq!((atm.delta, atm.vega, atm.gamma, atm.theta), (1.0, 1.0, 1.0, 1.0));
    }
}
