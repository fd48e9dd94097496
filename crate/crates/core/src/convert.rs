//! Conversion between normal and lognormal implied volatility.
//!
//! The closed forms are short-maturity expansions: order 0 is exact as
//! `T → 0` and order 1 adds the `O(T)` correction, leaving an error of order
//! `T² ln T`. [`exact_conversion`] matches prices instead and is the reference
//! outside the short-maturity regime.

use serde::{Deserialize, Serialize};

use crate::error::{finite, Error, Result};
use crate::implied::{solve_lognormal, solve_normal};
use crate::pricing::{lognormal_time_value, normal_time_value};
use crate::terms::{LognormalVol, NormalVol, OptionTerms, Vol};

/// `ln(1+x)/x`, continuous at 0.
pub(crate) fn shape_from_offset(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.ln_1p() / x
    }
}

/// `ln m/(m-1)` for the contract's moneyness, without rounding `K/S` first.
pub(crate) fn shape_of_distance(terms: &OptionTerms) -> f64 {
    shape_from_offset((terms.strike() - terms.spot()) / terms.spot())
}

fn x_ln(terms: &OptionTerms) -> f64 {
    ((terms.strike() - terms.spot()) / terms.spot()).ln_1p()
}

/// `m ↦ ln(m)/(m-1)`, extended by 1 at `m = 1`.
///
/// This is the lognormal smile generated by a flat Bachelier volatility,
/// normalized by `σ_N/S`, and also the ratio of breakeven moves
/// `μ_LN/μ_N`.
///
/// ```
/// use bachvol::convert::smile_shape;
/// assert_eq!(smile_shape(1.0).unwrap(), 1.0);
/// assert!((smile_shape(2.0).unwrap() - 2f64.ln()).abs() < 1e-16);
/// assert!(smile_shape(0.0).is_err());
/// ```
pub fn smile_shape(m: f64) -> Result<f64> {
    finite("m", m)?;
    if m <= 0.0 {
        return Err(Error::Domain {
            name: "m",
            value: m,
            requirement: "must be > 0",
        });
    }
    Ok(shape_from_offset(m - 1.0))
}

/// Short-maturity limit `σ_N = (S-K)/(ln S - ln K)·σ_LN`, and `S·σ_LN` at
/// the money.
///
/// ```
/// use bachvol::{convert::normal_from_lognormal_order0, LognormalVol, OptionTerms};
/// let terms = OptionTerms::new(100.0, 100.0, 1.0).unwrap();
/// let v = normal_from_lognormal_order0(&terms, LognormalVol::new(0.2).unwrap());
/// assert_eq!(v.value(), 20.0);
/// ```
pub fn normal_from_lognormal_order0(terms: &OptionTerms, vol: LognormalVol) -> NormalVol {
    NormalVol::from_positive(terms.spot() * vol.value() / shape_of_distance(terms))
}

/// Inverse of [`normal_from_lognormal_order0`]:
/// `σ_LN = (ln m/(m-1))·σ_N/S`.
pub fn lognormal_from_normal_order0(terms: &OptionTerms, vol: NormalVol) -> LognormalVol {
    LognormalVol::from_positive(shape_of_distance(terms) * vol.value() / terms.spot())
}

/// Coefficient of the first-order correction,
/// `c = ln((S-K)/(√(KS)·ln(S/K)))/ln²(S/K)`, as a function of the
/// log-moneyness `x = ln(K/S)`.
///
/// Written as `c = ln(sinh(x/2)/(x/2))/x²`, which is even in `x` and tends to
/// `1/24` at the money.
///
/// ```
/// use bachvol::convert::correction_coefficient;
/// assert_eq!(correction_coefficient(0.0), 1.0 / 24.0);
/// assert!((correction_coefficient(1e-4) - 1.0 / 24.0).abs() < 1e-10);
/// ```
pub fn correction_coefficient(x: f64) -> f64 {
    let h = 0.5 * x.abs();
    if h == 0.0 {
        return 1.0 / 24.0;
    }
    let ln_sinhc = if h < 1.0 {
        // sinh(h)/h - 1 = Σ_{k≥1} h^{2k}/(2k+1)!
        let h2 = h * h;
        let mut term = 1.0;
        let mut q = 0.0;
        for k in 1..=12 {
            term *= h2 / ((2 * k) as f64 * (2 * k + 1) as f64);
            q += term;
        }
        q.ln_1p()
    } else {
        // ln sinh h without overflow
        h + (-(-2.0 * h).exp()).ln_1p() - std::f64::consts::LN_2 - h.ln()
    };
    ln_sinhc / (x * x)
}

/// First-order conversion
/// `σ_N = (S-K)/(ln S - ln K)·σ_LN·(1 - c·σ_LN²T)` with `c` from
/// [`correction_coefficient`]; at the money `σ_N = S·σ_LN(1 - σ_LN²T/24)`.
///
/// Fails when `c·σ_LN²T ≥ 1`, far outside the regime where the expansion is
/// meaningful.
pub fn normal_from_lognormal_order1(terms: &OptionTerms, vol: LognormalVol) -> Result<NormalVol> {
    let s = vol.value();
    let factor = 1.0 - correction_coefficient(x_ln(terms)) * s * s * terms.maturity();
    if factor.is_nan() || factor <= 0.0 {
        return Err(Error::CorrectionBreakdown { factor });
    }
    Ok(NormalVol::from_positive(
        normal_from_lognormal_order0(terms, vol).value() * factor,
    ))
}

/// First-order conversion in the other direction, from inverting
/// [`normal_from_lognormal_order1`] to the same order:
/// `σ_LN = σ₀(1 + c·σ₀²T)` with `σ₀` the order-0 conversion.
pub fn lognormal_from_normal_order1(terms: &OptionTerms, vol: NormalVol) -> LognormalVol {
    let s0 = lognormal_from_normal_order0(terms, vol).value();
    let c = correction_coefficient(x_ln(terms));
    LognormalVol::from_positive(s0 * (1.0 + c * s0 * s0 * terms.maturity()))
}

/// Price-matching conversion: price in the source model, invert exactly in
/// the other one.
///
/// Works on time values, so deep in-the-money contracts keep their accuracy.
///
/// ```
/// use bachvol::{convert::exact_conversion, LognormalVol, OptionTerms, Vol};
/// let terms = OptionTerms::new(100.0, 120.0, 0.25).unwrap();
/// let ln = Vol::Lognormal(LognormalVol::new(0.2).unwrap());
/// let Vol::Normal(n) = exact_conversion(&terms, ln).unwrap() else { unreachable!() };
/// // order 0 gives 20·0.2/ln 1.2 = 21.94
/// assert!((n.value() - 21.93).abs() < 0.01);
/// ```
pub fn exact_conversion(terms: &OptionTerms, vol: Vol) -> Result<Vol> {
    let t = terms.maturity().sqrt();
    match vol {
        Vol::Normal(v) => {
            let tv = normal_time_value(terms.distance(), v.value() * t);
            solve_lognormal(terms, tv).map(Vol::Lognormal)
        }
        Vol::Lognormal(v) => {
            let tv = lognormal_time_value(terms.spot(), terms.strike(), v.value() * t);
            solve_normal(terms, tv).map(Vol::Normal)
        }
    }
}

/// Conversion order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConversionOrder {
    Zero,
    One,
    Exact,
}

impl ConversionOrder {
    pub fn as_str(self) -> &'static str {
        match self {
            ConversionOrder::Zero => "order0",
            ConversionOrder::One => "order1",
            ConversionOrder::Exact => "exact",
        }
    }
}

/// Converts `vol` to the other convention at the given order.
pub fn convert(terms: &OptionTerms, vol: Vol, order: ConversionOrder) -> Result<Vol> {
    match (order, vol) {
        (ConversionOrder::Exact, _) => exact_conversion(terms, vol),
        (ConversionOrder::Zero, Vol::Normal(v)) => {
            Ok(Vol::Lognormal(lognormal_from_normal_order0(terms, v)))
        }
        (ConversionOrder::Zero, Vol::Lognormal(v)) => {
            Ok(Vol::Normal(normal_from_lognormal_order0(terms, v)))
        }
        (ConversionOrder::One, Vol::Normal(v)) => {
            Ok(Vol::Lognormal(lognormal_from_normal_order1(terms, v)))
        }
        (ConversionOrder::One, Vol::Lognormal(v)) => {
            normal_from_lognormal_order1(terms, v).map(Vol::Normal)
        }
    }
}

/// At-the-money slope `∂σ_LN/∂m = -σ_N/(2S)` of the lognormal smile
/// produced by a flat normal volatility.
///
/// ```
/// use bachvol::{convert::atm_skew_lognormal_from_bachelier, NormalVol};
/// let skew = atm_skew_lognormal_from_bachelier(100.0, NormalVol::new(20.0).unwrap()).unwrap();
/// assert_eq!(skew, -0.1);
/// ```
pub fn atm_skew_lognormal_from_bachelier(spot: f64, vol: NormalVol) -> Result<f64> {
    let spot = crate::error::positive("spot", spot)?;
    Ok(-0.5 * vol.value() / spot)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn terms(s: f64, k: f64, t: f64) -> OptionTerms {
        OptionTerms::new(s, k, t).unwrap()
    }

    fn lv(v: f64) -> LognormalVol {
        LognormalVol::new(v).unwrap()
    }

    fn nv(v: f64) -> NormalVol {
        NormalVol::new(v).unwrap()
    }

    #[test]
    fn order0_examples() {
        let e = std::f64::consts::E;
        let v = normal_from_lognormal_order0(&terms(1.0, e, 1.0), lv(0.2));
        assert!(rel(v.value(), (e - 1.0) * 0.2) < 1e-15);
        let v = lognormal_from_normal_order0(&terms(100.0, 120.0, 1.0), nv(20.0));
        assert!(rel(v.value(), 1.2f64.ln()) < 1e-15);
        let atm = terms(100.0, 100.0, 1.0);
        assert_eq!(lognormal_from_normal_order0(&atm, nv(20.0)).value(), 0.2);
    }

    #[test]
    fn order0_continuous_at_atm() {
        let atm = normal_from_lognormal_order0(&terms(100.0, 100.0, 1.0), lv(0.3)).value();
        for &eps in &[1e-6, 1e-10, -1e-12] {
            let v = normal_from_lognormal_order0(&terms(100.0, 100.0 * (1.0 + eps), 1.0), lv(0.3));
            assert!(rel(v.value(), atm) < 2.0 * eps.abs());
        }
    }

    #[test]
    fn coefficient_matches_definition() {
        for &k in &[50.0, 80.0, 120.0, 300.0] {
            let (s, x) = (100.0f64, (k / 100.0f64).ln());
            let direct = ((s - k) / ((s * k).sqrt() * (s / k).ln())).ln() / (s / k).ln().powi(2);
            assert!(rel(correction_coefficient(x), direct) < 1e-13, "K={k}");
        }
        assert!(rel(correction_coefficient(0.1825), 0.0416551) < 1e-5);
        assert_eq!(correction_coefficient(-0.3), correction_coefficient(0.3));
        // series 1/24 - x²/2880 near the money
        let x = 1e-3;
        assert!((correction_coefficient(x) - (1.0 / 24.0 - x * x / 2880.0)).abs() < 1e-16);
        let big = correction_coefficient(2000.0);
        assert!(big.is_finite() && big > 0.0);
    }

    #[test]
    fn order1_examples() {
        let t = terms(100.0, 100.0, 1.0);
        let v = normal_from_lognormal_order1(&t, lv(0.2)).unwrap();
        assert!(rel(v.value(), 20.0 * (1.0 - 0.04 / 24.0)) < 1e-15);
        let t = terms(100.0, 120.0, 1.0);
        let v0 = normal_from_lognormal_order0(&t, lv(0.2)).value();
        let v1 = normal_from_lognormal_order1(&t, lv(0.2)).unwrap().value();
        let Vol::Normal(ex) = exact_conversion(&t, Vol::Lognormal(lv(0.2))).unwrap() else {
            panic!()
        };
        assert!((v1 - ex.value()).abs() < (v0 - ex.value()).abs());
        assert!(matches!(
            normal_from_lognormal_order1(&terms(100.0, 100.0, 100.0), lv(1.0)),
            Err(Error::CorrectionBreakdown { .. })
        ));
    }

    #[test]
    fn reverse_order1_inverts_to_second_order() {
        let t = terms(100.0, 130.0, 0.01);
        let n = nv(25.0);
        let ln = lognormal_from_normal_order1(&t, n);
        let back = normal_from_lognormal_order1(&t, ln).unwrap();
        let s0 = lognormal_from_normal_order0(&t, n).value();
        assert!(rel(back.value(), 25.0) < 10.0 * (s0 * s0 * 0.01f64).powi(2));
    }

    #[test]
    fn exact_round_trip() {
        for &k in &[70.0, 100.0, 125.0] {
            let t = terms(100.0, k, 0.5);
            let Vol::Lognormal(l) = exact_conversion(&t, Vol::Normal(nv(18.0))).unwrap() else {
                panic!()
            };
            let Vol::Normal(n) = exact_conversion(&t, Vol::Lognormal(l)).unwrap() else {
                panic!()
            };
            assert!(rel(n.value(), 18.0) < 1e-9, "K={k}");
        }
    }

    #[test]
    fn convert_dispatch() {
        let t = terms(100.0, 110.0, 0.5);
        let n = Vol::Normal(nv(20.0));
        let Vol::Lognormal(l) = convert(&t, n, ConversionOrder::Zero).unwrap() else { panic!() };
        let back = convert(&t, Vol::Lognormal(l), ConversionOrder::Zero).unwrap();
        assert!(rel(back.value(), 20.0) < 1e-15);
        assert!(matches!(convert(&t, n, ConversionOrder::One), Ok(Vol::Lognormal(_))));
        assert!(matches!(convert(&t, n, ConversionOrder::Exact), Ok(Vol::Lognormal(_))));
    }

    #[test]
    fn smile_shape_values() {
        let e = std::f64::consts::E;
        assert!(rel(smile_shape(e).unwrap(), 1.0 / (e - 1.0)) < 1e-15);
        assert!(smile_shape(0.5).unwrap() > 1.0);
        assert!(smile_shape(2.0).unwrap() < 1.0);
        assert!(smile_shape(-1.0).is_err());
        assert!(smile_shape(f64::NAN).is_err());
        assert!(rel(smile_shape(1.0 + 1e-12).unwrap(), 1.0 - 0.5e-12) < 1e-15);
    }

    #[test]
    fn skew() {
        assert!(atm_skew_lognormal_from_bachelier(0.0, nv(1.0)).is_err());
        let a = atm_skew_lognormal_from_bachelier(100.0, nv(20.0)).unwrap();
        let b = atm_skew_lognormal_from_bachelier(100.0, nv(40.0)).unwrap();
        assert_eq!(b, 2.0 * a);
    }
}
