//! Contract terms and the two volatility conventions.

use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};

/// Spot, strike and maturity of one European call.
///
/// Inputs are forward prices: the library works with zero rates and no
/// dividends throughout.
///
/// ```
/// use bachvol::OptionTerms;
/// let t = OptionTerms::new(100.0, 120.0, 0.5).unwrap();
/// assert_eq!(t.moneyness(), 1.2);
/// assert!(OptionTerms::new(100.0, -1.0, 0.5).is_err());
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTerms")]
pub struct OptionTerms {
    spot: f64,
    strike: f64,
    maturity: f64,
}

#[derive(Deserialize)]
struct RawTerms {
    spot: f64,
    strike: f64,
    maturity: f64,
}

impl TryFrom<RawTerms> for OptionTerms {
    type Error = Error;
    fn try_from(r: RawTerms) -> Result<Self> {
        OptionTerms::new(r.spot, r.strike, r.maturity)
    }
}

impl OptionTerms {
    pub fn new(spot: f64, strike: f64, maturity: f64) -> Result<Self> {
        Ok(Self {
            spot: positive("spot", spot)?,
            strike: positive("strike", strike)?,
            maturity: positive("maturity", maturity)?,
        })
    }

    pub fn spot(&self) -> f64 {
        self.spot
    }

    pub fn strike(&self) -> f64 {
        self.strike
    }

    pub fn maturity(&self) -> f64 {
        self.maturity
    }

    /// `m = K/S`.
    pub fn moneyness(&self) -> f64 {
        self.strike / self.spot
    }

    /// `(S - K)_+`.
    pub fn intrinsic(&self) -> f64 {
        (self.spot - self.strike).max(0.0)
    }

    /// `|S - K|`.
    pub fn distance(&self) -> f64 {
        (self.spot - self.strike).abs()
    }

    pub fn is_atm(&self) -> bool {
        self.spot == self.strike
    }

    /// Same contract with a different maturity.
    pub fn with_maturity(&self, maturity: f64) -> Result<Self> {
        Self::new(self.spot, self.strike, maturity)
    }
}

macro_rules! vol_type {
    ($(#[$doc:meta])* $name:ident, $label:literal) => {
        $(#[$doc])*
        #[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
        #[serde(try_from = "f64", into = "f64")]
        pub struct $name(f64);

        impl $name {
            pub fn new(value: f64) -> Result<Self> {
                positive($label, value).map(Self)
            }

            pub fn value(self) -> f64 {
                self.0
            }

            /// Internal constructor for values positive by construction.
            pub(crate) fn from_positive(value: f64) -> Self {
                debug_assert!(value > 0.0 && value.is_finite(), "{value}");
                Self(value)
            }
        }

        impl TryFrom<f64> for $name {
            type Error = Error;
            fn try_from(v: f64) -> Result<Self> {
                Self::new(v)
            }
        }

        impl From<$name> for f64 {
            fn from(v: $name) -> f64 {
                v.0
            }
        }
    };
}

vol_type!(
    /// Bachelier volatility `σ_N`, in currency units per √year.
    NormalVol,
    "normal volatility"
);

vol_type!(
    /// Black-Scholes volatility `σ_LN`, per √year.
    LognormalVol,
    "lognormal volatility"
);

/// A volatility in either convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Vol {
    Normal(NormalVol),
    Lognormal(LognormalVol),
}

impl Vol {
    pub fn value(self) -> f64 {
        match self {
            Vol::Normal(v) => v.value(),
            Vol::Lognormal(v) => v.value(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(OptionTerms::new(100.0, 100.0, 1.0).is_ok());
        assert!(OptionTerms::new(0.0, 100.0, 1.0).is_err());
        assert!(OptionTerms::new(100.0, 100.0, 0.0).is_err());
        assert!(matches!(
            OptionTerms::new(f64::NAN, 1.0, 1.0),
            Err(Error::NonFinite { name: "spot", .. })
        ));
        assert!(NormalVol::new(0.0).is_err());
        assert!(LognormalVol::new(f64::INFINITY).is_err());
        assert_eq!(NormalVol::new(3.0).unwrap().value(), 3.0);
    }

    #[test]
    fn derived_quantities() {
        let t = OptionTerms::new(100.0, 90.0, 2.0).unwrap();
        assert_eq!(t.intrinsic(), 10.0);
        assert_eq!(t.distance(), 10.0);
        assert_eq!(t.moneyness(), 0.9);
        assert!(!t.is_atm());
    }

    #[test]
    fn serde_validates() {
        let t: OptionTerms =
            serde_json::from_str(r#"{"spot":100,"strike":90,"maturity":1}"#).unwrap();
        assert_eq!(t.strike(), 90.0);
        assert!(serde_json::from_str::<OptionTerms>(r#"{"spot":-1,"strike":90,"maturity":1}"#)
            .is_err());
        assert!(serde_json::from_str::<NormalVol>("-2").is_err());
        let v = Vol::Lognormal(LognormalVol::new(0.2).unwrap());
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"kind":"lognormal","value":0.2}"#);
        assert_eq!(serde_json::from_str::<Vol>(&s).unwrap(), v);
    }
}
