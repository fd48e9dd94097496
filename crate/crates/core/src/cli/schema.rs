//! Records written by `--format json`. Every type deserializes from its own
//! output.

use serde::{Deserialize, Serialize};

use crate::greeks::{GreekRatios, GreeksReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuoteKind {
    Price,
    NormalVol,
    LognormalVol,
}

impl QuoteKind {
    pub fn as_str(self) -> &'static str {
        match self {
            QuoteKind::Price => "price",
            QuoteKind::NormalVol => "normal_vol",
            QuoteKind::LognormalVol => "lognormal_vol",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "price" => Some(QuoteKind::Price),
            "normal_vol" => Some(QuoteKind::NormalVol),
            "lognormal_vol" => Some(QuoteKind::LognormalVol),
            _ => None,
        }
    }
}

/// One input quote. `value` is a price or a volatility according to `kind`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuoteRecord {
    pub spot: f64,
    pub strike: f64,
    pub maturity: f64,
    pub value: f64,
    pub kind: QuoteKind,
}

/// One processed row of `implied` or `convert`.
///
/// Input fields that failed to parse are `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub spot: Option<f64>,
    pub strike: Option<f64>,
    pub maturity: Option<f64>,
    pub value: Option<f64>,
    pub kind: Option<QuoteKind>,
    pub result: Option<f64>,
    pub method: Option<String>,
    pub error: Option<String>,
    /// Time value over the strike distance, for implied rows.
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelName {
    Bachelier,
    BlackScholes,
}

impl ModelName {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelName::Bachelier => "bachelier",
            ModelName::BlackScholes => "black-scholes",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriceRecord {
    pub model: ModelName,
    pub spot: f64,
    pub strike: f64,
    pub maturity: f64,
    pub vol: f64,
    pub price: f64,
    pub time_value: f64,
    /// Time value through the incomplete gamma representation (bachelier,
    /// off the money).
    pub time_value_gamma: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelGreeks {
    pub model: ModelName,
    pub vol: f64,
    #[serde(flatten)]
    pub greeks: GreeksReport,
    /// Breakeven move over `dt`.
    pub breakeven_dt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreeksRecord {
    pub spot: f64,
    pub strike: f64,
    pub maturity: f64,
    pub dt: f64,
    pub models: Vec<ModelGreeks>,
    /// Bachelier over Black-Scholes, present with `--compare`.
    pub measured_ratios: Option<GreekRatios>,
    /// Commonly quoted short-maturity limits of the same ratios.
    pub limit_ratios: Option<GreekRatios>,
    /// Short-maturity limits under price matching.
    pub price_matched_limits: Option<GreekRatios>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmilePoint {
    pub m: f64,
    pub smile_shape: f64,
    pub breakeven_ratio: f64,
}
