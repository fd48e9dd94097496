//! Special-function kernel: Gaussian density and distribution, the error
//! functions, and the upper incomplete Gamma function at `a = -1/2`.
//!
//! The functions here take and return plain `f64`. They are total on finite
//! inputs; the validated entry points of the other modules guarantee that only
//! finite values reach them. Infinite arguments return the mathematical limits
//! and `NaN` propagates.

#![allow(clippy::excessive_precision)]

use crate::error::{finite, Error, Result};

/// `1/√(2π)`.
pub const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
/// `√(2π)`.
pub const SQRT_2PI: f64 = 2.506_628_274_631_000_7;
/// `√π`.
pub const SQRT_PI: f64 = 1.772_453_850_905_516;

/// `exp(-x²)` without the relative error `x²·ε` that comes from rounding `x²`.
///
/// The rounding residual of `x*x` is recovered with a fused multiply-add and
/// applied as a first-order correction.
#[inline]
pub(crate) fn exp_neg_sq(x: f64) -> f64 {
    let hi = x * x;
    if hi > 746.0 {
        return 0.0;
    }
    let lo = x.mul_add(x, -hi);
    (-hi).exp() * (1.0 - lo)
}

/// `exp(-x²/2)`, same treatment as [`exp_neg_sq`].
#[inline]
pub(crate) fn exp_neg_half_sq(x: f64) -> f64 {
    let hi = x * x;
    if hi > 1491.0 {
        return 0.0;
    }
    let lo = x.mul_add(x, -hi);
    (-0.5 * hi).exp() * (1.0 - 0.5 * lo)
}

/// Standard normal density `n(x) = exp(-x²/2)/√(2π)`.
///
/// ```
/// use bachvol::special::gauss_pdf;
/// assert_eq!(gauss_pdf(0.0), 0.3989422804014327);
/// assert_eq!(gauss_pdf(1.5), gauss_pdf(-1.5));
/// ```
pub fn gauss_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * exp_neg_half_sq(x)
}

/// Standard normal distribution function `N(x)`.
///
/// Evaluated as `erfc(-x/√2)/2`, which keeps full relative accuracy in the
/// lower tail.
pub fn gauss_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

/// Error function.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let r = if ax < 0.5 {
        erf_small(ax)
    } else {
        1.0 - erfc_pos(ax)
    };
    r.copysign(x)
}

/// Complementary error function `erfc(x) = 2/√π ∫ₓ^∞ e^{-t²} dt`.
///
/// Relative accuracy is better than `1e-14` on `|x| ≤ 26`; the result flushes
/// to `+0` once it drops below the smallest subnormal (`x ≳ 27.3`).
///
/// ```
/// use bachvol::special::erfc;
/// assert_eq!(erfc(0.0), 1.0);
/// assert!((erfc(1.0) - 0.15729920705028513).abs() < 1e-17);
/// assert_eq!(erfc(40.0), 0.0);
/// ```
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < -0.5 {
        2.0 - erfc_pos(-x)
    } else if x < 0.0 {
        1.0 + erf_small(-x)
    } else if x < 0.5 {
        1.0 - erf_small(x)
    } else {
        erfc_pos(x)
    }
}

/// Scaled complementary error function `erfcx(x) = exp(x²)·erfc(x)`.
///
/// Overflows to `+∞` for `x ≲ -26.6`.
pub fn erfcx(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        let e = (x * x).exp();
        return 2.0 * e - erfcx(-x);
    }
    if x < 0.5 {
        return (1.0 - erf_small(x)) * (x * x).exp();
    }
    if x < 110.0 {
        return erfcx_core(x);
    }
    // erfcx(x) ~ 1/(x√π) · (1 - 1/(2x²) + 3/(4x⁴) - 15/(8x⁶)), truncation < 1e-17 here
    let t = 1.0 / (x * x);
    (1.0 + t * (-0.5 + t * (0.75 - t * 1.875))) / (x * SQRT_PI)
}

/// Upper incomplete Gamma function `Γ(-1/2, z) = ∫_z^∞ u^{-3/2} e^{-u} du`.
///
/// Uses the exact reduction `Γ(-1/2, z) = 2(e^{-z}/√z - √π·erfc(√z))`, which
/// follows from `Γ(a+1, z) = a·Γ(a, z) + z^a e^{-z}` and `Γ(1/2, z) = √π·erfc(√z)`.
/// Both terms carry the factor `e^{-z}`, so it is pulled out exactly and the
/// bracket `b(y) = 1/y - √π·erfcx(y)` is evaluated at `y = √z`. The bracket
/// cancels like `1/(2y³)`, so for `z ≥ 144` its asymptotic series is summed
/// instead. For `z ≳ 745` the result flushes to `+0`.
///
/// ```
/// use bachvol::special::upper_gamma_neg_half;
/// let g = upper_gamma_neg_half(1.0).unwrap();
/// assert!((g - 0.17814771178156069).abs() < 1e-15);
/// assert!(upper_gamma_neg_half(0.0).is_err());
/// ```
pub fn upper_gamma_neg_half(z: f64) -> Result<f64> {
    finite("z", z)?;
    if z <= 0.0 {
        return Err(Error::Domain {
            name: "z",
            value: z,
            requirement: "must be > 0",
        });
    }
    Ok(gamma_neg_half(z))
}

/// `Γ(-1/2, z)` for `z > 0`, unchecked.
pub(crate) fn gamma_neg_half(z: f64) -> f64 {
    let e = (-z).exp();
    if e == 0.0 {
        return 0.0;
    }
    (2.0 * e * gamma_bracket(z.sqrt())).max(0.0)
}

/// `(ln Γ(-1/2, z), d ln Γ / d ln z)` for `z > 0`. Never underflows.
pub(crate) fn ln_gamma_neg_half(z: f64) -> (f64, f64) {
    let y = z.sqrt();
    let b = gamma_bracket(y);
    (-z + (2.0 * b).ln(), -0.5 / (y * b))
}

/// `1/y - √π·erfcx(y)`.
fn gamma_bracket(y: f64) -> f64 {
    if y < 12.0 {
        return 1.0 / y - SQRT_PI * erfcx(y);
    }
    // asymptotic series, summed directly to skip the cancellation:
    // (1/y) Σ_{k≥1} (-1)^{k+1} (2k-1)!! (2y²)^{-k}
    let t = 0.5 / (y * y);
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..=14 {
        term *= (2 * k - 1) as f64 * t;
        if k % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum / y
}

/// Largest truncation order accepted by the asymptotic time-value series.
pub const MAX_SERIES_ORDER: usize = 12;

/// Odd double factorials `(2k+1)!! = 1·3·5···(2k+1)` for `k = 0..=12`.
///
/// These are the coefficients of the large-`z` expansion
/// `Γ(-1/2, z) ~ z^{-3/2} e^{-z} Σ (-1)^k (2k+1)!! (2z)^{-k}`.
pub const ODD_DOUBLE_FACTORIAL: [u64; MAX_SERIES_ORDER + 1] = [
    1,
    3,
    15,
    105,
    945,
    10_395,
    135_135,
    2_027_025,
    34_459_425,
    654_729_075,
    13_749_310_575,
    316_234_143_225,
    7_905_853_580_625,
];

/// Whether a [`SeriesResult::remainder_bound`] is a proven bound or only an
/// order-of-magnitude estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemainderKind {
    /// The truncation error is guaranteed to be at most `remainder_bound`.
    Bound,
    /// `remainder_bound` is the magnitude of the first omitted term, with no
    /// guarantee attached.
    Estimate,
}

/// A truncated asymptotic series together with its truncation error.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SeriesResult {
    pub value: f64,
    pub order: usize,
    pub remainder_bound: f64,
    pub kind: RemainderKind,
}

pub(crate) fn check_order(p: usize) -> Result<()> {
    if (1..=MAX_SERIES_ORDER).contains(&p) {
        Ok(())
    } else {
        Err(Error::SeriesOrder {
            order: p,
            max: MAX_SERIES_ORDER,
        })
    }
}

/// Partial sum `Σ_{k<p} (-1)^k (2k+1)!! w^k` and the bound `(2p+1)!! w^p`
/// on what is left out.
///
/// With `w = σ²T/(S-K)²` this is the bracket of the deep out-of-the-money
/// time-value expansion; the series alternates and its remainder never
/// exceeds the first omitted term.
///
/// ```
/// use bachvol::special::scaled_gamma_series;
/// let s = scaled_gamma_series(0.01, 2).unwrap();
/// assert!((s.value - 0.97).abs() < 1e-15);
/// assert!((s.remainder_bound - 0.0015).abs() < 1e-15);
/// ```
pub fn scaled_gamma_series(w: f64, p: usize) -> Result<SeriesResult> {
    finite("w", w)?;
    if w <= 0.0 {
        return Err(Error::Domain {
            name: "w",
            value: w,
            requirement: "must be > 0",
        });
    }
    check_order(p)?;
    let (value, remainder_bound) = gamma_series_sum(w, p);
    Ok(SeriesResult {
        value,
        order: p,
        remainder_bound,
        kind: RemainderKind::Bound,
    })
}

/// Unchecked partial sum and first omitted term of [`scaled_gamma_series`].
pub(crate) fn gamma_series_sum(w: f64, p: usize) -> (f64, f64) {
    let mut sum = 0.0;
    let mut power = 1.0;
    for (k, &c) in ODD_DOUBLE_FACTORIAL.iter().enumerate().take(p) {
        let term = c as f64 * power;
        sum += if k % 2 == 0 { term } else { -term };
        power *= w;
    }
    (sum, ODD_DOUBLE_FACTORIAL[p] as f64 * power)
}

// Rational approximations below are the 53-bit minimax fits used by
// Boost.Math's `erf_imp` (as ported by statrs). Each interval [a, b) for
// x ≥ 0.5 approximates erfcx(x)·x = b + P(x - a)/Q(x - a). The offsets b are
// single-precision literals in the original fit and must stay f32.

fn poly(x: f64, coeff: &[f64]) -> f64 {
    coeff.iter().rev().fold(0.0, |acc, &c| acc.mul_add(x, c))
}

/// erf on `[0, 0.5)`.
fn erf_small(x: f64) -> f64 {
    if x < 1e-10 {
        return x * 1.125 + x * 0.003_379_167_095_512_573_896_158_903_121_545_171_688;
    }
    x * 1.125 + x * poly(x, ERF_AN) / poly(x, ERF_AD)
}

/// erfc on `[0.5, ∞)`.
fn erfc_pos(x: f64) -> f64 {
    if x >= 27.3 {
        return 0.0;
    }
    exp_neg_sq(x) * erfcx_core(x)
}

/// erfcx on `[0.5, 110)`.
fn erfcx_core(x: f64) -> f64 {
    let (shift, b, num, den): (f64, f32, &[f64], &[f64]) = if x < 0.75 {
        (0.5, 0.344_024_211_2_f32, ERF_BN, ERF_BD)
    } else if x < 1.25 {
        (0.75, 0.419_990_927_f32, ERF_CN, ERF_CD)
    } else if x < 2.25 {
        (1.25, 0.489_862_501_6_f32, ERF_DN, ERF_DD)
    } else if x < 3.5 {
        (2.25, 0.531_737_089_2_f32, ERF_EN, ERF_ED)
    } else if x < 5.25 {
        (3.5, 0.548_997_342_6_f32, ERF_FN, ERF_FD)
    } else if x < 8.0 {
        (5.25, 0.557_174_086_6_f32, ERF_GN, ERF_GD)
    } else if x < 11.5 {
        (8.0, 0.560_980_796_8_f32, ERF_HN, ERF_HD)
    } else if x < 17.0 {
        (11.5, 0.562_649_369_2_f32, ERF_IN, ERF_ID)
    } else if x < 24.0 {
        (17.0, 0.563_459_813_6_f32, ERF_JN, ERF_JD)
    } else if x < 38.0 {
        (24.0, 0.563_847_780_2_f32, ERF_KN, ERF_KD)
    } else if x < 60.0 {
        (38.0, 0.564_052_820_2_f32, ERF_LN, ERF_LD)
    } else if x < 85.0 {
        (60.0, 0.564_130_902_3_f32, ERF_MN, ERF_MD)
    } else {
        (85.0, 0.564_158_439_6_f32, ERF_NN, ERF_ND)
    };
    let t = x - shift;
    (f64::from(b) + poly(t, num) / poly(t, den)) / x
}

#[rustfmt::skip]
const ERF_AN: &[f64] = &[
    0.00337916709551257388990745, -0.00073695653048167948530905, -0.374732337392919607868241,
    0.0817442448733587196071743, -0.0421089319936548595203468, 0.0070165709512095756344528,
    -0.00495091255982435110337458, 0.000871646599037922480317225,
];
#[rustfmt::skip]
const ERF_AD: &[f64] = &[
    1.0, -0.218088218087924645390535, 0.412542972725442099083918, -0.0841891147873106755410271,
    0.0655338856400241519690695, -0.0120019604454941768171266, 0.00408165558926174048329689,
    -0.000615900721557769691924509,
];
#[rustfmt::skip]
const ERF_BN: &[f64] = &[
    -0.0361790390718262471360258, 0.292251883444882683221149, 0.281447041797604512774415,
    0.125610208862766947294894, 0.0274135028268930549240776, 0.00250839672168065762786937,
];
#[rustfmt::skip]
const ERF_BD: &[f64] = &[
    1.0, 1.8545005897903486499845, 1.43575803037831418074962, 0.582827658753036572454135,
    0.124810476932949746447682, 0.0113724176546353285778481,
];
#[rustfmt::skip]
const ERF_CN: &[f64] = &[
    -0.0397876892611136856954425, 0.153165212467878293257683, 0.191260295600936245503129,
    0.10276327061989304213645, 0.029637090615738836726027, 0.0046093486780275489468812,
    0.000307607820348680180548455,
];
#[rustfmt::skip]
const ERF_CD: &[f64] = &[
    1.0, 1.95520072987627704987886, 1.64762317199384860109595, 0.768238607022126250082483,
    0.209793185936509782784315, 0.0319569316899913392596356, 0.00213363160895785378615014,
];
#[rustfmt::skip]
const ERF_DN: &[f64] = &[
    -0.0300838560557949717328341, 0.0538578829844454508530552, 0.0726211541651914182692959,
    0.0367628469888049348429018, 0.00964629015572527529605267, 0.00133453480075291076745275,
    0.778087599782504251917881e-4,
];
#[rustfmt::skip]
const ERF_DD: &[f64] = &[
    1.0, 1.75967098147167528287343, 1.32883571437961120556307, 0.552528596508757581287907,
    0.133793056941332861912279, 0.0179509645176280768640766, 0.00104712440019937356634038,
    -0.106640381820357337177643e-7,
];
#[rustfmt::skip]
const ERF_EN: &[f64] = &[
    -0.0117907570137227847827732, 0.014262132090538809896674, 0.0202234435902960820020765,
    0.00930668299990432009042239, 0.00213357802422065994322516, 0.00025022987386460102395382,
    0.120534912219588189822126e-4,
];
#[rustfmt::skip]
const ERF_ED: &[f64] = &[
    1.0, 1.50376225203620482047419, 0.965397786204462896346934, 0.339265230476796681555511,
    0.0689740649541569716897427, 0.00771060262491768307365526, 0.000371421101531069302990367,
];
#[rustfmt::skip]
const ERF_FN: &[f64] = &[
    -0.00546954795538729307482955, 0.00404190278731707110245394, 0.0054963369553161170521356,
    0.00212616472603945399437862, 0.000394984014495083900689956, 0.365565477064442377259271e-4,
    0.135485897109932323253786e-5,
];
#[rustfmt::skip]
const ERF_FD: &[f64] = &[
    1.0, 1.21019697773630784832251, 0.620914668221143886601045, 0.173038430661142762569515,
    0.0276550813773432047594539, 0.00240625974424309709745382, 0.891811817251336577241006e-4,
    -0.465528836283382684461025e-11,
];
#[rustfmt::skip]
const ERF_GN: &[f64] = &[
    -0.00270722535905778347999196, 0.0013187563425029400461378, 0.00119925933261002333923989,
    0.00027849619811344664248235, 0.267822988218331849989363e-4, 0.923043672315028197865066e-6,
];
#[rustfmt::skip]
const ERF_GD: &[f64] = &[
    1.0, 0.814632808543141591118279, 0.268901665856299542168425, 0.0449877216103041118694989,
    0.00381759663320248459168994, 0.000131571897888596914350697, 0.404815359675764138445257e-11,
];
#[rustfmt::skip]
const ERF_HN: &[f64] = &[
    -0.00109946720691742196814323, 0.000406425442750422675169153, 0.000274499489416900707787024,
    0.465293770646659383436343e-4, 0.320955425395767463401993e-5, 0.778286018145020892261936e-7,
];
#[rustfmt::skip]
const ERF_HD: &[f64] = &[
    1.0, 0.588173710611846046373373, 0.139363331289409746077541, 0.0166329340417083678763028,
    0.00100023921310234908642639, 0.24254837521587225125068e-4,
];
#[rustfmt::skip]
const ERF_IN: &[f64] = &[
    -0.00056907993601094962855594, 0.000169498540373762264416984, 0.518472354581100890120501e-4,
    0.382819312231928859704678e-5, 0.824989931281894431781794e-7,
];
#[rustfmt::skip]
const ERF_ID: &[f64] = &[
    1.0, 0.339637250051139347430323, 0.043472647870310663055044, 0.00248549335224637114641629,
    0.535633305337152900549536e-4, -0.117490944405459578783846e-12,
];
#[rustfmt::skip]
const ERF_JN: &[f64] = &[
    -0.000241313599483991337479091, 0.574224975202501512365975e-4, 0.115998962927383778460557e-4,
    0.581762134402593739370875e-6, 0.853971555085673614607418e-8,
];
#[rustfmt::skip]
const ERF_JD: &[f64] = &[
    1.0, 0.233044138299687841018015, 0.0204186940546440312625597, 0.000797185647564398289151125,
    0.117019281670172327758019e-4,
];
#[rustfmt::skip]
const ERF_KN: &[f64] = &[
    -0.000146674699277760365803642, 0.162666552112280519955647e-4, 0.269116248509165239294897e-5,
    0.979584479468091935086972e-7, 0.101994647625723465722285e-8,
];
#[rustfmt::skip]
const ERF_KD: &[f64] = &[
    1.0, 0.165907812944847226546036, 0.0103361716191505884359634, 0.000286593026373868366935721,
    0.298401570840900340874568e-5,
];
#[rustfmt::skip]
const ERF_LN: &[f64] = &[
    -0.583905797629771786720406e-4, 0.412510325105496173512992e-5, 0.431790922420250949096906e-6,
    0.993365155590013193345569e-8, 0.653480510020104699270084e-10,
];
#[rustfmt::skip]
const ERF_LD: &[f64] = &[
    1.0, 0.105077086072039915406159, 0.00414278428675475620830226, 0.726338754644523769144108e-4,
    0.477818471047398785369849e-6,
];
#[rustfmt::skip]
const ERF_MN: &[f64] = &[
    -0.196457797609229579459841e-4, 0.157243887666800692441195e-5, 0.543902511192700878690335e-7,
    0.317472492369117710852685e-9,
];
#[rustfmt::skip]
const ERF_MD: &[f64] = &[
    1.0, 0.052803989240957632204885, 0.000926876069151753290378112, 0.541011723226630257077328e-5,
    0.535093845803642394908747e-15,
];
#[rustfmt::skip]
const ERF_NN: &[f64] = &[
    -0.789224703978722689089794e-5, 0.622088451660986955124162e-6, 0.145728445676882396797184e-7,
    0.603715505542715364529243e-10,
];
#[rustfmt::skip]
const ERF_ND: &[f64] = &[
    1.0, 0.0375328846356293715248719, 0.000467919535974625308126054, 0.193847039275845656900547e-5,
];
