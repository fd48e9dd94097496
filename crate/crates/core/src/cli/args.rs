use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "bachvol", version, about = "Bachelier and Black-Scholes implied volatility analytics")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Write to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Price a call and show its time value.
    #[command(allow_negative_numbers = true)]
    Price(PriceArgs),
    /// Implied normal volatility from call prices.
    #[command(allow_negative_numbers = true)]
    Implied(ImpliedArgs),
    /// Convert between normal and lognormal volatility.
    #[command(allow_negative_numbers = true)]
    Convert(ConvertArgs),
    /// Greeks and breakeven move.
    #[command(allow_negative_numbers = true)]
    Greeks(GreeksArgs),
    /// Emit the curve m -> ln(m)/(m-1) as CSV.
    #[command(allow_negative_numbers = true)]
    Smile(SmileArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Bachelier,
    BlackScholes,
}

#[derive(Debug, Args)]
pub struct TermsArgs {
    #[arg(long)]
    pub spot: f64,
    #[arg(long)]
    pub strike: f64,
    /// Years.
    #[arg(long)]
    pub maturity: f64,
}

/// Contract flags for commands that also accept `--input`.
#[derive(Debug, Args)]
pub struct OptTermsArgs {
    #[arg(long, required_unless_present = "input", conflicts_with = "input")]
    pub spot: Option<f64>,
    #[arg(long, required_unless_present = "input", conflicts_with = "input")]
    pub strike: Option<f64>,
    /// Years.
    #[arg(long, required_unless_present = "input", conflicts_with = "input")]
    pub maturity: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PriceArgs {
    #[arg(long, value_enum)]
    pub model: Model,
    #[command(flatten)]
    pub terms: TermsArgs,
    /// sigma_N for bachelier, sigma_LN for black-scholes.
    #[arg(long)]
    pub vol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exact,
    Gamma,
    Asymptotic,
    Auto,
}

#[derive(Debug, Args)]
pub struct ImpliedArgs {
    #[command(flatten)]
    pub terms: OptTermsArgs,
    /// Call price.
    #[arg(long, required_unless_present = "input", conflicts_with = "input")]
    pub price: Option<f64>,
    /// Batch CSV with header spot,strike,maturity,value,kind.
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    pub method: Method,
    /// Largest lambda handled by the asymptotic route.
    #[arg(long, env = "BACHVOL_LAMBDA_MAX")]
    pub lambda_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    N2ln,
    Ln2n,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Order {
    #[value(name = "0")]
    Zero,
    #[value(name = "1")]
    One,
    Exact,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long, value_enum)]
    pub direction: Direction,
    #[arg(long, value_enum, default_value_t = Order::Exact)]
    pub order: Order,
    #[command(flatten)]
    pub terms: OptTermsArgs,
    /// Volatility in the source convention.
    #[arg(long, required_unless_present = "input", conflicts_with = "input")]
    pub vol: Option<f64>,
    /// Batch CSV with header spot,strike,maturity,value,kind.
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GreeksArgs {
    #[arg(long, value_enum)]
    pub model: Model,
    #[command(flatten)]
    pub terms: TermsArgs,
    #[arg(long)]
    pub vol: f64,
    /// Horizon of the breakeven move, in years.
    #[arg(long, default_value_t = 1.0)]
    pub dt: f64,
    /// Also show the other model at the price-matched volatility.
    #[arg(long)]
    pub compare: bool,
}

#[derive(Debug, Args)]
pub struct SmileArgs {
    #[arg(long, default_value_t = 0.25)]
    pub m_min: f64,
    #[arg(long, default_value_t = 3.0)]
    pub m_max: f64,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
}
