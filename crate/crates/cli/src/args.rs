//! Command-line grammar.

use std::path::PathBuf;

use chabauty::selftest::DEFAULT_SEED;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "chabauty", version, about = "Formal groups, zero estimates, jet integrality, point counts and explicit bounds")]
pub struct Cli {
    /// Write the JSON report to this file instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Structured input file (branch data for `count weil`, forms and branches for `jets mx`).
    #[arg(long, global = true, value_name = "FILE")]
    pub json: Option<PathBuf>,
    /// Record the wall-clock time in the manifest.
    #[arg(long, global = true)]
    pub stamp: bool,
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Formal group laws and their exponential and logarithm.
    #[command(subcommand)]
    Fgroup(FgroupCmd),
    /// Zero count of a one-variable p-adic series on a closed ball.
    Zeros(ZerosArgs),
    /// Points in a residue disk along a one-parameter subgroup.
    DiskBound(DiskBoundArgs),
    /// Jet integrality over finite fields.
    #[command(subcommand)]
    Jets(JetsCmd),
    /// Point counts, zeta functions and Weil bounds for singular curves.
    #[command(subcommand)]
    Count(CountCmd),
    /// Explicit bounds for surfaces and symmetric squares of curves.
    #[command(subcommand)]
    Bound(BoundCmd),
    /// Deterministic invariant suite.
    Selftest(SelftestArgs),
}

#[derive(Debug, Subcommand)]
pub enum FgroupCmd {
    Exp(FgroupExpArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LawChoice {
    Additive,
    Multiplicative,
    Elliptic,
}

#[derive(Debug, Args, Serialize)]
pub struct FgroupExpArgs {
    #[arg(long, value_enum)]
    pub kind: Option<LawChoice>,
    /// Weierstrass coefficients a1,a2,a3,a4,a6.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long)]
    pub p: Option<u64>,
    /// Relative p-adic precision.
    #[arg(long, default_value_t = 16)]
    pub prec: u32,
    #[arg(long, default_value_t = 10)]
    pub order: u32,
    /// Dimension of the additive law.
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[arg(long)]
    pub preset: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TailChoice {
    Polynomial,
    Factorial,
}

#[derive(Debug, Args, Serialize)]
pub struct ZerosArgs {
    /// Series in `z`.
    #[arg(long, allow_hyphen_values = true)]
    pub h: String,
    #[arg(long)]
    pub p: u64,
    /// Radius exponent: the ball has radius p^-rho.
    #[arg(long, default_value = "1")]
    pub rho: String,
    #[arg(long, default_value_t = 20)]
    pub prec: u32,
    #[arg(long, default_value_t = 20)]
    pub order: u32,
    #[arg(long, value_enum, default_value = "polynomial")]
    pub tail: TailChoice,
    /// Growth exponent of the factorial tail guard.
    #[arg(long)]
    pub mu: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct DiskBoundArgs {
    /// Elliptic curves of the product, `a1,a2,a3,a4,a6` separated by `;`.
    #[arg(long, allow_hyphen_values = true)]
    pub curves: Option<String>,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub e: u32,
    #[arg(long, default_value_t = 1)]
    pub f: u32,
    /// Direction of the one-parameter subgroup, comma separated integers.
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<String>,
    /// 1-based indices of the coordinates cutting out the subvariety.
    #[arg(long)]
    pub eq: Option<String>,
    /// Jet order m, or `auto` to read it off the reduced jet.
    #[arg(long)]
    pub jet_link: Option<String>,
    #[arg(long, default_value_t = 6)]
    pub order: u32,
    #[arg(long, default_value_t = 16)]
    pub prec: u32,
    #[arg(long)]
    pub preset: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum JetsCmd {
    Mx(JetsMxArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct JetsMxArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub omega1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega2: Option<String>,
    #[arg(long)]
    pub p: Option<u64>,
    /// Point of the chart, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
    #[arg(long, default_value_t = 6)]
    pub mcap: u32,
    #[arg(long, default_value_t = 2)]
    pub ext: u32,
    /// Divisor branch through the point as `x(t);y(t)` in local coordinates.
    #[arg(long, allow_hyphen_values = true)]
    pub branch: Vec<String>,
    #[arg(long)]
    pub preset: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum CountCmd {
    Zeta(CountZetaArgs),
    Weil(CountWeilArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct CountZetaArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub poly: Vec<String>,
    #[arg(long)]
    pub q: u64,
    #[arg(long, default_value_t = 6)]
    pub nmax: u32,
    #[arg(long)]
    pub cd: Option<u32>,
    /// Ambient space, `P<n>` or `A<n>`.
    #[arg(long, default_value = "P2")]
    pub ambient: String,
    /// Geometric genera of the components; enables the rationality check.
    #[arg(long)]
    pub genera: Option<String>,
    /// Degree over which every component is defined.
    #[arg(long, default_value_t = 1)]
    pub split_degree: u32,
    #[arg(long)]
    pub preset: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct CountWeilArgs {
    #[arg(long, value_name = "FILE")]
    pub branches: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub poly: Option<String>,
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long)]
    pub genera: Option<String>,
    /// Count over the extension of degree n.
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    #[arg(long)]
    pub preset: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum BoundCmd {
    Surface(BoundSurfaceArgs),
    Sym2(BoundSym2Args),
    Coleman(BoundColemanArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct BoundSurfaceArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value_t = 1)]
    pub e: u32,
    #[arg(long, default_value_t = 1)]
    pub f: u32,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(serialize_with = "chabauty::report::as_string")]
    pub c1sq: BigInt,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(serialize_with = "chabauty::report::as_string")]
    pub nxk: BigInt,
    /// Embedding dimension for the degree condition.
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    #[serde(serialize_with = "opt_string")]
    pub h2x: Option<BigInt>,
    #[arg(long)]
    #[serde(serialize_with = "opt_string")]
    pub hkx: Option<BigInt>,
    #[arg(long)]
    #[serde(serialize_with = "opt_string")]
    pub hn: Option<BigInt>,
    /// Evaluate the formula even when the hypotheses fail.
    #[arg(long)]
    pub formula_only: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundSym2Args {
    #[arg(long)]
    pub genus: Option<u32>,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    #[serde(serialize_with = "opt_string")]
    pub count: Option<BigInt>,
    #[arg(long)]
    pub preset: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundColemanArgs {
    #[arg(long)]
    pub genus: u32,
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    #[serde(serialize_with = "chabauty::report::as_string")]
    pub count: BigInt,
}

#[derive(Debug, Args, Serialize)]
pub struct SelftestArgs {
    #[arg(long, conflicts_with = "full")]
    pub quick: bool,
    #[arg(long)]
    pub full: bool,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

fn opt_string<S: serde::Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.collect_str(x),
        None => s.serialize_none(),
    }
}
