use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pryce_core::bases::Polarization;
use pryce_core::verify::BasisChoice;
use pryce_core::wavepacket::Species;
use pryce_core::Vec3;

#[derive(Debug, Parser)]
#[command(name = "pryce", version, about = "Momentum-space operators of massive Dirac fermions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate operator matrices at one momentum.
    Ops(OpsArgs),
    /// Run seeded verification suites.
    Verify(VerifyArgs),
    /// Expectation values of a Gaussian wave packet over time.
    Wavepacket(WavepacketArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    /// Emit JSON on stdout.
    #[arg(long)]
    pub json: bool,
    /// Also write the JSON output to this file.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisArg {
    Spin,
    Helicity,
}

impl From<BasisArg> for BasisChoice {
    fn from(b: BasisArg) -> Self {
        match b {
            BasisArg::Spin => BasisChoice::Spin,
            BasisArg::Helicity => BasisChoice::Helicity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OpArg {
    Hamiltonian,
    Projectors,
    Spin,
    Fw,
    Polarization,
    Helicity0,
    Coordinate,
    Sigma,
    Omega,
    PauliLubanski,
}

#[derive(Debug, Args)]
pub struct OpsArgs {
    /// Mass.
    #[arg(long = "m", default_value_t = 1.0)]
    pub mass: f64,
    /// Momentum as x,y,z.
    #[arg(long = "p", value_parser = parse_vec3, allow_hyphen_values = true)]
    pub momentum: Vec3,
    #[arg(long, value_enum, default_value = "spin")]
    pub basis: BasisArg,
    #[arg(long, value_enum)]
    pub op: OpArg,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite name, or `all`.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Override the suite's default tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value = "helicity")]
    pub basis: BasisArg,
    #[arg(long = "m", default_value_t = 1.0)]
    pub mass: f64,
    /// Smallest sampled |p|/m.
    #[arg(long, default_value_t = 1e-3)]
    pub min_p: f64,
    /// Largest sampled |p|/m.
    #[arg(long, default_value_t = 10.0)]
    pub max_p: f64,
    /// List the registered suites and exit.
    #[arg(long)]
    pub list: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct WavepacketArgs {
    #[arg(long = "m", default_value_t = 1.0)]
    pub mass: f64,
    /// Packet center in momentum space, x,y,z.
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true, default_value = "0,0,1")]
    pub center: Vec3,
    #[arg(long, default_value_t = 0.15)]
    pub width: f64,
    /// Polarization, `+` or `-`.
    #[arg(long, value_parser = parse_pol, allow_hyphen_values = true, default_value = "+")]
    pub pol: Polarization,
    #[arg(long, value_parser = parse_species, default_value = "particle")]
    pub species: Species,
    #[arg(long, value_enum, default_value = "spin")]
    pub basis: BasisArg,
    /// Times as t0:t1:n (n equally spaced times, ends included).
    #[arg(long, value_parser = parse_times, allow_hyphen_values = true, default_value = "0:10:5")]
    pub times: Times,
    /// Comma-separated observables, e.g. N,Q,H,W,W0,P,S,L,J,K,X,V,XMC,VMC or components such as X1.
    #[arg(long, default_value = "X,V")]
    pub observables: String,
    /// Quadrature nodes per axis.
    #[arg(long)]
    pub points: Option<usize>,
    /// Nodes per axis of the check rule used for error estimates.
    #[arg(long)]
    pub check_points: Option<usize>,
    /// Relative quadrature tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

pub fn parse_vec3(s: &str) -> Result<Vec3, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got {s:?}"));
    }
    let mut out = [0.0; 3];
    for (slot, part) in out.iter_mut().zip(parts) {
        let x: f64 = part.parse().map_err(|_| format!("not a number: {part:?}"))?;
        if !x.is_finite() {
            return Err(format!("not finite: {part:?}"));
        }
        *slot = x;
    }
    Ok(out)
}

pub fn parse_pol(s: &str) -> Result<Polarization, String> {
    match s {
        "+" | "+1/2" | "up" => Ok(Polarization::Up),
        "-" | "-1/2" | "down" => Ok(Polarization::Down),
        _ => Err(format!("expected + or -, got {s:?}")),
    }
}

pub fn parse_species(s: &str) -> Result<Species, String> {
    s.parse().map_err(|e: pryce_core::Error| e.to_string())
}

/// Time grid parsed from `t0:t1:n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Times(pub Vec<f64>);

pub fn parse_times(s: &str) -> Result<Times, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [t0, t1, n] = parts[..] else {
        return Err(format!("expected t0:t1:n, got {s:?}"));
    };
    let t0: f64 = t0.parse().map_err(|_| format!("bad start time {t0:?}"))?;
    let t1: f64 = t1.parse().map_err(|_| format!("bad end time {t1:?}"))?;
    let n: usize = n.parse().map_err(|_| format!("bad count {n:?}"))?;
    if !(t0.is_finite() && t1.is_finite()) || n == 0 {
        return Err("times need finite ends and n >= 1".into());
    }
    if n == 1 {
        return Ok(Times(vec![t0]));
    }
    Ok(Times((0..n).map(|k| t0 + (t1 - t0) * k as f64 / (n - 1) as f64).collect()))
}
