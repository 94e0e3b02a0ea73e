//! Subcommand arguments and their table producers.

use std::path::PathBuf;

use clap::Args;
use num_complex::Complex64;
use qbc_core::capacity::{capacity_region, symmetric_rate_sums, time_sharing_region, RateBound, RateRegion};
use qbc_core::channel::{prune_to_cascade, BroadcastChannel, LinearOpticalNetwork};
use qbc_core::qkd::{bc_rate_region, info_report, QkdScenario};
use qbc_core::verify::{run_verify, VerifyOptions};
use serde::Deserialize;
use serde_json::json;

use crate::output::{render_json, render_table, Artifact, Cell, Table};
use crate::{CliError, Command, RunConfig};

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(default)]
pub struct RegionArgs {
    /// Receiver transmittances, comma separated.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub eta: Vec<f64>,
    /// Mean photon numbers for finite-energy regions, comma separated.
    #[arg(long = "n-s", value_delimiter = ',', allow_hyphen_values = true)]
    pub n_s: Vec<f64>,
    /// Segments per boundary edge.
    #[arg(long, default_value_t = 16)]
    pub resolution: usize,
}

impl Default for RegionArgs {
    fn default() -> Self {
        Self { eta: Vec::new(), n_s: Vec::new(), resolution: 16 }
    }
}

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(default)]
pub struct SymmetricArgs {
    /// Total transmittance shared equally by the receivers.
    #[arg(long, allow_hyphen_values = true)]
    pub eta: f64,
    /// Largest number of receivers.
    #[arg(long = "m-max", default_value_t = 32)]
    pub m_max: usize,
}

impl Default for SymmetricArgs {
    fn default() -> Self {
        Self { eta: f64::NAN, m_max: 32 }
    }
}

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(default)]
pub struct QkdArgs {
    /// Transmittance to Bob.
    #[arg(long = "eta-b", allow_hyphen_values = true)]
    pub eta_b: f64,
    /// Transmittance to Charlie.
    #[arg(long = "eta-c", allow_hyphen_values = true)]
    pub eta_c: f64,
    /// Modulation mean photon numbers, comma separated.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub mu: Vec<f64>,
    /// Segments per region-boundary edge.
    #[arg(long, default_value_t = 8)]
    pub resolution: usize,
    /// Report key rates as max(0, K).
    #[arg(long)]
    pub clamp: bool,
}

impl Default for QkdArgs {
    fn default() -> Self {
        Self { eta_b: f64::NAN, eta_c: f64::NAN, mu: Vec::new(), resolution: 8, clamp: false }
    }
}

#[derive(Debug, Clone, Args, Deserialize)]
pub struct DecomposeArgs {
    /// Network description (JSON).
    #[arg(long)]
    pub network: PathBuf,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default)]
pub struct VerifyArgs {
    /// Reduced grids.
    #[arg(long)]
    pub quick: bool,
    /// Perturb the closed-form entropy function by δ·x (self-test of the
    /// suite).
    #[arg(long = "inject-g-fault", hide = true, allow_hyphen_values = true)]
    pub inject_g_fault: Option<f64>,
}

/// Files produced by a command plus an optional verification failure that
/// should be reported after they are written.
pub struct Outputs {
    pub files: Vec<Artifact>,
    pub failure: Option<String>,
}

impl Outputs {
    fn ok(files: Vec<Artifact>) -> Self {
        Self { files, failure: None }
    }
}

pub fn execute(config: &RunConfig) -> Result<Outputs, CliError> {
    let tables = |tables: Vec<Table>| -> Outputs {
        Outputs::ok(tables.iter().map(|t| render_table(t, config.format, config.digits)).collect())
    };
    match &config.command {
        Command::Region(args) => Ok(tables(region(args)?)),
        Command::Symmetric(args) => Ok(tables(vec![symmetric(args)?])),
        Command::Qkd(args) => Ok(tables(qkd(args)?)),
        Command::Decompose(args) => decompose(args, config.digits).map(|a| Outputs::ok(vec![a])),
        Command::Verify(args) => Ok(verify(args, config.digits)),
    }
}

fn check_resolution(resolution: usize) -> Result<(), CliError> {
    if resolution == 0 || resolution > 100_000 {
        return Err(CliError::Invalid(format!("resolution must lie in 1..=100000, got {resolution}")));
    }
    Ok(())
}

fn region(args: &RegionArgs) -> Result<Vec<Table>, CliError> {
    check_resolution(args.resolution)?;
    let ch = BroadcastChannel::new(args.eta.clone())?;
    let capacity = capacity_region(&ch)?;
    let mut out = Vec::new();

    let mut constraints = Table::new("region_constraints", vec!["subset", "capacity"]);
    for (subset, bound) in capacity.constraints() {
        constraints.push(vec![subset.to_string().into(), bound.into()]);
    }
    out.push(constraints);

    let achievable: Vec<(f64, RateRegion)> =
        args.n_s.iter().map(|&n| RateRegion::achievable(&ch, n).map(|r| (n, r))).collect::<Result<_, _>>()?;
    if !achievable.is_empty() {
        let mut t = Table::new("region_achievable_constraints", vec!["n_s", "subset", "rate"]);
        for (n, r) in &achievable {
            for (subset, bound) in r.constraints() {
                t.push(vec![(*n).into(), subset.to_string().into(), bound.into()]);
            }
        }
        out.push(t);
    }

    if ch.m() == 2 {
        match capacity.boundary_1to2(args.resolution) {
            Ok(points) => {
                let mut t = Table::new("region_boundary", vec!["r1", "r2"]);
                for (r1, r2) in points {
                    t.push(vec![r1.into(), r2.into()]);
                }
                out.push(t);
            }
            Err(e) => eprintln!("qbc: skipping region_boundary: {e}"),
        }
        let single = time_sharing_region(&ch).single_user().to_vec();
        if let [RateBound::Finite(c1), RateBound::Finite(c2)] = single[..] {
            let mut t = Table::new("region_time_sharing", vec!["r1", "r2"]);
            t.push(vec![0.0.into(), c2.into()]);
            t.push(vec![c1.into(), 0.0.into()]);
            out.push(t);
        } else {
            eprintln!("qbc: skipping region_time_sharing: a single-receiver rate is unbounded");
        }
        if !achievable.is_empty() {
            let mut t = Table::new("region_achievable_boundary", vec!["n_s", "r1", "r2"]);
            for (n, r) in &achievable {
                for (r1, r2) in r.boundary_1to2(args.resolution)? {
                    t.push(vec![(*n).into(), r1.into(), r2.into()]);
                }
            }
            out.push(t);
        }
    }
    Ok(out)
}

const MAX_SYMMETRIC_M: usize = 1_000_000;

fn symmetric(args: &SymmetricArgs) -> Result<Table, CliError> {
    if args.m_max == 0 || args.m_max > MAX_SYMMETRIC_M {
        return Err(CliError::Invalid(format!("m-max must lie in 1..={MAX_SYMMETRIC_M}, got {}", args.m_max)));
    }
    let mut t = Table::new("symmetric", vec!["m", "optimal_sum", "time_share_sum"]);
    for m in 1..=args.m_max {
        let (opt, ts) = symmetric_rate_sums(args.eta, m)?;
        t.push(vec![m.into(), opt.into(), ts.into()]);
    }
    Ok(t)
}

fn qkd(args: &QkdArgs) -> Result<Vec<Table>, CliError> {
    check_resolution(args.resolution)?;
    if args.mu.is_empty() {
        return Err(CliError::Invalid("at least one value of mu is required".into()));
    }
    let mut curves = Table::new("qkd_region", vec!["mu", "curve", "k_ab", "k_ac"]);
    let mut rates = Table::new("qkd_rates", vec!["mu", "protocol", "k_ab", "k_ac"]);
    let mut info = Table::new(
        "qkd_info",
        vec![
            "mu", "h_x", "h_y", "h_z", "h_xy", "h_xz", "h_xyz", "i_x_y", "i_x_z", "i_xz_y", "i_xy_z", "i_y_z_given_x",
            "holevo_b", "holevo_c",
        ],
    );
    for &mu in &args.mu {
        let s = QkdScenario::new(args.eta_b, args.eta_c, mu)?;
        for curve in bc_rate_region(&s, args.resolution)? {
            for (k_ab, k_ac) in curve.points {
                curves.push(vec![mu.into(), curve.label.into(), k_ab.into(), k_ac.into()]);
            }
        }
        let r = info_report(&s)?;
        for (name, pair) in [("simultaneous", r.simultaneous()), ("charlie-first", r.charlie_first()), ("bob-first", r.bob_first())] {
            let pair = if args.clamp { pair.clamped() } else { pair };
            rates.push(vec![mu.into(), name.into(), pair.k_ab.into(), pair.k_ac.into()]);
        }
        info.push(
            [mu, r.h_x, r.h_y, r.h_z, r.h_xy, r.h_xz, r.h_xyz, r.i_x_y, r.i_x_z, r.i_xz_y, r.i_xy_z, r.i_y_z_given_x, r.holevo_b, r.holevo_c]
                .into_iter()
                .map(Cell::from)
                .collect(),
        );
    }
    Ok(vec![curves, rates, info])
}

/// Network file layout: the unitary as separate real and imaginary parts
/// (row-major nested arrays, `im` optional), the sender's port and the
/// receivers' ports.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkFile {
    unitary: UnitaryJson,
    input_mode: usize,
    receiver_modes: Vec<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct UnitaryJson {
    re: Vec<Vec<f64>>,
    #[serde(default)]
    im: Option<Vec<Vec<f64>>>,
}

fn load_network(path: &PathBuf) -> Result<LinearOpticalNetwork, CliError> {
    let bad = |msg: String| CliError::InputFile(format!("{}: {msg}", path.display()));
    let text = std::fs::read_to_string(path).map_err(|e| bad(e.to_string()))?;
    let file: NetworkFile = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
    let l = file.unitary.re.len();
    let im = file.unitary.im.unwrap_or_else(|| vec![vec![0.0; l]; l]);
    if l == 0 || im.len() != l || file.unitary.re.iter().chain(&im).any(|row| row.len() != l) {
        return Err(bad("unitary must be a nonempty square matrix with matching re and im parts".into()));
    }
    let u = nalgebra::DMatrix::from_fn(l, l, |r, c| Complex64::new(file.unitary.re[r][c], im[r][c]));
    LinearOpticalNetwork::new(u, file.input_mode, file.receiver_modes).map_err(|e| bad(e.to_string()))
}

fn decompose(args: &DecomposeArgs, digits: usize) -> Result<Artifact, CliError> {
    let net = load_network(&args.network)?;
    let red = prune_to_cascade(&net)?;
    let value = json!({
        "l": net.l(),
        "input_mode": net.input_mode(),
        "receiver_modes": net.receiver_modes(),
        "transmittances": red.channel.transmittances(),
        "environment": red.channel.environment(),
        "cascade": red.cascade,
        "elements": red.decomposition.elements,
        "output_phases": red.decomposition.output_phases,
        "retained_elements": red.retained,
        "reconstruction_residual": red.reconstruction_residual,
    });
    Ok(render_json("decompose", value, digits))
}

fn verify(args: &VerifyArgs, digits: usize) -> Outputs {
    let report = run_verify(VerifyOptions { quick: args.quick, g_fault: args.inject_g_fault });
    for c in &report.checks {
        eprintln!(
            "check {}: {} ({} cases, max error {:.3e}, tolerance {:.0e})",
            c.name,
            if c.passed { "pass" } else { "FAIL" },
            c.cases,
            c.max_error,
            c.tolerance
        );
    }
    let failed: Vec<&str> = report.failed().map(|c| c.name).collect();
    let failure = (!failed.is_empty()).then(|| format!("verification failed: {}", failed.join(", ")));
    let value = serde_json::to_value(&report).expect("report serializes");
    Outputs { files: vec![render_json("verify", value, digits)], failure }
}
