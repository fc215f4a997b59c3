//! Command-line front end: orchestrates sweeps, dispersion curves, kernel
//! checks and norm computations, emitting deterministic CSV/JSON artifacts.
//!
//! Configuration comes from an optional JSON file merged with flag
//! overrides (flags win). Exit codes: 0 all checks passed, 2 invalid
//! configuration, 3 a check failed, 4 numerical non-convergence.

use crate::dispersion::{self, DispersionError, Rectangle, TalbotOptions};
use crate::kernels::{self, KernelError, KernelId};
use crate::params::{FluidParams, ParamError};
use crate::report::{self, fmt_g17, fmt_opt, CsvWriter};
use crate::spaces::{self, SpaceError};
use crate::symbol::{self, SweepGridSpec, SymbolError};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub enum CliError {
    /// exit code 2
    Config(String),
    /// exit code 3
    CheckFailed(String),
    /// exit code 4
    NonConverged(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::CheckFailed(_) => 3,
            CliError::NonConverged(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::CheckFailed(m) | CliError::NonConverged(m) => m,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("i/o error: {e}"))
    }
}

impl From<ParamError> for CliError {
    fn from(e: ParamError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<SymbolError> for CliError {
    fn from(e: SymbolError) -> Self {
        match e {
            SymbolError::SolveFailed(_)
            | SymbolError::ResidualCheckFailed(_)
            | SymbolError::TraceMismatch(_) => CliError::NonConverged(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<DispersionError> for CliError {
    fn from(e: DispersionError) -> Self {
        match e {
            DispersionError::Symbol(s) => s.into(),
            DispersionError::ZeroOnContour(_)
            | DispersionError::NonIntegerWinding(_)
            | DispersionError::PoleOnContour
            | DispersionError::NonConvergedQuadrature(_) => {
                CliError::NonConverged(e.to_string())
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<SpaceError> for CliError {
    fn from(e: SpaceError) -> Self {
        match e {
            SpaceError::TruncationNotConverged(_) => CliError::NonConverged(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<KernelError> for CliError {
    fn from(e: KernelError) -> Self {
        CliError::Config(e.to_string())
    }
}

fn default_params() -> FluidParams {
    FluidParams {
        rho1: 1.0,
        rho2: 2.0,
        mu1: 1.0,
        mu2: 1.0,
        sigma: 1.0,
        gamma_a: 1.0,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct KProfileConfig {
    /// number of rays, spread evenly over [-ray_span, ray_span]
    pub rays: usize,
    pub ray_span: f64,
    pub modulus_min: f64,
    pub modulus_max: f64,
    pub per_decade: f64,
}

impl Default for KProfileConfig {
    fn default() -> Self {
        Self {
            rays: 3,
            ray_span: std::f64::consts::FRAC_PI_4,
            modulus_min: 1e-6,
            modulus_max: 1e8,
            per_decade: 4.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct DispersionConfig {
    pub tau_min: f64,
    pub tau_max: f64,
    pub tau_count: usize,
    pub contour_re_min: f64,
    pub contour_re_max: f64,
    pub contour_im_halfwidth: f64,
}

impl Default for DispersionConfig {
    fn default() -> Self {
        Self {
            tau_min: 0.1,
            tau_max: 1.5,
            tau_count: 15,
            contour_re_min: 1e-6,
            contour_re_max: 1e3,
            contour_im_halfwidth: 1e3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyBoundsConfig {
    pub grid: SweepGridSpec,
    pub stream_csv: bool,
}

impl Default for VerifyBoundsConfig {
    fn default() -> Self {
        Self {
            grid: SweepGridSpec::default(),
            stream_csv: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ModeResponseConfig {
    pub tau: f64,
    /// horizon as a multiple of 1/lambda* (unstable) or absolute (stable)
    pub horizon_growth: f64,
    pub horizon_stable: f64,
    pub time_points: usize,
    pub talbot_nodes: usize,
    pub radius_scale: f64,
}

impl Default for ModeResponseConfig {
    fn default() -> Self {
        Self {
            tau: 0.5,
            horizon_growth: 20.0,
            horizon_stable: 15.0,
            time_points: 48,
            talbot_nodes: 24,
            radius_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct KernelCheckConfig {
    pub m: usize,
    pub levels: usize,
    pub dy: f64,
    pub fd_eps: f64,
    pub direction_sets: u64,
}

impl Default for KernelCheckConfig {
    fn default() -> Self {
        Self {
            m: 128,
            levels: 10,
            dy: 0.1,
            fd_eps: 1e-3,
            direction_sets: 2,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct NormsConfig {
    pub m: usize,
    pub box_length: f64,
    pub s: f64,
    pub p: f64,
    pub bump_count: usize,
    pub hardy_r: f64,
    pub hardy_p: f64,
    pub hardy_m: usize,
    pub partition_epsilon: f64,
}

impl Default for NormsConfig {
    fn default() -> Self {
        Self {
            m: 256,
            box_length: 24.0,
            s: 0.5,
            p: 2.0,
            bump_count: 10,
            hardy_r: 0.5,
            hardy_p: 2.0,
            hardy_m: 257,
            partition_epsilon: 1.0,
        }
    }
}

/// Full resolved configuration; every run embeds it in its JSON artifact.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub params: FluidParams,
    pub seed: u64,
    pub threads: usize,
    pub k_profile: KProfileConfig,
    pub dispersion: DispersionConfig,
    pub verify_bounds: VerifyBoundsConfig,
    pub mode_response: ModeResponseConfig,
    pub kernel_check: KernelCheckConfig,
    pub norms: NormsConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: default_params(),
            seed: 42,
            threads: 1,
            k_profile: KProfileConfig::default(),
            dispersion: DispersionConfig::default(),
            verify_bounds: VerifyBoundsConfig::default(),
            mode_response: ModeResponseConfig::default(),
            kernel_check: KernelCheckConfig::default(),
            norms: NormsConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let mut cfg = match path {
            None => Self::default(),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("cannot read config {p:?}: {e}")))?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::Config(format!("invalid config {p:?}: {e}")))?
            }
        };
        cfg.params = cfg.params.validated()?;
        if cfg.threads == 0 {
            return Err(CliError::Config("threads must be at least 1".into()));
        }
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON configuration file; flags override its entries
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// output directory for CSV/JSON artifacts
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Parser)]
#[command(name = "twophase", version, about = "Two-phase Stokes interface analysis toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Profile k(z) along rays and check its limit anchors
    #[command(name = "k-profile")]
    KProfile {
        #[command(flatten)]
        common: CommonArgs,
        /// number of rays (at least one)
        #[arg(long)]
        rays: Option<usize>,
    },
    /// Growth-rate curve and zero counts over a wavenumber grid
    Dispersion {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        tau_min: Option<f64>,
        #[arg(long)]
        tau_max: Option<f64>,
        #[arg(long)]
        tau_count: Option<usize>,
    },
    /// Sweep |s~|/(|lambda|+|tau|) over the sector grid
    #[command(name = "verify-bounds")]
    VerifyBounds {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        lambda0: Option<f64>,
        /// also stream every sweep row as CSV
        #[arg(long)]
        csv: bool,
    },
    /// Time-domain interface response at one wavenumber
    #[command(name = "mode-response")]
    ModeResponse {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        tau: Option<f64>,
    },
    /// Curvature identity, dual divergence forms and derivative checks
    #[command(name = "kernel-check")]
    KernelCheck {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Fractional-norm machinery checks
    Norms {
        #[command(flatten)]
        common: CommonArgs,
    },
}

impl Command {
    fn common(&self) -> &CommonArgs {
        match self {
            Command::KProfile { common, .. }
            | Command::Dispersion { common, .. }
            | Command::VerifyBounds { common, .. }
            | Command::ModeResponse { common, .. }
            | Command::KernelCheck { common }
            | Command::Norms { common } => common,
        }
    }
}

/// Parses flags, resolves the configuration and dispatches; returns the
/// process exit code.
pub fn run(cli: Cli) -> i32 {
    match run_inner(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn run_inner(cli: Cli) -> Result<(), CliError> {
    let common = cli.command.common();
    let mut cfg = RunConfig::load(common.config.as_deref())?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(threads) = common.threads {
        if threads == 0 {
            return Err(CliError::Config("threads must be at least 1".into()));
        }
        cfg.threads = threads;
    }
    let out = common.out.clone();
    match &cli.command {
        Command::KProfile { rays, .. } => {
            if let Some(r) = rays {
                cfg.k_profile.rays = *r;
            }
        }
        Command::Dispersion {
            tau_min,
            tau_max,
            tau_count,
            ..
        } => {
            if let Some(v) = tau_min {
                cfg.dispersion.tau_min = *v;
            }
            if let Some(v) = tau_max {
                cfg.dispersion.tau_max = *v;
            }
            if let Some(v) = tau_count {
                cfg.dispersion.tau_count = *v;
            }
        }
        Command::VerifyBounds { lambda0, csv, .. } => {
            if let Some(v) = lambda0 {
                cfg.verify_bounds.grid.lambda0 = *v;
            }
            if *csv {
                cfg.verify_bounds.stream_csv = true;
            }
        }
        Command::ModeResponse { tau, .. } => {
            if let Some(v) = tau {
                cfg.mode_response.tau = *v;
            }
        }
        Command::KernelCheck { .. } | Command::Norms { .. } => {}
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::KProfile { .. } => cmd_k_profile(&cfg, &out),
        Command::Dispersion { .. } => cmd_dispersion(&cfg, &out),
        Command::VerifyBounds { .. } => cmd_verify_bounds(&cfg, &out),
        Command::ModeResponse { .. } => cmd_mode_response(&cfg, &out),
        Command::KernelCheck { .. } => cmd_kernel_check(&cfg, &out),
        Command::Norms { .. } => cmd_norms(&cfg, &out),
    })
}

#[derive(Serialize)]
struct AnchorCheck {
    ray_angle: f64,
    k0_error: f64,
    zk_error: f64,
    pass: bool,
}

#[derive(Serialize)]
struct KProfileReport {
    anchors: Vec<AnchorCheck>,
    /// branch points of k on the negative real axis, one per phase
    branch_points: [f64; 2],
    sup_k_plus_zk: f64,
    pass: bool,
}

pub fn cmd_k_profile(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let kp = &cfg.k_profile;
    if kp.rays == 0 {
        return Err(CliError::Config("at least one ray required".into()));
    }
    if !(kp.modulus_min > 0.0 && kp.modulus_max > kp.modulus_min && kp.per_decade > 0.0) {
        return Err(CliError::Config("invalid modulus range".into()));
    }
    let p = &cfg.params;
    let angles: Vec<f64> = if kp.rays == 1 {
        vec![0.0]
    } else {
        (0..kp.rays)
            .map(|i| -kp.ray_span + 2.0 * kp.ray_span * i as f64 / (kp.rays - 1) as f64)
            .collect()
    };
    let decades = (kp.modulus_max / kp.modulus_min).log10();
    let count = (kp.per_decade * decades).ceil() as usize + 1;
    let moduli: Vec<f64> = (0..count)
        .map(|i| {
            kp.modulus_min * (kp.modulus_max / kp.modulus_min).powf(i as f64 / (count - 1) as f64)
        })
        .collect();
    let mut csv = CsvWriter::create(
        &out.join("k_profile.csv"),
        &["ray_angle", "abs_z", "k_re", "k_im", "zk_re", "zk_im"],
    )?;
    for &angle in &angles {
        for &r in &moduli {
            let z = Complex64::from_polar(r, angle);
            let k = symbol::k_of_z(p, z)?;
            let zk = z * k;
            csv.row(&[
                fmt_g17(angle),
                fmt_g17(r),
                fmt_g17(k.re),
                fmt_g17(k.im),
                fmt_g17(zk.re),
                fmt_g17(zk.im),
            ])?;
        }
    }
    csv.finish()?;
    let mut anchors = Vec::new();
    let mut pass = true;
    for &angle in &angles {
        let k_small = symbol::k_of_z(p, Complex64::from_polar(1e-6, angle))?;
        let k0_error = (k_small * 2.0 * p.viscosity_sum() - 1.0).norm();
        let z_big = Complex64::from_polar(1e8, angle);
        let k_big = symbol::k_of_z(p, z_big)?;
        let zk_error = (z_big * k_big * p.density_sum() - 1.0).norm();
        let ok = k0_error <= 1e-4 && zk_error <= 1e-3;
        pass &= ok;
        anchors.push(AnchorCheck {
            ray_angle: angle,
            k0_error,
            zk_error,
            pass: ok,
        });
    }
    let sup = symbol::k_sup_bound(p, 3.0 * std::f64::consts::PI / 4.0, 1e-6, 1e8, 2.0, 5)?;
    let report = KProfileReport {
        anchors,
        branch_points: [-p.mu1 / p.rho1, -p.mu2 / p.rho2],
        sup_k_plus_zk: sup,
        pass,
    };
    report::write_json(&out.join("k_profile.json"), cfg, &report)?;
    if !pass {
        return Err(CliError::CheckFailed("k limit anchors failed".into()));
    }
    Ok(())
}

#[derive(Serialize)]
struct DispersionReport {
    tau_star: Option<f64>,
    rows: usize,
    zero_count_expectations_pass: bool,
}

pub fn cmd_dispersion(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let dc = &cfg.dispersion;
    if dc.tau_count == 0 || !(dc.tau_min > 0.0) || dc.tau_max < dc.tau_min {
        return Err(CliError::Config("empty or invalid tau grid".into()));
    }
    let grid: Vec<f64> = if dc.tau_count == 1 {
        vec![dc.tau_min]
    } else {
        (0..dc.tau_count)
            .map(|i| {
                dc.tau_min + (dc.tau_max - dc.tau_min) * i as f64 / (dc.tau_count - 1) as f64
            })
            .collect()
    };
    let contour = Rectangle {
        re_min: dc.contour_re_min,
        re_max: dc.contour_re_max,
        im_halfwidth: dc.contour_im_halfwidth,
    };
    let curve = dispersion::dispersion_curve(&cfg.params, &grid, &contour)?;
    let mut csv = CsvWriter::create(
        &out.join("dispersion.csv"),
        &["tau", "lambda_star", "zero_count"],
    )?;
    for row in &curve.rows {
        csv.row(&[
            fmt_g17(row.tau),
            fmt_opt(row.lambda_star),
            row.zero_count.to_string(),
        ])?;
    }
    csv.finish()?;
    let expectations = curve.rows.iter().all(|row| match curve.tau_star {
        Some(ts) if row.tau < ts - 1e-9 => row.zero_count == 1,
        Some(ts) if row.tau > ts + 1e-9 => row.zero_count == 0,
        Some(_) => true,
        None => row.zero_count == 0,
    });
    let report = DispersionReport {
        tau_star: curve.tau_star,
        rows: curve.rows.len(),
        zero_count_expectations_pass: expectations,
    };
    report::write_json(&out.join("dispersion.json"), cfg, &report)?;
    if !expectations {
        return Err(CliError::CheckFailed(
            "zero-count expectations failed".into(),
        ));
    }
    Ok(())
}

pub fn cmd_verify_bounds(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let vb = &cfg.verify_bounds;
    let report = if vb.stream_csv {
        let mut csv = CsvWriter::create(
            &out.join("bounds.csv"),
            &[
                "lambda_re", "lambda_im", "tau", "zeta_re", "zeta_im", "k_re", "k_im", "s_re",
                "s_im", "ratio",
            ],
        )?;
        let mut io_error: Option<std::io::Error> = None;
        let report = symbol::verify_sandwich_streaming(&cfg.params, &vb.grid, &mut |row| {
            if io_error.is_none() {
                if let Err(e) = csv.row(&[
                    fmt_g17(row.lambda.re),
                    fmt_g17(row.lambda.im),
                    fmt_g17(row.tau.norm()),
                    fmt_g17(row.zeta.re),
                    fmt_g17(row.zeta.im),
                    fmt_g17(row.k.re),
                    fmt_g17(row.k.im),
                    fmt_g17(row.s_tilde.re),
                    fmt_g17(row.s_tilde.im),
                    fmt_g17(row.ratio),
                ]) {
                    io_error = Some(e);
                }
            }
        })?;
        if let Some(e) = io_error {
            return Err(e.into());
        }
        csv.finish()?;
        report
    } else {
        symbol::verify_sandwich(&cfg.params, &vb.grid)?
    };
    report::write_json(&out.join("bounds.json"), cfg, &report)?;
    if !report.pass {
        return Err(CliError::CheckFailed(format!(
            "sandwich lower bound violated: min ratio {}",
            report.min_ratio
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct ModeResponseReport {
    tau: f64,
    lambda_star: Option<f64>,
    fitted_rate: Option<f64>,
    subtracted_poles: Vec<(f64, f64)>,
    quadrature_nodes: usize,
    initial_value: f64,
    initial_condition_pass: bool,
    growth_rate_match_pass: Option<bool>,
}

pub fn cmd_mode_response(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let mc = &cfg.mode_response;
    if !(mc.tau > 0.0) || mc.time_points < 4 {
        return Err(CliError::Config("invalid mode-response configuration".into()));
    }
    let p = &cfg.params;
    let unstable = p.density_jump() > 0.0 && p.gamma_a > 0.0;
    let lambda_star = if unstable {
        dispersion::find_growth_rate(p, mc.tau)?
    } else {
        None
    };
    let horizon = match lambda_star {
        Some(ls) => mc.horizon_growth / ls,
        None => mc.horizon_stable,
    };
    let mut times = vec![1e-8 * horizon];
    for i in 1..=mc.time_points {
        times.push(horizon * i as f64 / mc.time_points as f64);
    }
    let opts = TalbotOptions {
        nodes: mc.talbot_nodes,
        radius_scale: mc.radius_scale,
    };
    let resp = dispersion::mode_response(p, mc.tau, &times, &opts)?;
    let mut csv = CsvWriter::create(&out.join("mode_response.csv"), &["t", "re_h", "im_h"])?;
    for (t, (re, im)) in resp.times.iter().zip(&resp.values) {
        csv.row(&[fmt_g17(*t), fmt_g17(*re), fmt_g17(*im)])?;
    }
    csv.finish()?;
    let initial_value = resp.values[0].0;
    let initial_condition_pass = (initial_value - 1.0).abs() <= 1e-4;
    let growth_rate_match_pass = match (resp.lambda_star, resp.fitted_rate) {
        (Some(ls), Some(rate)) => Some((rate - ls).abs() <= 5e-3 * ls),
        (Some(_), None) => Some(false),
        _ => None,
    };
    let report = ModeResponseReport {
        tau: resp.tau,
        lambda_star: resp.lambda_star,
        fitted_rate: resp.fitted_rate,
        subtracted_poles: resp.subtracted_poles.clone(),
        quadrature_nodes: resp.quadrature_nodes,
        initial_value,
        initial_condition_pass,
        growth_rate_match_pass,
    };
    report::write_json(&out.join("mode_response.json"), cfg, &report)?;
    if !initial_condition_pass || growth_rate_match_pass == Some(false) {
        return Err(CliError::CheckFailed("mode-response checks failed".into()));
    }
    Ok(())
}

#[derive(Serialize)]
struct CheckEntry {
    kernel: String,
    max_error: f64,
    tolerance: f64,
    pass: bool,
}

pub fn cmd_kernel_check(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    use crate::grid::ScalarField;
    let kc = &cfg.kernel_check;
    if kc.m < 8 || kc.levels < 5 || !(kc.dy > 0.0) || !(kc.fd_eps > 0.0) {
        return Err(CliError::Config("invalid kernel-check configuration".into()));
    }
    let mut entries: Vec<CheckEntry> = Vec::new();
    // curvature identity on the named profiles
    let profiles: Vec<(String, ScalarField)> = vec![
        (
            "curvature-identity sin".into(),
            ScalarField::from_fn(1, kc.m, |x, _| 0.3 * x.sin()),
        ),
        (
            "curvature-identity two-mode".into(),
            ScalarField::from_fn(1, kc.m, |x, _| 0.2 * x.sin() + 0.1 * (2.0 * x).cos()),
        ),
        (
            "curvature-identity 2d".into(),
            ScalarField::from_fn(2, kc.m, |x, y| 0.3 * x.sin() * y.sin()),
        ),
    ];
    for (name, h) in profiles {
        let err = kernels::mean_curvature_graph(&h)
            .zip(
                &h.laplacian().zip(&kernels::eval_g_kappa(&h), |l, g| l - g),
                |a, b| a - b,
            )
            .max_abs();
        entries.push(CheckEntry {
            kernel: name,
            max_error: err,
            tolerance: 1e-8,
            pass: err <= 1e-8,
        });
    }
    // dual forms of the divergence correction
    {
        let v = vec![crate::grid::BulkScalar::from_fn(
            1,
            kc.m,
            kc.levels,
            kc.dy,
            |x, _, y| x.cos() * (0.5 + y - 0.3 * y * y),
        )];
        let h = ScalarField::from_fn(1, kc.m, |x, _| 0.4 * x.sin());
        let err = kernels::eval_f_d(&v, &h)?.max_disagreement();
        entries.push(CheckEntry {
            kernel: "Fd dual form".into(),
            max_error: err,
            tolerance: 1e-8,
            pass: err <= 1e-8,
        });
    }
    // zero preservation at the rest state
    {
        let (base, ctx, _) = kernels::seeded_state(cfg.seed, 0, 1, 32.max(kc.m / 4), 8, kc.dy);
        let rest = base.add_scaled(&base, -1.0);
        let mut worst = 0.0f64;
        for id in KernelId::ALL {
            let vals = kernels::kernel_value(id, &ctx, &rest)?;
            worst = worst.max(vals.iter().fold(0.0f64, |a, v| a.max(v.abs())));
        }
        entries.push(CheckEntry {
            kernel: "rest-state zero".into(),
            max_error: worst,
            tolerance: 0.0,
            pass: worst == 0.0,
        });
    }
    // finite-difference ratio test per kernel over the seeded direction sets
    for id in KernelId::ALL {
        let mut worst_dev = 0.0f64;
        let mut worst_err = 0.0f64;
        let mut pass = true;
        for set in 0..kc.direction_sets {
            let (base, ctx, dir) = kernels::seeded_state(cfg.seed, set, 1, 32, kc.levels, kc.dy);
            let check = kernels::fd_check(id, &ctx, &base, &dir, kc.fd_eps)?;
            pass &= check.pass;
            worst_err = worst_err.max(check.errors[2]);
            if !check.exact {
                for r in check.ratios {
                    worst_dev = worst_dev.max((r - 4.0).abs());
                }
            }
        }
        entries.push(CheckEntry {
            kernel: format!("frechet {}", id.name()),
            max_error: if worst_dev > 0.0 { worst_dev } else { worst_err },
            tolerance: 0.5,
            pass,
        });
    }
    let all_pass = entries.iter().all(|e| e.pass);
    report::write_json(&out.join("kernel_check.json"), cfg, &entries)?;
    if !all_pass {
        return Err(CliError::CheckFailed("kernel checks failed".into()));
    }
    Ok(())
}

#[derive(Serialize)]
struct HomogeneityEntry {
    method: &'static str,
    c: f64,
    observed: f64,
    expected: f64,
    pass: bool,
}

#[derive(Serialize)]
struct HardyEntry {
    a: f64,
    family_max: f64,
}

#[derive(Serialize)]
struct NormsReport {
    riesz_roundtrip_error: f64,
    riesz_pass: bool,
    homogeneity: Vec<HomogeneityEntry>,
    homogeneity_pass: bool,
    band_reports: Vec<spaces::SeminormReport>,
    band_min: f64,
    band_max: f64,
    band_pass: bool,
    hardy: Vec<HardyEntry>,
    hardy_variation: f64,
    hardy_pass: bool,
    extension_seam_error: f64,
    extension_sup_ratio: f64,
    extension_pass: bool,
    partition_max_deviation: f64,
    partition_pass: bool,
}

pub fn cmd_norms(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    use rand::Rng;
    use rand::SeedableRng;
    let nc = &cfg.norms;
    if nc.m < 16 || !(nc.box_length > 0.0) || !(nc.s > 0.0 && nc.s < 1.0) || !(nc.p >= 1.0) {
        return Err(CliError::Config("invalid norms configuration".into()));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
    // Riesz round trip on a seeded mean-zero field
    let (a1, a2) = (rng.gen_range(0.5..1.5), rng.gen_range(0.2..0.8));
    let tau = 2.0 * std::f64::consts::PI;
    let g = spaces::SampledFunction::from_fn_periodic(1, nc.m, tau, |x| {
        a1 * x[0].sin() + a2 * (4.0 * x[0]).cos()
    });
    let round = spaces::riesz_potential(&spaces::riesz_potential(&g, nc.s)?, -nc.s)?;
    let riesz_err = round
        .values
        .iter()
        .zip(&g.values)
        .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
    let riesz_pass = riesz_err <= 1e-12;
    // dilation homogeneity of both seminorms
    let base = |x: f64| (-x * x / 2.0).exp();
    let g0 = spaces::SampledFunction::from_fn_periodic(1, nc.m, nc.box_length, |x| {
        base(x[0] - 0.5 * nc.box_length)
    });
    let mut homogeneity = Vec::new();
    for c in [0.5, 2.0] {
        let gc = spaces::SampledFunction::from_fn_periodic(1, nc.m, nc.box_length / c, |x| {
            base(c * x[0] - 0.5 * nc.box_length)
        });
        let expected = c.powf(nc.s - 1.0 / nc.p);
        let slo = spaces::slobodeckij_seminorm(&gc, nc.s, nc.p)?.value
            / spaces::slobodeckij_seminorm(&g0, nc.s, nc.p)?.value;
        homogeneity.push(HomogeneityEntry {
            method: "double-integral",
            c,
            observed: slo,
            expected,
            pass: (slo - expected).abs() / expected < 1e-3,
        });
        let poi = spaces::poisson_seminorm(&gc, nc.s, nc.p)?.value
            / spaces::poisson_seminorm(&g0, nc.s, nc.p)?.value;
        homogeneity.push(HomogeneityEntry {
            method: "poisson",
            c,
            observed: poi,
            expected,
            pass: (poi - expected).abs() / expected < 1e-3,
        });
    }
    let homogeneity_pass = homogeneity.iter().all(|e| e.pass);
    // Poisson / Slobodeckij equivalence band over the seeded bump family
    let mut band_reports = Vec::new();
    let mut ratios: Vec<f64> = Vec::new();
    for _ in 0..nc.bump_count {
        let w = rng.gen_range(0.5..2.0);
        let amp = rng.gen_range(0.5..2.0);
        let shift = rng.gen_range(-2.0..2.0);
        let bump = spaces::SampledFunction::from_fn_periodic(1, nc.m, nc.box_length, |x| {
            let d = x[0] - 0.5 * nc.box_length + shift;
            amp * (-d * d / (2.0 * w * w)).exp()
        });
        let slo = spaces::slobodeckij_seminorm(&bump, nc.s, nc.p)?;
        let poi = spaces::poisson_seminorm(&bump, nc.s, nc.p)?;
        ratios.push(poi.value / slo.value);
        band_reports.push(slo);
        band_reports.push(poi);
    }
    let band_min = ratios.iter().cloned().fold(f64::MAX, f64::min);
    let band_max = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let band_pass = band_max / band_min <= 10.0;
    // Hardy uniformity sweep over {t^k} and interval lengths
    let mut hardy = Vec::new();
    for a in [0.25, 0.5, 1.0] {
        let mut family_max = 0.0f64;
        for k in 1..=5 {
            let g = spaces::SampledFunction::from_fn_interval(nc.hardy_m, a, |t| t.powi(k));
            family_max = family_max.max(spaces::hardy_ratio(&g, nc.hardy_r, nc.hardy_p)?);
        }
        hardy.push(HardyEntry { a, family_max });
    }
    let h_max = hardy.iter().fold(f64::MIN, |m, e| m.max(e.family_max));
    let h_min = hardy.iter().fold(f64::MAX, |m, e| m.min(e.family_max));
    let hardy_variation = (h_max - h_min) / h_min;
    let hardy_pass = hardy_variation < 0.10;
    // extension operator
    let h_ext = spaces::SampledFunction::from_fn_interval(nc.hardy_m, 1.0, |t| {
        t * t * (1.0 - 0.4 * t)
    });
    let ext = spaces::extend_c1(&h_ext)?;
    let m = nc.hardy_m;
    let seam_err = (3.0 * h_ext.values[m - 1] - 2.0 * h_ext.values[m - 1] - ext.values[m - 1]).abs();
    let sup_ratio = ext.max_abs() / h_ext.max_abs();
    let extension_pass = seam_err <= 1e-10 && sup_ratio <= 5.0;
    // partition of unity
    let fam = spaces::partition_of_unity(nc.partition_epsilon, &[-1.0], &[1.0], 201)?;
    let mut partition_dev = 0.0f64;
    for idx in 0..201 {
        let sum: f64 = fam.members.iter().map(|f| f.values[idx] * f.values[idx]).sum();
        partition_dev = partition_dev.max((sum - 1.0).abs());
    }
    let partition_pass = partition_dev <= 1e-12;
    let report = NormsReport {
        riesz_roundtrip_error: riesz_err,
        riesz_pass,
        homogeneity,
        homogeneity_pass,
        band_reports,
        band_min,
        band_max,
        band_pass,
        hardy,
        hardy_variation,
        hardy_pass,
        extension_seam_error: seam_err,
        extension_sup_ratio: sup_ratio,
        extension_pass,
        partition_max_deviation: partition_dev,
        partition_pass,
    };
    let all = riesz_pass
        && homogeneity_pass
        && band_pass
        && hardy_pass
        && extension_pass
        && partition_pass;
    report::write_json(&out.join("norms.json"), cfg, &report)?;
    if !all {
        return Err(CliError::CheckFailed(
            "one or more norm checks failed (see norms.json)".into(),
        ));
    }
    Ok(())
}
