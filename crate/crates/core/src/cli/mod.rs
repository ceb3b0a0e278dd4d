//! Batch command-line front end.
//!
//! Each command resolves its configuration (defaults, `--config` file,
//! `--set` overrides, global flags), writes `config.json` and
//! `provenance.json` next to its outputs and maps the outcome to an exit
//! code: 0 success, 2 failed verdict or certificate, 3 rejected
//! configuration or precondition, 1 anything else.

pub mod config;
pub mod svg;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::{nu_sweep, LimitConfig, LimitRun};
use crate::pde::{write_checkpoint, Perturbation, SimConfig, Simulation};
use crate::profile::{compute_profile, normalize, ExtremumKind, FrameMap, Profile, ProfileOptions, ShockParams};
use crate::report::{self, sci, Provenance};
use crate::verify::{decay_table, decay_table_csv, verify_profile, MeasuredRow, VerificationBundle, VerifyOptions};
use svg::{Plot, Series};

/// Environment variable that takes precedence over `--out`.
pub const OUT_ENV: &str = "SHOCKLAB_OUT";

#[derive(Debug, Parser)]
#[command(name = "shocklab", version, about = "Oscillatory KdV-Burgers shock profiles, certificates and simulations")]
pub struct Cli {
    /// JSON file merged over the command defaults.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory (the SHOCKLAB_OUT variable takes precedence).
    #[arg(long, global = true, value_name = "DIR", default_value = "shocklab-out")]
    pub out: PathBuf,
    /// Seed for random perturbations.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Factor applied to every integration and certificate tolerance.
    #[arg(long = "tol-scale", global = true, default_value_t = 1.0)]
    pub tol_scale: f64,
    /// Override one configuration field, e.g. `--set sim.grid_size=2048`.
    #[arg(long = "set", global = true, value_name = "PATH=VALUE")]
    pub overrides: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Compute a profile, its extrema and figures.
    Profile,
    /// Certify the structural inequalities over a list of κ.
    Verify {
        /// Replace λ̄₀ to exercise the failure path.
        #[arg(long = "corrupt-lambda0", hide = true, value_name = "VALUE")]
        corrupt_lambda0: Option<f64>,
    },
    /// Run the perturbed PDE and monitor contraction.
    Simulate,
    /// Sweep the vanishing-viscosity family and fit the excess against √ν.
    Limit,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Profile => "profile",
            Command::Verify { .. } => "verify",
            Command::Simulate => "simulate",
            Command::Limit => "limit",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProfileConfig {
    pub eps: f64,
    pub delta: f64,
    pub u_minus: f64,
    pub u_plus: f64,
    /// Analysis ceiling; the smallest tabulated value above κ when absent.
    pub ceiling: Option<f64>,
    pub options: ProfileOptions,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        ProfileConfig { eps: 1.0, delta: 0.45, u_minus: 1.0, u_plus: -1.0, ceiling: None, options: ProfileOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyConfig {
    pub kappas: Vec<f64>,
    pub s: f64,
    /// The ceiling A is `verify.check.a`.
    pub verify: VerifyOptions,
    pub profile: ProfileOptions,
    /// Profiles per tabulated ceiling in the decay table; 0 skips it.
    pub table_kappas: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            kappas: vec![0.30, 0.38, 0.45],
            s: 1.0,
            verify: VerifyOptions::default(),
            profile: ProfileOptions::default(),
            table_kappas: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulateConfig {
    pub kappa: f64,
    pub s: f64,
    pub sim: SimConfig,
    pub profile: ProfileOptions,
    /// Write the final state to `checkpoint.bin`.
    pub checkpoint: bool,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig { kappa: 0.45, s: 1.0, sim: SimConfig::default(), profile: ProfileOptions::default(), checkpoint: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LimitCommandConfig {
    pub kappa: f64,
    pub s: f64,
    pub limit: LimitConfig,
    pub profile: ProfileOptions,
}

impl Default for LimitCommandConfig {
    fn default() -> Self {
        LimitCommandConfig { kappa: 0.45, s: 1.0, limit: LimitConfig::default(), profile: ProfileOptions::default() }
    }
}

/// The fully resolved input of one invocation, as written to `config.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig<T> {
    pub command: String,
    pub seed: Option<u64>,
    pub tol_scale: f64,
    pub params: T,
}

/// Verdict of a finished command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    fn of(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// Parse `args` (including the program name), run the command and return
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 3 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(Verdict::Pass) => 0,
        Ok(Verdict::Fail) => 2,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Output directory after applying the environment override.
pub fn output_dir(cli: &Cli) -> PathBuf {
    match std::env::var_os(OUT_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => cli.out.clone(),
    }
}

pub fn execute(cli: &Cli) -> Result<Verdict> {
    if !(cli.tol_scale > 0.0 && cli.tol_scale.is_finite()) {
        return Err(Error::Config(format!("--tol-scale must be positive, got {}", cli.tol_scale)));
    }
    let jobs = match cli.jobs {
        Some(0) => return Err(Error::Config("--jobs must be at least 1".into())),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, usize::from),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {jobs} workers: {e}")))?;
    let out = output_dir(cli);
    let ctx = Context { cli, out: &out, jobs };
    pool.install(|| match &cli.command {
        Command::Profile => cmd_profile(&ctx),
        Command::Verify { corrupt_lambda0 } => cmd_verify(&ctx, *corrupt_lambda0),
        Command::Simulate => cmd_simulate(&ctx),
        Command::Limit => cmd_limit(&ctx),
    })
}

struct Context<'a> {
    cli: &'a Cli,
    out: &'a Path,
    jobs: usize,
}

impl Context<'_> {
    fn load<T>(&self) -> Result<T>
    where
        T: Default + Serialize + for<'de> Deserialize<'de>,
    {
        config::load(self.cli.config.as_deref(), &self.cli.overrides)
    }

    fn write(&self, name: &str, contents: impl AsRef<[u8]>) -> Result<()> {
        report::write_file(self.out.join(name), contents)
    }

    /// Write `config.json` and `provenance.json` for the resolved input.
    fn record<T: Serialize>(&self, params: &T) -> Result<()> {
        let run = RunConfig {
            command: self.cli.command.name().to_string(),
            seed: self.cli.seed,
            tol_scale: self.cli.tol_scale,
            params,
        };
        self.write("config.json", report::to_json(&run)?)?;
        self.write("provenance.json", report::to_json(&Provenance::of(&run)?)?)
    }
}

fn scale_profile_options(options: &ProfileOptions, factor: f64) -> ProfileOptions {
    ProfileOptions { tol: options.tol.scaled(factor), ..*options }
}

fn with_seed(perturbation: &mut Perturbation, seed: Option<u64>) {
    if let (Perturbation::RandomFourier { seed: slot, .. }, Some(seed)) = (perturbation, seed) {
        *slot = seed;
    }
}

#[derive(Serialize)]
struct ProfileReport<'a> {
    params: &'a ShockParams,
    frame: &'a FrameMap,
    resolved: usize,
    extrema: &'a [crate::profile::Extremum],
    markers: &'a crate::profile::IntervalMarkers,
    tail_slope: f64,
    xi_seed: f64,
    xi_end: f64,
    warnings: &'a [String],
}

fn extrema_csv(profile: &Profile) -> String {
    let mut out = String::from("i,xi,u,kind,resolved\n");
    for e in &profile.extrema {
        let kind = match e.kind {
            ExtremumKind::Max => "max",
            ExtremumKind::Min => "min",
        };
        let _ = writeln!(out, "{},{},{},{kind},{}", e.i, sci(e.xi), sci(e.u), profile.is_resolved(e.i));
    }
    out
}

fn cmd_profile(ctx: &Context) -> Result<Verdict> {
    let mut cfg: ProfileConfig = ctx.load()?;
    cfg.options = scale_profile_options(&cfg.options, ctx.cli.tol_scale);
    ctx.record(&cfg)?;
    let (mut params, frame) = normalize(cfg.eps, cfg.delta, cfg.u_minus, cfg.u_plus)?;
    if let Some(a) = cfg.ceiling {
        params = params.with_ceiling(a)?;
    }
    let profile = compute_profile(&params, &cfg.options)?;

    let rows = (0..profile.xi.len()).map(|k| {
        let (xi, u) = (profile.xi[k], profile.u[k]);
        let (_, x, u_phys) = frame.to_physical(0.0, xi, u);
        vec![xi, u, profile.du[k], profile.energy[k], x, u_phys]
    });
    ctx.write("profile.csv", report::csv(&["xi", "u", "du", "energy", "x", "u_physical"], rows))?;
    ctx.write("extrema.csv", extrema_csv(&profile))?;
    let summary = ProfileReport {
        params: &profile.params,
        frame: &frame,
        resolved: profile.resolved,
        extrema: &profile.extrema,
        markers: &profile.markers,
        tail_slope: profile.tail_slope(),
        xi_seed: profile.xi_seed(),
        xi_end: profile.xi_end(),
        warnings: &profile.warnings,
    };
    ctx.write("profile.json", report::to_json(&summary)?)?;

    let s = profile.s();
    let orbit: Vec<(f64, f64)> = profile.u.iter().copied().zip(profile.du.iter().copied()).collect();
    let phase = Plot::new(&format!("Phase plane, kappa = {}", params.kappa), "u", "u'")
        .with(Series::line("orbit", orbit))
        .annotate(s, 0.0, "u-")
        .annotate(-s, 0.0, "u+");
    ctx.write("phase_plane.svg", phase.render())?;

    let curve: Vec<(f64, f64)> = profile.xi.iter().copied().zip(profile.u.iter().copied()).collect();
    let mut plot = Plot::new(&format!("Profile, kappa = {}", params.kappa), "xi", "u").with(Series::line("u", curve));
    for e in profile.extrema.iter().filter(|e| profile.is_resolved(e.i)) {
        plot = plot.annotate(e.xi, e.u, format!("u{}", e.i));
    }
    ctx.write("profile_xi.svg", plot.render())?;

    for w in &profile.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "profile: kappa {} with {} extrema ({} resolved) written to {}",
        params.kappa,
        profile.extrema.len(),
        profile.resolved,
        ctx.out.display()
    );
    Ok(Verdict::Pass)
}

#[derive(Serialize)]
struct TableRow<'a> {
    #[serde(flatten)]
    row: &'a MeasuredRow,
    dominated: bool,
}

#[derive(Serialize)]
struct CertificateReport<'a> {
    pass: bool,
    a: f64,
    failures: Vec<(f64, Vec<String>)>,
    bundles: &'a [VerificationBundle],
    decay_table: Vec<TableRow<'a>>,
}

fn cmd_verify(ctx: &Context, corrupt_lambda0: Option<f64>) -> Result<Verdict> {
    let mut cfg: VerifyConfig = ctx.load()?;
    cfg.profile = scale_profile_options(&cfg.profile, ctx.cli.tol_scale);
    cfg.verify.check.margin_tol *= ctx.cli.tol_scale;
    if let Some(l0) = corrupt_lambda0 {
        cfg.verify.lambda_bar.l0 = l0;
    }
    ctx.record(&cfg)?;
    if cfg.kappas.is_empty() {
        return Err(Error::Config("kappas is empty".into()));
    }
    let a = cfg.verify.check.a;
    let bundles: Vec<VerificationBundle> = cfg
        .kappas
        .iter()
        .map(|&kappa| {
            let params = ShockParams::from_kappa(kappa, cfg.s)?.with_ceiling(a)?;
            if !(kappa > 0.25 && kappa < a) {
                return Err(Error::Precondition(format!("kappa {kappa} must lie in (1/4, {a})")));
            }
            let profile = compute_profile(&params, &cfg.profile)?;
            verify_profile(&profile, &cfg.verify)
        })
        .collect::<Result<_>>()?;
    let table = if cfg.table_kappas > 0 { decay_table(cfg.table_kappas, &cfg.profile)? } else { Vec::new() };
    let margin = cfg.profile.tol.margin_tol;
    let decay_table: Vec<TableRow> = table
        .iter()
        .map(|row| TableRow {
            row,
            dominated: row.rho_star_measured_min >= row.rho_star_claimed - margin
                && row.rho_upper_measured_min >= row.rho_upper_claimed - margin,
        })
        .collect();
    let failures: Vec<(f64, Vec<String>)> =
        bundles.iter().filter(|b| !b.pass()).map(|b| (b.kappa, b.failures())).collect();
    let pass = failures.is_empty();
    let report = CertificateReport { pass, a, failures: failures.clone(), bundles: &bundles, decay_table };
    ctx.write("certificates.json", report::to_json(&report)?)?;
    ctx.write("decay_table.csv", decay_table_csv(&table))?;
    for (kappa, list) in &failures {
        eprintln!("certificate failure at kappa {kappa}: {}", list.join("; "));
    }
    println!("verify: {} profiles at A = {a}, {}", bundles.len(), if pass { "all certificates pass" } else { "FAILED" });
    Ok(Verdict::of(pass))
}

fn cmd_simulate(ctx: &Context) -> Result<Verdict> {
    let mut cfg: SimulateConfig = ctx.load()?;
    cfg.profile = scale_profile_options(&cfg.profile, ctx.cli.tol_scale);
    with_seed(&mut cfg.sim.perturbation, ctx.cli.seed);
    ctx.record(&cfg)?;
    let params = ShockParams::from_kappa(cfg.kappa, cfg.s)?;
    let profile = compute_profile(&params, &cfg.profile)?;
    let sim = Simulation::new(&profile, &cfg.sim)?;
    let run = sim.run()?;
    ctx.write("trace.csv", run.trace.to_csv())?;
    ctx.write("summary.json", report::to_json(&run.summary)?)?;
    let total: Vec<(f64, f64)> = run.trace.points.iter().map(|p| (p.t, p.total)).collect();
    let l2: Vec<(f64, f64)> = run.trace.points.iter().map(|p| (p.t, p.l2w2)).collect();
    let plot = Plot::new("Contraction monitor", "t", "value")
        .with(Series::line("Lyapunov total", total))
        .with(Series::line("||w||^2", l2).dashed());
    ctx.write("lyapunov.svg", plot.render())?;
    if cfg.checkpoint {
        write_checkpoint(ctx.out.join("checkpoint.bin"), &cfg.sim, &run.state)?;
    }
    if let Some(reason) = &run.summary.aborted {
        eprintln!("simulation aborted: {reason}");
    }
    println!(
        "simulate: {} steps, max violation {:e} (band {:e}), {}",
        run.summary.steps,
        run.summary.max_violation,
        run.summary.tolerance_band,
        if run.summary.pass { "pass" } else { "FAIL" }
    );
    Ok(Verdict::of(run.summary.pass))
}

#[derive(Serialize)]
struct SweepReport<'a> {
    rows: Vec<crate::limits::SweepRow>,
    #[serde(flatten)]
    run: &'a LimitRun,
}

fn cmd_limit(ctx: &Context) -> Result<Verdict> {
    let mut cfg: LimitCommandConfig = ctx.load()?;
    cfg.profile = scale_profile_options(&cfg.profile, ctx.cli.tol_scale);
    with_seed(&mut cfg.limit.sim.perturbation, ctx.cli.seed);
    ctx.record(&cfg)?;
    let params = ShockParams::from_kappa(cfg.kappa, cfg.s)?;
    let profile = compute_profile(&params, &cfg.profile)?;
    let sweep = nu_sweep(&profile, &cfg.limit, ctx.jobs)?;
    ctx.write("sweep.json", report::to_json(&SweepReport { rows: sweep.rows(), run: &sweep })?)?;
    for r in &sweep.runs {
        let tag = format!("nu_{}", r.nu);
        ctx.write(&format!("{tag}_trace.csv"), r.trace.to_csv())?;
        let rows = r.distances.iter().map(|d| vec![d.t, d.distance, d.perturbation, d.shift]);
        ctx.write(&format!("{tag}_distance.csv"), report::csv(&["t", "distance", "perturbation", "shift"], rows))?;
    }
    let measured: Vec<(f64, f64)> = sweep.runs.iter().map(|r| (r.nu, r.excess_max)).collect();
    let top = sweep.nu_list.first().copied().unwrap_or(1.0);
    let fitted: Vec<(f64, f64)> = (0..=64).map(|k| top * k as f64 / 64.0).map(|nu| (nu, sweep.fit.slope * nu.sqrt())).collect();
    let plot = Plot::new("Excess distance to the Riemann shock", "nu", "excess")
        .with(Series::scatter("measured", measured))
        .with(Series::line(format!("{:.4} sqrt(nu)", sweep.fit.slope), fitted).dashed());
    ctx.write("sqrt_fit.svg", plot.render())?;
    if sweep.fit.degenerate {
        eprintln!("warning: degenerate fit, the sweep needs at least two nu values with nonzero excess");
    }
    println!(
        "limit: {} runs, slope {:e}, residual {}",
        sweep.runs.len(),
        sweep.fit.slope,
        sweep.fit.residual.map_or("n/a".into(), |r| format!("{r:e}"))
    );
    Ok(Verdict::Pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_config_round_trips() {
        let run = RunConfig { command: "simulate".into(), seed: Some(7), tol_scale: 1.0, params: SimulateConfig::default() };
        let text = serde_json::to_string(&run).unwrap();
        let back: RunConfig<SimulateConfig> = serde_json::from_str(&text).unwrap();
        assert_eq!(back.params, run.params);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn seed_only_touches_random_perturbations() {
        let mut p = Perturbation::RandomFourier { seed: 1, modes: 4, amplitude: 0.1 };
        with_seed(&mut p, Some(9));
        assert_eq!(p, Perturbation::RandomFourier { seed: 9, modes: 4, amplitude: 0.1 });
        let mut g = Perturbation::default();
        with_seed(&mut g, Some(9));
        assert_eq!(g, Perturbation::default());
    }
}
