//! Command-line front end for the vacuum-friction library.
//!
//! Every command prints deterministic CSV: `#`-prefixed provenance lines
//! that echo the full resolved configuration, a `# columns:` announcement,
//! then comma-separated data rows. Floats are printed in scientific
//! notation with 9 significant digits, so identical invocations give
//! byte-identical output — no timestamps, no environment data. The library
//! works in Gaussian-CGS internally; CLI output is SI (N·m, W) with
//! frequencies in rad/s, temperatures in K, photon energies in eV, and the
//! conversion constants live in the library's units module.
//!
//! Exit codes: 0 success, 2 configuration/usage error, 3 numerical failure.

// Validation guards are written `!(x > 0.0)` rather than `x <= 0.0` so
// that NaN fails them too; the negated form is the point.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use vacuum_friction::constants::{
    conductivity_gaussian_to_si, conductivity_si_to_gaussian, photon_energy_to_angular_frequency,
    thermal_angular_frequency, CONSTANTS, DYN_CM_TO_N_M, ERG_TO_JOULE, NM_TO_CM,
};
use vacuum_friction::dynamics::{
    spin_down_trajectory, stopping_time_drude, stopping_time_numeric, TemperatureMode,
};
use vacuum_friction::equilibrium::{equilibrium_curve, equilibrium_temperature};
use vacuum_friction::material::{fit_drude_sigma, MaterialModel, Orientation, PermittivityTable};
use vacuum_friction::observables::{
    integrate_torque, observable_set, peak_emission_frequency, QuadratureConfig,
};
use vacuum_friction::polarizability::{ParticleGeometry, PolarizabilitySpec};
use vacuum_friction::spectra::{emission_spectrum_grid, log_grid, SpinSystem};
use vacuum_friction::{Error, Result};

#[derive(Parser)]
#[command(
    name = "vacfric",
    about = "Vacuum-friction observables for small rotating particles",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Torque and power at one state, or the normalized stopping-power
    /// dataset over a rotation grid.
    Observables(ObservablesCmd),
    /// Emission power spectrum dP^rad/dω on a frequency grid.
    Spectrum(SpectrumCmd),
    /// Equilibrium particle temperature (point solve or normalized curve).
    Equilibrium(EquilibriumCmd),
    /// Rotational stopping time τ = −I·Ω/M, analytic and numeric.
    StoppingTime(StoppingTimeCmd),
    /// Spin-down trajectory Ω(t) with its radiated/absorbed power.
    Spindown(SpindownCmd),
    /// Material-data utilities.
    #[command(subcommand)]
    Material(MaterialCmd),
}

#[derive(Subcommand)]
enum MaterialCmd {
    /// Estimate a DC conductivity from a tabulated permittivity.
    FitDrude(FitDrudeCmd),
}

#[derive(Args)]
struct MaterialArgs {
    /// Material response: `drude:<sigma0>` (DC conductivity in S/m, exact
    /// quasistatic form), `drude-linear:<sigma0>` (low-frequency linear
    /// absorption kernel whose friction integrals have closed forms), or
    /// `table:<path>[,<path>]` (tabulated permittivity CSV; two tables are
    /// combined as a uniaxial average with weights 2/3 Eperp + 1/3 Epar).
    #[arg(long)]
    material: String,

    /// Equatorial radius, nm.
    #[arg(long, default_value_t = 10.0)]
    radius_nm: f64,

    /// Aspect ratio η = c/a of an oblate spheroid; 1 is a sphere.
    #[arg(long, default_value_t = 1.0)]
    eta: f64,

    /// Mass density, g/cm³ (enters only through the moment of inertia).
    #[arg(long, default_value_t = 2.26)]
    density: f64,

    /// Radiation-reaction correction of the polarizability.
    #[arg(long, value_enum, default_value_t = Correction::Auto)]
    radiative_correction: Correction,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Correction {
    /// On for drude and table materials, off for drude-linear.
    Auto,
    On,
    Off,
}

#[derive(Args)]
struct SolverArgs {
    /// Relative convergence target for each adaptive integral.
    #[arg(long, default_value_t = 1e-8)]
    rel_tol: f64,

    /// Thermal-tail cutoff multiplier C (window extends C thermal
    /// frequencies past Ω; neglected tails are O(e^(-C))).
    #[arg(long, default_value_t = 40.0)]
    cutoff_factor: f64,

    /// Panel-bisection budget per integral.
    #[arg(long, default_value_t = 2000)]
    max_subdivisions: u32,
}

impl SolverArgs {
    fn config(&self) -> QuadratureConfig {
        QuadratureConfig {
            rel_tol: self.rel_tol,
            abs_floor: 0.0,
            cutoff_factor: self.cutoff_factor,
            max_subdivisions: self.max_subdivisions,
        }
    }

    fn header(&self) -> Vec<(String, String)> {
        vec![
            ("rel_tol".into(), num(self.rel_tol)),
            ("cutoff_factor".into(), num(self.cutoff_factor)),
            ("max_subdivisions".into(), self.max_subdivisions.to_string()),
        ]
    }
}

#[derive(Args)]
struct ObservablesCmd {
    #[command(flatten)]
    material: MaterialArgs,
    #[command(flatten)]
    solver: SolverArgs,

    /// Vacuum temperature, K.
    #[arg(long)]
    t0: f64,

    /// Particle temperature: kelvin, or `equilibrium` to solve P^abs = 0.
    /// Single-point mode only.
    #[arg(long)]
    t1: Option<String>,

    /// Rotation rate: rad/s, or `x<factor>[theta0]` for factor·θ0
    /// (θ0 = 2πkB·T0/ħ). Single-point mode.
    #[arg(long, conflicts_with = "omega_grid")]
    omega: Option<String>,

    /// Rotation-rate grid `lo:hi:n[,log|,lin]` in rad/s: emits the
    /// normalized stopping-power dataset −MΩ/(ħa³θ0⁶/60π²c³σ0) for the
    /// equal-temperature and equilibrium-temperature modes.
    #[arg(long, conflicts_with = "t1")]
    omega_grid: Option<String>,

    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumCmd {
    #[command(flatten)]
    material: MaterialArgs,
    #[command(flatten)]
    solver: SolverArgs,

    /// Vacuum temperature, K.
    #[arg(long)]
    t0: f64,

    /// Particle temperature: kelvin, or `equilibrium`.
    #[arg(long)]
    t1: String,

    /// Rotation rate: rad/s, or `x<factor>[theta0]` for factor·θ0.
    #[arg(long)]
    omega: String,

    /// Frequency grid `lo:hi:n[,log|,lin]` in rad/s. Default: `--points`
    /// log points spanning (1e-3, C)·max(θ0, Ω).
    #[arg(long)]
    omega_grid: Option<String>,

    /// Point count for the default grid.
    #[arg(long, default_value_t = 512)]
    points: usize,

    /// Append the emission-peak location after the data rows.
    #[arg(long)]
    peak: bool,

    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EquilibriumCmd {
    #[command(flatten)]
    material: MaterialArgs,
    #[command(flatten)]
    solver: SolverArgs,

    /// Vacuum temperature, K.
    #[arg(long)]
    t0: f64,

    /// Rotation rate for a point solve: rad/s, or `x<factor>[theta0]`.
    #[arg(long, conflicts_with = "omega_grid")]
    omega: Option<String>,

    /// Rotation-rate grid `lo:hi:n[,log|,lin]` in rad/s for the normalized
    /// curve (Ω/θ0, T1*/T0).
    #[arg(long)]
    omega_grid: Option<String>,

    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StoppingTimeCmd {
    #[command(flatten)]
    material: MaterialArgs,
    #[command(flatten)]
    solver: SolverArgs,

    /// Vacuum temperature for a point evaluation, K.
    #[arg(long, conflicts_with = "t0_grid")]
    t0: Option<f64>,

    /// Temperature grid `lo:hi:n[,log|,lin]` in K for a sweep.
    #[arg(long)]
    t0_grid: Option<String>,

    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpindownCmd {
    #[command(flatten)]
    material: MaterialArgs,
    #[command(flatten)]
    solver: SolverArgs,

    /// Vacuum temperature, K.
    #[arg(long)]
    t0: f64,

    /// Initial particle temperature: kelvin, or `equilibrium`
    /// (solved at the initial rotation rate).
    #[arg(long)]
    t1: String,

    /// Initial rotation rate: rad/s, or `x<factor>[theta0]`.
    #[arg(long)]
    omega: String,

    /// Trajectory start time, s (must be positive; the integrator works in
    /// log time).
    #[arg(long)]
    t_min: f64,

    /// Trajectory end time, s.
    #[arg(long)]
    t_max: f64,

    /// Particle-temperature handling along the trajectory.
    #[arg(long, value_enum, default_value_t = Mode::Fixed)]
    mode: Mode,

    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Hold T1 at its initial value.
    Fixed,
    /// Re-solve P^abs(T1) = 0 after every accepted step.
    Quasistatic,
}

#[derive(Args)]
struct FitDrudeCmd {
    /// Tabulated permittivity CSV.
    #[arg(long)]
    table: PathBuf,

    /// Fit window `lo:hi` in eV (must lie inside the table's grid).
    #[arg(long)]
    window_ev: String,

    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Observables(cmd) => run_observables(cmd),
        Command::Spectrum(cmd) => run_spectrum(cmd),
        Command::Equilibrium(cmd) => run_equilibrium(cmd),
        Command::StoppingTime(cmd) => run_stopping_time(cmd),
        Command::Spindown(cmd) => run_spindown(cmd),
        Command::Material(MaterialCmd::FitDrude(cmd)) => run_fit_drude(cmd),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let class = if e.is_config() { "config" } else { "numerical" };
            eprintln!("error[{class}]: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 3 })
        }
    }
}

// ---------------------------------------------------------------------------
// Shared construction and parsing
// ---------------------------------------------------------------------------

/// Parsed `--material`, keeping the DC conductivity when the model has one.
enum MaterialKind {
    Drude { sigma0: f64 },
    DrudeLinear { sigma0: f64 },
    Tables(Vec<(PermittivityTable, f64)>),
}

struct Setup {
    geometry: ParticleGeometry,
    radius_cm: f64,
    spec: PolarizabilitySpec,
    kind: MaterialKind,
    header: Vec<(String, String)>,
}

fn num(x: f64) -> String {
    // Canonicalize -0.0 so exact zeros print one way.
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.8e}")
}

fn parse_material(args: &MaterialArgs) -> Result<MaterialKind> {
    let (scheme, rest) = args.material.split_once(':').ok_or_else(|| {
        Error::Domain(format!(
            "--material must be '<scheme>:<value>', got '{}'",
            args.material
        ))
    })?;
    let parse_sigma = |s: &str| -> Result<f64> {
        let sigma_si: f64 = s
            .parse()
            .map_err(|_| Error::Domain(format!("cannot parse conductivity '{s}' (S/m)")))?;
        conductivity_si_to_gaussian(sigma_si)
    };
    match scheme {
        "drude" => Ok(MaterialKind::Drude {
            sigma0: parse_sigma(rest)?,
        }),
        "drude-linear" => Ok(MaterialKind::DrudeLinear {
            sigma0: parse_sigma(rest)?,
        }),
        "table" => {
            let paths: Vec<&str> = rest.split(',').collect();
            let mut tables = Vec::new();
            for path in &paths {
                let file = File::open(path)
                    .map_err(|e| Error::Format(format!("cannot open '{path}': {e}")))?;
                tables.push(PermittivityTable::load(BufReader::new(file))?);
            }
            match tables.len() {
                1 => {
                    let t = tables.pop().unwrap();
                    Ok(MaterialKind::Tables(vec![(t, 1.0)]))
                }
                2 => {
                    // Uniaxial average: two of the three crystal axes lie
                    // perpendicular to c.
                    let o = (tables[0].orientation, tables[1].orientation);
                    let (perp, par) = match o {
                        (Orientation::EPerpC, Orientation::EParC) => {
                            let par = tables.pop().unwrap();
                            (tables.pop().unwrap(), par)
                        }
                        (Orientation::EParC, Orientation::EPerpC) => {
                            let perp = tables.pop().unwrap();
                            (perp, tables.pop().unwrap())
                        }
                        _ => {
                            return Err(Error::Domain(
                                "two tables must be one Eperp and one Epar orientation".into(),
                            ))
                        }
                    };
                    Ok(MaterialKind::Tables(vec![
                        (perp, 2.0 / 3.0),
                        (par, 1.0 / 3.0),
                    ]))
                }
                n => Err(Error::Domain(format!(
                    "expected 1 or 2 table paths, got {n}"
                ))),
            }
        }
        other => Err(Error::Domain(format!(
            "unknown material scheme '{other}' (expected drude, drude-linear, or table)"
        ))),
    }
}

fn build_setup(args: &MaterialArgs) -> Result<Setup> {
    let radius_cm = args.radius_nm * NM_TO_CM;
    let geometry = if args.eta == 1.0 {
        ParticleGeometry::sphere(radius_cm, args.density)?
    } else {
        ParticleGeometry::oblate_spheroid(radius_cm, args.eta, args.density)?
    };
    let kind = parse_material(args)?;

    let mut header = vec![
        ("material".to_string(), args.material.clone()),
        ("radius_nm".to_string(), num(args.radius_nm)),
        ("eta".to_string(), num(args.eta)),
        ("density_g_cm3".to_string(), num(args.density)),
    ];

    let correction = |on_by_default: bool| match args.radiative_correction {
        Correction::Auto => on_by_default,
        Correction::On => true,
        Correction::Off => false,
    };
    let (spec, correction_used) = match &kind {
        MaterialKind::Drude { sigma0 } => {
            let on = correction(true);
            header.push(("sigma0_s_inverse".to_string(), num(*sigma0)));
            let model = MaterialModel::drude(*sigma0)?;
            (PolarizabilitySpec::from_material(&model, &geometry, on)?, on)
        }
        MaterialKind::DrudeLinear { sigma0 } => {
            if args.radiative_correction == Correction::On {
                return Err(Error::Domain(
                    "the drude-linear kernel has no radiation-reaction variant; \
                     use --radiative-correction off or a drude material"
                        .into(),
                ));
            }
            header.push(("sigma0_s_inverse".to_string(), num(*sigma0)));
            (PolarizabilitySpec::drude_asymptotic(&geometry, *sigma0)?, false)
        }
        MaterialKind::Tables(tables) => {
            let on = correction(true);
            for (i, (table, weight)) in tables.iter().enumerate() {
                header.push((
                    format!("table_{i}"),
                    format!("{} (weight {})", table.label, num(*weight)),
                ));
            }
            let model = MaterialModel::tabulated(tables.clone())?;
            (PolarizabilitySpec::from_material(&model, &geometry, on)?, on)
        }
    };
    header.push((
        "radiative_correction".to_string(),
        if correction_used { "on" } else { "off" }.to_string(),
    ));

    Ok(Setup {
        geometry,
        radius_cm,
        spec,
        kind,
        header,
    })
}

impl Setup {
    /// DC conductivity in Gaussian units (1/s): given for the drude kinds,
    /// fitted over the lowest decade of the grid for tabulated data.
    fn resolve_sigma0(&self) -> Result<(f64, &'static str)> {
        match &self.kind {
            MaterialKind::Drude { sigma0 } | MaterialKind::DrudeLinear { sigma0 } => {
                Ok((*sigma0, "given"))
            }
            MaterialKind::Tables(tables) => {
                let (table, _) = &tables[0];
                let lo = table.omega_min();
                let window = (lo, (1e1 * lo).min(table.omega_max()));
                let fit = fit_drude_sigma(table, window)?;
                Ok((fit.sigma0, "fitted"))
            }
        }
    }
}

/// Rotation rate: plain rad/s, or `x<factor>[theta0]` for factor·θ0.
fn parse_omega(s: &str, t0: f64) -> Result<f64> {
    if let Some(factor) = s.strip_prefix('x') {
        let factor = factor.strip_suffix("theta0").unwrap_or(factor);
        let f: f64 = factor
            .parse()
            .map_err(|_| Error::Domain(format!("cannot parse rotation factor '{s}'")))?;
        Ok(f * thermal_angular_frequency(t0)?)
    } else {
        s.parse()
            .map_err(|_| Error::Domain(format!("cannot parse rotation rate '{s}' (rad/s)")))
    }
}

enum T1Spec {
    Kelvin(f64),
    Equilibrium,
}

fn parse_t1(s: &str) -> Result<T1Spec> {
    if s == "equilibrium" {
        return Ok(T1Spec::Equilibrium);
    }
    s.parse()
        .map(T1Spec::Kelvin)
        .map_err(|_| Error::Domain(format!("cannot parse --t1 '{s}' (kelvin or 'equilibrium')")))
}

/// Resolve the particle temperature, solving the thermal balance if asked.
fn resolve_t1(
    spec: &T1Spec,
    setup: &Setup,
    t0: f64,
    omega: f64,
    config: &QuadratureConfig,
) -> Result<(f64, &'static str)> {
    match spec {
        T1Spec::Kelvin(t1) => Ok((*t1, "fixed")),
        T1Spec::Equilibrium => {
            let eq = equilibrium_temperature(&setup.geometry, &setup.spec, t0, omega, config)?;
            Ok((eq.t1_star, "equilibrium"))
        }
    }
}

/// Grid spec `lo:hi:n[,log|,lin]`.
fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let err = || Error::Domain(format!("cannot parse grid '{s}' (expected lo:hi:n[,log|,lin])"));
    let (body, scale) = match s.split_once(',') {
        None => (s, "log"),
        Some((body, "log")) => (body, "log"),
        Some((body, "lin")) => (body, "lin"),
        Some(_) => return Err(err()),
    };
    let parts: Vec<&str> = body.split(':').collect();
    if parts.len() != 3 {
        return Err(err());
    }
    let lo: f64 = parts[0].parse().map_err(|_| err())?;
    let hi: f64 = parts[1].parse().map_err(|_| err())?;
    let n: usize = parts[2].parse().map_err(|_| err())?;
    if n < 2 || !(hi > lo) {
        return Err(err());
    }
    if scale == "log" {
        log_grid(lo, hi, n)
    } else {
        Ok((0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect())
    }
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    match out {
        None => Ok(Box::new(BufWriter::new(std::io::stdout()))),
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| Error::Format(format!("cannot create '{}': {e}", path.display())))?;
            Ok(Box::new(BufWriter::new(file)))
        }
    }
}

fn wline(w: &mut dyn Write, line: std::fmt::Arguments) -> Result<()> {
    writeln!(w, "{line}").map_err(|e| Error::Format(format!("write failure: {e}")))
}

fn write_header(
    w: &mut dyn Write,
    command: &str,
    setup_header: &[(String, String)],
    extra: &[(&str, String)],
) -> Result<()> {
    wline(w, format_args!("# command: {command}"))?;
    for (k, v) in setup_header {
        wline(w, format_args!("# {k}: {v}"))?;
    }
    for (k, v) in extra {
        wline(w, format_args!("# {k}: {v}"))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn run_observables(cmd: ObservablesCmd) -> Result<()> {
    match (&cmd.omega, &cmd.omega_grid) {
        (Some(_), None) => run_observables_point(&cmd),
        (None, Some(_)) => run_observables_dataset(&cmd),
        _ => Err(Error::Domain(
            "pass exactly one of --omega (single point) or --omega-grid (dataset)".into(),
        )),
    }
}

fn run_observables_point(cmd: &ObservablesCmd) -> Result<()> {
    let setup = build_setup(&cmd.material)?;
    let config = cmd.solver.config();
    let omega = parse_omega(cmd.omega.as_deref().unwrap(), cmd.t0)?;
    let t1_spec = parse_t1(cmd.t1.as_deref().ok_or_else(|| {
        Error::Domain("single-point mode needs --t1 (kelvin or 'equilibrium')".into())
    })?)?;
    let (t1, t1_mode) = resolve_t1(&t1_spec, &setup, cmd.t0, omega, &config)?;
    let system = SpinSystem::new(setup.geometry, setup.spec.clone(), cmd.t0, t1, omega)?;
    let obs = observable_set(&system, &config)?;

    let w = &mut *sink(&cmd.out)?;
    write_header(
        w,
        "observables",
        &setup.header,
        &[
            ("t1_mode", t1_mode.to_string()),
            ("evaluations", obs.evaluations.to_string()),
        ],
    )?;
    for (k, v) in cmd.solver.header() {
        wline(w, format_args!("# {k}: {v}"))?;
    }
    if let Some(advisory) = system.dipole_advisory() {
        wline(w, format_args!("# advisory: {advisory}"))?;
    }
    wline(
        w,
        format_args!(
            "# columns: omega_rad_s,t0_k,t1_k,torque_n_m,p_rad_w,p_abs_w,quad_rel_error"
        ),
    )?;
    wline(
        w,
        format_args!(
            "{},{},{},{},{},{},{}",
            num(omega),
            num(cmd.t0),
            num(t1),
            num(obs.torque * DYN_CM_TO_N_M),
            num(obs.p_rad * ERG_TO_JOULE),
            num(obs.p_abs * ERG_TO_JOULE),
            num(obs.quad_error),
        ),
    )
}

/// Normalized stopping power −MΩ/(ħa³θ0⁶/60π²c³σ0) against Ω/θ0 for the
/// equal-temperature and equilibrium-temperature modes, with the
/// equilibrium temperature ratio alongside.
fn run_observables_dataset(cmd: &ObservablesCmd) -> Result<()> {
    let setup = build_setup(&cmd.material)?;
    let config = cmd.solver.config();
    if !(cmd.t0 > 0.0) {
        return Err(Error::Domain(format!(
            "the normalized dataset needs a positive vacuum temperature, got {}",
            cmd.t0
        )));
    }
    let grid = parse_grid(cmd.omega_grid.as_deref().unwrap())?;
    let (sigma0, sigma0_source) = setup.resolve_sigma0()?;
    let theta0 = thermal_angular_frequency(cmd.t0)?;
    let norm = CONSTANTS.hbar * setup.radius_cm.powi(3) * theta0.powi(6)
        / (60.0 * std::f64::consts::PI.powi(2) * CONSTANTS.c.powi(3) * sigma0);

    let w = &mut *sink(&cmd.out)?;
    write_header(
        w,
        "observables",
        &setup.header,
        &[
            ("t0_k", num(cmd.t0)),
            ("theta0_rad_s", num(theta0)),
            (
                "normalization",
                format!(
                    "hbar*a^3*theta0^6/(60*pi^2*c^3*sigma0) = {} erg/s (sigma0 {})",
                    num(norm),
                    sigma0_source
                ),
            ),
        ],
    )?;
    for (k, v) in cmd.solver.header() {
        wline(w, format_args!("# {k}: {v}"))?;
    }
    wline(
        w,
        format_args!(
            "# columns: omega_over_theta0,stopping_equal_t,stopping_equilibrium_t,t1_over_t0"
        ),
    )?;
    let mut failures: Vec<String> = Vec::new();
    for &omega in &grid {
        let equal = {
            let system =
                SpinSystem::new(setup.geometry, setup.spec.clone(), cmd.t0, cmd.t0, omega)?;
            let torque = integrate_torque(&system, &config)?;
            -torque.value * omega / norm
        };
        let (equilibrium, ratio) =
            match equilibrium_temperature(&setup.geometry, &setup.spec, cmd.t0, omega, &config) {
                Ok(eq) => {
                    let system = SpinSystem::new(
                        setup.geometry,
                        setup.spec.clone(),
                        cmd.t0,
                        eq.t1_star,
                        omega,
                    )?;
                    let torque = integrate_torque(&system, &config)?;
                    (-torque.value * omega / norm, eq.t1_star / cmd.t0)
                }
                Err(e) if e.is_config() => return Err(e),
                Err(e) => {
                    failures.push(format!(
                        "# failed: omega_over_theta0={} {e}",
                        num(omega / theta0)
                    ));
                    (f64::NAN, f64::NAN)
                }
            };
        wline(
            w,
            format_args!(
                "{},{},{},{}",
                num(omega / theta0),
                num(equal),
                num(equilibrium),
                num(ratio),
            ),
        )?;
    }
    for line in &failures {
        wline(w, format_args!("{line}"))?;
    }
    Ok(())
}

fn run_spectrum(cmd: SpectrumCmd) -> Result<()> {
    let setup = build_setup(&cmd.material)?;
    let config = cmd.solver.config();
    let omega = parse_omega(&cmd.omega, cmd.t0)?;
    let t1_spec = parse_t1(&cmd.t1)?;
    let (t1, t1_mode) = resolve_t1(&t1_spec, &setup, cmd.t0, omega, &config)?;
    let system = SpinSystem::new(setup.geometry, setup.spec.clone(), cmd.t0, t1, omega)?;

    let grid = match &cmd.omega_grid {
        Some(spec) => parse_grid(spec)?,
        None => {
            // Grid scale max(θ0, Ω); a cold static vacuum leaves only the
            // particle's own thermal scale.
            let mut scale = system.theta0().max(omega);
            if scale == 0.0 {
                scale = system.theta1();
            }
            if scale == 0.0 {
                return Err(Error::Domain(
                    "no frequency scale for a default grid: T0, T1, and the rotation \
                     rate are all zero; pass --omega-grid explicitly"
                        .into(),
                ));
            }
            let mut hi = config.cutoff_factor * scale;
            if let Some(max) = setup.spec.max_omega() {
                // Folded evaluation reaches |ω| + Ω.
                hi = hi.min(max - omega);
            }
            let lo = 1e-3 * scale;
            if !(hi > lo) {
                return Err(Error::Domain(format!(
                    "default grid is empty: the material table caps frequencies at \
                     {:.4e} rad/s; pass --omega-grid explicitly",
                    hi
                )));
            }
            log_grid(lo, hi, cmd.points)?
        }
    };

    let spectrum = emission_spectrum_grid(&system, &grid)?;
    let w = &mut *sink(&cmd.out)?;
    write_header(
        w,
        "spectrum",
        &setup.header,
        &[
            ("t0_k", num(cmd.t0)),
            ("t1_k", num(t1)),
            ("t1_mode", t1_mode.to_string()),
            ("omega_rad_s", num(omega)),
            ("points", spectrum.omegas.len().to_string()),
        ],
    )?;
    for (k, v) in cmd.solver.header() {
        wline(w, format_args!("# {k}: {v}"))?;
    }
    wline(
        w,
        format_args!("# columns: omega_rad_s,dp_domega_w_per_rad_s"),
    )?;
    for (x, y) in spectrum.omegas.iter().zip(&spectrum.values) {
        wline(w, format_args!("{},{}", num(*x), num(y * ERG_TO_JOULE)))?;
    }
    if cmd.peak {
        let peak = peak_emission_frequency(&system, &config)?;
        wline(w, format_args!("# peak_omega_rad_s: {}", num(peak)))?;
    }
    Ok(())
}

fn run_equilibrium(cmd: EquilibriumCmd) -> Result<()> {
    let setup = build_setup(&cmd.material)?;
    let config = cmd.solver.config();
    match (&cmd.omega, &cmd.omega_grid) {
        (Some(omega_spec), None) => {
            let omega = parse_omega(omega_spec, cmd.t0)?;
            let eq = equilibrium_temperature(&setup.geometry, &setup.spec, cmd.t0, omega, &config)?;
            let theta0 = thermal_angular_frequency(cmd.t0)?;
            let w = &mut *sink(&cmd.out)?;
            let mut extra = vec![
                ("omega_rad_s", num(omega)),
                ("t1_star_k", num(eq.t1_star)),
                ("residual_w", num(eq.residual * ERG_TO_JOULE)),
                ("iterations", eq.iterations.to_string()),
                (
                    "bracket_k",
                    format!("{} {}", num(eq.bracket[0]), num(eq.bracket[1])),
                ),
            ];
            if omega > 0.0 {
                let ratio = thermal_angular_frequency(eq.t1_star)? / omega;
                extra.push(("theta1_star_over_omega", num(ratio)));
            }
            write_header(w, "equilibrium", &setup.header, &extra)?;
            for (k, v) in cmd.solver.header() {
                wline(w, format_args!("# {k}: {v}"))?;
            }
            wline(w, format_args!("# columns: omega_over_theta0,t1_over_t0"))?;
            wline(
                w,
                format_args!("{},{}", num(omega / theta0), num(eq.t1_star / cmd.t0)),
            )
        }
        (None, Some(grid_spec)) => {
            let grid = parse_grid(grid_spec)?;
            let curve = equilibrium_curve(&setup.geometry, &setup.spec, cmd.t0, &grid, &config)?;
            let w = &mut *sink(&cmd.out)?;
            write_header(
                w,
                "equilibrium",
                &setup.header,
                &[
                    ("t0_k", num(cmd.t0)),
                    ("points", curve.len().to_string()),
                ],
            )?;
            for (k, v) in cmd.solver.header() {
                wline(w, format_args!("# {k}: {v}"))?;
            }
            wline(w, format_args!("# columns: omega_over_theta0,t1_over_t0"))?;
            for point in &curve {
                let value = point.t1_over_t0.map_or_else(|| "nan".to_string(), num);
                wline(
                    w,
                    format_args!("{},{}", num(point.omega_over_theta0), value),
                )?;
            }
            for point in &curve {
                if let Some(note) = &point.note {
                    wline(
                        w,
                        format_args!(
                            "# failed: omega_over_theta0={} {note}",
                            num(point.omega_over_theta0)
                        ),
                    )?;
                }
            }
            Ok(())
        }
        _ => Err(Error::Domain(
            "pass exactly one of --omega (point solve) or --omega-grid (curve)".into(),
        )),
    }
}

fn run_stopping_time(cmd: StoppingTimeCmd) -> Result<()> {
    let setup = build_setup(&cmd.material)?;
    let config = cmd.solver.config();
    let grid = match (cmd.t0, &cmd.t0_grid) {
        (Some(t0), None) => vec![t0],
        (None, Some(spec)) => parse_grid(spec)?,
        _ => {
            return Err(Error::Domain(
                "pass exactly one of --t0 (point) or --t0-grid (sweep)".into(),
            ))
        }
    };
    // The analytic column needs a DC conductivity; tabulated data falls back
    // to a low-frequency fit, and materials without one (lossless tables)
    // emit the numeric rows alone.
    let sigma0 = setup.resolve_sigma0();
    let w = &mut *sink(&cmd.out)?;
    let sigma0_note = match &sigma0 {
        Ok((value, source)) => format!("{} ({source})", num(*value)),
        Err(e) => format!("unavailable ({e})"),
    };
    write_header(
        w,
        "stopping-time",
        &setup.header,
        &[
            ("sigma0_for_drude_column_s_inverse", sigma0_note),
            ("points", grid.len().to_string()),
        ],
    )?;
    for (k, v) in cmd.solver.header() {
        wline(w, format_args!("# {k}: {v}"))?;
    }
    wline(
        w,
        format_args!("# columns: t0_k,tau_s,tau_years,method"),
    )?;
    for &t0 in &grid {
        if let Ok((sigma0, _)) = sigma0 {
            let tau = match stopping_time_drude(&setup.geometry, sigma0, t0) {
                Ok(tau) => tau,
                Err(e) if e.is_config() => return Err(e),
                Err(_) => f64::NAN,
            };
            wline(
                w,
                format_args!(
                    "{},{},{},drude",
                    num(t0),
                    num(tau),
                    num(tau / CONSTANTS.year_to_s)
                ),
            )?;
        }
        let numeric = stopping_time_numeric(&setup.geometry, &setup.spec, t0, &config)?;
        wline(
            w,
            format_args!(
                "{},{},{},numeric",
                num(t0),
                num(numeric.tau),
                num(numeric.tau / CONSTANTS.year_to_s)
            ),
        )?;
    }
    Ok(())
}

fn run_spindown(cmd: SpindownCmd) -> Result<()> {
    let setup = build_setup(&cmd.material)?;
    let config = cmd.solver.config();
    let omega = parse_omega(&cmd.omega, cmd.t0)?;
    let t1_spec = parse_t1(&cmd.t1)?;
    let (t1, t1_mode) = resolve_t1(&t1_spec, &setup, cmd.t0, omega, &config)?;
    let system = SpinSystem::new(setup.geometry, setup.spec.clone(), cmd.t0, t1, omega)?;
    let mode = match cmd.mode {
        Mode::Fixed => TemperatureMode::FixedT1,
        Mode::Quasistatic => TemperatureMode::QuasistaticEquilibrium,
    };
    let trajectory = spin_down_trajectory(&system, mode, (cmd.t_min, cmd.t_max), &config)?;

    let w = &mut *sink(&cmd.out)?;
    write_header(
        w,
        "spindown",
        &setup.header,
        &[
            ("t0_k", num(cmd.t0)),
            ("t1_initial_k", num(t1)),
            ("t1_mode", t1_mode.to_string()),
            (
                "temperature_mode",
                match mode {
                    TemperatureMode::FixedT1 => "fixed".to_string(),
                    TemperatureMode::QuasistaticEquilibrium => "quasistatic".to_string(),
                },
            ),
            ("omega0_rad_s", num(omega)),
            ("steps", trajectory.times.len().to_string()),
        ],
    )?;
    for (k, v) in cmd.solver.header() {
        wline(w, format_args!("# {k}: {v}"))?;
    }
    wline(
        w,
        format_args!("# columns: t_s,omega_rad_s,t1_k,p_rad_w,p_abs_w"),
    )?;
    for i in 0..trajectory.times.len() {
        let ledger = trajectory.energy_ledger[i];
        wline(
            w,
            format_args!(
                "{},{},{},{},{}",
                num(trajectory.times[i]),
                num(trajectory.omegas[i]),
                num(trajectory.t1_path[i]),
                num(ledger.p_rad * ERG_TO_JOULE),
                num(ledger.p_abs * ERG_TO_JOULE),
            ),
        )?;
    }
    Ok(())
}

fn run_fit_drude(cmd: FitDrudeCmd) -> Result<()> {
    let file = File::open(&cmd.table)
        .map_err(|e| Error::Format(format!("cannot open '{}': {e}", cmd.table.display())))?;
    let table = PermittivityTable::load(BufReader::new(file))?;

    let window = {
        let parts: Vec<&str> = cmd.window_ev.split(':').collect();
        let err =
            || Error::Domain(format!("cannot parse --window-ev '{}' (lo:hi)", cmd.window_ev));
        if parts.len() != 2 {
            return Err(err());
        }
        let lo_ev: f64 = parts[0].parse().map_err(|_| err())?;
        let hi_ev: f64 = parts[1].parse().map_err(|_| err())?;
        (
            photon_energy_to_angular_frequency(lo_ev)?,
            photon_energy_to_angular_frequency(hi_ev)?,
        )
    };
    let fit = fit_drude_sigma(&table, window)?;
    let sigma_si = conductivity_gaussian_to_si(fit.sigma0)?;

    let w = &mut *sink(&cmd.out)?;
    write_header(
        w,
        "material fit-drude",
        &[
            ("table".to_string(), table.label.clone()),
            ("window_ev".to_string(), cmd.window_ev.clone()),
        ],
        &[],
    )?;
    wline(
        w,
        format_args!(
            "# columns: sigma0_si_s_m,sigma0_s_inverse,residual_rms_s_inverse,nodes_used"
        ),
    )?;
    wline(
        w,
        format_args!(
            "{},{},{},{}",
            num(sigma_si),
            num(fit.sigma0),
            num(fit.residual_rms),
            fit.nodes_used
        ),
    )
}
