//! End-to-end tests of the `vacfric` binary: every command is exercised
//! through its public interface and checked against the library's analytic
//! closed forms, frozen reference numbers, or exact output contracts
//! (comma-separated data rows, 9-significant-digit scientific floats,
//! byte-level determinism, exit codes 0/2/3).

use std::path::PathBuf;
use std::process::{Command, Output};

use vacuum_friction::constants::{
    conductivity_si_to_gaussian, thermal_angular_frequency, CONSTANTS, DYN_CM_TO_N_M,
    ERG_TO_JOULE,
};
use vacuum_friction::dynamics::stopping_time_drude;
use vacuum_friction::material::synthesize_drude_table;
use vacuum_friction::observables::{
    drude_absorbed_closed, drude_radiated_power_closed, drude_torque_closed,
};
use vacuum_friction::polarizability::ParticleGeometry;

const SIGMA_SI: f64 = 2.3e4; // graphite-like DC conductivity, S/m
const RADIUS_CM: f64 = 1.0e-6; // the CLI default of 10 nm

fn vacfric(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vacfric"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_on_success(args: &[&str]) -> String {
    let out = vacfric(args);
    assert!(
        out.status.success(),
        "command failed: {:?}\nstderr: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

/// Non-comment lines: the CSV data rows.
fn data_lines(output: &str) -> Vec<&str> {
    output
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .collect()
}

fn fields(line: &str) -> Vec<f64> {
    line.split(',')
        .map(|f| f.parse().unwrap_or(f64::NAN))
        .collect()
}

/// Value of a `# key: value` header line.
fn header_value<'a>(output: &'a str, key: &str) -> &'a str {
    let prefix = format!("# {key}: ");
    output
        .lines()
        .find_map(|l| l.strip_prefix(prefix.as_str()))
        .unwrap_or_else(|| panic!("missing header '{key}' in:\n{output}"))
}

fn fixture(name: &str) -> String {
    let mut path = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    path.push("tests/fixtures");
    path.push(name);
    path.to_str().expect("utf-8 path").to_string()
}

fn relative_error(actual: f64, expected: f64) -> f64 {
    (actual - expected).abs() / expected.abs()
}

#[test]
fn observables_match_the_drude_closed_forms() {
    let output = stdout_on_success(&[
        "observables",
        "--material",
        "drude-linear:2.3e4",
        "--t0",
        "30",
        "--t1",
        "60",
        "--omega",
        "1e11",
    ]);
    let rows = data_lines(&output);
    assert_eq!(rows.len(), 1);
    let row = fields(rows[0]);
    assert_eq!(row.len(), 7, "row: {}", rows[0]);

    let sigma = conductivity_si_to_gaussian(SIGMA_SI).unwrap();
    let torque = drude_torque_closed(RADIUS_CM, sigma, 1e11, 30.0, 60.0).unwrap();
    let p_rad = drude_radiated_power_closed(RADIUS_CM, sigma, 1e11, 30.0, 60.0).unwrap();
    let p_abs = drude_absorbed_closed(RADIUS_CM, sigma, 1e11, 30.0, 60.0).unwrap();

    assert_eq!(row[0], 1e11);
    assert_eq!((row[1], row[2]), (30.0, 60.0));
    assert!(relative_error(row[3], torque * DYN_CM_TO_N_M) < 1e-6);
    assert!(relative_error(row[4], p_rad * ERG_TO_JOULE) < 1e-6);
    assert!(relative_error(row[5], p_abs * ERG_TO_JOULE) < 1e-6);
    assert!(row[6] < 1e-6, "quadrature error too large: {}", row[6]);
}

#[test]
fn spectrum_output_is_byte_deterministic() {
    let args = [
        "spectrum",
        "--material",
        "drude-linear:2.3e4",
        "--t0",
        "30",
        "--t1",
        "60",
        "--omega",
        "x0.7",
        "--points",
        "64",
    ];
    let first = stdout_on_success(&args);
    let second = stdout_on_success(&args);
    assert_eq!(first, second, "identical invocations must match byte-for-byte");

    let rows = data_lines(&first);
    assert_eq!(rows.len(), 64);
    for row in &rows {
        let values = fields(row);
        assert_eq!(values.len(), 2, "row: {row}");
        assert!(values[0] > 0.0 && values[1].is_finite());
    }
}

#[test]
fn static_equal_temperature_spectrum_is_identically_zero() {
    // A non-rotating particle at the vacuum temperature exchanges nothing:
    // the emission column must be exactly zero, not merely small.
    let output = stdout_on_success(&[
        "spectrum",
        "--material",
        "drude-linear:2.3e4",
        "--t0",
        "300",
        "--t1",
        "300",
        "--omega",
        "0",
        "--points",
        "8",
    ]);
    let rows = data_lines(&output);
    assert_eq!(rows.len(), 8);
    for row in rows {
        assert!(
            row.ends_with(",0.00000000e0"),
            "expected an exact zero emission value: {row}"
        );
    }
}

#[test]
fn static_spectrum_peak_sits_at_the_thermal_maximum() {
    // For a hot static sphere in a cold vacuum with the low-frequency
    // absorption kernel, dP/dω ∝ ω⁴ n(ω, T1) peaks where 4(1 − e^(−x)) = x.
    let output = stdout_on_success(&[
        "spectrum",
        "--material",
        "drude-linear:2.3e4",
        "--t0",
        "0",
        "--t1",
        "300",
        "--omega",
        "0",
        "--points",
        "32",
        "--peak",
    ]);
    let peak: f64 = header_value(&output, "peak_omega_rad_s").parse().unwrap();
    let x_star = 4.965114231744; // root of x = 4(1 − e^(−x))
    let expected = x_star * CONSTANTS.k_b * 300.0 / CONSTANTS.hbar;
    assert!(
        relative_error(peak, expected) < 1e-6,
        "peak {peak} vs expected {expected}"
    );
}

#[test]
fn equilibrium_reports_the_cold_vacuum_ratio() {
    // In a T0 = 0 vacuum the equilibrium temperature is proportional to the
    // rotation rate; the proportionality θ1*/Ω is a material-independent
    // constant of the low-frequency kernel.
    let output = stdout_on_success(&[
        "equilibrium",
        "--material",
        "drude-linear:2.3e4",
        "--t0",
        "0",
        "--omega",
        "1e11",
    ]);
    let ratio: f64 = header_value(&output, "theta1_star_over_omega")
        .parse()
        .unwrap();
    assert!(
        (ratio - 0.867152293583).abs() < 1e-3,
        "cold-vacuum ratio {ratio}"
    );
    // The normalized row degenerates at T0 = 0 but must stay deterministic.
    assert_eq!(data_lines(&output), ["inf,inf"]);
}

#[test]
fn normalized_dataset_modes_coincide_at_small_rotation() {
    // The equal-temperature and equilibrium-temperature stopping powers
    // agree while Ω ≲ θ0 and separate well above it, where the equilibrium
    // mode runs hotter (T1* > T0) and stops faster.
    let theta0 = thermal_angular_frequency(300.0).unwrap();
    let grid = format!("{:e}:{:e}:2", 0.1 * theta0, 4.0 * theta0);
    let output = stdout_on_success(&[
        "observables",
        "--material",
        "drude-linear:2.3e4",
        "--t0",
        "300",
        "--omega-grid",
        &grid,
    ]);
    let rows = data_lines(&output);
    assert_eq!(rows.len(), 2);

    let slow = fields(rows[0]);
    assert!((slow[0] - 0.1).abs() < 1e-9);
    assert!(
        relative_error(slow[2], slow[1]) < 2e-2,
        "modes should coincide at Ω = 0.1·θ0: {} vs {}",
        slow[1],
        slow[2]
    );
    assert!(slow[3] < 1.0, "slow rotation cools the particle: {}", slow[3]);

    let fast = fields(rows[1]);
    assert!((fast[0] - 4.0).abs() < 1e-9);
    assert!(
        fast[2] > 1.5 * fast[1],
        "equilibrium mode should stop much faster at Ω = 4·θ0: {} vs {}",
        fast[1],
        fast[2]
    );
    assert!(fast[3] > 2.0, "fast rotation heats the particle: {}", fast[3]);
}

#[test]
fn stopping_time_pairs_analytic_and_numeric_rows() {
    let output = stdout_on_success(&[
        "stopping-time",
        "--material",
        "drude:2.3e4",
        "--t0-grid",
        "10:100:2",
    ]);
    let rows: Vec<Vec<&str>> = data_lines(&output)
        .iter()
        .map(|row| row.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 4, "two methods per temperature");

    for pair in rows.chunks(2) {
        let (drude, numeric) = (&pair[0], &pair[1]);
        assert_eq!(drude[3], "drude");
        assert_eq!(numeric[3], "numeric");
        assert_eq!(drude[0], numeric[0], "same temperature");

        let tau_drude: f64 = drude[1].parse().unwrap();
        let tau_numeric: f64 = numeric[1].parse().unwrap();
        assert!(
            relative_error(tau_numeric, tau_drude) < 1e-2,
            "methods disagree at T0 = {}: {tau_drude} vs {tau_numeric}",
            drude[0]
        );

        let tau_years: f64 = drude[2].parse().unwrap();
        assert!(relative_error(tau_years, tau_drude / CONSTANTS.year_to_s) < 1e-8);
    }

    // τ ∝ T0⁻⁴ across the sweep.
    let tau_cold: f64 = rows[0][1].parse().unwrap();
    let tau_hot: f64 = rows[2][1].parse().unwrap();
    assert!(relative_error(tau_cold / tau_hot, 1e4) < 1e-9);
}

#[test]
fn spindown_tracks_the_analytic_decay() {
    let output = stdout_on_success(&[
        "spindown",
        "--material",
        "drude-linear:2.3e4",
        "--t0",
        "30",
        "--t1",
        "30",
        "--omega",
        "1e8",
        "--t-min",
        "1e6",
        "--t-max",
        "4.8e9",
    ]);
    let rows = data_lines(&output);
    assert!(rows.len() >= 8, "expected a resolved trajectory");
    let first = fields(rows[0]);
    let last = fields(rows[rows.len() - 1]);
    assert_eq!(first.len(), 5, "columns: t, omega, t1, p_rad, p_abs");
    assert_eq!((first[0], first[1], first[2]), (1e6, 1e8, 30.0));
    assert_eq!(last[0], 4.8e9);

    // Deep in the linear regime (Ω ≪ θ0, T1 = T0) the torque is −IΩ/τ with
    // the analytic stopping time, so the decay is exponential.
    let geometry = ParticleGeometry::sphere(RADIUS_CM, 2.26).unwrap();
    let sigma = conductivity_si_to_gaussian(SIGMA_SI).unwrap();
    let tau = stopping_time_drude(&geometry, sigma, 30.0).unwrap();
    let expected = 1e8 * (-(last[0] - first[0]) / tau).exp();
    assert!(
        relative_error(last[1], expected) < 1e-3,
        "Ω(t_max) {} vs analytic {expected}",
        last[1]
    );

    // Power columns stay on their physical sides while spinning down at the
    // vacuum temperature: net emission, net rotational work absorbed.
    for row in &rows {
        let values = fields(row);
        assert!(values[3] > 0.0 && values[4] < 0.0, "row: {row}");
    }
}

#[test]
fn two_tables_average_the_orientations() {
    let eperp = fixture("eperp.csv");
    let epar = fixture("epar.csv");
    let output = stdout_on_success(&[
        "observables",
        "--material",
        &format!("table:{eperp},{epar}"),
        "--t0",
        "30",
        "--t1",
        "60",
        "--omega",
        "1e11",
    ]);
    let row = fields(data_lines(&output)[0]);

    // Both fixtures tabulate the same Drude response, so the uniaxial
    // average must land near the analytic torque (the tabulated path keeps
    // the exact kernel and the radiative correction, hence the loose tol).
    let sigma = conductivity_si_to_gaussian(SIGMA_SI).unwrap();
    let torque = drude_torque_closed(RADIUS_CM, sigma, 1e11, 30.0, 60.0).unwrap();
    assert!(
        relative_error(row[3], torque * DYN_CM_TO_N_M) < 5e-2,
        "torque {} vs closed {}",
        row[3],
        torque * DYN_CM_TO_N_M
    );

    // Two tables of the same orientation do not define a uniaxial crystal.
    let out = vacfric(&[
        "observables",
        "--material",
        &format!("table:{eperp},{eperp}"),
        "--t0",
        "30",
        "--t1",
        "60",
        "--omega",
        "1e11",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fit_drude_recovers_the_synthesized_conductivity() {
    let sigma = conductivity_si_to_gaussian(SIGMA_SI).unwrap();
    let table = synthesize_drude_table(sigma, 1e-5, 10.0, 400).unwrap();
    let path = std::env::temp_dir().join(format!("vacfric-fit-{}.csv", std::process::id()));
    let mut buffer = Vec::new();
    table.write(&mut buffer).unwrap();
    std::fs::write(&path, buffer).unwrap();

    let output = stdout_on_success(&[
        "material",
        "fit-drude",
        "--table",
        path.to_str().unwrap(),
        "--window-ev",
        "1e-5:1e-3",
    ]);
    std::fs::remove_file(&path).ok();

    let row = fields(data_lines(&output)[0]);
    assert!(
        relative_error(row[0], SIGMA_SI) < 1e-2,
        "fitted sigma0 {} S/m",
        row[0]
    );
}

#[test]
fn bad_material_string_is_a_usage_error() {
    for material in ["bogus", "nope:1"] {
        let out = vacfric(&[
            "observables",
            "--material",
            material,
            "--t0",
            "30",
            "--t1",
            "60",
            "--omega",
            "1e11",
        ]);
        assert_eq!(out.status.code(), Some(2), "material '{material}'");
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert!(
            stderr.starts_with("error[config]:"),
            "stderr: {stderr}"
        );
    }
}

#[test]
fn lossless_table_is_a_numerical_error() {
    let out = vacfric(&[
        "stopping-time",
        "--material",
        &format!("table:{}", fixture("lossless.csv")),
        "--t0",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.starts_with("error[numerical]:") && stderr.contains("no equilibrium"),
        "stderr: {stderr}"
    );
}
