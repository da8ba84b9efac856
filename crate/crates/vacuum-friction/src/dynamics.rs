//! Rotational mechanics of the spinning particle: moment of inertia, the
//! low-rotation friction coefficient β, the characteristic stopping time τ
//! (closed-form and numeric), and adaptive spin-down trajectories Ω(t).

use crate::constants::{thermal_angular_frequency, CONSTANTS};
use crate::equilibrium::equilibrium_temperature;
use crate::error::{Error, Result};
use crate::observables::{integrate_torque, observable_set, QuadratureConfig};
use crate::polarizability::{oblate_depolarization_equatorial, ParticleGeometry};
use crate::spectra::SpinSystem;

/// Moment of inertia about the rotation (symmetry) axis, g·cm²:
/// (8/15)·π·ρ·a⁵·η — linear in the aspect ratio at fixed equatorial radius.
pub fn moment_of_inertia(geometry: &ParticleGeometry) -> f64 {
    8.0 / 15.0
        * std::f64::consts::PI
        * geometry.density
        * geometry.equatorial_radius().powi(5)
        * geometry.aspect_eta()
}

/// Low-rotation friction coefficient for a Drude sphere, erg·s:
/// M ≈ −β·Ω with β = ħa³θ0⁴/(30π²c³σ0), θ0 = 2πkB·T0/ħ.
pub fn friction_coefficient_beta(a: f64, sigma0: f64, t0: f64) -> Result<f64> {
    if !(a > 0.0) || !(sigma0 > 0.0) {
        return Err(Error::Domain(format!(
            "friction coefficient needs a > 0 and sigma0 > 0, got a={a}, sigma0={sigma0}"
        )));
    }
    let th0 = thermal_angular_frequency(t0)?;
    Ok(CONSTANTS.hbar * a.powi(3) * th0.powi(4)
        / (30.0 * std::f64::consts::PI.powi(2) * CONSTANTS.c.powi(3) * sigma0))
}

/// Spheroid stopping-time factor 9L(η)² (1 for a sphere): the moment of
/// inertia scales as η while the equatorial absorption scales as η/9L², so
/// τ = I/β picks up exactly this factor.
pub fn spheroid_stopping_scale(eta: f64) -> Result<f64> {
    let l = oblate_depolarization_equatorial(eta)?;
    Ok(9.0 * l * l)
}

/// Characteristic stopping time of a Drude particle, s:
/// τ = (ħc)³·ρa²σ0/(π(kBT0)⁴) · 9L(η)², equal to I/β by construction.
/// T0 = 0 returns +∞ — the cold vacuum exerts only the Ω⁵ torque, which
/// has no linear part.
pub fn stopping_time_drude(geometry: &ParticleGeometry, sigma0: f64, t0: f64) -> Result<f64> {
    if !(sigma0 > 0.0) {
        return Err(Error::Domain(format!(
            "conductivity must be positive, got {sigma0}"
        )));
    }
    if !(t0 >= 0.0) || !t0.is_finite() {
        return Err(Error::Domain(format!(
            "temperature must be finite and non-negative, got {t0}"
        )));
    }
    if t0 == 0.0 {
        return Ok(f64::INFINITY);
    }
    let a = geometry.equatorial_radius();
    let scale = spheroid_stopping_scale(geometry.aspect_eta())?;
    let tau = (CONSTANTS.hbar * CONSTANTS.c).powi(3) * geometry.density * a.powi(2) * sigma0
        / (std::f64::consts::PI * (CONSTANTS.k_b * t0).powi(4))
        * scale;
    #[cfg(debug_assertions)]
    {
        // Cross-check the closed form against I/β with the spheroid
        // absorption enhancement η/(9L²) folded into β.
        let beta_eff = friction_coefficient_beta(a, sigma0, t0).expect("validated")
            * geometry.aspect_eta()
            / scale;
        let alt = moment_of_inertia(geometry) / beta_eff;
        debug_assert!(
            ((tau - alt) / alt).abs() < 1e-12,
            "stopping-time identity violated: {tau:e} vs {alt:e}"
        );
    }
    Ok(tau)
}

/// Stopping time measured from the torque itself, with its probe metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericStoppingTime {
    /// τ = −I·Ω_probe / M(Ω_probe, T1*(Ω_probe)), s.
    pub tau: f64,
    /// Rotation rate used for the probe, rad/s.
    pub probe_omega: f64,
    /// Relative spread between the probe and half-probe estimates.
    pub probe_consistency: f64,
}

/// Measure τ for an arbitrary absorbing response by probing the torque in
/// the linear regime Ω ≪ kB·T0/ħ, with the particle held at its
/// equilibrium temperature for each probe.
///
/// The probe is Ω = 10⁻³·kB·T0/ħ; a second evaluation at half that rate
/// guards the linearity assumption (deviations beyond 2% are an error).
pub fn stopping_time_numeric(
    geometry: &ParticleGeometry,
    spec: &crate::polarizability::PolarizabilitySpec,
    t0: f64,
    config: &QuadratureConfig,
) -> Result<NumericStoppingTime> {
    if !(t0 > 0.0) || !t0.is_finite() {
        return Err(Error::Domain(format!(
            "numeric stopping time needs T0 > 0, got {t0}"
        )));
    }
    let inertia = moment_of_inertia(geometry);
    let probe = 1e-3 * CONSTANTS.k_b * t0 / CONSTANTS.hbar;
    let tau_at = |omega: f64| -> Result<f64> {
        let eq = equilibrium_temperature(geometry, spec, t0, omega, config)?;
        let system = SpinSystem::new(*geometry, spec.clone(), t0, eq.t1_star, omega)?;
        let m = integrate_torque(&system, config)?.value;
        if !(m < 0.0) {
            return Err(Error::Regime(format!(
                "probe torque is not frictional (M = {m:.3e} erg at Omega = {omega:.3e} rad/s)"
            )));
        }
        Ok(-inertia * omega / m)
    };
    let tau_full = tau_at(probe)?;
    let tau_half = tau_at(0.5 * probe)?;
    let consistency = (tau_full / tau_half - 1.0).abs();
    if consistency > 0.02 {
        return Err(Error::Regime(format!(
            "stopping time varies by {:.2}% between Omega probes {probe:.3e} and {:.3e} rad/s; \
             the probe is outside the linear-torque regime",
            100.0 * consistency,
            0.5 * probe,
        )));
    }
    Ok(NumericStoppingTime {
        tau: tau_full,
        probe_omega: probe,
        probe_consistency: consistency,
    })
}

/// Particle-temperature handling during spin-down.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemperatureMode {
    /// Hold T1 at the system's initial value for the whole trajectory.
    FixedT1,
    /// Re-solve P^abs(T1) = 0 at each accepted step: thermal equilibration
    /// treated as fast compared to spin-down.
    QuasistaticEquilibrium,
}

/// Per-step energy bookkeeping: rotational work −M·Ω against radiated and
/// absorbed power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedgerEntry {
    pub minus_m_omega: f64,
    pub p_rad: f64,
    pub p_abs: f64,
}

/// Accepted-step record of a spin-down integration.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinDownTrajectory {
    /// Accepted times, s (strictly increasing, starting at the span edge).
    pub times: Vec<f64>,
    /// Rotation rate at each time, rad/s.
    pub omegas: Vec<f64>,
    /// Particle temperature at each time, K.
    pub t1_path: Vec<f64>,
    /// Energy balance at each time.
    pub energy_ledger: Vec<LedgerEntry>,
}

// Cash–Karp embedded Runge–Kutta 4(5) tableau.
const CK_C: [f64; 6] = [0.0, 0.2, 0.3, 0.6, 1.0, 0.875];
const CK_A: [[f64; 5]; 6] = [
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0],
    [0.3, -0.9, 1.2, 0.0, 0.0],
    [-11.0 / 54.0, 2.5, -70.0 / 27.0, 35.0 / 27.0, 0.0],
    [
        1631.0 / 55296.0,
        175.0 / 512.0,
        575.0 / 13824.0,
        44275.0 / 110592.0,
        253.0 / 4096.0,
    ],
];
const CK_B5: [f64; 6] = [
    37.0 / 378.0,
    0.0,
    250.0 / 621.0,
    125.0 / 594.0,
    0.0,
    512.0 / 1771.0,
];
const CK_B4: [f64; 6] = [
    2825.0 / 27648.0,
    0.0,
    18575.0 / 48384.0,
    13525.0 / 55296.0,
    277.0 / 14336.0,
    0.25,
];

/// Integrate I·dΩ/dt = M(Ω, T1) from `t_span.0` to `t_span.1` (both > 0).
///
/// The stepper is an adaptive Cash–Karp 4(5) pair on u = ln t, which keeps
/// steps proportionate across the decades a spin-down covers. In
/// quasistatic mode T1 is re-solved after each accepted step and held
/// frozen within a step — consistent with the mode's assumption that
/// thermal equilibration outpaces spin-down. The energy ledger is recorded
/// from a full observable evaluation at every accepted point.
pub fn spin_down_trajectory(
    system: &SpinSystem,
    mode: TemperatureMode,
    t_span: (f64, f64),
    config: &QuadratureConfig,
) -> Result<SpinDownTrajectory> {
    config.validate()?;
    if !(system.omega > 0.0) {
        return Err(Error::Domain(format!(
            "spin-down needs a positive initial rotation rate, got {}",
            system.omega
        )));
    }
    let (t_start, t_end) = t_span;
    if !(t_start > 0.0) || !(t_end > t_start) || !t_end.is_finite() {
        return Err(Error::Domain(format!(
            "time span must satisfy 0 < t_start < t_end < inf, got ({t_start}, {t_end})"
        )));
    }

    let inertia = moment_of_inertia(&system.geometry);
    let solve_t1 = |omega: f64| -> Result<f64> {
        match mode {
            TemperatureMode::FixedT1 => Ok(system.t1),
            TemperatureMode::QuasistaticEquilibrium => Ok(equilibrium_temperature(
                &system.geometry,
                &system.spec,
                system.t0,
                omega,
                config,
            )?
            .t1_star),
        }
    };
    let torque_at = |omega: f64, t1: f64| -> Result<f64> {
        let state = SpinSystem::new(system.geometry, system.spec.clone(), system.t0, t1, omega)?;
        Ok(integrate_torque(&state, config)?.value)
    };

    let mut trajectory = SpinDownTrajectory {
        times: Vec::new(),
        omegas: Vec::new(),
        t1_path: Vec::new(),
        energy_ledger: Vec::new(),
    };
    let record = |t: f64, omega: f64, t1: f64, traj: &mut SpinDownTrajectory| -> Result<()> {
        let state = SpinSystem::new(system.geometry, system.spec.clone(), system.t0, t1, omega)?;
        let obs = observable_set(&state, config)?;
        traj.times.push(t);
        traj.omegas.push(omega);
        traj.t1_path.push(t1);
        traj.energy_ledger.push(LedgerEntry {
            minus_m_omega: -obs.torque * omega,
            p_rad: obs.p_rad,
            p_abs: obs.p_abs,
        });
        Ok(())
    };

    let mut u = t_start.ln();
    let u_end = t_end.ln();
    let mut y = system.omega;
    let mut t1 = solve_t1(y)?;
    record(t_start, y, t1, &mut trajectory)?;

    let mut h = (u_end - u) / 64.0;
    let h_floor = 1e-12;
    let omega_floor = 1e-9 * system.omega;

    while u < u_end {
        let span_left = u_end - u;
        if span_left <= h_floor {
            break;
        }
        h = h.min(span_left);
        if h < h_floor {
            return Err(Error::StepUnderflow {
                t: u.exp(),
                accepted: trajectory.times.len(),
                partial: Box::new(trajectory),
            });
        }

        // dΩ/du = t·M/I with T1 frozen across the step.
        let mut k = [0.0f64; 6];
        let mut failed = false;
        for i in 0..6 {
            let mut yi = y;
            for j in 0..i {
                yi += CK_A[i][j] * k[j];
            }
            if yi <= 0.0 {
                // An internal stage undershot zero rotation; retry smaller.
                failed = true;
                break;
            }
            let ti = (u + CK_C[i] * h).exp();
            k[i] = h * ti * torque_at(yi, t1)? / inertia;
        }
        if failed {
            h *= 0.2;
            continue;
        }

        let mut y5 = y;
        let mut y4 = y;
        for i in 0..6 {
            y5 += CK_B5[i] * k[i];
            y4 += CK_B4[i] * k[i];
        }
        let err = (y5 - y4).abs();
        let scale = config.rel_tol * y.abs().max(y5.abs()).max(omega_floor);
        let ratio = if scale > 0.0 { err / scale } else { 0.0 };

        if ratio <= 1.0 {
            u += h;
            y = y5.max(0.0);
            t1 = solve_t1(y)?;
            record(u.exp(), y, t1, &mut trajectory)?;
            let grow = if ratio > 0.0 {
                (0.9 * ratio.powf(-0.2)).min(5.0)
            } else {
                5.0
            };
            h *= grow.max(1.0);
        } else {
            h *= (0.9 * ratio.powf(-0.2)).clamp(0.2, 0.9);
        }
    }

    Ok(trajectory)
}
