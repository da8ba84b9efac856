//! Stationary thermal balance: the particle temperature T1* at which the
//! absorbed power vanishes, and normalized equilibrium curves T1*/T0 versus
//! Ω/θ0.
//!
//! The balance is stable because ∂P^abs/∂T1 < 0: hotter particles radiate
//! more than they absorb. The solver brackets the sign change of
//! P^abs(T1) and polishes the root with Brent's method.

use crate::constants::CONSTANTS;
use crate::error::{Error, Result};
use crate::observables::{observable_set, QuadratureConfig};
use crate::polarizability::{ParticleGeometry, PolarizabilitySpec, Polarization};
use crate::spectra::SpinSystem;

/// Root-solve outcome for the equilibrium temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumResult {
    /// Equilibrium particle temperature, K.
    pub t1_star: f64,
    /// Absorbed power at the returned temperature, erg/s.
    pub residual: f64,
    /// Function evaluations spent bracketing and polishing.
    pub iterations: u32,
    /// Final bracket [lo, hi] containing the root, K.
    pub bracket: [f64; 2],
}

/// Relative convergence target for T1*.
const T1_REL_TOL: f64 = 1e-10;
/// Geometric bracket-expansion budget.
const MAX_EXPANSIONS: u32 = 60;

fn absorbed_at(
    geometry: &ParticleGeometry,
    spec: &PolarizabilitySpec,
    t0: f64,
    omega: f64,
    t1: f64,
    config: &QuadratureConfig,
) -> Result<f64> {
    let system = SpinSystem::new(*geometry, spec.clone(), t0, t1, omega)?;
    Ok(observable_set(&system, config)?.p_abs)
}

/// Reject responses with no absorption at all: P^abs(T1) is then
/// identically zero and every temperature is a (meaningless) equilibrium.
fn require_absorbing(spec: &PolarizabilitySpec, scale: f64) -> Result<()> {
    // Keep probes inside a tabulated response's frequency ceiling.
    let cap = spec.max_omega().map(|m| 0.5 * m).unwrap_or(f64::INFINITY);
    for factor in [1e-3, 0.1, 1.0, 10.0] {
        let w = (factor * scale).min(cap);
        if spec.absorption_g(Polarization::Perp, w)? != 0.0 {
            return Ok(());
        }
    }
    Err(Error::NoEquilibrium(
        "response has no absorption (g identically zero on the sampled range); \
         the thermal balance P^abs(T1) = 0 does not select a temperature"
            .into(),
    ))
}

/// Empirical monotonicity probe used for tabulated responses, where
/// ∂P^abs/∂T1 < 0 is expected but not guaranteed by construction.
fn check_monotonic(
    geometry: &ParticleGeometry,
    spec: &PolarizabilitySpec,
    t0: f64,
    omega: f64,
    lo: f64,
    hi: f64,
    config: &QuadratureConfig,
    evals: &mut u32,
) -> Result<()> {
    let mut last = f64::INFINITY;
    for k in 0..3 {
        let t1 = lo + (hi - lo) * k as f64 / 2.0;
        let f = absorbed_at(geometry, spec, t0, omega, t1, config)?;
        *evals += 1;
        // Strict increase signals a non-monotonic balance; ties (e.g. two
        // exact zeros) are tolerated.
        if f > last {
            return Err(Error::NonMonotonic(format!(
                "absorbed power rises with particle temperature between \
                 {lo:.6e} K and {hi:.6e} K; equilibrium may be non-unique"
            )));
        }
        last = f;
    }
    Ok(())
}

/// Solve P^abs(T1) = 0 at fixed vacuum temperature and rotation rate.
///
/// The initial bracket is [0, 2·max(T0, ħΩ/kB)], expanded geometrically
/// until the absorbed power changes sign; Brent's method then converges to
/// 10⁻¹⁰ relative in T1.
pub fn equilibrium_temperature(
    geometry: &ParticleGeometry,
    spec: &PolarizabilitySpec,
    t0: f64,
    omega: f64,
    config: &QuadratureConfig,
) -> Result<EquilibriumResult> {
    config.validate()?;
    if !(t0 >= 0.0) || !t0.is_finite() {
        return Err(Error::Domain(format!(
            "vacuum temperature must be finite and non-negative, got {t0}"
        )));
    }
    if !(omega >= 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!(
            "rotation rate must be finite and non-negative, got {omega}"
        )));
    }
    if omega == 0.0 {
        // Detailed balance: a non-rotating particle equilibrates to the
        // vacuum temperature exactly.
        return Ok(EquilibriumResult {
            t1_star: t0,
            residual: 0.0,
            iterations: 0,
            bracket: [t0, t0],
        });
    }

    let theta0 = thermal_scale(t0);
    require_absorbing(spec, theta0.max(omega))?;

    let mut evals: u32 = 0;
    let call = |t1: f64, evals: &mut u32| -> Result<f64> {
        *evals += 1;
        absorbed_at(geometry, spec, t0, omega, t1, config)
    };

    // Bracket the sign change. At T1 = 0 the particle can only absorb, so
    // the low edge is non-negative for any passive response.
    let lo = 0.0;
    let f_lo = call(lo, &mut evals)?;
    if f_lo == 0.0 {
        return Ok(EquilibriumResult {
            t1_star: 0.0,
            residual: 0.0,
            iterations: evals,
            bracket: [0.0, 0.0],
        });
    }
    if f_lo < 0.0 {
        return Err(Error::NonMonotonic(format!(
            "absorbed power is negative ({f_lo:.3e} erg/s) at T1 = 0; \
             the response is not passive"
        )));
    }

    let mut hi = 2.0 * t0.max(CONSTANTS.hbar * omega / CONSTANTS.k_b);
    let mut f_hi = call(hi, &mut evals)?;
    let mut expansions = 0;
    while f_hi > 0.0 {
        expansions += 1;
        if expansions > MAX_EXPANSIONS {
            return Err(Error::BracketFailure {
                lo,
                hi,
                expansions: expansions - 1,
            });
        }
        hi *= 2.0;
        f_hi = call(hi, &mut evals)?;
    }
    if f_hi == 0.0 {
        return Ok(EquilibriumResult {
            t1_star: hi,
            residual: 0.0,
            iterations: evals,
            bracket: [lo, hi],
        });
    }

    if spec.max_omega().is_some() {
        check_monotonic(geometry, spec, t0, omega, lo, hi, config, &mut evals)?;
    }

    let (root, f_root) = brent(
        |t1| call(t1, &mut evals),
        lo,
        hi,
        f_lo,
        f_hi,
        T1_REL_TOL,
    )?;
    Ok(EquilibriumResult {
        t1_star: root,
        residual: f_root,
        iterations: evals,
        bracket: [lo, hi],
    })
}

fn thermal_scale(t: f64) -> f64 {
    crate::constants::thermal_angular_frequency(t).expect("validated non-negative")
}

/// Brent root polish on a bracketing interval [a, b] with f(a)·f(b) < 0.
/// Returns the abscissa and the last function value there.
fn brent<F>(mut f: F, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64, rel_tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    debug_assert!(fa * fb < 0.0);
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.abs() > fc.abs() {
            // b must remain the best estimate.
            (a, b, c) = (b, c, b);
            (fa, fb, fc) = (fb, fc, fb);
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * rel_tol * b.abs().max(f64::MIN_POSITIVE);
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok((b, fb));
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // Attempt inverse quadratic interpolation / secant.
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * xm * s, 1.0 - s)
            } else {
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 {
            d
        } else {
            tol1.copysign(xm)
        };
        fb = f(b)?;
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    Err(Error::NoEquilibrium(
        "root polish failed to converge in 200 iterations".into(),
    ))
}

/// One point of a normalized equilibrium curve.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumCurvePoint {
    /// Rotation rate over the vacuum thermal frequency, Ω/θ0.
    pub omega_over_theta0: f64,
    /// Normalized equilibrium temperature T1*/T0, or `None` if the solve
    /// failed at this rotation rate.
    pub t1_over_t0: Option<f64>,
    /// Failure diagnostic for invalid points.
    pub note: Option<String>,
}

/// Solve the equilibrium temperature across a grid of rotation rates and
/// report it in the normalized coordinates (Ω/θ0, T1*/T0). Per-point
/// failures are recorded in the output instead of aborting the sweep.
pub fn equilibrium_curve(
    geometry: &ParticleGeometry,
    spec: &PolarizabilitySpec,
    t0: f64,
    omega_grid: &[f64],
    config: &QuadratureConfig,
) -> Result<Vec<EquilibriumCurvePoint>> {
    if !(t0 > 0.0) || !t0.is_finite() {
        return Err(Error::Domain(format!(
            "normalized curve needs T0 > 0, got {t0}"
        )));
    }
    let theta0 = thermal_scale(t0);
    let mut curve = Vec::with_capacity(omega_grid.len());
    for &omega in omega_grid {
        if !(omega >= 0.0) {
            return Err(Error::Domain(format!(
                "rotation rates must be non-negative, got {omega}"
            )));
        }
        let point = match equilibrium_temperature(geometry, spec, t0, omega, config) {
            Ok(res) => EquilibriumCurvePoint {
                omega_over_theta0: omega / theta0,
                t1_over_t0: Some(res.t1_star / t0),
                note: None,
            },
            Err(err @ (Error::Domain(_) | Error::Validation(_))) => return Err(err),
            Err(err) => EquilibriumCurvePoint {
                omega_over_theta0: omega / theta0,
                t1_over_t0: None,
                note: Some(err.to_string()),
            },
        };
        curve.push(point);
    }
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::{synthesize_drude_table, MaterialModel};
    use approx::assert_relative_eq;
    use std::sync::Arc;

    const A: f64 = 1e-6;
    const SIGMA0: f64 = 2.0671e14;

    fn geometry() -> ParticleGeometry {
        ParticleGeometry::sphere(A, 2.26).unwrap()
    }

    fn asymptotic_spec() -> PolarizabilitySpec {
        PolarizabilitySpec::drude_asymptotic(&geometry(), SIGMA0).unwrap()
    }

    #[test]
    fn static_particle_equilibrates_to_vacuum() {
        let res = equilibrium_temperature(
            &geometry(),
            &asymptotic_spec(),
            123.0,
            0.0,
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert_eq!(res.t1_star, 123.0);
        assert_eq!(res.iterations, 0);
        assert_eq!(res.residual, 0.0);
    }

    #[test]
    fn isothermal_crossing_at_omega_equals_theta0() {
        let t0 = 50.0;
        let omega = thermal_scale(t0);
        let res = equilibrium_temperature(
            &geometry(),
            &asymptotic_spec(),
            t0,
            omega,
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert_relative_eq!(res.t1_star, t0, max_relative = 1e-8);
        assert!(res.bracket[0] <= res.t1_star && res.t1_star <= res.bracket[1]);
    }

    #[test]
    fn cold_vacuum_equilibrium_ratio() {
        // T0 = 0: θ1* = x·Ω with x the root of 2 − 3x⁴ − (5/7)x⁶ = 0.
        let omega = 1e12;
        let res = equilibrium_temperature(
            &geometry(),
            &asymptotic_spec(),
            0.0,
            omega,
            &QuadratureConfig::default(),
        )
        .unwrap();
        let theta1_star = thermal_scale(res.t1_star);
        assert_relative_eq!(theta1_star / omega, 0.867_152_293_583, max_relative = 1e-6);
        // Acceptance-level anchor: 0.867 within 0.1%.
        assert_relative_eq!(theta1_star / omega, 0.867, max_relative = 1e-3);
    }

    #[test]
    fn equilibrium_is_restoring() {
        // P^abs > 0 below T1*, < 0 above: the balance point is stable.
        let t0 = 40.0;
        let omega = 3.0 * thermal_scale(t0);
        let config = QuadratureConfig::default();
        let geom = geometry();
        let spec = asymptotic_spec();
        let res = equilibrium_temperature(&geom, &spec, t0, omega, &config).unwrap();
        let below =
            absorbed_at(&geom, &spec, t0, omega, res.t1_star * (1.0 - 1e-3), &config).unwrap();
        let above =
            absorbed_at(&geom, &spec, t0, omega, res.t1_star * (1.0 + 1e-3), &config).unwrap();
        assert!(below > 0.0);
        assert!(above < 0.0);
    }

    #[test]
    fn curve_brackets_the_isothermal_crossing() {
        let t0 = 60.0;
        let theta0 = thermal_scale(t0);
        let grid = [0.0, 0.5 * theta0, theta0, 2.0 * theta0];
        let curve = equilibrium_curve(
            &geometry(),
            &asymptotic_spec(),
            t0,
            &grid,
            &QuadratureConfig::default(),
        )
        .unwrap();
        let ratios: Vec<f64> = curve.iter().map(|p| p.t1_over_t0.unwrap()).collect();
        assert_eq!(ratios[0], 1.0);
        assert!(ratios[1] < 1.0, "cooling below the crossing, got {}", ratios[1]);
        assert_relative_eq!(ratios[2], 1.0, max_relative = 1e-8);
        assert!(ratios[3] > 1.0, "heating above the crossing, got {}", ratios[3]);
        assert_relative_eq!(curve[3].omega_over_theta0, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn lossless_material_has_no_equilibrium() {
        let alpha: crate::polarizability::AlphaFn =
            Arc::new(|_| Ok(num_complex::Complex64::new(5e-19, 0.0)));
        let spec = PolarizabilitySpec::from_parts(alpha.clone(), alpha, true, None);
        match equilibrium_temperature(
            &geometry(),
            &spec,
            10.0,
            1e12,
            &QuadratureConfig::default(),
        ) {
            Err(Error::NoEquilibrium(_)) => {}
            other => panic!("expected NoEquilibrium, got {other:?}"),
        }
    }

    #[test]
    fn tabulated_solve_passes_monotonicity_gate_and_matches_drude() {
        let table = synthesize_drude_table(SIGMA0, 1e-7, 1.0, 300).unwrap();
        let material = MaterialModel::tabulated(vec![(table, 1.0)]).unwrap();
        let tab_spec =
            PolarizabilitySpec::from_material(&material, &geometry(), false).unwrap();
        let t0 = 25.0;
        let omega = 2.0 * thermal_scale(t0);
        let config = QuadratureConfig::default();
        let tab = equilibrium_temperature(&geometry(), &tab_spec, t0, omega, &config).unwrap();
        // Exact Clausius–Mossotti Drude reference (not the linear kernel):
        // the table is Drude data, so the two must agree closely.
        let cm_spec = PolarizabilitySpec::from_material(
            &MaterialModel::drude(SIGMA0).unwrap(),
            &geometry(),
            false,
        )
        .unwrap();
        let cm = equilibrium_temperature(&geometry(), &cm_spec, t0, omega, &config).unwrap();
        assert_relative_eq!(tab.t1_star, cm.t1_star, max_relative = 1e-6);
    }

    #[test]
    fn input_validation() {
        let config = QuadratureConfig::default();
        assert!(
            equilibrium_temperature(&geometry(), &asymptotic_spec(), -1.0, 1e12, &config).is_err()
        );
        assert!(
            equilibrium_temperature(&geometry(), &asymptotic_spec(), 10.0, -1e12, &config)
                .is_err()
        );
        assert!(
            equilibrium_curve(&geometry(), &asymptotic_spec(), 0.0, &[1e12], &config).is_err()
        );
    }
}
