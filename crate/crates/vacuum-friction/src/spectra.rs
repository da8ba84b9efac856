//! Statistical and electromagnetic kernels: Bose–Einstein occupation, the
//! spectral emission distribution Γ(ω) of a rotating particle, emission
//! spectra, the vacuum Green tensor, the free-space photonic LDOS, and the
//! fluctuation-dissipation correlator.

use num_complex::Complex64;

use crate::constants::{thermal_angular_frequency, CONSTANTS};
use crate::error::{Error, Result};
use crate::polarizability::{ParticleGeometry, PolarizabilitySpec, Polarization};

/// Bose–Einstein occupation, or a marker for the ω = 0 pole.
///
/// The pole is an in-band value, not an error: integrands multiply n by
/// factors vanishing at least linearly at ω = 0 and handle the product by
/// continuity instead of evaluating the pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoseValue {
    Finite(f64),
    Pole,
}

impl BoseValue {
    /// The finite value, if this is not the pole marker.
    pub fn finite(self) -> Option<f64> {
        match self {
            BoseValue::Finite(n) => Some(n),
            BoseValue::Pole => None,
        }
    }
}

/// Bose–Einstein occupation n(ω, T) = 1/(e^{ħω/kBT} − 1).
///
/// T = 0 returns the two-sided limit (0 for ω > 0, −1 for ω < 0); ω = 0
/// returns [`BoseValue::Pole`]. Uses expm1 so small |ħω/kBT| keeps full
/// relative accuracy.
pub fn bose_einstein(omega: f64, t: f64) -> Result<BoseValue> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!(
            "temperature must be finite and non-negative, got {t}"
        )));
    }
    if !omega.is_finite() {
        return Err(Error::Domain(format!("frequency must be finite, got {omega}")));
    }
    if omega == 0.0 {
        return Ok(BoseValue::Pole);
    }
    Ok(BoseValue::Finite(bose_finite(omega, t)))
}

/// Occupation at ω ≠ 0 (callers guarantee the argument).
fn bose_finite(omega: f64, t: f64) -> f64 {
    debug_assert!(omega != 0.0);
    if t == 0.0 {
        return if omega > 0.0 { 0.0 } else { -1.0 };
    }
    let x = CONSTANTS.hbar * omega / (CONSTANTS.k_b * t);
    1.0 / x.exp_m1()
}

/// A rotating particle coupled to a thermal vacuum: geometry, response,
/// vacuum temperature `t0`, particle temperature `t1`, rotation rate
/// `omega` (rad/s, about the z / symmetry axis).
#[derive(Debug, Clone)]
pub struct SpinSystem {
    pub geometry: ParticleGeometry,
    pub spec: PolarizabilitySpec,
    pub t0: f64,
    pub t1: f64,
    pub omega: f64,
}

impl SpinSystem {
    pub fn new(
        geometry: ParticleGeometry,
        spec: PolarizabilitySpec,
        t0: f64,
        t1: f64,
        omega: f64,
    ) -> Result<Self> {
        for (name, value) in [("T0", t0), ("T1", t1)] {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::Domain(format!(
                    "{name} must be finite and non-negative, got {value}"
                )));
            }
        }
        if !(omega >= 0.0) || !omega.is_finite() {
            return Err(Error::Domain(format!(
                "rotation rate must be finite and non-negative, got {omega}"
            )));
        }
        Ok(Self {
            geometry,
            spec,
            t0,
            t1,
            omega,
        })
    }

    /// Thermal angular frequency 2πkB·T0/ħ of the vacuum.
    pub fn theta0(&self) -> f64 {
        thermal_angular_frequency(self.t0).expect("validated at construction")
    }

    /// Thermal angular frequency 2πkB·T1/ħ of the particle.
    pub fn theta1(&self) -> f64 {
        thermal_angular_frequency(self.t1).expect("validated at construction")
    }

    /// Dipolar-approximation advisory. The model assumes the particle is
    /// small compared to every relevant wavelength: Ω·a/c and kB·Tj·a/(c·ħ)
    /// all below 0.1. Violations degrade accuracy but are not errors.
    pub fn dipole_advisory(&self) -> Option<String> {
        let a = self.geometry.equatorial_radius();
        let mut notes = Vec::new();
        let rot = self.omega * a / CONSTANTS.c;
        if rot >= 0.1 {
            notes.push(format!("Omega*a/c = {rot:.3e} >= 0.1"));
        }
        for (name, t) in [("T0", self.t0), ("T1", self.t1)] {
            let th = CONSTANTS.k_b * t * a / (CONSTANTS.c * CONSTANTS.hbar);
            if th >= 0.1 {
                notes.push(format!("kB*{name}*a/(c*hbar) = {th:.3e} >= 0.1"));
            }
        }
        if notes.is_empty() {
            None
        } else {
            Some(format!(
                "dipolar approximation strained: {}",
                notes.join(", ")
            ))
        }
    }
}

/// The two channels of the spectral distribution: rotation-plane (perp)
/// and symmetry-axis (par) contributions to Γ(ω).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaParts {
    pub perp: f64,
    pub par: f64,
}

/// Occupation difference n₁(ν) − n₀(ω) for ν = ω − shift, with the shift
/// supplied exactly by the caller.
///
/// Two rounding hazards meet here. First, a negative-argument occupation
/// n(−y) = −1 − n(y) stores its exponentially small tail against the −1 at
/// absolute precision, so differences taken across the reflection flood the
/// ω³-weighted high-frequency integrands with noise; the sign-split
/// branches subtract positive-argument occupations instead, where every
/// term keeps full relative precision. Second — and untouched by that
/// splitting — when the two arguments land close on their shared thermal
/// scale (near equilibrium: T₁ ≈ T₀, shift ≪ |ω|), the bracket is
/// O(shift·ħ/kBT) of either occupation and like-signed subtraction
/// amplifies rounding by its inverse; the friction integrals cancel a
/// further such factor between mirror lobes and drown entirely. For that
/// regime the exponent difference is assembled from the exact shift,
///
///   dx = x₁ − x₀ = (ħ/kB)·[ω(T₀ − T₁)/(T₀T₁) − shift/T₁],
///
/// never re-deriving it from two nearly equal quotients, and the identity
///
///   n(x₁) − n(x₀) = expm1(dx) / (expm1(x₁)·expm1(−x₀)),
///
/// valid for any signs of the arguments, yields the difference with every
/// factor at full relative precision. The identity is used exactly when it
/// is needed and provably overflow-free: |dx| ≤ 1 (beyond that the
/// occupations differ by an e-fold and direct subtraction loses at most a
/// bit) and |x₀| ≤ 700 (with |dx| ≤ 1 no expm1 can then overflow, since
/// x₁ > 0 and −x₀ > 0 would force |x₀|, |x₁| < 1).
fn bose_difference(nu: f64, t1: f64, omega: f64, t0: f64, shift: f64) -> f64 {
    debug_assert!(nu != 0.0 && omega != 0.0);
    if t1 > 0.0 && t0 > 0.0 {
        let h_over_k = CONSTANTS.hbar / CONSTANTS.k_b;
        let x0 = h_over_k * omega / t0;
        let dx = h_over_k * (omega * ((t0 - t1) / (t0 * t1)) - shift / t1);
        let x1 = x0 + dx;
        if dx.abs() <= 1.0 && x0.abs() <= 700.0 && x0 != 0.0 && x1 != 0.0 {
            return dx.exp_m1() / (x1.exp_m1() * (-x0).exp_m1());
        }
    }
    if nu < 0.0 && omega < 0.0 {
        bose_finite(-omega, t0) - bose_finite(-nu, t1)
    } else if nu < 0.0 {
        // ν < 0 ≤ ω: all three terms share a sign, so no cancellation.
        -1.0 - bose_finite(-nu, t1) - bose_finite(omega, t0)
    } else if omega < 0.0 {
        // ω < 0 ≤ ν cannot occur for Ω ≥ 0 (ν = ω − Ω ≤ ω); kept so the
        // function is total.
        1.0 + bose_finite(nu, t1) + bose_finite(-omega, t0)
    } else {
        bose_finite(nu, t1) - bose_finite(omega, t0)
    }
}

/// Product g_l(ν)·n(ν, T), extended by continuity through ν = 0 where g has
/// a simple zero and n a simple pole. The limit is evaluated just off the
/// singular point via the even combination g·(n + ½), accurate to O(δ²).
fn g_n_product(spec: &PolarizabilitySpec, pol: Polarization, nu: f64, t: f64) -> Result<f64> {
    if nu != 0.0 {
        return Ok(spec.absorption_g(pol, nu)? * bose_finite(nu, t));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let delta = 1e-6 * CONSTANTS.k_b * t / CONSTANTS.hbar;
    Ok(spec.absorption_g(pol, delta)? * (bose_finite(delta, t) + 0.5))
}

/// Spectral distribution of the photon emission rate, split by channel:
///
/// Γ(ω) = (2πωρ⁰/3)·{ 2·g⊥(ω−Ω)[n₁(ω−Ω) − n₀(ω)] + g∥(ω)[n₁(ω) − n₀(ω)] }
///
/// with ρ⁰ = ω²/π²c³. The removable singularities at ω = 0 and ω = Ω are
/// filled with their analytic limits, so the result is continuous on the
/// whole real line for any response with Im α(ν) = O(ν).
pub fn gamma_spectral_parts(system: &SpinSystem, omega: f64) -> Result<GammaParts> {
    if !omega.is_finite() {
        return Err(Error::Domain(format!("frequency must be finite, got {omega}")));
    }
    let pref = 2.0 * omega.powi(3) / (3.0 * std::f64::consts::PI * CONSTANTS.c.powi(3));
    if pref == 0.0 {
        // ω = 0 exactly (or so small the ω³ prefactor underflows): the ω²
        // zero of the LDOS beats the simple pole of n₀, so Γ → 0.
        return Ok(GammaParts { perp: 0.0, par: 0.0 });
    }
    let nu = omega - system.omega;

    let perp = if nu == 0.0 {
        // ω = Ω: g⊥(0) = 0 kills the n₀ term, and the g·n₁ product is
        // taken through its finite limit.
        pref * 2.0 * g_n_product(&system.spec, Polarization::Perp, nu, system.t1)?
    } else {
        pref * 2.0
            * system.spec.absorption_g(Polarization::Perp, nu)?
            * bose_difference(nu, system.t1, omega, system.t0, system.omega)
    };

    let par = pref
        * system.spec.absorption_g(Polarization::Par, omega)?
        * bose_difference(omega, system.t1, omega, system.t0, 0.0);

    Ok(GammaParts { perp, par })
}

/// Total spectral distribution Γ(ω), s⁻¹ per rad/s.
pub fn gamma_spectral(system: &SpinSystem, omega: f64) -> Result<f64> {
    let parts = gamma_spectral_parts(system, omega)?;
    Ok(parts.perp + parts.par)
}

/// Emission power spectrum dP^rad/dω = ħω[Γ(ω) − Γ(−ω)] for ω > 0,
/// erg per (rad/s) per s.
pub fn emission_spectrum(system: &SpinSystem, omega: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::Domain(format!(
            "emission spectrum is defined for omega > 0, got {omega}"
        )));
    }
    let plus = gamma_spectral(system, omega)?;
    let minus = gamma_spectral(system, -omega)?;
    Ok(CONSTANTS.hbar * omega * (plus - minus))
}

/// A sampled spectrum: strictly increasing frequencies with their values.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralGrid {
    pub omegas: Vec<f64>,
    pub values: Vec<f64>,
}

/// Evaluate the emission spectrum on a caller-supplied grid
/// (strictly increasing, all positive).
pub fn emission_spectrum_grid(system: &SpinSystem, omegas: &[f64]) -> Result<SpectralGrid> {
    if omegas.is_empty() {
        return Err(Error::Validation("empty frequency grid".into()));
    }
    if omegas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Validation(
            "frequency grid must be strictly increasing".into(),
        ));
    }
    let mut values = Vec::with_capacity(omegas.len());
    for &w in omegas {
        values.push(emission_spectrum(system, w)?);
    }
    Ok(SpectralGrid {
        omegas: omegas.to_vec(),
        values,
    })
}

/// Logarithmically spaced grid of `n ≥ 2` points from `lo` to `hi`
/// (inclusive endpoints, both positive).
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0) || !(hi > lo) || !hi.is_finite() {
        return Err(Error::Domain(format!(
            "log grid needs 0 < lo < hi finite, got [{lo}, {hi}]"
        )));
    }
    if n < 2 {
        return Err(Error::Domain(format!("log grid needs n >= 2, got {n}")));
    }
    let (lln, lhn) = (lo.ln(), hi.ln());
    let mut grid: Vec<f64> = (0..n)
        .map(|i| (lln + (lhn - lln) * i as f64 / (n - 1) as f64).exp())
        .collect();
    grid[0] = lo;
    grid[n - 1] = hi;
    Ok(grid)
}

/// Vacuum electromagnetic Green tensor between two points, cm⁻³:
///
/// G_ij = (e^{ikR}/R³)·[(k²R² + ikR − 1)δ_ij − (k²R² + 3ikR − 3)·R_iR_j/R²]
///
/// with k = ω/c and R = r − r′. The coincidence limit diverges in its real
/// part; use [`local_density_of_states`] for the finite imaginary part.
pub fn vacuum_green_tensor(
    r: [f64; 3],
    r_prime: [f64; 3],
    omega: f64,
) -> Result<[[Complex64; 3]; 3]> {
    let rv = [r[0] - r_prime[0], r[1] - r_prime[1], r[2] - r_prime[2]];
    let dist2 = rv[0] * rv[0] + rv[1] * rv[1] + rv[2] * rv[2];
    if dist2 == 0.0 {
        return Err(Error::Singularity(
            "Green tensor coincidence limit: Im G_ii(r,r) = 2k³/3 is exposed as \
             local_density_of_states; the real part diverges"
                .into(),
        ));
    }
    let dist = dist2.sqrt();
    let kr = omega / CONSTANTS.c * dist;
    let phase = Complex64::new(0.0, kr).exp();
    let common = phase / dist.powi(3);
    let diag = Complex64::new(kr * kr - 1.0, kr);
    let trans = Complex64::new(kr * kr - 3.0, 3.0 * kr);
    let mut g = [[Complex64::new(0.0, 0.0); 3]; 3];
    for (i, gi) in g.iter_mut().enumerate() {
        for (j, gij) in gi.iter_mut().enumerate() {
            let delta = if i == j { 1.0 } else { 0.0 };
            *gij = common * (diag * delta - trans * rv[i] * rv[j] / dist2);
        }
    }
    Ok(g)
}

/// Free-space photonic local density of states ρ⁰(ω) = ω²/π²c³,
/// (rad/s)⁻¹·cm⁻³. Isolated as the one extension point a structured
/// electromagnetic environment would replace.
pub fn local_density_of_states(omega: f64) -> f64 {
    omega * omega / (std::f64::consts::PI.powi(2) * CONSTANTS.c.powi(3))
}

/// Fluctuation-dissipation correlator S(ω) = 2ħ[n(ω,T) + 1]·Im χ(ω).
///
/// n + 1 is evaluated as −1/expm1(−ħω/kBT), which keeps full relative
/// precision at negative frequencies where the reflected form −n(|ω|)
/// surrenders its exponentially small value to the −1; detailed balance
/// S(−ω)/S(ω) = e^{−ħω/kBT} then holds to rounding instead of drifting
/// once ħ|ω| outruns kBT.
///
/// The ω = 0 pole of n is returned as a signed infinity matching the sign
/// of Im χ (zero if Im χ = 0), mirroring the classical 2kBT·Im χ/ω limit.
pub fn fdt_correlator(omega: f64, t: f64, im_chi: f64) -> Result<f64> {
    match bose_einstein(omega, t)? {
        BoseValue::Finite(_) => {
            let n_plus_1 = if t == 0.0 {
                // n+1 → θ(ω): full vacuum fluctuations above, none below.
                if omega > 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                -1.0 / (-CONSTANTS.hbar * omega / (CONSTANTS.k_b * t)).exp_m1()
            };
            Ok(2.0 * CONSTANTS.hbar * n_plus_1 * im_chi)
        }
        BoseValue::Pole => Ok(if im_chi == 0.0 {
            0.0
        } else if t == 0.0 {
            // T = 0 removes the pole: n+1 → θ(ω), bounded by Im χ.
            2.0 * CONSTANTS.hbar * im_chi
        } else {
            f64::INFINITY * im_chi.signum()
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::MaterialModel;
    use approx::assert_relative_eq;

    fn drude_system(t0: f64, t1: f64, omega: f64) -> SpinSystem {
        let geometry = ParticleGeometry::sphere(1e-6, 2.26).unwrap();
        let spec = PolarizabilitySpec::drude_asymptotic(&geometry, 2.0671e14).unwrap();
        SpinSystem::new(geometry, spec, t0, t1, omega).unwrap()
    }

    #[test]
    fn occupation_difference_survives_tiny_shifts() {
        // At x₀ = ħω/(kB·T) = 1 with a relative shift of 1e-12 the bracket
        // equals −shift·dn/dω to 1e-12, far below the ~1e-4 noise a direct
        // f64 subtraction of the two occupations would leave behind.
        let t = 100.0;
        let omega = CONSTANTS.k_b * t / CONSTANTS.hbar;
        let shift = 1e-12 * omega;
        let got = bose_difference(omega - shift, t, omega, t, shift);
        let d = CONSTANTS.hbar * shift / (CONSTANTS.k_b * t);
        let expected = d * 1.0f64.exp() / 1.0f64.exp_m1().powi(2);
        assert_relative_eq!(got, expected, max_relative = 1e-9);
    }

    #[test]
    fn occupation_difference_vanishes_identically_at_equal_temperatures() {
        // No shift, equal temperatures: the parallel-channel bracket must be
        // an exact zero, not a rounding residue.
        assert_eq!(bose_difference(3.0e13, 250.0, 3.0e13, 250.0, 0.0), 0.0);
    }

    #[test]
    fn occupation_difference_matches_direct_form_when_it_is_safe() {
        // Well-separated arguments: the stable identity and the direct
        // subtraction must agree; only near-equal regimes set them apart.
        for (nu, t1, omega, t0) in [
            (-4.0e13, 120.0, 1.0e13, 340.0),
            (2.0e13, 80.0, 5.0e13, 80.0),
            (-7.0e13, 50.0, -4.0e13, 200.0),
        ] {
            let got = bose_difference(nu, t1, omega, t0, omega - nu);
            let direct = bose_finite(nu, t1) - bose_finite(omega, t0);
            assert_relative_eq!(got, direct, max_relative = 1e-12);
        }
    }

    #[test]
    fn bose_reference_point() {
        // ħω = kB·T → n = 1/(e − 1).
        let t = 300.0;
        let omega = CONSTANTS.k_b * t / CONSTANTS.hbar;
        let n = bose_einstein(omega, t).unwrap().finite().unwrap();
        assert_relative_eq!(n, 0.581_976_706_869_326, max_relative = 1e-12);
    }

    #[test]
    fn bose_limits_and_pole() {
        assert_eq!(bose_einstein(1e12, 0.0).unwrap(), BoseValue::Finite(0.0));
        assert_eq!(bose_einstein(-1e12, 0.0).unwrap(), BoseValue::Finite(-1.0));
        assert_eq!(bose_einstein(0.0, 5.0).unwrap(), BoseValue::Pole);
        assert_eq!(bose_einstein(0.0, 0.0).unwrap(), BoseValue::Pole);
        assert!(bose_einstein(1.0, -1.0).is_err());
        assert!(bose_einstein(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn bose_small_argument_keeps_relative_accuracy() {
        // n(x) = 1/x − 1/2 + x/12 + O(x³) for x = ħω/kBT.
        let t = 1.0;
        let x = 1e-6;
        let omega = x * CONSTANTS.k_b * t / CONSTANTS.hbar;
        let n = bose_einstein(omega, t).unwrap().finite().unwrap();
        let series = 1.0 / x - 0.5 + x / 12.0;
        assert_relative_eq!(n, series, max_relative = 1e-10);
    }

    #[test]
    fn bose_reflection_identity() {
        let t = 77.0;
        for &omega in &[1e9, 3.3e11, 7e12, 4e14] {
            let n_plus = bose_einstein(omega, t).unwrap().finite().unwrap();
            let n_minus = bose_einstein(-omega, t).unwrap().finite().unwrap();
            assert_relative_eq!(n_minus, -1.0 - n_plus, max_relative = 1e-12);
        }
    }

    #[test]
    fn detailed_balance_kills_gamma() {
        // Ω = 0 and T0 = T1: emission and absorption cancel identically.
        let system = drude_system(150.0, 150.0, 0.0);
        for &w in &[1e10, -3e11, 5.5e12, 1e14] {
            assert_eq!(gamma_spectral(&system, w).unwrap(), 0.0);
        }
    }

    #[test]
    fn zero_temperature_support_is_zero_to_big_omega() {
        let big = 1e12;
        let system = drude_system(0.0, 0.0, big);
        // Outside (0, Ω) the distribution vanishes...
        for &w in &[-2.0 * big, -0.3 * big, big, 1.5 * big, 4.0 * big] {
            assert_eq!(gamma_spectral(&system, w).unwrap(), 0.0);
        }
        // ...inside it is strictly positive (photon generation below Ω).
        for &w in &[0.1 * big, 0.5 * big, 0.9 * big] {
            assert!(gamma_spectral(&system, w).unwrap() > 0.0);
        }
    }

    #[test]
    fn gamma_symbolic_oracle_at_half_big_omega() {
        // T0 = T1 = 0, ω = Ω/2: only the perp channel survives and every
        // factor is elementary.
        let a = 1e-6_f64;
        let sigma0 = 2.0671e14;
        let big = 1e12;
        let system = drude_system(0.0, 0.0, big);
        let w = big / 2.0;
        let rho0 = w * w / (std::f64::consts::PI.powi(2) * CONSTANTS.c.powi(3));
        let pref = 2.0 * std::f64::consts::PI * w * rho0 / 3.0;
        let symbolic =
            pref * 2.0 * (3.0 * (big / 2.0) * a.powi(3) / (4.0 * std::f64::consts::PI * sigma0));
        let code = gamma_spectral(&system, w).unwrap();
        assert_relative_eq!(code, symbolic, max_relative = 1e-12);
    }

    #[test]
    fn gamma_is_continuous_at_removable_points() {
        let big = 7.7e11;
        let system = drude_system(40.0, 90.0, big);
        // At ω = Ω the g⊥·n₁ product is filled by continuity.
        let at = gamma_spectral(&system, big).unwrap();
        let eps = 1e-7 * big;
        let left = gamma_spectral(&system, big - eps).unwrap();
        let right = gamma_spectral(&system, big + eps).unwrap();
        assert_relative_eq!(at, 0.5 * (left + right), max_relative = 1e-5);
        // At ω = 0 the distribution vanishes like ω².
        assert_eq!(gamma_spectral(&system, 0.0).unwrap(), 0.0);
        let near = gamma_spectral(&system, 1e-9 * big).unwrap();
        assert!(near.abs() < at.abs());
    }

    #[test]
    fn static_spectrum_matches_planck_like_form() {
        // Ω = 0, T0 = 0 < T1: dP/dω = (3ħa³/π²c³σ0)·ω⁵·n₁(ω).
        let a = 1e-6_f64;
        let sigma0 = 2.0671e14;
        let t1 = 120.0;
        let system = drude_system(0.0, t1, 0.0);
        for &x in &[0.4, 1.0, 3.0, 7.5] {
            let w = x * CONSTANTS.k_b * t1 / CONSTANTS.hbar;
            let n1 = bose_einstein(w, t1).unwrap().finite().unwrap();
            let expected = 3.0 * CONSTANTS.hbar * a.powi(3)
                / (std::f64::consts::PI.powi(2) * CONSTANTS.c.powi(3) * sigma0)
                * w.powi(5)
                * n1;
            let got = emission_spectrum(&system, w).unwrap();
            assert_relative_eq!(got, expected, max_relative = 1e-12);
        }
    }

    #[test]
    fn spectrum_drude_homogeneity_degree_five() {
        // dP/dω(λω; λΩ, λT) = λ⁵ · dP/dω(ω; Ω, T) for the asymptotic
        // kernel, whose g is exactly linear.
        let lambda = 2.0;
        let (t0, t1, big) = (30.0, 55.0, 4e11);
        let base = drude_system(t0, t1, big);
        let scaled = drude_system(lambda * t0, lambda * t1, lambda * big);
        let theta0 = base.theta0();
        for k in 0..20 {
            let w = 10f64.powf(-2.0 + 4.0 * k as f64 / 19.0) * theta0;
            let a = emission_spectrum(&base, w).unwrap();
            let b = emission_spectrum(&scaled, lambda * w).unwrap();
            assert_relative_eq!(b, lambda.powi(5) * a, max_relative = 1e-10);
        }
    }

    #[test]
    fn spectrum_grid_checks_and_totals() {
        let system = drude_system(20.0, 35.0, 2e11);
        let omegas = log_grid(1e9, 1e13, 64).unwrap();
        let grid = emission_spectrum_grid(&system, &omegas).unwrap();
        assert_eq!(grid.omegas.len(), grid.values.len());
        assert!(grid.omegas.windows(2).all(|w| w[0] < w[1]));
        assert!(emission_spectrum_grid(&system, &[2.0, 1.0]).is_err());
        assert!(emission_spectrum_grid(&system, &[]).is_err());
        assert!(emission_spectrum(&system, 0.0).is_err());
        assert!(log_grid(0.0, 1.0, 4).is_err());
        assert!(log_grid(1.0, 2.0, 1).is_err());
    }

    #[test]
    fn green_tensor_symmetry_and_reciprocity() {
        let pairs = [
            ([1.0e-4, 2.0e-4, -0.5e-4], [0.0, 0.0, 0.0]),
            ([3.0e-4, -1.0e-4, 2.0e-4], [1.0e-4, 1.0e-4, 1.0e-4]),
        ];
        let omega = 1e13;
        for (r, rp) in pairs {
            let g = vacuum_green_tensor(r, rp, omega).unwrap();
            let h = vacuum_green_tensor(rp, r, omega).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    // G_ij(r, r′) = G_ji(r′, r)
                    assert_relative_eq!(g[i][j].re, h[j][i].re, max_relative = 1e-12);
                    assert_relative_eq!(g[i][j].im, h[j][i].im, max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn green_tensor_near_field_imaginary_part_is_ldos_like() {
        // Im G_ii → 2k³/3 as kR → 0; at kR = 10⁻³ agreement is ~1e-7.
        let omega = 3e12;
        let k = omega / CONSTANTS.c;
        let dist = 1e-3 / k;
        let g = vacuum_green_tensor([dist, 0.0, 0.0], [0.0, 0.0, 0.0], omega).unwrap();
        for i in 0..3 {
            assert_relative_eq!(g[i][i].im, 2.0 * k.powi(3) / 3.0, max_relative = 1e-5);
        }
        // And the identity linking it to the LDOS: Im G_ii = (2π²ω/3)·ρ⁰.
        let via_ldos =
            2.0 * std::f64::consts::PI.powi(2) * omega / 3.0 * local_density_of_states(omega);
        assert_relative_eq!(g[0][0].im, via_ldos, max_relative = 1e-5);
    }

    #[test]
    fn green_tensor_far_field_is_transverse() {
        let omega = 1e13;
        let k = omega / CONSTANTS.c;
        let dist = 1e3 / k;
        // Separation along z: zz is longitudinal, xx transverse.
        let g = vacuum_green_tensor([0.0, 0.0, dist], [0.0, 0.0, 0.0], omega).unwrap();
        let ratio = g[2][2].norm() / g[0][0].norm();
        assert!(ratio < 3e-3, "longitudinal/transverse = {ratio}");
        // Transverse amplitude ~ k²/R.
        assert_relative_eq!(g[0][0].norm(), k * k / dist, max_relative = 1e-2);
    }

    #[test]
    fn green_tensor_coincidence_and_parity() {
        assert!(vacuum_green_tensor([1.0, 2.0, 3.0], [1.0, 2.0, 3.0], 1e12).is_err());
        let r = [2.0e-4, 0.0, 1.0e-4];
        let g_plus = vacuum_green_tensor(r, [0.0; 3], 5e12).unwrap();
        let g_minus = vacuum_green_tensor(r, [0.0; 3], -5e12).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_relative_eq!(g_minus[i][j].re, g_plus[i][j].re, max_relative = 1e-12);
                assert_relative_eq!(g_minus[i][j].im, -g_plus[i][j].im, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn ldos_values() {
        assert_eq!(local_density_of_states(0.0), 0.0);
        let w = 3.3e11;
        assert_relative_eq!(
            local_density_of_states(2.0 * w),
            4.0 * local_density_of_states(w),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            local_density_of_states(1e15),
            3.760_435_5e-3,
            max_relative = 1e-7
        );
    }

    #[test]
    fn fdt_reference_points() {
        // T = 0, ω < 0: the vacuum cannot emit into negative modes.
        assert_eq!(fdt_correlator(-1e12, 0.0, 0.7).unwrap(), 0.0);
        // ħω = kB·T, Im χ = 1 → 2ħ·(n+1) with n = 1/(e−1).
        let t = 100.0;
        let omega = CONSTANTS.k_b * t / CONSTANTS.hbar;
        assert_relative_eq!(
            fdt_correlator(omega, t, 1.0).unwrap(),
            2.0 * CONSTANTS.hbar * 1.581_976_706_869_326,
            max_relative = 1e-12
        );
        // Detailed balance: 2ħ·n·Imχ = e^{−ħω/kBT}·S(ω).
        for &x in &[0.3, 1.0, 4.0] {
            let w = x * CONSTANTS.k_b * t / CONSTANTS.hbar;
            let n = bose_einstein(w, t).unwrap().finite().unwrap();
            let absorb = 2.0 * CONSTANTS.hbar * n * 0.9;
            let emit = fdt_correlator(w, t, 0.9).unwrap();
            assert_relative_eq!(absorb, emit * (-x).exp(), max_relative = 1e-12);
        }
        // Pole marker surfaces as a signed infinity at finite T.
        assert_eq!(fdt_correlator(0.0, 10.0, 1.0).unwrap(), f64::INFINITY);
        assert_eq!(fdt_correlator(0.0, 10.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn advisory_fires_only_outside_dipole_regime() {
        let quiet = drude_system(10.0, 10.0, 1e10);
        assert!(quiet.dipole_advisory().is_none());

        // A 10 µm particle spinning at 3×10¹³ rad/s has Ωa/c ≈ 1.
        let geometry = ParticleGeometry::sphere(1e-3, 2.26).unwrap();
        let spec = PolarizabilitySpec::drude_asymptotic(&geometry, 2.0671e14).unwrap();
        let loud = SpinSystem::new(geometry, spec, 3e4, 10.0, 3e13).unwrap();
        let note = loud.dipole_advisory().unwrap();
        assert!(note.contains("Omega*a/c"));
        assert!(note.contains("T0"));
    }

    #[test]
    fn system_validation() {
        let geometry = ParticleGeometry::sphere(1e-6, 2.26).unwrap();
        let spec = PolarizabilitySpec::drude_asymptotic(&geometry, 1e14).unwrap();
        assert!(SpinSystem::new(geometry, spec.clone(), -1.0, 0.0, 0.0).is_err());
        assert!(SpinSystem::new(geometry, spec.clone(), 0.0, f64::NAN, 0.0).is_err());
        assert!(SpinSystem::new(geometry, spec, 0.0, 0.0, -5.0).is_err());
    }

    #[test]
    fn tabulated_material_feeds_gamma() {
        // A synthesized Drude table must reproduce the analytic Drude Γ
        // closely (interpolation error only).
        let sigma0 = 2.0671e14;
        let table = crate::material::synthesize_drude_table(sigma0, 1e-6, 1.0, 400).unwrap();
        let geometry = ParticleGeometry::sphere(1e-6, 2.26).unwrap();
        let tab_spec = PolarizabilitySpec::from_material(
            &MaterialModel::tabulated(vec![(table, 1.0)]).unwrap(),
            &geometry,
            false,
        )
        .unwrap();
        let drude_spec = PolarizabilitySpec::from_material(
            &MaterialModel::drude(sigma0).unwrap(),
            &geometry,
            false,
        )
        .unwrap();
        let sys_tab = SpinSystem::new(geometry, tab_spec, 30.0, 60.0, 5e11).unwrap();
        let sys_drude = SpinSystem::new(geometry, drude_spec, 30.0, 60.0, 5e11).unwrap();
        for &w in &[3e11, 8e11, -4e11] {
            let a = gamma_spectral(&sys_tab, w).unwrap();
            let b = gamma_spectral(&sys_drude, w).unwrap();
            // The Drude ε is log-log linear, so interpolation is exact up
            // to rounding.
            assert_relative_eq!(a, b, max_relative = 1e-9);
        }
    }
}
