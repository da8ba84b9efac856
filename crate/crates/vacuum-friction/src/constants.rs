//! Physical constants and the unit conversions used at I/O boundaries.
//!
//! All internal computation is carried out in Gaussian-CGS units (erg, cm,
//! s, statvolt...); SI, electron-volts, and kelvin appear only at the edges.
//! Conversions therefore live here and nowhere else.

use crate::error::{Error, Result};

/// Fundamental constants in Gaussian-CGS units (CODATA 2018).
#[derive(Debug, Clone, Copy)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, erg·s.
    pub hbar: f64,
    /// Speed of light, cm/s.
    pub c: f64,
    /// Boltzmann constant, erg/K.
    pub k_b: f64,
    /// Coulomb force constant (4πε₀)⁻¹ in SI, N·m²/C²; used only to map
    /// SI conductivity (S/m) onto its Gaussian equivalent (s⁻¹).
    pub coulomb_factor: f64,
    /// Electron-volt in erg.
    pub ev_to_erg: f64,
    /// Julian year in seconds.
    pub year_to_s: f64,
}

/// The one immutable constants instance used throughout the library.
pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    hbar: 1.054_571_817e-27,
    c: 2.997_924_58e10,
    k_b: 1.380_649e-16,
    coulomb_factor: 8.987_551_792_3e9,
    ev_to_erg: 1.602_176_634e-12,
    year_to_s: 3.155_76e7,
};

/// erg → joule (and erg/s → watt).
pub const ERG_TO_JOULE: f64 = 1.0e-7;
/// dyn·cm → N·m.
pub const DYN_CM_TO_N_M: f64 = 1.0e-7;
/// nanometre → centimetre.
pub const NM_TO_CM: f64 = 1.0e-7;

/// Thermal angular frequency θ = 2π·k_B·T/ħ of a bath at temperature `t` (K).
///
/// This is the natural frequency scale of thermal photons; most spectral
/// structure in this library lives at ω of order θ.
pub fn thermal_angular_frequency(t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!(
            "temperature must be non-negative, got {t}"
        )));
    }
    Ok(2.0 * std::f64::consts::PI * CONSTANTS.k_b * t / CONSTANTS.hbar)
}

/// Convert a DC conductivity from SI (S/m) to Gaussian units (s⁻¹).
pub fn conductivity_si_to_gaussian(sigma_si: f64) -> Result<f64> {
    if !(sigma_si >= 0.0) {
        return Err(Error::Domain(format!(
            "conductivity must be non-negative, got {sigma_si}"
        )));
    }
    Ok(sigma_si * CONSTANTS.coulomb_factor)
}

/// Convert a DC conductivity from Gaussian units (s⁻¹) back to SI (S/m).
pub fn conductivity_gaussian_to_si(sigma: f64) -> Result<f64> {
    if !(sigma >= 0.0) {
        return Err(Error::Domain(format!(
            "conductivity must be non-negative, got {sigma}"
        )));
    }
    Ok(sigma / CONSTANTS.coulomb_factor)
}

/// Convert a photon energy in eV to an angular frequency in rad/s.
pub fn photon_energy_to_angular_frequency(e_ev: f64) -> Result<f64> {
    if !(e_ev >= 0.0) {
        return Err(Error::Domain(format!(
            "photon energy must be non-negative, got {e_ev}"
        )));
    }
    Ok(e_ev * CONSTANTS.ev_to_erg / CONSTANTS.hbar)
}

/// Convert an angular frequency in rad/s to a photon energy in eV.
pub fn angular_frequency_to_photon_energy(omega: f64) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::Domain(format!(
            "angular frequency must be non-negative, got {omega}"
        )));
    }
    Ok(omega * CONSTANTS.hbar / CONSTANTS.ev_to_erg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn thermal_frequency_zero_and_one_kelvin() {
        assert_eq!(thermal_angular_frequency(0.0).unwrap(), 0.0);
        // 2π·k_B/ħ per kelvin.
        assert_relative_eq!(
            thermal_angular_frequency(1.0).unwrap(),
            8.225_967_517_177e11,
            max_relative = 1e-12
        );
        // k_B·T/ħ at 1 K ≈ 2π × 20.8 GHz.
        let f_hz = CONSTANTS.k_b / CONSTANTS.hbar / (2.0 * std::f64::consts::PI);
        assert_relative_eq!(f_hz, 20.836_619e9, max_relative = 1e-6);
    }

    #[test]
    fn thermal_frequency_rejects_negative() {
        assert!(thermal_angular_frequency(-1.0).is_err());
    }

    #[test]
    fn thermal_frequency_is_linear() {
        for &a in &[0.5, 2.0, 17.0, 1e6] {
            let lhs = thermal_angular_frequency(a * 3.1).unwrap();
            let rhs = a * thermal_angular_frequency(3.1).unwrap();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-14);
        }
    }

    #[test]
    fn conductivity_conversion_values() {
        assert_eq!(conductivity_si_to_gaussian(0.0).unwrap(), 0.0);
        assert_relative_eq!(
            conductivity_si_to_gaussian(2.0e5).unwrap(),
            1.797_510_358_46e15,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            conductivity_si_to_gaussian(2.3e4).unwrap(),
            2.067_136_912_229e14,
            max_relative = 1e-10
        );
        assert!(conductivity_si_to_gaussian(-1.0).is_err());
    }

    #[test]
    fn conductivity_round_trip() {
        for &s in &[1e-3, 1.0, 2.3e4, 2.0e5, 6.0e7] {
            let back = conductivity_gaussian_to_si(conductivity_si_to_gaussian(s).unwrap()).unwrap();
            assert_relative_eq!(back, s, max_relative = 1e-12);
        }
    }

    #[test]
    fn photon_energy_conversion_values() {
        assert_eq!(photon_energy_to_angular_frequency(0.0).unwrap(), 0.0);
        assert_relative_eq!(
            photon_energy_to_angular_frequency(1.0).unwrap(),
            1.519_267_448_81e15,
            max_relative = 1e-9
        );
        // 10 meV: the scale where interband features typically set in.
        assert_relative_eq!(
            photon_energy_to_angular_frequency(1.0e-2).unwrap(),
            1.519_267_448_81e13,
            max_relative = 1e-9
        );
        let back = angular_frequency_to_photon_energy(1.519_267_448_81e15).unwrap();
        assert_relative_eq!(back, 1.0, max_relative = 1e-9);
    }
}
