//! Physical constants and the single conversion layer into the internal unit
//! system.
//!
//! Internally ħ = 1 and every energy is carried as an angular frequency in
//! rad/ns ("angular GHz"). Lumped-element inputs stay in SI until they cross
//! this boundary.

use std::f64::consts::PI;

/// Elementary charge (C), exact SI value.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Planck constant (J s), exact SI value.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant (J s).
pub const HBAR: f64 = PLANCK / (2.0 * PI);
/// Resistance quantum h/e² (Ω).
pub const RESISTANCE_QUANTUM: f64 = PLANCK / (ELEMENTARY_CHARGE * ELEMENTARY_CHARGE);
/// Reduced flux quantum ħ/2e (Wb).
pub const REDUCED_FLUX_QUANTUM: f64 = HBAR / (2.0 * ELEMENTARY_CHARGE);
/// Characteristic impedance assumed for the transmission line (Ω).
pub const LINE_IMPEDANCE: f64 = 50.0;

/// Energy in joules to angular frequency in rad/ns.
pub fn joule_to_angular_ghz(energy: f64) -> f64 {
    energy / HBAR * 1e-9
}

/// Angular frequency in rad/ns back to joules.
pub fn angular_ghz_to_joule(omega: f64) -> f64 {
    omega * 1e9 * HBAR
}

/// Ordinary frequency E/h in GHz to angular frequency in rad/ns.
pub fn ghz_to_angular(freq: f64) -> f64 {
    2.0 * PI * freq
}

/// Angular frequency in rad/s to rad/ns.
pub fn per_second_to_angular_ghz(omega: f64) -> f64 {
    omega * 1e-9
}
