//! Lumped-element circuit of one chain cell and the effective constants it
//! induces after eliminating the node flux between `L1` and `L2`.
//!
//! Inputs are SI (henry, farad, metre) except the junction energies, which are
//! given as ordinary frequencies E/h in GHz. Every energy-like output is an
//! angular frequency in rad/ns (see [`crate::units`]).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::units::{
    angular_ghz_to_joule, ghz_to_angular, joule_to_angular_ghz, per_second_to_angular_ghz,
    ELEMENTARY_CHARGE, HBAR, LINE_IMPEDANCE, REDUCED_FLUX_QUANTUM, RESISTANCE_QUANTUM,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawCircuit {
    /// Coupling inductance shared with the resonator (H).
    #[serde(rename = "L1")]
    pub l1: f64,
    /// Inductance between the coupling node and the junction (H).
    #[serde(rename = "L2")]
    pub l2: f64,
    /// Resonator inductance per unit length (H/m).
    pub l_r: f64,
    /// Resonator capacitance per unit length (F/m).
    pub c_r: f64,
    /// Cell length (m).
    pub a: f64,
    /// Number of atoms; the resonator length is `N * a`.
    #[serde(rename = "N")]
    pub n_atoms: usize,
    /// Josephson energy as E/h (GHz).
    #[serde(rename = "E_J")]
    pub e_j: f64,
    /// Junction charging energy as E/h (GHz).
    #[serde(rename = "E_CJ")]
    pub e_cj: f64,
}

impl RawCircuit {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("L1", self.l1),
            ("L2", self.l2),
            ("l_r", self.l_r),
            ("c_r", self.c_r),
            ("a", self.a),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return domain(format!("{name} must be finite and positive, got {value}"));
            }
        }
        if self.n_atoms < 1 {
            return domain("N must be at least 1");
        }
        for (name, value) in [("E_J", self.e_j), ("E_CJ", self.e_cj)] {
            if !(value.is_finite() && value >= 0.0) {
                return domain(format!("{name} must be finite and non-negative, got {value}"));
            }
        }
        Ok(())
    }

    /// Resonator length `d = N a`.
    pub fn length(&self) -> f64 {
        self.n_atoms as f64 * self.a
    }

    /// Cell inductance `L_r = a l_r`.
    pub fn cell_inductance(&self) -> f64 {
        self.a * self.l_r
    }

    /// Cell capacitance `C_r = a c_r`.
    pub fn cell_capacitance(&self) -> f64 {
        self.a * self.c_r
    }

    /// Characteristic impedance of the bare line, sqrt(l_r / c_r).
    pub fn line_impedance(&self) -> f64 {
        (self.l_r / self.c_r).sqrt()
    }

    /// Josephson energy in rad/ns.
    pub fn josephson_energy(&self) -> f64 {
        ghz_to_angular(self.e_j)
    }

    /// Junction charging energy in rad/ns.
    pub fn junction_charging_energy(&self) -> f64 {
        ghz_to_angular(self.e_cj)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    /// Resonator inductive energy (rad/ns).
    #[serde(rename = "E_Lr")]
    pub e_lr: f64,
    /// Fluxonium inductive energy (rad/ns).
    #[serde(rename = "E_LJ")]
    pub e_lj: f64,
    /// Coupling magnitude between resonator flux differences and junction flux (rad/ns).
    #[serde(rename = "G")]
    pub g: f64,
    /// Resonator cell charging energy e²/2C_r (rad/ns).
    #[serde(rename = "E_Cr")]
    pub e_cr: f64,
    /// Renormalized inductance per unit length (H/m).
    pub l_r_renorm: f64,
    /// Branching ratio controlling Ω_1/ω_1.
    pub chi: f64,
}

pub fn derive_constants(raw: &RawCircuit) -> Result<DerivedConstants> {
    raw.validate()?;
    let (l1, l2) = (raw.l1, raw.l2);
    let lr = raw.cell_inductance();
    let denom = l1 * lr + l1 * l2 + l2 * lr;
    let flux2 = REDUCED_FLUX_QUANTUM * REDUCED_FLUX_QUANTUM;
    let e_cr = ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (2.0 * raw.cell_capacitance());
    Ok(DerivedConstants {
        e_lr: joule_to_angular_ghz(flux2 * (l1 + l2) / denom),
        e_lj: joule_to_angular_ghz(flux2 * (l1 + lr) / denom),
        g: joule_to_angular_ghz(flux2 * l1 / denom),
        e_cr: joule_to_angular_ghz(e_cr),
        l_r_renorm: raw.l_r * (l1 + l2 + l2 * l1 / lr) / (l1 + l2),
        chi: branching_ratio(l1, l2, lr),
    })
}

/// `(L_r / (L1 L_r + L1 L2 + L2 L_r))^{1/4} L1 / (L1 + L2)^{3/4}`.
pub fn branching_ratio(l1: f64, l2: f64, lr: f64) -> f64 {
    let denom = l1 * lr + l1 * l2 + l2 * lr;
    (lr / denom).powf(0.25) * l1 / (l1 + l2).powf(0.75)
}

fn check_mode(k: usize, raw: &RawCircuit) -> Result<()> {
    if k < 1 || k > raw.n_atoms {
        return domain(format!(
            "mode index {k} outside 1..={} (Bragg modes excluded)",
            raw.n_atoms
        ));
    }
    Ok(())
}

/// Angular frequency of resonator mode `k` (rad/ns), linear in `k`.
pub fn mode_frequency(k: usize, c: &DerivedConstants, raw: &RawCircuit) -> Result<f64> {
    check_mode(k, raw)?;
    let ka_over_d = k as f64 * PI * raw.a / raw.length();
    Ok(ka_over_d * (8.0 * c.e_cr * c.e_lr).sqrt())
}

/// Collective vacuum Rabi frequency Ω_k (rad/ns) for flux matrix element `phi01`.
///
/// Modes below `N` carry the sin(kπa/2d) profile factor; the zone-edge mode
/// `k = N` couples to the staggered collective excitation and has its own
/// normalization.
pub fn vacuum_rabi(k: usize, c: &DerivedConstants, raw: &RawCircuit, phi01: f64) -> Result<f64> {
    check_mode(k, raw)?;
    if !(phi01.is_finite() && phi01 >= 0.0) {
        return domain(format!("phi01 must be non-negative, got {phi01}"));
    }
    let omega_si = mode_frequency(k, c, raw)? * 1e9;
    let g_si = angular_ghz_to_joule(c.g);
    let d = raw.length();
    let n = raw.n_atoms as f64;
    let prefactor = g_si * (4.0 * ELEMENTARY_CHARGE / HBAR) * phi01 / omega_si;
    let energy = if k < raw.n_atoms {
        let profile = (k as f64 * PI * raw.a / (2.0 * d)).sin();
        prefactor * profile * (HBAR * omega_si * n / (2.0 * d * raw.c_r)).sqrt()
    } else {
        prefactor * (HBAR * omega_si * n / (d * raw.c_r)).sqrt()
    };
    Ok(per_second_to_angular_ghz(energy / HBAR))
}

/// Finite-size profile factor μ = sin(πa/2d) / (πa/2d), kept exact.
pub fn profile_factor(raw: &RawCircuit) -> f64 {
    let x = PI * raw.a / (2.0 * raw.length());
    x.sin() / x
}

/// ν = φ01 / 4π.
pub fn flux_factor(phi01: f64) -> f64 {
    phi01 / (4.0 * PI)
}

/// Ω_1/ω_1 = sqrt(R_K / Z_r) μ ν χ sqrt(N) with Z_r fixed at 50 Ω.
pub fn coupling_estimate(chi: f64, n_atoms: usize, mu: f64, nu: f64) -> Result<f64> {
    coupling_estimate_with_impedance(chi, n_atoms, mu, nu, LINE_IMPEDANCE)
}

/// [`coupling_estimate`] for an arbitrary line impedance `z_r` (Ω).
pub fn coupling_estimate_with_impedance(
    chi: f64,
    n_atoms: usize,
    mu: f64,
    nu: f64,
    z_r: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&chi) {
        return domain(format!("chi must lie in [0, 1], got {chi}"));
    }
    if n_atoms < 1 {
        return domain("N must be at least 1");
    }
    if !(z_r > 0.0) {
        return domain(format!("line impedance must be positive, got {z_r}"));
    }
    Ok((RESISTANCE_QUANTUM / z_r).sqrt() * mu * nu * chi * (n_atoms as f64).sqrt())
}
