//! Single fluxonium at the flux sweet spot: H = 4 E_CJ N² + (E_LJ/2) φ² + E_J cos φ.
//!
//! The inductive shunt makes the phase non-compact, so the operator is
//! discretized on a uniform flux grid with hard walls and N = -i d/dφ
//! represented by central second differences. Every solve is repeated on a
//! grid with half the spacing; reported energies and the flux matrix element
//! are Richardson-extrapolated from the pair, and the level shift between
//! the two grids is kept as the convergence estimate.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::tridiag::SymTridiagonal;

/// Anharmonicity ratio below which the two-level reduction is flagged.
pub const ANHARMONICITY_THRESHOLD: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxoniumSpec {
    pub e_j: f64,
    pub e_cj: f64,
    pub e_lj: f64,
    /// Grid spans [-grid_half_width, grid_half_width].
    pub grid_half_width: f64,
    /// Odd, so that φ = 0 is a grid point.
    pub grid_points: usize,
    /// Largest tolerated level shift between the two grids, relative to E1 - E0.
    pub max_level_shift: f64,
}

impl FluxoniumSpec {
    /// Default grid: 801 points on ±6π.
    pub fn new(e_j: f64, e_cj: f64, e_lj: f64) -> Self {
        Self {
            e_j,
            e_cj,
            e_lj,
            grid_half_width: 6.0 * PI,
            grid_points: 801,
            max_level_shift: 1e-2,
        }
    }

    pub fn with_grid(mut self, half_width: f64, points: usize) -> Self {
        self.grid_half_width = half_width;
        self.grid_points = points;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e_j.is_finite() && self.e_j >= 0.0) {
            return domain(format!("E_J must be non-negative, got {}", self.e_j));
        }
        if !(self.e_cj > 0.0 && self.e_lj > 0.0) {
            return domain("E_CJ and E_LJ must be positive");
        }
        if self.grid_points < 201 || self.grid_points % 2 == 0 {
            return domain(format!(
                "grid_points must be odd and >= 201, got {}",
                self.grid_points
            ));
        }
        if !(self.grid_half_width >= 4.0 * PI) {
            return domain(format!(
                "grid_half_width must be >= 4π, got {}",
                self.grid_half_width
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluxoniumLevels {
    /// Ascending eigenvalues (extrapolated).
    pub energies: Vec<f64>,
    /// |<0|φ|1>| (extrapolated).
    pub phi01: f64,
    /// E1 - E0.
    pub omega_f: f64,
    /// <0|φ|0> on the base grid; zero for the symmetric potential.
    pub phi00: f64,
    /// Largest level shift between the M and 2M-1 point grids.
    pub grid_shift: f64,
    /// Flux grid of the base solve.
    pub grid: Vec<f64>,
    /// Eigenfunctions on `grid`, normalized so that Σ|ψ|² Δφ = 1.
    pub wavefunctions: Vec<Vec<f64>>,
}

struct GridSolution {
    energies: Vec<f64>,
    phi01: f64,
    phi00: f64,
    grid: Vec<f64>,
    wavefunctions: Vec<Vec<f64>>,
}

fn solve_on_grid(spec: &FluxoniumSpec, points: usize, n_levels: usize) -> GridSolution {
    let half = spec.grid_half_width;
    let h = 2.0 * half / (points - 1) as f64;
    let grid: Vec<f64> = (0..points).map(|m| -half + m as f64 * h).collect();
    let kinetic = 4.0 * spec.e_cj / (h * h);
    let diag: Vec<f64> = grid
        .iter()
        .map(|&phi| 2.0 * kinetic + 0.5 * spec.e_lj * phi * phi + spec.e_j * phi.cos())
        .collect();
    let off = vec![-kinetic; points - 1];
    let (energies, mut vectors) = SymTridiagonal::new(&diag, &off).lowest_eigenpairs(n_levels);
    let inv_sqrt_h = 1.0 / h.sqrt();
    for v in vectors.iter_mut() {
        // Fix sign so the largest lobe is positive; then scale to grid normalization.
        let peak = v.iter().copied().fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        let sign = if peak < 0.0 { -1.0 } else { 1.0 };
        v.iter_mut().for_each(|x| *x *= sign * inv_sqrt_h);
    }
    let moment = |a: &[f64], b: &[f64]| -> f64 {
        a.iter().zip(b).zip(&grid).map(|((x, y), phi)| x * phi * y).sum::<f64>() * h
    };
    let phi01 = moment(&vectors[0], &vectors[1]).abs();
    let phi00 = moment(&vectors[0], &vectors[0]);
    GridSolution {
        energies,
        phi01,
        phi00,
        grid,
        wavefunctions: vectors,
    }
}

pub fn solve_levels(spec: &FluxoniumSpec, n_levels: usize) -> Result<FluxoniumLevels> {
    spec.validate()?;
    if n_levels < 2 {
        return domain("n_levels must be at least 2");
    }
    let coarse = solve_on_grid(spec, spec.grid_points, n_levels);
    let fine = solve_on_grid(spec, 2 * spec.grid_points - 1, n_levels);
    // Second-difference error is O(h²); halving h allows one Richardson step.
    let extrapolate = |c: f64, f: f64| (4.0 * f - c) / 3.0;
    let energies: Vec<f64> = coarse
        .energies
        .iter()
        .zip(&fine.energies)
        .map(|(&c, &f)| extrapolate(c, f))
        .collect();
    let omega_f = energies[1] - energies[0];
    let grid_shift = coarse
        .energies
        .iter()
        .zip(&fine.energies)
        .map(|(c, f)| (c - f).abs())
        .fold(0.0, f64::max);
    if !(omega_f > 0.0) || grid_shift > spec.max_level_shift * omega_f {
        return Err(Error::NotConverged {
            iterations: 2,
            residuals: vec![grid_shift],
            detail: format!(
                "level shift {grid_shift:.3e} between grids exceeds {:.1e} x omega_F ({omega_f:.3e})",
                spec.max_level_shift
            ),
        });
    }
    Ok(FluxoniumLevels {
        energies,
        phi01: extrapolate(coarse.phi01, fine.phi01),
        omega_f,
        phi00: coarse.phi00,
        grid_shift,
        grid: coarse.grid,
        wavefunctions: coarse.wavefunctions,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelReduction {
    pub omega_f: f64,
    pub phi01: f64,
    /// (E2 - E1) / (E1 - E0).
    pub anharmonicity: f64,
    /// Raised when the anharmonicity is below [`ANHARMONICITY_THRESHOLD`].
    pub weakly_anharmonic: bool,
}

pub fn two_level_reduction(levels: &FluxoniumLevels) -> Result<TwoLevelReduction> {
    if levels.energies.len() < 3 {
        return domain(format!(
            "two-level reduction needs at least 3 levels, got {}",
            levels.energies.len()
        ));
    }
    let e = &levels.energies;
    let anharmonicity = (e[2] - e[1]) / (e[1] - e[0]);
    Ok(TwoLevelReduction {
        omega_f: levels.omega_f,
        phi01: levels.phi01,
        anharmonicity,
        weakly_anharmonic: anharmonicity < ANHARMONICITY_THRESHOLD,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inset_point() -> FluxoniumSpec {
        FluxoniumSpec::new(1.0, 1.0 / 3.0, 1.0 / 20.0)
    }

    #[test]
    fn oscillator_limit() {
        let (ec, el) = (0.4, 0.07);
        let levels = solve_levels(&FluxoniumSpec::new(0.0, ec, el), 4).unwrap();
        let w = (8.0 * ec * el).sqrt();
        assert!((levels.omega_f - w).abs() / w < 1e-6);
        let zpf = 2f64.powf(0.25) * (ec / el).powf(0.25);
        assert!((levels.phi01 - zpf).abs() / zpf < 1e-6);
        let red = two_level_reduction(&levels).unwrap();
        assert!((red.anharmonicity - 1.0).abs() < 1e-5);
        assert!(red.weakly_anharmonic);
    }

    #[test]
    fn double_well_inset_parameters() {
        let levels = solve_levels(&inset_point(), 4).unwrap();
        assert!((levels.phi01 - PI).abs() / PI < 0.1, "phi01 = {}", levels.phi01);
        assert!(levels.phi00.abs() < 1e-8);
        let red = two_level_reduction(&levels).unwrap();
        assert!(!red.weakly_anharmonic, "anharmonicity {}", red.anharmonicity);
    }

    #[test]
    fn wavefunctions_are_normalized() {
        let levels = solve_levels(&inset_point(), 3).unwrap();
        let h = levels.grid[1] - levels.grid[0];
        for psi in &levels.wavefunctions {
            let norm: f64 = psi.iter().map(|x| x * x).sum::<f64>() * h;
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn doubling_box_keeps_omega_f() {
        let spec = inset_point();
        let wide = spec.with_grid(2.0 * spec.grid_half_width, 2 * spec.grid_points - 1);
        let a = solve_levels(&spec, 3).unwrap();
        let b = solve_levels(&wide, 3).unwrap();
        assert!((a.omega_f - b.omega_f).abs() / a.omega_f < 1e-8);
    }

    #[test]
    fn rejects_bad_grids_and_level_counts() {
        let spec = inset_point();
        assert!(solve_levels(&spec.with_grid(6.0 * PI, 800), 3).is_err());
        assert!(solve_levels(&spec.with_grid(6.0 * PI, 101), 3).is_err());
        assert!(solve_levels(&spec.with_grid(PI, 801), 3).is_err());
        assert!(solve_levels(&spec, 1).is_err());
        let two = solve_levels(&spec, 2).unwrap();
        assert!(two_level_reduction(&two).is_err());
    }

    #[test]
    fn coarse_grid_reports_non_convergence() {
        let mut spec = inset_point().with_grid(6.0 * PI, 201);
        spec.max_level_shift = 1e-6;
        assert!(matches!(solve_levels(&spec, 3), Err(Error::NotConverged { .. })));
    }

    #[test]
    fn phi01_approaches_oscillator_value_as_ej_shrinks() {
        let (ec, el): (f64, f64) = (1.0 / 3.0, 0.05);
        let zpf = 2f64.powf(0.25) * (ec / el).powf(0.25);
        let mut last = f64::INFINITY;
        for i in 0..8 {
            let ej = 1.0 * (1.0 - i as f64 / 8.0);
            let p = solve_levels(&FluxoniumSpec::new(ej, ec, el), 2).unwrap().phi01;
            assert!(p < last + 1e-12);
            assert!(p >= zpf - 1e-6);
            last = p;
        }
    }
}
