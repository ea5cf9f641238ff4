//! Bosonized normal-phase description: each resonator mode `k` couples to the
//! collective atomic excitation with the same spatial symmetry, giving an
//! independent 4×4 Bogoliubov problem per mode in the basis
//! (a_k, b_k, a_k†, b_k†).

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopfieldBlock {
    pub omega_k: f64,
    pub omega_f: f64,
    /// Collective vacuum Rabi frequency Ω_k.
    pub rabi: f64,
}

impl HopfieldBlock {
    pub fn new(omega_k: f64, omega_f: f64, rabi: f64) -> Result<Self> {
        let block = Self {
            omega_k,
            omega_f,
            rabi,
        };
        block.validate()?;
        Ok(block)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_k > 0.0 && self.omega_f > 0.0) {
            return domain("omega_k and omega_F must be positive");
        }
        if !(self.rabi.is_finite() && self.rabi >= 0.0) {
            return domain(format!("Omega_k must be non-negative, got {}", self.rabi));
        }
        Ok(())
    }

    pub fn with_rabi(self, rabi: f64) -> Self {
        Self { rabi, ..self }
    }
}

/// Bogoliubov metric diag(1, 1, -1, -1).
pub const METRIC: [f64; 4] = [1.0, 1.0, -1.0, -1.0];

/// Dynamical generator M_k; its eigenvalues are ±ω_- and ±ω_+.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovMatrix(pub [[c64; 4]; 4]);

impl BogoliubovMatrix {
    pub fn entry(&self, i: usize, j: usize) -> c64 {
        self.0[i][j]
    }

    pub fn to_faer(&self) -> Mat<c64> {
        Mat::from_fn(4, 4, |i, j| self.0[i][j])
    }

    /// η M, the Hermitian kernel of the quadratic Hamiltonian.
    pub fn metric_product(&self) -> [[c64; 4]; 4] {
        let mut out = self.0;
        for (row, &s) in out.iter_mut().zip(&METRIC) {
            row.iter_mut().for_each(|x| *x *= s);
        }
        out
    }
}

pub fn build_matrix(b: &HopfieldBlock) -> BogoliubovMatrix {
    let z = c64::new(0.0, 0.0);
    let r = |x: f64| c64::new(x, 0.0);
    let io = c64::new(0.0, b.rabi);
    let (w, f) = (b.omega_k, b.omega_f);
    BogoliubovMatrix([
        [r(w), -io, z, -io],
        [io, r(f), -io, z],
        [z, -io, r(-w), -io],
        [-io, z, io, r(-f)],
    ])
}

/// Closed-form determinant ω_k ω_F (ω_k ω_F − 4Ω_k²).
pub fn determinant(b: &HopfieldBlock) -> f64 {
    let p = b.omega_k * b.omega_f;
    let closed = p * (p - 4.0 * b.rabi * b.rabi);
    debug_assert!({
        let numeric = numeric_determinant(b);
        let scale = p * p + (4.0 * b.rabi * b.rabi).powi(2);
        (numeric - closed).abs() <= 1e-10 * scale
    });
    closed
}

/// Determinant of [`build_matrix`] by LU factorization.
pub fn numeric_determinant(b: &HopfieldBlock) -> f64 {
    let det = build_matrix(b).to_faer().determinant();
    det.re
}

/// Ω_c = sqrt(ω_k ω_F) / 2.
pub fn critical_coupling(omega_k: f64, omega_f: f64) -> Result<f64> {
    if !(omega_k > 0.0 && omega_f > 0.0) {
        return domain("frequencies must be positive");
    }
    Ok((omega_k * omega_f).sqrt() / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolaritonResult {
    /// Lower and upper branch, ascending; `None` once the lower branch is imaginary.
    pub frequencies: Option<[f64; 2]>,
    /// Upper branch, always real.
    pub upper: f64,
    pub stable: bool,
    pub determinant: f64,
    /// |Im λ| of the soft branch when unstable, else 0.
    pub instability_rate: f64,
}

/// Roots of λ⁴ − (ω_k² + ω_F²) λ² + det(M_k) = 0.
pub fn polariton_frequencies(b: &HopfieldBlock) -> Result<PolaritonResult> {
    b.validate()?;
    let (w, f) = (b.omega_k, b.omega_f);
    let det = determinant(b);
    let sum = w * w + f * f;
    let disc = (w * w - f * f).powi(2) + 16.0 * b.rabi * b.rabi * w * f;
    let upper_sq = 0.5 * (sum + disc.sqrt());
    // Product of the two λ² roots is det; avoids cancellation near criticality.
    let lower_sq = det / upper_sq;
    let upper = upper_sq.sqrt();
    if lower_sq >= 0.0 {
        let lower = lower_sq.sqrt();
        Ok(PolaritonResult {
            frequencies: Some([lower.min(upper), lower.max(upper)]),
            upper,
            stable: true,
            determinant: det,
            instability_rate: 0.0,
        })
    } else {
        Ok(PolaritonResult {
            frequencies: None,
            upper,
            stable: false,
            determinant: det,
            instability_rate: (-lower_sq).sqrt(),
        })
    }
}

/// Eigenvalues of [`build_matrix`] from a general dense eigensolver, sorted by
/// real then imaginary part.
pub fn dense_eigenvalues(b: &HopfieldBlock) -> Result<Vec<c64>> {
    let mut vals = build_matrix(b)
        .to_faer()
        .eigenvalues()
        .map_err(|e| Error::Backend(format!("{e:?}")))?;
    vals.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(vals)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchRow {
    pub rabi: f64,
    pub lower: f64,
    pub upper: f64,
    pub stable: bool,
    pub determinant: f64,
}

/// Branch table over an ascending Ω grid; unstable rows carry `lower = NaN`.
pub fn branch_sweep(template: &HopfieldBlock, rabi_grid: &[f64]) -> Result<Vec<BranchRow>> {
    if rabi_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return domain("Omega grid must be strictly ascending");
    }
    rabi_grid
        .iter()
        .map(|&rabi| {
            let res = polariton_frequencies(&template.with_rabi(rabi))?;
            Ok(BranchRow {
                rabi,
                lower: res.frequencies.map_or(f64::NAN, |f| f[0]),
                upper: res.upper,
                stable: res.stable,
                determinant: res.determinant,
            })
        })
        .collect()
}
