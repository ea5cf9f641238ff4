//! Site-dependent atomic-frequency disorder ω_F,j = ω_F (1 + a ξ_j) with
//! standard-normal ξ_j, ensemble statistics of the splitting, and the
//! order-by-order protection of the vacuum doublet against
//! H_pert = Σ_j (Δ_j/2) σ_z,j.

use faer::c64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{
    analytic_splitting_general, asymptotic_vacuum, displacements, required_cutoff,
    vacuum_overlap_closed_form, VacuumSign,
};
use crate::basis::{BasisIndexer, Wavefunction};
use crate::eigen::EigenOptions;
use crate::error::{domain, Error, Result};
use crate::manybody::{sector_ground_states, ManyBodySpec};

/// Largest full-space dimension the exact engine accepts by default.
pub const DEFAULT_DIMENSION_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisorderEnsembleSpec {
    /// Clean chain; its ω_F entries are replaced per realization.
    pub base: ManyBodySpec,
    pub omega_f: f64,
    pub amplitude: f64,
    pub realizations: usize,
    pub seed: u64,
}

impl DisorderEnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return domain(format!("amplitude must be non-negative, got {}", self.amplitude));
        }
        if self.realizations == 0 {
            return domain("realization count must be at least 1");
        }
        if !self.omega_f.is_finite() {
            return domain("omega_F must be finite");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Exact,
    Analytic,
}

impl Engine {
    pub fn label(self) -> &'static str {
        match self {
            Engine::Exact => "exact",
            Engine::Analytic => "analytic",
        }
    }
}

impl std::str::FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Engine::Exact),
            "analytic" => Ok(Engine::Analytic),
            other => Err(Error::Config(format!(
                "engine must be exact or analytic, got {other:?}"
            ))),
        }
    }
}

/// SplitMix64 finalizer applied to `seed + (index + 1) φ`.
pub fn realization_seed(seed: u64, index: usize) -> u64 {
    let mut z = seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn sample_realization(omega_f: f64, amplitude: f64, n_atoms: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_atoms)
        .map(|_| {
            let xi: f64 = StandardNormal.sample(&mut rng);
            omega_f * (1.0 + amplitude * xi)
        })
        .collect()
}

/// One ω_F list per realization; realization r draws from its own derived seed.
pub fn sample_frequencies(spec: &DisorderEnsembleSpec) -> Result<Vec<Vec<f64>>> {
    spec.validate()?;
    Ok((0..spec.realizations)
        .map(|r| {
            sample_realization(
                spec.omega_f,
                spec.amplitude,
                spec.base.n_atoms,
                realization_seed(spec.seed, r),
            )
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationRecord {
    pub realization: usize,
    pub seed: u64,
    pub omega_f: Vec<f64>,
    pub delta: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub mean_delta: f64,
    /// Population standard deviation.
    pub std_delta: f64,
    pub records: Vec<RealizationRecord>,
    pub seed: u64,
    pub engine: Engine,
    pub failures: usize,
}

impl EnsembleStats {
    pub fn relative_spread(&self) -> f64 {
        self.std_delta / self.mean_delta
    }
}

/// Mean and population standard deviation.
pub fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn ensemble_splitting(
    spec: &DisorderEnsembleSpec,
    engine: Engine,
    opts: &EigenOptions,
    dimension_budget: usize,
) -> Result<EnsembleStats> {
    let samples = sample_frequencies(spec)?;
    let base = &spec.base;
    if engine == Engine::Exact {
        let dim = base.basis(None)?.full_dim();
        if dim > dimension_budget {
            return Err(Error::TooLarge(format!(
                "exact engine needs dimension {dim} > budget {dimension_budget}; use the analytic engine"
            )));
        }
    }
    let g = base.coupling();
    let omega_1 = base.omega_modes[0];
    let records: Vec<RealizationRecord> = samples
        .into_par_iter()
        .enumerate()
        .map(|(r, omega_f)| {
            let result = match engine {
                Engine::Exact => sector_ground_states(&base.with_omega_f(&omega_f), opts)
                    .map(|s| s.record.delta),
                Engine::Analytic => {
                    analytic_splitting_general(base.n_atoms, base.n_modes(), g, &omega_f, omega_1)
                }
            };
            let (delta, error) = match result {
                Ok(d) => (Some(d), None),
                Err(e) => (None, Some(e.to_string())),
            };
            RealizationRecord {
                realization: r,
                seed: realization_seed(spec.seed, r),
                omega_f,
                delta,
                error,
            }
        })
        .collect();
    let deltas: Vec<f64> = records.iter().filter_map(|r| r.delta).collect();
    let failures = records.len() - deltas.len();
    if deltas.is_empty() {
        return Err(Error::InsufficientData(format!(
            "all {} realizations failed; first error: {}",
            records.len(),
            records[0].error.as_deref().unwrap_or("unknown")
        )));
    }
    let (mean_delta, std_delta) = mean_and_std(&deltas);
    Ok(EnsembleStats {
        mean_delta,
        std_delta,
        records,
        seed: spec.seed,
        engine,
        failures,
    })
}

/// Δ_j = ω_F,j − ω_F.
pub fn fluctuations(omega_f: &[f64], reference: f64) -> Vec<f64> {
    omega_f.iter().map(|w| w - reference).collect()
}

/// H_pert v with H_pert = Σ_j (Δ_j/2) σ_z,j.
pub fn apply_perturbation(
    basis: &BasisIndexer,
    deltas: &[f64],
    v: &Wavefunction,
) -> Result<Wavefunction> {
    v.check_dim(basis)?;
    if deltas.len() != basis.n_spins() {
        return Err(Error::DimensionMismatch {
            expected: basis.n_spins(),
            got: deltas.len(),
        });
    }
    let spin_diag: Vec<f64> = (0..1u32 << basis.n_spins())
        .map(|s| {
            deltas
                .iter()
                .enumerate()
                .map(|(j, d)| if s >> j & 1 == 1 { 0.5 * d } else { -0.5 * d })
                .sum()
        })
        .collect();
    let mut out = v.clone();
    out.amplitudes
        .par_iter_mut()
        .enumerate()
        .for_each(|(i, a)| *a *= spin_diag[basis.decode(i).0 as usize]);
    Ok(out)
}

/// Spin-register matrix element ⟨μ_s|h^m|μ_t⟩ over uniform |±⟩ product states,
/// with h = Σ_j (Δ_j/2) σ_z,j.
pub fn spin_register_element(deltas: &[f64], m: usize, left: VacuumSign, right: VacuumSign) -> f64 {
    let n = deltas.len();
    let amp = |s: u32, sign: VacuumSign| -> f64 {
        let down = n as u32 - s.count_ones();
        if sign == VacuumSign::Minus && down % 2 == 1 {
            -1.0
        } else {
            1.0
        }
    };
    let norm = 0.5f64.powi(n as i32);
    (0..1u32 << n)
        .map(|s| {
            let h: f64 = deltas
                .iter()
                .enumerate()
                .map(|(j, d)| if s >> j & 1 == 1 { 0.5 * d } else { -0.5 * d })
                .sum();
            amp(s, left) * amp(s, right) * h.powi(m as i32)
        })
        .sum::<f64>()
        * norm
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtectionReport {
    pub n_atoms: usize,
    pub power: usize,
    /// elements[a][b] = ⟨G_a|H_pert^m|G_b⟩ with index 0 = +, 1 = −, evaluated on the full space.
    pub elements: [[c64; 2]; 2],
    /// Exact spin-register factors of the same elements.
    pub spin_factors: [[f64; 2]; 2],
    /// Untruncated photon overlap ⟨photons_+|photons_−⟩ = Π_k e^{−2|α_k|²}.
    pub photon_overlap: f64,
    pub cutoffs: Vec<usize>,
}

impl ProtectionReport {
    pub fn max_abs_element(&self) -> f64 {
        self.elements.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Factorized cross element: spin factor times photon overlap.
    pub fn cross_element_factorized(&self) -> f64 {
        self.spin_factors[0][1] * self.photon_overlap
    }
}

/// Cutoffs at which every truncated coherent state keeps the required norm.
pub fn vacuum_cutoffs(spec: &ManyBodySpec) -> Vec<usize> {
    displacements(spec, VacuumSign::Plus)
        .iter()
        .map(|&a| required_cutoff(a).max(1))
        .collect()
}

/// ⟨G_±|H_pert^m|G_±⟩ and ⟨G_±|H_pert^m|G_∓⟩ by repeated matvec on the analytic vacua.
pub fn protection_check(spec: &ManyBodySpec, deltas: &[f64], m: usize) -> Result<ProtectionReport> {
    if m == 0 {
        return domain("perturbation power must be at least 1");
    }
    let (plus, info) = asymptotic_vacuum(spec, VacuumSign::Plus)?;
    let (minus, _) = asymptotic_vacuum(spec, VacuumSign::Minus)?;
    let basis = spec.basis(None)?;
    let states = [&plus, &minus];
    let mut elements = [[c64::new(0.0, 0.0); 2]; 2];
    for (b, right) in states.iter().enumerate() {
        let mut v = (*right).clone();
        for _ in 0..m {
            v = apply_perturbation(&basis, deltas, &v)?;
        }
        for (a, left) in states.iter().enumerate() {
            elements[a][b] = left.inner(&v)?;
        }
    }
    let signs = [VacuumSign::Plus, VacuumSign::Minus];
    let mut spin_factors = [[0.0; 2]; 2];
    for (a, &l) in signs.iter().enumerate() {
        for (b, &r) in signs.iter().enumerate() {
            spin_factors[a][b] = spin_register_element(deltas, m, l, r);
        }
    }
    Ok(ProtectionReport {
        n_atoms: spec.n_atoms,
        power: m,
        elements,
        spin_factors,
        photon_overlap: vacuum_overlap_closed_form(&info.amplitudes),
        cutoffs: spec.cutoffs.clone(),
    })
}
