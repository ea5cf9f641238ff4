//! Exact diagonalization of the chain Hamiltonian
//!
//! H = Σ_k ω_k a_k†a_k + Σ_j (ω_F,j/2) σ_z,j + Σ_kj i c_kj (a_k − a_k†) σ_x,j,
//! c_kj = Ω_k √(2/N) Δf_k(x_j),
//!
//! with a matrix-free matvec and parity sectoring, so that the two nearly
//! degenerate vacua are obtained as separate sector ground states.

use std::f64::consts::PI;

use faer::c64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::coherent_amplitudes;
use crate::basis::{BasisIndexer, Sector, Wavefunction};
use crate::eigen::{lowest_eigenpairs, EigenOptions, HermitianOperator};
use crate::error::{domain, Error, Result};

/// Splittings below this fraction of the mean |ω_F| are not resolvable in f64.
pub const SPLITTING_FLOOR: f64 = 1e-13;
/// Default relative tolerance for cutoff-refinement convergence.
pub const DEFAULT_REFINE_TOL: f64 = 1e-3;
/// Default Fock cutoff for modes without coherent displacement.
pub const DEFAULT_CUTOFF_FLOOR: usize = 4;
/// Largest spin count handled by the Hamiltonian (spin energies are tabulated).
pub const MAX_ATOMS: usize = 20;

const ROW_CHUNK: usize = 1 << 12;

/// Spatial weight Δf_k(x_j) for mode k = 1..=N at site j = 1..=N.
///
/// For k = N the pattern carries an extra 1/√2, matched by the larger Ω_N of
/// [`rabi_ratio`], so that √(2/N) Δf_N is unit-normalized over the sites.
pub fn spatial_weight(k: usize, j: usize, n: usize) -> f64 {
    let arg = k as f64 * PI * (j as f64 - (n as f64 + 1.0) / 2.0) / n as f64;
    let base = if k % 2 == 1 { arg.cos() } else { arg.sin() };
    if k == n {
        base / 2f64.sqrt()
    } else {
        base
    }
}

/// Ω_k / Ω_1 for the chain geometry.
pub fn rabi_ratio(k: usize, n: usize) -> f64 {
    let s1 = (PI / (2.0 * n as f64)).sin();
    if k == n {
        2f64.sqrt() / (s1 * (n as f64).sqrt())
    } else {
        (k as f64 * PI / (2.0 * n as f64)).sin() / (s1 * (k as f64).sqrt())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManyBodySpec {
    pub n_atoms: usize,
    pub omega_f: Vec<f64>,
    pub omega_modes: Vec<f64>,
    pub rabi: Vec<f64>,
    pub cutoffs: Vec<usize>,
    /// weights[k][j] = Δf_{k+1}(x_{j+1}).
    pub weights: Vec<Vec<f64>>,
}

impl ManyBodySpec {
    /// Uniform chain: ω_k = k ω_1, Ω_1 = g √N ω_1, chain ratios and weights.
    pub fn chain(
        n_atoms: usize,
        n_modes: usize,
        g: f64,
        omega_f: f64,
        omega_1: f64,
        cutoffs: &[usize],
    ) -> Result<Self> {
        Self::chain_disordered(n_atoms, n_modes, g, &vec![omega_f; n_atoms], omega_1, cutoffs)
    }

    pub fn chain_disordered(
        n_atoms: usize,
        n_modes: usize,
        g: f64,
        omega_f: &[f64],
        omega_1: f64,
        cutoffs: &[usize],
    ) -> Result<Self> {
        if n_atoms < 1 || n_modes < 1 || n_modes > n_atoms {
            return domain(format!(
                "need 1 <= N_m <= N, got N = {n_atoms}, N_m = {n_modes}"
            ));
        }
        if !(g >= 0.0 && g.is_finite()) {
            return domain(format!("g must be non-negative, got {g}"));
        }
        let omega_rabi_1 = g * (n_atoms as f64).sqrt() * omega_1;
        let spec = Self {
            n_atoms,
            omega_f: omega_f.to_vec(),
            omega_modes: (1..=n_modes).map(|k| k as f64 * omega_1).collect(),
            rabi: (1..=n_modes)
                .map(|k| omega_rabi_1 * rabi_ratio(k, n_atoms))
                .collect(),
            cutoffs: cutoffs.to_vec(),
            weights: (1..=n_modes)
                .map(|k| (1..=n_atoms).map(|j| spatial_weight(k, j, n_atoms)).collect())
                .collect(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_atoms;
        let nm = self.omega_modes.len();
        if n == 0 || n > MAX_ATOMS {
            return domain(format!("atom count must be in 1..={MAX_ATOMS}, got {n}"));
        }
        if nm == 0 || nm > n {
            return domain(format!("mode count must be in 1..={n}, got {nm}"));
        }
        if self.omega_f.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.omega_f.len(),
            });
        }
        for (name, len) in [
            ("rabi", self.rabi.len()),
            ("cutoffs", self.cutoffs.len()),
            ("weights", self.weights.len()),
        ] {
            if len != nm {
                return domain(format!("{name} has {len} entries for {nm} modes"));
            }
        }
        if self.weights.iter().any(|w| w.len() != n) {
            return domain("every weight row needs one entry per atom");
        }
        if self.cutoffs.iter().any(|&c| c < 1) {
            return domain("Fock cutoffs must be at least 1");
        }
        if self.omega_modes.iter().any(|&w| !(w > 0.0)) {
            return domain("mode frequencies must be positive");
        }
        if self
            .omega_f
            .iter()
            .chain(&self.rabi)
            .chain(self.weights.iter().flatten())
            .any(|x| !x.is_finite())
        {
            return domain("non-finite parameter");
        }
        Ok(())
    }

    pub fn n_modes(&self) -> usize {
        self.omega_modes.len()
    }

    /// g = Ω_1 / (√N ω_1).
    pub fn coupling(&self) -> f64 {
        self.rabi[0] / ((self.n_atoms as f64).sqrt() * self.omega_modes[0])
    }

    pub fn mean_abs_omega_f(&self) -> f64 {
        self.omega_f.iter().map(|w| w.abs()).sum::<f64>() / self.n_atoms as f64
    }

    /// c[k][j] = Ω_k √(2/N) Δf_k(x_j).
    pub fn couplings(&self) -> Vec<Vec<f64>> {
        let norm = (2.0 / self.n_atoms as f64).sqrt();
        self.weights
            .iter()
            .zip(&self.rabi)
            .map(|(w, &o)| w.iter().map(|d| o * norm * d).collect())
            .collect()
    }

    pub fn with_cutoffs(&self, cutoffs: &[usize]) -> Self {
        Self {
            cutoffs: cutoffs.to_vec(),
            ..self.clone()
        }
    }

    pub fn with_omega_f(&self, omega_f: &[f64]) -> Self {
        Self {
            omega_f: omega_f.to_vec(),
            ..self.clone()
        }
    }

    pub fn basis(&self, sector: Option<Sector>) -> Result<BasisIndexer> {
        BasisIndexer::new(self.n_atoms, &self.cutoffs, sector)
    }
}

/// Matrix-free Hamiltonian on one sector or on the full space.
pub struct Hamiltonian {
    basis: BasisIndexer,
    /// Flattened c[k * N + j].
    coupling: Vec<f64>,
    mode_energy: Vec<f64>,
    spin_energy: Vec<f64>,
    sqrt_table: Vec<f64>,
}

impl Hamiltonian {
    pub fn new(spec: &ManyBodySpec, sector: Option<Sector>) -> Result<Self> {
        spec.validate()?;
        let basis = spec.basis(sector)?;
        Ok(Self::with_basis(spec, basis))
    }

    fn with_basis(spec: &ManyBodySpec, basis: BasisIndexer) -> Self {
        let n = spec.n_atoms;
        let coupling = spec.couplings().into_iter().flatten().collect();
        let mode_energy = (0..basis.n_mode_states())
            .map(|m| {
                basis
                    .occupations(m)
                    .iter()
                    .zip(&spec.omega_modes)
                    .map(|(&o, w)| o as f64 * w)
                    .sum()
            })
            .collect();
        let spin_energy = (0..1u32 << n)
            .map(|s| {
                (0..n)
                    .map(|j| {
                        let half = 0.5 * spec.omega_f[j];
                        if s >> j & 1 == 1 {
                            half
                        } else {
                            -half
                        }
                    })
                    .sum()
            })
            .collect();
        let max_cut = spec.cutoffs.iter().copied().max().unwrap_or(0);
        let sqrt_table = (0..=max_cut + 1).map(|x| (x as f64).sqrt()).collect();
        Self {
            basis,
            coupling,
            mode_energy,
            spin_energy,
            sqrt_table,
        }
    }

    pub fn basis(&self) -> &BasisIndexer {
        &self.basis
    }

    fn row(&self, i: usize, x: &[c64]) -> c64 {
        let b = &self.basis;
        let n = b.n_spins();
        let bits = b.free_spin_bits();
        let low_mask = (1usize << bits) - 1;
        let (s, m) = b.decode(i);
        let mut acc = x[i] * (self.mode_energy[m] + self.spin_energy[s as usize]);
        let occ = b.occupations(m);
        for (k, (&nk, &cut)) in occ.iter().zip(b.cutoffs()).enumerate() {
            let nk = nk as usize;
            let stride = b.stride(k);
            let up = if nk < cut { self.sqrt_table[nk + 1] } else { 0.0 };
            let down = self.sqrt_table[nk];
            let ck = &self.coupling[k * n..(k + 1) * n];
            // Σ_j c_kj (i √(n+1) x[s^j, n+1] − i √n x[s^j, n−1])
            let mut sum = c64::new(0.0, 0.0);
            for (j, &c) in ck.iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                let sj = (s ^ (1 << j)) as usize & low_mask;
                let mut term = c64::new(0.0, 0.0);
                if nk < cut {
                    term += x[sj + ((m + stride) << bits)] * up;
                }
                if nk > 0 {
                    term -= x[sj + ((m - stride) << bits)] * down;
                }
                sum += term * c;
            }
            acc += c64::new(-sum.im, sum.re);
        }
        acc
    }
}

impl HermitianOperator for Hamiltonian {
    fn dim(&self) -> usize {
        self.basis.dim()
    }

    fn apply(&self, x: &[c64], y: &mut [c64]) {
        y.par_chunks_mut(ROW_CHUNK)
            .enumerate()
            .for_each(|(chunk, out)| {
                let base = chunk * ROW_CHUNK;
                for (r, yi) in out.iter_mut().enumerate() {
                    *yi = self.row(base + r, x);
                }
            });
    }
}

pub fn apply_hamiltonian(
    spec: &ManyBodySpec,
    sector: Option<Sector>,
    v: &Wavefunction,
) -> Result<Wavefunction> {
    let h = Hamiltonian::new(spec, sector)?;
    v.check_dim(h.basis())?;
    let mut out = Wavefunction::zeros(v.len());
    h.apply(&v.amplitudes, &mut out.amplitudes);
    Ok(out)
}

/// Π v; in a sector this is multiplication by its eigenvalue.
pub fn parity_apply(basis: &BasisIndexer, v: &Wavefunction) -> Result<Wavefunction> {
    v.check_dim(basis)?;
    let mut out = v.clone();
    match basis.sector() {
        Some(sector) => out
            .amplitudes
            .iter_mut()
            .for_each(|a| *a *= sector.eigenvalue()),
        None => out.amplitudes.iter_mut().enumerate().for_each(|(i, a)| {
            let (s, m) = basis.decode(i);
            *a *= basis.parity_of(s, m);
        }),
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumSector {
    Even,
    Odd,
    Full,
}

impl std::str::FromStr for SpectrumSector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" => Ok(Self::Even),
            "odd" => Ok(Self::Odd),
            "full" => Ok(Self::Full),
            other => Err(Error::Config(format!(
                "sector must be even, odd or full, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub matvecs: Vec<usize>,
    pub sectors: Vec<Sector>,
    /// Eigenvectors in their own sector basis.
    #[serde(skip)]
    pub vectors: Vec<Wavefunction>,
}

pub fn lowest_spectrum(
    spec: &ManyBodySpec,
    which: SpectrumSector,
    count: usize,
    opts: &EigenOptions,
) -> Result<SpectrumResult> {
    if count == 0 {
        return domain("eigenvalue count must be at least 1");
    }
    let sectors: &[Sector] = match which {
        SpectrumSector::Even => &[Sector::Even],
        SpectrumSector::Odd => &[Sector::Odd],
        SpectrumSector::Full => &[Sector::Even, Sector::Odd],
    };
    let mut entries = Vec::new();
    for &sector in sectors {
        let h = Hamiltonian::new(spec, Some(sector))?;
        let want = if which == SpectrumSector::Full {
            count.min(h.dim())
        } else {
            count
        };
        let pairs = lowest_eigenpairs(&h, want, opts)?;
        for (k, v) in pairs.vectors.into_iter().enumerate() {
            entries.push((
                pairs.values[k],
                pairs.residuals[k],
                pairs.matvecs[k],
                sector,
                Wavefunction::from_amplitudes(v),
            ));
        }
    }
    entries.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.3 as u8).cmp(&(b.3 as u8))));
    entries.truncate(count);
    let mut out = SpectrumResult {
        eigenvalues: Vec::new(),
        residuals: Vec::new(),
        matvecs: Vec::new(),
        sectors: Vec::new(),
        vectors: Vec::new(),
    };
    for (e, r, mv, s, v) in entries {
        out.eigenvalues.push(e);
        out.residuals.push(r);
        out.matvecs.push(mv);
        out.sectors.push(s);
        out.vectors.push(v);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplittingRecord {
    pub n_atoms: usize,
    pub n_modes: usize,
    pub g: f64,
    pub cutoffs: Vec<usize>,
    pub omega_f_mean: f64,
    pub e_even: f64,
    pub e_odd: f64,
    pub delta: f64,
    pub converged: bool,
    pub below_floor: bool,
}

impl SplittingRecord {
    pub fn delta_over_omega_f(&self) -> f64 {
        self.delta / self.omega_f_mean
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectorGround {
    pub record: SplittingRecord,
    pub even: Wavefunction,
    pub odd: Wavefunction,
}

/// Ground energies and vectors of both parity sectors at the spec's cutoffs.
pub fn sector_ground_states(spec: &ManyBodySpec, opts: &EigenOptions) -> Result<SectorGround> {
    let mut energies = [0.0; 2];
    let mut vectors = Vec::with_capacity(2);
    for (slot, sector) in [Sector::Even, Sector::Odd].into_iter().enumerate() {
        let h = Hamiltonian::new(spec, Some(sector))?;
        let mut pairs = lowest_eigenpairs(&h, 1, opts)?;
        energies[slot] = pairs.values[0];
        vectors.push(Wavefunction::from_amplitudes(pairs.vectors.swap_remove(0)));
    }
    let delta = (energies[0] - energies[1]).abs();
    let mean = spec.mean_abs_omega_f();
    let odd = vectors.pop().expect("two sectors");
    let even = vectors.pop().expect("two sectors");
    Ok(SectorGround {
        record: SplittingRecord {
            n_atoms: spec.n_atoms,
            n_modes: spec.n_modes(),
            g: spec.coupling(),
            cutoffs: spec.cutoffs.clone(),
            omega_f_mean: mean,
            e_even: energies[0],
            e_odd: energies[1],
            delta,
            converged: false,
            below_floor: delta < SPLITTING_FLOOR * mean,
        },
        even,
        odd,
    })
}

/// Cutoffs one refinement step above `cutoffs`.
pub fn refined_cutoffs(cutoffs: &[usize]) -> Vec<usize> {
    cutoffs.iter().map(|&c| c + (c / 5).max(2)).collect()
}

fn splitting_agrees(a: &SplittingRecord, b: &SplittingRecord, rel_tol: f64) -> bool {
    let slack = SPLITTING_FLOOR * b.omega_f_mean;
    (a.delta - b.delta).abs() <= rel_tol * b.delta + slack
}

/// δ at the spec's cutoffs and at one refinement step above; the refined
/// result is returned, marked converged when the two agree to `rel_tol`.
pub fn ground_splitting(
    spec: &ManyBodySpec,
    opts: &EigenOptions,
    rel_tol: f64,
) -> Result<SplittingRecord> {
    if !(rel_tol > 0.0) {
        return domain("refinement tolerance must be positive");
    }
    let base = sector_ground_states(spec, opts)?.record;
    let fine_spec = spec.with_cutoffs(&refined_cutoffs(&spec.cutoffs));
    let mut fine = sector_ground_states(&fine_spec, opts)?.record;
    fine.converged = splitting_agrees(&base, &fine, rel_tol);
    Ok(fine)
}

/// n_max(k) = ceil(|α_k|² + s|α_k| + s²) for displaced modes, `floor` otherwise.
pub fn choose_cutoffs(
    n_atoms: usize,
    n_modes: usize,
    g: f64,
    safety: f64,
    floor: usize,
) -> Result<Vec<usize>> {
    if !(safety >= 1.0) {
        return domain(format!("safety must be >= 1, got {safety}"));
    }
    let alphas = coherent_amplitudes(n_atoms, n_modes, g)?;
    Ok(alphas
        .iter()
        .map(|a| {
            let r = a.norm();
            if r > 0.0 {
                ((r * r + safety * r + safety * safety).ceil() as usize).max(floor)
            } else {
                floor
            }
        })
        .collect())
}

/// Cutoff levels at safety 2, 3, 4, made strictly increasing.
pub fn default_schedule(n_atoms: usize, n_modes: usize, g: f64) -> Result<Vec<Vec<usize>>> {
    let mut levels: Vec<Vec<usize>> = Vec::new();
    for safety in [2.0, 3.0, 4.0] {
        let mut c = choose_cutoffs(n_atoms, n_modes, g, safety, DEFAULT_CUTOFF_FLOOR)?;
        if let Some(prev) = levels.last() {
            c.iter_mut().zip(prev).for_each(|(x, &p)| *x = (*x).max(p));
            if c == *prev {
                c.iter_mut().for_each(|x| *x += 2);
            }
        }
        levels.push(c);
    }
    Ok(levels)
}

fn check_schedule(schedule: &[Vec<usize>], n_modes: usize) -> Result<()> {
    if schedule.iter().any(|c| c.len() != n_modes) {
        return domain("every schedule level needs one cutoff per mode");
    }
    for w in schedule.windows(2) {
        let grows = w[1].iter().zip(&w[0]).all(|(b, a)| b >= a) && w[1] != w[0];
        if !grows {
            return domain(format!(
                "cutoff schedule must be strictly increasing: {:?} -> {:?}",
                w[0], w[1]
            ));
        }
    }
    Ok(())
}

/// δ at each schedule level; a record is converged when it agrees with the
/// previous level to `rel_tol`.
pub fn convergence_scan(
    spec: &ManyBodySpec,
    schedule: &[Vec<usize>],
    opts: &EigenOptions,
    rel_tol: f64,
) -> Result<Vec<SplittingRecord>> {
    check_schedule(schedule, spec.n_modes())?;
    let mut out: Vec<SplittingRecord> = Vec::with_capacity(schedule.len());
    for cut in schedule {
        let mut rec = sector_ground_states(&spec.with_cutoffs(cut), opts)?.record;
        if let Some(prev) = out.last() {
            rec.converged = splitting_agrees(prev, &rec, rel_tol);
        }
        out.push(rec);
    }
    Ok(out)
}
