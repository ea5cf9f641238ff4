//! Ultrastrong-coupling limit: the two displaced vacua, the pseudospin
//! energy landscape, closed-form splittings and the exponent β(N).

use std::f64::consts::PI;

use faer::c64;
use serde::{Deserialize, Serialize};

use crate::basis::Wavefunction;
use crate::eigen::{axpy, dot, norm};
use crate::error::{domain, Error, Result};
use crate::manybody::{rabi_ratio, spatial_weight, ManyBodySpec};

/// Smallest tolerated truncated coherent-state norm (squared, before renormalizing).
pub const MIN_TRUNCATED_NORM: f64 = 0.999;
/// Largest N for brute-force pseudospin minimization.
pub const MAX_BRUTE_FORCE_ATOMS: usize = 20;

fn check_chain(n_atoms: usize, n_modes: usize) -> Result<()> {
    if n_atoms < 2 {
        return domain(format!("N must be at least 2, got {n_atoms}"));
    }
    if n_modes < 1 || n_modes > n_atoms {
        return domain(format!("N_m must be in 1..={n_atoms}, got {n_modes}"));
    }
    Ok(())
}

/// α_k = g√2 i^k / (k^{3/2} sin(π/2N)) for odd k, 0 for even k.
pub fn coherent_amplitudes(n_atoms: usize, n_modes: usize, g: f64) -> Result<Vec<c64>> {
    check_chain(n_atoms, n_modes)?;
    if !(g >= 0.0 && g.is_finite()) {
        return domain(format!("g must be non-negative, got {g}"));
    }
    let s = (PI / (2.0 * n_atoms as f64)).sin();
    Ok((1..=n_modes)
        .map(|k| {
            if k % 2 == 0 {
                return c64::new(0.0, 0.0);
            }
            let r = g * 2f64.sqrt() / ((k as f64).powf(1.5) * s);
            // i^k for odd k is ±i.
            if k % 4 == 1 {
                c64::new(0.0, r)
            } else {
                c64::new(0.0, -r)
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VacuumSign {
    Plus,
    Minus,
}

impl VacuumSign {
    pub fn value(self) -> f64 {
        match self {
            VacuumSign::Plus => 1.0,
            VacuumSign::Minus => -1.0,
        }
    }
}

/// Displacements α_k = i C_k / ω_k, C_k = Σ_j c_kj μ_j, of a uniform pseudospin state.
pub fn displacements(spec: &ManyBodySpec, sign: VacuumSign) -> Vec<c64> {
    spec.couplings()
        .iter()
        .zip(&spec.omega_modes)
        .map(|(c, w)| c64::new(0.0, sign.value() * c.iter().sum::<f64>() / w))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticVacuum {
    pub sign: VacuumSign,
    pub amplitudes: Vec<c64>,
    /// Squared norm retained by each truncated coherent state.
    pub retained_norm: Vec<f64>,
}

fn coherent_coefficients(alpha: c64, cutoff: usize) -> (Vec<c64>, f64) {
    let mut coef = Vec::with_capacity(cutoff + 1);
    let mut c = c64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..=cutoff {
        coef.push(c);
        c *= alpha / ((n + 1) as f64).sqrt();
    }
    let retained = coef.iter().map(|x| x.norm_sqr()).sum();
    (coef, retained)
}

/// Smallest cutoff whose truncated coherent state keeps `MIN_TRUNCATED_NORM`.
pub fn required_cutoff(alpha: c64) -> usize {
    let mut cutoff = 0;
    loop {
        let (_, kept) = coherent_coefficients(alpha, cutoff);
        if kept >= MIN_TRUNCATED_NORM {
            return cutoff;
        }
        cutoff += 1;
    }
}

/// Full-space product state: every spin |±⟩, each mode in its truncated,
/// renormalized coherent state.
pub fn asymptotic_vacuum(
    spec: &ManyBodySpec,
    sign: VacuumSign,
) -> Result<(Wavefunction, AnalyticVacuum)> {
    spec.validate()?;
    let alphas = displacements(spec, sign);
    let mut modes = Vec::with_capacity(alphas.len());
    let mut retained_norm = Vec::with_capacity(alphas.len());
    for (k, (&a, &cut)) in alphas.iter().zip(&spec.cutoffs).enumerate() {
        let (mut coef, kept) = coherent_coefficients(a, cut);
        if kept < MIN_TRUNCATED_NORM {
            return Err(Error::CutoffTooSmall {
                mode: k + 1,
                got: cut,
                required: required_cutoff(a),
            });
        }
        let inv = 1.0 / kept.sqrt();
        coef.iter_mut().for_each(|c| *c *= inv);
        modes.push(coef);
        retained_norm.push(kept);
    }
    let basis = spec.basis(None)?;
    let n = spec.n_atoms;
    let spin_amp = 2f64.powf(-(n as f64) / 2.0);
    let mut psi = Wavefunction::zeros(basis.dim());
    for (i, a) in psi.amplitudes.iter_mut().enumerate() {
        let (s, m) = basis.decode(i);
        let down = n as u32 - s.count_ones();
        let spin = if sign == VacuumSign::Minus && down % 2 == 1 {
            -spin_amp
        } else {
            spin_amp
        };
        let mut amp = c64::new(spin, 0.0);
        for (coef, &occ) in modes.iter().zip(basis.occupations(m)) {
            amp *= coef[occ as usize];
        }
        *a = amp;
    }
    Ok((
        psi,
        AnalyticVacuum {
            sign,
            amplitudes: alphas,
            retained_norm,
        },
    ))
}

/// ⟨G_+|G_−⟩ = Π_k e^{−2|α_k|²} for untruncated states.
pub fn vacuum_overlap_closed_form(amplitudes: &[c64]) -> f64 {
    (-2.0 * amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>()).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubspaceOverlap {
    /// Product of the principal-angle cosines.
    pub fidelity: f64,
    /// Principal-angle cosines, descending.
    pub cosines: [f64; 2],
    /// Norm of each numeric vector's projection onto the analytic plane.
    pub per_vector: [f64; 2],
}

fn orthonormal_pair(a: &Wavefunction, b: &Wavefunction, what: &str) -> Result<[Vec<c64>; 2]> {
    let mut q0 = a.amplitudes.clone();
    let n0 = norm(&q0);
    if !(n0 > 1e-12) {
        return Err(Error::RankDeficient(format!("{what}: first vector vanishes")));
    }
    q0.iter_mut().for_each(|x| *x /= n0);
    let mut q1 = b.amplitudes.clone();
    let scale = norm(&q1);
    for _ in 0..2 {
        let c = dot(&q0, &q1);
        axpy(-c, &q0, &mut q1);
    }
    let n1 = norm(&q1);
    if !(n1 > 1e-10 * scale.max(f64::MIN_POSITIVE)) {
        return Err(Error::RankDeficient(format!("{what}: vectors are parallel")));
    }
    q1.iter_mut().for_each(|x| *x /= n1);
    Ok([q0, q1])
}

/// Principal-angle fidelity between span{numeric} and span{analytic}.
pub fn subspace_overlap(
    numeric: [&Wavefunction; 2],
    analytic: [&Wavefunction; 2],
) -> Result<SubspaceOverlap> {
    let dim = numeric[0].len();
    for w in numeric.iter().chain(&analytic) {
        if w.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: w.len(),
            });
        }
    }
    let qa = orthonormal_pair(numeric[0], numeric[1], "numeric pair")?;
    let qb = orthonormal_pair(analytic[0], analytic[1], "analytic pair")?;
    let m = [
        [dot(&qa[0], &qb[0]), dot(&qa[0], &qb[1])],
        [dot(&qa[1], &qb[0]), dot(&qa[1], &qb[1])],
    ];
    // Singular values from the Hermitian 2×2 Gram matrix M M†.
    let p = m[0][0].norm_sqr() + m[0][1].norm_sqr();
    let r = m[1][0].norm_sqr() + m[1][1].norm_sqr();
    let q = m[0][0] * m[1][0].conj() + m[0][1] * m[1][1].conj();
    let mean = 0.5 * (p + r);
    let spread = (0.25 * (p - r) * (p - r) + q.norm_sqr()).sqrt();
    let s_hi = (mean + spread).max(0.0).sqrt().min(1.0);
    let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).norm();
    let s_lo = if s_hi > 0.0 { (det / s_hi).min(s_hi) } else { 0.0 };
    let per_vector = [
        proj_norm(numeric[0], &qb),
        proj_norm(numeric[1], &qb),
    ];
    Ok(SubspaceOverlap {
        fidelity: s_hi * s_lo,
        cosines: [s_hi, s_lo],
        per_vector,
    })
}

fn proj_norm(v: &Wavefunction, q: &[Vec<c64>; 2]) -> f64 {
    let n = norm(&v.amplitudes);
    let a = dot(&q[0], &v.amplitudes).norm_sqr() + dot(&q[1], &v.amplitudes).norm_sqr();
    (a.sqrt() / n).min(1.0)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PseudospinConfig {
    pub signs: Vec<i8>,
}

impl PseudospinConfig {
    pub fn uniform(n: usize, sign: i8) -> Self {
        Self {
            signs: vec![sign; n],
        }
    }

    /// Bit j set = μ_j = +1.
    pub fn from_bits(n: usize, bits: u32) -> Self {
        Self {
            signs: (0..n).map(|j| if bits >> j & 1 == 1 { 1 } else { -1 }).collect(),
        }
    }

    pub fn flipped(&self) -> Self {
        Self {
            signs: self.signs.iter().map(|s| -s).collect(),
        }
    }

    pub fn is_uniform(&self) -> bool {
        self.signs.windows(2).all(|w| w[0] == w[1])
    }
}

/// Q(j,j') = Σ_k Δf_k(x_j) [(Ω_k/Ω_1)²/k] Δf_k(x_j').
pub fn quadratic_form(weights: &[Vec<f64>], mode_ratios: &[f64]) -> Result<Vec<Vec<f64>>> {
    if weights.len() != mode_ratios.len() || weights.is_empty() {
        return domain("need one ratio per weight row");
    }
    let n = weights[0].len();
    if weights.iter().any(|w| w.len() != n) {
        return domain("weight rows must share the atom count");
    }
    let mut q = vec![vec![0.0; n]; n];
    for (k, (w, r)) in weights.iter().zip(mode_ratios).enumerate() {
        let f = r * r / (k + 1) as f64;
        for i in 0..n {
            for j in 0..n {
                q[i][j] += w[i] * f * w[j];
            }
        }
    }
    Ok(q)
}

pub fn chain_quadratic_form(n_atoms: usize, n_modes: usize) -> Result<Vec<Vec<f64>>> {
    check_chain(n_atoms, n_modes)?;
    let weights: Vec<Vec<f64>> = (1..=n_modes)
        .map(|k| (1..=n_atoms).map(|j| spatial_weight(k, j, n_atoms)).collect())
        .collect();
    let ratios: Vec<f64> = (1..=n_modes).map(|k| rabi_ratio(k, n_atoms)).collect();
    quadratic_form(&weights, &ratios)
}

/// μ Q μ.
pub fn quadratic_value(q: &[Vec<f64>], config: &PseudospinConfig) -> f64 {
    let mu: Vec<f64> = config.signs.iter().map(|&s| s as f64).collect();
    q.iter()
        .zip(&mu)
        .map(|(row, a)| a * row.iter().zip(&mu).map(|(x, b)| x * b).sum::<f64>())
        .sum()
}

/// E(S) = −2 g² ω_1 μQμ.
pub fn pseudospin_energy(q: &[Vec<f64>], config: &PseudospinConfig, g: f64, omega_1: f64) -> f64 {
    -2.0 * g * g * omega_1 * quadratic_value(q, config)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudospinMinimum {
    pub minimizers: Vec<PseudospinConfig>,
    /// Largest μQμ; the minimal energy is −2g²ω_1 times this.
    pub max_quadratic_value: f64,
    /// Sorted distinct μQμ values (largest first).
    pub levels: Vec<f64>,
}

/// Brute force over all 2^N configurations.
pub fn minimize_pseudospin_config(q: &[Vec<f64>]) -> Result<PseudospinMinimum> {
    let n = q.len();
    if n == 0 || n > MAX_BRUTE_FORCE_ATOMS {
        return Err(Error::TooLarge(format!(
            "brute-force minimization supports 1..={MAX_BRUTE_FORCE_ATOMS} atoms, got {n}"
        )));
    }
    let values: Vec<f64> = (0..1u32 << n)
        .map(|bits| quadratic_value(q, &PseudospinConfig::from_bits(n, bits)))
        .collect();
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tie = 1e-12 * best.abs().max(1.0);
    let minimizers = values
        .iter()
        .enumerate()
        .filter(|(_, &v)| best - v <= tie)
        .map(|(bits, _)| PseudospinConfig::from_bits(n, bits as u32))
        .collect();
    let mut levels = values.clone();
    levels.sort_by(|a, b| b.total_cmp(a));
    levels.dedup_by(|a, b| (*a - *b).abs() <= tie);
    Ok(PseudospinMinimum {
        minimizers,
        max_quadratic_value: best,
        levels,
    })
}

/// E_G = −Σ_k (Ω_k²/ω_k) ψ_k² for the uniform configuration.
pub fn ferromagnetic_energy(spec: &ManyBodySpec) -> f64 {
    spec.couplings()
        .iter()
        .zip(&spec.omega_modes)
        .map(|(c, w)| {
            let ck: f64 = c.iter().sum();
            -ck * ck / w
        })
        .sum()
}

/// δ ≃ (ω_F²/2ω_1) √(π/2g²) e^{−8g²} for two atoms and one mode.
pub fn analytic_splitting_n2(omega_f: f64, omega_1: f64, g: f64) -> Result<f64> {
    if !(g > 0.0) {
        return domain("the two-atom splitting formula needs g > 0");
    }
    if !(omega_1 > 0.0) {
        return domain("omega_1 must be positive");
    }
    Ok(omega_f * omega_f / (2.0 * omega_1) * (PI / (2.0 * g * g)).sqrt() * (-8.0 * g * g).exp())
}

/// δ ∼ 2ω_1 N! Π_j (ω_F,j / 2ω_1) e^{−β g²}; the sign of the product is kept.
pub fn analytic_splitting_general(
    n_atoms: usize,
    n_modes: usize,
    g: f64,
    omega_f: &[f64],
    omega_1: f64,
) -> Result<f64> {
    check_chain(n_atoms, n_modes)?;
    if omega_f.len() != n_atoms {
        return Err(Error::DimensionMismatch {
            expected: n_atoms,
            got: omega_f.len(),
        });
    }
    if !(omega_1 > 0.0) {
        return domain("omega_1 must be positive");
    }
    let beta = beta_exponent(n_atoms, n_modes)?;
    let factorial: f64 = (1..=n_atoms).map(|i| i as f64).product();
    let product: f64 = omega_f.iter().map(|w| w / (2.0 * omega_1)).product();
    Ok(2.0 * omega_1 * factorial * product * (-beta * g * g).exp())
}

/// Lower and upper bounds 1.6N², 2.1N².
pub fn beta_bounds(n_atoms: usize) -> (f64, f64) {
    let n2 = (n_atoms * n_atoms) as f64;
    (1.6 * n2, 2.1 * n2)
}

/// sin²(π/2N), exact where the value is a dyadic rational.
fn half_angle_sin_sq(n_atoms: usize) -> f64 {
    match n_atoms {
        2 => 0.5,
        3 => 0.25,
        n => (PI / (2.0 * n as f64)).sin().powi(2),
    }
}

/// β = (4 / sin²(π/2N)) Σ_{odd k ≤ N_m} 1/k³.
pub fn beta_exponent(n_atoms: usize, n_modes: usize) -> Result<f64> {
    check_chain(n_atoms, n_modes)?;
    let sum: f64 = (1..=n_modes).step_by(2).map(|k| 1.0 / (k as f64).powi(3)).sum();
    let beta = 4.0 / half_angle_sin_sq(n_atoms) * sum;
    let (lo, hi) = beta_bounds(n_atoms);
    if !(beta > lo && beta < hi) {
        return Err(Error::Inconsistent(format!(
            "beta({n_atoms}, {n_modes}) = {beta} outside ({lo}, {hi})"
        )));
    }
    Ok(beta)
}

/// The pair (|G_+⟩, |G_−⟩) on the full space.
pub fn vacuum_pair(spec: &ManyBodySpec) -> Result<(Wavefunction, Wavefunction)> {
    let (p, _) = asymptotic_vacuum(spec, VacuumSign::Plus)?;
    let (m, _) = asymptotic_vacuum(spec, VacuumSign::Minus)?;
    Ok((p, m))
}
