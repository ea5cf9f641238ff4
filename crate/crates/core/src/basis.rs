//! Product basis of N two-level atoms and N_m truncated oscillators.
//!
//! A full-space state (s, n_1..n_Nm) sits at `s + 2^N * m`, where `s` holds
//! the spin bits (bit j set = atom j up, σ_z = +1) and `m` packs occupations
//! in mixed radix with mode 1 fastest. A parity sector keeps only the states
//! with Π = (Π_j σ_z,j)(-1)^{Σ n_k} equal to its eigenvalue; there the top
//! spin bit is implied and the index is `(s mod 2^{N-1}) + 2^{N-1} * m`.

use faer::c64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Largest supported spin count (spin bits are kept in a `u32`).
pub const MAX_SPINS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    Even,
    Odd,
}

impl Sector {
    pub fn eigenvalue(self) -> f64 {
        match self {
            Sector::Even => 1.0,
            Sector::Odd => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Sector::Even => "even",
            Sector::Odd => "odd",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisIndexer {
    n_spins: usize,
    cutoffs: Vec<usize>,
    sector: Option<Sector>,
    strides: Vec<usize>,
    n_mode_states: usize,
    /// occupations[m * n_modes + k]
    occupations: Vec<u32>,
    /// Parity of Σ_k n_k for each mode configuration.
    photon_odd: Vec<bool>,
    dim: usize,
}

impl BasisIndexer {
    pub fn new(n_spins: usize, cutoffs: &[usize], sector: Option<Sector>) -> Result<Self> {
        if n_spins == 0 || n_spins > MAX_SPINS {
            return domain(format!("spin count must be in 1..={MAX_SPINS}, got {n_spins}"));
        }
        if cutoffs.iter().any(|&c| c == 0) {
            return domain("every Fock cutoff must be at least 1");
        }
        let mut strides = Vec::with_capacity(cutoffs.len());
        let mut n_mode_states: usize = 1;
        for &c in cutoffs {
            strides.push(n_mode_states);
            n_mode_states = n_mode_states
                .checked_mul(c + 1)
                .ok_or_else(|| Error::TooLarge("mode space overflows usize".into()))?;
        }
        let spin_states = 1usize << n_spins;
        let full = spin_states
            .checked_mul(n_mode_states)
            .ok_or_else(|| Error::TooLarge("basis dimension overflows usize".into()))?;
        let dim = if sector.is_some() { full / 2 } else { full };
        let n_modes = cutoffs.len();
        let mut occupations = vec![0u32; n_mode_states * n_modes];
        let mut photon_odd = vec![false; n_mode_states];
        for m in 0..n_mode_states {
            let mut total = 0;
            for k in 0..n_modes {
                let n = (m / strides[k]) % (cutoffs[k] + 1);
                occupations[m * n_modes + k] = n as u32;
                total += n;
            }
            photon_odd[m] = total % 2 == 1;
        }
        Ok(Self {
            n_spins,
            cutoffs: cutoffs.to_vec(),
            sector,
            strides,
            n_mode_states,
            occupations,
            photon_odd,
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the unrestricted product space.
    pub fn full_dim(&self) -> usize {
        (1usize << self.n_spins) * self.n_mode_states
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn n_modes(&self) -> usize {
        self.cutoffs.len()
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }

    pub fn sector(&self) -> Option<Sector> {
        self.sector
    }

    pub fn n_mode_states(&self) -> usize {
        self.n_mode_states
    }

    pub fn stride(&self, k: usize) -> usize {
        self.strides[k]
    }

    pub fn occupations(&self, m: usize) -> &[u32] {
        let n = self.cutoffs.len();
        &self.occupations[m * n..(m + 1) * n]
    }

    pub fn photon_parity_odd(&self, m: usize) -> bool {
        self.photon_odd[m]
    }

    /// Bits addressed directly by the index (all spins, or all but the top one in a sector).
    pub fn free_spin_bits(&self) -> usize {
        if self.sector.is_some() {
            self.n_spins - 1
        } else {
            self.n_spins
        }
    }

    /// Π eigenvalue of the basis state (s, m) as ±1.
    pub fn parity_of(&self, spins: u32, m: usize) -> f64 {
        let down = self.n_spins as u32 - spins.count_ones();
        if (down % 2 == 1) ^ self.photon_odd[m] {
            -1.0
        } else {
            1.0
        }
    }

    /// Spin bits and mode configuration of a basis index.
    pub fn decode(&self, index: usize) -> (u32, usize) {
        let bits = self.free_spin_bits();
        let low = (index & ((1usize << bits) - 1)) as u32;
        let m = index >> bits;
        match self.sector {
            None => (low, m),
            Some(sector) => {
                let top = 1u32 << (self.n_spins - 1);
                let s = if self.parity_of(low, m) == sector.eigenvalue() {
                    low
                } else {
                    low | top
                };
                (s, m)
            }
        }
    }

    /// Index of (s, m), or `None` when the state lies outside the sector.
    pub fn encode(&self, spins: u32, m: usize) -> Option<usize> {
        if m >= self.n_mode_states || (spins as usize) >> self.n_spins != 0 {
            return None;
        }
        match self.sector {
            None => Some(spins as usize + (m << self.n_spins)),
            Some(sector) => {
                if self.parity_of(spins, m) != sector.eigenvalue() {
                    return None;
                }
                let bits = self.n_spins - 1;
                Some((spins as usize & ((1usize << bits) - 1)) + (m << bits))
            }
        }
    }

    /// Mode configuration index for a list of occupations.
    pub fn mode_index(&self, occupations: &[usize]) -> Option<usize> {
        if occupations.len() != self.cutoffs.len() {
            return None;
        }
        let mut m = 0;
        for (k, &n) in occupations.iter().enumerate() {
            if n > self.cutoffs[k] {
                return None;
            }
            m += n * self.strides[k];
        }
        Some(m)
    }

    /// Same cutoffs and spins, no sector restriction.
    pub fn full_space(&self) -> Self {
        let mut full = self.clone();
        full.sector = None;
        full.dim = full.full_dim();
        full
    }
}

/// Complex amplitudes over a [`BasisIndexer`] (dimension checked at use).
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    pub amplitudes: Vec<c64>,
}

impl Wavefunction {
    pub fn zeros(dim: usize) -> Self {
        Self {
            amplitudes: vec![c64::new(0.0, 0.0); dim],
        }
    }

    pub fn from_amplitudes(amplitudes: Vec<c64>) -> Self {
        Self { amplitudes }
    }

    pub fn basis_state(dim: usize, index: usize) -> Self {
        let mut w = Self::zeros(dim);
        w.amplitudes[index] = c64::new(1.0, 0.0);
        w
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn check_dim(&self, basis: &BasisIndexer) -> Result<()> {
        if self.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                got: self.len(),
            });
        }
        Ok(())
    }

    pub fn norm(&self) -> f64 {
        crate::eigen::norm(&self.amplitudes)
    }

    pub fn normalize(&mut self) -> Result<f64> {
        let n = self.norm();
        if !(n > 0.0 && n.is_finite()) {
            return domain("cannot normalize a zero or non-finite vector");
        }
        let inv = 1.0 / n;
        self.amplitudes.iter_mut().for_each(|a| *a *= inv);
        Ok(n)
    }

    /// ⟨self|other⟩, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> Result<c64> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(crate::eigen::dot(&self.amplitudes, &other.amplitudes))
    }

    /// Places a sector vector into the unrestricted space of the same cutoffs.
    pub fn embed(&self, sector_basis: &BasisIndexer) -> Result<Self> {
        self.check_dim(sector_basis)?;
        let full = sector_basis.full_space();
        let mut out = Self::zeros(full.dim());
        for (i, &a) in self.amplitudes.iter().enumerate() {
            let (s, m) = sector_basis.decode(i);
            let j = full.encode(s, m).expect("sector state lies in the full space");
            out.amplitudes[j] = a;
        }
        Ok(out)
    }

    /// Restricts a full-space vector to one parity sector (no renormalization).
    pub fn restrict(&self, full: &BasisIndexer, sector: Sector) -> Result<Self> {
        self.check_dim(full)?;
        let target = BasisIndexer::new(full.n_spins(), full.cutoffs(), Some(sector))?;
        let mut out = Self::zeros(target.dim());
        for (i, a) in out.amplitudes.iter_mut().enumerate() {
            let (s, m) = target.decode(i);
            *a = self.amplitudes[full.encode(s, m).expect("in range")];
        }
        Ok(out)
    }
}
