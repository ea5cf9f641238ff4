#![allow(dead_code)]

use std::f64::consts::PI;

use faer::{c64, Mat, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn kron(a: &Mat<c64>, b: &Mat<c64>) -> Mat<c64> {
    let (ra, ca, rb, cb) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    Mat::from_fn(ra * rb, ca * cb, |i, j| a[(i / rb, j / cb)] * b[(i % rb, j % cb)])
}

fn scaled(m: &Mat<c64>, x: f64) -> Mat<c64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * x)
}

fn identity(n: usize) -> Mat<c64> {
    Mat::from_fn(n, n, |i, j| if i == j { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) })
}

/// Tensor product ordered slowest first: mode N_m … mode 1, spin N … spin 1.
fn embed(factors: &[Mat<c64>]) -> Mat<c64> {
    factors[1..].iter().fold(factors[0].clone(), |acc, f| kron(&acc, f))
}

fn site_dims(n_atoms: usize, cutoffs: &[usize]) -> Vec<usize> {
    let mut d: Vec<usize> = cutoffs.iter().rev().map(|c| c + 1).collect();
    d.extend(std::iter::repeat(2).take(n_atoms));
    d
}

fn site_position(n_atoms: usize, cutoffs: &[usize], spin: Option<usize>, mode: Option<usize>) -> usize {
    let nm = cutoffs.len();
    match (spin, mode) {
        (Some(j), None) => nm + (n_atoms - 1 - j),
        (None, Some(k)) => nm - 1 - k,
        _ => unreachable!(),
    }
}

fn single(n_atoms: usize, cutoffs: &[usize], pos: usize, op: &Mat<c64>) -> Mat<c64> {
    let dims = site_dims(n_atoms, cutoffs);
    let factors: Vec<Mat<c64>> = dims
        .iter()
        .enumerate()
        .map(|(i, &d)| if i == pos { op.clone() } else { identity(d) })
        .collect();
    embed(&factors)
}

/// c_kj from the generic chain formula, written independently of the library.
pub fn chain_coupling(n: usize, k: usize, j: usize, g: f64, omega_1: f64) -> f64 {
    let nf = n as f64;
    let omega_rabi_1 = g * nf.sqrt() * omega_1;
    let ratio = (k as f64 * PI / (2.0 * nf)).sin() / ((PI / (2.0 * nf)).sin() * (k as f64).sqrt());
    let arg = k as f64 * PI * (j as f64 - (nf + 1.0) / 2.0) / nf;
    let shape = if k % 2 == 1 { arg.cos() } else { arg.sin() };
    omega_rabi_1 * ratio * (2.0 / nf).sqrt() * shape
}

/// Dense Hamiltonian assembled from Kronecker products, 1-based j and k.
pub fn oracle_hamiltonian(
    n_atoms: usize,
    n_modes: usize,
    g: f64,
    omega_f: &[f64],
    omega_1: f64,
    cutoffs: &[usize],
) -> Mat<c64> {
    let z = c64::new(0.0, 0.0);
    let sz = Mat::from_fn(2, 2, |i, j| if i == j { c64::new(if i == 1 { 1.0 } else { -1.0 }, 0.0) } else { z });
    let sx = Mat::from_fn(2, 2, |i, j| if i != j { c64::new(1.0, 0.0) } else { z });
    let dim: usize = site_dims(n_atoms, cutoffs).iter().product();
    let mut h = Mat::<c64>::zeros(dim, dim);
    for k in 0..n_modes {
        let d = cutoffs[k] + 1;
        let a = Mat::from_fn(d, d, |i, j| if j == i + 1 { c64::new((j as f64).sqrt(), 0.0) } else { z });
        let num = Mat::from_fn(d, d, |i, j| if i == j { c64::new(i as f64, 0.0) } else { z });
        let pos = site_position(n_atoms, cutoffs, None, Some(k));
        let wk = (k + 1) as f64 * omega_1;
        h += scaled(&single(n_atoms, cutoffs, pos, &num), wk);
        // i (a - a†)
        let quad = Mat::from_fn(d, d, |i, j| c64::new(0.0, 1.0) * (a[(i, j)] - a[(j, i)].conj()));
        let quad_full = single(n_atoms, cutoffs, pos, &quad);
        for j in 0..n_atoms {
            let c = chain_coupling(n_atoms, k + 1, j + 1, g, omega_1);
            let sx_full = single(n_atoms, cutoffs, site_position(n_atoms, cutoffs, Some(j), None), &sx);
            h += scaled(&(&quad_full * &sx_full), c);
        }
    }
    for j in 0..n_atoms {
        let pos = site_position(n_atoms, cutoffs, Some(j), None);
        h += scaled(&single(n_atoms, cutoffs, pos, &sz), omega_f[j] / 2.0);
    }
    h
}

/// Diagonal of Π = Π_j σz_j · (−1)^{Σ n_k}, in the same ordering.
pub fn oracle_parity(n_atoms: usize, cutoffs: &[usize]) -> Vec<f64> {
    let dims = site_dims(n_atoms, cutoffs);
    let dim: usize = dims.iter().product();
    let nm = cutoffs.len();
    (0..dim)
        .map(|mut i| {
            let mut sign = 1.0;
            for (pos, &d) in dims.iter().enumerate().rev() {
                let digit = i % d;
                i /= d;
                let flip = if pos < nm { digit % 2 == 1 } else { digit == 0 };
                if flip {
                    sign = -sign;
                }
            }
            sign
        })
        .collect()
}

pub fn hermitian_eigenvalues(m: &Mat<c64>) -> Vec<f64> {
    let e = m.self_adjoint_eigen(Side::Lower).unwrap();
    let s = e.S();
    let mut v: Vec<f64> = (0..m.nrows()).map(|i| s[i].re).collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn random_vector(dim: usize, seed: u64) -> Vec<c64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..dim)
        .map(|_| c64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

pub fn inner(a: &[c64], b: &[c64]) -> c64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
