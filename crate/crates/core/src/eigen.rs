//! Lowest eigenpairs of Hermitian operators available only through a matvec.
//!
//! Thick-restart Lanczos with full reorthogonalization; converged pairs are
//! locked and projected out so that the search proceeds in their orthogonal
//! complement. Small problems go through a dense Hermitian eigensolver.
//! All reductions are chunked in a fixed order so results do not depend on
//! the thread count.

use faer::{c64, Mat, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};

const CHUNK: usize = 1 << 14;
const REORTH_RATIO: f64 = 0.717;

pub trait HermitianOperator: Sync {
    fn dim(&self) -> usize;

    /// y ← A x.
    fn apply(&self, x: &[c64], y: &mut [c64]);

    fn to_dense(&self) -> Mat<c64> {
        let n = self.dim();
        let mut out = Mat::<c64>::zeros(n, n);
        let mut e = vec![c64::new(0.0, 0.0); n];
        let mut col = vec![c64::new(0.0, 0.0); n];
        for j in 0..n {
            e[j] = c64::new(1.0, 0.0);
            self.apply(&e, &mut col);
            e[j] = c64::new(0.0, 0.0);
            for (i, &v) in col.iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EigenOptions {
    /// Residual bound ‖Av − λv‖ for every returned pair.
    pub tol: f64,
    /// Krylov basis size per restart cycle.
    pub max_basis: usize,
    pub max_restarts: usize,
    /// Problems up to this dimension are solved densely.
    pub dense_threshold: usize,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_basis: 20,
            max_restarts: 400,
            dense_threshold: 1024,
            seed: 0x5eed_1a2c,
        }
    }
}

impl EigenOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return domain("eigensolver tolerance must be positive");
        }
        if self.max_basis < 4 {
            return domain("max_basis must be at least 4");
        }
        if self.max_restarts == 0 {
            return domain("max_restarts must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<c64>>,
    pub residuals: Vec<f64>,
    /// Matrix-vector products spent on each pair (0 on the dense path).
    pub matvecs: Vec<usize>,
    pub dense: bool,
}

pub fn dot(a: &[c64], b: &[c64]) -> c64 {
    if a.len() <= CHUNK {
        return a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    }
    let partial: Vec<c64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p.conj() * q).sum())
        .collect();
    partial.into_iter().sum()
}

pub fn norm(a: &[c64]) -> f64 {
    if a.len() <= CHUNK {
        return a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    }
    let partial: Vec<f64> = a
        .par_chunks(CHUNK)
        .map(|x| x.iter().map(|p| p.norm_sqr()).sum())
        .collect();
    partial.into_iter().sum::<f64>().sqrt()
}

/// y ← y + s x.
pub fn axpy(s: c64, x: &[c64], y: &mut [c64]) {
    if y.len() <= CHUNK {
        y.iter_mut().zip(x).for_each(|(p, q)| *p += s * q);
        return;
    }
    y.par_chunks_mut(CHUNK)
        .zip(x.par_chunks(CHUNK))
        .for_each(|(p, q)| p.iter_mut().zip(q).for_each(|(a, b)| *a += s * b));
}

fn scale(s: f64, x: &mut [c64]) {
    x.par_chunks_mut(CHUNK)
        .for_each(|p| p.iter_mut().for_each(|a| *a *= s));
}

/// One classical Gram-Schmidt pass; returns the removed coefficients.
fn project_out(w: &mut [c64], basis: &[Vec<c64>]) -> Vec<c64> {
    basis
        .iter()
        .map(|v| {
            let c = dot(v, w);
            axpy(-c, v, w);
            c
        })
        .collect()
}

/// Two passes of classical Gram-Schmidt against `basis`.
fn orthogonalize(w: &mut [c64], basis: &[Vec<c64>]) {
    for _ in 0..2 {
        project_out(w, basis);
    }
}

/// ‖A x − λ x‖.
pub fn residual<A: HermitianOperator + ?Sized>(op: &A, x: &[c64], lambda: f64) -> f64 {
    let mut ax = vec![c64::new(0.0, 0.0); x.len()];
    op.apply(x, &mut ax);
    axpy(c64::new(-lambda, 0.0), x, &mut ax);
    norm(&ax)
}

/// Uniform magnitude, pseudo-random phases.
pub fn start_vector(dim: usize, seed: u64) -> Vec<c64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amp = 1.0 / (dim as f64).sqrt();
    (0..dim)
        .map(|_| c64::from_polar(amp, rng.gen::<f64>() * std::f64::consts::TAU))
        .collect()
}

pub fn lowest_eigenpairs<A: HermitianOperator + ?Sized>(
    op: &A,
    count: usize,
    opts: &EigenOptions,
) -> Result<Eigenpairs> {
    opts.validate()?;
    let n = op.dim();
    if count == 0 {
        return domain("requested eigenpair count must be at least 1");
    }
    if count > n {
        return domain(format!("requested {count} eigenpairs of a {n}-dimensional operator"));
    }
    if n <= opts.dense_threshold {
        dense_eigenpairs(op, count)
    } else {
        lanczos_eigenpairs(op, count, opts)
    }
}

pub fn dense_eigenpairs<A: HermitianOperator + ?Sized>(op: &A, count: usize) -> Result<Eigenpairs> {
    let n = op.dim();
    let a = op.to_dense();
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Backend(format!("{e:?}")))?;
    let s = evd.S();
    let u = evd.U();
    let mut out = Eigenpairs {
        values: Vec::with_capacity(count),
        vectors: Vec::with_capacity(count),
        residuals: Vec::with_capacity(count),
        matvecs: vec![0; count],
        dense: true,
    };
    for k in 0..count {
        let lambda = s[k].re;
        let v: Vec<c64> = (0..n).map(|i| u[(i, k)]).collect();
        out.residuals.push(residual(op, &v, lambda));
        out.values.push(lambda);
        out.vectors.push(v);
    }
    Ok(out)
}

/// Columns of `basis` combined with the coefficient columns `coef[c]`.
fn combine(basis: &[Vec<c64>], coef: &[Vec<c64>]) -> Vec<Vec<c64>> {
    let n = basis.first().map_or(0, Vec::len);
    let mut out = vec![vec![c64::new(0.0, 0.0); n]; coef.len()];
    for (x, y) in out.iter_mut().zip(coef) {
        x.par_chunks_mut(CHUNK).enumerate().for_each(|(c, part)| {
            let (off, len) = (c * CHUNK, part.len());
            for (v, &w) in basis.iter().zip(y) {
                for (p, q) in part.iter_mut().zip(&v[off..off + len]) {
                    *p += w * q;
                }
            }
        });
    }
    out
}

/// Unit vector orthogonal to `locked` and `basis`, from a seeded start.
fn fresh_vector(n: usize, seed: u64, locked: &[Vec<c64>], basis: &[Vec<c64>]) -> Option<Vec<c64>> {
    let mut v = start_vector(n, seed);
    orthogonalize(&mut v, locked);
    orthogonalize(&mut v, basis);
    let vn = norm(&v);
    if vn < 1e-8 {
        return None;
    }
    scale(1.0 / vn, &mut v);
    Some(v)
}

/// Thick-restart Lanczos with locking.
///
/// The search space V satisfies A V = V H + f e_last†, H = V† A V. At each
/// restart the lowest unconverged Ritz vectors are kept and the expansion
/// continues from f. Converged pairs (true residual ≤ tol) are locked and
/// deflated. Once `count` pairs are locked, a cycle from a fresh vector in
/// the deflated complement checks that no lower eigenvalue was skipped.
pub fn lanczos_eigenpairs<A: HermitianOperator + ?Sized>(
    op: &A,
    count: usize,
    opts: &EigenOptions,
) -> Result<Eigenpairs> {
    opts.validate()?;
    let n = op.dim();
    if count == 0 || count > n {
        return domain(format!("requested {count} eigenpairs of a {n}-dimensional operator"));
    }
    let zero = c64::new(0.0, 0.0);
    let mut locked: Vec<Vec<c64>> = Vec::with_capacity(count);
    let mut locked_vals: Vec<f64> = Vec::with_capacity(count);
    let mut locked_res: Vec<f64> = Vec::with_capacity(count);
    let mut locked_mv: Vec<usize> = Vec::with_capacity(count);
    let mut basis: Vec<Vec<c64>> = Vec::new();
    let mut h: Vec<Vec<c64>> = Vec::new();
    let mut next = fresh_vector(n, opts.seed, &[], &[]).expect("nonzero start");
    let mut fresh_seeds = 1u64;
    let mut spent = 0usize;
    let mut since_lock = 0usize;
    let mut verifying = false;
    let mut best: Vec<f64> = Vec::new();
    let mut w = vec![zero; n];
    for _cycle in 0..opts.max_restarts {
        let limit = opts.max_basis.min(n - locked.len());
        let mut f_norm = 0.0;
        let mut f = Vec::new();
        while basis.len() < limit {
            basis.push(std::mem::take(&mut next));
            let j = basis.len() - 1;
            op.apply(&basis[j], &mut w);
            spent += 1;
            since_lock += 1;
            let mut col = vec![zero; j + 1];
            let mut before = norm(&w);
            for _ in 0..2 {
                for (a, b) in col.iter_mut().zip(project_out(&mut w, &basis)) {
                    *a += b;
                }
                project_out(&mut w, &locked);
                let after = norm(&w);
                // Second pass only when cancellation was severe.
                if after > REORTH_RATIO * before {
                    break;
                }
                before = after;
            }
            for row in h.iter_mut() {
                row.push(zero);
            }
            h.push(vec![zero; j + 1]);
            for i in 0..j {
                h[i][j] = col[i];
                h[j][i] = col[i].conj();
            }
            h[j][j] = c64::new(col[j].re, 0.0);
            let b = norm(&w);
            let scale_ref = col.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
            let exhausted = b <= 1e-12 * scale_ref.max(f64::MIN_POSITIVE);
            if basis.len() == limit {
                if !exhausted {
                    f_norm = b;
                    f = w.clone();
                }
                break;
            }
            next = if exhausted {
                fresh_seeds += 1;
                match fresh_vector(n, opts.seed.wrapping_add(fresh_seeds), &locked, &basis) {
                    Some(v) => v,
                    None => break,
                }
            } else {
                let mut v = w.clone();
                scale(1.0 / b, &mut v);
                v
            };
        }

        let k = basis.len();
        let hm = Mat::<c64>::from_fn(k, k, |i, j| h[i][j]);
        let evd = hm
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Backend(format!("{e:?}")))?;
        let (theta, y) = (evd.S(), evd.U());
        let theta: Vec<f64> = (0..k).map(|i| theta[i].re).collect();
        let ycol = |i: usize| -> Vec<c64> { (0..k).map(|r| y[(r, i)]).collect() };

        if verifying {
            verifying = false;
            let top = locked_vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if theta[0] >= top - opts.tol {
                break;
            }
            // A lower eigenvalue was missed: release the highest locked pair.
            let idx = locked_vals.iter().position(|&x| x == top).expect("present");
            locked.remove(idx);
            locked_vals.remove(idx);
            locked_res.remove(idx);
            locked_mv.remove(idx);
        }

        let want = count - locked.len();
        let mut newly = Vec::new();
        best.clear();
        for i in 0..want.min(k) {
            let estimate = f_norm * y[(k - 1, i)].norm();
            if estimate > opts.tol {
                best.push(estimate);
                continue;
            }
            let x = combine(&basis, &[ycol(i)]).pop().expect("one");
            let r = residual(op, &x, theta[i]);
            spent += 1;
            since_lock += 1;
            best.push(r);
            if r <= opts.tol {
                newly.push((i, x, r));
            }
        }
        let locked_idx: Vec<usize> = newly.iter().map(|t| t.0).collect();
        for (i, mut x, r) in newly {
            orthogonalize(&mut x, &locked);
            let xn = norm(&x);
            scale(1.0 / xn, &mut x);
            locked.push(x);
            locked_vals.push(theta[i]);
            locked_res.push(r);
            locked_mv.push(since_lock);
            since_lock = 0;
        }

        let want = count - locked.len();
        if want == 0 {
            // Verify from a fresh vector in the deflated complement.
            if locked.len() == n {
                break;
            }
            fresh_seeds += 1;
            let Some(v) = fresh_vector(n, opts.seed.wrapping_add(fresh_seeds), &locked, &[]) else {
                break;
            };
            basis.clear();
            h.clear();
            next = v;
            verifying = true;
            continue;
        }

        let keep_target = (want + want.max(6)).min(limit / 2).max(1);
        let keep: Vec<usize> = (0..k).filter(|i| !locked_idx.contains(i)).take(keep_target).collect();
        let coef: Vec<Vec<c64>> = keep.iter().map(|&i| ycol(i)).collect();
        basis = combine(&basis, &coef);
        h = (0..keep.len())
            .map(|a| {
                (0..keep.len())
                    .map(|b| if a == b { c64::new(theta[keep[a]], 0.0) } else { zero })
                    .collect()
            })
            .collect();
        next = if f_norm > 0.0 {
            let mut v = f;
            scale(1.0 / f_norm, &mut v);
            v
        } else {
            fresh_seeds += 1;
            match fresh_vector(n, opts.seed.wrapping_add(fresh_seeds), &locked, &basis) {
                Some(v) => v,
                None => {
                    return Err(Error::NotConverged {
                        iterations: spent,
                        residuals: best.clone(),
                        detail: format!("Krylov space exhausted (dimension {n})"),
                    })
                }
            }
        };
    }
    if locked.len() < count || verifying {
        let mut residuals = locked_res.clone();
        residuals.extend(best.iter().take(count.saturating_sub(locked.len())));
        return Err(Error::NotConverged {
            iterations: spent,
            residuals,
            detail: format!(
                "Lanczos found {} of {count} eigenpairs (dimension {n})",
                locked.len()
            ),
        });
    }
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by(|&a, &b| locked_vals[a].total_cmp(&locked_vals[b]));
    let mut slots: Vec<Option<Vec<c64>>> = locked.into_iter().map(Some).collect();
    Ok(Eigenpairs {
        values: order.iter().map(|&i| locked_vals[i]).collect(),
        residuals: order.iter().map(|&i| locked_res[i]).collect(),
        matvecs: order.iter().map(|&i| locked_mv[i]).collect(),
        vectors: order.iter().map(|&i| slots[i].take().expect("unique")).collect(),
        dense: false,
    })
}
