//! Lowest eigenpairs of real symmetric tridiagonal matrices by Sturm-sequence
//! bisection and inverse iteration.

/// Real symmetric tridiagonal matrix given by its diagonal and off-diagonal.
#[derive(Debug, Clone, Copy)]
pub struct SymTridiagonal<'a> {
    pub diag: &'a [f64],
    pub off: &'a [f64],
}

impl<'a> SymTridiagonal<'a> {
    pub fn new(diag: &'a [f64], off: &'a [f64]) -> Self {
        assert_eq!(off.len() + 1, diag.len().max(1), "off-diagonal length");
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let pivmin = f64::MIN_POSITIVE.sqrt();
        let clamp = |q: f64| if q.abs() < pivmin { -pivmin } else { q };
        let mut q = clamp(self.diag[0] - x);
        let mut count = usize::from(q < 0.0);
        for i in 1..self.len() {
            q = clamp(self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / q);
            count += usize::from(q < 0.0);
        }
        count
    }

    /// The `k`-th smallest eigenvalue (zero-based) to full working precision.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        assert!(k < self.len());
        let (mut lo, mut hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        for _ in 0..256 {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= 2.0 * f64::EPSILON * scale || mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn lowest_eigenvalues(&self, count: usize) -> Vec<f64> {
        (0..count.min(self.len())).map(|k| self.eigenvalue(k)).collect()
    }

    /// Lowest `count` eigenpairs with unit-norm eigenvectors.
    pub fn lowest_eigenpairs(&self, count: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
        let values = self.lowest_eigenvalues(count);
        let scale = {
            let (lo, hi) = self.gershgorin();
            lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE)
        };
        let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(values.len());
        for (idx, &lambda) in values.iter().enumerate() {
            let lu = ShiftedLu::factor(self, lambda, scale);
            let n = self.len();
            let mut x: Vec<f64> = (0..n)
                .map(|i| 1.0 + 0.1 * ((i * 7 + idx * 3) % 11) as f64)
                .collect();
            for _ in 0..4 {
                lu.solve_in_place(&mut x);
                // Keep clustered eigenvectors apart.
                for (v, &mu) in vectors.iter().zip(&values) {
                    if (mu - lambda).abs() < 1e-6 * scale {
                        let dot: f64 = v.iter().zip(&x).map(|(a, b)| a * b).sum();
                        x.iter_mut().zip(v).for_each(|(xi, vi)| *xi -= dot * vi);
                    }
                }
                let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                x.iter_mut().for_each(|v| *v /= norm);
            }
            vectors.push(x);
        }
        (values, vectors)
    }
}

/// LU factorization of `T - λI` with partial pivoting; `U` has two
/// superdiagonals.
struct ShiftedLu {
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    mult: Vec<f64>,
    swap: Vec<bool>,
}

impl ShiftedLu {
    fn factor(t: &SymTridiagonal<'_>, lambda: f64, scale: f64) -> Self {
        let n = t.len();
        let mut u0 = vec![0.0; n];
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut mult = vec![0.0; n];
        let mut swap = vec![false; n];
        let mut p0 = t.diag[0] - lambda;
        let mut p1 = if n > 1 { t.off[0] } else { 0.0 };
        for i in 0..n.saturating_sub(1) {
            let c = t.off[i];
            let a_next = t.diag[i + 1] - lambda;
            let b_next = if i + 2 < n { t.off[i + 1] } else { 0.0 };
            if p0.abs() >= c.abs() {
                let m = if p0 == 0.0 { 0.0 } else { c / p0 };
                u0[i] = p0;
                u1[i] = p1;
                u2[i] = 0.0;
                mult[i] = m;
                p0 = a_next - m * p1;
                p1 = b_next;
            } else {
                let m = p0 / c;
                u0[i] = c;
                u1[i] = a_next;
                u2[i] = b_next;
                mult[i] = m;
                swap[i] = true;
                p0 = p1 - m * a_next;
                p1 = -m * b_next;
            }
        }
        u0[n - 1] = p0;
        let floor = f64::EPSILON * scale;
        for d in u0.iter_mut() {
            if d.abs() < floor {
                *d = if *d < 0.0 { -floor } else { floor };
            }
        }
        Self {
            u0,
            u1,
            u2,
            mult,
            swap,
        }
    }

    fn solve_in_place(&self, y: &mut [f64]) {
        let n = y.len();
        let mut pending = y[0];
        for i in 0..n - 1 {
            let next = y[i + 1];
            if self.swap[i] {
                y[i] = next;
                pending -= self.mult[i] * next;
            } else {
                y[i] = pending;
                pending = next - self.mult[i] * pending;
            }
        }
        y[n - 1] = pending;
        for i in (0..n).rev() {
            let mut s = y[i];
            if i + 1 < n {
                s -= self.u1[i] * y[i + 1];
            }
            if i + 2 < n {
                s -= self.u2[i] * y[i + 2];
            }
            y[i] = s / self.u0[i];
        }
    }
}
