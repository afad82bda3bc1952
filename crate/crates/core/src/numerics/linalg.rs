//! Dense real matrices and the eigenvalue routines needed for the Galerkin
//! pencils `(D + λC, B)`.
//!
//! The generalized problem `A u = h B u` is reduced to `B⁻¹A` with an LU
//! factorization of `B`; the B matrices are multiplication operators by a
//! strictly positive function, so they are well conditioned at the sizes used
//! here. Eigenvalues of the reduced matrix come from balancing, Householder
//! reduction to Hessenberg form and the Francis double-shift QR iteration.

use std::ops::{Index, IndexMut};

use crate::{Error, Result};

/// Relative pivot threshold below which `B` is considered singular.
const PIVOT_THRESHOLD: f64 = 1e-13;
/// Eigenvalues with a larger imaginary part (relative to `max(1, |re|)`) are
/// treated as spurious and dropped.
const IMAG_THRESHOLD: f64 = 1e-8;
const MAX_INVERSE_ITERATIONS: usize = 10;
const INVERSE_ITERATION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite matrix entry {bad}")));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_frobenius(&self) -> f64 {
        self.entries.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// `self + alpha · other`.
    pub fn add_scaled(&self, alpha: f64, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + alpha * b).collect();
        DenseMatrix { rows: self.rows, cols: self.cols, entries }
    }

    /// Number of non-zero diagonals above and below the main one.
    pub fn bandwidth(&self) -> (usize, usize) {
        let (mut lower, mut upper) = (0, 0);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self[(i, j)] != 0.0 {
                    if i > j {
                        lower = lower.max(i - j);
                    } else {
                        upper = upper.max(j - i);
                    }
                }
            }
        }
        (lower, upper)
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.entries[i * self.cols + j]
    }
}

/// `P·M = L·U` with partial pivoting; `L` has a unit diagonal and is stored
/// below the diagonal of `lu`.
#[derive(Debug, Clone)]
pub struct LuFactorization {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl LuFactorization {
    /// Fails when a pivot falls below `1e-13 · ‖M‖∞`.
    pub fn factor(m: &DenseMatrix) -> Result<Self> {
        let threshold = PIVOT_THRESHOLD * m.norm_inf();
        Self::factor_inner(m, Some(threshold))
    }

    /// Never fails: tiny pivots are replaced by `ε·‖M‖∞`. Used for shifted
    /// systems that are singular on purpose.
    fn factor_regularized(m: &DenseMatrix) -> Self {
        Self::factor_inner(m, None).expect("regularized LU cannot fail")
    }

    fn factor_inner(m: &DenseMatrix, threshold: Option<f64>) -> Result<Self> {
        assert!(m.is_square(), "LU of a non-square matrix");
        let n = m.rows;
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let floor = f64::EPSILON * m.norm_inf().max(f64::MIN_POSITIVE);
        for col in 0..n {
            let pivot_row = (col..n)
                .max_by(|&a, &b| lu[(a, col)].abs().total_cmp(&lu[(b, col)].abs()))
                .unwrap();
            let pivot = lu[(pivot_row, col)];
            match threshold {
                Some(t) if !(pivot.abs() >= t) || pivot == 0.0 => {
                    return Err(Error::SingularMatrix { pivot: pivot.abs(), threshold: t });
                }
                _ => {}
            }
            if pivot_row != col {
                for j in 0..n {
                    lu.entries.swap(col * n + j, pivot_row * n + j);
                }
                perm.swap(col, pivot_row);
            }
            if lu[(col, col)].abs() < floor {
                lu[(col, col)] = floor.copysign(lu[(col, col)]);
            }
            let p = lu[(col, col)];
            for i in col + 1..n {
                let factor = lu[(i, col)] / p;
                lu[(i, col)] = factor;
                if factor != 0.0 {
                    for j in col + 1..n {
                        lu[(i, j)] -= factor * lu[(col, j)];
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.lu.rows;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[(i, i)];
        }
        x
    }

    /// `M⁻¹ · A`, column by column.
    pub fn solve_matrix(&self, a: &DenseMatrix) -> DenseMatrix {
        let n = self.lu.rows;
        assert_eq!(a.rows, n);
        let mut out = DenseMatrix::zeros(n, a.cols);
        let mut column = vec![0.0; n];
        for j in 0..a.cols {
            for i in 0..n {
                column[i] = a[(i, j)];
            }
            let x = self.solve(&column);
            for i in 0..n {
                out[(i, j)] = x[i];
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexEigenvalue {
    pub re: f64,
    pub im: f64,
}

/// All eigenvalues of a real square matrix, in no particular order.
pub fn eigenvalues(a: &DenseMatrix) -> Result<Vec<ComplexEigenvalue>> {
    if !a.is_square() {
        return Err(Error::InvalidArgument("eigenvalues of a non-square matrix".into()));
    }
    let mut h = a.clone();
    balance(&mut h);
    hessenberg(&mut h);
    hqr(&h)
}

/// Real eigenvalues `h` of `A u = h B u`, ascending.
///
/// Eigenvalues with `|im| > 1e-8 · max(1, |re|)` are discarded.
pub fn real_generalized_eigenvalues(a: &DenseMatrix, b: &DenseMatrix) -> Result<Vec<f64>> {
    if !a.is_square() || !b.is_square() || a.rows != b.rows {
        return Err(Error::InvalidArgument(format!(
            "generalized eigenproblem needs equal square matrices, got {}x{} and {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let lu = LuFactorization::factor(b)?;
    let reduced = lu.solve_matrix(a);
    let mut values: Vec<f64> = eigenvalues(&reduced)?
        .into_iter()
        .filter(|z| z.im.abs() <= IMAG_THRESHOLD * z.re.abs().max(1.0))
        .map(|z| z.re)
        .collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    /// Eigenvalue refined from the converged vector by least squares.
    pub value: f64,
    /// Unit 2-norm right eigenvector; its largest-magnitude entry is positive.
    pub vector: Vec<f64>,
    /// `‖(A − value·B)u‖₂ / (‖A‖_F + |value|·‖B‖_F)`.
    pub residual: f64,
}

/// Right eigenvector of `A u = h B u` for the eigenvalue closest to `h`.
pub fn inverse_iteration_eigenvector(a: &DenseMatrix, b: &DenseMatrix, h: f64) -> Result<EigenPair> {
    let n = a.rows;
    if !a.is_square() || !b.is_square() || b.rows != n || n == 0 {
        return Err(Error::InvalidArgument("inverse iteration needs equal square matrices".into()));
    }
    let shifted = a.add_scaled(-h, b);
    let lu = LuFactorization::factor_regularized(&shifted);
    let (norm_a, norm_b) = (a.norm_frobenius(), b.norm_frobenius());

    let mut u: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64 + 1.0).sqrt() / n as f64).collect();
    normalize(&mut u);
    let mut last_residual = f64::INFINITY;
    for _ in 0..MAX_INVERSE_ITERATIONS {
        let mut next = lu.solve(&b.mul_vec(&u));
        if next.iter().any(|x| !x.is_finite()) {
            break;
        }
        normalize(&mut next);
        u = next;
        let au = a.mul_vec(&u);
        let bu = b.mul_vec(&u);
        let value = dot(&bu, &au) / dot(&bu, &bu);
        let r: f64 = au.iter().zip(&bu).map(|(x, y)| (x - value * y).powi(2)).sum::<f64>().sqrt();
        let residual = r / (norm_a + value.abs() * norm_b);
        last_residual = residual;
        if residual <= INVERSE_ITERATION_TOL {
            fix_sign(&mut u);
            return Ok(EigenPair { value, vector: u, residual });
        }
    }
    Err(Error::InverseIterationFailed { iterations: MAX_INVERSE_ITERATIONS, residual: last_residual })
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn normalize(x: &mut [f64]) {
    let norm = dot(x, x).sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
}

fn fix_sign(x: &mut [f64]) {
    let biggest = x.iter().copied().fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
    if biggest < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
}

/// Diagonal similarity scaling by powers of two so that row and column norms
/// are comparable.
fn balance(a: &mut DenseMatrix) {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    let n = a.rows;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let (mut r, mut c) = (0.0, 0.0);
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= g;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

/// Householder reduction to upper Hessenberg form (entries below the first
/// subdiagonal are zeroed).
fn hessenberg(a: &mut DenseMatrix) {
    let n = a.rows;
    if n < 3 {
        return;
    }
    let mut ort = vec![0.0; n];
    for m in 1..n - 1 {
        let scale: f64 = (m..n).map(|i| a[(i, m - 1)].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut h = 0.0;
        for i in (m..n).rev() {
            ort[i] = a[(i, m - 1)] / scale;
            h += ort[i] * ort[i];
        }
        let g = if ort[m] > 0.0 { -h.sqrt() } else { h.sqrt() };
        h -= ort[m] * g;
        ort[m] -= g;

        for j in m..n {
            let f = (m..n).map(|i| ort[i] * a[(i, j)]).sum::<f64>() / h;
            for i in m..n {
                a[(i, j)] -= f * ort[i];
            }
        }
        for i in 0..n {
            let f = (m..n).map(|j| ort[j] * a[(i, j)]).sum::<f64>() / h;
            for j in m..n {
                a[(i, j)] -= f * ort[j];
            }
        }
        a[(m, m - 1)] = scale * g;
        for i in m + 1..n {
            a[(i, m - 1)] = 0.0;
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Eigenvalues of an upper Hessenberg matrix by the Francis double-shift QR
/// algorithm with deflation. Exceptional shifts are applied every tenth sweep
/// on the same block; the total number of sweeps is capped at `30·n`.
fn hqr(h: &DenseMatrix) -> Result<Vec<ComplexEigenvalue>> {
    let n = h.rows;
    // 1-based working copy keeps the index arithmetic of the classic
    // formulation readable.
    let w = n + 1;
    let mut a = vec![0.0; w * w];
    for i in 0..n {
        for j in 0..n {
            a[(i + 1) * w + j + 1] = h[(i, j)];
        }
    }
    macro_rules! at {
        ($i:expr, $j:expr) => {
            a[($i) * w + ($j)]
        };
    }
    let mut wr = vec![0.0; w];
    let mut wi = vec![0.0; w];

    let mut anorm = 0.0;
    for i in 1..=n {
        for j in (i.max(2) - 1)..=n {
            anorm += at!(i, j).abs();
        }
    }
    let max_sweeps = 30 * n.max(1);
    let mut sweeps = 0;
    let mut nn = n;
    let mut t = 0.0;
    while nn >= 1 {
        let mut its = 0;
        loop {
            let (mut p, mut q, mut r): (f64, f64, f64);
            let mut l = nn;
            while l >= 2 {
                let mut s = at!(l - 1, l - 1).abs() + at!(l, l).abs();
                if s == 0.0 {
                    s = anorm;
                }
                if at!(l, l - 1).abs() + s == s {
                    at!(l, l - 1) = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = at!(nn, nn);
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
            } else {
                let mut y = at!(nn - 1, nn - 1);
                let mut ww = at!(nn, nn - 1) * at!(nn - 1, nn);
                if l == nn - 1 {
                    p = 0.5 * (y - x);
                    q = p * p + ww;
                    let mut z = q.abs().sqrt();
                    x += t;
                    if q >= 0.0 {
                        z = p + sign(z, p);
                        wr[nn - 1] = x + z;
                        wr[nn] = x + z;
                        if z != 0.0 {
                            wr[nn] = x - ww / z;
                        }
                        wi[nn - 1] = 0.0;
                        wi[nn] = 0.0;
                    } else {
                        wr[nn - 1] = x + p;
                        wr[nn] = x + p;
                        wi[nn - 1] = -z;
                        wi[nn] = z;
                    }
                    nn -= 2;
                } else {
                    if sweeps >= max_sweeps {
                        return Err(Error::QrNotConverged { sweeps });
                    }
                    if its > 0 && its % 10 == 0 {
                        t += x;
                        for i in 1..=nn {
                            at!(i, i) -= x;
                        }
                        let s = at!(nn, nn - 1).abs() + at!(nn - 1, nn - 2).abs();
                        x = 0.75 * s;
                        y = x;
                        ww = -0.4375 * s * s;
                    }
                    its += 1;
                    sweeps += 1;
                    let mut m = nn - 2;
                    let mut z;
                    loop {
                        z = at!(m, m);
                        r = x - z;
                        let s0 = y - z;
                        p = (r * s0 - ww) / at!(m + 1, m) + at!(m, m + 1);
                        q = at!(m + 1, m + 1) - z - r - s0;
                        r = at!(m + 2, m + 1);
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = at!(m, m - 1).abs() * (q.abs() + r.abs());
                        let v = p.abs() * (at!(m - 1, m - 1).abs() + z.abs() + at!(m + 1, m + 1).abs());
                        if u + v == v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in m + 2..=nn {
                        at!(i, i - 2) = 0.0;
                        if i != m + 2 {
                            at!(i, i - 3) = 0.0;
                        }
                    }
                    let mut k = m;
                    while k < nn {
                        if k != m {
                            p = at!(k, k - 1);
                            q = at!(k + 1, k - 1);
                            r = 0.0;
                            if k != nn - 1 {
                                r = at!(k + 2, k - 1);
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let s = sign((p * p + q * q + r * r).sqrt(), p);
                        if s != 0.0 {
                            if k == m {
                                if l != m {
                                    at!(k, k - 1) = -at!(k, k - 1);
                                }
                            } else {
                                at!(k, k - 1) = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nn {
                                p = at!(k, j) + q * at!(k + 1, j);
                                if k != nn - 1 {
                                    p += r * at!(k + 2, j);
                                    at!(k + 2, j) -= p * z;
                                }
                                at!(k + 1, j) -= p * y;
                                at!(k, j) -= p * x;
                            }
                            let mmin = if nn < k + 3 { nn } else { k + 3 };
                            for i in l..=mmin {
                                p = x * at!(i, k) + y * at!(i, k + 1);
                                if k != nn - 1 {
                                    p += z * at!(i, k + 2);
                                    at!(i, k + 2) -= p * r;
                                }
                                at!(i, k + 1) -= p * q;
                                at!(i, k) -= p;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if nn < 2 || l + 1 >= nn {
                break;
            }
        }
    }
    Ok((1..=n).map(|i| ComplexEigenvalue { re: wr[i], im: wi[i] }).collect())
}
