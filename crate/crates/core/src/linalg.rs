//! Dense symmetric linear algebra: Cholesky, Gram solves, symmetric
//! eigensolvers and the generalized symmetric-definite eigenproblem
//! `M^L α = λ M^R α`.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::moments::OperatorPair;

/// Cholesky pivots at or below `PIVOT_TOL * max(diag)` count as failure.
pub const PIVOT_TOL: f64 = 1e-13;

/// Dimension up to which the cyclic Jacobi solver is used.
pub const JACOBI_MAX_DIM: usize = 64;

/// Square row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Panics unless `rows` is square.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Self {
            n,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| c * v).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n);
        (0..self.n).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// `aᵀ M b`.
    pub fn quad_form(&self, a: &[f64], b: &[f64]) -> f64 {
        assert_eq!(a.len(), self.n);
        (0..self.n).map(|i| a[i] * dot(self.row(i), b)).sum()
    }

    /// Replaces the matrix with `(M + Mᵀ) / 2`.
    pub fn symmetrize(&mut self) {
        for i in 0..self.n {
            for j in 0..i {
                let v = 0.5 * (self[(i, j)] + self[(j, i)]);
                self[(i, j)] = v;
                self[(j, i)] = v;
            }
        }
    }

    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        (0..self.n).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= rel_tol * scale))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Lower-triangular factor `L` with `L Lᵀ = M`.
#[derive(Clone, Debug)]
pub struct Cholesky {
    l: Matrix,
}

/// Factors a symmetric matrix; fails on any pivot `<= PIVOT_TOL * max(diag)`.
pub fn cholesky(m: &Matrix) -> Result<Cholesky> {
    let n = m.dim();
    let max_diag = m.diagonal().into_iter().fold(0.0, f64::max);
    let tol = PIVOT_TOL * max_diag;
    let mut l = Matrix::zeros(n);
    for j in 0..n {
        let pivot = m[(j, j)] - dot(&l.row(j)[..j], &l.row(j)[..j]);
        if pivot.is_nan() || pivot <= tol {
            return Err(Error::NotPositiveDefinite { row: j, pivot });
        }
        let d = pivot.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let s = m[(i, j)] - dot(&l.row(i)[..j], &l.row(j)[..j]);
            l[(i, j)] = s / d;
        }
    }
    Ok(Cholesky { l })
}

impl Cholesky {
    pub fn l(&self) -> &Matrix {
        &self.l
    }

    pub fn dim(&self) -> usize {
        self.l.dim()
    }

    /// Solves `L y = b`.
    pub fn solve_lower(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y = b.to_vec();
        for i in 0..n {
            let s = dot(&self.l.row(i)[..i], &y[..i]);
            y[i] = (y[i] - s) / self.l[(i, i)];
        }
        y
    }

    /// Solves `Lᵀ x = y`.
    pub fn solve_upper(&self, y: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut x = y.to_vec();
        for i in (0..n).rev() {
            let s = (i + 1..n).fold(x[i], |s, k| s - self.l[(k, i)] * x[k]);
            x[i] = s / self.l[(i, i)];
        }
        x
    }

    /// Solves `L Lᵀ x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.dim());
        self.solve_upper(&self.solve_lower(b))
    }
}

/// Solves `gram · y = rhs` through the Cholesky factor.
pub fn solve_gram(gram: &Matrix, rhs: &[f64]) -> Result<Vec<f64>> {
    if rhs.len() != gram.dim() {
        return Err(Error::DimensionMismatch(format!(
            "gram is {0}x{0}, rhs has length {1}",
            gram.dim(),
            rhs.len()
        )));
    }
    Ok(cholesky(gram)?.solve(rhs))
}

/// Eigenvalues and column eigenvectors of a symmetric matrix, unsorted.
///
/// Cyclic Jacobi up to [`JACOBI_MAX_DIM`], Householder tridiagonalization
/// followed by implicit QL above it.
pub fn symmetric_eigen(a: &Matrix) -> (Vec<f64>, Matrix) {
    if a.dim() <= JACOBI_MAX_DIM {
        jacobi_eigen(a)
    } else {
        tridiagonal_ql_eigen(a)
    }
}

/// Cyclic Jacobi rotations until the off-diagonal mass is at roundoff level.
pub fn jacobi_eigen(a: &Matrix) -> (Vec<f64>, Matrix) {
    const MAX_SWEEPS: usize = 100;
    let n = a.dim();
    let mut a = a.clone();
    let mut v = Matrix::identity(n);
    let frob = a.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)] * a[(p, q)])
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * frob || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let tau = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if tau.abs() > 1e150 {
                    0.5 / tau
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    (a.diagonal(), v)
}

/// Householder reduction to tridiagonal form plus implicit QL iterations.
pub fn tridiagonal_ql_eigen(a: &Matrix) -> (Vec<f64>, Matrix) {
    let n = a.dim();
    if n == 0 {
        return (Vec::new(), Matrix::zeros(0));
    }
    let mut v = a.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut v, &mut d, &mut e);
    tridiagonal_ql(&mut v, &mut d, &mut e);
    (d, v)
}

fn tridiagonalize(v: &mut Matrix, d: &mut [f64], e: &mut [f64]) {
    let n = v.dim();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }
    for i in (1..n).rev() {
        let scale: f64 = d[..i].iter().map(|x| x.abs()).sum();
        let mut h = 0.0;
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
                v[(j, i)] = 0.0;
            }
        } else {
            for dk in d[..i].iter_mut() {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e[..i].iter_mut() {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in j + 1..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    // accumulate transformations
    for i in 0..n - 1 {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    v[(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = 0.0;
    }
    v[(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

fn tridiagonal_ql(v: &mut Matrix, d: &mut [f64], e: &mut [f64]) {
    let n = v.dim();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    break;
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d[l + 2..].iter_mut() {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        h = v[(k, i + 1)];
                        v[(k, i + 1)] = s * v[(k, i)] + c * h;
                        v[(k, i)] = c * v[(k, i)] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

/// Eigenvalues (ascending) and `M^R`-normalized eigenvector coefficients of a
/// matrix pencil.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub lambdas: Vec<f64>,
    /// Row `i` holds `α^[i]`, the coefficients of `ψ^[i]` in the basis.
    pub alphas: Matrix,
    /// Set when `M^R` is not positive definite; every entry is then NaN.
    pub defective: bool,
}

impl Spectrum {
    pub fn defective(n: usize) -> Self {
        Self {
            lambdas: vec![f64::NAN; n],
            alphas: Matrix::from_fn(n, |_, _| f64::NAN),
            defective: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.lambdas.len()
    }

    pub fn alpha(&self, i: usize) -> &[f64] {
        self.alphas.row(i)
    }

    /// `ψ^[i]` evaluated from precomputed basis values `Q_k(y)`.
    pub fn psi(&self, i: usize, basis_values: &[f64]) -> f64 {
        dot(self.alpha(i), &basis_values[..self.dim()])
    }

    pub fn min(&self) -> f64 {
        self.lambdas.first().copied().unwrap_or(f64::NAN)
    }

    pub fn max(&self) -> f64 {
        self.lambdas.last().copied().unwrap_or(f64::NAN)
    }
}

/// Solves `left α = λ right α` by the Cholesky reduction `right = L Lᵀ`.
///
/// An indefinite `right` yields a defective spectrum rather than an error.
pub fn solve_pencil(left: &Matrix, right: &Matrix) -> Result<Spectrum> {
    let n = right.dim();
    if left.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "pencil matrices are {}x{} and {}x{}",
            left.dim(),
            left.dim(),
            n,
            n
        )));
    }
    let chol = match cholesky(right) {
        Ok(c) => c,
        Err(Error::NotPositiveDefinite { .. }) => return Ok(Spectrum::defective(n)),
        Err(e) => return Err(e),
    };

    // C = L⁻¹ left L⁻ᵀ, built column by column
    let mut w = Matrix::zeros(n);
    for j in 0..n {
        let col: Vec<f64> = (0..n).map(|i| left[(i, j)]).collect();
        let y = chol.solve_lower(&col);
        for i in 0..n {
            w[(i, j)] = y[i];
        }
    }
    // row j of L⁻¹ left is column j of left L⁻ᵀ
    let mut c = Matrix::zeros(n);
    for j in 0..n {
        let y = chol.solve_lower(w.row(j));
        for i in 0..n {
            c[(i, j)] = y[i];
        }
    }
    c.symmetrize();

    let (vals, vecs) = symmetric_eigen(&c);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));

    let mut lambdas = Vec::with_capacity(n);
    let mut alphas = Matrix::zeros(n);
    for (row, &idx) in order.iter().enumerate() {
        let v: Vec<f64> = (0..n).map(|k| vecs[(k, idx)]).collect();
        let mut alpha = chol.solve_upper(&v);
        let norm = right.quad_form(&alpha, &alpha).sqrt();
        alpha.iter_mut().for_each(|a| *a /= norm);
        for k in 0..n {
            alphas[(row, k)] = alpha[k];
        }
        lambdas.push(vals[idx]);
    }
    Ok(Spectrum {
        lambdas,
        alphas,
        defective: false,
    })
}

/// Generalized eigenproblem of an operator pair.
pub fn solve_gep(pair: &OperatorPair) -> Result<Spectrum> {
    solve_pencil(&pair.left, &pair.right)
}
