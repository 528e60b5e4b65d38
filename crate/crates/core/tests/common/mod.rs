//! Reference computations for the integration tests. Nothing here calls the
//! library's own recurrences, lifts or solvers.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rn_spectra::{BasisSpec, DxMode, Family, MomentSet, Timeserie};

/// Gauss-Legendre nodes (ascending) and weights on `[-1, 1]` by Newton
/// iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pprev = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pprev) / (x * x - 1.0);
            let step = pn / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        nodes.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| nodes[a].total_cmp(&nodes[b]));
    (
        idx.iter().map(|&i| nodes[i]).collect(),
        idx.iter().map(|&i| weights[i]).collect(),
    )
}

/// Composite 20-point Gauss-Legendre rule over `panels` equal panels.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let (t, w) = gauss_legendre(20);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        total += t
            .iter()
            .zip(&w)
            .map(|(ti, wi)| wi * f(mid + 0.5 * h * ti))
            .sum::<f64>()
            * 0.5
            * h;
    }
    total
}

/// `Q_k(t)` from closed forms: `cos(k acos t)`, Bonnet's formula, `t^k`.
pub fn basis_value(family: Family, k: usize, t: f64) -> f64 {
    match family {
        Family::Chebyshev => {
            if t.abs() <= 1.0 {
                (k as f64 * t.acos()).cos()
            } else {
                let s = if t < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
                s * (k as f64 * t.abs().acosh()).cosh()
            }
        }
        Family::Legendre => {
            let (mut p0, mut p1) = (1.0, t);
            if k == 0 {
                return 1.0;
            }
            for j in 1..k {
                let p2 = ((2 * j + 1) as f64 * t * p1 - j as f64 * p0) / (j + 1) as f64;
                p0 = p1;
                p1 = p2;
            }
            p1
        }
        Family::Monomial => t.powi(k as i32),
    }
}

pub fn basis_vector(spec: &BasisSpec, x: f64, len: usize) -> Vec<f64> {
    let t = spec.domain.to_canonical(x);
    (0..len).map(|k| basis_value(spec.family, k, t)).collect()
}

/// Continuum moments on the basis domain of `spec` for a smooth `f`.
pub fn continuous_moments(
    spec: &BasisSpec,
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
) -> MomentSet {
    let n = spec.n;
    let (a, b) = (spec.domain.lo(), spec.domain.hi());
    let mom = |g: &dyn Fn(f64) -> f64, k: usize| {
        integrate(|x| basis_vector(spec, x, k + 1)[k] * g(x), a, b, 200)
    };
    let one = |_: f64| 1.0;
    let q = (0..2 * n).map(|k| mom(&one, k)).collect();
    let fq = (0..2 * n - 1).map(|k| mom(&f, k)).collect();
    let dfq: Vec<f64> = (0..2 * n - 1).map(|k| mom(&df, k)).collect();
    MomentSet {
        q,
        fq,
        dfq_byparts: dfq.clone(),
        dfq,
        dlnfq: None,
        spec: *spec,
        dx_mode: DxMode::AnalyticalDX,
    }
}

/// `∫ Q_j w Q_k dx` by direct quadrature of the products.
pub fn quadrature_matrix(spec: &BasisSpec, w: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let n = spec.n;
    let (a, b) = (spec.domain.lo(), spec.domain.hi());
    DMatrix::from_fn(n, n, |j, k| {
        integrate(
            |x| {
                let v = basis_vector(spec, x, n);
                v[j] * w(x) * v[k]
            },
            a,
            b,
            200,
        )
    })
}

/// `Σ_l Q_j(x_l) w_l Q_k(x_l) Δx_l` summed directly over samples.
pub fn sample_matrix(ts: &Timeserie, spec: &BasisSpec, w: &[f64]) -> DMatrix<f64> {
    let n = spec.n;
    let xs = ts.xs();
    let mut m = DMatrix::zeros(n, n);
    for l in 1..xs.len() {
        let v = basis_vector(spec, xs[l], n);
        let dx = xs[l] - xs[l - 1];
        for j in 0..n {
            for k in 0..n {
                m[(j, k)] += v[j] * v[k] * w[l] * dx;
            }
        }
    }
    m
}

/// Radon-Nikodym and least-squares values at `y` from explicit matrices.
pub fn rn_ls_oracle(
    spec: &BasisSpec,
    gram: &DMatrix<f64>,
    f_matrix: &DMatrix<f64>,
    f_moments: &DVector<f64>,
    y: f64,
) -> (f64, f64) {
    let inv = gram.clone().try_inverse().expect("invertible Gram matrix");
    let qy = DVector::from_vec(basis_vector(spec, y, spec.n));
    let psi = &inv * &qy;
    let rn = psi.dot(&(f_matrix * &psi)) / psi.dot(&(gram * &psi));
    let ls = qy.dot(&(&inv * f_moments));
    (rn, ls)
}

/// Ascending generalized eigenvalues of a symmetric-definite pencil.
pub fn pencil_eigenvalues(left: &DMatrix<f64>, right: &DMatrix<f64>) -> Vec<f64> {
    let l = right.clone().cholesky().expect("SPD right matrix").unpack();
    let linv = l.try_inverse().expect("invertible factor");
    let c = &linv * left * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let mut ev: Vec<f64> = SymmetricEigen::new(c).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn to_dmatrix(m: &rn_spectra::Matrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.dim(), m.dim(), |i, j| m[(i, j)])
}
