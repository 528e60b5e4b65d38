//! Quantities built on a Gram factor or a pencil spectrum: interpolators,
//! the Christoffel function, Lebesgue and Gauss quadratures, per-state
//! position estimates and the two-moment skewness estimator.
//!
//! Interpolators come in two algebraically identical forms. The direct form
//! works with `G⁻¹` applied through the Cholesky factor; the eigenbasis form
//! works with the states `ψ^[i]` of the pencil. Comparing the two is the
//! numerical stability check used by the CLI.

use crate::error::{Error, Result};
use crate::linalg::{cholesky, dot, solve_pencil, Cholesky, Matrix, Spectrum};
use crate::orthopoly::{BasisSpec, Family};

/// One row of interpolated values at `x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterpolationResult {
    pub x: f64,
    pub f_rn: f64,
    pub f_ls: f64,
    pub df_rn: f64,
    pub df_ls: f64,
    pub df_rn_byparts: f64,
    pub df_ls_byparts: f64,
}

impl InterpolationResult {
    pub fn values(&self) -> [f64; 6] {
        [
            self.f_rn,
            self.f_ls,
            self.df_rn,
            self.df_ls,
            self.df_rn_byparts,
            self.df_ls_byparts,
        ]
    }
}

/// Value-nodes `g_i = λ^[i]` with weights `w_i = <ψ^[i]>²`.
#[derive(Clone, Debug, PartialEq)]
pub struct LebesgueQuadrature {
    pub value_nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub x_estimates: Vec<f64>,
}

impl LebesgueQuadrature {
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `Σ g_i w_i`, the quadrature estimate of `<g>`.
    pub fn integral(&self) -> f64 {
        self.value_nodes
            .iter()
            .zip(&self.weights)
            .map(|(g, w)| g * w)
            .sum()
    }

    /// Total weight of value-nodes inside `[lo, hi]`.
    pub fn mass_in(&self, lo: f64, hi: f64) -> f64 {
        self.value_nodes
            .iter()
            .zip(&self.weights)
            .filter(|(g, _)| (lo..=hi).contains(*g))
            .map(|(_, w)| w)
            .sum()
    }
}

/// Gauss quadrature read off the position operator spectrum.
#[derive(Clone, Debug)]
pub struct GaussQuadrature {
    /// Nodes in raw x units, ascending.
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// States of the position pencil; `ψ^[i]` vanishes at every other node.
    pub states: Spectrum,
}

impl GaussQuadrature {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, w)| w * f(x))
            .sum()
    }
}

/// Coefficients of `ψ_y(x) = Σ Q_i(x) (G⁻¹)_ij Q_j(y)`.
pub fn psi_localized(gram: &Cholesky, spec: &BasisSpec, y: f64) -> Vec<f64> {
    gram.solve(&spec.values(y, gram.dim()))
}

/// Christoffel function `1 / ψ_y(y)`.
pub fn christoffel(gram: &Cholesky, spec: &BasisSpec, y: f64) -> f64 {
    let qy = spec.values(y, gram.dim());
    1.0 / dot(&gram.solve(&qy), &qy)
}

/// Christoffel function in the eigenbasis: `1 / Σ_i (ψ^[i](y))²`.
pub fn spectrum_christoffel(spectrum: &Spectrum, spec: &BasisSpec, y: f64) -> f64 {
    let qy = spec.values(y, spectrum.dim());
    let s: f64 = (0..spectrum.dim())
        .map(|i| spectrum.psi(i, &qy).powi(2))
        .sum();
    1.0 / s
}

/// Radon-Nikodym interpolant: `<ψ_y g ψ_y> / <ψ_y ψ_y>`.
pub fn rn_interpolate(g_matrix: &Matrix, gram: &Cholesky, spec: &BasisSpec, y: f64) -> f64 {
    let qy = spec.values(y, gram.dim());
    let c = gram.solve(&qy);
    g_matrix.quad_form(&c, &c) / dot(&c, &qy)
}

/// Least squares interpolant `Σ Q_i(y) (G⁻¹)_ij <g Q_j>`.
pub fn ls_interpolate(g_moments: &[f64], gram: &Cholesky, spec: &BasisSpec, y: f64) -> f64 {
    let n = gram.dim();
    let coeffs = gram.solve(&g_moments[..n]);
    dot(&coeffs, &spec.values(y, n))
}

/// Least squares coefficients, for evaluating the same interpolant at many points.
pub fn ls_coefficients(g_moments: &[f64], gram: &Cholesky) -> Vec<f64> {
    gram.solve(&g_moments[..gram.dim()])
}

/// `Σ λ_i ψ_i(y)² / Σ ψ_i(y)²`; NaN for a defective spectrum.
pub fn spectrum_rn_interpolate(spectrum: &Spectrum, spec: &BasisSpec, y: f64) -> f64 {
    if spectrum.defective {
        return f64::NAN;
    }
    let qy = spec.values(y, spectrum.dim());
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, lambda) in spectrum.lambdas.iter().enumerate() {
        let p2 = spectrum.psi(i, &qy).powi(2);
        num += lambda * p2;
        den += p2;
    }
    num / den
}

/// `Σ λ_i ψ_i(y) <ψ_i>` with `<ψ_i> = α^[i] · q`; NaN for a defective spectrum.
pub fn spectrum_ls_interpolate(spectrum: &Spectrum, q: &[f64], spec: &BasisSpec, y: f64) -> f64 {
    if spectrum.defective {
        return f64::NAN;
    }
    let n = spectrum.dim();
    let qy = spec.values(y, n);
    spectrum
        .lambdas
        .iter()
        .enumerate()
        .map(|(i, lambda)| lambda * spectrum.psi(i, &qy) * dot(spectrum.alpha(i), &q[..n]))
        .sum()
}

/// `x_est^[i] = <ψ^[i]² x> / <ψ^[i]²>` under the `dx` measure.
pub fn x_estimates(spectrum: &Spectrum, position: &Matrix, gram: &Matrix) -> Vec<f64> {
    (0..spectrum.dim())
        .map(|i| {
            if spectrum.defective {
                return f64::NAN;
            }
            let a = spectrum.alpha(i);
            position.quad_form(a, a) / gram.quad_form(a, a)
        })
        .collect()
}

/// Lebesgue quadrature of a pencil spectrum.
///
/// `measure` holds `<μ Q_k>` for the measure behind the pencil's right-hand
/// matrix (`<Q_k>` for every dx pencil), so `w_i = (α^[i] · measure)²`.
pub fn lebesgue_quadrature(
    spectrum: &Spectrum,
    measure: &[f64],
    position: &Matrix,
    gram: &Matrix,
) -> LebesgueQuadrature {
    let n = spectrum.dim();
    let weights = (0..n)
        .map(|i| dot(spectrum.alpha(i), &measure[..n]).powi(2))
        .collect();
    LebesgueQuadrature {
        value_nodes: spectrum.lambdas.clone(),
        weights,
        x_estimates: x_estimates(spectrum, position, gram),
    }
}

/// Gauss quadrature of the sample measure from the position pencil
/// `(<Q_j x Q_k>; <Q_j Q_k>)`.
pub fn gauss_quadrature(x_matrix: &Matrix, gram: &Matrix, q: &[f64]) -> Result<GaussQuadrature> {
    cholesky(gram)?;
    let states = solve_pencil(x_matrix, gram)?;
    let n = states.dim();
    let weights = (0..n)
        .map(|i| dot(states.alpha(i), &q[..n]).powi(2))
        .collect();
    Ok(GaussQuadrature {
        nodes: states.lambdas.clone(),
        weights,
        states,
    })
}

/// `Γ̃ = (2ḡ - λ_min - λ_max) / (λ_min - λ_max)` from the six moments
/// `<Q_0..2>` and `<g Q_0..2>`, `ḡ = <g Q_0> / <Q_0>`.
///
/// The 2x2 pencil is solved through its characteristic quadratic.
pub fn skewness_estimator(family: Family, q: [f64; 3], gq: [f64; 3]) -> Result<f64> {
    if q.iter().chain(&gq).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite moment".into()));
    }
    let g = [q[0], q[1], family.lift(1, 1, &q)];
    let a = [gq[0], gq[1], family.lift(1, 1, &gq)];
    // det(A - λG) = qa λ² + qb λ + qc
    let qa = g[0] * g[2] - g[1] * g[1];
    let qb = -(a[0] * g[2] + a[2] * g[0] - 2.0 * a[1] * g[1]);
    let qc = a[0] * a[2] - a[1] * a[1];
    if !(qa > 0.0 && g[0] > 0.0) {
        return Err(Error::NotPositiveDefinite { row: 1, pivot: qa });
    }
    let disc = qb * qb - 4.0 * qa * qc;
    if disc <= 16.0 * f64::EPSILON * (qb * qb).max(4.0 * (qa * qc).abs()) {
        return Err(Error::DegenerateDistribution(
            "pencil eigenvalues coincide (constant g)".into(),
        ));
    }
    let s = -0.5 * (qb + qb.signum() * disc.sqrt());
    let (r1, r2) = (s / qa, qc / s);
    let (lmin, lmax) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
    let mean = gq[0] / q[0];
    Ok((2.0 * mean - lmin - lmax) / (lmin - lmax))
}
