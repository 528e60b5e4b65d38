//! Full analysis of one timeserie: moments, matrices, the standard pencils
//! and both interpolator forms.

use crate::error::Result;
use crate::linalg::{cholesky, solve_pencil, Cholesky, Matrix, Spectrum};
use crate::moments::{
    build_matrix, compute_moments, measure_moments, DxMode, MatrixKind, MomentSet, PairKind,
    Timeserie,
};
use crate::orthopoly::{BasisSpec, Family};
use crate::spectral::{
    gauss_quadrature, lebesgue_quadrature, ls_coefficients, rn_interpolate,
    spectrum_ls_interpolate, spectrum_rn_interpolate, x_estimates, GaussQuadrature,
    InterpolationResult, LebesgueQuadrature,
};

#[derive(Clone, Debug)]
pub struct Analysis {
    pub basis: BasisSpec,
    pub moments: MomentSet,
    pub gram: Matrix,
    pub gram_factor: Cholesky,
    pub f_matrix: Matrix,
    pub df_matrix: Matrix,
    pub df_byparts_matrix: Matrix,
    pub x_matrix: Matrix,
    pub value: Spectrum,
    pub derivative: Spectrum,
    pub derivative_byparts: Spectrum,
    pub relax_rate: Spectrum,
    /// Only when every `f_l > 0`.
    pub log_derivative: Option<Spectrum>,
    ls_f: Vec<f64>,
    ls_df: Vec<f64>,
    ls_df_byparts: Vec<f64>,
}

impl Analysis {
    pub fn new(ts: &Timeserie, family: Family, n: usize, dx_mode: DxMode) -> Result<Self> {
        let basis = ts.basis(family, n)?;
        Self::from_moments(compute_moments(ts, &basis, dx_mode)?)
    }

    /// Fails only when the Gram matrix is not positive definite.
    pub fn from_moments(moments: MomentSet) -> Result<Self> {
        let basis = moments.spec;
        let n = basis.n;
        let gram = build_matrix(&moments, MatrixKind::Q, n)?;
        let gram_factor = cholesky(&gram)?;
        let f_matrix = build_matrix(&moments, MatrixKind::FQ, n)?;
        let df_matrix = build_matrix(&moments, MatrixKind::DFQ, n)?;
        let df_byparts_matrix = build_matrix(&moments, MatrixKind::DFQByParts, n)?;
        let x_matrix = build_matrix(&moments, MatrixKind::XQ, n)?;

        let value = solve_pencil(&f_matrix, &gram)?;
        let derivative = solve_pencil(&df_matrix, &gram)?;
        let derivative_byparts = solve_pencil(&df_byparts_matrix, &gram)?;
        let relax_rate = solve_pencil(&df_matrix, &f_matrix)?;
        let log_derivative = match moments.dlnfq {
            Some(_) => {
                let left = build_matrix(&moments, MatrixKind::DLnFQ, n)?;
                Some(solve_pencil(&left, &gram)?)
            }
            None => None,
        };

        let ls_f = ls_coefficients(&moments.fq, &gram_factor);
        let ls_df = ls_coefficients(&moments.dfq, &gram_factor);
        let ls_df_byparts = ls_coefficients(&moments.dfq_byparts, &gram_factor);

        Ok(Self {
            basis,
            moments,
            gram,
            gram_factor,
            f_matrix,
            df_matrix,
            df_byparts_matrix,
            x_matrix,
            value,
            derivative,
            derivative_byparts,
            relax_rate,
            log_derivative,
            ls_f,
            ls_df,
            ls_df_byparts,
        })
    }

    pub fn spectrum(&self, kind: PairKind) -> Option<&Spectrum> {
        match kind {
            PairKind::Value => Some(&self.value),
            PairKind::Derivative => Some(&self.derivative),
            PairKind::DerivativeByParts => Some(&self.derivative_byparts),
            PairKind::RelaxRate => Some(&self.relax_rate),
            PairKind::LogDerivative => self.log_derivative.as_ref(),
            PairKind::Position => None,
        }
    }

    /// Interpolation through `G⁻¹` (least squares and ratio-of-quadratic-forms).
    pub fn interpolate_direct(&self, y: f64) -> InterpolationResult {
        let n = self.basis.n;
        let qy = self.basis.values(y, n);
        let ls = |c: &[f64]| c.iter().zip(&qy).map(|(a, b)| a * b).sum();
        let rn = |m: &Matrix| rn_interpolate(m, &self.gram_factor, &self.basis, y);
        InterpolationResult {
            x: y,
            f_rn: rn(&self.f_matrix),
            f_ls: ls(&self.ls_f),
            df_rn: rn(&self.df_matrix),
            df_ls: ls(&self.ls_df),
            df_rn_byparts: rn(&self.df_byparts_matrix),
            df_ls_byparts: ls(&self.ls_df_byparts),
        }
    }

    /// The same quantities from the pencil eigenstates.
    pub fn interpolate_eigenbasis(&self, y: f64) -> InterpolationResult {
        let q = &self.moments.q;
        let b = &self.basis;
        InterpolationResult {
            x: y,
            f_rn: spectrum_rn_interpolate(&self.value, b, y),
            f_ls: spectrum_ls_interpolate(&self.value, q, b, y),
            df_rn: spectrum_rn_interpolate(&self.derivative, b, y),
            df_ls: spectrum_ls_interpolate(&self.derivative, q, b, y),
            df_rn_byparts: spectrum_rn_interpolate(&self.derivative_byparts, b, y),
            df_ls_byparts: spectrum_ls_interpolate(&self.derivative_byparts, q, b, y),
        }
    }

    /// Largest disagreement between the two interpolator forms over `ys`.
    pub fn dual_form_discrepancy(&self, ys: &[f64]) -> f64 {
        let direct: Vec<_> = ys.iter().map(|&y| self.interpolate_direct(y)).collect();
        let eigen: Vec<_> = ys.iter().map(|&y| self.interpolate_eigenbasis(y)).collect();
        dual_form_gap(&direct, &eigen)
    }

    /// `(index, λ, x_est)` rows of a pencil spectrum.
    pub fn spectrum_table(&self, kind: PairKind) -> Vec<(usize, f64, f64)> {
        let Some(s) = self.spectrum(kind) else {
            return Vec::new();
        };
        let xs = x_estimates(s, &self.x_matrix, &self.gram);
        s.lambdas
            .iter()
            .zip(xs)
            .enumerate()
            .map(|(i, (&l, x))| (i, l, x))
            .collect()
    }

    pub fn lebesgue(&self, kind: PairKind) -> Option<LebesgueQuadrature> {
        let s = self.spectrum(kind)?;
        Some(lebesgue_quadrature(
            s,
            measure_moments(&self.moments, kind),
            &self.x_matrix,
            &self.gram,
        ))
    }

    pub fn gauss(&self) -> Result<GaussQuadrature> {
        gauss_quadrature(&self.x_matrix, &self.gram, &self.moments.q)
    }
}

/// Max difference between matching rows, each column scaled by
/// `max(1, max |value|)` of the direct form.
pub fn dual_form_gap(direct: &[InterpolationResult], eigen: &[InterpolationResult]) -> f64 {
    (0..6)
        .map(|c| {
            let scale = direct
                .iter()
                .fold(1.0f64, |m, d| m.max(d.values()[c].abs()));
            direct
                .iter()
                .zip(eigen)
                .map(|(d, e)| (d.values()[c] - e.values()[c]).abs())
                .fold(0.0f64, f64::max)
                / scale
        })
        .fold(0.0, f64::max)
}
