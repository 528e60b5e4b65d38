//! Moments of a sampled timeserie and the matrices lifted from them.
//!
//! With `ω(x) = 1` the sample measure is built from forward differences:
//!
//! ```text
//! <Q_k>       = Σ_{l≥2} Q_k(x_l) (x_l - x_{l-1})
//! <f Q_k>     = Σ_{l≥2} Q_k(x_l) (x_l - x_{l-1}) f_l
//! <df/dx Q_k> = Σ_{l≥2} Q_k(x_l) (f_l - f_{l-1})
//! ```
//!
//! The first sample only anchors the differences, so `<Q_0> = x_M - x_1`
//! and `<df/dx Q_0> = f_M - f_1` hold exactly.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::orthopoly::{BasisSpec, DomainMap, Family};

/// Ordered samples `x_l -> f_l`.
#[derive(Clone, Debug, PartialEq)]
pub struct Timeserie {
    xs: Vec<f64>,
    fs: Vec<f64>,
}

impl Timeserie {
    pub fn new(xs: Vec<f64>, fs: Vec<f64>) -> Result<Self> {
        if xs.len() != fs.len() {
            return Err(Error::LengthMismatch {
                xs: xs.len(),
                fs: fs.len(),
            });
        }
        if xs.len() < 2 {
            return Err(Error::InsufficientData {
                len: xs.len(),
                min: 2,
            });
        }
        if let Some(index) = (0..xs.len()).find(|&i| !xs[i].is_finite() || !fs[i].is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if let Some(i) = (1..xs.len()).find(|&i| xs[i] < xs[i - 1]) {
            return Err(Error::Decreasing {
                index: i,
                prev: xs[i - 1],
                next: xs[i],
            });
        }
        Ok(Self { xs, fs })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn fs(&self) -> &[f64] {
        &self.fs
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    /// Basis whose canonical domain is the sample's x range.
    pub fn basis(&self, family: Family, n: usize) -> Result<BasisSpec> {
        let (lo, hi) = self.x_range();
        BasisSpec::new(family, n, DomainMap::from_range(lo, hi)?)
    }
}

/// How `<Q_k>` is obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DxMode {
    /// Sample sums of `Q_k(x_l) (x_l - x_{l-1})`.
    #[default]
    SampleDX,
    /// Exact integrals `∫_{x_1}^{x_M} Q_k(x) dx`.
    AnalyticalDX,
}

/// Moment vectors of one timeserie in one basis.
///
/// `q` carries `2n` entries, one more than the other vectors, so that the
/// position operator `<Q_j x Q_k>` can be lifted exactly.
#[derive(Clone, Debug)]
pub struct MomentSet {
    pub q: Vec<f64>,
    pub fq: Vec<f64>,
    pub dfq: Vec<f64>,
    pub dfq_byparts: Vec<f64>,
    /// `<d ln f/dx Q_k>`; present only when every `f_l > 0`.
    pub dlnfq: Option<Vec<f64>>,
    pub spec: BasisSpec,
    pub dx_mode: DxMode,
}

/// `∫ Q_k(x) dx` over the full raw domain of `spec`, for `k < len`.
pub fn analytic_measure_moments(spec: &BasisSpec, len: usize) -> Vec<f64> {
    let h = spec.domain.half_width();
    (0..len)
        .map(|k| h * spec.family.canonical_integral(k))
        .collect()
}

pub fn compute_moments(ts: &Timeserie, spec: &BasisSpec, dx_mode: DxMode) -> Result<MomentSet> {
    let len = spec.moment_count();
    let xs = ts.xs();
    let fs = ts.fs();
    let positive = fs.iter().all(|&f| f > 0.0);

    let mut q = vec![0.0; len + 1];
    let mut fq = vec![0.0; len];
    let mut dfq = vec![0.0; len];
    let mut dlnfq = vec![0.0; len];
    let mut basis = vec![0.0; len + 1];
    for l in 1..ts.len() {
        spec.family
            .eval_into(spec.domain.to_canonical(xs[l]), &mut basis);
        let dx = xs[l] - xs[l - 1];
        let df = fs[l] - fs[l - 1];
        let dlnf = if positive {
            fs[l].ln() - fs[l - 1].ln()
        } else {
            0.0
        };
        for k in 0..len {
            let b = basis[k];
            q[k] += b * dx;
            fq[k] += b * dx * fs[l];
            dfq[k] += b * df;
            dlnfq[k] += b * dlnf;
        }
        q[len] += basis[len] * dx;
    }

    if dx_mode == DxMode::AnalyticalDX {
        let (lo, hi) = ts.x_range();
        if spec.domain.lo() != lo || spec.domain.hi() != hi {
            return Err(Error::InvalidParameter(
                "analytical dx requires the basis domain to equal the sample range".into(),
            ));
        }
        q = analytic_measure_moments(spec, len + 1);
    }

    // <df/dx Q_k> = [f Q_k] - <f dQ_k/dx>, with dQ_k/dx expanded over <f Q_m>
    let m = ts.len();
    let t_first = spec.domain.to_canonical(xs[0]);
    let t_last = spec.domain.to_canonical(xs[m - 1]);
    let scale = spec.domain.scale();
    let dfq_byparts = (0..len)
        .map(|k| {
            let boundary =
                fs[m - 1] * spec.family.eval(k, t_last) - fs[0] * spec.family.eval(k, t_first);
            let inner: f64 = spec
                .family
                .derivative_coeffs(k)
                .iter()
                .zip(&fq)
                .map(|(d, v)| d * v)
                .sum();
            boundary - scale * inner
        })
        .collect();

    Ok(MomentSet {
        q,
        fq,
        dfq,
        dfq_byparts,
        dlnfq: positive.then_some(dlnfq),
        spec: *spec,
        dx_mode,
    })
}

impl MomentSet {
    /// Largest `|dfq - dfq_byparts|` relative to `max |dfq|`.
    pub fn byparts_discrepancy(&self) -> f64 {
        let scale = self.dfq.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let diff = self
            .dfq
            .iter()
            .zip(&self.dfq_byparts)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if scale > 0.0 {
            diff / scale
        } else {
            diff
        }
    }

    /// `<x Q_l>` for `l < 2n - 1`, with `x = center + half_width · Q_1`.
    pub fn xq(&self) -> Vec<f64> {
        let len = self.spec.moment_count();
        let c = self.spec.domain.center();
        let h = self.spec.domain.half_width();
        let family = self.spec.family;
        (0..len)
            .map(|l| c * self.q[l] + h * family.lift(1, l, &self.q))
            .collect()
    }

    fn moments(&self, which: MatrixKind) -> Result<std::borrow::Cow<'_, [f64]>> {
        use std::borrow::Cow;
        Ok(match which {
            MatrixKind::Q => Cow::Borrowed(&self.q[..]),
            MatrixKind::FQ => Cow::Borrowed(&self.fq[..]),
            MatrixKind::DFQ => Cow::Borrowed(&self.dfq[..]),
            MatrixKind::DFQByParts => Cow::Borrowed(&self.dfq_byparts[..]),
            MatrixKind::XQ => Cow::Owned(self.xq()),
            MatrixKind::DLnFQ => match &self.dlnfq {
                Some(v) => Cow::Borrowed(&v[..]),
                None => {
                    return Err(Error::InvalidParameter(
                        "log-derivative moments need f > 0 at every sample".into(),
                    ))
                }
            },
        })
    }
}

/// Which moment vector a matrix is lifted from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixKind {
    /// `<Q_j Q_k>`, the Gram matrix.
    Q,
    /// `<Q_j f Q_k>`
    FQ,
    /// `<Q_j df/dx Q_k>`
    DFQ,
    /// `<Q_j df/dx Q_k>` from integration by parts over `<f Q_k>`.
    DFQByParts,
    /// `<Q_j x Q_k>`
    XQ,
    /// `<Q_j d ln f/dx Q_k>`
    DLnFQ,
}

/// `matrix[j][k] = Σ_l c_l^{jk} moment[l]` for `j, k < n`.
pub fn build_matrix(m: &MomentSet, which: MatrixKind, n: usize) -> Result<Matrix> {
    if n == 0 || n > m.spec.n {
        return Err(Error::IndexOutOfRange {
            index: n,
            limit: m.spec.n,
        });
    }
    let moments = m.moments(which)?;
    let needed = 2 * n - 1;
    if moments.len() < needed {
        return Err(Error::IndexOutOfRange {
            index: needed,
            limit: moments.len(),
        });
    }
    Ok(lift_matrix(m.spec.family, &moments, n))
}

/// Lifts a raw moment vector into an `n x n` matrix.
pub fn lift_matrix(family: Family, moments: &[f64], n: usize) -> Matrix {
    assert!(moments.len() >= 2 * n - 1, "need 2n-1 moments");
    let mut out = Matrix::zeros(n);
    for j in 0..n {
        for k in 0..=j {
            let v = family.lift(j, k, moments);
            out[(j, k)] = v;
            out[(k, j)] = v;
        }
    }
    out
}

/// The pencils the analysis knows how to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PairKind {
    /// `(<Q_j f Q_k>; <Q_j Q_k>)`: distribution of f.
    Value,
    /// `(<Q_j df/dx Q_k>; <Q_j Q_k>)`: distribution of df/dx.
    Derivative,
    /// As `Derivative` with by-parts moments.
    DerivativeByParts,
    /// `(<Q_j df/dx Q_k>; <Q_j f Q_k>)`: distribution of f'/f.
    RelaxRate,
    /// `(<Q_j d ln f/dx Q_k>; <Q_j Q_k>)`: distribution of (ln f)'.
    LogDerivative,
    /// `(<Q_j x Q_k>; <Q_j Q_k>)`: Gauss quadrature nodes.
    Position,
}

impl PairKind {
    pub fn left(self) -> MatrixKind {
        match self {
            PairKind::Value => MatrixKind::FQ,
            PairKind::Derivative | PairKind::RelaxRate => MatrixKind::DFQ,
            PairKind::DerivativeByParts => MatrixKind::DFQByParts,
            PairKind::LogDerivative => MatrixKind::DLnFQ,
            PairKind::Position => MatrixKind::XQ,
        }
    }

    pub fn right(self) -> MatrixKind {
        match self {
            PairKind::RelaxRate => MatrixKind::FQ,
            _ => MatrixKind::Q,
        }
    }
}

/// Two symmetric matrices `(M^L, M^R)` defining a generalized eigenproblem.
#[derive(Clone, Debug)]
pub struct OperatorPair {
    pub left: Matrix,
    pub right: Matrix,
    pub kind: PairKind,
}

impl OperatorPair {
    pub fn build(m: &MomentSet, kind: PairKind) -> Result<Self> {
        let n = m.spec.n;
        Ok(Self {
            left: build_matrix(m, kind.left(), n)?,
            right: build_matrix(m, kind.right(), n)?,
            kind,
        })
    }

    pub fn dim(&self) -> usize {
        self.right.dim()
    }
}

/// Moments `<μ Q_k>` of the measure behind the right-hand matrix of `kind`,
/// i.e. the first row of `M^R`.
pub fn measure_moments(m: &MomentSet, kind: PairKind) -> &[f64] {
    match kind.right() {
        MatrixKind::FQ => &m.fq,
        _ => &m.q,
    }
}
