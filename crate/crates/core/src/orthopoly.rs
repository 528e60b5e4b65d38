//! Polynomial basis families on the canonical interval `[-1, 1]`.
//!
//! Every family is evaluated with its three-term recurrence. Products of two
//! basis functions are expanded back into the basis (`Q_j Q_k = Σ c_l Q_l`),
//! which is what lets a moment vector `<g Q_l>` be lifted into the matrix
//! `<g Q_j Q_k>` without another pass over the sample.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported basis dimension. Beyond this 64-bit moments lose too
/// much precision even in the Chebyshev basis.
pub const MAX_DIMENSION: usize = 150;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Family {
    #[default]
    Chebyshev,
    Legendre,
    Monomial,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Chebyshev => "chebyshev",
            Family::Legendre => "legendre",
            Family::Monomial => "monomial",
        })
    }
}

impl Family {
    /// `Q_k(t)` at a canonical point.
    pub fn eval(self, k: usize, t: f64) -> f64 {
        match self {
            Family::Monomial => t.powi(k as i32),
            _ => {
                let mut prev = 1.0;
                if k == 0 {
                    return prev;
                }
                let mut cur = t;
                for m in 1..k {
                    let next = self.step(m, t, cur, prev);
                    prev = cur;
                    cur = next;
                }
                cur
            }
        }
    }

    /// Fills `out[k] = Q_k(t)` for `k < out.len()`.
    pub fn eval_into(self, t: f64, out: &mut [f64]) {
        if out.is_empty() {
            return;
        }
        out[0] = 1.0;
        if out.len() == 1 {
            return;
        }
        out[1] = t;
        for m in 1..out.len() - 1 {
            out[m + 1] = self.step(m, t, out[m], out[m - 1]);
        }
    }

    /// One recurrence step: `Q_{m+1}` from `Q_m` and `Q_{m-1}`, `m >= 1`.
    #[inline]
    fn step(self, m: usize, t: f64, cur: f64, prev: f64) -> f64 {
        match self {
            Family::Chebyshev => 2.0 * t * cur - prev,
            Family::Legendre => {
                let m = m as f64;
                ((2.0 * m + 1.0) * t * cur - m * prev) / (m + 1.0)
            }
            Family::Monomial => t * cur,
        }
    }

    /// `∫_{-1}^{1} Q_k(t) dt`.
    pub fn canonical_integral(self, k: usize) -> f64 {
        match self {
            Family::Chebyshev if k.is_multiple_of(2) => {
                let k = k as f64;
                2.0 / (1.0 - k * k)
            }
            Family::Legendre if k == 0 => 2.0,
            Family::Monomial if k.is_multiple_of(2) => 2.0 / (k as f64 + 1.0),
            _ => 0.0,
        }
    }

    /// Expansion of `d/dt Q_k` in the same basis; the result has length
    /// `max(k, 1)` and index `m` holds the coefficient of `Q_m`.
    pub fn derivative_coeffs(self, k: usize) -> Vec<f64> {
        let mut d = vec![0.0; k.max(1)];
        if k == 0 {
            return d;
        }
        match self {
            Family::Chebyshev => {
                // T_k' = k U_{k-1}, U_{k-1} = 2(T_{k-1} + T_{k-3} + ...) with T_0 counted once
                let mut m = k - 1;
                loop {
                    d[m] = if m == 0 { k as f64 } else { 2.0 * k as f64 };
                    if m < 2 {
                        break;
                    }
                    m -= 2;
                }
            }
            Family::Legendre => {
                let mut m = k - 1;
                loop {
                    d[m] = 2.0 * m as f64 + 1.0;
                    if m < 2 {
                        break;
                    }
                    m -= 2;
                }
            }
            Family::Monomial => d[k - 1] = k as f64,
        }
        d
    }

    /// Linearization coefficients of `Q_j Q_k`.
    pub fn product(self, j: usize, k: usize) -> ProductExpansion {
        let mut coeffs = vec![0.0; j + k + 1];
        match self {
            Family::Chebyshev => {
                coeffs[j + k] += 0.5;
                coeffs[j.abs_diff(k)] += 0.5;
            }
            Family::Monomial => coeffs[j + k] = 1.0,
            Family::Legendre => {
                // P_j P_k = Σ_s A(j,k,s) P_{j+k-2s},
                // A = a(j-s) a(s) a(k-s) / a(j+k-s) · (2j+2k-4s+1)/(2j+2k-2s+1),
                // a(r) = (2r-1)!! / r!
                let a = legendre_a_table(j + k);
                for s in 0..=j.min(k) {
                    let l = j + k - 2 * s;
                    let ratio = (2 * l + 1) as f64 / (2 * (j + k - s) + 1) as f64;
                    coeffs[l] = a[j - s] * a[s] * a[k - s] / a[j + k - s] * ratio;
                }
            }
        }
        ProductExpansion { j, k, coeffs }
    }

    /// `Σ_l c_l^{jk} moments[l]`, the lifted matrix entry.
    pub(crate) fn lift(self, j: usize, k: usize, moments: &[f64]) -> f64 {
        match self {
            Family::Chebyshev => 0.5 * (moments[j + k] + moments[j.abs_diff(k)]),
            Family::Monomial => moments[j + k],
            Family::Legendre => self
                .product(j, k)
                .coeffs
                .iter()
                .zip(moments)
                .map(|(c, m)| c * m)
                .sum(),
        }
    }
}

fn legendre_a_table(max: usize) -> Vec<f64> {
    let mut a = Vec::with_capacity(max + 1);
    a.push(1.0);
    for r in 1..=max {
        let prev = a[r - 1];
        a.push(prev * (2 * r - 1) as f64 / r as f64);
    }
    a
}

/// Coefficients `c_l` of `Q_j(t) Q_k(t) = Σ_{l=0}^{j+k} c_l Q_l(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductExpansion {
    pub j: usize,
    pub k: usize,
    pub coeffs: Vec<f64>,
}

impl ProductExpansion {
    pub fn eval(&self, family: Family, t: f64) -> f64 {
        let mut q = vec![0.0; self.coeffs.len()];
        family.eval_into(t, &mut q);
        self.coeffs.iter().zip(&q).map(|(c, q)| c * q).sum()
    }
}

/// Affine map sending the sample range `[lo, hi]` onto `[-1, 1]`.
///
/// The endpoints map to `-1` and `+1` exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DomainMap {
    lo: f64,
    hi: f64,
}

impl DomainMap {
    pub fn from_range(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "domain range [{lo}, {hi}] is not finite"
            )));
        }
        if hi <= lo {
            return Err(Error::DegenerateRange(lo));
        }
        Ok(Self { lo, hi })
    }

    /// The identity map on `[-1, 1]`.
    pub fn canonical() -> Self {
        Self { lo: -1.0, hi: 1.0 }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// Multiplier of `t = scale * x + offset`.
    pub fn scale(&self) -> f64 {
        2.0 / (self.hi - self.lo)
    }

    pub fn offset(&self) -> f64 {
        -(self.hi + self.lo) / (self.hi - self.lo)
    }

    /// Midpoint of the raw range; `x = center + half_width * t`.
    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    pub fn is_canonical(&self) -> bool {
        self.lo == -1.0 && self.hi == 1.0
    }

    pub fn to_canonical(&self, x: f64) -> f64 {
        if self.is_canonical() {
            return x;
        }
        ((x - self.lo) - (self.hi - x)) / (self.hi - self.lo)
    }

    pub fn to_raw(&self, t: f64) -> f64 {
        if self.is_canonical() {
            return t;
        }
        self.center() + self.half_width() * t
    }
}

/// Basis family, dimension and the raw-to-canonical map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasisSpec {
    pub family: Family,
    pub n: usize,
    pub domain: DomainMap,
}

impl BasisSpec {
    pub fn new(family: Family, n: usize, domain: DomainMap) -> Result<Self> {
        if n == 0 || n > MAX_DIMENSION {
            return Err(Error::InvalidDimension {
                n,
                max: MAX_DIMENSION,
            });
        }
        Ok(Self { family, n, domain })
    }

    /// Number of moments a matrix of this dimension is lifted from.
    pub fn moment_count(&self) -> usize {
        2 * self.n - 1
    }

    /// `Q_0(x) .. Q_{len-1}(x)` at a raw point.
    pub fn values(&self, x: f64, len: usize) -> Vec<f64> {
        let mut out = vec![0.0; len];
        self.family.eval_into(self.domain.to_canonical(x), &mut out);
        out
    }
}

/// `Q_k` at the canonical image of raw `x`.
pub fn eval_basis(spec: &BasisSpec, k: usize, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::InvalidParameter(format!("x = {x} is not finite")));
    }
    let limit = spec.moment_count();
    if k >= limit {
        return Err(Error::IndexOutOfRange { index: k, limit });
    }
    Ok(spec.family.eval(k, spec.domain.to_canonical(x)))
}

/// Expansion of `Q_j Q_k` restricted to products the moment set can lift.
pub fn product_coeffs(spec: &BasisSpec, j: usize, k: usize) -> Result<ProductExpansion> {
    let limit = spec.moment_count() - 1;
    if j + k > limit {
        return Err(Error::IndexOutOfRange {
            index: j + k,
            limit,
        });
    }
    Ok(spec.family.product(j, k))
}
