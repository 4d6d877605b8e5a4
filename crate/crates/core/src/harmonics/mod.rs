//! Spherical-harmonic analysis of the arc-cosine kernels: Gegenbauer
//! polynomials, harmonic dimensions, the Taylor coefficients of the biased
//! kernel, its operator eigenvalues `β_ℓ` and zonal projection matrices.

mod beta;
mod gegenbauer;
pub mod jet;
mod quadrature;
mod zonal;

use std::path::Path;

pub use beta::{
    beta_eigenvalue, beta_with_coefficients, coefficients_needed, BetaValue, DIRECT_CAP,
};
pub use gegenbauer::{gegenbauer, gegenbauer_explicit, harmonic_dimension, pochhammer};
pub use jet::{arccos_derivatives, h_coefficients, h_taylor};
pub use quadrature::{
    alpha_by_quadrature, gauss_legendre, gegenbauer_coefficient, gegenbauer_norm_sq,
    gegenbauer_norm_sq_closed, kernel_alpha, kernel_eigenvalue_by_quadrature,
};
pub use zonal::zonal_projection_matrix;

use crate::error::{invalid, Error, Result};
use crate::io::{fmt_f64, CsvTable};

/// Default relative tolerance of the `β_ℓ` series.
pub const DEFAULT_SERIES_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeEigen {
    pub ell: usize,
    pub beta: f64,
    pub multiplicity: u64,
    /// `β_ℓ (ℓ+λ)/λ`.
    pub alpha: f64,
    /// Independent quadrature estimate of `α_ℓ`.
    pub alpha_quadrature: f64,
}

/// Eigen-structure of the biased kernel's integral operator under the
/// uniform measure on `S^{d−1}`, for degrees `0..=ℓ_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorEigs {
    pub d: usize,
    pub lambda_geg: f64,
    pub tol: f64,
    pub degrees: Vec<DegreeEigen>,
}

impl OperatorEigs {
    pub fn ell_max(&self) -> usize {
        self.degrees.len() - 1
    }

    /// Degrees ordered by decreasing `β`.
    pub fn degrees_by_beta(&self) -> Vec<&DegreeEigen> {
        let mut v: Vec<&DegreeEigen> = self.degrees.iter().collect();
        v.sort_by(|a, b| b.beta.total_cmp(&a.beta).then(a.ell.cmp(&b.ell)));
        v
    }

    /// `(eigenvalue, degree)` with every `β_ℓ` repeated `N_ℓ` times, sorted
    /// descending.
    pub fn expanded(&self) -> Vec<(f64, usize)> {
        let mut out = Vec::new();
        for e in self.degrees_by_beta() {
            out.extend(std::iter::repeat_n(
                (e.beta, e.ell),
                e.multiplicity as usize,
            ));
        }
        out
    }

    pub fn expanded_values(&self) -> Vec<f64> {
        self.expanded().into_iter().map(|(v, _)| v).collect()
    }

    pub fn expanded_len(&self) -> usize {
        self.degrees.iter().map(|e| e.multiplicity as usize).sum()
    }

    /// `m_ℓ`: total multiplicity of the `ℓ+1` largest distinct eigenvalues.
    ///
    /// Indexing is by degree count, so `m_0 = N_0` and, when `β` decreases
    /// in the degree, `m_ℓ = N_0 + … + N_ℓ`.
    pub fn m_ell(&self, ell: usize) -> Result<usize> {
        let sorted = self.degrees_by_beta();
        if ell >= sorted.len() {
            return Err(invalid(
                "ell",
                format!("only {} degrees available", sorted.len()),
            ));
        }
        Ok(sorted[..=ell].iter().map(|e| e.multiplicity as usize).sum())
    }

    /// `(λ_{m_ℓ}, λ_{m_ℓ+1})`: the `(ℓ+1)`-th and `(ℓ+2)`-th largest distinct
    /// eigenvalues.
    pub fn gap_pair(&self, ell: usize) -> Result<(f64, f64)> {
        let sorted = self.degrees_by_beta();
        if ell + 1 >= sorted.len() {
            return Err(invalid(
                "ell",
                format!(
                    "need degree {} for the eigengap; ell_max is {}",
                    ell + 1,
                    self.ell_max()
                ),
            ));
        }
        Ok((sorted[ell].beta, sorted[ell + 1].beta))
    }

    /// CSV `ell,beta,N,alpha`.
    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["ell", "beta", "N", "alpha"]);
        for e in &self.degrees {
            t.push(vec![
                e.ell.to_string(),
                fmt_f64(e.beta),
                e.multiplicity.to_string(),
                fmt_f64(e.alpha),
            ]);
        }
        t
    }

    /// CSV `rank,eigenvalue,ell` of the expanded spectrum.
    pub fn expanded_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["rank", "eigenvalue", "ell"]);
        for (r, (v, l)) in self.expanded().into_iter().enumerate() {
            t.push(vec![(r + 1).to_string(), fmt_f64(v), l.to_string()]);
        }
        t
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        self.to_csv().write(path)
    }
}

/// Assembles `β_ℓ`, `N_ℓ` and `α_ℓ` for `ℓ = 0..=ℓ_max`.
pub fn operator_eigs(d: usize, ell_max: usize, tol: f64) -> Result<OperatorEigs> {
    if d < 3 {
        return Err(invalid("d", format!("must be at least 3, got {d}")));
    }
    let lam = (d as f64 - 2.0) / 2.0;
    let c = h_taylor(coefficients_needed(ell_max))?;
    let mut degrees = Vec::with_capacity(ell_max + 1);
    for ell in 0..=ell_max {
        let beta = beta_with_coefficients(ell, d, tol, &c)?.value;
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "beta",
                reason: format!("β_{ell} = {beta} outside (0, 1] for d = {d}"),
            });
        }
        degrees.push(DegreeEigen {
            ell,
            beta,
            multiplicity: harmonic_dimension(ell, d)?,
            alpha: beta * (ell as f64 + lam) / lam,
            alpha_quadrature: alpha_by_quadrature(ell, d)?,
        });
    }
    Ok(OperatorEigs {
        d,
        lambda_geg: lam,
        tol,
        degrees,
    })
}

/// Smallest `ℓ_max` whose expanded spectrum has at least `count` entries.
pub fn ell_max_covering(d: usize, count: usize) -> Result<usize> {
    let mut total = 0usize;
    for ell in 0.. {
        total = total.saturating_add(harmonic_dimension(ell, d)? as usize);
        if total >= count {
            return Ok(ell);
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expanded_length_and_bounds() {
        let ops = operator_eigs(10, 3, DEFAULT_SERIES_TOL).unwrap();
        assert_eq!(ops.expanded_len(), 1 + 10 + 54 + 210);
        assert_eq!(ops.expanded().len(), ops.expanded_len());
        assert!(ops.expanded_values().iter().all(|&v| v > 0.0 && v <= 1.0));
        let v = ops.expanded_values();
        assert!(v.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn strictly_decreasing_for_d10() {
        let ops = operator_eigs(10, 8, DEFAULT_SERIES_TOL).unwrap();
        assert!(ops.degrees.windows(2).all(|w| w[0].beta > w[1].beta));
        assert_eq!(ops.m_ell(1).unwrap(), 11);
        let (a, b) = ops.gap_pair(1).unwrap();
        assert_eq!(a, ops.degrees[1].beta);
        assert_eq!(b, ops.degrees[2].beta);
        assert!(ops.gap_pair(8).is_err());
    }

    #[test]
    fn alpha_relation_and_quadrature() {
        let ops = operator_eigs(3, 6, DEFAULT_SERIES_TOL).unwrap();
        for e in &ops.degrees {
            let lam = ops.lambda_geg;
            assert!((e.beta - e.alpha * lam / (e.ell as f64 + lam)).abs() <= 1e-12 * e.beta);
            assert!((e.alpha - e.alpha_quadrature).abs() <= 1e-6 * e.alpha);
        }
    }

    #[test]
    fn csv_headers() {
        let ops = operator_eigs(5, 2, DEFAULT_SERIES_TOL).unwrap();
        assert!(ops.to_csv().render().starts_with("ell,beta,N,alpha\n"));
        assert!(ops
            .expanded_csv()
            .render()
            .starts_with("rank,eigenvalue,ell\n1,"));
    }

    #[test]
    fn covering_degree() {
        assert_eq!(ell_max_covering(10, 500).unwrap(), 4);
        assert_eq!(ell_max_covering(10, 1).unwrap(), 0);
    }
}
