//! Operator eigenvalues `β_ℓ` of the biased kernel from its Taylor series:
//!
//! `β_ℓ = λ Σ_{k≥0} h_{ℓ+2k} / (2^{ℓ+2k} k! (λ)_{ℓ+k+1})`, `λ = (d−2)/2`.
//!
//! With `c_j = h_j / j!` the `k`-th term is `λ c_j r_k`, where
//! `r_k = j! / (2^j k! (λ)_{ℓ+k+1})` and `j = ℓ + 2k`. The ratio
//! `r_{k+1}/r_k = (j+1)(j+2) / (4 (k+1)(λ+ℓ+k+1))` is applied recursively, so
//! no factorial is ever formed.
//!
//! Because `h` has a square-root branch point at `u = 1`, the terms decay
//! only like `k^{−(2+λ)}`; for small `d` a fixed-length truncation cannot
//! reach tight tolerances. When the plain stopping rule (three consecutive
//! terms below `tol · |partial sum|` within [`DIRECT_CAP`] terms) fails, the
//! partial sums `S_K` at `K = K₀ 2^i` are Richardson-extrapolated, removing
//! the tail components `K^{−(1+λ+r)}` for `r = 0, 1, ...`.

use super::jet::h_taylor;
use crate::error::{invalid, Error, Result};

pub const DIRECT_CAP: usize = 200;
const RICHARDSON_K0: usize = 125;
const RICHARDSON_LEVELS: usize = 5;
/// Largest tolerated relative gap between the two best extrapolants.
const RICHARDSON_ACCEPT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaValue {
    pub value: f64,
    /// Series terms summed.
    pub terms: usize,
    pub accelerated: bool,
    /// Relative size of the last correction (direct) or the gap between the
    /// last two extrapolants (accelerated).
    pub error_estimate: f64,
}

/// First extrapolation level; higher degrees enter the asymptotic regime of
/// the tail later.
fn richardson_k0(ell: usize) -> usize {
    RICHARDSON_K0 * (ell / 4 + 1)
}

/// Number of `h` Taylor coefficients [`beta_with_coefficients`] may need for
/// every degree up to `ell`.
pub fn coefficients_needed(ell: usize) -> usize {
    ell + 2 * richardson_k0(ell) * (1 << (RICHARDSON_LEVELS - 1)) + 1
}

/// `β_ℓ` for dimension `d`.
pub fn beta_eigenvalue(ell: usize, d: usize, tol: f64) -> Result<f64> {
    let c = h_taylor(coefficients_needed(ell))?;
    Ok(beta_with_coefficients(ell, d, tol, &c)?.value)
}

/// `β_ℓ` from precomputed coefficients `c_j = h_j / j!`.
pub fn beta_with_coefficients(ell: usize, d: usize, tol: f64, c: &[f64]) -> Result<BetaValue> {
    if d < 3 {
        return Err(invalid("d", format!("must be at least 3, got {d}")));
    }
    if !(tol > 0.0) {
        return Err(invalid("tol", "must be positive"));
    }
    let lam = (d as f64 - 2.0) / 2.0;
    let terms = SeriesTerms::new(ell, lam, c);

    let mut sum = 0.0;
    let mut small = 0;
    for (k, term) in terms.clone().take(DIRECT_CAP).enumerate() {
        let term = term?;
        sum += term;
        if term.abs() < tol * sum.abs() {
            small += 1;
            if small == 3 {
                return Ok(BetaValue {
                    value: sum,
                    terms: k + 1,
                    accelerated: false,
                    error_estimate: (term / sum).abs(),
                });
            }
        } else {
            small = 0;
        }
    }
    richardson(terms, lam, richardson_k0(ell))
}

fn richardson(terms: SeriesTerms<'_>, lam: f64, k0: usize) -> Result<BetaValue> {
    let ks: Vec<usize> = (0..RICHARDSON_LEVELS).map(|i| k0 << i).collect();
    let k_max = *ks.last().expect("levels > 0");
    let mut partial = Vec::with_capacity(ks.len());
    let mut sum = 0.0;
    for (k, term) in terms.take(k_max).enumerate() {
        sum += term?;
        if ks.contains(&(k + 1)) {
            partial.push(sum);
        }
    }
    let mut row = partial;
    let mut prev_best = f64::NAN;
    for r in 0..RICHARDSON_LEVELS - 1 {
        let f = 2f64.powf(1.0 + lam + r as f64);
        prev_best = *row.last().expect("non-empty row");
        row = row
            .windows(2)
            .map(|w| (f * w[1] - w[0]) / (f - 1.0))
            .collect();
    }
    let value = row[0];
    let error_estimate = ((value - prev_best) / value).abs();
    if !(error_estimate <= RICHARDSON_ACCEPT) {
        return Err(Error::NoConvergence {
            what: "beta series extrapolation",
            iterations: k_max,
        });
    }
    Ok(BetaValue {
        value,
        terms: k_max,
        accelerated: true,
        error_estimate,
    })
}

#[derive(Clone)]
struct SeriesTerms<'a> {
    c: &'a [f64],
    ell: usize,
    lam: f64,
    k: usize,
    ratio: f64,
}

impl<'a> SeriesTerms<'a> {
    fn new(ell: usize, lam: f64, c: &'a [f64]) -> Self {
        // r_0 = ℓ! / (2^ℓ (λ)_{ℓ+1}) = (1/λ) Π_{i=1}^{ℓ} i / (2(λ+i))
        let ratio = (1..=ell).fold(1.0 / lam, |acc, i| {
            acc * i as f64 / (2.0 * (lam + i as f64))
        });
        Self {
            c,
            ell,
            lam,
            k: 0,
            ratio,
        }
    }
}

impl Iterator for SeriesTerms<'_> {
    type Item = Result<f64>;

    fn next(&mut self) -> Option<Result<f64>> {
        let j = self.ell + 2 * self.k;
        let Some(&cj) = self.c.get(j) else {
            return Some(Err(Error::Missing(format!("h Taylor coefficient {j}"))));
        };
        let term = self.lam * cj * self.ratio;
        let (jf, kf) = (j as f64, self.k as f64);
        self.ratio *=
            (jf + 1.0) * (jf + 2.0) / (4.0 * (kf + 1.0) * (self.lam + self.ell as f64 + kf + 1.0));
        self.k += 1;
        Some(Ok(term))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::quadrature::kernel_eigenvalue_by_quadrature;

    const REFERENCE: [(usize, usize, f64); 10] = [
        (3, 0, 0.375),
        (3, 1, 0.150195606140537),
        (3, 2, 0.0181631815783876),
        (3, 5, 0.00075228762877293),
        (3, 8, 0.000191403845494298),
        (10, 0, 0.344554329995633),
        (10, 1, 0.0432876370368581),
        (10, 2, 0.00194150858303326),
        (10, 5, 5.99991628411833e-6),
        (10, 8, 2.44677521395341e-7),
    ];

    #[test]
    fn matches_high_precision_reference() {
        let c = h_taylor(coefficients_needed(8)).unwrap();
        for (d, ell, beta) in REFERENCE {
            let b = beta_with_coefficients(ell, d, 1e-12, &c).unwrap();
            assert!((b.value - beta).abs() <= 1e-8 * beta, "{d} {ell}: {b:?}");
        }
    }

    #[test]
    fn matches_quadrature() {
        let c = h_taylor(coefficients_needed(8)).unwrap();
        for d in [3, 10] {
            for ell in 0..=8 {
                let s = beta_with_coefficients(ell, d, 1e-12, &c).unwrap().value;
                let q = kernel_eigenvalue_by_quadrature(ell, d, true).unwrap();
                assert!((s - q).abs() <= 1e-6 * q, "{d} {ell}: {s} {q}");
            }
        }
    }

    #[test]
    fn large_dimension_converges_directly() {
        let c = h_taylor(coefficients_needed(4)).unwrap();
        let b = beta_with_coefficients(2, 20, 1e-12, &c).unwrap();
        assert!(!b.accelerated);
        assert!(b.terms <= DIRECT_CAP);
    }

    #[test]
    fn positive_and_parity_monotone() {
        let c = h_taylor(coefficients_needed(13)).unwrap();
        for d in [3, 5, 10, 20] {
            let betas: Vec<f64> = (0..=13)
                .map(|l| beta_with_coefficients(l, d, 1e-12, &c).unwrap().value)
                .collect();
            assert!(betas.iter().all(|&b| b > 0.0), "{d}: {betas:?}");
            for l in 0..=5 {
                assert!(betas[2 * l] > betas[2 * l + 2], "{d} even {l}");
                assert!(betas[2 * l + 1] > betas[2 * l + 3], "{d} odd {l}");
            }
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(beta_eigenvalue(0, 2, 1e-12).is_err());
        assert!(beta_eigenvalue(0, 3, 0.0).is_err());
        assert!(matches!(
            beta_with_coefficients(0, 3, 1e-12, &[1.0 / 3.0; 10]),
            Err(Error::Missing(_))
        ));
    }
}
