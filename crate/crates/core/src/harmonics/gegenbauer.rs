//! Gegenbauer polynomials, Pochhammer symbols and harmonic-space dimensions.

use crate::error::{invalid, Error, Result};

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > -0.5) {
        return Err(invalid("lambda", format!("must exceed -1/2, got {lambda}")));
    }
    Ok(())
}

/// Rising factorial `(a)_k = a (a+1) ... (a+k-1)`, with `(a)_0 = 1`.
pub fn pochhammer(a: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (a + i as f64))
}

/// `C_ℓ^{(λ)}(u)` by the three-term recurrence.
pub fn gegenbauer(ell: usize, lambda: f64, u: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if !(u.abs() <= 1.0 + 1e-12) {
        return Err(invalid("u", format!("must lie in [-1, 1], got {u}")));
    }
    Ok(gegenbauer_unchecked(ell, lambda, u))
}

pub(crate) fn gegenbauer_unchecked(ell: usize, lambda: f64, u: f64) -> f64 {
    let mut prev = 1.0;
    if ell == 0 {
        return prev;
    }
    let mut cur = 2.0 * lambda * u;
    for l in 2..=ell {
        let lf = l as f64;
        let next = (2.0 * (lf + lambda - 1.0) * u * cur - (lf + 2.0 * lambda - 2.0) * prev) / lf;
        prev = cur;
        cur = next;
    }
    cur
}

/// `C_ℓ^{(λ)}(u)` from the explicit finite sum
/// `Σ_k (-1)^k (λ)_{ℓ-k} / (k! (ℓ-2k)!) (2u)^{ℓ-2k}`.
pub fn gegenbauer_explicit(ell: usize, lambda: f64, u: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let mut sum = 0.0;
    for k in 0..=ell / 2 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let denom = factorial(k) * factorial(ell - 2 * k);
        sum += sign * pochhammer(lambda, ell - k) / denom * (2.0 * u).powi((ell - 2 * k) as i32);
    }
    Ok(sum)
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

/// `N_ℓ = (2ℓ+d−2)(ℓ+d−3)! / (ℓ! (d−2)!)`, exact.
pub fn harmonic_dimension(ell: usize, d: usize) -> Result<u64> {
    if d < 3 {
        return Err(invalid("d", format!("must be at least 3, got {d}")));
    }
    let overflow = || Error::Overflow("harmonic dimension exceeds u64");
    // (ℓ+d−3)! / (ℓ! (d−3)!) = binom(ℓ+d−3, ℓ); then multiply by (2ℓ+d−2)/(d−2).
    let binom = binomial((ell + d - 3) as u128, ell as u128).ok_or_else(overflow)?;
    let num = binom
        .checked_mul((2 * ell + d - 2) as u128)
        .ok_or_else(overflow)?;
    let n = num / (d - 2) as u128;
    debug_assert_eq!(num % (d - 2) as u128, 0);
    u64::try_from(n).map_err(|_| overflow())
}

fn binomial(n: u128, k: u128) -> Option<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step.
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_orders() {
        for &lam in &[0.5, 1.0, 4.0] {
            for &u in &[-1.0, -0.3, 0.0, 0.7, 1.0] {
                assert_eq!(gegenbauer(0, lam, u).unwrap(), 1.0);
                assert!((gegenbauer(1, lam, u).unwrap() - 2.0 * lam * u).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn recurrence_matches_explicit_sum() {
        for &lam in &[0.5, 4.0] {
            for &u in &[-1.0, -0.3, 0.0, 0.7, 1.0] {
                for ell in 0..=12 {
                    let a = gegenbauer(ell, lam, u).unwrap();
                    let b = gegenbauer_explicit(ell, lam, u).unwrap();
                    assert!(
                        (a - b).abs() <= 1e-10 * b.abs().max(1.0),
                        "{ell} {lam} {u}: {a} {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn legendre_special_case() {
        // P_2(u) = (3u² − 1)/2
        let u: f64 = 0.4;
        assert!((gegenbauer(2, 0.5, u).unwrap() - (3.0 * u * u - 1.0) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn parameter_validation() {
        assert!(gegenbauer(3, -0.5, 0.1).is_err());
        assert!(gegenbauer(3, 1.0, 1.5).is_err());
    }

    #[test]
    fn pochhammer_base_case() {
        assert_eq!(pochhammer(3.7, 0), 1.0);
        assert_eq!(pochhammer(1.0, 5), 120.0);
    }

    #[test]
    fn dimensions() {
        assert_eq!(harmonic_dimension(0, 3).unwrap(), 1);
        assert_eq!(harmonic_dimension(5, 3).unwrap(), 11);
        assert_eq!(harmonic_dimension(1, 10).unwrap(), 10);
        assert_eq!(harmonic_dimension(2, 10).unwrap(), 54);
        assert_eq!(harmonic_dimension(3, 10).unwrap(), 210);
        for ell in 0..20 {
            assert_eq!(harmonic_dimension(ell, 3).unwrap(), 2 * ell as u64 + 1);
        }
        assert!(harmonic_dimension(1, 2).is_err());
        assert!(matches!(
            harmonic_dimension(60, 60),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn value_at_one_matches_dimension() {
        // ((ℓ+λ)/λ) C_ℓ(1) = N_ℓ.
        for d in [3usize, 5, 10] {
            let lam = (d as f64 - 2.0) / 2.0;
            for ell in 0..8 {
                let v = (ell as f64 + lam) / lam * gegenbauer(ell, lam, 1.0).unwrap();
                let n = harmonic_dimension(ell, d).unwrap() as f64;
                assert!((v - n).abs() < 1e-9 * n);
            }
        }
    }
}
