//! Truncated power-series ("Taylor jet") arithmetic and the series of the
//! biased arc-cosine kernel `h(u) = ((u+1)/2π)(π − arccos((u+1)/2))` about 0.

use std::f64::consts::PI;

use crate::error::{invalid, Result};

/// Highest derivative order returned in unscaled form; `k!` overflows past 170.
pub const MAX_DERIVATIVE_ORDER: usize = 170;

/// First `n` coefficients of `a · b`.
pub fn mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (i, &ai) in a.iter().enumerate().take(n) {
        if ai == 0.0 {
            continue;
        }
        for (o, &bj) in out[i..].iter_mut().zip(b) {
            *o += ai * bj;
        }
    }
    out
}

/// First `n` coefficients of `p^{-1/2}` by Newton iteration
/// `y ← y + y (1 − p y²) / 2`, doubling the number of correct terms per step.
pub fn rsqrt(p: &[f64], n: usize) -> Result<Vec<f64>> {
    let p0 = p.first().copied().unwrap_or(0.0);
    if !(p0 > 0.0) {
        return Err(invalid("p", "constant term must be positive"));
    }
    let mut y = vec![p0.powf(-0.5)];
    let mut len = 1;
    while len < n {
        len = (2 * len).min(n);
        y.resize(len, 0.0);
        let y2 = mul(&y, &y, len);
        let py2 = mul(p, &y2, len);
        let resid: Vec<f64> = py2
            .iter()
            .enumerate()
            .map(|(k, v)| if k == 0 { 1.0 - v } else { -v })
            .collect();
        let corr = mul(&y, &resid, len);
        for (yk, ck) in y.iter_mut().zip(corr) {
            *yk += 0.5 * ck;
        }
    }
    y.truncate(n);
    Ok(y)
}

/// Antiderivative with constant term `c0`, truncated to `n` coefficients.
pub fn integrate(a: &[f64], c0: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    out.push(c0);
    out.extend(
        a.iter()
            .take(n.saturating_sub(1))
            .enumerate()
            .map(|(k, v)| v / (k + 1) as f64),
    );
    out.resize(n, 0.0);
    out
}

/// Taylor coefficients of `v ↦ arccos(u0 + s v)` about `v = 0`.
///
/// The scale `s` keeps coefficients bounded: with `s = 1 − |u0|` they no
/// longer grow like `(1 − |u0|)^{-k}`.
pub fn arccos_series(u0: f64, s: f64, n: usize) -> Result<Vec<f64>> {
    if !(u0.abs() < 1.0) {
        return Err(invalid("u0", format!("must lie in (-1, 1), got {u0}")));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    // 1 − (u0 + s v)²
    let p = [1.0 - u0 * u0, -2.0 * u0 * s, -s * s];
    let y = rsqrt(&p, n)?;
    let deriv: Vec<f64> = y.iter().map(|v| -s * v).collect();
    Ok(integrate(&deriv, u0.acos(), n))
}

/// `arccos^{(k)}(u0)` for `k = 0..=k_max`.
pub fn arccos_derivatives(k_max: usize, u0: f64) -> Result<Vec<f64>> {
    if k_max > MAX_DERIVATIVE_ORDER {
        return Err(invalid(
            "k_max",
            format!("derivatives beyond order {MAX_DERIVATIVE_ORDER} overflow f64"),
        ));
    }
    let a = arccos_series(u0, 1.0, k_max + 1)?;
    let mut fact = 1.0;
    Ok(a.iter()
        .enumerate()
        .map(|(k, v)| {
            if k > 0 {
                fact *= k as f64;
            }
            v * fact
        })
        .collect())
}

/// Taylor coefficients `c_k = h_k / k!` of the biased kernel about `u = 0`.
///
/// With `b_k` the coefficients of `arccos(1/2 + u/2)`,
/// `c_0 = 1/3` and `c_k = ½·1{k=1} − (b_{k−1} + b_k)/(2π)` for `k ≥ 1`.
pub fn h_taylor(n: usize) -> Result<Vec<f64>> {
    let b = arccos_series(0.5, 0.5, n)?;
    Ok((0..n)
        .map(|k| {
            if k == 0 {
                1.0 / 3.0
            } else {
                let half = if k == 1 { 0.5 } else { 0.0 };
                half - (b[k - 1] + b[k]) / (2.0 * PI)
            }
        })
        .collect())
}

/// `h_k = h^{(k)}(0)` for `k = 0..=k_max`.
pub fn h_coefficients(k_max: usize) -> Result<Vec<f64>> {
    if k_max > MAX_DERIVATIVE_ORDER {
        return Err(invalid(
            "k_max",
            format!("derivatives beyond order {MAX_DERIVATIVE_ORDER} overflow f64"),
        ));
    }
    let c = h_taylor(k_max + 1)?;
    let mut fact = 1.0;
    Ok(c.iter()
        .enumerate()
        .map(|(k, v)| {
            if k > 0 {
                fact *= k as f64;
            }
            v * fact
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Coefficients of `(1−v)^{-1/2}`: exact ratio recursion.
    fn binomial_rsqrt(n: usize) -> Vec<f64> {
        let mut out = vec![1.0];
        for k in 1..n {
            out.push(out[k - 1] * (k as f64 - 0.5) / k as f64);
        }
        out
    }

    #[test]
    fn newton_rsqrt_matches_binomial_series() {
        let y = rsqrt(&[1.0, -1.0], 3000).unwrap();
        let exact = binomial_rsqrt(3000);
        for (a, b) in y.iter().zip(&exact) {
            assert!((a - b).abs() <= 1e-12 * b, "{a} {b}");
        }
    }

    #[test]
    fn rsqrt_rejects_nonpositive_constant() {
        assert!(rsqrt(&[0.0, 1.0], 4).is_err());
        assert!(rsqrt(&[-1.0], 4).is_err());
    }

    #[test]
    fn arccos_closed_forms() {
        let a = arccos_derivatives(2, 0.5).unwrap();
        assert!((a[0] - PI / 3.0).abs() < 1e-15);
        assert!((a[1] + 2.0 / 3f64.sqrt()).abs() < 1e-14);
        // arccos'' = −u (1−u²)^{-3/2}
        assert!((a[2] + 0.5 * 0.75f64.powf(-1.5)).abs() < 1e-13);
        assert!(arccos_derivatives(171, 0.5).is_err());
        assert!(arccos_series(1.0, 1.0, 3).is_err());
    }

    #[test]
    fn arccos_derivatives_match_finite_differences() {
        // Recursive central differences of the (k−1)-th derivative: a
        // different route than the jet for every k ≤ 8.
        let a = arccos_derivatives(8, 0.5).unwrap();
        let deriv1 = |u: f64| -1.0 / (1.0 - u * u).sqrt();
        let h = 1e-3;
        // 4th-order stencil on the closed-form first derivative.
        let fd = |f: &dyn Fn(f64) -> f64, u: f64| {
            (-f(u + 2.0 * h) + 8.0 * f(u + h) - 8.0 * f(u - h) + f(u - 2.0 * h)) / (12.0 * h)
        };
        let d2 = fd(&deriv1, 0.5);
        assert!((d2 - a[2]).abs() < 1e-6 * a[2].abs());
        let d2f = |u: f64| fd(&deriv1, u);
        let d3 = fd(&d2f, 0.5);
        assert!((d3 - a[3]).abs() < 1e-5 * a[3].abs());
    }

    #[test]
    fn arccos_derivatives_match_ode_recurrence() {
        // y = q^{-1/2} with q(s) = 3/4 − s − s² satisfies q y' = −½ q' y,
        // which fixes the Taylor coefficients of y one at a time.
        let q = [0.75, -1.0, -1.0];
        let dq = [-1.0, -2.0];
        let mut y = vec![0.75f64.powf(-0.5)];
        for k in 0..10usize {
            let mut s = 0.0;
            for i in 1..=2 {
                if k + 1 >= i {
                    s += q[i] * (k + 1 - i) as f64 * y[k + 1 - i];
                }
            }
            for i in 0..=1 {
                if k >= i {
                    s += 0.5 * dq[i] * y[k - i];
                }
            }
            y.push(-s / (q[0] * (k + 1) as f64));
        }
        let jet = arccos_derivatives(8, 0.5).unwrap();
        let mut fact = 1.0;
        for k in 1..=8 {
            fact *= k as f64;
            let oracle = -y[k - 1] / k as f64 * fact;
            assert!((jet[k] - oracle).abs() <= 1e-12 * oracle.abs(), "{k}");
        }
    }

    #[test]
    fn h_first_coefficients() {
        let h = h_coefficients(3).unwrap();
        assert_eq!(h[0], 1.0 / 3.0);
        // h'(0) = 1/3 + 1/(2π√3) in closed form.
        let h1 = 1.0 / 3.0 + 1.0 / (2.0 * PI * 3f64.sqrt());
        assert!((h[1] - h1).abs() < 1e-14);
    }

    #[test]
    fn h_taylor_matches_composite_jet() {
        // h = G − G·A/π with G = (1+u)/2 and A = arccos(G).
        let n = 64;
        let a = arccos_series(0.5, 0.5, n).unwrap();
        let ga = mul(&[0.5, 0.5], &a, n);
        let c = h_taylor(n).unwrap();
        for k in 0..n {
            let g = if k < 2 { 0.5 } else { 0.0 };
            let direct = g - ga[k] / PI;
            assert!(
                (c[k] - direct).abs() <= 1e-14 * direct.abs().max(1e-300),
                "{k}"
            );
        }
    }

    #[test]
    fn h_series_sums_to_kernel() {
        let c = h_taylor(400).unwrap();
        for &u in &[-0.5, 0.0, 0.3, 0.6] {
            let series: f64 = c.iter().rev().fold(0.0, |acc, v| acc * u + v);
            let exact = crate::kernels::kernel_value(u, true).unwrap();
            assert!((series - exact).abs() < 1e-12, "{u}");
        }
    }
}
