//! Gegenbauer coefficients of zonal kernels by composite Gauss-Legendre
//! quadrature in the angle `θ`, where `u = cos θ` turns the weight
//! `(1−u²)^{λ−1/2} du` into `sin^{2λ}θ dθ`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use statrs::function::gamma::ln_gamma;

use super::gegenbauer::gegenbauer_unchecked;
use crate::error::{invalid, Error, Result};
use crate::kernels::kernel_value;

const PANEL_ORDER: usize = 16;
const START_NODES: usize = 256;
const MAX_NODES: usize = 4096;
const REL_TOL: f64 = 1e-10;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_ORDER))
}

/// `∫_a^b f` with `nodes / PANEL_ORDER` equal panels; also returns `∫ |f|`.
fn composite(f: &dyn Fn(f64) -> f64, a: f64, b: f64, nodes: usize) -> (f64, f64) {
    let (x, w) = panel_rule();
    let panels = nodes / PANEL_ORDER;
    let width = (b - a) / panels as f64;
    let (mut sum, mut abs) = (0.0, 0.0);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * width;
        for (xi, wi) in x.iter().zip(w) {
            let v = f(mid + 0.5 * width * xi);
            sum += wi * v;
            abs += wi * v.abs();
        }
    }
    (0.5 * width * sum, 0.5 * width * abs)
}

/// `∫_0^π f(θ) dθ`, doubling the node count from 256 until two successive
/// estimates agree to `1e-10` (relative to `∫|f|`), at most 4096 nodes.
pub fn integrate_angle(f: &dyn Fn(f64) -> f64) -> Result<f64> {
    let mut nodes = START_NODES;
    let (mut prev, _) = composite(f, 0.0, PI, nodes);
    while nodes < MAX_NODES {
        nodes *= 2;
        let (cur, abs) = composite(f, 0.0, PI, nodes);
        if (cur - prev).abs() <= REL_TOL * abs.max(f64::MIN_POSITIVE) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::NoConvergence {
        what: "Gauss-Legendre doubling",
        iterations: MAX_NODES,
    })
}

fn lambda_of(d: usize) -> Result<f64> {
    if d < 3 {
        return Err(invalid("d", format!("must be at least 3, got {d}")));
    }
    Ok((d as f64 - 2.0) / 2.0)
}

/// `∫_{-1}^{1} g(u) C_ℓ^{(λ)}(u) (1−u²)^{λ−1/2} du`.
pub fn gegenbauer_moment(ell: usize, d: usize, g: &dyn Fn(f64) -> f64) -> Result<f64> {
    let lam = lambda_of(d)?;
    integrate_angle(&|th: f64| {
        let u = th.cos();
        g(u) * gegenbauer_unchecked(ell, lam, u) * th.sin().powf(2.0 * lam)
    })
}

/// `∫ (C_ℓ^{(λ)})² w_λ` by quadrature.
pub fn gegenbauer_norm_sq(ell: usize, d: usize) -> Result<f64> {
    let lam = lambda_of(d)?;
    gegenbauer_moment(ell, d, &|u| gegenbauer_unchecked(ell, lam, u))
}

/// Closed form `π 2^{1−2λ} Γ(ℓ+2λ) / (ℓ! (ℓ+λ) Γ(λ)²)`.
pub fn gegenbauer_norm_sq_closed(ell: usize, d: usize) -> Result<f64> {
    let lam = lambda_of(d)?;
    let l = ell as f64;
    let log = PI.ln() + (1.0 - 2.0 * lam) * 2f64.ln() + ln_gamma(l + 2.0 * lam)
        - ln_gamma(l + 1.0)
        - (l + lam).ln()
        - 2.0 * ln_gamma(lam);
    Ok(log.exp())
}

/// Gegenbauer coefficient `α_ℓ` of an arbitrary zonal function.
pub fn gegenbauer_coefficient(ell: usize, d: usize, g: &dyn Fn(f64) -> f64) -> Result<f64> {
    Ok(gegenbauer_moment(ell, d, g)? / gegenbauer_norm_sq(ell, d)?)
}

/// `α_ℓ` of the biased kernel `h`.
pub fn alpha_by_quadrature(ell: usize, d: usize) -> Result<f64> {
    kernel_alpha(ell, d, true)
}

/// `α_ℓ` of either arc-cosine kernel.
pub fn kernel_alpha(ell: usize, d: usize, biased: bool) -> Result<f64> {
    gegenbauer_coefficient(ell, d, &|u| {
        kernel_value(u.clamp(-1.0, 1.0), biased).unwrap_or(f64::NAN)
    })
}

/// Operator eigenvalue `α_ℓ λ/(ℓ+λ)` of either kernel, from quadrature.
pub fn kernel_eigenvalue_by_quadrature(ell: usize, d: usize, biased: bool) -> Result<f64> {
    let lam = lambda_of(d)?;
    Ok(kernel_alpha(ell, d, biased)? * lam / (ell as f64 + lam))
}
