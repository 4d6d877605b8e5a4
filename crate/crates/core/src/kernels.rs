//! Arc-cosine kernels, the empirical kernel matrix `K`, the Gram matrices
//! `H⁺, H⁻, H̃⁺, H̃⁻` of one GD transition, the entrywise residual sandwich
//! and the perturbation matrices `M = H̃⁻ − H⁻`, `L = H̃⁺ − H⁺`.

use std::f64::consts::PI;

use crate::error::{check_dim, invalid, Result};
use crate::linalg::{dot, Mat};
use crate::relu_net::{sign_pattern, NetState, SignPattern};
use crate::spectral::{spectral_norm, symmetric_norm};
use crate::sphere_data::FeatureSet;

/// Inputs this far outside `[-1, 1]` are rejected rather than clamped.
const CLAMP_TOL: f64 = 1e-12;

/// Unbiased: `(u/2π)(π − arccos u)`. Biased: `((u+1)/2π)(π − arccos((u+1)/2))`.
pub fn kernel_value(u: f64, biased: bool) -> Result<f64> {
    if !(u.abs() <= 1.0 + CLAMP_TOL) {
        return Err(invalid("u", format!("inner product {u} outside [-1, 1]")));
    }
    let u = u.clamp(-1.0, 1.0);
    Ok(if biased {
        let g = 0.5 * (u + 1.0);
        g / PI * (PI - g.acos())
    } else {
        u / (2.0 * PI) * (PI - u.acos())
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    pub biased: bool,
    /// `𝒦(x_i, x_i') / n`.
    pub entries: Mat,
}

impl KernelMatrix {
    pub fn n(&self) -> usize {
        self.entries.rows()
    }
}

/// `K_ii' = 𝒦(x_i, x_i') / n` on the base (un-augmented) coordinates.
pub fn empirical_kernel_matrix(features: &FeatureSet, biased: bool) -> Result<KernelMatrix> {
    if features.augmented && !biased {
        return Err(invalid(
            "features",
            "the unbiased kernel takes un-augmented points",
        ));
    }
    let n = features.n();
    let inv_n = 1.0 / n as f64;
    let mut err = None;
    let entries = Mat::symmetric_from_fn(n, |i, k| {
        let u = if i == k {
            1.0
        } else {
            features.base_inner(i, k)
        };
        kernel_value(u, biased).unwrap_or_else(|e| {
            err.get_or_insert(e);
            f64::NAN
        }) * inv_n
    });
    match err {
        Some(e) => Err(e),
        None => Ok(KernelMatrix { biased, entries }),
    }
}

/// Gram matrices of the transition `t → t+1`, built from states `t` and
/// `t+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramSet {
    /// Index of the earlier state.
    pub t: usize,
    pub m: usize,
    /// `max_{i,i'} |⟨x_i, x_i'⟩|` of the features used (1, or 2 with bias).
    pub feature_scale: f64,
    pub hp: Mat,
    pub hm: Mat,
    pub hp_tilde: Mat,
    pub hm_tilde: Mat,
}

impl GramSet {
    /// `H = H⁺ + H⁻`.
    pub fn h(&self) -> Mat {
        self.hp.add(&self.hm).expect("same shape")
    }

    /// `M = H̃⁻ − H⁻`.
    pub fn m_matrix(&self) -> Mat {
        self.hm_tilde.sub(&self.hm).expect("same shape")
    }

    /// `L = H̃⁺ − H⁺`.
    pub fn l_matrix(&self) -> Mat {
        self.hp_tilde.sub(&self.hp).expect("same shape")
    }
}

fn popcount_and3(a: &[u64], b: &[u64], mask: &[u64]) -> u32 {
    a.iter()
        .zip(b)
        .zip(mask)
        .map(|((x, y), z)| (x & y & z).count_ones())
        .sum()
}

/// Builds `(H⁺, H⁻)` from one pattern, or `(H̃⁺, H̃⁻)` when `row_pattern`
/// (the `i` side) differs from `col_pattern`.
fn pattern_products(
    row_pattern: &SignPattern,
    col_pattern: &SignPattern,
    plus: &[u64],
    minus: &[u64],
    gram: &Mat,
    scale: f64,
) -> (Mat, Mat) {
    let n = row_pattern.n();
    let mut hp = Mat::zeros(n, n);
    let mut hm = Mat::zeros(n, n);
    let symmetric = std::ptr::eq(row_pattern, col_pattern);
    for i in 0..n {
        let ri = row_pattern.row(i);
        let start = if symmetric { i } else { 0 };
        for k in start..n {
            let ck = col_pattern.row(k);
            let g = gram[(i, k)] * scale;
            let p = g * popcount_and3(ri, ck, plus) as f64;
            let q = g * popcount_and3(ri, ck, minus) as f64;
            hp[(i, k)] = p;
            hm[(i, k)] = q;
            if symmetric {
                hp[(k, i)] = p;
                hm[(k, i)] = q;
            }
        }
    }
    (hp, hm)
}

/// `H⁺(t) + H⁻(t)` style Gram matrices for the transition `net_t → net_t1`.
pub fn gram_matrices(
    net_t: &NetState,
    net_t1: &NetState,
    features: &FeatureSet,
) -> Result<GramSet> {
    check_dim(net_t.width(), net_t1.width())?;
    check_dim(net_t.dim(), net_t1.dim())?;
    if net_t.signs != net_t1.signs {
        return Err(invalid(
            "net_t1",
            "output-layer signs differ between the two states",
        ));
    }
    let s_t = sign_pattern(net_t, features)?;
    let s_t1 = sign_pattern(net_t1, features)?;
    Ok(gram_from_patterns(
        net_t.t,
        &net_t.signs,
        &s_t,
        &s_t1,
        features,
    ))
}

/// Gram matrices from precomputed patterns at `t` and `t+1`.
pub fn gram_from_patterns(
    t: usize,
    signs: &[f64],
    s_t: &SignPattern,
    s_t1: &SignPattern,
    features: &FeatureSet,
) -> GramSet {
    let m = signs.len();
    let n = features.n();
    let plus = SignPattern::neuron_mask(m, |j| signs[j] > 0.0);
    let minus = SignPattern::neuron_mask(m, |j| signs[j] < 0.0);
    let gram = features.gram();
    let scale = 1.0 / (n as f64 * m as f64);
    let (hp, hm) = pattern_products(s_t, s_t, &plus, &minus, &gram, scale);
    let (hp_tilde, hm_tilde) = pattern_products(s_t1, s_t, &plus, &minus, &gram, scale);
    GramSet {
        t,
        m,
        feature_scale: features.max_sq_norm(),
        hp,
        hm,
        hp_tilde,
        hm_tilde,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Slack {
    /// `r(t+1) − (I − η(H̃⁺ + H⁻)) r(t)`.
    pub lower: Vec<f64>,
    /// `(I − η(H⁺ + H̃⁻)) r(t) − r(t+1)`.
    pub upper: Vec<f64>,
}

impl Slack {
    pub fn min(&self) -> f64 {
        self.lower
            .iter()
            .chain(&self.upper)
            .fold(f64::INFINITY, |a, &b| a.min(b))
    }
}

/// Entrywise slack of the residual sandwich; both vectors are non-negative in
/// exact arithmetic.
pub fn sandwich_check(
    residual_t: &[f64],
    residual_t1: &[f64],
    gs: &GramSet,
    eta: f64,
) -> Result<Slack> {
    let n = gs.hp.rows();
    check_dim(n, residual_t.len())?;
    check_dim(n, residual_t1.len())?;
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    for i in 0..n {
        let lo_rate = dot(gs.hp_tilde.row(i), residual_t) + dot(gs.hm.row(i), residual_t);
        let up_rate = dot(gs.hp.row(i), residual_t) + dot(gs.hm_tilde.row(i), residual_t);
        lower.push(residual_t1[i] - (residual_t[i] - eta * lo_rate));
        upper.push(residual_t[i] - eta * up_rate - residual_t1[i]);
    }
    Ok(Slack { lower, upper })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationReport {
    pub m_norm: f64,
    pub l_norm: f64,
    pub m_frobenius: f64,
    pub l_frobenius: f64,
    /// `‖H − H(t)‖` with `H` the Gram matrix of the first transition.
    pub h_drift: f64,
    /// `‖K − H‖`.
    pub k_gap: f64,
    /// `feature_scale · √((4/(m²n)) Σ_i |F(x_i)|²)`.
    pub ceiling: f64,
}

impl PerturbationReport {
    /// `‖M‖, ‖L‖ ≤ ceiling/2` and `‖H − H(t)‖ ≤ ceiling`.
    pub fn within_bounds(&self) -> bool {
        let tol = 1e-12;
        self.m_norm <= self.ceiling / 2.0 + tol
            && self.l_norm <= self.ceiling / 2.0 + tol
            && self.h_drift <= self.ceiling + tol
    }
}

/// Norms of the perturbation matrices of `gs` against the flip-set ceiling.
///
/// `flip_counts` are `|F(x_i, t+1)|` for the transition `t → t+1`: a neuron
/// that changes sign between `t` and `t+1`, or between `0` and `t`, has
/// flipped by iteration `t+1`. With augmented features every Gram entry
/// carries `|⟨x_i, x_i'⟩| ≤ 2`, so the ceiling is scaled by `feature_scale`.
pub fn perturbation_norms(
    gs: &GramSet,
    kernel: &KernelMatrix,
    initial: &GramSet,
    flip_counts: &[u32],
) -> Result<PerturbationReport> {
    let n = gs.hp.rows();
    check_dim(n, flip_counts.len())?;
    check_dim(n, kernel.n())?;
    check_dim(n, initial.hp.rows())?;
    let m = gs.m as f64;
    let sum_sq: f64 = flip_counts.iter().map(|&f| (f as f64).powi(2)).sum();
    let ceiling = gs.feature_scale * (4.0 * sum_sq / (m * m * n as f64)).sqrt();
    let mm = gs.m_matrix();
    let ll = gs.l_matrix();
    let h = gs.h();
    let h0 = initial.h();
    Ok(PerturbationReport {
        m_norm: spectral_norm(&mm)?,
        l_norm: spectral_norm(&ll)?,
        m_frobenius: mm.frobenius_norm(),
        l_frobenius: ll.frobenius_norm(),
        h_drift: symmetric_norm(&h0.sub(&h)?)?,
        k_gap: symmetric_norm(&kernel.entries.sub(&h0)?)?,
        ceiling,
    })
}
