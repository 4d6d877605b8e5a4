//! Dense symmetric eigensolver and the spectral diagnostics built on it:
//! minimum Gram eigenvalues, concentration of the kernel spectrum, the
//! linearized GD predictor, spectral coefficients of the target and
//! empirical eigenspace alignment.

use std::path::Path;

use crate::error::{check_dim, invalid, Error, Result};
use crate::harmonics::{zonal_projection_matrix, OperatorEigs};
use crate::io::{fmt_f64, CsvTable};
use crate::kernels::gram_matrices;
use crate::linalg::{dot, norm, Mat};
use crate::relu_net::init_network;
use crate::rng::{Domain, SeededStream};
use crate::sphere_data::{augment_with_bias, sample_uniform_sphere, FeatureSet};

const MAX_SWEEPS: usize = 100;
const JACOBI_TOL: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-12;
const POWER_TOL: f64 = 1e-10;
const POWER_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumSource {
    Gram,
    Kernel,
    Other,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Sorted descending.
    pub eigenvalues: Vec<f64>,
    /// Row `i` holds the unit eigenvector of `eigenvalues[i]`.
    pub vectors: Option<Mat>,
    pub source: SpectrumSource,
}

impl Spectrum {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(f64::NAN)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(f64::NAN)
    }

    pub fn vector(&self, i: usize) -> Result<&[f64]> {
        self.vectors
            .as_ref()
            .map(|v| v.row(i))
            .ok_or_else(|| Error::Missing("eigenvectors".into()))
    }

    pub fn with_source(mut self, source: SpectrumSource) -> Self {
        self.source = source;
        self
    }

    /// CSV `rank,eigenvalue`.
    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["rank", "eigenvalue"]);
        for (i, v) in self.eigenvalues.iter().enumerate() {
            t.push(vec![(i + 1).to_string(), fmt_f64(*v)]);
        }
        t
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        self.to_csv().write(path)
    }

    /// `‖S − U Λ Uᵀ‖_F`.
    pub fn reconstruction_error(&self, s: &Mat) -> Result<f64> {
        let v = self
            .vectors
            .as_ref()
            .ok_or_else(|| Error::Missing("eigenvectors".into()))?;
        let n = self.n();
        let mut rec = Mat::zeros(n, n);
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let u = v.row(k);
            for i in 0..n {
                let a = lam * u[i];
                for (r, &uj) in rec.row_mut(i).iter_mut().zip(u) {
                    *r += a * uj;
                }
            }
        }
        Ok(s.sub(&rec)?.frobenius_norm())
    }
}

fn off_diagonal_norm(a: &Mat) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for (j, v) in a.row(i).iter().enumerate() {
            if j != i {
                s += v * v;
            }
        }
    }
    s.sqrt()
}

/// Two distinct mutable rows of a row-major buffer.
fn two_rows(data: &mut [f64], n: usize, p: usize, q: usize) -> (&mut [f64], &mut [f64]) {
    debug_assert!(p < q);
    let (head, tail) = data.split_at_mut(q * n);
    (&mut head[p * n..(p + 1) * n], &mut tail[..n])
}

/// Full eigendecomposition by cyclic Jacobi rotations.
///
/// Converges when the off-diagonal Frobenius norm is at most `1e-12 ‖S‖_F`.
/// Eigenvalues are returned in descending order; each eigenvector has its
/// largest-magnitude component positive. Cost is `O(n³)` per sweep.
pub fn sym_eig(s: &Mat, want_vectors: bool) -> Result<Spectrum> {
    if !s.is_square() {
        return Err(Error::DimensionMismatch {
            expected: s.rows(),
            actual: s.cols(),
        });
    }
    let asym = s.max_asymmetry();
    if asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric(asym));
    }
    let n = s.rows();
    let mut a = s.clone();
    let mut vt = want_vectors.then(|| Mat::identity(n));
    let target = JACOBI_TOL * s.frobenius_norm();

    let mut converged = false;
    for sweep in 0..=MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            converged = true;
            break;
        }
        if sweep == MAX_SWEEPS {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (a[(p, p)], a[(q, q)]);
                if sweep > 3
                    && app.abs() + 100.0 * apq.abs() == app.abs()
                    && aqq.abs() + 100.0 * apq.abs() == aqq.abs()
                {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                {
                    let (rp, rq) = two_rows(a.as_mut_slice(), n, p, q);
                    for (x, y) in rp.iter_mut().zip(rq.iter_mut()) {
                        let (xp, yq) = (*x, *y);
                        *x = c * xp - sn * yq;
                        *y = sn * xp + c * yq;
                    }
                }
                let data = a.as_mut_slice();
                data[p * n + p] = app - t * apq;
                data[q * n + q] = aqq + t * apq;
                data[p * n + q] = 0.0;
                data[q * n + p] = 0.0;
                for k in 0..n {
                    if k != p && k != q {
                        data[k * n + p] = data[p * n + k];
                        data[k * n + q] = data[q * n + k];
                    }
                }
                if let Some(v) = vt.as_mut() {
                    let (rp, rq) = two_rows(v.as_mut_slice(), n, p, q);
                    for (x, y) in rp.iter_mut().zip(rq.iter_mut()) {
                        let (xp, yq) = (*x, *y);
                        *x = c * xp - sn * yq;
                        *y = sn * xp + c * yq;
                    }
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            what: "Jacobi eigensolver",
            iterations: MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = vt.map(|v| {
        let mut out = Mat::zeros(n, n);
        for (r, &i) in order.iter().enumerate() {
            let src = v.row(i);
            let big = src
                .iter()
                .enumerate()
                .fold((0, 0.0f64), |(bi, bv), (k, x)| {
                    if x.abs() > bv {
                        (k, x.abs())
                    } else {
                        (bi, bv)
                    }
                })
                .0;
            let sign = if src[big] < 0.0 { -1.0 } else { 1.0 };
            for (o, x) in out.row_mut(r).iter_mut().zip(src) {
                *o = sign * x;
            }
        }
        out
    });
    Ok(Spectrum {
        eigenvalues,
        vectors,
        source: SpectrumSource::Other,
    })
}

fn start_vector(n: usize) -> Vec<f64> {
    let mut s = SeededStream::new(0, Domain::Test, n as u64);
    let v = s.gaussian_vec(n);
    let nv = norm(&v);
    v.into_iter().map(|x| x / nv).collect()
}

/// Largest eigenvalue of the PSD operator `apply` by power iteration;
/// `None` if the iteration cap is reached first.
fn power_iteration(n: usize, apply: impl Fn(&[f64]) -> Vec<f64>) -> Option<f64> {
    let mut v = start_vector(n);
    let mut est = 0.0;
    for _ in 0..POWER_CAP {
        let w = apply(&v);
        let new_est = dot(&v, &w);
        let nw = norm(&w);
        if nw == 0.0 {
            return Some(0.0);
        }
        v = w.into_iter().map(|x| x / nw).collect();
        if (new_est - est).abs() <= POWER_TOL * new_est.abs() {
            return Some(new_est);
        }
        est = new_est;
    }
    None
}

/// Spectral norm `‖M‖₂` of a general matrix, via power iteration on `MᵀM`
/// with a Jacobi fallback.
pub fn spectral_norm(m: &Mat) -> Result<f64> {
    if m.max_abs() == 0.0 {
        return Ok(0.0);
    }
    let mt = m.transpose();
    let apply = |v: &[f64]| mt.matvec(&m.matvec(v).expect("shape")).expect("shape");
    match power_iteration(m.cols(), apply) {
        Some(v) => Ok(v.max(0.0).sqrt()),
        None => Ok(sym_eig(&m.gram(), false)?.max().max(0.0).sqrt()),
    }
}

/// `max |λ_i|` of a symmetric matrix.
pub fn symmetric_norm(s: &Mat) -> Result<f64> {
    if s.max_asymmetry() > SYMMETRY_TOL {
        return Err(Error::NotSymmetric(s.max_asymmetry()));
    }
    spectral_norm(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WidthRule {
    Fixed(usize),
    /// `m = k · n`.
    Multiple(usize),
}

impl WidthRule {
    pub fn width(self, n: usize) -> usize {
        match self {
            WidthRule::Fixed(m) => m,
            WidthRule::Multiple(k) => k * n,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaMinRow {
    pub d: usize,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub lambda_min: f64,
}

/// `λ_min(H)` of the initial Gram matrix `H = H⁺ + H⁻` (built from `w⁰`)
/// for every `(n, seed)`.
pub fn lambda_min_sweep(
    d: usize,
    n_list: &[usize],
    rule: WidthRule,
    seeds: &[u64],
    biased: bool,
) -> Result<Vec<LambdaMinRow>> {
    let mut rows = Vec::with_capacity(n_list.len() * seeds.len());
    for &n in n_list {
        let m = rule.width(n);
        for &seed in seeds {
            let base = sample_uniform_sphere(n, d, seed)?;
            let feats = if biased {
                augment_with_bias(&base)?
            } else {
                base
            };
            let net = init_network(m, d, 1.0, biased, seed)?;
            let gs = gram_matrices(&net, &net, &feats)?;
            let spec = sym_eig(&gs.h(), false)?;
            rows.push(LambdaMinRow {
                d,
                n,
                m,
                seed,
                lambda_min: spec.min(),
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationReport {
    /// `sup_{i ≤ n} |λ_i − λ̂_i|`.
    pub sup_deviation: f64,
    /// `√(8 log(4/δ) / n)`.
    pub bound: f64,
    pub top_empirical: f64,
    pub top_operator: f64,
}

impl ConcentrationReport {
    pub fn within_bound(&self) -> bool {
        self.sup_deviation <= self.bound
    }
}

pub fn concentration_check(
    spectrum_k: &Spectrum,
    ops: &OperatorEigs,
    n: usize,
    delta: f64,
) -> Result<ConcentrationReport> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid("delta", "must lie in (0, 1)"));
    }
    check_dim(n, spectrum_k.n())?;
    let expanded = ops.expanded_values();
    if expanded.len() < n {
        return Err(invalid(
            "operator_eigs",
            format!("expanded list has {} < n = {n} values", expanded.len()),
        ));
    }
    let sup_deviation = spectrum_k
        .eigenvalues
        .iter()
        .zip(&expanded)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(ConcentrationReport {
        sup_deviation,
        bound: (8.0 * (4.0 / delta).ln() / n as f64).sqrt(),
        top_empirical: spectrum_k.max(),
        top_operator: expanded[0],
    })
}

/// `‖(I − ηK)ᵗ (y − ŷ(0))‖ / √n` for `t = 0..=steps`, by repeated mat-vecs.
pub fn linearized_error_curve(
    k: &Mat,
    y: &[f64],
    yhat0: &[f64],
    eta: f64,
    steps: usize,
) -> Result<Vec<f64>> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(invalid("eta", format!("must lie in (0, 1], got {eta}")));
    }
    let n = y.len();
    check_dim(n, yhat0.len())?;
    check_dim(n, k.rows())?;
    check_dim(n, k.cols())?;
    let sqrt_n = (n as f64).sqrt();
    let mut r: Vec<f64> = y.iter().zip(yhat0).map(|(a, b)| a - b).collect();
    let mut out = Vec::with_capacity(steps + 1);
    out.push(norm(&r) / sqrt_n);
    for _ in 0..steps {
        let kr = k.matvec(&r)?;
        for (ri, ki) in r.iter_mut().zip(kr) {
            *ri -= eta * ki;
        }
        out.push(norm(&r) / sqrt_n);
    }
    Ok(out)
}

/// `⟨φ̂_i, f⟩_{ρ(n)} = ⟨û_i, y⟩ / √n` against the empirical eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCoeffs {
    pub values: Vec<f64>,
    pub eigenvalues: Vec<f64>,
}

impl SpectralCoeffs {
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// `√(Σ_i (1 − ηλ̂_i)^{2t} coeff_i²)` for `t = 0..=steps`.
    pub fn predicted_curve(&self, eta: f64, steps: usize) -> Vec<f64> {
        (0..=steps)
            .map(|t| {
                self.values
                    .iter()
                    .zip(&self.eigenvalues)
                    .map(|(c, l)| (1.0 - eta * l).powi(2 * t as i32) * c * c)
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }
}

pub fn spectral_coeffs(spectrum: &Spectrum, y: &[f64]) -> Result<SpectralCoeffs> {
    let v = spectrum
        .vectors
        .as_ref()
        .ok_or_else(|| Error::Missing("eigenvectors".into()))?;
    check_dim(spectrum.n(), y.len())?;
    let s = 1.0 / (y.len() as f64).sqrt();
    Ok(SpectralCoeffs {
        values: (0..spectrum.n()).map(|i| s * dot(v.row(i), y)).collect(),
        eigenvalues: spectrum.eigenvalues.clone(),
    })
}

/// `Σ_{i > cutoff} (1 − ηλ̂_i)^{2t} coeff_i²`.
pub fn tail_energy(coeffs: &SpectralCoeffs, cutoff: usize, eta: f64, t: usize) -> Result<f64> {
    if cutoff > coeffs.values.len() {
        return Err(invalid(
            "cutoff",
            format!("exceeds n = {}", coeffs.values.len()),
        ));
    }
    Ok(coeffs.values[cutoff..]
        .iter()
        .zip(&coeffs.eigenvalues[cutoff..])
        .map(|(c, l)| (1.0 - eta * l).powi(2 * t as i32) * c * c)
        .sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentRow {
    pub ell: usize,
    pub m_ell: usize,
    /// `Σ_{i > m_ℓ} Σ_{j ≤ m_ℓ} ⟨φ̂_i, φ_j⟩²_{ρ(n)}`.
    pub alignment: f64,
    /// `64 λ̂_{m_ℓ+1} log(2/δ) / (λ_{m_ℓ} (λ_{m_ℓ} − λ_{m_ℓ+1})² n)`.
    pub ceiling: f64,
}

/// Mass of the top-`m_ℓ` operator eigenspace that leaks into the empirical
/// eigenvectors beyond index `m_ℓ`, for `ℓ = 0..=ell_max`.
///
/// The inner sum over an operator eigenspace of degree `ℓ'` equals
/// `û_iᵀ Z_ℓ' û_i` with the zonal projection matrix, so no explicit harmonic
/// basis is needed.
pub fn eigenspace_alignment(
    spectrum: &Spectrum,
    features: &FeatureSet,
    ops: &OperatorEigs,
    ell_max: usize,
    delta: f64,
) -> Result<Vec<AlignmentRow>> {
    let v = spectrum
        .vectors
        .as_ref()
        .ok_or_else(|| Error::Missing("eigenvectors".into()))?;
    let n = features.n();
    check_dim(n, spectrum.n())?;
    if ops.d != features.d {
        return Err(invalid(
            "operator_eigs",
            "dimension differs from the features",
        ));
    }
    let by_beta = ops.degrees_by_beta();
    let mut rows = Vec::new();
    for ell in 0..=ell_max {
        let m_ell = ops.m_ell(ell)?;
        let (lam_m, lam_next) = ops.gap_pair(ell)?;
        let mut alignment = 0.0;
        for e in &by_beta[..=ell] {
            let z = zonal_projection_matrix(features, e.ell)?;
            let head: f64 = (0..m_ell.min(n)).map(|i| z.quad_form(v.row(i))).sum();
            alignment += z.trace() - head;
        }
        let emp_next = spectrum.eigenvalues.get(m_ell).copied().unwrap_or(0.0);
        let ceiling =
            64.0 * emp_next * (2.0 / delta).ln() / (lam_m * (lam_m - lam_next).powi(2) * n as f64);
        rows.push(AlignmentRow {
            ell,
            m_ell,
            alignment,
            ceiling,
        });
    }
    Ok(rows)
}

/// CSV `ell,m_ell,alignment,ceiling`.
pub fn alignment_csv(rows: &[AlignmentRow]) -> CsvTable {
    let mut t = CsvTable::new(&["ell", "m_ell", "alignment", "ceiling"]);
    for r in rows {
        t.push(vec![
            r.ell.to_string(),
            r.m_ell.to_string(),
            fmt_f64(r.alignment),
            fmt_f64(r.ceiling),
        ]);
    }
    t
}
