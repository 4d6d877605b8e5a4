//! Closed-form bounds: concentration radii, the rate constants `(c₀, c₁)`,
//! the over-parameterization floor on the width, and the early-stopping
//! horizon.

use crate::error::{invalid, Result};
use crate::harmonics::OperatorEigs;
use crate::io::{fmt_f64, key_values};
use crate::relu_net::TrainTrace;
use crate::spectral::Spectrum;

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid("delta", format!("must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

/// `√(log(2n²/δ)/(2m)) + √(8 log(4/δ)/n)`.
pub fn concentration_eps(n: u64, m: u64, delta: f64) -> Result<f64> {
    if n == 0 || m == 0 {
        return Err(invalid("n, m", "must be at least 1"));
    }
    check_delta(delta)?;
    let (n, m) = (n as f64, m as f64);
    Ok(((2.0 * n * n / delta).ln() / (2.0 * m)).sqrt() + (8.0 * (4.0 / delta).ln() / n).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenSource {
    /// Analytic operator eigenvalues under the uniform measure.
    Operator,
    /// Eigenvalues of an empirical kernel matrix.
    Empirical,
}

impl EigenSource {
    fn as_str(self) -> &'static str {
        match self {
            EigenSource::Operator => "operator",
            EigenSource::Empirical => "empirical",
        }
    }
}

/// `λ_{m_ℓ}`, `λ_{m_ℓ+1}` and the cutoff `m_ℓ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenGap {
    pub ell: usize,
    pub m_ell: usize,
    pub lambda_m: f64,
    pub lambda_next: f64,
    pub source: EigenSource,
}

impl EigenGap {
    pub fn gap(&self) -> f64 {
        self.lambda_m - self.lambda_next
    }

    pub fn from_operator(ops: &OperatorEigs, ell: usize) -> Result<Self> {
        let (lambda_m, lambda_next) = ops.gap_pair(ell)?;
        Ok(Self {
            ell,
            m_ell: ops.m_ell(ell)?,
            lambda_m,
            lambda_next,
            source: EigenSource::Operator,
        })
    }

    /// Empirical `λ̂_{m_ℓ}`, `λ̂_{m_ℓ+1}` with `m_ℓ` taken from the operator.
    pub fn from_spectrum(spectrum: &Spectrum, ops: &OperatorEigs, ell: usize) -> Result<Self> {
        let m_ell = ops.m_ell(ell)?;
        if m_ell == 0 || m_ell >= spectrum.n() {
            return Err(invalid(
                "ell",
                format!("m_ell = {m_ell} not inside the spectrum"),
            ));
        }
        Ok(Self {
            ell,
            m_ell,
            lambda_m: spectrum.eigenvalues[m_ell - 1],
            lambda_next: spectrum.eigenvalues[m_ell],
            source: EigenSource::Empirical,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateConstants {
    pub c0: f64,
    pub c1: f64,
    /// Violated preconditions; the constants are still computed.
    pub warnings: Vec<String>,
}

/// `c₀ = ¾ λ_{m_ℓ}` and
/// `c₁ = 8√2 √log(2/δ) / ((λ_{m_ℓ} − λ_{m_ℓ+1}) √n) + √2 ε + 2√2 ν`.
pub fn theorem4_constants(
    gap: &EigenGap,
    eps_approx: f64,
    nu: f64,
    n: u64,
    delta: f64,
) -> Result<RateConstants> {
    check_delta(delta)?;
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    let g = gap.gap();
    if !(g > 0.0) {
        return Err(invalid(
            "eigengap",
            format!("λ_m − λ_(m+1) = {g} is not positive"),
        ));
    }
    if !(gap.lambda_m > 0.0) {
        return Err(invalid("lambda_m", "must be positive"));
    }
    if eps_approx < 0.0 || nu < 0.0 {
        return Err(invalid("eps_approx, nu", "must be non-negative"));
    }
    let s2 = std::f64::consts::SQRT_2;
    let log2d = (2.0 / delta).ln();
    let nf = n as f64;
    let c0 = 0.75 * gap.lambda_m;
    let c1 = 8.0 * s2 * log2d.sqrt() / (g * nf.sqrt()) + s2 * eps_approx + 2.0 * s2 * nu;
    let mut warnings = Vec::new();
    let need = (256.0 * log2d / (g * g)).max(gap.m_ell as f64);
    if !(nf > need) {
        warnings.push(format!(
            "sample-size precondition violated: n = {n} <= max(256 log(2/delta)/gap^2, m_ell) = {need:.6e}"
        ));
    }
    Ok(RateConstants { c0, c1, warnings })
}

/// Over-parameterization width floor:
/// `max{(32/c₁²)(log(2n/δ)(1/c₀ + 2ηTc₁)² + (4/ν²)(1/c₀ + 2ηTc₁)⁴), (10/3)² log(2n/δ)}`,
/// rounded up.
pub fn overparam_floor(
    c0: f64,
    c1: f64,
    eta: f64,
    horizon: f64,
    nu: f64,
    n: u64,
    delta: f64,
) -> Result<u64> {
    let v = overparam_floor_value(c0, c1, eta, horizon, nu, n, delta)?;
    if v > u64::MAX as f64 {
        return Err(crate::Error::Overflow("width floor exceeds u64"));
    }
    Ok((v.ceil() as u64).max(1))
}

/// Unrounded [`overparam_floor`].
pub fn overparam_floor_value(
    c0: f64,
    c1: f64,
    eta: f64,
    horizon: f64,
    nu: f64,
    n: u64,
    delta: f64,
) -> Result<f64> {
    if !(delta > 0.0 && delta < 0.25) {
        return Err(invalid(
            "delta",
            format!("must lie in (0, 1/4), got {delta}"),
        ));
    }
    if !(c0 > 0.0 && c0 < 1.0) {
        return Err(invalid("c0", format!("must lie in (0, 1), got {c0}")));
    }
    if !(c1 > 0.0) {
        return Err(invalid("c1", "must be positive"));
    }
    if !(eta > 0.0) || !(nu > 0.0) || !(horizon >= 0.0) || n == 0 {
        return Err(invalid("eta, nu, T, n", "must be positive"));
    }
    let log = (2.0 * n as f64 / delta).ln();
    let a = 1.0 / c0 + 2.0 * eta * horizon * c1;
    let first = 32.0 / (c1 * c1) * (log * a * a + 4.0 / (nu * nu) * a.powi(4));
    let second = (10.0f64 / 3.0).powi(2) * log;
    Ok(first.max(second))
}

/// `T = ⌈log(1/c₁) / log(1/(1 − ηc₀))⌉`.
#[allow(non_snake_case)]
pub fn early_stop_T(c0: f64, c1: f64, eta: f64) -> Result<u64> {
    if !(c1 > 0.0 && c1 < 1.0) {
        return Err(invalid("c1", format!("must lie in (0, 1), got {c1}")));
    }
    let rate = eta * c0;
    if !(rate > 0.0 && rate < 1.0) {
        return Err(invalid("eta*c0", format!("must lie in (0, 1), got {rate}")));
    }
    let ratio = (1.0 / c1).ln() / (1.0 / (1.0 - rate)).ln();
    // Guard against ratios a rounding error above an integer.
    let r = ratio.round();
    let t = if (ratio - r).abs() <= 1e-12 * r.max(1.0) {
        r
    } else {
        ratio.ceil()
    };
    Ok((t as u64).max(1))
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundVerdict {
    Pass,
    Violation { t: usize, err_norm: f64, bound: f64 },
}

/// Checks `‖y − ŷ(t)‖/√n ≤ (1 − ηc₀)ᵗ + 2c₁` at every recorded step.
pub fn bound_vs_trace(trace: &TrainTrace, c0: f64, c1: f64, eta: f64) -> Result<BoundVerdict> {
    if (trace.eta - eta).abs() > 1e-15 * eta.abs() {
        return Err(invalid(
            "eta",
            "differs from the step size used for the trace",
        ));
    }
    for r in &trace.records {
        let bound = (1.0 - eta * c0).powi(r.t as i32) + 2.0 * c1;
        if r.err_norm > bound {
            return Ok(BoundVerdict::Violation {
                t: r.t,
                err_norm: r.err_norm,
                bound,
            });
        }
    }
    Ok(BoundVerdict::Pass)
}

/// Error floor in the zero-approximation-error regime:
/// `16 √(2 log(2/δ)) / (√n (λ_{m_ℓ} − λ_{m_ℓ+1}))`.
///
/// Equals `2c₁` at `ε = 0` only when the `2√2ν` term of `c₁` is dropped.
pub fn corollary3_floor(gap: f64, n: u64, delta: f64) -> f64 {
    16.0 * (2.0 * (2.0 / delta).ln()).sqrt() / ((n as f64).sqrt() * gap)
}

/// `T = log(n (λ_{m_ℓ} − λ_{m_ℓ+1}))`.
pub fn corollary3_horizon(gap: f64, n: u64) -> f64 {
    (n as f64 * gap).ln()
}

/// [`overparam_floor_value`] under the substitutions `ν = 1/√n`, `η = 1`,
/// `T = log(n·gap)`, `ε = 0`.
pub fn corollary3_m_min(gap: &EigenGap, n: u64, delta: f64) -> Result<f64> {
    let nu = 1.0 / (n as f64).sqrt();
    let c = theorem4_constants(gap, 0.0, nu, n, delta)?;
    overparam_floor_value(
        c.c0,
        c.c1,
        1.0,
        corollary3_horizon(gap.gap(), n),
        nu,
        n,
        delta,
    )
}

/// Simplified width requirement
/// `gap² n² (1/λ_{m_ℓ} + log n / (gap √n))⁴`, without hidden constants.
pub fn corollary3_displayed_width(gap: &EigenGap, n: u64) -> f64 {
    let g = gap.gap();
    let nf = n as f64;
    g * g * nf * nf * (1.0 / gap.lambda_m + nf.ln() / (g * nf.sqrt())).powi(4)
}

/// Every bound for one experiment configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoryBounds {
    pub n: u64,
    pub m: u64,
    pub eta: f64,
    pub nu: f64,
    pub delta: f64,
    pub eps_approx: f64,
    pub gap: EigenGap,
    pub c0: f64,
    pub c1: f64,
    /// Width floor at the experiment's horizon (absent if `δ ≥ 1/4` or
    /// `c₀ ≥ 1`).
    pub m_min: Option<u64>,
    /// Early-stopping horizon (absent when `c₁ ≥ 1`).
    pub early_stop: Option<u64>,
    pub horizon: u64,
    pub eps_conc: f64,
    pub warnings: Vec<String>,
}

impl TheoryBounds {
    #[allow(clippy::too_many_arguments)]
    pub fn compute(
        gap: EigenGap,
        eps_approx: f64,
        n: u64,
        m: u64,
        eta: f64,
        nu: f64,
        delta: f64,
        horizon: u64,
    ) -> Result<Self> {
        let rc = theorem4_constants(&gap, eps_approx, nu, n, delta)?;
        let mut warnings = rc.warnings;
        let early_stop = match early_stop_T(rc.c0, rc.c1, eta) {
            Ok(t) => Some(t),
            Err(e) => {
                warnings.push(format!("no early-stopping horizon: {e}"));
                None
            }
        };
        let m_min = match overparam_floor(rc.c0, rc.c1, eta, horizon as f64, nu, n, delta) {
            Ok(v) => {
                if m < v {
                    warnings.push(format!("width m = {m} is below the floor {v}"));
                }
                Some(v)
            }
            Err(e) => {
                warnings.push(format!("no width floor: {e}"));
                None
            }
        };
        Ok(Self {
            n,
            m,
            eta,
            nu,
            delta,
            eps_approx,
            gap,
            c0: rc.c0,
            c1: rc.c1,
            m_min,
            early_stop,
            horizon,
            eps_conc: concentration_eps(n, m, delta)?,
            warnings,
        })
    }

    /// Plain-text `key=value` report.
    pub fn report(&self) -> String {
        let opt = |v: Option<u64>| v.map_or_else(|| "none".to_string(), |x| x.to_string());
        let mut pairs = vec![
            ("n", self.n.to_string()),
            ("m", self.m.to_string()),
            ("eta", fmt_f64(self.eta)),
            ("nu", fmt_f64(self.nu)),
            ("delta", fmt_f64(self.delta)),
            ("ell", self.gap.ell.to_string()),
            ("m_ell", self.gap.m_ell.to_string()),
            ("lambda_m", fmt_f64(self.gap.lambda_m)),
            ("lambda_m_next", fmt_f64(self.gap.lambda_next)),
            ("eigen_source", self.gap.source.as_str().to_string()),
            ("eps_approx", fmt_f64(self.eps_approx)),
            ("c0", fmt_f64(self.c0)),
            ("c1", fmt_f64(self.c1)),
            ("m_min", opt(self.m_min)),
            ("horizon", self.horizon.to_string()),
            ("early_stop_T", opt(self.early_stop)),
            ("eps_conc", fmt_f64(self.eps_conc)),
        ];
        pairs.extend(self.warnings.iter().map(|w| ("warning", w.clone())));
        key_values(&pairs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::{beta_eigenvalue, operator_eigs, DEFAULT_SERIES_TOL};

    fn gap(lambda_m: f64, lambda_next: f64) -> EigenGap {
        EigenGap {
            ell: 1,
            m_ell: 11,
            lambda_m,
            lambda_next,
            source: EigenSource::Operator,
        }
    }

    #[test]
    fn concentration_examples() {
        let e = concentration_eps(500, 1_000_000_000_000_000_000, 0.05).unwrap();
        assert!((e - 0.2648).abs() < 1e-4, "{e}");
        let a = concentration_eps(400, u64::MAX, 0.05).unwrap();
        let b = concentration_eps(1600, u64::MAX, 0.05).unwrap();
        assert!((a / b - 2.0).abs() < 1e-8);
        let exact = (4f64.ln() / 2.0).sqrt() + (8.0 * 8f64.ln()).sqrt();
        assert!((concentration_eps(1, 1, 0.5).unwrap() - exact).abs() < 1e-15);
        assert!(concentration_eps(0, 1, 0.5).is_err());
        assert!(concentration_eps(1, 1, 1.0).is_err());
    }

    #[test]
    fn c1_identity() {
        // log(2/δ) = 1 at δ = 2/e, so c₁ = 8√2/√128 = 1.
        let delta = 2.0 / std::f64::consts::E;
        let rc = theorem4_constants(&gap(1.5, 0.5), 0.0, 0.0, 128, delta).unwrap();
        assert!((rc.c1 - 1.0).abs() < 1e-12);
        // δ = 2/e² doubles the logarithm: c₁ = √2.
        let rc2 = theorem4_constants(
            &gap(1.5, 0.5),
            0.0,
            0.0,
            128,
            2.0 / std::f64::consts::E.powi(2),
        )
        .unwrap();
        assert!((rc2.c1 - std::f64::consts::SQRT_2).abs() < 1e-12);
        assert!((rc.c0 - 1.125).abs() < 1e-15);
        assert!(!rc.warnings.is_empty());
        let far = theorem4_constants(&gap(0.5, 0.2), 0.0, 0.0, u64::MAX, 0.05).unwrap();
        assert!(far.c1 < 1e-7);
        assert!(theorem4_constants(&gap(0.2, 0.2), 0.0, 0.0, 10, 0.05).is_err());
    }

    #[test]
    fn c0_from_beta() {
        let ops = operator_eigs(10, 3, DEFAULT_SERIES_TOL).unwrap();
        let g = EigenGap::from_operator(&ops, 1).unwrap();
        let rc = theorem4_constants(&g, 0.0, 0.0, 1000, 0.05).unwrap();
        let b1 = beta_eigenvalue(1, 10, DEFAULT_SERIES_TOL).unwrap();
        assert!((rc.c0 - 0.75 * b1).abs() < 1e-15);
    }

    #[test]
    fn floor_examples() {
        let n = 100;
        let delta = 0.1;
        // With T = 0 the first branch is O(1/c₁²) and vanishes for huge c₁.
        let v = overparam_floor(0.5, 1e9, 1.0, 0.0, 0.5, n, delta).unwrap();
        let expect = ((10.0f64 / 3.0).powi(2) * (2.0 * n as f64 / delta).ln()).ceil() as u64;
        assert_eq!(v, expect);
        let mut last = 0;
        for t in 0..20 {
            let v = overparam_floor(0.3, 0.2, 1.0, t as f64, 0.1, n, delta).unwrap();
            assert!(v >= last);
            last = v;
        }
        // Hand-computed: c0 = 0.5, c1 = 0.25, η = 1, T = 2, ν = 0.5, n = 100, δ = 0.1.
        let a: f64 = 2.0 + 2.0 * 2.0 * 0.25;
        let log = 2000f64.ln();
        let hand = 32.0 / 0.0625 * (log * a * a + 16.0 * a.powi(4));
        let got = overparam_floor_value(0.5, 0.25, 1.0, 2.0, 0.5, 100, 0.1).unwrap();
        assert!((got - hand).abs() <= 1e-12 * hand);
        assert!(overparam_floor(0.5, 0.2, 1.0, 1.0, 0.1, 10, 0.3).is_err());
        assert!(overparam_floor(1.5, 0.2, 1.0, 1.0, 0.1, 10, 0.1).is_err());
    }

    #[test]
    fn early_stop_examples() {
        assert_eq!(early_stop_T(0.375, 0.1, 1.0).unwrap(), 5);
        assert_eq!(early_stop_T(0.4, 0.8, 0.5).unwrap(), 1);
        let mut last = u64::MAX;
        for k in 1..20 {
            let t = early_stop_T(0.04 * k as f64, 0.05, 1.0).unwrap();
            assert!(t <= last);
            last = t;
        }
        assert!(early_stop_T(0.5, 1.0, 1.0).is_err());
        assert!(early_stop_T(0.5, 0.5, 2.5).is_err());
    }

    #[test]
    fn corollary_floor_and_c1() {
        let g = gap(0.0432876370368581, 0.00194150858303326);
        let n = 10_000;
        let delta = 0.05;
        let floor = corollary3_floor(g.gap(), n, delta);
        let without_nu = theorem4_constants(&g, 0.0, 0.0, n, delta).unwrap();
        assert!((2.0 * without_nu.c1 - floor).abs() <= 1e-12 * floor);
        let nu = 1.0 / (n as f64).sqrt();
        let with_nu = theorem4_constants(&g, 0.0, nu, n, delta).unwrap();
        let extra = 4.0 * std::f64::consts::SQRT_2 / (n as f64).sqrt();
        assert!((2.0 * with_nu.c1 - floor - extra).abs() <= 1e-12 * floor);
    }

    #[test]
    fn report_lists_keys() {
        let ops = operator_eigs(10, 3, DEFAULT_SERIES_TOL).unwrap();
        let g = EigenGap::from_operator(&ops, 1).unwrap();
        let b = TheoryBounds::compute(g, 0.0, 1000, 2000, 1.0, 1.0 / 1000f64.sqrt(), 0.05, 200)
            .unwrap();
        let text = b.report();
        for key in [
            "c0=",
            "c1=",
            "m_min=",
            "early_stop_T=none",
            "eps_conc=",
            "warning=",
        ] {
            assert!(text.contains(key), "{key} missing in\n{text}");
        }
    }
}
