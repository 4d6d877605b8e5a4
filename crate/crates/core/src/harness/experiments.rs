use crate::error::{invalid, Result};
use crate::harmonics::{
    ell_max_covering, kernel_eigenvalue_by_quadrature, operator_eigs, DEFAULT_SERIES_TOL,
};
use crate::io::{fmt_f64, CsvTable};
use crate::kernels::{empirical_kernel_matrix, gram_matrices, perturbation_norms, sandwich_check};
use crate::relu_net::{
    flip_sets, gd_step, init_network, sign_pattern, train, NetState, RecordOptions,
};
use crate::spectral::{
    concentration_check, lambda_min_sweep, linearized_error_curve, sym_eig, LambdaMinRow, WidthRule,
};
use crate::sphere_data::{
    augment_with_bias, build_dataset, make_polynomial_target, sample_uniform_sphere, FeatureSet,
};
use crate::theory::{
    bound_vs_trace, corollary3_displayed_width, corollary3_m_min, BoundVerdict, EigenGap,
    TheoryBounds,
};

use super::config::ExperimentConfig;
use super::svg::{Axes, Series};
use super::Check;

pub(crate) struct Artifacts {
    pub table: CsvTable,
    pub series: Vec<Series>,
    pub axes: Axes,
    pub bounds: Option<String>,
    pub checks: Vec<Check>,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let k = values.len();
    if k == 0 {
        return f64::NAN;
    }
    if k % 2 == 1 {
        values[k / 2]
    } else {
        0.5 * (values[k / 2 - 1] + values[k / 2])
    }
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

/// Least-squares slope of `ln y` against `t` over `t ∈ [lo, hi]`.
pub fn log_slope(curve: &[f64], lo: usize, hi: usize) -> f64 {
    let pts: Vec<(f64, f64)> = (lo..=hi.min(curve.len().saturating_sub(1)))
        .filter(|&t| curve[t] > 0.0)
        .map(|t| (t as f64, curve[t].ln()))
        .collect();
    let k = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn width_rule(c: &ExperimentConfig) -> WidthRule {
    c.m.map_or(WidthRule::Multiple(c.m_multiple), WidthRule::Fixed)
}

fn features_for(c: &ExperimentConfig, n: usize, seed: u64) -> Result<FeatureSet> {
    let base = sample_uniform_sphere(n, c.d, seed)?;
    if c.biased {
        augment_with_bias(&base)
    } else {
        Ok(base)
    }
}

/// Median of `value(row)` per `(d, n)`, in sweep order.
fn medians(
    rows: &[LambdaMinRow],
    value: impl Fn(&LambdaMinRow) -> f64,
) -> Vec<(usize, Vec<(usize, f64)>)> {
    let mut out: Vec<(usize, Vec<(usize, f64)>)> = Vec::new();
    for r in rows {
        if out.last().is_none_or(|(d, _)| *d != r.d) {
            out.push((r.d, Vec::new()));
        }
        let curve = &mut out.last_mut().expect("pushed").1;
        if curve.last().is_none_or(|(n, _)| *n != r.n) {
            let mut vals: Vec<f64> = rows
                .iter()
                .filter(|s| s.d == r.d && s.n == r.n)
                .map(&value)
                .collect();
            curve.push((r.n, median(&mut vals)));
        }
    }
    out
}

fn sweep(c: &ExperimentConfig) -> Result<Vec<LambdaMinRow>> {
    let mut rows = Vec::new();
    for &d in &c.d_list {
        rows.extend(lambda_min_sweep(
            d,
            &c.n_list,
            width_rule(c),
            &c.seeds,
            c.biased,
        )?);
    }
    Ok(rows)
}

pub(crate) fn fig1a(c: &ExperimentConfig) -> Result<Artifacts> {
    let rows = sweep(c)?;
    let mut table = CsvTable::new(&["d", "n", "m", "seed", "lambda_min"]);
    for r in &rows {
        table.push(vec![
            r.d.to_string(),
            r.n.to_string(),
            r.m.to_string(),
            r.seed.to_string(),
            fmt_f64(r.lambda_min),
        ]);
    }
    let curves = medians(&rows, |r| r.lambda_min);
    let expected = c.n_list.len() * c.d_list.len() * c.seeds.len();
    let mut checks = vec![
        Check::new(
            "row_count",
            rows.len() == expected,
            format!("{} rows, expected {expected}", rows.len()),
        ),
        Check::new(
            "psd",
            rows.iter().all(|r| r.lambda_min >= -1e-10),
            format!(
                "min lambda_min {:.3e}",
                rows.iter()
                    .map(|r| r.lambda_min)
                    .fold(f64::INFINITY, f64::min)
            ),
        ),
    ];
    for (d, curve) in &curves {
        let med: Vec<f64> = curve.iter().map(|p| p.1).collect();
        checks.push(Check::new(
            format!("median_decreasing_d{d}"),
            strictly_decreasing(&med),
            med.iter()
                .map(|v| format!("{v:.3e}"))
                .collect::<Vec<_>>()
                .join(" "),
        ));
    }
    Ok(Artifacts {
        table,
        series: curves
            .iter()
            .map(|(d, curve)| {
                Series::new(
                    format!("d={d}"),
                    curve.iter().map(|&(n, v)| (n as f64, v)).collect(),
                )
            })
            .collect(),
        axes: Axes {
            title: "median minimum eigenvalue of H".into(),
            x_label: "n".into(),
            y_label: "lambda_min(H)".into(),
            log_x: true,
            log_y: true,
        },
        bounds: None,
        checks,
    })
}

pub(crate) fn fig_a1(c: &ExperimentConfig) -> Result<Artifacts> {
    let rows = sweep(c)?;
    let inv = |r: &LambdaMinRow| {
        let v = r.n as f64 * r.lambda_min;
        if v > 0.0 {
            v.powf(-0.5)
        } else {
            f64::INFINITY
        }
    };
    let mut table = CsvTable::new(&["d", "n", "m", "seed", "lambda_min", "inv_sqrt_n_lambda_min"]);
    for r in &rows {
        table.push(vec![
            r.d.to_string(),
            r.n.to_string(),
            r.m.to_string(),
            r.seed.to_string(),
            fmt_f64(r.lambda_min),
            fmt_f64(inv(r)),
        ]);
    }
    let curves = medians(&rows, inv);
    let expected = c.n_list.len() * c.d_list.len() * c.seeds.len();
    let mut checks = vec![
        Check::new(
            "row_count",
            rows.len() == expected,
            format!("{} rows, expected {expected}", rows.len()),
        ),
        Check::new(
            "positive",
            rows.iter().all(|r| inv(r).is_finite() && inv(r) > 0.0),
            "(n lambda_min)^(-1/2) finite and positive",
        ),
    ];
    for (d, curve) in &curves {
        let first = curve[0].1;
        let lowest = curve.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        checks.push(Check::new(
            format!("above_half_first_d{d}"),
            lowest >= 0.5 * first,
            format!("first {first:.4e}, lowest median {lowest:.4e}"),
        ));
    }
    Ok(Artifacts {
        table,
        series: curves
            .iter()
            .map(|(d, curve)| {
                Series::new(
                    format!("d={d}"),
                    curve.iter().map(|&(n, v)| (n as f64, v)).collect(),
                )
            })
            .collect(),
        axes: Axes {
            title: "(lambda_min(nH))^(-1/2)".into(),
            x_label: "n".into(),
            y_label: "median over seeds".into(),
            log_x: true,
            log_y: false,
        },
        bounds: None,
        checks,
    })
}

pub(crate) fn fig1b(c: &ExperimentConfig) -> Result<Artifacts> {
    if !c.biased {
        return Err(invalid(
            "kernel",
            "fig1b compares against the biased kernel's operator",
        ));
    }
    let features = sample_uniform_sphere(c.n, c.d, c.seed)?;
    let k = empirical_kernel_matrix(&features, true)?;
    let spec = sym_eig(&k.entries, false)?;
    let ell_max = if c.ell_max == 0 {
        ell_max_covering(c.d, c.n)?
    } else {
        c.ell_max
    };
    let ops = operator_eigs(c.d, ell_max, DEFAULT_SERIES_TOL)?;
    let expanded = ops.expanded();
    let covers = expanded.len() >= c.n;
    let mut table = CsvTable::new(&["rank", "empirical", "operator", "ell"]);
    for (i, &v) in spec.eigenvalues.iter().enumerate() {
        let (op, ell) = expanded
            .get(i)
            .map_or((String::from("nan"), String::from("nan")), |(b, l)| {
                (fmt_f64(*b), l.to_string())
            });
        table.push(vec![(i + 1).to_string(), fmt_f64(v), op, ell]);
    }
    let mut checks = vec![Check::new(
        "operator_covers_n",
        covers,
        format!(
            "{} expanded values for n = {} (ell_max = {ell_max})",
            expanded.len(),
            c.n
        ),
    )];
    let mut bounds = None;
    if covers {
        let rep = concentration_check(&spec, &ops, c.n, c.delta)?;
        let beta0 = ops.degrees[0].beta;
        checks.push(Check::new(
            "sup_deviation",
            rep.within_bound(),
            format!("{:.4e} <= {:.4e}", rep.sup_deviation, rep.bound),
        ));
        checks.push(Check::new(
            "top_vs_beta0",
            (rep.top_empirical - beta0).abs() <= 0.05,
            format!("top {:.6} vs beta_0 {beta0:.6}", rep.top_empirical),
        ));
        bounds = Some(crate::io::key_values(&[
            ("n", c.n.to_string()),
            ("delta", fmt_f64(c.delta)),
            ("sup_deviation", fmt_f64(rep.sup_deviation)),
            ("bound", fmt_f64(rep.bound)),
            ("top_empirical", fmt_f64(rep.top_empirical)),
            ("top_operator", fmt_f64(rep.top_operator)),
        ]));
    }
    let ranked = |v: &[f64]| {
        v.iter()
            .enumerate()
            .map(|(i, &x)| ((i + 1) as f64, x))
            .collect()
    };
    let op_values: Vec<f64> = expanded.iter().take(c.n).map(|p| p.0).collect();
    Ok(Artifacts {
        table,
        series: vec![
            Series::new("eigenvalues of K", ranked(&spec.eigenvalues)),
            Series::new("operator (expanded)", ranked(&op_values)),
        ],
        axes: Axes {
            title: format!("spectrum of K, d={}, n={}", c.d, c.n),
            x_label: "rank".into(),
            y_label: "eigenvalue".into(),
            log_x: true,
            log_y: true,
        },
        bounds,
        checks,
    })
}

pub(crate) fn fig2a(c: &ExperimentConfig) -> Result<Artifacts> {
    let mut table = CsvTable::new(&["d", "ell", "beta", "beta_quadrature", "N"]);
    let mut series = Vec::new();
    let mut checks = Vec::new();
    for &d in &c.d_list {
        let ops = operator_eigs(d, c.ell_max, DEFAULT_SERIES_TOL)?;
        let mut worst = 0.0f64;
        let mut betas = Vec::new();
        for e in &ops.degrees {
            let quad = kernel_eigenvalue_by_quadrature(e.ell, d, true)?;
            worst = worst.max(((e.beta - quad) / quad).abs());
            betas.push(e.beta);
            table.push(vec![
                d.to_string(),
                e.ell.to_string(),
                fmt_f64(e.beta),
                fmt_f64(quad),
                e.multiplicity.to_string(),
            ]);
        }
        checks.push(Check::new(
            format!("decreasing_d{d}"),
            strictly_decreasing(&betas),
            "",
        ));
        checks.push(Check::new(
            format!("positive_d{d}"),
            betas.iter().all(|&b| b > 0.0),
            "",
        ));
        checks.push(Check::new(
            format!("series_vs_quadrature_d{d}"),
            worst <= 1e-6,
            format!("max relative difference {worst:.3e}"),
        ));
        series.push(Series::new(
            format!("d={d}"),
            betas
                .iter()
                .enumerate()
                .map(|(l, &b)| (l as f64, b))
                .collect(),
        ));
    }
    Ok(Artifacts {
        table,
        series,
        axes: Axes {
            title: "operator eigenvalues beta_l".into(),
            x_label: "l".into(),
            y_label: "beta_l".into(),
            log_x: false,
            log_y: true,
        },
        bounds: None,
        checks,
    })
}

/// Actual and linearized error curves for one target.
pub struct Fig2bCurves {
    pub actual: Vec<f64>,
    pub linearized: Vec<f64>,
}

/// Trains on linear and quadratic targets from a shared initialization.
pub fn fig2b_curves(
    c: &ExperimentConfig,
) -> Result<(
    Vec<Fig2bCurves>,
    Vec<crate::relu_net::TrainTrace>,
    crate::kernels::KernelMatrix,
)> {
    let m = c.width(c.n);
    let nu = c.nu_for(c.n);
    let features = features_for(c, c.n, c.seed)?;
    let net = init_network(m, c.d, nu, c.biased, c.seed)?;
    let kernel = empirical_kernel_matrix(&features, c.biased)?;
    let yhat0 = net.predictions(&features)?;
    let mut curves = Vec::new();
    let mut traces = Vec::new();
    for degree in [1u8, 2] {
        let data = build_dataset(&make_polynomial_target(degree, c.d, c.seed)?, &features)?;
        let (_, trace) = train(&net, &data, c.eta, c.steps, &RecordOptions::default())?;
        curves.push(Fig2bCurves {
            actual: trace.err_norms(),
            linearized: linearized_error_curve(
                &kernel.entries,
                &data.responses,
                &yhat0,
                c.eta,
                c.steps,
            )?,
        });
        traces.push(trace);
    }
    Ok((curves, traces, kernel))
}

pub(crate) fn fig2b(c: &ExperimentConfig) -> Result<Artifacts> {
    let (curves, traces, kernel) = fig2b_curves(c)?;
    let (lin, quad) = (&curves[0], &curves[1]);
    let mut table = CsvTable::new(&[
        "t",
        "linear",
        "quadratic",
        "linear_linearized",
        "quadratic_linearized",
    ]);
    for t in 0..=c.steps {
        table.push(vec![
            t.to_string(),
            fmt_f64(lin.actual[t]),
            fmt_f64(quad.actual[t]),
            fmt_f64(lin.linearized[t]),
            fmt_f64(quad.linearized[t]),
        ]);
    }
    let (sl, sq) = (
        log_slope(&lin.actual, 10, 60),
        log_slope(&quad.actual, 10, 60),
    );
    let dev = |k: &Fig2bCurves| {
        (0..=c.steps.min(50))
            .map(|t| (k.actual[t] - k.linearized[t]).abs())
            .fold(0.0, f64::max)
    };
    let decreases = |k: &Fig2bCurves| k.actual[c.steps] < k.actual[0];
    let mut checks = vec![
        Check::new(
            "linear_decreases",
            decreases(lin),
            format!("{:.4e} -> {:.4e}", lin.actual[0], lin.actual[c.steps]),
        ),
        Check::new(
            "quadratic_decreases",
            decreases(quad),
            format!("{:.4e} -> {:.4e}", quad.actual[0], quad.actual[c.steps]),
        ),
        Check::new(
            "linear_faster",
            sl < sq,
            format!("slopes linear {sl:.4e}, quadratic {sq:.4e}"),
        ),
        Check::new(
            "linearized_linear",
            dev(lin) <= 0.1,
            format!("max deviation {:.3e}", dev(lin)),
        ),
        Check::new(
            "linearized_quadratic",
            dev(quad) <= 0.1,
            format!("max deviation {:.3e}", dev(quad)),
        ),
    ];

    // Rate constants from the measured spectrum of K for the degree-1 target.
    let ops = operator_eigs(c.d, 2, DEFAULT_SERIES_TOL)?;
    let spec = sym_eig(&kernel.entries, false)?;
    let gap = EigenGap::from_spectrum(&spec, &ops, 1)?;
    let nu = c.nu_for(c.n);
    let tb = TheoryBounds::compute(
        gap,
        0.0,
        c.n as u64,
        c.width(c.n) as u64,
        c.eta,
        nu,
        c.delta,
        c.steps as u64,
    )?;
    let verdict = bound_vs_trace(&traces[0], tb.c0, tb.c1, c.eta)?;
    let mut bounds = tb.report();
    match verdict {
        BoundVerdict::Pass => {
            bounds.push_str("bound_vs_trace=pass\n");
            checks.push(Check::new("theorem_bound", true, ""));
        }
        BoundVerdict::Violation { t, err_norm, bound } => {
            bounds.push_str(&format!(
                "bound_vs_trace=violation t={t} err={err_norm:.6e} bound={bound:.6e}\n"
            ));
            checks.push(Check::new(
                "theorem_bound",
                false,
                format!("violated at t = {t}"),
            ));
        }
    }
    let pts = |v: &[f64]| v.iter().enumerate().map(|(t, &e)| (t as f64, e)).collect();
    Ok(Artifacts {
        table,
        series: vec![
            Series::new("linear", pts(&lin.actual)),
            Series::new("quadratic", pts(&quad.actual)),
            Series::new("linear (linearized)", pts(&lin.linearized)),
            Series::new("quadratic (linearized)", pts(&quad.linearized)),
        ],
        axes: Axes {
            title: format!("training error, n={}, m={}", c.n, c.width(c.n)),
            x_label: "t".into(),
            y_label: "||y - yhat(t)|| / sqrt(n)".into(),
            log_x: false,
            log_y: true,
        },
        bounds: Some(bounds),
        checks,
    })
}

/// Per-step summary of one sandwich run.
#[derive(Debug, Clone, PartialEq)]
pub struct SandwichStep {
    pub seed: u64,
    pub t: usize,
    pub min_lower: f64,
    pub min_upper: f64,
    pub slack_len: usize,
    pub m_norm: f64,
    pub l_norm: f64,
    pub ceiling: f64,
    pub perturbation_ok: bool,
}

/// GD run recording the entrywise sandwich slack and the perturbation norms
/// of every transition `t → t+1`.
pub fn sandwich_steps(c: &ExperimentConfig, seed: u64) -> Result<Vec<SandwichStep>> {
    let m = c.width(c.n);
    let features = features_for(c, c.n, seed)?;
    let data = build_dataset(
        &make_polynomial_target(c.target_degree, c.d, seed)?,
        &features,
    )?;
    let kernel = empirical_kernel_matrix(&features, c.biased)?;
    let mut net = init_network(m, c.d, c.nu_for(c.n), c.biased, seed)?;
    let residual = |net: &NetState| -> Result<Vec<f64>> {
        Ok(data
            .responses
            .iter()
            .zip(net.predictions(&features)?)
            .map(|(y, p)| y - p)
            .collect())
    };
    let mut patterns = vec![(0, sign_pattern(&net, &features)?)];
    let mut initial = None;
    let mut out = Vec::with_capacity(c.steps);
    for t in 0..c.steps {
        let next = if c.eta > 0.0 {
            gd_step(&net, &data, c.eta)?
        } else {
            NetState {
                t: net.t + 1,
                ..net.clone()
            }
        };
        patterns.push((t + 1, sign_pattern(&next, &features)?));
        let gs = gram_matrices(&net, &next, &features)?;
        let slack = sandwich_check(&residual(&net)?, &residual(&next)?, &gs, c.eta)?;
        let first = initial.get_or_insert_with(|| gs.clone());
        let rep = perturbation_norms(&gs, &kernel, first, &flip_sets(&patterns, t + 1)?)?;
        out.push(SandwichStep {
            seed,
            t,
            min_lower: slack.lower.iter().copied().fold(f64::INFINITY, f64::min),
            min_upper: slack.upper.iter().copied().fold(f64::INFINITY, f64::min),
            slack_len: slack.lower.len().min(slack.upper.len()),
            m_norm: rep.m_norm,
            l_norm: rep.l_norm,
            ceiling: rep.ceiling,
            perturbation_ok: rep.within_bounds(),
        });
        net = next;
    }
    Ok(out)
}

pub(crate) fn sandwich(c: &ExperimentConfig) -> Result<Artifacts> {
    let mut table = CsvTable::new(&[
        "seed",
        "t",
        "min_lower",
        "min_upper",
        "m_norm",
        "l_norm",
        "ceiling",
    ]);
    let mut steps = Vec::new();
    for &seed in &c.seeds {
        steps.extend(sandwich_steps(c, seed)?);
    }
    for s in &steps {
        table.push(vec![
            s.seed.to_string(),
            s.t.to_string(),
            fmt_f64(s.min_lower),
            fmt_f64(s.min_upper),
            fmt_f64(s.m_norm),
            fmt_f64(s.l_norm),
            fmt_f64(s.ceiling),
        ]);
    }
    let min_slack = steps
        .iter()
        .map(|s| s.min_lower.min(s.min_upper))
        .fold(f64::INFINITY, f64::min);
    let checks = vec![
        Check::new("min_slack", min_slack >= -1e-9, format!("{min_slack:.3e}")),
        Check::new(
            "slack_shape",
            steps.iter().all(|s| s.slack_len == c.n),
            format!("n = {}", c.n),
        ),
        Check::new(
            "perturbation_ceiling",
            steps.iter().all(|s| s.perturbation_ok),
            "||M||, ||L|| <= ceiling/2 and drift <= ceiling",
        ),
    ];
    let bounds = crate::io::key_values(&[
        ("min_slack", fmt_f64(min_slack)),
        ("steps", steps.len().to_string()),
    ]);
    let series = c
        .seeds
        .iter()
        .map(|&seed| {
            Series::new(
                format!("seed {seed}"),
                steps
                    .iter()
                    .filter(|s| s.seed == seed)
                    .map(|s| (s.t as f64, s.min_lower.min(s.min_upper)))
                    .collect(),
            )
        })
        .collect();
    Ok(Artifacts {
        table,
        series,
        axes: Axes {
            title: "minimum entrywise slack".into(),
            x_label: "t".into(),
            y_label: "slack".into(),
            log_x: false,
            log_y: false,
        },
        bounds: Some(bounds),
        checks,
    })
}

/// `(n, m_min, displayed width)` for the zero-approximation-error corollary.
pub fn corollary_table(
    d: usize,
    ell: usize,
    n_list: &[usize],
    delta: f64,
) -> Result<Vec<(usize, f64, f64)>> {
    let ops = operator_eigs(d, ell + 1, DEFAULT_SERIES_TOL)?;
    let gap = EigenGap::from_operator(&ops, ell)?;
    n_list
        .iter()
        .map(|&n| {
            Ok((
                n,
                corollary3_m_min(&gap, n as u64, delta)?,
                corollary3_displayed_width(&gap, n as u64),
            ))
        })
        .collect()
}

pub(crate) fn bounds(c: &ExperimentConfig) -> Result<Artifacts> {
    let ell = usize::from(c.target_degree);
    let ops = operator_eigs(c.d, c.ell_max.max(ell + 1), DEFAULT_SERIES_TOL)?;
    let gap = EigenGap::from_operator(&ops, ell)?;
    let m = c.width(c.n);
    let tb = TheoryBounds::compute(
        gap,
        0.0,
        c.n as u64,
        m as u64,
        c.eta,
        c.nu_for(c.n),
        c.delta,
        c.steps as u64,
    )?;
    let rows = corollary_table(c.d, ell, &c.n_list, c.delta)?;
    let mut table = CsvTable::new(&["n", "m_min", "displayed_width"]);
    for (n, mm, dw) in &rows {
        table.push(vec![n.to_string(), fmt_f64(*mm), fmt_f64(*dw)]);
    }
    let mut checks = Vec::new();
    let mut report = tb.report();
    for w in rows.windows(2) {
        let (n0, m0, _) = w[0];
        let (n1, m1, _) = w[1];
        let ratio = m1 / m0;
        let expected = (n1 as f64 / n0 as f64).powi(2);
        report.push_str(&format!("m_min_ratio_{n1}_{n0}={}\n", fmt_f64(ratio)));
        checks.push(Check::new(
            format!("quadratic_scaling_{n0}_{n1}"),
            (ratio - expected).abs() <= 0.2 * expected,
            format!("ratio {ratio:.4} vs {expected}"),
        ));
    }
    let series = vec![Series::new(
        "m_min",
        rows.iter().map(|r| (r.0 as f64, r.1)).collect(),
    )];
    Ok(Artifacts {
        table,
        series,
        axes: Axes {
            title: "width floor".into(),
            x_label: "n".into(),
            y_label: "m_min".into(),
            log_x: true,
            log_y: true,
        },
        bounds: Some(report),
        checks,
    })
}
