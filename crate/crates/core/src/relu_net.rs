//! Two-layer ReLU network `f(x) = m^{-1/2} Σ_j a_j [⟨x, w_j⟩]₊` with a fixed
//! ±1 output layer, trained by full-batch gradient descent on the square loss.
//!
//! The ReLU subgradient at 0 is taken as 0: every activation indicator in
//! this module is the strict `⟨w_j, x_i⟩ > 0`.

use std::path::Path;

use crate::error::{check_dim, invalid, Error, Result};
use crate::io::{fmt_f64, CsvTable};
use crate::linalg::{axpy, dot, norm, Mat};
use crate::rng::{Domain, SeededStream};
use crate::sphere_data::{Dataset, FeatureSet};

#[derive(Debug, Clone, PartialEq)]
pub struct NetState {
    /// `m` rows, one weight vector per hidden neuron.
    pub weights: Mat,
    /// Output-layer signs, each `+1.0` or `-1.0`.
    pub signs: Vec<f64>,
    pub nu: f64,
    pub bias_mode: bool,
    pub t: usize,
    pub seed: u64,
}

impl NetState {
    /// Wraps explicit weights and signs (used by tests and the FFI layer).
    pub fn from_parts(weights: Mat, signs: Vec<f64>, nu: f64, bias_mode: bool) -> Result<Self> {
        check_dim(weights.rows(), signs.len())?;
        if signs.iter().any(|&a| a != 1.0 && a != -1.0) {
            return Err(invalid("signs", "every output weight must be +1 or -1"));
        }
        if !(nu > 0.0 && nu <= 1.0) {
            return Err(invalid("nu", format!("must lie in (0, 1], got {nu}")));
        }
        Ok(Self {
            weights,
            signs,
            nu,
            bias_mode,
            t: 0,
            seed: 0,
        })
    }

    pub fn width(&self) -> usize {
        self.weights.rows()
    }

    /// Length of each weight vector.
    pub fn dim(&self) -> usize {
        self.weights.cols()
    }

    pub fn weight(&self, j: usize) -> &[f64] {
        self.weights.row(j)
    }

    fn check_features(&self, features: &FeatureSet) -> Result<()> {
        check_dim(self.dim(), features.dim())?;
        if features.augmented != self.bias_mode {
            return Err(invalid(
                "features",
                "bias-mode networks need augmented features and vice versa",
            ));
        }
        Ok(())
    }

    /// Preactivations `⟨w_j, x_i⟩`, laid out neuron-major (`m × n`).
    pub fn preactivations(&self, features: &FeatureSet) -> Result<Mat> {
        self.check_features(features)?;
        let n = features.n();
        let mut out = Mat::zeros(self.width(), n);
        for j in 0..self.width() {
            let w = self.weight(j);
            let row = out.row_mut(j);
            for (i, slot) in row.iter_mut().enumerate() {
                *slot = dot(w, features.point(i));
            }
        }
        Ok(out)
    }

    pub fn predictions(&self, features: &FeatureSet) -> Result<Vec<f64>> {
        let pre = self.preactivations(features)?;
        Ok(predictions_from(&pre, &self.signs))
    }
}

fn predictions_from(pre: &Mat, signs: &[f64]) -> Vec<f64> {
    let m = pre.rows();
    let mut yhat = vec![0.0; pre.cols()];
    for (j, &a) in signs.iter().enumerate() {
        for (y, &z) in yhat.iter_mut().zip(pre.row(j)) {
            if z > 0.0 {
                *y += a * z;
            }
        }
    }
    let s = 1.0 / (m as f64).sqrt();
    yhat.iter_mut().for_each(|y| *y *= s);
    yhat
}

/// Random initialization: `w_j ~ N(0, ν² I)` (bias coordinate included in
/// bias mode) and `a_j` uniform on `{-1, +1}`.
pub fn init_network(m: usize, d: usize, nu: f64, bias_mode: bool, seed: u64) -> Result<NetState> {
    if m == 0 {
        return Err(invalid("m", "need at least one hidden neuron"));
    }
    if d == 0 {
        return Err(invalid("d", "dimension must be positive"));
    }
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(invalid("nu", format!("must lie in (0, 1], got {nu}")));
    }
    let dim = d + usize::from(bias_mode);
    let mut data = Vec::with_capacity(m * dim);
    for j in 0..m {
        let mut s = SeededStream::new(seed, Domain::Weights, j as u64);
        data.extend(s.gaussian_vec(dim).into_iter().map(|g| nu * g));
    }
    let mut coin = SeededStream::new(seed, Domain::Signs, 0);
    let signs = (0..m)
        .map(|_| if coin.coin() { 1.0 } else { -1.0 })
        .collect();
    Ok(NetState {
        weights: Mat::from_rows(m, dim, data)?,
        signs,
        nu,
        bias_mode,
        t: 0,
        seed,
    })
}

pub fn forward(net: &NetState, x: &[f64]) -> Result<f64> {
    check_dim(net.dim(), x.len())?;
    let s: f64 = (0..net.width())
        .map(|j| net.signs[j] * dot(net.weight(j), x).max(0.0))
        .sum();
    Ok(s / (net.width() as f64).sqrt())
}

/// `(1/2n) Σ_i (y_i − f(x_i))²`.
pub fn empirical_risk(net: &NetState, data: &Dataset) -> Result<f64> {
    let yhat = net.predictions(&data.features)?;
    Ok(risk_from(&data.responses, &yhat))
}

fn risk_from(y: &[f64], yhat: &[f64]) -> f64 {
    let ss: f64 = y.iter().zip(yhat).map(|(a, b)| (a - b).powi(2)).sum();
    ss / (2.0 * y.len() as f64)
}

fn step_from(net: &NetState, data: &Dataset, pre: &Mat, residual: &[f64], eta: f64) -> NetState {
    let n = data.n();
    let m = net.width();
    let coef = eta / (n as f64 * (m as f64).sqrt());
    let mut next = net.clone();
    let mut grad = vec![0.0; net.dim()];
    for j in 0..m {
        grad.iter_mut().for_each(|g| *g = 0.0);
        for (i, &z) in pre.row(j).iter().enumerate() {
            if z > 0.0 {
                axpy(residual[i], data.features.point(i), &mut grad);
            }
        }
        axpy(coef * net.signs[j], &grad, next.weights.row_mut(j));
    }
    next.t += 1;
    next
}

/// One full-batch GD step. All neurons are updated from the pre-step state.
pub fn gd_step(net: &NetState, data: &Dataset, eta: f64) -> Result<NetState> {
    if !(eta > 0.0) {
        return Err(invalid("eta", format!("must be positive, got {eta}")));
    }
    let pre = net.preactivations(&data.features)?;
    let yhat = predictions_from(&pre, &net.signs);
    let residual: Vec<f64> = data
        .responses
        .iter()
        .zip(&yhat)
        .map(|(y, p)| y - p)
        .collect();
    Ok(step_from(net, data, &pre, &residual, eta))
}

/// `n × m` activation bits, bit `(i, j) = 1{⟨w_j, x_i⟩ > 0}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignPattern {
    n: usize,
    m: usize,
    words: usize,
    bits: Vec<u64>,
}

impl SignPattern {
    pub fn zeros(n: usize, m: usize) -> Self {
        let words = m.div_ceil(64);
        Self {
            n,
            m,
            words,
            bits: vec![0; n * words],
        }
    }

    fn from_preactivations(pre: &Mat) -> Self {
        let (m, n) = (pre.rows(), pre.cols());
        let mut p = Self::zeros(n, m);
        for j in 0..m {
            for (i, &z) in pre.row(j).iter().enumerate() {
                if z > 0.0 {
                    p.bits[i * p.words + j / 64] |= 1u64 << (j % 64);
                }
            }
        }
        p
    }

    /// Bits whose neuron index satisfies `keep`.
    pub fn neuron_mask(m: usize, keep: impl Fn(usize) -> bool) -> Vec<u64> {
        let mut mask = vec![0u64; m.div_ceil(64)];
        for j in 0..m {
            if keep(j) {
                mask[j / 64] |= 1u64 << (j % 64);
            }
        }
        mask
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    pub fn count_row(&self, i: usize) -> u32 {
        self.row(i).iter().map(|w| w.count_ones()).sum()
    }

    /// Accumulates `self |= a XOR b` row by row.
    fn or_xor(&mut self, a: &SignPattern, b: &SignPattern) {
        for ((o, x), y) in self.bits.iter_mut().zip(&a.bits).zip(&b.bits) {
            *o |= x ^ y;
        }
    }
}

pub fn sign_pattern(net: &NetState, features: &FeatureSet) -> Result<SignPattern> {
    Ok(SignPattern::from_preactivations(
        &net.preactivations(features)?,
    ))
}

/// `|F(x_i, t)|` from patterns recorded at every iteration `0..=t`.
pub fn flip_sets(patterns: &[(usize, SignPattern)], t: usize) -> Result<Vec<u32>> {
    let lookup = |k: usize| {
        patterns
            .iter()
            .find(|(s, _)| *s == k)
            .map(|(_, p)| p)
            .ok_or_else(|| Error::Missing(format!("sign pattern for iteration {k}")))
    };
    let base = lookup(0)?;
    let mut ever = SignPattern::zeros(base.n, base.m);
    for k in 1..=t {
        let p = lookup(k)?;
        check_dim(base.n, p.n)?;
        check_dim(base.m, p.m)?;
        ever.or_xor(p, base);
    }
    Ok((0..ever.n).map(|i| ever.count_row(i)).collect())
}

#[derive(Debug, Clone, Default)]
pub struct RecordOptions {
    /// Store the full sign pattern every `k`-th iteration (`None`: never).
    pub pattern_every: Option<usize>,
    /// Stop once `‖y − ŷ(t)‖/√n` drops below this value.
    pub error_floor: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub t: usize,
    pub err_norm: f64,
    pub risk: f64,
    /// `|F(x_i, t)|` for every sample.
    pub flips: Vec<u32>,
    /// `max_j ‖w_j^t − w_j^{t−1}‖` (0 at `t = 0`).
    pub max_step: f64,
}

impl TraceRecord {
    pub fn max_flip(&self) -> u32 {
        self.flips.iter().copied().max().unwrap_or(0)
    }

    pub fn mean_flip(&self) -> f64 {
        self.flips.iter().map(|&f| f as f64).sum::<f64>() / self.flips.len().max(1) as f64
    }
}

#[derive(Debug, Clone)]
pub struct TrainTrace {
    pub eta: f64,
    pub records: Vec<TraceRecord>,
    pub patterns: Vec<(usize, SignPattern)>,
    /// Per-neuron `Σ_k ‖w_j^k − w_j^{k−1}‖` over the whole run.
    pub path_lengths: Vec<f64>,
    pub initial: NetState,
    pub stopped_early: bool,
}

impl TrainTrace {
    pub fn err_norms(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.err_norm).collect()
    }

    pub fn to_csv(&self) -> CsvTable {
        let mut table = CsvTable::new(&["t", "err_norm", "risk", "max_flip", "mean_flip"]);
        for r in &self.records {
            table.push(vec![
                r.t.to_string(),
                fmt_f64(r.err_norm),
                fmt_f64(r.risk),
                r.max_flip().to_string(),
                fmt_f64(r.mean_flip()),
            ]);
        }
        table
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        self.to_csv().write(path)
    }
}

/// Runs `steps` GD iterations, recording iterations `0..=steps`.
pub fn train(
    net: &NetState,
    data: &Dataset,
    eta: f64,
    steps: usize,
    opts: &RecordOptions,
) -> Result<(NetState, TrainTrace)> {
    if !(eta > 0.0) {
        return Err(invalid("eta", format!("must be positive, got {eta}")));
    }
    if opts.pattern_every == Some(0) {
        return Err(invalid("pattern_every", "must be at least 1"));
    }
    let n = data.n();
    let sqrt_n = (n as f64).sqrt();
    let mut state = net.clone();
    let mut pre = state.preactivations(&data.features)?;
    let base = SignPattern::from_preactivations(&pre);
    let mut ever = SignPattern::zeros(n, state.width());
    let mut path_lengths = vec![0.0; state.width()];
    let mut trace = TrainTrace {
        eta,
        records: Vec::with_capacity(steps + 1),
        patterns: Vec::new(),
        path_lengths: Vec::new(),
        initial: net.clone(),
        stopped_early: false,
    };
    let mut max_step = 0.0;

    for t in 0..=steps {
        let pattern = if t == 0 {
            base.clone()
        } else {
            SignPattern::from_preactivations(&pre)
        };
        if t > 0 {
            ever.or_xor(&pattern, &base);
        }
        if let Some(k) = opts.pattern_every {
            if t % k == 0 {
                trace.patterns.push((t, pattern));
            }
        }
        let yhat = predictions_from(&pre, &state.signs);
        let residual: Vec<f64> = data
            .responses
            .iter()
            .zip(&yhat)
            .map(|(y, p)| y - p)
            .collect();
        let err_norm = norm(&residual) / sqrt_n;
        trace.records.push(TraceRecord {
            t,
            err_norm,
            risk: risk_from(&data.responses, &yhat),
            flips: (0..n).map(|i| ever.count_row(i)).collect(),
            max_step,
        });
        if t == steps {
            break;
        }
        if opts.error_floor.is_some_and(|floor| err_norm < floor) {
            trace.stopped_early = true;
            break;
        }
        let next = step_from(&state, data, &pre, &residual, eta);
        max_step = 0.0;
        for (j, len) in path_lengths.iter_mut().enumerate() {
            let delta: f64 = next
                .weight(j)
                .iter()
                .zip(state.weight(j))
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            *len += delta;
            if delta > max_step {
                max_step = delta;
            }
        }
        state = next;
        pre = state.preactivations(&data.features)?;
    }
    trace.path_lengths = path_lengths;
    Ok((state, trace))
}
