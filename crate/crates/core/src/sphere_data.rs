//! Reproducible datasets on the unit sphere: uniform features, random
//! low-degree polynomial targets and responses in `[-1, 1]`.

use std::fs;
use std::path::Path;

use crate::error::{check_dim, invalid, Error, Result};
use crate::io::{fmt_f64, key_values, CsvTable};
use crate::linalg::{dot, norm, Mat};
use crate::rng::{Domain, SeededStream};

/// Gaussian draws shorter than this are re-drawn before normalization.
const MIN_GAUSSIAN_NORM: f64 = 1e-8;
const MAX_REDRAWS: usize = 64;
/// Sample size used to estimate `sup |f*|` when calibrating a target.
const CALIBRATION_SAMPLES: usize = 10_000;
const CALIBRATION_MARGIN: f64 = 1.05;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet {
    /// Ambient dimension before any bias augmentation.
    pub d: usize,
    pub seed: u64,
    pub augmented: bool,
    /// `n` rows of length `d` (or `d + 1` when augmented).
    pub points: Mat,
}

impl FeatureSet {
    pub fn from_points(points: Mat, seed: u64) -> Result<Self> {
        if points.cols() < 2 {
            return Err(invalid("d", "dimension must be at least 2"));
        }
        Ok(Self {
            d: points.cols(),
            seed,
            augmented: false,
            points,
        })
    }

    pub fn n(&self) -> usize {
        self.points.rows()
    }

    /// Length of each stored vector (`d`, or `d + 1` in bias mode).
    pub fn dim(&self) -> usize {
        self.points.cols()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        self.points.row(i)
    }

    /// The first `d` coordinates, i.e. the point on the sphere.
    pub fn base_point(&self, i: usize) -> &[f64] {
        &self.points.row(i)[..self.d]
    }

    /// Inner product of the stored vectors (includes the `+1` in bias mode).
    pub fn inner(&self, i: usize, k: usize) -> f64 {
        dot(self.point(i), self.point(k))
    }

    /// Inner product of the underlying sphere points.
    pub fn base_inner(&self, i: usize, k: usize) -> f64 {
        dot(self.base_point(i), self.base_point(k))
    }

    /// Stored-vector Gram matrix `⟨x_i, x_k⟩`.
    pub fn gram(&self) -> Mat {
        Mat::symmetric_from_fn(self.n(), |i, k| self.inner(i, k))
    }

    pub fn max_abs_cosine(&self) -> f64 {
        let n = self.n();
        let mut worst = 0.0f64;
        for i in 0..n {
            for k in i + 1..n {
                worst = worst.max(self.base_inner(i, k).abs());
            }
        }
        worst
    }

    /// Largest squared norm of a stored vector (1, or 2 in bias mode).
    pub fn max_sq_norm(&self) -> f64 {
        (0..self.n())
            .map(|i| dot(self.point(i), self.point(i)))
            .fold(0.0, f64::max)
    }
}

fn draw_unit(stream: &mut SeededStream, d: usize) -> Result<Vec<f64>> {
    for _ in 0..MAX_REDRAWS {
        let g = stream.gaussian_vec(d);
        let r = norm(&g);
        if r >= MIN_GAUSSIAN_NORM {
            return Ok(g.into_iter().map(|v| v / r).collect());
        }
    }
    Err(Error::NoConvergence {
        what: "sphere sampling",
        iterations: MAX_REDRAWS,
    })
}

/// `n` i.i.d. uniform points on `S^{d-1}`. Point `i` comes from its own
/// substream `(seed, i)`, so prefixes of larger samples coincide.
pub fn sample_uniform_sphere(n: usize, d: usize, seed: u64) -> Result<FeatureSet> {
    sample_in_domain(n, d, seed, Domain::Features)
}

fn sample_in_domain(n: usize, d: usize, seed: u64, domain: Domain) -> Result<FeatureSet> {
    if d < 2 {
        return Err(invalid("d", format!("need d >= 2, got {d}")));
    }
    if n == 0 {
        return Err(invalid("n", "need at least one sample"));
    }
    let mut data = Vec::with_capacity(n * d);
    for i in 0..n {
        let mut stream = SeededStream::new(seed, domain, i as u64);
        data.extend(draw_unit(&mut stream, d)?);
    }
    Ok(FeatureSet {
        d,
        seed,
        augmented: false,
        points: Mat::from_rows(n, d, data)?,
    })
}

/// Appends a constant coordinate 1 to every point without renormalizing, so
/// that `⟨x̃, s̃⟩ = ⟨x, s⟩ + 1`.
pub fn augment_with_bias(features: &FeatureSet) -> Result<FeatureSet> {
    if features.augmented {
        return Err(invalid(
            "features",
            "already augmented with a bias coordinate",
        ));
    }
    let n = features.n();
    let d = features.d;
    let points = Mat::from_fn(
        n,
        d + 1,
        |i, j| {
            if j < d {
                features.points[(i, j)]
            } else {
                1.0
            }
        },
    );
    Ok(FeatureSet {
        d,
        seed: features.seed,
        augmented: true,
        points,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetFn {
    pub degree: u8,
    pub linear: Vec<f64>,
    /// Symmetric `d × d`; all zeros for degree 1.
    pub quadratic: Mat,
    pub offset: f64,
    pub scale: f64,
    pub seed: u64,
}

impl TargetFn {
    pub fn new(linear: Vec<f64>, quadratic: Option<Mat>, offset: f64, scale: f64) -> Result<Self> {
        let d = linear.len();
        if !(scale > 0.0) {
            return Err(invalid("scale", "must be positive"));
        }
        let (degree, quadratic) = match quadratic {
            Some(q) => {
                check_dim(d, q.rows())?;
                check_dim(d, q.cols())?;
                if q.max_asymmetry() != 0.0 {
                    return Err(Error::NotSymmetric(q.max_asymmetry()));
                }
                (2, q)
            }
            None => (1, Mat::zeros(d, d)),
        };
        Ok(Self {
            degree,
            linear,
            quadratic,
            offset,
            scale,
            seed: 0,
        })
    }

    pub fn d(&self) -> usize {
        self.linear.len()
    }

    fn raw(&self, x: &[f64]) -> f64 {
        let mut v = self.offset + dot(&self.linear, x);
        if self.degree == 2 {
            v += self.quadratic.quad_form(x);
        }
        v
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.scale * self.raw(x)
    }
}

/// Random linear or quadratic target, scaled so that its values on the sphere
/// stay inside `[-1, 1]`.
pub fn make_polynomial_target(degree: u8, d: usize, seed: u64) -> Result<TargetFn> {
    if !(degree == 1 || degree == 2) {
        return Err(invalid("degree", format!("must be 1 or 2, got {degree}")));
    }
    if d < 2 {
        return Err(invalid("d", format!("need d >= 2, got {d}")));
    }
    let mut stream = SeededStream::new(seed, Domain::Target, 0);
    let offset = stream.gaussian();
    let linear = stream.gaussian_vec(d);
    let quadratic = if degree == 2 {
        let a = Mat::from_rows(d, d, stream.gaussian_vec(d * d))?;
        Mat::symmetric_from_fn(d, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]))
    } else {
        Mat::zeros(d, d)
    };
    let mut target = TargetFn {
        degree,
        linear,
        quadratic,
        offset,
        scale: 1.0,
        seed,
    };
    let calib = sample_in_domain(CALIBRATION_SAMPLES, d, seed, Domain::TargetCalibration)?;
    let sup = (0..calib.n())
        .map(|i| target.raw(calib.point(i)).abs())
        .fold(0.0, f64::max);
    if sup > 0.0 {
        target.scale = 1.0 / (CALIBRATION_MARGIN * sup);
    }
    Ok(target)
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub features: FeatureSet,
    pub responses: Vec<f64>,
    pub target: TargetFn,
    /// Responses that fell outside `[-1, 1]` and were clamped.
    pub clamped: usize,
}

impl Dataset {
    pub fn n(&self) -> usize {
        self.responses.len()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let d = self.features.d;
        let mut header: Vec<String> = (0..d).map(|j| format!("x_{j}")).collect();
        header.push("y".into());
        let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
        let mut table = CsvTable::new(&header_refs);
        for i in 0..self.n() {
            let mut row: Vec<String> = self
                .features
                .base_point(i)
                .iter()
                .map(|v| fmt_f64(*v))
                .collect();
            row.push(fmt_f64(self.responses[i]));
            table.push(row);
        }
        table.write(path)?;
        let meta = key_values(&[
            ("d", d.to_string()),
            ("n", self.n().to_string()),
            ("seed", self.features.seed.to_string()),
            ("augmented", self.features.augmented.to_string()),
            ("target_degree", self.target.degree.to_string()),
            ("target_seed", self.target.seed.to_string()),
            ("scale", fmt_f64(self.target.scale)),
            ("clamped", self.clamped.to_string()),
        ]);
        fs::write(path.with_extension("meta.txt"), meta)?;
        Ok(())
    }

    /// Reads the `x_0..x_{d-1},y` table back as (points, responses).
    pub fn read_csv(path: &Path) -> Result<(Mat, Vec<f64>)> {
        let table = CsvTable::read(path)?;
        let y = table.f64_column("y")?;
        let d = table.header.len() - 1;
        let mut data = Vec::with_capacity(y.len() * d);
        for row in &table.rows {
            for v in &row[..d] {
                data.push(v.parse::<f64>().map_err(|e| Error::Parse(e.to_string()))?);
            }
        }
        Ok((Mat::from_rows(y.len(), d, data)?, y))
    }
}

/// Evaluates `target` on the sphere coordinates of `features`.
pub fn build_dataset(target: &TargetFn, features: &FeatureSet) -> Result<Dataset> {
    check_dim(features.d, target.d())?;
    let mut clamped = 0;
    let responses = (0..features.n())
        .map(|i| {
            let y = target.eval(features.base_point(i));
            if y.abs() > 1.0 {
                clamped += 1;
                y.clamp(-1.0, 1.0)
            } else {
                y
            }
        })
        .collect();
    Ok(Dataset {
        features: features.clone(),
        responses,
        target: target.clone(),
        clamped,
    })
}
