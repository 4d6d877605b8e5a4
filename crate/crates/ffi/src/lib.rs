//! C ABI over `spectral_dynamics`.
//!
//! Objects are exposed as opaque handles returned through an out-pointer by
//! their constructor (`sd_features_sample`, `sd_dataset_polynomial`,
//! `sd_network_init`) and released with the matching `sd_*_free`. Every fallible
//! call returns an [`SdStatus`]; on failure a message is kept per thread and
//! can be read with [`sd_last_error_message`]. Output arrays are
//! caller-allocated, with their capacity passed alongside.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use spectral_dynamics::harmonics::{beta_eigenvalue, DEFAULT_SERIES_TOL};
use spectral_dynamics::kernels::{empirical_kernel_matrix, kernel_value};
use spectral_dynamics::relu_net::{empirical_risk, gd_step, init_network, NetState};
use spectral_dynamics::spectral::sym_eig;
use spectral_dynamics::sphere_data::{
    augment_with_bias, build_dataset, make_polynomial_target, sample_uniform_sphere, Dataset,
    FeatureSet,
};
use spectral_dynamics::theory::concentration_eps;
use spectral_dynamics::{Error, Mat};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    DimensionMismatch = 3,
    NotSymmetric = 4,
    NoConvergence = 5,
    Overflow = 6,
    Missing = 7,
    Parse = 8,
    Io = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

impl From<&Error> for SdStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParameter { .. } => SdStatus::InvalidParameter,
            Error::DimensionMismatch { .. } => SdStatus::DimensionMismatch,
            Error::NotSymmetric(_) => SdStatus::NotSymmetric,
            Error::NoConvergence { .. } => SdStatus::NoConvergence,
            Error::Overflow(_) => SdStatus::Overflow,
            Error::Missing(_) => SdStatus::Missing,
            Error::Parse(_) => SdStatus::Parse,
            Error::Io(_) => SdStatus::Io,
        }
    }
}

/// Points on the unit sphere, optionally with the constant bias coordinate.
pub struct SdFeatures(FeatureSet);

/// Features with responses of a random polynomial target.
pub struct SdDataset(Dataset);

/// Two-layer ReLU network state.
pub struct SdNetwork(NetState);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, mapping errors and panics to a status code.
fn guard(f: impl FnOnce() -> Result<(), SdStatus>) -> SdStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SdStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            SdStatus::Panic
        }
    }
}

fn lib<T>(r: spectral_dynamics::Result<T>) -> Result<T, SdStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        SdStatus::from(&e)
    })
}

fn null(what: &str) -> SdStatus {
    set_error(format!("null pointer: {what}"));
    SdStatus::NullPointer
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, SdStatus> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_slice<'a>(
    buf: *mut f64,
    capacity: usize,
    needed: usize,
) -> Result<&'a mut [f64], SdStatus> {
    if buf.is_null() {
        return Err(null("output buffer"));
    }
    if capacity < needed {
        set_error(format!(
            "output buffer holds {capacity} values, {needed} needed"
        ));
        return Err(SdStatus::BufferTooSmall);
    }
    Ok(std::slice::from_raw_parts_mut(buf, needed))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), SdStatus> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(value);
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `capacity`). Returns the full message length without the NUL,
/// or 0 when there is no pending error.
#[no_mangle]
pub unsafe extern "C" fn sd_last_error_message(buf: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && capacity > 0 {
            let k = bytes.len().min(capacity - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, k);
            *buf.add(k) = 0;
        }
        bytes.len()
    })
}

/// Samples `n` points uniformly on `S^{d−1}`; `bias` appends the
/// constant coordinate.
#[no_mangle]
pub unsafe extern "C" fn sd_features_sample(
    n: usize,
    d: usize,
    seed: u64,
    bias: bool,
    out: *mut *mut SdFeatures,
) -> SdStatus {
    guard(|| {
        let base = lib(sample_uniform_sphere(n, d, seed))?;
        let f = if bias {
            lib(augment_with_bias(&base))?
        } else {
            base
        };
        write_out(out, Box::into_raw(Box::new(SdFeatures(f))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn sd_features_free(features: *mut SdFeatures) {
    if !features.is_null() {
        drop(Box::from_raw(features));
    }
}

/// Number of points, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn sd_features_len(features: *const SdFeatures) -> usize {
    features.as_ref().map_or(0, |f| f.0.n())
}

/// Coordinates per point (`d`, or `d + 1` with bias), or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn sd_features_dim(features: *const SdFeatures) -> usize {
    features.as_ref().map_or(0, |f| f.0.dim())
}

/// Copies the `n × dim` point matrix, row-major.
#[no_mangle]
pub unsafe extern "C" fn sd_features_points(
    features: *const SdFeatures,
    buf: *mut f64,
    capacity: usize,
) -> SdStatus {
    guard(|| {
        let f = &borrow(features, "features")?.0;
        let src = f.points.as_slice();
        out_slice(buf, capacity, src.len())?.copy_from_slice(src);
        Ok(())
    })
}

/// Random linear (`degree = 1`) or quadratic (`degree = 2`) target evaluated
/// on `features`.
#[no_mangle]
pub unsafe extern "C" fn sd_dataset_polynomial(
    features: *const SdFeatures,
    degree: u8,
    seed: u64,
    out: *mut *mut SdDataset,
) -> SdStatus {
    guard(|| {
        let f = &borrow(features, "features")?.0;
        let target = lib(make_polynomial_target(degree, f.d, seed))?;
        let data = lib(build_dataset(&target, f))?;
        write_out(out, Box::into_raw(Box::new(SdDataset(data))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn sd_dataset_free(data: *mut SdDataset) {
    if !data.is_null() {
        drop(Box::from_raw(data));
    }
}

/// Copies the `n` responses.
#[no_mangle]
pub unsafe extern "C" fn sd_dataset_responses(
    data: *const SdDataset,
    buf: *mut f64,
    capacity: usize,
) -> SdStatus {
    guard(|| {
        let y = &borrow(data, "dataset")?.0.responses;
        out_slice(buf, capacity, y.len())?.copy_from_slice(y);
        Ok(())
    })
}

/// Width-`m` network on inputs of dimension `d`, weights `N(0, ν²)`.
#[no_mangle]
pub unsafe extern "C" fn sd_network_init(
    m: usize,
    d: usize,
    nu: f64,
    bias: bool,
    seed: u64,
    out: *mut *mut SdNetwork,
) -> SdStatus {
    guard(|| {
        let net = lib(init_network(m, d, nu, bias, seed))?;
        write_out(out, Box::into_raw(Box::new(SdNetwork(net))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn sd_network_free(net: *mut SdNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Number of completed GD steps, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn sd_network_step_count(net: *const SdNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.0.t)
}

/// Network outputs on every point of `features`.
#[no_mangle]
pub unsafe extern "C" fn sd_network_predict(
    net: *const SdNetwork,
    features: *const SdFeatures,
    buf: *mut f64,
    capacity: usize,
) -> SdStatus {
    guard(|| {
        let net = &borrow(net, "network")?.0;
        let f = &borrow(features, "features")?.0;
        let yhat = lib(net.predictions(f))?;
        out_slice(buf, capacity, yhat.len())?.copy_from_slice(&yhat);
        Ok(())
    })
}

/// `(1/2n) Σ (y_i − f(x_i))²`.
#[no_mangle]
pub unsafe extern "C" fn sd_network_risk(
    net: *const SdNetwork,
    data: *const SdDataset,
    out: *mut f64,
) -> SdStatus {
    guard(|| {
        let net = &borrow(net, "network")?.0;
        let data = &borrow(data, "dataset")?.0;
        write_out(out, lib(empirical_risk(net, data))?)
    })
}

/// Advances `net` by `steps` full-batch GD steps of size `eta`.
#[no_mangle]
pub unsafe extern "C" fn sd_network_train(
    net: *mut SdNetwork,
    data: *const SdDataset,
    eta: f64,
    steps: usize,
) -> SdStatus {
    guard(|| {
        let data = &borrow(data, "dataset")?.0;
        let net = net.as_mut().ok_or_else(|| null("network"))?;
        let mut state = net.0.clone();
        for _ in 0..steps {
            state = lib(gd_step(&state, data, eta))?;
        }
        net.0 = state;
        Ok(())
    })
}

/// Arc-cosine kernel at inner product `u`.
#[no_mangle]
pub unsafe extern "C" fn sd_kernel_value(u: f64, biased: bool, out: *mut f64) -> SdStatus {
    guard(|| write_out(out, lib(kernel_value(u, biased))?))
}

/// `n × n` empirical kernel matrix, row-major.
#[no_mangle]
pub unsafe extern "C" fn sd_kernel_matrix(
    features: *const SdFeatures,
    biased: bool,
    buf: *mut f64,
    capacity: usize,
) -> SdStatus {
    guard(|| {
        let f = &borrow(features, "features")?.0;
        let k = lib(empirical_kernel_matrix(f, biased))?;
        let src = k.entries.as_slice();
        out_slice(buf, capacity, src.len())?.copy_from_slice(src);
        Ok(())
    })
}

/// Eigenvalues, in descending order, of the symmetric row-major `n × n`
/// matrix at `matrix`.
#[no_mangle]
pub unsafe extern "C" fn sd_symmetric_eigenvalues(
    matrix: *const f64,
    n: usize,
    buf: *mut f64,
    capacity: usize,
) -> SdStatus {
    guard(|| {
        if matrix.is_null() {
            return Err(null("matrix"));
        }
        let len = n.checked_mul(n).ok_or_else(|| {
            set_error("n * n overflows".into());
            SdStatus::Overflow
        })?;
        let data = std::slice::from_raw_parts(matrix, len).to_vec();
        let m = lib(Mat::from_rows(n, n, data))?;
        let spec = lib(sym_eig(&m, false))?;
        out_slice(buf, capacity, n)?.copy_from_slice(&spec.eigenvalues);
        Ok(())
    })
}

/// Eigenvalue of the biased kernel's integral operator on degree-`ell`
/// harmonics in dimension `d`.
#[no_mangle]
pub unsafe extern "C" fn sd_operator_eigenvalue(ell: usize, d: usize, out: *mut f64) -> SdStatus {
    guard(|| write_out(out, lib(beta_eigenvalue(ell, d, DEFAULT_SERIES_TOL))?))
}

/// `√(log(2n²/δ)/(2m)) + √(8 log(4/δ)/n)`.
#[no_mangle]
pub unsafe extern "C" fn sd_concentration_eps(
    n: u64,
    m: u64,
    delta: f64,
    out: *mut f64,
) -> SdStatus {
    guard(|| write_out(out, lib(concentration_eps(n, m, delta))?))
}
