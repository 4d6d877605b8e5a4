use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use spectral_dynamics_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    unsafe {
        sd_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

struct Handles {
    x: *mut SdFeatures,
    data: *mut SdDataset,
    net: *mut SdNetwork,
}

impl Drop for Handles {
    fn drop(&mut self) {
        unsafe {
            sd_network_free(self.net);
            sd_dataset_free(self.data);
            sd_features_free(self.x);
        }
    }
}

fn setup(n: usize, d: usize, m: usize, bias: bool) -> Handles {
    let mut h = Handles {
        x: ptr::null_mut(),
        data: ptr::null_mut(),
        net: ptr::null_mut(),
    };
    unsafe {
        assert_eq!(sd_features_sample(n, d, 3, bias, &mut h.x), SdStatus::Ok);
        assert_eq!(sd_dataset_polynomial(h.x, 2, 3, &mut h.data), SdStatus::Ok);
        assert_eq!(
            sd_network_init(m, d, 0.5, bias, 3, &mut h.net),
            SdStatus::Ok
        );
    }
    h
}

#[test]
fn handles_round_trip_and_training_lowers_risk() {
    let h = setup(30, 4, 100, true);
    unsafe {
        assert_eq!(sd_features_len(h.x), 30);
        assert_eq!(sd_features_dim(h.x), 5);
        let mut pts = vec![0.0; 30 * 5];
        assert_eq!(
            sd_features_points(h.x, pts.as_mut_ptr(), pts.len()),
            SdStatus::Ok
        );
        assert!(pts.chunks(5).all(|p| p[4] == 1.0));

        let mut before = 0.0;
        let mut after = 0.0;
        assert_eq!(sd_network_risk(h.net, h.data, &mut before), SdStatus::Ok);
        assert_eq!(sd_network_train(h.net, h.data, 1.0, 40), SdStatus::Ok);
        assert_eq!(sd_network_risk(h.net, h.data, &mut after), SdStatus::Ok);
        assert_eq!(sd_network_step_count(h.net), 40);
        assert!(after < before, "{after} >= {before}");

        let mut y = vec![0.0; 30];
        let mut yhat = vec![0.0; 30];
        assert_eq!(
            sd_dataset_responses(h.data, y.as_mut_ptr(), 30),
            SdStatus::Ok
        );
        assert_eq!(
            sd_network_predict(h.net, h.x, yhat.as_mut_ptr(), 30),
            SdStatus::Ok
        );
        let risk: f64 = y
            .iter()
            .zip(&yhat)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            / 60.0;
        assert!((risk - after).abs() < 1e-14);
    }
}

#[test]
fn kernel_spectrum_through_the_abi() {
    let h = setup(25, 6, 10, false);
    unsafe {
        let mut k = vec![0.0; 25 * 25];
        assert_eq!(
            sd_kernel_matrix(h.x, false, k.as_mut_ptr(), k.len()),
            SdStatus::Ok
        );
        let mut ev = vec![0.0; 25];
        assert_eq!(
            sd_symmetric_eigenvalues(k.as_ptr(), 25, ev.as_mut_ptr(), 25),
            SdStatus::Ok
        );
        let trace: f64 = (0..25).map(|i| k[i * 25 + i]).sum();
        assert!((ev.iter().sum::<f64>() - trace).abs() < 1e-12);
        assert!(ev.windows(2).all(|w| w[0] >= w[1]));

        let mut v = 0.0;
        assert_eq!(sd_kernel_value(1.0, true, &mut v), SdStatus::Ok);
        assert!((v - 1.0).abs() < 1e-15);
        assert_eq!(sd_operator_eigenvalue(0, 10, &mut v), SdStatus::Ok);
        assert!((v - 0.3446).abs() < 1e-3);
        assert_eq!(
            sd_concentration_eps(500, u64::MAX, 0.05, &mut v),
            SdStatus::Ok
        );
        assert!((v - 0.2648).abs() < 1e-3);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let h = setup(10, 3, 5, false);
    unsafe {
        let mut out: *mut SdFeatures = ptr::null_mut();
        assert_eq!(
            sd_features_sample(0, 3, 1, false, &mut out),
            SdStatus::InvalidParameter
        );
        assert!(last_error().contains("invalid parameter"));
        assert!(out.is_null());

        let mut small = [0.0; 3];
        assert_eq!(
            sd_dataset_responses(h.data, small.as_mut_ptr(), 3),
            SdStatus::BufferTooSmall
        );
        assert!(last_error().contains("10 needed"));

        assert_eq!(
            sd_network_risk(ptr::null(), h.data, small.as_mut_ptr()),
            SdStatus::NullPointer
        );
        let mut v = 0.0;
        assert_eq!(
            sd_kernel_value(1.5, false, &mut v),
            SdStatus::InvalidParameter
        );
        let asym = [1.0, 2.0, 0.0, 1.0];
        let mut ev = [0.0; 2];
        assert_eq!(
            sd_symmetric_eigenvalues(asym.as_ptr(), 2, ev.as_mut_ptr(), 2),
            SdStatus::NotSymmetric
        );

        // A mismatched network and dataset: 3 inputs vs a 4-wide network.
        let mut wide: *mut SdNetwork = ptr::null_mut();
        assert_eq!(
            sd_network_init(5, 4, 0.5, false, 1, &mut wide),
            SdStatus::Ok
        );
        assert_eq!(
            sd_network_train(wide, h.data, 1.0, 1),
            SdStatus::DimensionMismatch
        );
        sd_network_free(wide);

        assert_eq!(sd_kernel_value(0.0, false, &mut v), SdStatus::Ok);
        assert_eq!(sd_last_error_message(ptr::null_mut(), 0), 0);
        sd_features_free(ptr::null_mut());
    }
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(sd_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn find_staticlib() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let profile_dir = exe.parent()?.parent()?;
    [
        profile_dir.join("libspectral_dynamics_ffi.a"),
        profile_dir.join("deps/libspectral_dynamics_ffi.a"),
    ]
    .into_iter()
    .find(|p| p.is_file())
}

#[test]
fn c_program_compiles_and_runs_against_header() {
    let Ok(status) = Command::new("cc").arg("--version").output() else {
        eprintln!("no C compiler, skipping");
        return;
    };
    assert!(status.status.success());
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let include = root.join("include");
    let src = root.join("tests/c/smoke.c");
    let syntax = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&src)
        .output()
        .unwrap();
    assert!(
        syntax.status.success(),
        "{}",
        String::from_utf8_lossy(&syntax.stderr)
    );

    let Some(lib) = find_staticlib() else {
        eprintln!("static library not found next to the test binary, skipping link step");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let link = Command::new("cc")
        .args(["-std=c99", "-O1", "-I"])
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(
        link.status.success(),
        "{}",
        String::from_utf8_lossy(&link.stderr)
    );
    let run = Command::new(&exe).output().unwrap();
    assert!(
        run.status.success(),
        "exit {:?}: {}",
        run.status.code(),
        String::from_utf8_lossy(&run.stderr)
    );
    let out = String::from_utf8_lossy(&run.stdout);
    assert!(out.starts_with(env!("CARGO_PKG_VERSION")), "{out}");
}
