use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use cwgabor_ffi::*;

fn last_error() -> String {
    let p = cwg_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn code_lifecycle_and_example_codeword() {
    let mut code = ptr::null_mut();
    unsafe {
        assert_eq!(cwg_code_new(8, 6, 2, &mut code), CwgStatus::Ok);
        let mut p = CwgCodeParams::default();
        assert_eq!(cwg_code_params(code, &mut p), CwgStatus::Ok);
        assert_eq!((p.n, p.w, p.d, p.p, p.b), (48, 6, 1, 5, 6));
        let mut pos = [0u16; 6];
        assert_eq!(cwg_code_encode(code, [3u16, 1].as_ptr(), 2, pos.as_mut_ptr(), 6), CwgStatus::Ok);
        // Systematic: the message is the prefix.
        assert_eq!(&pos[..2], &[3, 1]);
        assert_eq!(cwg_code_encode(code, [9u16, 1].as_ptr(), 2, pos.as_mut_ptr(), 6), CwgStatus::InvalidInput);
        assert!(!last_error().is_empty());
        assert_eq!(cwg_code_encode(code, [1u16, 1].as_ptr(), 2, pos.as_mut_ptr(), 5), CwgStatus::InvalidInput);
        cwg_code_free(code);
        cwg_code_free(ptr::null_mut());
    }
}

#[test]
fn invalid_construction_reports_error() {
    let mut code = ptr::null_mut();
    unsafe {
        assert_eq!(cwg_code_new(6, 3, 2, &mut code), CwgStatus::InvalidInput);
        assert!(code.is_null());
        assert_eq!(cwg_code_new(8, 6, 2, ptr::null_mut()), CwgStatus::NullPointer);
    }
    assert!(last_error().contains("null"));
}

#[test]
fn successful_call_clears_error() {
    let mut code = ptr::null_mut();
    unsafe {
        assert_eq!(cwg_code_new(6, 3, 2, &mut code), CwgStatus::InvalidInput);
        assert_eq!(cwg_code_new(8, 3, 2, &mut code), CwgStatus::Ok);
        assert!(cwg_last_error_message().is_null());
        cwg_code_free(code);
    }
}

#[test]
fn dictionary_apply_adjoint_pair() {
    let (n, m, t) = (13usize, 40usize, 2usize);
    let mut d = ptr::null_mut();
    unsafe {
        assert_eq!(cwg_dictionary_gabor_new(n, m, 1, &mut d), CwgStatus::Ok);
        let (mut rows, mut cols) = (0, 0);
        assert_eq!(cwg_dictionary_shape(d, &mut rows, &mut cols), CwgStatus::Ok);
        assert_eq!((rows, cols), (n, m));
        let x: Vec<f64> = (0..2 * m * t).map(|i| ((i * 37 % 11) as f64 - 5.0) / 7.0).collect();
        let y: Vec<f64> = (0..2 * n * t).map(|i| ((i * 13 % 7) as f64 - 3.0) / 5.0).collect();
        let mut ax = vec![0.0; 2 * n * t];
        let mut ahy = vec![0.0; 2 * m * t];
        assert_eq!(cwg_dictionary_apply(d, x.as_ptr(), t, ax.as_mut_ptr()), CwgStatus::Ok);
        assert_eq!(cwg_dictionary_adjoint(d, y.as_ptr(), t, ahy.as_mut_ptr()), CwgStatus::Ok);
        // <Ax, y> = <x, A^H y> with <a, b> = sum conj(a) b.
        let inner = |a: &[f64], b: &[f64]| {
            a.chunks(2).zip(b.chunks(2)).fold((0.0, 0.0), |(re, im), (u, v)| {
                (re + u[0] * v[0] + u[1] * v[1], im + u[0] * v[1] - u[1] * v[0])
            })
        };
        let (l, r) = (inner(&ax, &y), inner(&x, &ahy));
        assert!((l.0 - r.0).abs() < 1e-10 && (l.1 - r.1).abs() < 1e-10, "{l:?} vs {r:?}");
        cwg_dictionary_free(d);
    }
}

#[test]
fn gaussian_dictionary_and_bad_gabor_size() {
    let mut d = ptr::null_mut();
    unsafe {
        assert_eq!(cwg_dictionary_gaussian_new(10, 30, 5, &mut d), CwgStatus::Ok);
        cwg_dictionary_free(d);
        d = ptr::null_mut();
        assert_eq!(cwg_dictionary_gabor_new(12, 30, 1, &mut d), CwgStatus::InvalidInput);
        assert!(d.is_null());
    }
}

#[test]
fn experiment_from_json_runs() {
    let json = CString::new(
        r#"{"scheme":"ura","code":{"q":64,"n_prime":5,"k_prime":3},
            "dictionary":{"n":31},"channel":{"model":"awgn","ebn0_db":[40.0]},
            "load":{"active_users":1},"trials":5,"seed":9}"#,
    )
    .unwrap();
    let mut exp = ptr::null_mut();
    unsafe {
        assert_eq!(cwg_experiment_from_json(json.as_ptr(), &mut exp), CwgStatus::Ok, "{}", last_error());
        let mut r = CwgPointResult::default();
        assert_eq!(cwg_experiment_run(exp, 40.0, 2, &mut r), CwgStatus::Ok);
        assert_eq!((r.trials, r.events, r.missed), (5, 5, 0));
        assert_eq!(r.pe, 0.0);
        cwg_experiment_free(exp);
    }
}

#[test]
fn experiment_rejects_unknown_keys() {
    let json = CString::new(r#"{"scheme":"ura","bogus":1}"#).unwrap();
    let mut exp = ptr::null_mut();
    unsafe {
        assert_eq!(cwg_experiment_from_json(json.as_ptr(), &mut exp), CwgStatus::Config);
    }
    assert!(exp.is_null());
    assert!(!last_error().is_empty());
}

#[test]
fn worked_example_passes() {
    let mut ok = false;
    unsafe {
        assert_eq!(cwg_verify_example(&mut ok), CwgStatus::Ok);
    }
    assert!(ok);
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/cwgabor.h");
    assert!(header.exists());
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["cwg_code_new", "cwg_dictionary_apply", "cwg_experiment_run", "cwg_last_error_message", "CWG_STATUS_OK"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(status) = Command::new("cc").args(["-fsyntax-only", "-x", "c", "-std=c99", "-Wall", "-Werror"]).arg(&header).status()
    else {
        eprintln!("no C compiler available; syntax check skipped");
        return;
    };
    assert!(status.success());
}
