use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use diffam_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    diffam_string_free(s);
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(diffam_last_error_message()).to_str().unwrap().to_owned() }
}

const EDF19: &str = r#"{"group":{"cyclic":[19]},"sets":[[1,7,11],[4,6,9],[5,16,17]]}"#;
const Z10_CODE: &str = r#"{"group":{"cyclic":[10]},"sources":[{"set":[0]},{"set":[5]},{"set":[1,9]},{"set":[2,3]}]}"#;

#[test]
fn family_handle_round_trip() {
    unsafe {
        let mut fam = ptr::null_mut();
        assert_eq!(diffam_family_from_json(c(EDF19).as_ptr(), &mut fam), DIFFAM_OK);
        let (mut order, mut sets) = (0usize, 0usize);
        assert_eq!(diffam_family_shape(fam, &mut order, &mut sets), DIFFAM_OK);
        assert_eq!((order, sets), (19, 3));

        let mut passed = -1;
        let mut report = ptr::null_mut();
        assert_eq!(diffam_family_verify(fam, c("EDF").as_ptr(), ptr::null(), &mut passed, &mut report), DIFFAM_OK);
        assert_eq!(passed, 1);
        let v: serde_json::Value = serde_json::from_str(&take(report)).unwrap();
        assert_eq!(v["verdict"], "pass");

        let opts = c(r#"{"lambda": 2}"#);
        assert_eq!(diffam_family_verify(fam, c("bedf").as_ptr(), opts.as_ptr(), &mut passed, &mut report), DIFFAM_OK);
        assert_eq!(passed, 0);
        diffam_string_free(report);

        let mut code = ptr::null_mut();
        assert_eq!(diffam_code_from_family(fam, &mut code), DIFFAM_OK);
        let (mut num, mut den) = (0i64, 0i64);
        assert_eq!(diffam_code_weak_optimum(code, &mut num, &mut den), DIFFAM_OK);
        assert_eq!((num, den), (1, 3));
        assert_eq!(diffam_code_strong_optimum(code, &mut num, &mut den), DIFFAM_OK);
        assert_eq!((num, den), (2, 3));
        diffam_code_free(code);
        diffam_family_free(fam);
    }
}

#[test]
fn code_handle_classification() {
    unsafe {
        let mut code = ptr::null_mut();
        assert_eq!(diffam_code_from_json(c(Z10_CODE).as_ptr(), &mut code), DIFFAM_OK);
        let (mut num, mut den) = (0i64, 0i64);
        assert_eq!(diffam_code_weak_optimum(code, &mut num, &mut den), DIFFAM_OK);
        assert_eq!((num, den), (1, 2));
        let mut out = ptr::null_mut();
        assert_eq!(diffam_code_classify(code, &mut out), DIFFAM_OK);
        let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(v["weak_r"], true);
        diffam_code_free(code);
    }
}

#[test]
fn errors_carry_library_codes_and_messages() {
    unsafe {
        let mut fam = ptr::null_mut();
        let outside = c(r#"{"group":{"cyclic":[5]},"sets":[[1,2],[7]]}"#);
        assert_eq!(diffam_family_from_json(outside.as_ptr(), &mut fam), 20);
        assert!(fam.is_null());
        assert!(!last_error().is_empty());

        assert_eq!(diffam_family_from_json(c("{\"group\":").as_ptr(), &mut fam), 60);
        assert!(last_error().contains("malformed JSON"));

        assert_eq!(diffam_family_from_json(ptr::null(), &mut fam), DIFFAM_ERR_NULL);
        let bad = [0xffu8, 0];
        assert_eq!(diffam_family_from_json(bad.as_ptr().cast(), &mut fam), DIFFAM_ERR_UTF8);

        assert_eq!(diffam_family_from_json(c(EDF19).as_ptr(), &mut fam), DIFFAM_OK);
        assert_eq!(last_error(), "");
        let (mut passed, mut report) = (0, ptr::null_mut());
        assert_eq!(diffam_family_verify(fam, c("xdf").as_ptr(), ptr::null(), &mut passed, &mut report), 60);
        assert!(report.is_null());
        assert_eq!(diffam_family_shape(fam, ptr::null_mut(), ptr::null_mut()), DIFFAM_ERR_NULL);
        diffam_family_free(fam);
        diffam_family_free(ptr::null_mut());
        diffam_string_free(ptr::null_mut());
    }
}

#[test]
fn execute_matches_the_command_line() {
    let request = r#"{"command":"verify","type":"edf","family":{"group":{"cyclic":[19]},"sets":[[1,7,11],[4,6,9],[5,16,17]]}}"#;
    let cli = diffam::cli::run(["diffam", "verify", "--type", "edf", "--family", EDF19]);
    unsafe {
        let mut env = ptr::null_mut();
        let mut exit = -1;
        assert_eq!(diffam_execute(c(request).as_ptr(), &mut env, &mut exit), DIFFAM_OK);
        assert_eq!(exit, 0);
        assert_eq!(take(env), cli.stdout);

        let search = c(r#"{"command":"search","spec":{"group":{"cyclic":[9]},"type":"sedf","m":3,"k":2,"lambda":1}}"#);
        assert_eq!(diffam_execute(search.as_ptr(), &mut env, &mut exit), DIFFAM_OK);
        assert_eq!(exit, 1);
        let v: serde_json::Value = serde_json::from_str(&take(env)).unwrap();
        assert_eq!(v["result"]["outcome"], "exhausted_no_solution");

        assert_eq!(diffam_execute(c(r#"{"command":"nope"}"#).as_ptr(), &mut env, &mut exit), 60);
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/diffam.h")).unwrap();
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .split("extern \"C\" fn ")
        .skip(1)
        .map(|s| s.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 12);
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
}

#[test]
fn c_program_links_against_the_static_library() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf();
    let lib = profile_dir.join("libdiffam_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let bin = std::env::temp_dir().join(format!("diffam-smoke-{}", std::process::id()));
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("a C compiler named cc");
    assert!(status.success());
    let run = Command::new(&bin).output().unwrap();
    std::fs::remove_file(&bin).ok();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
