use std::ffi::{CStr, CString};
use std::ptr;

use qtorus_ffi::*;

fn frac(num: u64, den: u64) -> (u64, u64) {
    (num, den)
}

fn trivial(genus: usize, rank: usize) -> *mut QtLocalSystem {
    let mut sys = ptr::null_mut();
    let s = unsafe { qt_local_system_new(genus, rank, ptr::null(), 0, &mut sys) };
    assert_eq!(s, QtStatus::Ok);
    sys
}

#[test]
fn torus_cohomology_ranks() {
    let sys = trivial(1, 2);
    let mut ranks = [0usize; 3];
    let mut chi = 1i64;
    unsafe {
        assert_eq!(qt_cohomology_ranks(sys, ranks.as_mut_ptr()), QtStatus::Ok);
        assert_eq!(qt_euler_characteristic(sys, &mut chi), QtStatus::Ok);
        qt_local_system_free(sys);
    }
    assert_eq!(ranks, [2, 4, 2]);
    assert_eq!(chi, 0);
}

#[test]
fn sign_system_torsion_json() {
    let mono = [1i64, -1];
    let mut sys = ptr::null_mut();
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(qt_local_system_new(1, 1, mono.as_ptr(), 2, &mut sys), QtStatus::Ok);
        assert_eq!(qt_cohomology_json(sys, &mut out), QtStatus::Ok);
        let text = CStr::from_ptr(out).to_str().unwrap().to_owned();
        qt_string_free(out);
        qt_local_system_free(sys);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["h0"]["free_rank"], 0);
        assert_eq!(v["h1"]["torsion"], serde_json::json!([2]));
        assert_eq!(v["h2"]["torsion"], serde_json::json!([2]));
    }
}

#[test]
fn invalid_monodromy_codes() {
    let mut sys = ptr::null_mut();
    unsafe {
        let m = [2i64, 1];
        assert_eq!(qt_local_system_new(1, 1, m.as_ptr(), 2, &mut sys), QtStatus::NonUnimodular);
        let msg = CStr::from_ptr(qt_last_error_message()).to_str().unwrap();
        assert!(msg.contains("unimodular"));

        let m = [1i64, 1, 0, 1, 1, 0, 1, 1];
        assert_eq!(qt_local_system_new(1, 2, m.as_ptr(), 8, &mut sys), QtStatus::RelationViolated);
        assert_eq!(qt_local_system_new(1, 2, m.as_ptr(), 5, &mut sys), QtStatus::InvalidArgument);
        assert_eq!(qt_local_system_new(1, 2, ptr::null(), 8, &mut sys), QtStatus::NullPointer);
    }
    assert!(sys.is_null());
}

#[test]
fn twist_and_double_braiding() {
    let c = [1i64];
    let zeta = CString::new("1/4").unwrap();
    let mut level = ptr::null_mut();
    unsafe {
        assert_eq!(qt_level_new(1, c.as_ptr(), zeta.as_ptr(), &mut level), QtStatus::Ok);
        for n in -5i64..=5 {
            let (mut num, mut den) = (0, 0);
            assert_eq!(qt_twist(level, &n, 1, &mut num, &mut den), QtStatus::Ok);
            let expected = qtorus::Frac1::new(i128::from(n * n), 4);
            assert_eq!(frac(num, den), (expected.num(), expected.den()));
        }
        let (mut num, mut den) = (0, 0);
        assert_eq!(qt_double_braiding(level, &1, &1, 1, &mut num, &mut den), QtStatus::Ok);
        assert_eq!((num, den), (1, 2));
        let two = [1i64, 2];
        assert_eq!(qt_twist(level, two.as_ptr(), 2, &mut num, &mut den), QtStatus::InvalidArgument);
        qt_level_free(level);
    }
}

#[test]
fn level_validation_and_invariance() {
    let c = [1i64, 0, 0, 0];
    let mut level = ptr::null_mut();
    unsafe {
        let bad = CString::new("2/4").unwrap();
        assert_eq!(qt_level_new(2, c.as_ptr(), bad.as_ptr(), &mut level), QtStatus::MalformedFraction);
        let zeta = CString::new("1/3").unwrap();
        assert_eq!(qt_level_new(2, c.as_ptr(), zeta.as_ptr(), &mut level), QtStatus::Ok);

        let unipotent = [1i64, 1, 0, 1, 1, 0, 0, 1];
        let mut sys = ptr::null_mut();
        assert_eq!(qt_local_system_new(1, 2, unipotent.as_ptr(), 8, &mut sys), QtStatus::Ok);
        let mut ok = true;
        assert_eq!(qt_level_is_invariant(level, sys, &mut ok), QtStatus::Ok);
        assert!(!ok);
        qt_local_system_free(sys);

        let sys = trivial(2, 2);
        assert_eq!(qt_level_is_invariant(level, sys, &mut ok), QtStatus::Ok);
        assert!(ok);
        qt_local_system_free(sys);
        qt_level_free(level);
    }
}

#[test]
fn run_job_reports_exit_codes() {
    let task = CString::new("global").unwrap();
    let spec = CString::new(
        r#"{"surface": {"genus": 1, "rank": 1}, "level": {"c_matrix": [[1]], "zeta": "1/6"}, "components": [[2]]}"#,
    )
    .unwrap();
    let mut out = ptr::null_mut();
    let mut code = -1;
    unsafe {
        assert_eq!(qt_run_job(task.as_ptr(), spec.as_ptr(), &mut out, &mut code), QtStatus::Ok);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(out).to_str().unwrap()).unwrap();
        qt_string_free(out);
        assert_eq!(v["blocks"][0]["block_dim"], 3);

        let bad = CString::new(r#"{"level": {"c_matrix": [[1]], "zeta": "1/1"}}"#).unwrap();
        let local = CString::new("local").unwrap();
        assert_eq!(qt_run_job(local.as_ptr(), bad.as_ptr(), &mut out, &mut code), QtStatus::Ok);
        assert_eq!(code, 2);
        assert!(CStr::from_ptr(out).to_str().unwrap().contains("malformed_fraction"));
        qt_string_free(out);

        let unknown = CString::new("plot").unwrap();
        assert_eq!(
            qt_run_job(unknown.as_ptr(), ptr::null(), &mut out, &mut code),
            QtStatus::InvalidArgument
        );
    }
}

#[test]
fn free_functions_accept_null() {
    unsafe {
        qt_local_system_free(ptr::null_mut());
        qt_level_free(ptr::null_mut());
        qt_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_the_abi() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/qtorus.h")).unwrap();
    for name in [
        "typedef struct QtLocalSystem QtLocalSystem;",
        "typedef struct QtLevel QtLevel;",
        "QT_STATUS_OK = 0",
        "QT_STATUS_PANIC = 9",
        "qt_local_system_new(",
        "qt_local_system_free(",
        "qt_cohomology_ranks(",
        "qt_cohomology_json(",
        "qt_euler_characteristic(",
        "qt_level_new(",
        "qt_level_free(",
        "qt_level_is_invariant(",
        "qt_twist(",
        "qt_double_braiding(",
        "qt_run_job(",
        "qt_string_free(",
        "qt_last_error_message(",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(status) = std::process::Command::new("cc")
        .args(["-std=c99", "-fsyntax-only", "-x", "c"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include/qtorus.h"))
        .status()
    else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    assert!(status.success());
}

#[test]
fn c_program_links_against_staticlib() {
    let manifest = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    // target/<profile>/deps/abi-<hash>
    let Some(lib) = exe
        .parent()
        .and_then(|deps| deps.parent())
        .map(|profile| profile.join("libqtorus_ffi.a"))
        .filter(|p| p.exists())
    else {
        eprintln!("static library not found; skipping");
        return;
    };
    let out = std::env::temp_dir().join(format!("qtorus_smoke_{}", std::process::id()));
    let Ok(status) = std::process::Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
    else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    assert!(status.success());
    let run = std::process::Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert_eq!(String::from_utf8_lossy(&run.stdout), "ok\n");
}
