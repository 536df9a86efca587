use std::ffi::{CStr, CString};
use std::ptr;

use abflux_ffi::*;

fn last_error() -> String {
    let n = unsafe { abflux_last_error(ptr::null_mut(), 0) };
    let mut buf = vec![0u8; n];
    unsafe { abflux_last_error(buf.as_mut_ptr().cast(), n) };
    CStr::from_bytes_until_nul(&buf).unwrap().to_string_lossy().into_owned()
}

#[test]
fn version_and_scenarios() {
    let v = unsafe { CStr::from_ptr(abflux_version()) };
    assert_eq!(v.to_str().unwrap(), abflux::VERSION);
    assert_eq!(abflux_scenario_count(), 5);
    for k in 0..5 {
        let name = unsafe { CStr::from_ptr(abflux_scenario_name(k)) }.to_str().unwrap();
        assert_eq!(abflux::scenario::ScenarioKind::ALL[k].name(), name);
    }
    assert!(abflux_scenario_name(5).is_null());
}

#[test]
fn config_errors_carry_codes_and_messages() {
    let mut cfg = ptr::null_mut();
    let text = CString::new("scenario=madelung-demo\ndt=0").unwrap();
    let s = unsafe { abflux_config_parse(text.as_ptr(), &mut cfg) };
    assert_eq!(s, AbfluxStatus::ConfigError);
    assert!(cfg.is_null());
    assert!(last_error().contains("dt"), "{}", last_error());

    let s = unsafe { abflux_config_parse(ptr::null(), &mut cfg) };
    assert_eq!(s, AbfluxStatus::NullPointer);

    let bad = [0xffu8, 0xfe, 0];
    let s = unsafe { abflux_config_parse(bad.as_ptr().cast(), &mut cfg) };
    assert_eq!(s, AbfluxStatus::InvalidUtf8);

    let name = CString::new("no-such").unwrap();
    let s = unsafe { abflux_config_default(name.as_ptr(), &mut cfg) };
    assert_eq!(s, AbfluxStatus::ConfigError);
}

#[test]
fn echo_reports_required_size() {
    let mut cfg = ptr::null_mut();
    let name = CString::new("continuous-aspect").unwrap();
    assert_eq!(unsafe { abflux_config_default(name.as_ptr(), &mut cfg) }, AbfluxStatus::Ok);
    let n = unsafe { abflux_config_echo(cfg, ptr::null_mut(), 0) };
    let mut small = vec![1u8; 4];
    assert_eq!(unsafe { abflux_config_echo(cfg, small.as_mut_ptr().cast(), 4) }, n);
    assert_eq!(small, vec![1u8; 4], "too-small buffer must be left alone");
    let mut buf = vec![0u8; n];
    unsafe { abflux_config_echo(cfg, buf.as_mut_ptr().cast(), n) };
    let text = CStr::from_bytes_until_nul(&buf).unwrap().to_str().unwrap();
    assert!(text.contains("scenario=continuous-aspect"));
    unsafe { abflux_config_free(cfg) };
    unsafe { abflux_config_free(ptr::null_mut()) };
}

#[test]
fn madelung_run_through_handles() {
    let dir = tempfile::tempdir().unwrap();
    let text = CString::new("scenario=madelung-demo").unwrap();
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { abflux_config_parse(text.as_ptr(), &mut cfg) }, AbfluxStatus::Ok);
    let out = CString::new(dir.path().to_str().unwrap()).unwrap();
    let mut report = ptr::null_mut();
    let s = unsafe { abflux_run(cfg, out.as_ptr(), &mut report) };
    assert_eq!(s, AbfluxStatus::Ok, "{}", last_error());
    let n = unsafe { abflux_report_verdict_count(report) };
    assert!(n >= 4);
    for k in 0..n {
        let (mut passed, mut measured, mut tol) = (false, 0.0, 0.0);
        assert_eq!(unsafe { abflux_report_verdict(report, k, &mut passed, &mut measured, &mut tol) }, AbfluxStatus::Ok);
        assert!(passed, "verdict {k}: {measured} vs {tol}");
    }
    assert_eq!(
        unsafe { abflux_report_verdict(report, n, ptr::null_mut(), ptr::null_mut(), ptr::null_mut()) },
        AbfluxStatus::OutOfRange
    );
    let len = unsafe { abflux_report_json(report, ptr::null_mut(), 0) };
    let mut buf = vec![0u8; len];
    unsafe { abflux_report_json(report, buf.as_mut_ptr().cast(), len) };
    let json: serde_json::Value = serde_json::from_slice(&buf[..len - 1]).unwrap();
    assert_eq!(json["scenario"], "madelung-demo");
    assert!(dir.path().join("madelung-demo.report.json").exists());
    unsafe {
        abflux_report_free(report);
        abflux_config_free(cfg);
    }
}

#[test]
fn null_handles_are_rejected() {
    let mut report = ptr::null_mut();
    assert_eq!(unsafe { abflux_run(ptr::null(), ptr::null(), &mut report) }, AbfluxStatus::NullPointer);
    assert_eq!(unsafe { abflux_report_verdict_count(ptr::null()) }, 0);
    assert_eq!(unsafe { abflux_report_json(ptr::null(), ptr::null_mut(), 0) }, 0);
}

#[test]
fn rotor_energy_matches_closed_form() {
    let mut e = 0.0;
    assert_eq!(unsafe { abflux_rotor_energy(2.0, 1.0, 0.5, 2, 1, &mut e) }, AbfluxStatus::Ok);
    assert_eq!(e, 1.0);
    assert_eq!(unsafe { abflux_rotor_energy(-1.0, 1.0, 0.5, 2, 1, &mut e) }, AbfluxStatus::ConfigError);
    assert_eq!(unsafe { abflux_rotor_energy(2.0, 1.0, 0.5, 2, 1, ptr::null_mut()) }, AbfluxStatus::NullPointer);
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/abflux.h")).unwrap();
    for f in [
        "abflux_version",
        "abflux_last_error",
        "abflux_scenario_count",
        "abflux_scenario_name",
        "abflux_config_parse",
        "abflux_config_default",
        "abflux_config_echo",
        "abflux_config_free",
        "abflux_run",
        "abflux_report_verdict_count",
        "abflux_report_verdict",
        "abflux_report_json",
        "abflux_report_free",
        "abflux_rotor_energy",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(header.contains("typedef struct AbfluxConfig AbfluxConfig;"));
}

#[test]
fn header_compiles_as_c() {
    let Ok(out) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-std=c99", "-Wall", "-Werror", "-x", "c"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include/abflux.h"))
        .output()
    else {
        eprintln!("no C compiler; skipped");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
