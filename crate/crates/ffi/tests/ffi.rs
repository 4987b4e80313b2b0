use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use flopcalc_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(flop_last_error()) }
        .to_str()
        .unwrap()
        .to_string()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    flop_string_free(s);
    out
}

fn diagram(spec: &str) -> *mut FlopDiagram {
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { flop_diagram_parse(c(spec).as_ptr(), &mut d) }, FlopStatus::Ok);
    d
}

const CA2_K3: &str =
    r#"{"diagram":"A2","subset":[],"entries":[{"class":[1,0],"n":1},{"class":[0,1],"n":1},{"class":[1,1],"n":3}]}"#;

#[test]
fn diagram_handles() {
    let d = diagram("E7");
    let mut rank = 0;
    let mut roots = 0;
    unsafe {
        assert_eq!(flop_diagram_rank(d, &mut rank), FlopStatus::Ok);
        assert_eq!(flop_positive_root_count(d, &mut roots), FlopStatus::Ok);
        flop_diagram_free(d);
    }
    assert_eq!((rank, roots), (7, 63));
}

#[test]
fn parse_errors_and_nulls() {
    let mut d = ptr::null_mut();
    unsafe {
        assert_eq!(flop_diagram_parse(c("E9").as_ptr(), &mut d), FlopStatus::Parse);
        assert!(last_error().contains("E9"));
        assert!(d.is_null());
        assert_eq!(flop_diagram_parse(ptr::null(), &mut d), FlopStatus::NullPointer);
        assert_eq!(
            flop_diagram_parse(c("E8").as_ptr(), ptr::null_mut()),
            FlopStatus::NullPointer
        );
        let bad = [0xffu8, 0];
        assert_eq!(flop_diagram_parse(bad.as_ptr().cast(), &mut d), FlopStatus::InvalidUtf8);
        let mut n = 0;
        assert_eq!(flop_diagram_rank(ptr::null(), &mut n), FlopStatus::NullPointer);
        flop_diagram_free(ptr::null_mut());
        flop_table_free(ptr::null_mut());
        flop_string_free(ptr::null_mut());
    }
}

#[test]
fn chambers_and_limit() {
    let d = diagram("E8");
    let mut n = 0;
    unsafe {
        assert_eq!(
            flop_chamber_count(d, c("1,2,4,5,6,7").as_ptr(), 0, &mut n),
            FlopStatus::Ok
        );
        assert_eq!(n, 12);
        assert_eq!(flop_chamber_count(d, c("").as_ptr(), 100, &mut n), FlopStatus::Limit);
        assert_eq!(flop_chamber_count(d, c("1,9").as_ptr(), 0, &mut n), FlopStatus::Domain);
        assert_eq!(flop_chamber_count(d, c("1,x").as_ptr(), 0, &mut n), FlopStatus::Parse);
        assert_eq!(flop_verify_chambers(d, c("1,2,4,5,6,7").as_ptr(), 0), FlopStatus::Ok);
        assert_eq!(flop_verify_lemma(d, c("1,2,4,5,6,7").as_ptr()), FlopStatus::Ok);
        flop_diagram_free(d);
    }
}

#[test]
fn flop_matrix_buffer() {
    let d = diagram("E8");
    let s = c("1,2,4,5,6,7");
    let mut buf = [0i64; 4];
    let mut n = 0;
    unsafe {
        assert_eq!(
            flop_flop_matrix(d, s.as_ptr(), 8, buf.as_mut_ptr(), 2, &mut n),
            FlopStatus::BufferTooSmall
        );
        assert_eq!(n, 2);
        assert_eq!(
            flop_flop_matrix(d, s.as_ptr(), 8, buf.as_mut_ptr(), 4, &mut n),
            FlopStatus::Ok
        );
        assert_eq!(buf, [1, 0, 1, -1]);
        let mut json = ptr::null_mut();
        assert_eq!(flop_flop_json(d, s.as_ptr(), 8, &mut json), FlopStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(json)).unwrap();
        assert_eq!(v["new_node"], 2);
        flop_diagram_free(d);
    }
}

#[test]
fn table_round_trip_and_dims() {
    let mut t = ptr::null_mut();
    unsafe {
        assert_eq!(flop_table_from_json(c(CA2_K3).as_ptr(), &mut t), FlopStatus::Ok);
        let mut dim = ptr::null_mut();
        assert_eq!(flop_table_dim(t, &mut dim), FlopStatus::Ok);
        assert_eq!(take(dim), "14");
        assert_eq!(flop_table_dim_after_mutation(t, 2, &mut dim), FlopStatus::Ok);
        assert_eq!(take(dim), "8");

        let mut once = ptr::null_mut();
        let mut twice = ptr::null_mut();
        assert_eq!(flop_table_transform(t, 1, &mut once), FlopStatus::Ok);
        assert_eq!(flop_table_transform(once, 1, &mut twice), FlopStatus::Ok);
        let mut a = ptr::null_mut();
        let mut b = ptr::null_mut();
        flop_table_to_json(t, &mut a);
        flop_table_to_json(twice, &mut b);
        assert_eq!(take(a), take(b));
        assert_eq!(flop_table_transform(t, 5, &mut once), FlopStatus::Domain);
        flop_table_free(once);
        flop_table_free(twice);
        flop_table_free(t);

        assert_eq!(flop_table_from_json(c("{").as_ptr(), &mut t), FlopStatus::Parse);
    }
}

#[test]
fn quantum_potential_values() {
    let mut t = ptr::null_mut();
    let g = c("1,0");
    unsafe {
        flop_table_from_json(c(CA2_K3).as_ptr(), &mut t);
        let mut v = ptr::null_mut();
        // 1·(1/2)/(1-1/2) + 3·(1/6)/(1-1/6) = 1 + 3/5
        assert_eq!(
            flop_quantum_potential(t, g.as_ptr(), g.as_ptr(), g.as_ptr(), c("1/2,1/3").as_ptr(), &mut v),
            FlopStatus::Ok
        );
        assert_eq!(take(v), "8/5");
        assert_eq!(
            flop_quantum_potential(t, g.as_ptr(), g.as_ptr(), g.as_ptr(), c("1,1/3").as_ptr(), &mut v),
            FlopStatus::Pole
        );
        assert_eq!(
            flop_quantum_potential(t, g.as_ptr(), g.as_ptr(), g.as_ptr(), c("1/2").as_ptr(), &mut v),
            FlopStatus::Domain
        );
        assert_eq!(
            flop_quantum_potential(t, g.as_ptr(), g.as_ptr(), g.as_ptr(), c("1/0,1").as_ptr(), &mut v),
            FlopStatus::Parse
        );
        flop_table_free(t);
    }
}

#[test]
fn errors_are_thread_local() {
    let mut d = ptr::null_mut();
    unsafe { flop_diagram_parse(c("Q1").as_ptr(), &mut d) };
    let here = last_error();
    std::thread::spawn(|| assert_eq!(last_error(), "")).join().unwrap();
    assert!(here.contains("Q1"));
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/flopcalc.h");
    for name in [
        "flop_last_error",
        "flop_string_free",
        "flop_diagram_parse",
        "flop_diagram_free",
        "flop_diagram_rank",
        "flop_positive_root_count",
        "flop_chamber_count",
        "flop_flop_matrix",
        "flop_flop_json",
        "flop_verify_lemma",
        "flop_verify_chambers",
        "flop_table_from_json",
        "flop_table_free",
        "flop_table_to_json",
        "flop_table_transform",
        "flop_table_dim",
        "flop_table_dim_after_mutation",
        "flop_quantum_potential",
        "flop_version",
    ] {
        assert!(header.contains(&format!("{name}(")), "{name} missing");
    }
    assert!(header.contains("typedef struct FlopTable FlopTable;"));
}

/// Compiles the C smoke test against the static library when a C compiler is around.
#[test]
fn c_smoke_test() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler, skipping");
        return;
    };
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libflopcalc_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built, skipping", lib.display());
        return;
    }
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let dir = tempfile_dir();
    let bin = dir.join("smoke");
    let status = Command::new(&cc)
        .arg(root.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(root.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&bin).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        out.status.success(),
        "{}{}",
        stdout,
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout.contains("qp 8/5"));
}

fn which_cc() -> Result<String, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if Command::new(cc)
            .arg("--version")
            .output()
            .map(|o| o.status.success())
            .unwrap_or(false)
        {
            return Ok(cc.to_string());
        }
    }
    Err(())
}

fn tempfile_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("flopcalc-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
