//! The generated header must compile as C99 and as C++, and a C program
//! linked against the static library must run.

use std::path::Path;
use std::process::Command;

const PROGRAM: &str = r#"
#include "leomec.h"
int main(void) {
    LeomecScenario *s = 0;
    LeomecAnalysis *a = 0;
    LeomecTaskResult t;
    double mean = 0.0;
    if (leomec_scenario_default(&s) != LEOMEC_STATUS_OK) return 1;
    if (leomec_analyze(s, LEOMEC_VARIANT_INTEGRATED, &a) != LEOMEC_STATUS_OK) return 2;
    if (leomec_analysis_task(a, 0, &t) != LEOMEC_STATUS_OK) return 3;
    leomec_analysis_mean_delay(a, &mean);
    leomec_analysis_free(a);
    leomec_scenario_free(s);
    return mean > 0.0 ? 0 : 4;
}
"#;

fn compile(compiler: &str, lang: &str, std: &str) {
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let out = Command::new(compiler)
        .args(["-x", lang, std, "-Wall", "-Wextra", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&src)
        .output()
        .unwrap_or_else(|e| panic!("{compiler} not runnable: {e}"));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn header_compiles_as_c() {
    compile("cc", "c", "-std=c99");
}

#[test]
fn header_compiles_as_cpp() {
    compile("c++", "c++", "-std=c++17");
}

#[test]
fn c_program_links_and_runs() {
    // Test binaries live in target/<profile>/deps; the library one level up.
    let exe = std::env::current_exe().unwrap();
    let lib = exe.parent().and_then(Path::parent).unwrap().join("libleomec_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    let bin = dir.path().join("probe");
    std::fs::write(&src, PROGRAM).unwrap();
    let out = Command::new("cc")
        .args(["-std=c99", "-o"])
        .arg(&bin)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let status = Command::new(&bin).status().unwrap();
    assert_eq!(status.code(), Some(0));
}
