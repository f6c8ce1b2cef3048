//! Compiles a C program against the generated header and the static
//! library, then runs it. Proves the header parses as C, the symbols
//! link, and ownership crosses the boundary cleanly.

use std::env;
use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "hodge_vfilt.h"

static int failures = 0;

static void expect(int ok, const char *what) {
    if (!ok) {
        fprintf(stderr, "FAIL: %s\n", what);
        failures += 1;
    }
}

int main(void) {
    expect(hvf_version() != NULL, "version");

    char *out = NULL;
    HvfStatus status = hvf_classify("{\"weights\":[3,2],\"degrees\":[6]}", &out);
    expect(status == HVF_STATUS_OK, "classify status");
    expect(out != NULL && strstr(out, "NotDuBois") != NULL, "classify verdict");
    hvf_string_free(out);

    out = NULL;
    status = hvf_classify("{\"weights\":\"three\"}", &out);
    expect(status == HVF_STATUS_SCHEMA, "schema status");
    expect(out == NULL, "no payload on failure");
    char *message = hvf_last_error_message();
    expect(message != NULL && strstr(message, "/weights") != NULL, "error names the pointer");
    hvf_string_free(message);

    status = hvf_classify(NULL, &out);
    expect(status == HVF_STATUS_NULL_ARGUMENT, "null argument status");

    const char *one = "{\"roots\":{\"1\":1}}";
    status = hvf_roots_combine(one, one, &out);
    expect(status == HVF_STATUS_OK, "combine status");
    expect(out != NULL && strstr(out, "\"2\":1") != NULL, "combine result");
    hvf_string_free(out);

    hvf_string_free(NULL);
    hvf_model_free(NULL);

    if (failures > 0) {
        return 1;
    }
    printf("ok\n");
    return 0;
}
"#;

#[test]
fn c_program_links_and_runs_against_the_header() {
    let tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let include_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    // The test binary lives in target/<profile>/deps; the staticlib one
    // directory up.
    let lib_dir = env::current_exe()
        .expect("test binary path")
        .parent()
        .and_then(|d| d.parent())
        .expect("target profile dir")
        .to_path_buf();
    let staticlib = lib_dir.join("libhodge_vfilt_ffi.a");
    assert!(staticlib.exists(), "staticlib not built at {}", staticlib.display());

    let source = tmp.join("smoke.c");
    std::fs::write(&source, PROGRAM).expect("write C source");
    let binary = tmp.join("smoke");

    let compile = Command::new("cc")
        .arg("-std=c11")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include_dir)
        .arg(&source)
        .arg(&staticlib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&binary)
        .output()
        .expect("cc runs");
    assert!(
        compile.status.success(),
        "compile failed:\n{}",
        String::from_utf8_lossy(&compile.stderr)
    );

    let run = Command::new(&binary).output().expect("smoke binary runs");
    assert!(
        run.status.success(),
        "smoke test failed:\n{}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&run.stdout), "ok\n");
}
