//! Compile and run a small C program against the generated header and the
//! static library. Skipped when no C compiler is on the PATH.

use std::path::{Path, PathBuf};
use std::process::Command;

fn have(cmd: &str) -> bool {
    Command::new(cmd)
        .arg("--version")
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

fn find_staticlib() -> Option<PathBuf> {
    let base = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../target");
    for profile in ["debug", "release"] {
        let p = base.join(profile).join("libconefold_ffi.a");
        if p.exists() {
            return Some(p);
        }
    }
    None
}

#[test]
fn c_program_links_and_runs() {
    if !have("cc") && !have("gcc") {
        eprintln!("no C compiler found; skipping link smoke test");
        return;
    }
    let compiler = if have("cc") { "cc" } else { "gcc" };
    let Some(lib) = find_staticlib() else {
        eprintln!("staticlib not built yet; skipping link smoke test");
        return;
    };
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"
#include "conefold.h"
#include <math.h>
#include <stdio.h>

int main(void) {
    ConefoldConfig *cfg = 0;
    ConefoldStatus st = conefold_synthesize(2, 2, 0, 0.5, 2.0, 1.0 / 3.0, 3.0, &cfg);
    if (st != CONEFOLD_STATUS_OK) { printf("synth: %s\n", conefold_status_message(st)); return 1; }
    double d2 = 0.0;
    if (conefold_fold_couple(cfg, 0.4, &d2) != CONEFOLD_STATUS_OK) return 2;
    double da = 1.0, db = 1.0;
    if (conefold_determinants(cfg, 0.4, d2, &da, &db) != CONEFOLD_STATUS_OK) return 3;
    if (fabs(da) > 1e-10 || fabs(db) > 1e-10) return 4;
    ConefoldStrip *strip = 0;
    if (conefold_strip_build(cfg, 12, 0.4, 0.4, &strip) != CONEFOLD_STATUS_OK) return 5;
    double mirror = 1, period4 = 1, plane = 1;
    if (conefold_strip_closure(strip, &mirror, &period4, &plane) != CONEFOLD_STATUS_OK) return 6;
    if (mirror > 1e-10 || period4 > 1e-9 || plane > 1e-9) return 7;
    conefold_strip_free(strip);
    conefold_config_free(cfg);
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("smoke");
    let compile = Command::new(compiler)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(
        compile.status.success(),
        "compile failed: {}",
        String::from_utf8_lossy(&compile.stderr)
    );
    let run = Command::new(&exe).status().unwrap();
    assert!(run.success(), "smoke program exited with {run:?}");
}
