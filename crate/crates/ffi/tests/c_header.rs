use std::path::{Path, PathBuf};
use std::process::Command;

fn target_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_the_static_library() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join("libboolgebra_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(
        &src,
        r#"#include "boolgebra.h"
#include <stdio.h>
int main(int argc, char **argv) {
    BgAig *g = NULL, *h = NULL;
    if (bg_aig_read(argv[1], &g) != BG_OK) return 10;
    if (bg_standalone(g, BG_RF, &h) != BG_OK) return 11;
    if (bg_equivalent(g, h, 0, 0) != BG_OK) return 12;
    printf("%zu %zu\n", bg_aig_size(g), bg_aig_size(h));
    bg_aig_free(h);
    bg_aig_free(g);
    char msg[64];
    if (bg_aig_read("/nonexistent.aag", &g) != BG_ERR_IO) return 13;
    if (bg_last_error(msg, sizeof msg) == 0) return 14;
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("main");
    let cc = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(root.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(cc.status.success(), "{}", String::from_utf8_lossy(&cc.stderr));
    let run = Command::new(&exe).arg(root.join("../core/benchmarks/orchestration21.aag")).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "21 17");
}
