//! Compiles a small C program against the generated header and the shared
//! library. Skipped when no C compiler is on PATH.

use std::path::PathBuf;
use std::process::Command;

use nordlid::model::{self, FastModel, FeaturizerConfig};

const PROGRAM: &str = r#"
#include <stdio.h>
#include "nordlid.h"

int main(int argc, char **argv) {
    NordlidModel *m = NULL;
    if (nordlid_model_load(argv[1], &m) != NORDLID_STATUS_OK) {
        fprintf(stderr, "%s\n", nordlid_last_error());
        return 1;
    }
    for (int i = 2; i < argc; i++) {
        char *labels = NULL;
        uint8_t bits = 0;
        if (nordlid_predict_labels(m, argv[i], &labels) != NORDLID_STATUS_OK) return 1;
        if (nordlid_predict(m, argv[i], &bits, NULL) != NORDLID_STATUS_OK) return 1;
        printf("%s\t%u\n", labels, (unsigned)bits);
        nordlid_string_free(labels);
    }
    nordlid_model_free(m);
    NordlidModel *bad = NULL;
    return nordlid_model_load("/nonexistent", &bad) == NORDLID_STATUS_IO ? 0 : 3;
}
"#;

fn lib_dir() -> PathBuf {
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping");
        return;
    }
    let lib = lib_dir();
    if !lib.join("libnordlid_ffi.so").exists() {
        eprintln!("shared library not found in {}; skipping", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("client.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let exe = dir.path().join("client");
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg("-L")
        .arg(&lib)
        .arg("-lnordlid_ffi")
        .arg("-o")
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());

    let m = FastModel::init(
        FeaturizerConfig {
            bucket_count: 128,
            embed_dim: 4,
            ..Default::default()
        },
        11,
    )
    .unwrap();
    let model_path = dir.path().join("m.slfx");
    model::save_model(&m, &model_path).unwrap();

    let texts = ["Jeg har en plan.", "Det är bra"];
    let out = Command::new(&exe)
        .arg(&model_path)
        .args(texts)
        .env("LD_LIBRARY_PATH", &lib)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let expected: String = texts
        .iter()
        .map(|t| {
            let labels = m.classify(t).0;
            format!("{labels}\t{}\n", labels.bits())
        })
        .collect();
    assert_eq!(stdout, expected);
}
