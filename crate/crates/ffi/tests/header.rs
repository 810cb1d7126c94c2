use std::path::Path;
use std::process::Command;

fn header() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include").join("modsigma.h")
}

#[test]
fn header_declares_the_abi() {
    let text = std::fs::read_to_string(header()).expect("build script writes the header");
    for name in [
        "typedef struct MsLattice MsLattice;",
        "ms_lattice_new",
        "ms_evaluator_new",
        "ms_eval_log",
        "ms_find_zeros",
        "ms_wavefunction_from_json",
        "ms_last_error_message",
        "#define MS_ERR_POLE 5",
    ] {
        assert!(text.contains(name), "missing {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(status) =
        Command::new("cc").args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c"]).arg(header()).status()
    else {
        eprintln!("no C compiler; skipped");
        return;
    };
    assert!(status.success());
}

#[test]
fn c_program_links_and_runs() {
    // tests run from target/<profile>/deps; the static library sits one level up
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libmodsigma_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; skipped", lib.display());
        return;
    }
    let crate_dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let bin = Path::new(env!("CARGO_TARGET_TMPDIR")).join("modsigma_smoke");
    let Ok(status) = Command::new("cc")
        .arg(crate_dir.join("examples").join("smoke.c"))
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
    else {
        eprintln!("no C compiler; skipped");
        return;
    };
    assert!(status.success(), "C build failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("1.57079632679489"));
}
