use std::path::PathBuf;
use std::process::Command;

// `cargo test` builds the examples next to the test binaries
fn example(name: &str) -> PathBuf {
    let mut p = std::env::current_exe().unwrap();
    p.pop();
    if p.ends_with("deps") {
        p.pop();
    }
    p.join("examples").join(name)
}

#[test]
fn every_example_runs() {
    for name in ["blinks", "algebra", "framed_link", "invariant", "homology", "gem", "classify"] {
        let path = example(name);
        if !path.exists() {
            eprintln!("skipping {name}: not built");
            continue;
        }
        let out = Command::new(&path).output().unwrap();
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stdout.is_empty(), "{name}");
    }
}
