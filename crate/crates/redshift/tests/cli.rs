//! CLI integration: exit-code contract, determinism, config precedence.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_redshift"))
}

#[test]
fn invalid_prime_exits_2() {
    let out = bin().args(["tc", "--prime", "4", "tc"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_suite_exits_2() {
    let out = bin().args(["verify", "sloppy"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tc_table_is_deterministic_and_ok() {
    let run = || {
        bin()
            .args(["tc", "--prime", "7", "tc", "--emit", "json"])
            .output()
            .unwrap()
    };
    let a = run();
    let b = run();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(
        a.stdout, b.stdout,
        "identical config must emit identical bytes"
    );
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains("\"provenance\": \"TC\""));
    assert!(text.contains("Xi(3,1)"));
}

#[test]
fn page_2_echo_is_diff_clean() {
    let out = bin()
        .args([
            "pages",
            "--prime",
            "3",
            "--group",
            "Cp^1",
            "--variant",
            "tate",
            "--window",
            "s=-40..40,n=-10..10",
            "--page",
            "2",
            "--emit",
            "table",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("diff clean"), "stderr: {err}");
}

#[test]
fn pages_json_deterministic() {
    let run = || {
        bin()
            .args([
                "pages",
                "--prime",
                "3",
                "--group",
                "T",
                "--variant",
                "hfp",
                "--window",
                "s=-60..0,n=0..30",
                "--page",
                "inf",
                "--emit",
                "json",
            ])
            .output()
            .unwrap()
    };
    let a = run();
    let b = run();
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_file_precedence() {
    let dir = std::env::temp_dir().join("redshift-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.conf");
    std::fs::write(
        &cfg,
        "prime=3\ngroup=Cp^1\nvariant=tate\nwindow=s=-40..40,n=-10..10\npage=2\nemit=poincare\n",
    )
    .unwrap();
    // Flag overrides the config's emit.
    let out = bin()
        .args([
            "pages",
            "--config",
            cfg.to_str().unwrap(),
            "--emit",
            "table",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("basis"), "table format expected: {text}");
}

#[test]
fn thread_env_is_validated() {
    let out = bin()
        .args(["tc", "--prime", "5", "tc"])
        .env("REDSHIFT_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args(["tc", "--prime", "5", "tc"])
        .env("REDSHIFT_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_quick_passes() {
    let out = bin()
        .args(["verify", "--prime", "3", "quick"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS cp-tate-oracle-p3"));
    assert!(!text.contains("FAIL"));
}
