//! End-to-end runs of the `desmod` binary: exit codes, reports and generated files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use desmod_cli::Report;
use desmod_core::checkers::{Property, Verdict, Witness};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn desmod(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_desmod"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn here() -> PathBuf {
    data("")
}

#[test]
fn weak_detectability_example_is_violated() {
    let o = desmod(&["check", "detect", "--weak", "weak.des"], &here());
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    assert!(stdout(&o).contains("verdict: violated"));
    for engine in ["explicit", "onthefly", "special-case"] {
        let o = desmod(
            &["check", "detect", "--weak", "--engine", engine, "weak.des"],
            &here(),
        );
        assert_eq!(code(&o), 1, "{engine}: {}", stderr(&o));
    }
}

#[test]
fn opacity_with_empty_secret_holds() {
    let o = desmod(&["check", "opacity", "weak.des"], &here());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn counter_generation_then_validation() {
    let dir = tempfile::tempdir().unwrap();
    let o = desmod(&["gen", "counter", "--n", "3", "--sigma", "a"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = desmod(&["validate", "counter-n3"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("modules: 3\n"));
    let six = text.lines().filter(|l| l.contains(": 6 states,")).count();
    assert_eq!(six, 3, "{text}");
    // The counter's language is finite, so its product deadlocks.
    assert!(text.contains("deadlock-free: no"));
    let o = desmod(&["validate", "--strict", "counter-n3"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn two_module_file_checks() {
    let o = desmod(&["check", "opacity", "--witness", "two_modules"], &here());
    // After `tick*`, the plant may have silently broken or still be fine.
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    let o = desmod(&["check", "adiag", "--witness", "two_modules"], &here());
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    assert!(stdout(&o).contains("witness: undiagnosable fault"));
    let o = desmod(&["validate", "--strict", "two_modules/system.sys"], &here());
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn json_is_stable_and_parses_back() {
    let args = ["check", "adiag", "--witness", "--json", "two_modules"];
    let a = desmod(&args, &here());
    let b = desmod(&args, &here());
    assert_eq!(code(&a), 1);
    assert_eq!(a.stdout, b.stdout);
    let report: Report = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(report.format_version, desmod_cli::FORMAT_VERSION);
    assert_eq!(report.result.property, Property::ADiag);
    assert_eq!(report.result.verdict, Verdict::Violated);
    let Some(Witness::FaultPair { string, .. }) = report.result.witness else {
        panic!("fault witness expected");
    };
    assert!(string.contains(&"f".to_string()));
}

#[test]
fn revealing_word_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("g.des"),
        "module G\nevents a b\ninitial 0\ntrans 0 a 1\ntrans 0 a 2\ntrans 1 b 1\ntrans 2 a 2\n",
    )
    .unwrap();
    fs::write(
        dir.path().join("s.sys"),
        "modules g.des\nsecret rect G={1}\n",
    )
    .unwrap();
    let o = desmod(
        &["check", "opacity", "--json", "--witness", "s.sys"],
        dir.path(),
    );
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    let report: Report = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(
        report.result.witness,
        Some(Witness::Revealing {
            word: vec!["a".into(), "b".into()],
            estimate: vec!["1".into()],
        })
    );
}

#[test]
fn errors_map_to_exit_codes() {
    let o = desmod(
        &["check", "detect", "--weak", "bad/unknown_event.des"],
        &here(),
    );
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 4, column 9"), "{}", stderr(&o));

    let o = desmod(&["validate", "bad/empty.sys"], &here());
    assert_eq!(code(&o), 2);

    let o = desmod(
        &["check", "detect", "--weak", "--json", "missing.des"],
        &here(),
    );
    assert_eq!(code(&o), 2);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["error"]["kind"], "input");

    let o = desmod(
        &["check", "detect", "--strong", "--budget", "1", "weak.des"],
        &here(),
    );
    assert_eq!(code(&o), 3, "{}", stderr(&o));

    let o = desmod(&["check", "detect", "weak.des"], &here());
    assert_eq!(code(&o), 2);
    let o = desmod(
        &["check", "detect", "--weak", "--strong", "weak.des"],
        &here(),
    );
    assert_eq!(code(&o), 2);
    let o = desmod(&["--help"], &here());
    assert_eq!(code(&o), 0);
}

#[test]
fn reduction_directory_is_recheckable() {
    let dir = tempfile::tempdir().unwrap();
    let tm = data("scanner.tm");
    let tm = tm.to_str().unwrap();
    let o = desmod(
        &[
            "gen",
            "reduction",
            "--kind",
            "adiag",
            "--tm",
            tm,
            "--out",
            "r",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("machine accepts: true"));
    assert!(text.contains("fragment A1: G1\n"));
    let r = dir.path().join("r");
    assert!(r.join("machine.tm").exists());
    let sys = fs::read_to_string(r.join("system.sys")).unwrap();
    assert!(sys.contains("\nfault @f\n"), "{sys}");
    // Every module has two initial states, so the product exceeds the budget at once.
    let o = desmod(&["check", "adiag", "r"], dir.path());
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}
