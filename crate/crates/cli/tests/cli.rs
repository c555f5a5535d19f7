use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subset-kex")).current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn kex_p1_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("p.json"), r#"{"m":2,"rows":[[2,1],[0,3]]}"#).unwrap();
    let a = run(dir.path(), &["kex", "p1", "simulate", "--seed", "7", "--params", "p.json"]);
    let b = run(dir.path(), &["kex", "p1", "simulate", "--seed", "7", "--params", "p.json"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let t: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(t["protocol"], "p1");
    assert_eq!(t["keys"]["alice"], t["keys"]["bob"]);
    // input untouched
    assert_eq!(std::fs::read_to_string(dir.path().join("p.json")).unwrap(), r#"{"m":2,"rows":[[2,1],[0,3]]}"#);
}

#[test]
fn every_protocol_agrees() {
    let dir = tempfile::tempdir().unwrap();
    for proto in ["p1", "p2", "orbit-dh"] {
        for seed in ["0", "1", "2"] {
            let o = run(dir.path(), &["kex", proto, "simulate", "--seed", seed]);
            assert!(o.status.success(), "{proto}: {}", String::from_utf8_lossy(&o.stderr));
            let t: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
            assert_eq!(t["keys"]["alice"], t["keys"]["bob"]);
        }
    }
}

#[test]
fn orbit_grammar_membership() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["grammar", "orbit", "--word", r#"["x1"]"#, "--out", "g.json"]);
    assert!(o.status.success());
    let yes = run(dir.path(), &["grammar", "member", "--grammar", "g.json", "--word", r#"["t^-1","x1","t"]"#]);
    assert_eq!(stdout(&yes).trim(), "true");
    let no = run(dir.path(), &["grammar", "member", "--grammar", "g.json", "--word", r#"["x1","t"]"#]);
    assert_eq!(stdout(&no).trim(), "false");
    let closure = run(dir.path(), &["grammar", "closure", "--grammar", "g.json"]);
    assert!(closure.status.success());
    let sample = run(dir.path(), &["grammar", "sample", "--grammar", "g.json", "--trials", "5", "--seed", "3"]);
    assert_eq!(stdout(&sample).lines().count(), 5);
}

#[test]
fn emitted_documents_reparse() {
    let dir = tempfile::tempdir().unwrap();
    let p = run(dir.path(), &["params", "gen", "--dim", "3", "--seed", "5", "--out", "m.json"]);
    assert!(p.status.success());
    let i = run(dir.path(), &["instance", "p1", "gen", "--params", "m.json", "--seed", "5", "--out", "i.json"]);
    assert!(i.status.success(), "{}", String::from_utf8_lossy(&i.stderr));
    let k = run(dir.path(), &["kex", "p1", "simulate", "--params", "i.json", "--seed", "5"]);
    assert!(k.status.success(), "{}", String::from_utf8_lossy(&k.stderr));
    let t: subset_kex::wire::Transcript = subset_kex::wire::from_json(&stdout(&k)).unwrap();
    assert_eq!(subset_kex::wire::to_json(&t), stdout(&k).trim_end());
    let inst = std::fs::read_to_string(dir.path().join("i.json")).unwrap();
    let doc: subset_kex::wire::ParamsJson = subset_kex::wire::from_json(&inst).unwrap();
    assert_eq!(subset_kex::wire::to_json(&doc), inst.trim_end());
}

#[test]
fn selftest_and_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["selftest", "oracle", "--trials", "1000"]);
    assert_eq!(o.status.code(), Some(0));
    let a = run(dir.path(), &["attack", "sweep", "--trials", "3", "--seed", "4"]);
    let b = run(dir.path(), &["attack", "sweep", "--trials", "3", "--seed", "4"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("grid_id,mode,trials,successes,mean_iters,mean_ms\n"));
    for mode in ["rst", "descent"] {
        let r = run(dir.path(), &["attack", mode, "--trials", "2", "--seed", "1"]);
        assert!(r.status.success(), "{mode}");
        assert_eq!(stdout(&r).lines().count(), 2);
    }
}

#[test]
fn validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("s.json"), r#"{"m":2,"rows":[[1,2],[2,4]]}"#).unwrap();
    let o = run(dir.path(), &["kex", "p1", "simulate", "--params", "s.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    let o = run(dir.path(), &["grammar", "orbit", "--word", r#"["y1"]"#]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(dir.path(), &["kex", "p1", "simulate", "--params", "missing.json"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(dir.path(), &["bogus"]);
    assert_eq!(o.status.code(), Some(2));
}
