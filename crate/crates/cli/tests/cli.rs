use std::io::{BufRead, BufReader};
use std::path::Path;
use std::process::{Command, Output, Stdio};

use ringpir::fixtures;
use ringpir::pir_io::MatrixFile;

fn pir(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pir"))
        .args(args)
        .env_remove("PIR_SEED")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = pir(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn toy_pipeline_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["export-toy", "--dir", d.to_str().unwrap()]);
    ok(&["respond", "--db", &p(d, "toy_db.mat"), "--query", &p(d, "toy_query.mat"), "--out", &p(d, "r.mat")]);
    let r = MatrixFile::read(&d.join("r.mat")).unwrap();
    assert_eq!(r.matrix, fixtures::response_matrix());
    assert_eq!(r.modulus, 15);
    let out = ok(&[
        "recover",
        "--params",
        &p(d, "toy.params"),
        "--secrets",
        &p(d, "toy.secrets"),
        "--response",
        &p(d, "r.mat"),
        "--out",
        &p(d, "file.mat"),
    ]);
    assert!(out.ends_with("\n1\n"), "{out}");
    let file = MatrixFile::read(&d.join("file.mat")).unwrap();
    assert_eq!(file.matrix.data(), &[1]);
    assert_eq!(file.modulus, 15);
}

#[test]
fn rate_prints_first_table_row() {
    let out = ok(&["rate", "--m", "2^2,3^2", "--n", "91", "--s", "5", "--r", "4"]);
    assert!(out.contains("rate: 1/455"), "{out}");
    assert!(out.contains("T(91, 2) = 10, T(91, 3) = 18"), "{out}");
    assert!(out.contains("(2^28)^6"), "{out}");
    let out = ok(&["rate", "--m-factors", "2^3,3^3", "--n", "91", "--s", "5", "--r", "5"]);
    assert!(out.contains("rate: 1/546"), "{out}");
}

#[test]
fn seeded_pipeline_with_attack_and_network() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let params = p(d, "pir.params");
    ok(&[
        "setup", "--params", &params, "--m-factors", "2^2,3^2", "--n", "91", "--s", "5", "--r", "4", "--t", "4", "--L",
        "8", "--seed", "5",
    ]);
    let public = std::fs::read_to_string(d.join("pir.params.public")).unwrap();
    assert!(!public.contains("[inner]") && !public.contains("[outer]"));
    ok(&["gen-db", "--public", &p(d, "pir.params.public"), "--out", &p(d, "db.mat"), "--seed", "6"]);
    ok(&["query", "--params", &params, "--d", "2", "--out", &p(d, "q.mat"), "--secrets", &p(d, "q.sec"), "--seed", "7"]);

    let attack = ok(&["attack", "--query", &p(d, "q.mat"), "--m-factors", "2^2,3^2", "--rows-per-file", "4"]);
    assert!(attack.contains("no distinguished file"), "{attack}");

    let mut server = Command::new(env!("CARGO_BIN_EXE_pir"))
        .args(["serve", "--db", &p(d, "db.mat"), "--bind", "127.0.0.1:0", "--t", "4"])
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(server.stdout.as_mut().unwrap()).read_line(&mut line).unwrap();
    let addr = line.trim().strip_prefix("serving on ").unwrap().to_string();
    let info = ok(&["send", "--addr", &addr, "--info"]);
    let sent = pir(&["send", "--addr", &addr, "--query", &p(d, "q.mat"), "--out", &p(d, "r.mat")]);
    server.kill().unwrap();
    let _ = server.wait();
    assert!(sent.status.success(), "{}", String::from_utf8_lossy(&sent.stderr));
    assert_eq!(info.trim(), "t = 4, L = 8, r = 4, m' = 6");

    ok(&[
        "recover", "--params", &params, "--secrets", &p(d, "q.sec"), "--response", &p(d, "r.mat"), "--out",
        &p(d, "f.mat"),
    ]);
    let db = MatrixFile::read(&d.join("db.mat")).unwrap();
    let file = MatrixFile::read(&d.join("f.mat")).unwrap();
    assert_eq!(file.matrix, db.matrix.select_cols(4..8));
}

#[test]
fn seed_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let run = |name: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_pir"))
            .args(["gen-db", "--public", &p(d, "x.public"), "--out", &p(d, name)])
            .env("PIR_SEED", "99")
            .output()
            .unwrap();
        assert!(out.status.success());
        std::fs::read(d.join(name)).unwrap()
    };
    std::fs::write(d.join("x.public"), "[modulus]\nfactors = 2^2,3^2\n\n[shape]\nt = 2\nL = 3\nr = 2\n").unwrap();
    assert_eq!(run("a.mat"), run("b.mat"));
}

#[test]
fn failures_are_one_line() {
    let out = pir(&["rate", "--m", "2^2,3^2", "--n", "91", "--s", "2", "--r", "3"]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("error: "));

    let out = pir(&["respond", "--db", "/nonexistent/db.mat", "--query", "q", "--out", "r"]);
    assert!(!out.status.success());
    assert_eq!(String::from_utf8(out.stderr).unwrap().lines().count(), 1);
}
