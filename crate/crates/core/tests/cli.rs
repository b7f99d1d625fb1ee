use std::process::Command;

use lieqr::cli::{main_with_args, Report, EXIT_ERROR, EXIT_OK, EXIT_VERDICT};

fn lieqr(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_lieqr"))
        .args(args)
        .env_remove("LIEQR_SEED")
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn report(args: &[&str]) -> (i32, Report) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let mut all: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap().to_string();
    all.extend(["--json", &p]);
    let (code, _, err) = lieqr(&all);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("no report for {args:?}: {err}"));
    (code, serde_json::from_str(&text).unwrap())
}

#[test]
fn exit_codes() {
    let cases: &[(&[&str], i32)] = &[
        (&["build", "--series", "A", "--rank", "2"], EXIT_OK),
        (&["quadind", "--series", "A", "--rank", "2"], EXIT_OK),
        (&["quadind", "--series", "A", "--rank", "3", "--linear"], EXIT_OK),
        (&["quadind", "--fixture", "circle"], EXIT_VERDICT),
        (&["quadind", "--fixture", "duplicate", "--linear"], EXIT_VERDICT),
        (&["product", "--spec", "A1,A1", "--linear"], EXIT_OK),
        (&["prove", "--series", "A", "--rank", "2"], EXIT_OK),
        (&["cqg", "--n", "3"], EXIT_OK),
        (&["expand", "--series", "A", "--rank", "2", "--word", "E1:s,F1:t"], EXIT_OK),
        (&["quadind", "--series", "E", "--rank", "6"], EXIT_ERROR),
        (&["build", "--series", "D", "--rank", "3"], EXIT_ERROR),
        (&["build", "--series", "C", "--rank", "3"], EXIT_ERROR),
        (&["cqg", "--n", "1"], EXIT_ERROR),
        (&["product", "--spec", "A1,X2"], EXIT_ERROR),
        (&["prove", "--series", "A", "--rank", "6"], EXIT_ERROR),
        (&["expand", "--series", "A", "--rank", "2", "--word", "Q1:s"], EXIT_ERROR),
        (&["frobnicate"], EXIT_ERROR),
        (&[], EXIT_ERROR),
        (&["--version"], EXIT_OK),
    ];
    for (args, want) in cases {
        let (code, _, err) = lieqr(args);
        assert_eq!(code, *want, "{args:?}: {err}");
    }
}

#[test]
fn in_process_entry_matches_binary() {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = main_with_args(["lieqr", "quadind", "--fixture", "circle"], &mut out, &mut err);
    assert_eq!(code, EXIT_VERDICT);
    let text = String::from_utf8(out).unwrap();
    assert!(text.contains("rank 5 / 6"), "{text}");
    assert!(text.contains("1 0 -1 0 0 -1"), "{text}");
}

#[test]
fn expand_prints_every_basis_element() {
    let (code, out, _) = lieqr(&["expand", "--series", "A", "--rank", "1", "--word", "E1:s"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().filter(|l| l.contains(" = ")).collect();
    assert_eq!(lines, ["H1 = 1", "E[1] = -2*s", "F[1] = 0"]);
}

#[test]
fn report_fields() {
    let (code, r) = report(&["quadind", "--series", "A", "--rank", "2", "--seed", "11"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(r.schema, 1);
    assert_eq!(r.command, "quadind");
    assert_eq!(r.dim, Some(8));
    assert_eq!(r.expected_rank, Some(36));
    assert_eq!(r.rank_found, Some(36));
    assert_eq!(r.seed, 11);
    assert_eq!(r.verdict, "certified-full-rank");
    assert!(r.prime.is_some());
    assert!(r.samples.unwrap() >= 36);
}

#[test]
fn seed_comes_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = Command::new(env!("CARGO_BIN_EXE_lieqr"))
        .args(["quadind", "--series", "A", "--rank", "1", "--json", path.to_str().unwrap()])
        .env("LIEQR_SEED", "42")
        .output()
        .unwrap();
    assert!(out.status.success());
    let r: Report = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r.seed, 42);
}

#[test]
fn report_replays_from_embedded_config() {
    let (_, first) = report(&["product", "--spec", "A1,A1", "--threads", "2"]);
    let mut replay = first.config.clone();
    replay.json = None;
    replay.threads = Some(3);
    let second = lieqr::cli::run(&replay, &mut std::io::sink()).unwrap();
    assert_eq!(first.verdict, second.verdict);
    assert_eq!(first.prime, second.prime);
    assert_eq!(first.candidate_null, second.candidate_null);
    assert_eq!(first.samples, second.samples);
}

#[test]
fn identical_runs_give_identical_reports() {
    let blank = |mut r: Report| {
        r.elapsed_ms = 0;
        r.config.json = None;
        r.config.threads = None;
        serde_json::to_string(&r).unwrap()
    };
    for args in [
        &["quadind", "--series", "A", "--rank", "3"][..],
        &["quadind", "--fixture", "circle", "--mode", "exact"][..],
        &["prove", "--series", "A", "--rank", "3"][..],
    ] {
        let runs: Vec<String> = ["1", "4"]
            .iter()
            .map(|t| {
                let mut a = args.to_vec();
                a.extend(["--threads", t]);
                blank(report(&a).1)
            })
            .collect();
        assert_eq!(runs[0], runs[1], "{args:?}");
    }
}

#[test]
fn trace_and_export_files() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("prove.txt");
    let (code, _, _) = lieqr(&["prove", "--series", "A", "--rank", "2", "--trace", trace.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let text = std::fs::read_to_string(&trace).unwrap();
    assert!(text.contains("c(H2,H2) = 2*c(E2,F2)"));

    let cqg = dir.path().join("cqg.txt");
    let (code, out, _) = lieqr(&["cqg", "--n", "2", "--trace", cqg.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("rel(1,2,1,2): r2 - r6 = 2*[Q_11,Q_22]"));
    assert!(std::fs::read_to_string(&cqg).unwrap().starts_with("# "));

    let sc = dir.path().join("sc.txt");
    let (code, _, _) =
        lieqr(&["build", "--series", "A", "--rank", "2", "--emit-structure-constants", sc.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(!std::fs::read_to_string(&sc).unwrap().is_empty());
}
