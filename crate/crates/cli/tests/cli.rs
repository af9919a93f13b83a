use std::io::Write;
use std::process::{Command, Output};

use qnr_cli::cli::TraceReport;
use qnr_cli::io::read_amplitudes_csv;
use qnr_cli::report::{Envelope, GroverDemoReport, SampleReport, SetSampleReport};
use qnr_core::number_theory::qnr_set_bruteforce;
use qnr_core::qnr::{SamplePath, VerificationReport};
use serde::de::DeserializeOwned;
use serde::Serialize;

fn qnr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qnr"))
        .args(args)
        .env_remove("QNR_MAX_QUBITS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// Parses a JSON line and checks it re-serializes to the same bytes.
fn round_trip<T: Serialize + DeserializeOwned>(line: &str) -> Envelope<T> {
    let parsed: Envelope<T> = serde_json::from_str(line).unwrap();
    assert_eq!(parsed.schema, 1);
    assert_eq!(serde_json::to_string(&parsed).unwrap(), line);
    parsed
}

#[test]
fn sample_41() {
    let out = qnr(&["sample", "--prime", "41", "--seed", "7", "--count", "1000"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let r = round_trip::<SampleReport>(text.trim_end()).report;
    assert_eq!(r.path, SamplePath::Quantum);
    assert_eq!(r.samples.len(), 1000);
    let oracle = qnr_set_bruteforce(41);
    assert!(r.samples.iter().all(|a| oracle.contains(a)));
    assert_eq!(r.frequencies.len(), 20);
    assert_eq!(r.chi_square.unwrap().degrees_of_freedom, 19);

    let again = qnr(&["sample", "--prime", "41", "--seed", "7", "--count", "1000"]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn sample_classical_and_errors() {
    let out = qnr(&["sample", "--prime", "7", "--seed", "1", "--count", "3"]);
    let r = round_trip::<SampleReport>(stdout(&out).trim_end()).report;
    assert_eq!((r.samples, r.path), (vec![6, 6, 6], SamplePath::Classical));

    let out = qnr(&["sample", "--prime", "15", "--seed", "1", "--count", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("error[NOT_PRIME]"));

    let out = qnr(&["sample", "--prime", "41", "--count", "3"]);
    assert_eq!(out.status.code(), Some(2), "seed is required");

    let out = qnr(&[
        "sample",
        "--prime",
        "41",
        "--seed",
        "1",
        "--max-qubits",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("error[RESOURCE_CAP]"));
}

#[test]
fn cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_qnr"))
        .args(["sample", "--prime", "41", "--seed", "1"])
        .env("QNR_MAX_QUBITS", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_qnr"))
        .args(["sample", "--prime", "41", "--seed", "1"])
        .env("QNR_MAX_QUBITS", "31")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("error[INVALID_INPUT]"));
}

#[test]
fn verify_single_and_classical() {
    let out = qnr(&["verify", "--prime", "41"]);
    assert!(out.status.success());
    let r = round_trip::<VerificationReport>(stdout(&out).trim_end()).report;
    assert!(r.passed);
    assert!(r.max_deviation.unwrap() < 1e-10);

    let out = qnr(&["verify", "--prime", "43"]);
    assert!(out.status.success());
    let r = round_trip::<VerificationReport>(stdout(&out).trim_end()).report;
    assert_eq!(r.path, SamplePath::Classical);
    assert!(r.max_deviation.is_none());
}

#[test]
fn verify_failure_exit_code() {
    // an absurdly tight tolerance makes the amplitude checks fail
    let out = qnr(&["verify", "--prime", "41", "--tolerance", "1e-40"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("error[VERIFICATION_FAILED]"));
    let r = round_trip::<VerificationReport>(stdout(&out).trim_end()).report;
    assert!(!r.passed);
}

#[test]
fn verify_sweep_is_ordered() {
    let out = qnr(&["verify", "--sweep-max", "4096"]);
    assert!(out.status.success());
    let ps: Vec<u64> = stdout(&out)
        .lines()
        .map(|l| {
            let r = round_trip::<VerificationReport>(l).report;
            assert!(r.passed, "{}", r.p);
            r.p
        })
        .collect();
    assert_eq!(ps.len(), 133);
    assert!(ps.windows(2).all(|w| w[0] < w[1]));
    assert!(ps.iter().all(|p| p % 8 == 1));
}

#[test]
fn trace_stages() {
    let out = qnr(&["trace", "--prime", "41", "--stage", "rotated"]);
    let rows = read_amplitudes_csv(out.stdout.as_slice()).unwrap();
    let oracle = qnr_set_bruteforce(41);
    assert_eq!(rows.len(), 64);
    for r in &rows {
        if oracle.contains(&(r.index as u64)) {
            let imag = if r.index % 2 == 0 { 0.1 } else { -0.1 };
            assert!((r.real + 0.075).abs() < 1e-12 && (r.imag - imag).abs() < 1e-12);
        } else {
            assert_eq!((r.real, r.imag), (0.125, 0.0));
        }
    }

    let out = qnr(&["trace", "--prime", "41", "--stage", "initial"]);
    let rows = read_amplitudes_csv(out.stdout.as_slice()).unwrap();
    assert!(rows.iter().all(|r| r.prob == 1.0 / 64.0));

    let out = qnr(&["trace", "--prime", "41", "--stage", "final"]);
    let rows = read_amplitudes_csv(out.stdout.as_slice()).unwrap();
    let live: Vec<_> = rows.iter().filter(|r| r.prob > 1e-12).collect();
    assert_eq!(live.len(), 20);
    assert!(live.iter().all(|r| (r.prob - 0.05).abs() < 1e-12));

    let out = qnr(&[
        "trace", "--prime", "41", "--stage", "final", "--format", "json",
    ]);
    let r = round_trip::<TraceReport>(stdout(&out).trim_end()).report;
    assert_eq!(r.rows, rows);

    let out = qnr(&["trace", "--prime", "13", "--stage", "final"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn grover_demo() {
    let out = qnr(&["grover-demo", "--bits", "2", "--target", "2"]);
    let r = round_trip::<GroverDemoReport>(stdout(&out).trim_end()).report;
    assert_eq!(r.iterations.len(), 2);
    assert!((r.success_probability - 1.0).abs() < 1e-12);

    let out = qnr(&[
        "grover-demo",
        "--bits",
        "8",
        "--target",
        "100",
        "--deterministic",
        "--seed",
        "3",
    ]);
    let r = round_trip::<GroverDemoReport>(stdout(&out).trim_end()).report;
    assert!((r.success_probability - 1.0).abs() < 1e-9);
    assert_eq!(r.outcome, Some(100));

    let out = qnr(&["grover-demo", "--bits", "2", "--target", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("error[INVALID_INPUT]"));
}

#[test]
fn sample_set_sources() {
    let out = qnr(&[
        "sample-set",
        "--size",
        "8",
        "--indicator",
        "cubic-nr",
        "--prime",
        "13",
        "--seed",
        "4",
        "--count",
        "500",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let r = round_trip::<SetSampleReport>(stdout(&out).trim_end()).report;
    let values: Vec<u64> = r.frequencies.iter().map(|f| f.value).collect();
    assert_eq!(values, vec![2, 3, 4, 6, 7, 9, 10, 11]);
    assert_eq!(r.pre_iterations, 0);

    let out = qnr(&[
        "sample-set",
        "--size",
        "20",
        "--indicator",
        "qnr",
        "--prime",
        "41",
        "--seed",
        "4",
        "--count",
        "50",
    ]);
    let r = round_trip::<SetSampleReport>(stdout(&out).trim_end()).report;
    let oracle = qnr_set_bruteforce(41);
    assert!(r.samples.iter().all(|s| oracle.contains(s)));

    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "5\n# one marked state\n").unwrap();
    let path = file.path().to_str().unwrap();
    let out = qnr(&[
        "sample-set",
        "--size",
        "1",
        "--marked-file",
        path,
        "--bits",
        "6",
        "--seed",
        "1",
        "--count",
        "10",
    ]);
    let r = round_trip::<SetSampleReport>(stdout(&out).trim_end()).report;
    assert_eq!(r.samples, vec![5; 10]);
    assert!(r.pre_iterations > 0);

    let out = qnr(&[
        "sample-set",
        "--size",
        "2",
        "--marked-file",
        path,
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2), "declared size must match");

    let out = qnr(&[
        "sample-set",
        "--size",
        "8",
        "--indicator",
        "cubic-nr",
        "--prime",
        "11",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2), "3 does not divide 10");
}

#[test]
fn text_and_csv_formats() {
    let out = qnr(&["verify", "--prime", "43", "--format", "text"]);
    assert!(stdout(&out).contains("classical path"));
    let out = qnr(&[
        "sample", "--prime", "41", "--seed", "2", "--count", "5", "--format", "csv",
    ]);
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("draw,value"));
    assert_eq!(text.lines().count(), 6);
}
