//! Acceptance criteria 1-9, run through the shipped binary.
//!
//! `selftest full` runs twice: the first report gives the verdicts of
//! criteria 1-8, its stderr gives the runtimes, and the byte comparison of
//! the two reports is criterion 9. Runs without the test harness so the
//! verdict lines always reach the output.

use std::collections::BTreeMap;
use std::process::Command;

const TITLES: [&str; 9] = [
    "shear modulus table",
    "shear modulus coefficient",
    "long-wavelength and large-q limits",
    "closed forms against brute-force integrals",
    "support of Im f_x",
    "Lindhard suite",
    "kernel and dielectric sweeps",
    "TD-LHF suite",
    "deterministic selftest report",
];

/// Wall-clock bounds in seconds.
const RUNTIME: [(u8, f64); 4] = [(1, 1.0), (3, 60.0), (4, 300.0), (8, 120.0)];

struct Run {
    report: Vec<u8>,
    seconds: BTreeMap<u8, f64>,
}

fn selftest_full(dir: &std::path::Path, name: &str) -> Run {
    let path = dir.join(name);
    let out = Command::new(env!("CARGO_BIN_EXE_tdlhf"))
        .args(["selftest", "full", "--out"])
        .arg(&path)
        .output()
        .expect("binary runs");
    let stderr = String::from_utf8_lossy(&out.stderr);
    let seconds = stderr
        .lines()
        .filter_map(|l| {
            let rest = l.strip_prefix("timing criterion=")?;
            let (id, secs) = rest.split_once(" seconds=")?;
            Some((id.parse().ok()?, secs.parse().ok()?))
        })
        .collect();
    Run { report: std::fs::read(&path).unwrap_or_default(), seconds }
}

fn verdicts(report: &[u8]) -> BTreeMap<u8, bool> {
    String::from_utf8_lossy(report)
        .lines()
        .filter_map(|l| {
            let rest = l.strip_prefix("criterion ")?;
            let (id, tail) = rest.split_once(' ')?;
            Some((id.parse().ok()?, tail.starts_with("PASS")))
        })
        .collect()
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let first = selftest_full(dir.path(), "first.txt");
    let second = selftest_full(dir.path(), "second.txt");
    let verdict = verdicts(&first.report);

    let mut failed = Vec::new();
    for id in 1..=9u8 {
        let (ok, note) = if id == 9 {
            let same = !first.report.is_empty() && first.report == second.report;
            (same, format!("{} bytes", first.report.len()))
        } else {
            let passed = verdict.get(&id).copied().unwrap_or(false);
            let secs = first.seconds.get(&id).copied().unwrap_or(f64::NAN);
            let in_time = RUNTIME.iter().find(|(i, _)| *i == id).is_none_or(|(_, limit)| secs < *limit);
            (passed && in_time, format!("{secs:.2} s"))
        };
        println!("criterion {id}: {} {} ({note})", if ok { "PASS" } else { "FAIL" }, TITLES[id as usize - 1]);
        if !ok {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        println!("{}", String::from_utf8_lossy(&first.report));
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
