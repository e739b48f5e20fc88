//! Acceptance run: one PASS/FAIL line per criterion. Always exits 0 so that a
//! failing criterion is reported rather than hidden behind a test failure.
//!
//! With `CATTFORGE_ACCEPTANCE_CORE=1` only criteria 1-5 run, with output that
//! contains no timings; criterion 8 compares two such runs byte for byte.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use cattforge::cli::{size_report, SizeCell, SizeReport, SIZE_COLUMNS};
use common::golden::{self, Item};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

const CORE_ENV: &str = "CATTFORGE_ACCEPTANCE_CORE";

/// Budget, in newly created nodes, for each dimension-5 cell. A fresh process
/// needs about 9.3k nodes for eh_{3,2}, 22.7k for eh_{3,1} and at least 29k
/// for every other column, so this sits between eh_{3,1} and eh_{2,1}.
const N5_BUDGET: usize = 25_000;

/// Published character counts by row, in `SIZE_COLUMNS` order.
const REFERENCE: [(usize, [Option<u64>; 6]); 4] = [
    (2, [Some(5_340), None, None, None, None, None]),
    (3, [Some(67_208), Some(6_993), None, Some(44_209), None, None]),
    (4, [Some(5_339_606), Some(116_343), Some(8_152), Some(3_117_243), Some(73_981), Some(2_615_998)]),
    (5, [None, None, Some(178_592), None, Some(6_176_548), None]),
];

/// Cells that the published table reports as overflowing in dimension 5.
const REFERENCE_OVERFLOW_N5: [(usize, usize); 4] = [(1, 0), (2, 1), (2, 0), (3, 0)];

struct Line {
    pass: bool,
    detail: String,
    extra: Vec<String>,
}

fn summarize(items: &[Item]) -> (bool, String, Vec<String>) {
    let failed: Vec<String> =
        items.iter().filter_map(|(label, r)| r.as_ref().err().map(|e| format!("{label}: {e}"))).collect();
    let ok = items.len() - failed.len();
    (failed.is_empty(), format!("{ok}/{} checked", items.len()), failed)
}

fn criterion_1() -> Line {
    let start = Instant::now();
    let items = golden::kernel_golden();
    let fast = start.elapsed() < Duration::from_secs(1);
    let (pass, detail, mut extra) = summarize(&items);
    if !fast {
        extra.push("took longer than 1s".into());
    }
    Line { pass: pass && fast, detail: format!("{detail}, under 1s: {fast}"), extra }
}

enum Attempt {
    Checked,
    Overflow,
    Failed(String),
}

/// Runs the binary in a fresh process so that no cached subterm is shared with
/// this one and the budget measures the whole construction.
fn attempt_n5(k: usize, l: usize) -> Attempt {
    let out = Command::new(env!("CARGO_BIN_EXE_cattforge"))
        .args(["gen", "H", "5", &k.to_string(), &l.to_string(), "--budget", &N5_BUDGET.to_string()])
        .output();
    match out {
        Err(e) => Attempt::Failed(e.to_string()),
        Ok(o) if o.status.success() => Attempt::Checked,
        Ok(o) => {
            let msg = String::from_utf8_lossy(&o.stderr).trim().to_string();
            if msg.contains("budget") {
                Attempt::Overflow
            } else {
                Attempt::Failed(msg)
            }
        }
    }
}

fn criterion_2() -> Line {
    let items = golden::eh_cells(4);
    let (mut pass, detail, mut extra) = summarize(&items);
    let mut cells = Vec::new();
    let mut agree = 0;
    for (k, l) in SIZE_COLUMNS {
        let expect_overflow = REFERENCE_OVERFLOW_N5.contains(&(k, l));
        let word = match attempt_n5(k, l) {
            Attempt::Checked => {
                agree += usize::from(!expect_overflow);
                "checked".to_string()
            }
            Attempt::Overflow => {
                agree += usize::from(expect_overflow);
                // Overflow is only acceptable where the published run overflowed too.
                pass &= expect_overflow;
                "overflow".to_string()
            }
            Attempt::Failed(e) => {
                pass = false;
                extra.push(format!("eh(5,{k},{l}) failed: {e}"));
                "failed".to_string()
            }
        };
        cells.push(format!("eh_{k},{l}={word}"));
    }
    extra.push(format!("n=5 under a budget of {N5_BUDGET} new nodes: {}", cells.join(" ")));
    extra.push(format!(
        "n=5 outcome agrees with the published checked/overflow pattern in {agree}/6 cells \
         (the budget was chosen from measured costs, so this shows cost ordering only)"
    ));
    Line { pass, detail: format!("n<=4: {detail}"), extra }
}

fn criterion_3() -> Line {
    let (pass, detail, extra) = summarize(&golden::commutativity_cells());
    Line { pass, detail, extra }
}

fn criterion_4() -> Line {
    let (pass, detail, extra) = summarize(&golden::padded_cells());
    Line { pass, detail, extra }
}

fn criterion_5() -> Line {
    let (pass, detail, extra) = summarize(&golden::self_duality(4));
    Line { pass, detail: format!("{detail} paddings, all i and r"), extra }
}

fn criterion_6() -> Line {
    const CASES: u32 = 256;
    let mut pass = true;
    let mut extra = Vec::new();
    for (name, law) in common::LAWS {
        let config =
            Config { cases: CASES, max_global_rejects: 100_000, failure_persistence: None, ..Config::default() };
        let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
        match runner.run(&common::choices(), law) {
            Ok(()) => extra.push(format!("{name}: {CASES} cases")),
            Err(e) => {
                pass = false;
                extra.push(format!("{name}: {e}"));
            }
        }
    }
    Line { pass, detail: format!("{} laws, {CASES} accepted cases each", common::LAWS.len()), extra }
}

fn chars(report: &SizeReport, n: usize, k: usize, l: usize) -> Option<u64> {
    match report.get(n, k, l) {
        Some(SizeCell::Size(s)) => Some(s.chars as u64),
        _ => None,
    }
}

fn criterion_7() -> Line {
    let cells: Vec<(usize, usize, usize)> =
        (2..=5).flat_map(|n| SIZE_COLUMNS.iter().filter(move |(k, _)| *k < n).map(move |&(k, l)| (n, k, l))).collect();
    let report = size_report(&cells, None);
    let mut extra: Vec<String> = report.render().lines().map(String::from).collect();
    let (mut within, mut compared) = (0, 0);
    for (n, row) in REFERENCE {
        for (col, reference) in row.iter().enumerate() {
            let (k, l) = SIZE_COLUMNS[col];
            let (Some(reference), Some(ours)) = (reference, chars(&report, n, k, l)) else { continue };
            let ratio = ours as f64 / *reference as f64;
            let ok = (1.0 / 3.0..=3.0).contains(&ratio);
            compared += 1;
            within += usize::from(ok);
            extra.push(format!(
                "eh({n},{k},{l}): {ours} vs {reference}, ratio {ratio:.2}{}",
                if ok { "" } else { " (outside 3x)" }
            ));
        }
    }
    let mut monotone = true;
    for (k, l) in SIZE_COLUMNS {
        let column: Vec<u64> = (2..=5).filter_map(|n| chars(&report, n, k, l)).collect();
        monotone &= column.windows(2).all(|w| w[0] < w[1]);
    }
    let failed = report.entries.iter().any(|e| matches!(e.cell, SizeCell::Failed(_)));
    Line {
        pass: within == compared && monotone && !failed,
        detail: format!("{within}/{compared} published cells within 3x, columns monotone: {monotone}"),
        extra,
    }
}

fn core_lines() -> Vec<(usize, &'static str, Line)> {
    vec![
        (1, "kernel golden suite", criterion_1()),
        (2, "eh(n,k,l) at its stated type", criterion_2()),
        (3, "EH(n,k,l) commutativity", criterion_3()),
        (4, "padded eh(3,p,k,l)", criterion_4()),
        (5, "self-duality of unbiased paddings", criterion_5()),
    ]
}

fn render(n: usize, title: &str, line: &Line) -> String {
    let mut s = format!("criterion {n} [{title}]: {} ({})\n", if line.pass { "PASS" } else { "FAIL" }, line.detail);
    for e in &line.extra {
        s.push_str("    ");
        s.push_str(e);
        s.push('\n');
    }
    s
}

fn core_run_in_child() -> Result<String, String> {
    let exe = std::env::current_exe().map_err(|e| e.to_string())?;
    let out = Command::new(exe).env(CORE_ENV, "1").output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("child exited with {}", out.status));
    }
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

fn criterion_8() -> Line {
    match (core_run_in_child(), core_run_in_child()) {
        (Ok(a), Ok(b)) => {
            let same = a == b;
            Line {
                pass: same,
                detail: format!("two fresh runs of criteria 1-5, {} bytes, identical: {same}", a.len()),
                extra: Vec::new(),
            }
        }
        (Err(e), _) | (_, Err(e)) => Line { pass: false, detail: e, extra: Vec::new() },
    }
}

fn main() {
    if std::env::var_os(CORE_ENV).is_some() {
        for (n, title, line) in core_lines() {
            print!("{}", render(n, title, &line));
        }
        return;
    }
    let start = Instant::now();
    let mut lines = core_lines();
    lines.push((6, "meta-operation laws", criterion_6()));
    lines.push((7, "size table", criterion_7()));
    lines.push((8, "determinism", criterion_8()));
    let passed = lines.iter().filter(|(_, _, l)| l.pass).count();
    for (n, title, line) in &lines {
        print!("{}", render(*n, title, line));
    }
    println!("acceptance: {passed}/{} criteria pass ({:.1}s)", lines.len(), start.elapsed().as_secs_f64());
}
