//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use dislocation_core::verify::{self, CheckRecord, Status, VerifyOptions};
use serde_json::Value;

type Criterion = fn(&VerifyOptions) -> Vec<CheckRecord>;

const LIBRARY: [(u8, &str, Criterion, f64); 9] = [
    (1, "recurrence vs ODE residual", verify::criterion_1, 5.0),
    (2, "change-of-variable identity", verify::criterion_2, 2.0),
    (3, "separation of the 3D operator", verify::criterion_3, 2.0),
    (4, "truncation self-consistency", verify::criterion_4, 5.0),
    (5, "closed-form audit (n = 1)", verify::criterion_5, 3.0),
    (6, "flux periodicity", verify::criterion_6, 1.0),
    (7, "flat-limit oracle", verify::criterion_7, 15.0),
    (8, "oracle monotonicity in gamma", verify::criterion_8, 10.0),
    (9, "rotation affinity", verify::criterion_9, 1.0),
];

fn line(id: u8, name: &str, ok: bool, detail: &str) {
    println!("criterion {id:>2} {:<34} {} {detail}", name, if ok { "PASS" } else { "FAIL" });
}

fn run_binary(fast: bool) -> (bool, Duration, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dislocation"));
    cmd.arg("verify");
    if fast {
        cmd.arg("--fast");
    }
    let t = Instant::now();
    let out = cmd.output().expect("binary runs");
    let elapsed = t.elapsed();
    let text = String::from_utf8_lossy(&out.stdout);
    let overall = text
        .find("\n{")
        .and_then(|i| serde_json::from_str::<Value>(&text[i + 1..]).ok())
        .and_then(|v| v["overall"].as_str().map(str::to_string))
        .unwrap_or_else(|| "unparsed".into());
    (out.status.success() && overall == "PASS", elapsed, overall)
}

fn main() -> ExitCode {
    let opts = VerifyOptions::default();
    let mut all = true;
    for (id, name, run, budget) in LIBRARY {
        let t = Instant::now();
        let records = run(&opts);
        let elapsed = t.elapsed().as_secs_f64();
        let failed: Vec<&CheckRecord> = records.iter().filter(|r| r.status == Status::Fail).collect();
        let documented = records.iter().filter(|r| r.status == Status::DiscrepantDocumented).count();
        let ok = !records.is_empty() && failed.is_empty() && elapsed < budget;
        let mut detail = format!("[{} checks, {elapsed:.2}s/{budget}s", records.len());
        if documented > 0 {
            detail += &format!(", {documented} discrepant-documented");
        }
        detail.push(']');
        for r in &failed {
            detail += &format!(" {}: measured {:.3e} tol {:.1e} ({})", r.name, r.measured, r.tolerance, r.detail);
        }
        line(id, name, ok, &detail);
        all &= ok;
    }

    let (full_ok, full_t, full_overall) = run_binary(false);
    let (fast_ok, fast_t, fast_overall) = run_binary(true);
    let ok = full_ok && fast_ok && full_t.as_secs_f64() < 60.0 && fast_t.as_secs_f64() < 15.0;
    line(
        10,
        "end-to-end verify",
        ok,
        &format!(
            "[verify {full_overall} {:.2}s/60s, verify --fast {fast_overall} {:.2}s/15s]",
            full_t.as_secs_f64(),
            fast_t.as_secs_f64()
        ),
    );
    all &= ok;

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
