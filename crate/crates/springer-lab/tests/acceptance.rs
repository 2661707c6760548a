//! Runs every acceptance criterion and prints one PASS/FAIL line each.
//!
//! Two criteria fail on exact computation. Each is matched against the
//! precise observed counterexample: the target exits zero only if all other
//! criteria pass and each known failure reproduces exactly.

use std::process::ExitCode;

use serde_json::{json, Value};
use springer_lab::suite::{run_suite, CheckRecord, CheckStatus, SuiteName, SuiteOptions};

const CRITERIA: [(u8, &str); 10] = [
    (1, "fixed-point groups and Lie algebras of the involution"),
    (2, "nilpotent orbit counts on sp_2n"),
    (3, "(λ, ε) is a complete orbit invariant"),
    (4, "infinite family of non-conjugate regular elements"),
    (5, "pair labels classify nilpotent pairs"),
    (6, "Weyl group combinatorics"),
    (7, "open stratum dimensions"),
    (8, "Borel conjugation into t ⊕ n_s and D_k"),
    (9, "fiber point counts"),
    (10, "unique stabilizing subspace"),
];

struct KnownFailure {
    criterion: u8,
    check: &'static str,
    reproduces: fn(&CheckRecord) -> bool,
    summary: &'static str,
}

const KNOWN: [KnownFailure; 2] = [
    KnownFailure {
        criterion: 3,
        check: "fingerprint.lambda-eps.n3-q2",
        reproduces: lambda_eps_merge,
        summary: "two (3,3) orbits of Sp_6(F_2), sizes 3780 and 11340, share ε = 000",
    },
    KnownFailure {
        criterion: 9,
        check: "fibers.generic-leading-coefficient",
        reproduces: leading_mismatch,
        summary: "stratum ((1),(1),∅) has leading coefficient 1, dim ρ̂ = 2",
    },
];

fn lambda_eps_merge(c: &CheckRecord) -> bool {
    c.actual["values"] == json!(9)
        && c.expected["values"] == json!(10)
        && c.actual["orbit_constant"] == json!(true)
        && c.actual["merged"] == json!([{"fingerprint": "(3,3):000", "orbit_sizes": [3780, 11340]}])
}

fn leading_mismatch(c: &CheckRecord) -> bool {
    c.actual["mismatches"]
        == json!([{"stratum": "((1), (1), ∅)", "leading": "1", "dim_rho_hat": 2}])
}

fn main() -> ExitCode {
    let report = run_suite(SuiteName::All, &SuiteOptions::default());
    let mut ok = true;
    for (criterion, title) in CRITERIA {
        let checks: Vec<&CheckRecord> = report.for_criterion(criterion).collect();
        let failed: Vec<&CheckRecord> = checks
            .iter()
            .copied()
            .filter(|c| c.status != CheckStatus::Pass)
            .collect();
        let ms: u64 = checks.iter().map(|c| c.runtime_ms).sum();
        if checks.is_empty() {
            println!("FAIL criterion {criterion:>2}: {title} (no checks registered)");
            ok = false;
            continue;
        }
        if failed.is_empty() {
            println!(
                "PASS criterion {criterion:>2}: {title} ({} checks, {ms} ms)",
                checks.len()
            );
            continue;
        }
        println!(
            "FAIL criterion {criterion:>2}: {title} ({}/{} checks failed, {ms} ms)",
            failed.len(),
            checks.len()
        );
        for c in &failed {
            let known = KNOWN
                .iter()
                .find(|k| k.criterion == criterion && k.check == c.id);
            match known {
                Some(k) if (k.reproduces)(c) => {
                    println!("    known: {} ({})", c.id, k.summary);
                }
                _ => {
                    ok = false;
                    println!("    unexpected: {}", c.id);
                    println!("      expected: {}", compact(&c.expected));
                    println!("      actual:   {}", compact(&c.actual));
                }
            }
        }
    }
    for k in &KNOWN {
        let still_fails = report
            .check(k.check)
            .is_some_and(|c| c.status == CheckStatus::Fail && (k.reproduces)(c));
        if !still_fails {
            ok = false;
            println!("known failure no longer reproduces: {}", k.check);
        }
    }
    let extra: Vec<&CheckRecord> = report
        .checks
        .iter()
        .filter(|c| c.criterion.is_none())
        .collect();
    let extra_failed: Vec<&str> = extra
        .iter()
        .filter(|c| c.status != CheckStatus::Pass)
        .map(|c| c.id.as_str())
        .collect();
    if extra_failed.is_empty() {
        println!("PASS invariants: {} supporting checks", extra.len());
    } else {
        ok = false;
        println!("FAIL invariants: {}", extra_failed.join(", "));
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn compact(v: &Value) -> String {
    let s = v.to_string();
    match s.char_indices().nth(400) {
        Some((cut, _)) => format!("{}…", &s[..cut]),
        None => s,
    }
}
