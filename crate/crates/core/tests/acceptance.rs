//! One test per acceptance criterion. Every check prints a `[PASS]`/`[FAIL]`
//! line; run with `--nocapture` to see them. Tolerances live in
//! `qcomm::verify`.

use qcomm::verify::Battery;

fn criterion(c: u8) {
    let checks = Battery::default().run(c).expect("battery run");
    for check in &checks {
        println!("{check}");
    }
    let failed: Vec<String> = checks.iter().filter(|c| !c.passed).map(|c| c.to_string()).collect();
    assert!(!checks.is_empty(), "criterion {c} produced no checks");
    assert!(failed.is_empty(), "criterion {c} failed:\n{}", failed.join("\n"));
}

#[test]
fn c1_perfect_amplification() {
    criterion(1);
}

#[test]
fn c2_noisy_amplification() {
    criterion(2);
}

#[test]
fn c3_search_success() {
    criterion(3);
}

#[test]
fn c4_cost_scaling() {
    criterion(4);
}

#[test]
fn c5_counting() {
    criterion(5);
}

#[test]
fn c6_query_algorithm() {
    criterion(6);
}

#[test]
fn c7_lower_bounds() {
    criterion(7);
}

#[test]
fn c8_fault_injection() {
    criterion(8);
}
