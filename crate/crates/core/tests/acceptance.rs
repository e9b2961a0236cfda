//! The acceptance suite as an integration test target: one test per
//! criterion, each printing its pass/fail line. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.
//!
//! `NILSPACE_ACCEPTANCE=quick` trims the sweep budgets (the default is the
//! full budgets).

use nilspace_core::verify::{run, CheckResult, Level};
use std::sync::OnceLock;

fn results() -> &'static Vec<CheckResult> {
    static RESULTS: OnceLock<Vec<CheckResult>> = OnceLock::new();
    RESULTS.get_or_init(|| {
        let level = match std::env::var("NILSPACE_ACCEPTANCE").as_deref() {
            Ok("quick") => Level::Quick,
            _ => Level::Full,
        };
        let seed = std::env::var("NILSPACE_SEED")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(42);
        run(level, seed, None)
    })
}

fn assert_criterion(id: u32) {
    let r = results()
        .iter()
        .find(|r| r.id == id)
        .expect("criterion present");
    println!("{}", r.line());
    assert!(r.passed, "{}", r.line());
}

#[test]
fn criterion_01_quotient_worked_examples() {
    assert_criterion(1);
}

#[test]
fn criterion_02_periodic_map_calculus() {
    assert_criterion(2);
}

#[test]
fn criterion_03_cube_counting() {
    assert_criterion(3);
}

#[test]
fn criterion_04_corner_completion() {
    assert_criterion(4);
}

#[test]
fn criterion_05_homogeneity_equivalence() {
    assert_criterion(5);
}

#[test]
fn criterion_06_hom_pn_inclusion() {
    assert_criterion(6);
}

#[test]
fn criterion_07_cyclic_classification() {
    assert_criterion(7);
}

#[test]
fn criterion_08_splitting_witness() {
    assert_criterion(8);
}

#[test]
fn criterion_09_gowers_suite() {
    assert_criterion(9);
}

#[test]
fn criterion_10_inverse_search() {
    assert_criterion(10);
}

#[test]
fn criterion_11_balance() {
    assert_criterion(11);
}

#[test]
fn criterion_12_gvn_average() {
    assert_criterion(12);
}

#[test]
fn criterion_13_rank_one() {
    assert_criterion(13);
}
