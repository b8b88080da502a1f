//! Acceptance suite: one test per criterion, each printing a PASS line.
//! Every check is exact equality over F_p or exact rational arithmetic;
//! the timed criteria enforce their wall-clock budgets.

use std::time::{Duration, Instant};

use folcalc_core::corpus::{corpus_passed, run_case, run_corpus};

fn criterion(n: usize, name: &str, case_ids: &[&str], budget: Option<Duration>) {
    let start = Instant::now();
    for id in case_ids {
        match run_case(id) {
            Some(Ok(())) => {}
            Some(Err(msg)) => panic!("criterion {n} ({name}) failed in `{id}`: {msg}"),
            None => panic!("criterion {n} ({name}): unknown case `{id}`"),
        }
    }
    let elapsed = start.elapsed();
    if let Some(budget) = budget {
        assert!(
            elapsed <= budget,
            "criterion {n} ({name}) exceeded its budget: {elapsed:?} > {budget:?}"
        );
    }
    println!("acceptance criterion {n} ({name}): PASS [{} ms]", elapsed.as_millis());
}

#[test]
fn criterion_01_toric_constants_oracle() {
    criterion(
        1,
        "toric constants vs brute force",
        &["toric_kernel_oracle"],
        Some(Duration::from_secs(5)),
    );
}

#[test]
fn criterion_02_additive_constants_and_presentation() {
    criterion(
        2,
        "additive field: constants, certification, presentation",
        &["frobenius_power_constants"],
        None,
    );
}

#[test]
fn criterion_03_fedder_surface_consistency() {
    criterion(
        3,
        "F-purity matches the lc verdict on surface quotients",
        &["fedder_surface_consistency"],
        None,
    );
}

#[test]
fn criterion_04_blowup_lift_and_iteration() {
    criterion(
        4,
        "blow-up weight shift, saturation data and iteration length",
        &["weight_shift_lifts", "toric_iteration"],
        None,
    );
}

#[test]
fn criterion_05_lc_equals_multiplicative() {
    criterion(
        5,
        "lc verdict coincides with pointwise multiplicativity (200+ samples per prime)",
        &["multiplicative_agreement"],
        None,
    );
}

#[test]
fn criterion_06_nonlc_certificates() {
    criterion(
        6,
        "constructive non-lc certificates with discrepancy bounds",
        &["nonlc_certificates"],
        None,
    );
}

#[test]
fn criterion_07_identity_suites() {
    criterion(
        7,
        "scaling and commuting-sum identities (500 samples per prime)",
        &["scaling_identity_suite", "commuting_sum_suite"],
        Some(Duration::from_secs(10)),
    );
}

#[test]
fn criterion_08_ledger_algebra() {
    criterion(
        8,
        "divisor ledger pushforward/pullback and adjunction residual",
        &["roundtrip_and_residual"],
        None,
    );
}

#[test]
fn criterion_09_transfer_table() {
    criterion(
        9,
        "discrepancy transfer table (10^4 samples per cell)",
        &["transfer_table_audit"],
        Some(Duration::from_secs(10)),
    );
}

#[test]
fn criterion_10_families() {
    criterion(
        10,
        "family lifts, non-liftability proof and multiplicative commutation",
        &[
            "lift_witness",
            "noncommutativity_obstruction",
            "multiplicative_commutes",
        ],
        None,
    );
}

#[test]
fn criterion_11_annihilators() {
    criterion(
        11,
        "annihilator foliations and the surface classifier",
        &["annihilator_outputs", "annihilator_surface_agreement"],
        None,
    );
}

#[test]
fn criterion_12_full_corpus() {
    let start = Instant::now();
    let outcomes = run_corpus(None);
    let elapsed = start.elapsed();
    for o in outcomes.iter().filter(|o| !o.passed) {
        eprintln!("corpus failure {}/{}: {}", o.group, o.id, o.detail);
    }
    assert!(corpus_passed(&outcomes), "corpus has failures");
    assert!(
        elapsed <= Duration::from_secs(60),
        "corpus exceeded 60 s: {elapsed:?}"
    );
    println!(
        "acceptance criterion 12 (full corpus, {} cases): PASS [{} ms]",
        outcomes.len(),
        elapsed.as_millis()
    );
}
