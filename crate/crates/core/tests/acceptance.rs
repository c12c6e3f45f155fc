use landauer_core::verify::{self, CriterionReport, DEFAULT_SEED};

fn check(report: CriterionReport) {
    println!("{report}");
    assert!(report.passed, "{report}");
}

#[test]
fn criterion_01_budget_equality() {
    check(verify::criterion_1(DEFAULT_SEED));
}

#[test]
fn criterion_02_generalized_landauer_inequality() {
    check(verify::criterion_2(DEFAULT_SEED));
}

#[test]
fn criterion_03_standard_budget_reduction() {
    check(verify::criterion_3(DEFAULT_SEED));
}

#[test]
fn criterion_04_gibbs_conjugation() {
    check(verify::criterion_4(DEFAULT_SEED));
}

#[test]
fn criterion_05_positivity_identity() {
    check(verify::criterion_5());
}

#[test]
fn criterion_06_perturbative_positivity() {
    check(verify::criterion_6(DEFAULT_SEED));
}

#[test]
fn criterion_07_factorized_vs_bruteforce() {
    check(verify::criterion_7(DEFAULT_SEED));
}

#[test]
fn criterion_08_oracle_scaling() {
    check(verify::criterion_8());
}

#[test]
fn criterion_09_exact_state_equality() {
    check(verify::criterion_9());
}

#[test]
fn criterion_10_translation_sensitivity() {
    check(verify::criterion_10());
}

#[test]
fn criterion_11_closed_form_quadrature() {
    check(verify::criterion_11(DEFAULT_SEED));
}
