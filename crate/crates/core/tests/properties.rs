mod common;

#[test]
fn linear_min_distance_matches_pairwise() {
    common::linear_min_distance_matches_pairwise();
}

#[test]
fn parity_extension_and_puncturing() {
    common::parity_extension_and_puncturing();
}

#[test]
fn extend_then_puncture_round_trip() {
    common::extend_then_puncture_round_trip();
}

#[test]
fn unit_solutions_check_out() {
    common::unit_solutions_check_out();
}

#[test]
fn word_order_matches_integers() {
    common::word_order_matches_integers();
}

#[test]
fn supersets_of_recovery_sets_recover() {
    common::supersets_of_recovery_sets_recover();
}

#[test]
fn disjoint_families_validate() {
    common::disjoint_families_validate();
}

#[test]
fn explicit_recovery_matches_definition() {
    common::explicit_recovery_matches_definition();
}

#[test]
fn explicit_decoders_reproduce_bits() {
    common::explicit_decoders_reproduce_bits();
}

#[test]
fn batch_implies_pir() {
    common::batch_implies_pir();
}

#[test]
fn pir_codes_respect_distance_bound() {
    common::pir_codes_respect_distance_bound();
}

#[test]
fn linear_and_explicit_agree_on_all_subsets() {
    common::linear_and_explicit_agree_on_all_subsets();
}

#[test]
fn canonical_form_is_a_class_invariant() {
    common::canonical_form_is_a_class_invariant();
}

#[test]
fn complement_preserves_agreement() {
    common::complement_preserves_agreement();
}

#[test]
fn checkpoint_resume_is_deterministic() {
    common::checkpoint_resume_is_deterministic();
}

#[test]
fn constructor_packings_are_valid() {
    common::constructor_packings_are_valid();
}

#[test]
fn constructed_families_validate() {
    common::constructed_families_validate();
}

#[test]
fn hamming_invariants() {
    common::hamming_invariants();
}

#[test]
fn encoder_existence_matches_brute_force_on_four_word_codes() {
    common::encoder_existence_matches_brute_force_on_four_word_codes();
}
