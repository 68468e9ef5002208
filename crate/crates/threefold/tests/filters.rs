//! Tests for the admissibility filter: floor tables, violation labels, and
//! full verdicts on named baskets and printed profile windows.

use threefold::basket::{Basket, PluriProfile, WeightedBasket};
use threefold::filters::{
    check_profile, is_geometric_candidate, property_a, property_b, volume_floor, Floor,
    FloorProfile,
};
use threefold::rat;

fn b2a() -> WeightedBasket {
    let pairs = [(1, 2), (1, 2), (1, 2), (1, 2), (4, 9), (2, 5), (5, 13), (1, 3), (1, 3), (1, 3), (1, 4), (1, 4)];
    WeightedBasket::new(Basket::from_pairs(pairs).unwrap(), 0, 2)
}

#[test]
fn floor_values() {
    assert_eq!(volume_floor(10, FloorProfile::Classified), Floor::Bound(rat(3, 2750)));
    assert_eq!(volume_floor(14, FloorProfile::Classified), Floor::Bound(rat(1, 1680)));
    assert_eq!(volume_floor(18, FloorProfile::Classified), Floor::Bound(rat(1, 1170)));
    assert_eq!(volume_floor(16, FloorProfile::Classified), Floor::Impossible);
    assert_eq!(volume_floor(17, FloorProfile::Classified), Floor::Impossible);
    assert_eq!(volume_floor(4, FloorProfile::Generic), Floor::Bound(rat(1, 100)));
    assert_eq!(volume_floor(2, FloorProfile::Generic), Floor::Bound(rat(1, 18)));
    // outside the classified table the generic formula takes over
    assert_eq!(
        volume_floor(19, FloorProfile::Classified),
        Floor::Bound(rat(1, 19 * 20 * 20))
    );
}

#[test]
fn classified_floor_is_at_least_generic() {
    for m0 in 2..=18u32 {
        let c = volume_floor(m0, FloorProfile::Classified);
        let g = volume_floor(m0, FloorProfile::Generic);
        match (c, g) {
            (Floor::Impossible, _) => {}
            (Floor::Bound(c), Floor::Bound(g)) => {
                assert!(c >= g, "classified floor below generic at m0={m0}")
            }
            _ => unreachable!(),
        }
    }
}

#[test]
#[should_panic]
fn floor_rejects_small_index() {
    volume_floor(1, FloorProfile::Generic);
}

#[test]
fn property_b_labels() {
    // printed window P_12..P_24 with a negative entry at m = 15
    let prof = PluriProfile::from_window(
        rat(1, 2660),
        12,
        &[1, 0, 2, -1, 2, 1, 3, 2, 4, 3, 5, 4, 6],
    );
    assert_eq!(property_b(&prof), vec!["P_15=-1".to_string()]);
    let clean = PluriProfile::from_window(rat(1, 100), 12, &[0, 0, 1, 1, 2, 2, 3]);
    assert!(property_b(&clean).is_empty());
}

#[test]
fn property_a_labels() {
    // P_8 = 1 but P_16 = 0 < P_8 * P_8
    let prof = PluriProfile::from_window(rat(1, 100), 8, &[1, 1, 1, 1, 1, 1, 1, 1, 0]);
    assert!(property_a(&prof).contains(&"P_8P_8>P_16".to_string()));
    // pairs reaching beyond the window are skipped, not extrapolated
    let prof = PluriProfile::from_window(rat(1, 100), 12, &[1, 2]);
    assert!(property_a(&prof).is_empty());
}

#[test]
fn b2a_is_admissible() {
    let verdict = is_geometric_candidate(&b2a(), 24, FloorProfile::Classified).unwrap();
    assert!(verdict.admissible, "violations: {:?}", verdict.violations);
    // its volume sits exactly on the classified delta = 18 floor
    assert_eq!(b2a().volume(), rat(1, 1170));
}

#[test]
fn floor_violation_from_printed_profile() {
    // a printed window with delta = 14 and K^3 = 1/2660 < 1/1680
    let prof =
        PluriProfile::from_window(rat(1, 2660), 12, &[0, 0, 2, 1, 2, 2, 3, 2, 4, 3, 5, 4, 6]);
    assert_eq!(prof.ps_index(), Some(14));
    let verdict = check_profile(&prof, FloorProfile::Classified);
    assert!(!verdict.admissible);
    assert_eq!(verdict.violations, vec!["K^3 below floor".to_string()]);
    // the generic floor at delta = 14 is weaker (1/3150) and is cleared
    let verdict = check_profile(&prof, FloorProfile::Generic);
    assert!(verdict.admissible);
}

#[test]
fn impossible_index_always_rejects() {
    // delta = 16 has no geometric baskets at all under the classified floor
    let prof = PluriProfile::from_window(rat(1, 2), 12, &[0, 0, 0, 0, 2, 2, 3]);
    assert_eq!(prof.ps_index(), Some(16));
    let verdict = check_profile(&prof, FloorProfile::Classified);
    assert_eq!(verdict.violations, vec!["K^3 below floor".to_string()]);
}

#[test]
fn nonpositive_volume_label() {
    let prof = PluriProfile::from_window(rat(-1, 1), 12, &[0, 0, 1]);
    let verdict = check_profile(&prof, FloorProfile::Generic);
    assert!(verdict.violations.contains(&"K^3<=0".to_string()));
}

#[test]
fn violations_accumulate() {
    // nonpositive volume and a negative plurigenus in one verdict
    let prof = PluriProfile::from_window(rat(-1, 1), 12, &[0, -1, 1]);
    let verdict = check_profile(&prof, FloorProfile::Generic);
    assert_eq!(
        verdict.violations,
        vec!["K^3<=0".to_string(), "P_13=-1".to_string()]
    );
}
