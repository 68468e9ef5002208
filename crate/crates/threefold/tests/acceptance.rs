//! Acceptance suite: one test per release criterion, each printing a
//! single pass/fail line (visible with `cargo test --test acceptance --
//! --nocapture`).  Every check is exact; there are no tolerances.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use threefold::basket::{Basket, WeightedBasket};
use threefold::bounds::{composite_bound, fourfold_threshold, table_a, CompositeBound};
use threefold::classifier::{
    delta_census, enumerate_initial, load_sets, load_table, verify_table, EnumConstraints,
};
use threefold::filters::{check_profile, volume_floor, Floor, FloorProfile};
use threefold::packing::{can_pack, full_unpack, mediant, min_volume_dominated, pack};
use threefold::rat;

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

/// Runs one criterion and prints its pass/fail line before propagating any
/// failure to the harness.
fn criterion(n: u32, name: &str, body: impl FnOnce()) {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(()) => println!("criterion {n:2} [{name}]: PASS"),
        Err(e) => {
            println!("criterion {n:2} [{name}]: FAIL");
            std::panic::resume_unwind(e);
        }
    }
}

fn basket(pairs: &[(i64, i64)]) -> Basket {
    Basket::from_pairs(pairs.iter().copied()).unwrap()
}

fn b2a() -> WeightedBasket {
    let b = basket(&[
        (1, 2), (1, 2), (1, 2), (1, 2), (4, 9), (2, 5), (5, 13), (1, 3), (1, 3), (1, 3),
        (1, 4), (1, 4),
    ]);
    WeightedBasket::new(b, 0, 2)
}

/// Looks up one concrete-basket row of a table by id.
fn table_basket(table: &str, id: &str) -> WeightedBasket {
    let sets = load_sets(&data_dir()).unwrap();
    let row = load_table(&data_dir(), table)
        .unwrap()
        .into_iter()
        .find(|r| r.id == id)
        .unwrap_or_else(|| panic!("{table} has no row {id}"));
    let fam = row.family.as_ref().unwrap();
    let mut instances = fam.expand(&sets, 20, None).unwrap();
    assert_eq!(instances.len(), 1, "{table} row {id} is not concrete");
    WeightedBasket::new(instances.remove(0).1, row.p2.unwrap(), row.chi.unwrap())
}

#[test]
fn c01_exact_volumes() {
    criterion(1, "exact volumes", || {
        assert_eq!(b2a().volume(), rat(1, 1170));
        assert_eq!(table_basket("F0", "2a").volume(), rat(1, 1170));
        assert_eq!(table_basket("F0", "41").volume(), rat(1, 252));
        assert_eq!(table_basket("F2", "7a").volume(), rat(1, 1680));
        assert_eq!(table_basket("F2", "36a").volume(), rat(1, 1680));
    });
}

#[test]
fn c02_table_f_sweep_and_census() {
    criterion(2, "table F sweep + census", || {
        for name in ["F0", "F1", "F2"] {
            let report = verify_table(&data_dir(), name, 24, 20, Some(40)).unwrap();
            assert!(report.ok(), "table {name}: {:?}", report.mismatches);
        }
        let census = delta_census(&data_dir(), 24).unwrap();
        assert!(census.errors.is_empty(), "{:?}", census.errors);
        let deltas: Vec<u32> = census.by_delta.keys().copied().collect();
        assert_eq!(deltas, vec![13, 14, 15, 18]);
        assert_eq!(census.by_delta[&18].len(), 1);
        assert_eq!(census.by_delta[&13].len(), 1);
        assert_eq!(census.min_volume(13), Some(rat(1, 252)));
        assert_eq!(census.min_volume(14), Some(rat(1, 1680)));
        assert_eq!(census.min_volume(15), Some(rat(1, 1386)));
        assert_eq!(census.min_volume(18), Some(rat(1, 1170)));
    });
}

#[test]
fn c03_named_plurigenera_and_cartier_index() {
    criterion(3, "named plurigenera", || {
        let wb = b2a();
        assert_eq!(wb.plurigenus(19).unwrap(), 0.into());
        assert_eq!(wb.plurigenus(24).unwrap(), 3.into());
        assert_eq!(wb.basket.cartier_index(), 2340.into());
    });
}

#[test]
fn c04_tables_ii_sweep() {
    criterion(4, "tables II sweep", || {
        for name in ["II1", "II2", "II3"] {
            let report = verify_table(&data_dir(), name, 24, 20, Some(40)).unwrap();
            assert!(report.ok(), "table {name}: {:?}", report.mismatches);
            assert!(report.instances > report.rows, "table {name} under-instantiated");
        }
    });
}

#[test]
fn c05_enumeration_equivalence() {
    criterion(5, "enumeration equivalence", || {
        // survivors cover every recorded family instantiation with r <= 13;
        // the remainder is exactly the committed diff file
        let c = EnumConstraints::new(0, 3, 2, 13);
        let survivors = enumerate_initial(&c);
        let keys: BTreeSet<(i64, String)> = survivors
            .iter()
            .map(|cand| (cand.chi, cand.basket.to_string()))
            .collect();
        let sets = load_sets(&data_dir()).unwrap();
        let mut covered = BTreeSet::new();
        for name in ["II1", "II2", "II3"] {
            for row in load_table(&data_dir(), name).unwrap() {
                let fam = row.family.as_ref().unwrap();
                for (_, b) in fam.expand(&sets, 13, None).unwrap() {
                    let key = (row.chi.unwrap(), b.to_string());
                    assert!(keys.contains(&key), "{name} row {}: {b} missing", row.id);
                    covered.insert(key);
                }
            }
        }
        let extras: Vec<String> = survivors
            .iter()
            .filter(|cand| !covered.contains(&(cand.chi, cand.basket.to_string())))
            .map(|cand| format!("chi={} | {} | k3={}", cand.chi, cand.basket, cand.profile.k3))
            .collect();
        let diff_file: Vec<String> =
            std::fs::read_to_string(data_dir().join("enumeration_diff.txt"))
                .unwrap()
                .lines()
                .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
                .map(str::to_string)
                .collect();
        assert_eq!(extras, diff_file, "diff file out of date");

        // brute-force oracle agreement at r_max = 6: enumerate every count
        // multiset directly, with no pruning beyond the constraints themselves
        let p2 = 2i64;
        let c6 = EnumConstraints::new(0, 3, p2, 6);
        let mut fast: Vec<(i64, String)> = enumerate_initial(&c6)
            .iter()
            .map(|cand| (cand.chi, cand.basket.to_string()))
            .collect();
        fast.sort();
        let mut slow = Vec::new();
        for chi in 0..=3i64 {
            let n_max = 5 * p2 + 10 * chi;
            for n2 in 0..=n_max {
                for n3 in 0..=n_max - n2 {
                    for n4 in 0..=n_max - n2 - n3 {
                        for n5 in 0..=n_max - n2 - n3 - n4 {
                            for n6 in 0..=n_max - n2 - n3 - n4 - n5 {
                                let mut pairs = Vec::new();
                                for (r, k) in [(2, n2), (3, n3), (4, n4), (5, n5), (6, n6)] {
                                    pairs.extend(std::iter::repeat((1, r)).take(k as usize));
                                }
                                let wb = WeightedBasket::new(basket(&pairs), p2, chi);
                                // cheap exact screens before the full profile
                                if wb.volume() <= rat(0, 1) {
                                    continue;
                                }
                                let within = [(3i64, 3i64), (4, 5), (5, 7), (6, 13)].iter().all(
                                    |&(m, cap)| {
                                        let v = wb.plurigenus(m as u32).unwrap();
                                        v >= 0.into() && v <= cap.into()
                                    },
                                );
                                if !within {
                                    continue;
                                }
                                let profile = wb.pluri_profile(24).unwrap();
                                if check_profile(&profile, FloorProfile::Classified).admissible {
                                    slow.push((chi, wb.basket.to_string()));
                                }
                            }
                        }
                    }
                }
            }
        }
        slow.sort();
        assert_eq!(fast, slow, "pruned enumerator disagrees with brute force");
    });
}

#[test]
fn c06_packing_ground_truth() {
    criterion(6, "packing ground truth", || {
        // every printed merge in the H table is a true mediant
        let mut merges = 0;
        for row in load_table(&data_dir(), "H").unwrap() {
            if let Some(m) = row.merge {
                assert!(can_pack(m.left, m.right), "row {}: not a Farey pair", row.id);
                assert_eq!(mediant(m.left, m.right), m.merged, "row {}", row.id);
                assert_eq!(m.left.r + m.right.r, m.merged.r, "row {}", row.id);
                assert_eq!(m.left.b + m.right.b, m.merged.b, "row {}", row.id);
                merges += 1;
            }
        }
        assert!(merges > 0, "no printed merges found");

        // named minimal-volume searches
        let b90 = basket(&[(1, 2), (1, 2), (1, 2), (1, 3), (1, 3), (1, 4), (1, 5), (1, 5), (1, 5)]);
        assert_eq!(min_volume_dominated(&b90, 0, 1).volume, rat(1, 90));
        let b210 = basket(&[(1, 2), (1, 2), (1, 2), (1, 2), (1, 2), (2, 5), (1, 3), (1, 4), (1, 6)]);
        assert_eq!(min_volume_dominated(&b210, 0, 1).volume, rat(1, 210));
        let b105 = basket(&[
            (1, 2), (1, 2), (1, 2), (1, 2), (1, 2), (1, 2), (1, 3), (1, 3), (1, 5), (1, 7),
        ]);
        assert_eq!(min_volume_dominated(&b105, 0, 1).volume, rat(1, 105));
    });
}

#[test]
fn c07_packing_properties() {
    criterion(7, "packing properties", || {
        let mut runner = TestRunner::new(Config {
            cases: 10_000,
            failure_persistence: None,
            ..Config::default()
        });
        let strategy = (
            prop::collection::vec(2..=7i64, 2..=6),
            prop::collection::vec(0..64usize, 0..4),
            0..64usize,
        );
        runner
            .run(&strategy, |(rs, picks, choice)| {
                // walk a random packing path from an atomic start
                let mut b = Basket::from_pairs(rs.iter().map(|&r| (1, r))).unwrap();
                for &k in &picks {
                    let pts = b.points();
                    let mut pairs = Vec::new();
                    for i in 0..pts.len() {
                        for j in i + 1..pts.len() {
                            if can_pack(pts[i], pts[j]) {
                                pairs.push((pts[i], pts[j]));
                            }
                        }
                    }
                    if pairs.is_empty() {
                        break;
                    }
                    let (p, q) = pairs[k % pairs.len()];
                    b = pack(&b, p, q).unwrap();
                }
                // the atomic start is recoverable regardless of the path
                let atoms = Basket::from_pairs(rs.iter().map(|&r| (1, r))).unwrap();
                prop_assert_eq!(full_unpack(&b), atoms);

                let pts = b.points();
                let mut pairs = Vec::new();
                for i in 0..pts.len() {
                    for j in i + 1..pts.len() {
                        if can_pack(pts[i], pts[j]) {
                            pairs.push((pts[i], pts[j]));
                        }
                    }
                }
                if pairs.is_empty() {
                    return Ok(());
                }
                let (p, q) = pairs[choice % pairs.len()];
                let packed = pack(&b, p, q).unwrap();
                let level = (p.r + q.r) as u32;
                prop_assert_eq!(packed.sigma(), b.sigma());
                let (wa, wp) = (
                    WeightedBasket::new(b.clone(), 0, 1),
                    WeightedBasket::new(packed.clone(), 0, 1),
                );
                prop_assert!(wp.volume() < wa.volume());
                for m in 2..=level {
                    prop_assert_eq!(wp.plurigenus(m).unwrap(), wa.plurigenus(m).unwrap());
                }
                prop_assert_eq!(
                    wp.plurigenus(level + 1).unwrap(),
                    wa.plurigenus(level + 1).unwrap() - 1
                );
                Ok(())
            })
            .unwrap();
    });
}

#[test]
fn c08_bounds_tables() {
    criterion(8, "bounds tables", || {
        // all 56 printed (xi, K^3) entries of the four bound tables
        let printed: [[(i64, i64); 28]; 4] = [
            [
                (4, 3), (1, 3), (1, 1), (1, 9), (3, 4), (3, 64), (5, 8), (1, 40), (1, 2), (1, 72),
                (6, 13), (6, 637), (2, 5), (1, 160), (4, 11), (4, 891), (1, 3), (1, 300),
                (3, 10), (3, 1210), (5, 18), (5, 2592), (1, 4), (1, 676), (6, 25), (3, 2450),
                (2, 9), (2, 2025),
            ],
            [
                (1, 2), (1, 8), (2, 5), (2, 45), (1, 3), (1, 48), (1, 4), (1, 100), (2, 9),
                (1, 162), (1, 5), (1, 245), (1, 6), (1, 384), (2, 13), (2, 1053), (1, 7),
                (1, 700), (1, 8), (1, 968), (2, 17), (1, 1224), (1, 9), (1, 1521), (1, 10),
                (1, 1960), (2, 21), (2, 4725),
            ],
            [
                (1, 2), (1, 12), (1, 3), (1, 36), (2, 7), (1, 70), (1, 4), (1, 120), (1, 5),
                (1, 210), (2, 11), (1, 308), (1, 6), (1, 432), (1, 7), (1, 630), (2, 15),
                (1, 825), (1, 8), (1, 1056), (1, 9), (1, 1404), (2, 19), (1, 1729), (1, 10),
                (1, 2100), (1, 11), (1, 2640),
            ],
            [
                (6, 7), (1, 14), (2, 3), (1, 36), (1, 2), (1, 80), (4, 9), (1, 135), (3, 8),
                (1, 224), (1, 3), (1, 336), (2, 7), (1, 504), (4, 15), (1, 675), (6, 25),
                (3, 2750), (2, 9), (1, 1188), (1, 5), (1, 1560), (4, 21), (1, 1911), (3, 17),
                (1, 2380), (1, 6), (1, 2880),
            ],
        ];
        for (which, rows) in printed.iter().enumerate() {
            let got = table_a(which as u8 + 1);
            assert_eq!(got.len(), 14);
            for (i, (m0, xi, k3)) in got.into_iter().enumerate() {
                assert_eq!(xi, rat(rows[2 * i].0, rows[2 * i].1), "A{} m0={m0} xi", which + 1);
                assert_eq!(
                    k3,
                    rat(rows[2 * i + 1].0, rows[2 * i + 1].1),
                    "A{} m0={m0} K^3",
                    which + 1
                );
            }
        }

        // the eleven classified volume-floor values
        let v: [(i64, i64); 11] = [
            (1, 14), (1, 36), (1, 90), (1, 135), (1, 224), (1, 336), (1, 504), (1, 675),
            (3, 2750), (1, 1188), (1, 1560),
        ];
        for (i, &(p, q)) in v.iter().enumerate() {
            let m0 = i as u32 + 2;
            assert_eq!(volume_floor(m0, FloorProfile::Classified), Floor::Bound(rat(p, q)));
        }

        // composite in-text bounds
        assert_eq!(
            composite_bound(CompositeBound::CorM01 { m0: 2, m1: 4, p_m1: 4 }),
            rat(1, 12)
        );
        assert_eq!(composite_bound(CompositeBound::PropD24 { m0: 4 }), rat(1, 18));
        assert_eq!(composite_bound(CompositeBound::CorPm3 { m0: 3, p: 3 }), rat(1, 24));
    });
}

#[test]
fn c09_table_h_rejection_replay() {
    criterion(9, "table H rejection replay", || {
        let report = verify_table(&data_dir(), "H", 24, 20, Some(40)).unwrap();
        assert!(report.ok(), "{:?}", report.mismatches);
        let expected: Vec<String> =
            std::fs::read_to_string(data_dir().join("h_unverifiable.txt"))
                .unwrap()
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_string)
                .collect();
        assert_eq!(report.unverifiable, expected);
    });
}

#[test]
fn c10_fourfold_thresholds() {
    criterion(10, "4-fold thresholds", || {
        assert_eq!(fourfold_threshold(2), 35);
        assert_eq!(fourfold_threshold(19), 18);
        let mut prev = fourfold_threshold(2);
        for pg in 3..=100 {
            let t = fourfold_threshold(pg);
            assert!(t <= prev, "threshold increased at pg = {pg}");
            prev = t;
        }
    });
}
