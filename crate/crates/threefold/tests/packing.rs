//! Tests for mediant packing/unpacking and the dominance search: conserved
//! quantities, level invariance, unique Farey parents, round trips, and
//! named minimal-volume searches.

use proptest::prelude::*;
use threefold::basket::{Basket, BasketPoint, WeightedBasket};
use threefold::packing::{
    can_pack, dominated_search, full_unpack, mediant, min_volume_dominated, pack, rebuild_steps,
    replay, unpack_step, PackingError, DEFAULT_NODE_BUDGET,
};
use threefold::{int, rat, Rat};

fn basket(pairs: &[(i64, i64)]) -> Basket {
    Basket::from_pairs(pairs.iter().copied()).unwrap()
}

/// The plurigenus as an exact rational, defined for every formal basket
/// (no integrality requirement); independent of `WeightedBasket::plurigenus`.
fn raw_p(b: &Basket, p2: i64, chi: i64, m: u32) -> Rat {
    let k3 = WeightedBasket::new(b.clone(), p2, chi).volume();
    let mi = m as i64;
    rat(mi * (mi - 1) * (2 * mi - 1), 12) * k3 + int(1 - 2 * mi) * int(chi) + b.local_sum(m)
}

#[test]
fn pack_and_mediant_examples() {
    let p = BasketPoint::new(2, 5);
    let q = BasketPoint::new(3, 8);
    assert!(can_pack(p, q));
    assert_eq!(mediant(p, q), BasketPoint::new(5, 13));

    // (1,3) and (2,5) pack; (1,3) and (1,3) never do.
    assert!(can_pack(BasketPoint::new(1, 3), BasketPoint::new(2, 5)));
    assert!(!can_pack(BasketPoint::new(1, 3), BasketPoint::new(1, 3)));

    let b = basket(&[(2, 5), (3, 8), (1, 4)]);
    let packed = pack(&b, p, q).unwrap();
    assert_eq!(packed, basket(&[(1, 4), (5, 13)]));
}

#[test]
fn pack_errors() {
    let b = basket(&[(1, 3), (1, 3)]);
    assert_eq!(
        pack(&b, BasketPoint::new(1, 3), BasketPoint::new(1, 3)),
        Err(PackingError::NotPackable {
            p: BasketPoint::new(1, 3),
            q: BasketPoint::new(1, 3)
        })
    );
    assert_eq!(
        pack(&b, BasketPoint::new(1, 2), BasketPoint::new(1, 3)),
        Err(PackingError::Absent { p: BasketPoint::new(1, 2) })
    );
}

#[test]
fn unpack_examples() {
    assert_eq!(
        unpack_step(BasketPoint::new(5, 13)),
        Some((BasketPoint::new(2, 5), BasketPoint::new(3, 8)))
    );
    assert_eq!(
        unpack_step(BasketPoint::new(4, 9)),
        Some((BasketPoint::new(1, 2), BasketPoint::new(3, 7)))
    );
    assert_eq!(unpack_step(BasketPoint::new(1, 7)), None);

    assert_eq!(
        full_unpack(&basket(&[(5, 13)])),
        basket(&[(1, 2), (1, 2), (1, 3), (1, 3), (1, 3)])
    );
}

#[test]
fn unpack_parents_are_unique() {
    // For every canonical point with b >= 2, scan all splits b1 + b2 = b,
    // r1 + r2 = r into canonical points; exactly one is a Farey pair, and it
    // is the one unpack_step returns.
    for r in 2..=60i64 {
        for b in 2..=r / 2 {
            if num_integer::gcd(b, r) != 1 {
                continue;
            }
            let p = BasketPoint::new(b, r);
            let mut found = Vec::new();
            for r1 in 1..r {
                for b1 in 1..b {
                    let (b2, r2) = (b - b1, r - r1);
                    let ok = |bb: i64, rr: i64| {
                        rr >= 2 && bb >= 1 && 2 * bb <= rr && num_integer::gcd(bb, rr) == 1
                    };
                    if ok(b1, r1) && ok(b2, r2) {
                        let (x, y) = (BasketPoint::new(b1, r1), BasketPoint::new(b2, r2));
                        if can_pack(x, y) && x <= y {
                            found.push((x, y));
                        }
                    }
                }
            }
            assert_eq!(found.len(), 1, "parents of ({b},{r}) not unique");
            assert_eq!(unpack_step(p), Some(found[0]), "({b},{r})");
            assert_eq!(mediant(found[0].0, found[0].1), p);
        }
    }
}

#[test]
fn rebuild_round_trip_named() {
    let targets = [
        basket(&[(1, 2), (1, 2), (1, 2), (1, 2), (4, 9), (2, 5), (5, 13), (1, 3), (1, 3), (1, 3), (1, 4), (1, 4)]),
        basket(&[(1, 2), (1, 2), (1, 2), (1, 2), (1, 2), (4, 9), (3, 8), (3, 8), (1, 3), (2, 7), (2, 7)]),
        basket(&[(7, 15), (2, 7), (1, 6)]),
        Basket::empty(),
    ];
    for t in targets {
        let start = full_unpack(&t);
        assert!(start.points().iter().all(|p| p.b == 1));
        let steps = rebuild_steps(&t);
        assert_eq!(replay(&start, &steps).unwrap(), t, "round trip failed for {t}");
        // sigma is conserved by the whole rebuild
        assert_eq!(start.sigma(), t.sigma());
    }
}

#[test]
fn search_b90() {
    // start {3x(1,2), 2x(1,3), (1,4), 3x(1,5)}, P_2 = 0, chi = 1:
    // the minimal positive volume reachable is 1/90, attained by packing
    // (1,4) + (1,5) -> (2,9).
    let start = basket(&[(1, 2), (1, 2), (1, 2), (1, 3), (1, 3), (1, 4), (1, 5), (1, 5), (1, 5)]);
    let best = min_volume_dominated(&start, 0, 1);
    assert_eq!(best.volume, rat(1, 90));
    assert_eq!(
        best.basket,
        basket(&[(1, 2), (1, 2), (1, 2), (1, 3), (1, 3), (2, 9), (1, 5), (1, 5)])
    );
    assert_eq!(replay(&start, &best.path).unwrap(), best.basket);
}

#[test]
fn search_b210() {
    // start {5x(1,2), (2,5), (1,3), (1,4), (1,6)}, P_2 = 0, chi = 1:
    // minimal positive volume 1/210 at {(7,15), (2,7), (1,6)}.
    let start = basket(&[(1, 2), (1, 2), (1, 2), (1, 2), (1, 2), (2, 5), (1, 3), (1, 4), (1, 6)]);
    assert_eq!(WeightedBasket::new(start.clone(), 0, 1).volume(), rat(1, 20));
    let best = min_volume_dominated(&start, 0, 1);
    assert_eq!(best.volume, rat(1, 210));
    assert_eq!(best.basket, basket(&[(7, 15), (2, 7), (1, 6)]));
    assert_eq!(replay(&start, &best.path).unwrap(), best.basket);
}

#[test]
fn search_b105_is_its_own_minimum() {
    // {6x(1,2), 2x(1,3), (1,5), (1,7)}, P_2 = 0, chi = 1, volume 1/105:
    // every proper packing leaves positive-volume territory or increases
    // nothing; the basket is its own positive minimum.
    let start =
        basket(&[(1, 2), (1, 2), (1, 2), (1, 2), (1, 2), (1, 2), (1, 3), (1, 3), (1, 5), (1, 7)]);
    let best = min_volume_dominated(&start, 0, 1);
    assert_eq!(best.volume, rat(1, 105));
    assert_eq!(best.basket, start);
    assert!(best.path.is_empty());
}

#[test]
fn dominated_search_respects_floor() {
    let start = basket(&[(1, 2), (1, 2), (1, 2), (1, 3), (1, 3), (1, 4), (1, 5), (1, 5), (1, 5)]);
    let floor = rat(1, 100);
    let out = dominated_search(&start, 0, 1, &floor, DEFAULT_NODE_BUDGET);
    assert!(!out.truncated);
    assert!(!out.results.is_empty());
    for r in &out.results {
        assert!(r.volume >= floor);
        assert_eq!(replay(&start, &r.path).unwrap(), r.basket);
        assert_eq!(r.basket.sigma(), start.sigma());
    }
    // results are sorted by volume, minimum first
    assert_eq!(out.results[0].volume, rat(1, 90));
    // a permissive floor strictly enlarges the result set
    let all = dominated_search(&start, 0, 1, &rat(-1000, 1), DEFAULT_NODE_BUDGET);
    assert!(!all.truncated, "DAG from a 9-point start must be finite");
    assert!(all.results.len() > out.results.len());
}

#[test]
fn dominated_search_truncates_on_budget() {
    let start = basket(&[(1, 2), (1, 2), (1, 2), (1, 3), (1, 3), (1, 4), (1, 5), (1, 5), (1, 5)]);
    let out = dominated_search(&start, 0, 1, &rat(-1000, 1), 3);
    assert!(out.truncated);
}

/// A basket reached from an all-`(1,r)` start by `picks.len()` packings,
/// each pick indexing into the currently packable position pairs.
fn random_reachable(rs: &[i64], picks: &[usize]) -> Basket {
    let mut b = Basket::from_pairs(rs.iter().map(|&r| (1, r))).unwrap();
    for &k in picks {
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
    b
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 10_000,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    /// One packing step on any reachable basket conserves sigma, strictly
    /// decreases sigma' (hence the volume), preserves P_m for every
    /// m <= r1 + r2, and drops P_{r1+r2+1} by exactly 1.
    #[test]
    fn packing_step_invariants(
        rs in prop::collection::vec(2..=7i64, 2..=6),
        picks in prop::collection::vec(0..64usize, 0..4),
        choice in 0..64usize,
        p2 in 0..=2i64,
        chi in 0..=2i64,
    ) {
        let b = random_reachable(&rs, &picks);
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
            // fully packed baskets have nothing to check
            return Ok(());
        }
        let (p, q) = pairs[choice % pairs.len()];
        let packed = pack(&b, p, q).unwrap();
        let level = (p.r + q.r) as u32;

        prop_assert_eq!(packed.sigma(), b.sigma());
        prop_assert!(packed.sigma_prime() < b.sigma_prime());
        let (vb, vp) = (
            WeightedBasket::new(b.clone(), p2, chi).volume(),
            WeightedBasket::new(packed.clone(), p2, chi).volume(),
        );
        prop_assert!(vp < vb);

        for m in 2..=level {
            prop_assert_eq!(raw_p(&packed, p2, chi, m), raw_p(&b, p2, chi, m), "m={}", m);
        }
        prop_assert_eq!(
            raw_p(&packed, p2, chi, level + 1),
            raw_p(&b, p2, chi, level + 1) - int(1)
        );
    }

    /// full_unpack always lands on an all-(1,r) basket, and rebuild_steps
    /// replayed from it recovers the original basket.
    #[test]
    fn unpack_round_trip(
        rs in prop::collection::vec(2..=7i64, 2..=6),
        picks in prop::collection::vec(0..64usize, 0..5),
    ) {
        let b = random_reachable(&rs, &picks);
        let start = full_unpack(&b);
        prop_assert!(start.points().iter().all(|p| p.b == 1));
        prop_assert_eq!(start.sigma(), b.sigma());
        prop_assert_eq!(replay(&start, &rebuild_steps(&b)).unwrap(), b);
    }
}
