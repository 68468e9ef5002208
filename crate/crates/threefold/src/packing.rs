//! Farey-mediant packing and unpacking of basket points, and exhaustive
//! search over the dominance DAG.
//!
//! Two points `(b1, r1)`, `(b2, r2)` *pack* when they are Farey neighbors,
//! i.e. `|b1 r2 - b2 r1| = 1`; the merge replaces them by the mediant
//! `(b1 + b2, r1 + r2)`.  Packing conserves `sigma`, strictly decreases
//! `sigma'` (hence the volume), leaves `P_m` unchanged for `m <= r1 + r2`,
//! and drops `P_{r1+r2+1}` by exactly 1.  Reading a merge right-to-left gives
//! the unique Farey parents of any point with `b >= 2`, so every basket
//! unpacks to a unique *initial basket* of `(1, r)` points.
//!
//! The dominance search explores all baskets reachable from a start basket
//! by zero or more packings, memoized on canonical form, pruned by a volume
//! floor (sound because volume only decreases along packing paths).

use std::collections::{HashSet, VecDeque};

use num_traits::Signed;
use thiserror::Error;

use crate::basket::{Basket, BasketPoint, WeightedBasket};
use crate::Rat;

/// Default node budget for dominance searches.
pub const DEFAULT_NODE_BUDGET: usize = 1_000_000;

/// Errors raised by packing operations.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum PackingError {
    #[error("points {p} and {q} are not Farey neighbors (cannot pack)")]
    NotPackable { p: BasketPoint, q: BasketPoint },
    #[error("point {p} is not present in the basket")]
    Absent { p: BasketPoint },
}

/// One mediant merge: `left + right -> merged` at level `left.r + right.r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PackingStep {
    pub left: BasketPoint,
    pub right: BasketPoint,
    pub merged: BasketPoint,
}

impl PackingStep {
    /// The level of the merge, `left.r + right.r`; `P_m` is preserved for
    /// `m` up to this level and `P_{level+1}` drops by 1.
    pub fn level(&self) -> i64 {
        self.left.r + self.right.r
    }
}

/// A basket reachable from a search start, with its volume and a witness
/// packing path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominanceResult {
    pub basket: Basket,
    pub volume: Rat,
    pub path: Vec<PackingStep>,
}

/// Outcome of a dominance search: the reachable baskets above the floor, and
/// whether the node budget truncated the exploration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub results: Vec<DominanceResult>,
    pub truncated: bool,
}

/// True iff `p` and `q` are Farey neighbors, `|p.b q.r - q.b p.r| = 1`.
pub fn can_pack(p: BasketPoint, q: BasketPoint) -> bool {
    (p.b * q.r - q.b * p.r).abs() == 1
}

/// The mediant of two packable points.  The merged pair is automatically
/// coprime and stays in the canonical range (`2(b1+b2) <= r1+r2` follows
/// from `2b_i <= r_i`).
pub fn mediant(p: BasketPoint, q: BasketPoint) -> BasketPoint {
    debug_assert!(can_pack(p, q));
    BasketPoint { r: p.r + q.r, b: p.b + q.b }
}

/// Removes one copy of `i` and one of `j` from `b` and inserts their mediant.
pub fn pack(b: &Basket, i: BasketPoint, j: BasketPoint) -> Result<Basket, PackingError> {
    if !can_pack(i, j) {
        return Err(PackingError::NotPackable { p: i, q: j });
    }
    let mut points = b.points().to_vec();
    for p in [i, j] {
        match points.iter().position(|&q| q == p) {
            Some(k) => {
                points.remove(k);
            }
            None => return Err(PackingError::Absent { p }),
        }
    }
    points.push(mediant(i, j));
    Ok(Basket::from_points(points))
}

/// The unique Farey parents of `p`, or `None` when `p.b = 1` (atomic).
///
/// For `b >= 2` the parents `(b1, r1)`, `(b2, r2)` satisfy `b1 + b2 = b`,
/// `r1 + r2 = r`, `b1 r2 - b2 r1 = ±1`.  Both parents of a canonical point
/// are canonical: the upper Farey neighbor of `b/r <= 1/2` is at most `1/2`
/// because `1/2` itself has denominator `2 < r`.
pub fn unpack_step(p: BasketPoint) -> Option<(BasketPoint, BasketPoint)> {
    if p.b == 1 {
        return None;
    }
    // r1 = -b^{-1} mod r is the unique solution of b*r1 = -1 (mod r) in
    // 1..r; indices stay small in every use, so a linear scan suffices.
    for r1 in 1..p.r {
        let num = 1 + p.b * r1;
        if num % p.r == 0 {
            let b1 = num / p.r;
            let (b2, r2) = (p.b - b1, p.r - r1);
            debug_assert!(b1 >= 1 && b2 >= 1 && 2 * b1 <= r1 && 2 * b2 <= r2);
            let mut pair = [BasketPoint { r: r1, b: b1 }, BasketPoint { r: r2, b: b2 }];
            pair.sort();
            return Some((pair[0], pair[1]));
        }
    }
    unreachable!("every canonical point with b >= 2 has Farey parents");
}

/// Fully unpacks every point: the fixpoint of [`unpack_step`], a basket of
/// `(1, r)` points only (the initial basket).
pub fn full_unpack(b: &Basket) -> Basket {
    let mut out: Vec<BasketPoint> = Vec::new();
    let mut stack: Vec<BasketPoint> = b.points().to_vec();
    while let Some(p) = stack.pop() {
        match unpack_step(p) {
            None => out.push(p),
            Some((l, r)) => {
                stack.push(l);
                stack.push(r);
            }
        }
    }
    Basket::from_points(out)
}

/// Packing steps that rebuild `target` from its initial basket
/// [`full_unpack`]`(target)`; replaying them with [`replay`] recovers
/// `target` exactly (the round-trip property).
pub fn rebuild_steps(target: &Basket) -> Vec<PackingStep> {
    fn steps_for(p: BasketPoint, out: &mut Vec<PackingStep>) {
        if let Some((l, r)) = unpack_step(p) {
            steps_for(l, out);
            steps_for(r, out);
            out.push(PackingStep { left: l, right: r, merged: p });
        }
    }
    let mut out = Vec::new();
    for &p in target.points() {
        steps_for(p, &mut out);
    }
    out
}

/// Replays a witness path from a start basket; used by round-trip tests and
/// by consumers validating serialized paths.
pub fn replay(start: &Basket, path: &[PackingStep]) -> Result<Basket, PackingError> {
    let mut b = start.clone();
    for step in path {
        b = pack(&b, step.left, step.right)?;
    }
    Ok(b)
}

/// All distinct baskets reachable from `start` by packings, with volume
/// (for the given `P_2`, `chi`) at least `floor`.
///
/// Breadth-first by packing count, memoized on canonical form; a basket
/// below the floor is dropped together with its whole subtree (volume is
/// monotone decreasing along packing paths, so the pruning is exact).
/// Results are sorted by (volume ascending, canonical basket); each carries
/// a witness path replayable from `start`.
pub fn dominated_search(
    start: &Basket,
    p2: i64,
    chi: i64,
    floor: &Rat,
    max_nodes: usize,
) -> SearchOutcome {
    let vol = |b: &Basket| WeightedBasket::new(b.clone(), p2, chi).volume();
    let mut results: Vec<DominanceResult> = Vec::new();
    let mut seen: HashSet<Basket> = HashSet::new();
    let mut queue: VecDeque<(Basket, Vec<PackingStep>)> = VecDeque::new();
    let mut truncated = false;

    let v0 = vol(start);
    if v0 >= *floor {
        seen.insert(start.clone());
        results.push(DominanceResult { basket: start.clone(), volume: v0, path: Vec::new() });
        queue.push_back((start.clone(), Vec::new()));
    }

    while let Some((b, path)) = queue.pop_front() {
        if seen.len() >= max_nodes {
            truncated = true;
            break;
        }
        for (p, q) in packable_pairs(&b) {
            let nb = pack(&b, p, q).expect("checked packable");
            if seen.contains(&nb) {
                continue;
            }
            let nv = vol(&nb);
            if nv < *floor {
                continue;
            }
            seen.insert(nb.clone());
            let mut npath = path.clone();
            npath.push(PackingStep { left: p, right: q, merged: mediant(p, q) });
            results.push(DominanceResult { basket: nb.clone(), volume: nv, path: npath.clone() });
            queue.push_back((nb, npath));
        }
    }

    results.sort_by(|a, b| a.volume.cmp(&b.volume).then_with(|| a.basket.cmp(&b.basket)));
    SearchOutcome { results, truncated }
}

/// Window scanned when locating the section index of a search start.
const DELTA_WINDOW: u32 = 24;

/// The minimal-volume basket dominated by `start` *as a candidate for the
/// same classification case*, ties broken by canonical order.
///
/// A start basket encodes a case with a known pluricanonical section index
/// `delta` (the first `m` with `P_m >= 2`).  A dominated basket only
/// competes in that case when it still attains a section at index `delta` —
/// so every packing must have level `>= delta`, preserving `P_2..P_delta` —
/// and when its volume clears the already-established generic floor
/// `1/(delta (delta+1)^2)`.  Without these restrictions "the minimum" is
/// meaningless: packing everything drives the volume of any formal basket
/// arbitrarily low, through baskets that have left the case entirely.
///
/// When `start` has no section index within the scan window the search is
/// unrestricted and returns the minimal reachable basket with `K^3 > 0`,
/// falling back to the overall minimum when none is positive.
pub fn min_volume_dominated(start: &Basket, p2: i64, chi: i64) -> DominanceResult {
    let vol = |b: &Basket| WeightedBasket::new(b.clone(), p2, chi).volume();
    let delta = WeightedBasket::new(start.clone(), p2, chi)
        .ps_index(DELTA_WINDOW)
        .unwrap_or(None);
    let floor: Option<Rat> = delta.map(|d| {
        let d = d as i64;
        Rat::new(1.into(), (d * (d + 1) * (d + 1)).into())
    });
    let min_level = delta.map(|d| d as i64).unwrap_or(0);

    let better = |cur: &Option<DominanceResult>, cand: &DominanceResult| match cur {
        None => true,
        Some(c) => {
            cand.volume < c.volume || (cand.volume == c.volume && cand.basket < c.basket)
        }
    };

    let mut best: Option<DominanceResult> = None;
    let mut best_positive: Option<DominanceResult> = None;
    let mut best_any: Option<DominanceResult> = None;
    let mut seen: HashSet<Basket> = HashSet::new();
    let mut queue: VecDeque<(Basket, Vec<PackingStep>)> = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back((start.clone(), Vec::new()));

    while let Some((b, path)) = queue.pop_front() {
        let cand = DominanceResult { basket: b.clone(), volume: vol(&b), path: path.clone() };
        if floor.as_ref().is_some_and(|f| cand.volume >= *f) && better(&best, &cand) {
            best = Some(cand.clone());
        }
        if cand.volume.is_positive() && better(&best_positive, &cand) {
            best_positive = Some(cand.clone());
        }
        if better(&best_any, &cand) {
            best_any = Some(cand);
        }
        for (p, q) in packable_pairs(&b) {
            if p.r + q.r < min_level {
                continue;
            }
            let nb = pack(&b, p, q).expect("checked packable");
            if seen.insert(nb.clone()) {
                let mut npath = path.clone();
                npath.push(PackingStep { left: p, right: q, merged: mediant(p, q) });
                queue.push_back((nb, npath));
            }
        }
    }
    best.or(best_positive)
        .or(best_any)
        .expect("search visits at least the start basket")
}

/// Unordered pairs of (distinct positions of) points in `b` that can pack,
/// deduplicated by point value.
fn packable_pairs(b: &Basket) -> Vec<(BasketPoint, BasketPoint)> {
    let mut pts = b.points().to_vec();
    pts.dedup();
    let count = |p: BasketPoint| b.points().iter().filter(|&&q| q == p).count();
    let mut out = Vec::new();
    for (i, &p) in pts.iter().enumerate() {
        for &q in pts.iter().skip(i) {
            if p == q && count(p) < 2 {
                continue;
            }
            if can_pack(p, q) {
                out.push((p, q));
            }
        }
    }
    out
}
