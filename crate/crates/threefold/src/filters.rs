//! Geometric-admissibility predicates and volume floors.
//!
//! A formally admissible weighted basket must satisfy, on any computed
//! plurigenus window:
//!
//! * property A — `P_m P_n <= P_{m+n}` whenever `P_m = 1` and `n > 0`;
//! * property B — `P_m >= 0` for all `m`;
//! * property C — `K^3` at least a volume floor depending on the
//!   pluricanonical section index `delta`;
//! * positivity — `K^3 > 0`.
//!
//! Violations carry stable human-readable labels (`"P_15=-1"`,
//! `"P_8P_8>P_16"`, `"K^3 below floor"`, `"K^3<=0"`) so verification runs
//! can diff against published rejection tables byte-for-byte.

use num_traits::Signed;

use crate::basket::{PluriProfile, WeightedBasket};
use crate::{rat, Rat};

/// A volume-floor function `delta -> lower bound on K^3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FloorProfile {
    /// The conservative closed-form floor `1/(m0 (m0+1)^2)`, the minimum of
    /// all case bounds at `theta = 1`; safe to use before any
    /// classification is known.
    Generic,
    /// The classified per-index minima `v(2) ... v(12)` plus the
    /// `delta`-level floors for `13 <= delta <= 18` (with 16 and 17
    /// impossible).
    Classified,
}

/// A floor value: either an exact rational bound or "no geometric basket
/// exists at this index" (a dedicated marker, not a sentinel number).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Floor {
    Bound(Rat),
    Impossible,
}

/// The classified floor table: minimal volumes `v(m0)` for `2 <= m0 <= 12`
/// and `delta`-level minima for `13 <= m0 <= 18`.
pub fn classified_floor(m0: u32) -> Option<Floor> {
    let v = |p, q| Some(Floor::Bound(rat(p, q)));
    match m0 {
        2 => v(1, 14),
        3 => v(1, 36),
        4 => v(1, 90),
        5 => v(1, 135),
        6 => v(1, 224),
        7 => v(1, 336),
        8 => v(1, 504),
        9 => v(1, 675),
        10 => v(3, 2750),
        11 => v(1, 1188),
        12 => v(1, 1560),
        13 => v(1, 252),
        14 => v(1, 1680),
        15 => v(1, 1386),
        16 | 17 => Some(Floor::Impossible),
        18 => v(1, 1170),
        _ => None,
    }
}

/// Volume floor for pluricanonical section index `m0` under the chosen
/// profile.
///
/// Generic: `1/(m0 (m0+1)^2)`.  Classified: table lookup, with
/// [`Floor::Impossible`] at `m0 = 16, 17` and falling back to the generic
/// formula outside the table range.
pub fn volume_floor(m0: u32, profile: FloorProfile) -> Floor {
    assert!(m0 >= 2, "volume floor is defined for m0 >= 2");
    let m = m0 as i64;
    let generic = Floor::Bound(rat(1, m * (m + 1) * (m + 1)));
    match profile {
        FloorProfile::Generic => generic,
        FloorProfile::Classified => classified_floor(m0).unwrap_or(generic),
    }
}

/// The verdict of the admissibility filter: admissible iff no violation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub admissible: bool,
    pub violations: Vec<String>,
}

impl Verdict {
    fn from_violations(violations: Vec<String>) -> Self {
        Verdict { admissible: violations.is_empty(), violations }
    }
}

/// Property B: `P_m >= 0` throughout the window.  Each failure is labeled
/// `"P_<m>=<value>"`.
pub fn property_b(profile: &PluriProfile) -> Vec<String> {
    let mut out = Vec::new();
    for m in profile.m_start..=profile.m_max() {
        let v = profile.get(m).expect("m inside window");
        if v.is_negative() {
            out.push(format!("P_{m}={v}"));
        }
    }
    out
}

/// Property A: for every pair `m + n <= m_max` with `P_m = 1` and
/// `P_n > P_{m+n}`, emits `"P_<m>P_<n>>P_<m+n>"`.
///
/// Only pairs fully inside the window are checked; no extrapolation.
pub fn property_a(profile: &PluriProfile) -> Vec<String> {
    let mut out = Vec::new();
    let lo = profile.m_start;
    let hi = profile.m_max();
    for m in lo..=hi {
        if profile.get(m).is_none_or(|v| *v != num_bigint::BigInt::from(1)) {
            continue;
        }
        for n in m..=hi {
            let s = m + n;
            if s > hi {
                break;
            }
            let (pn, ps) = (profile.get(n).unwrap(), profile.get(s).unwrap());
            if pn > ps {
                out.push(format!("P_{m}P_{n}>P_{s}"));
            }
        }
    }
    out
}

/// Runs the admissibility filter on an explicit profile window.
///
/// Checks, accumulating violations without short-circuiting:
/// `K^3 > 0`; property B; property A; and `K^3 >=` the volume floor at
/// `delta` (skipped when no `P_m >= 2` occurs inside the window; a floor of
/// [`Floor::Impossible`] always rejects).
pub fn check_profile(profile: &PluriProfile, floor: FloorProfile) -> Verdict {
    let mut violations = Vec::new();
    if !profile.k3.is_positive() {
        violations.push("K^3<=0".to_string());
    }
    violations.extend(property_b(profile));
    violations.extend(property_a(profile));
    if let Some(delta) = profile.ps_index() {
        match volume_floor(delta, floor) {
            Floor::Bound(f) => {
                if profile.k3 < f {
                    violations.push("K^3 below floor".to_string());
                }
            }
            Floor::Impossible => violations.push("K^3 below floor".to_string()),
        }
    }
    Verdict::from_violations(violations)
}

/// Runs the admissibility filter on a weighted basket, computing the profile
/// up to `m_max` first.
pub fn is_geometric_candidate(
    wb: &WeightedBasket,
    m_max: u32,
    floor: FloorProfile,
) -> Result<Verdict, crate::basket::BasketError> {
    Ok(check_profile(&wb.pluri_profile(m_max)?, floor))
}
