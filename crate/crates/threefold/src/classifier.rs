//! Enumeration and table-verification pipelines.
//!
//! The verification surface is data-driven: the reference tables live as
//! text files under `data/` (one row per line, pipe-separated fields) and
//! are re-verified column by column against exact recomputation.  Rows may
//! be parametric families: point counts linear in a parameter `t`, tail
//! points `(1, r)` with `r` ranging over an interval or over a named set of
//! tuples constrained by a reciprocal-sum threshold.
//!
//! The enumerator regenerates all admissible initial baskets (points
//! `(1, r)` only) for given `chi`, `P_2`, plurigenus caps, and floor
//! profile.  For such baskets `P_3..P_6` are affine in the point counts
//! with strictly negative coefficients, so depth-first search with
//! nonnegativity pruning is exhaustive and fast:
//!
//! * `P_3 = 10 P_2/2...`: concretely `P_3 = 5 P_2 + 10 chi - n`,
//! * `P_4 = 14 P_2 + 35 chi - 4 n + n_2`,
//! * `P_5` and `P_6` likewise, with per-`r` coefficients stabilizing
//!   from `r = 4` resp. `r = 5` on.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::basket::{Basket, BasketPoint, PluriProfile, WeightedBasket};
use crate::filters::{check_profile, property_b, FloorProfile};
use crate::notation::parse_rational;
use crate::packing::{can_pack, mediant};
use crate::{int, rat, Rat};

/// Errors raised while loading or expanding dataset rows.
#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("{file}:{line}: {msg}")]
    Row { file: String, line: usize, msg: String },
    #[error("reading {file}: {source}")]
    Io {
        file: String,
        #[source]
        source: std::io::Error,
    },
}

// ---------------------------------------------------------------------------
// Linear and rational expressions in row parameters
// ---------------------------------------------------------------------------

/// An integer-valued expression `c0 + ct * t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinExpr {
    pub c0: i64,
    pub ct: i64,
}

impl LinExpr {
    pub fn constant(c0: i64) -> Self {
        LinExpr { c0, ct: 0 }
    }

    pub fn eval(&self, t: i64) -> i64 {
        self.c0 + self.ct * t
    }

    /// Parses `"2"`, `"t"`, `"3t"`, `"1+t"`, `"18-4t"`, `"t+1"`.
    fn parse(s: &str) -> Option<LinExpr> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut out = LinExpr { c0: 0, ct: 0 };
        let mut rest = s.as_str();
        let mut sign = 1i64;
        if rest.is_empty() {
            return None;
        }
        while !rest.is_empty() {
            if let Some(r) = rest.strip_prefix('+') {
                rest = r;
                sign = 1;
                continue;
            }
            if let Some(r) = rest.strip_prefix('-') {
                rest = r;
                sign = -1;
                continue;
            }
            let digits: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
            rest = &rest[digits.len()..];
            let coeff: i64 = if digits.is_empty() { 1 } else { digits.parse().ok()? };
            if let Some(r) = rest.strip_prefix('t') {
                rest = r;
                out.ct += sign * coeff;
            } else {
                if digits.is_empty() {
                    return None;
                }
                out.c0 += sign * coeff;
            }
            sign = 1;
        }
        Some(out)
    }
}

/// One term of a rational expression: an exact constant or the reciprocal
/// of a named parameter (`1/r`, `1/r2`).
#[derive(Debug, Clone, PartialEq, Eq)]
enum K3Term {
    Const(Rat),
    Recip(String),
}

/// A signed sum of rational terms, e.g. `1/r1 + 1/r2 - 1/6`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatExpr {
    terms: Vec<(i64, K3Term)>,
}

impl RatExpr {
    pub fn eval(&self, vars: &BTreeMap<String, i64>) -> Option<Rat> {
        let mut acc = int(0);
        for (sign, term) in &self.terms {
            let v = match term {
                K3Term::Const(c) => c.clone(),
                K3Term::Recip(name) => rat(1, *vars.get(name)?),
            };
            acc += int(*sign) * v;
        }
        Some(acc)
    }

    /// Parses a sum of terms; each term is `p`, `p/q`, or `1/<var>`.
    fn parse(s: &str) -> Option<RatExpr> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut terms = Vec::new();
        let mut rest = s.as_str();
        let mut sign = 1i64;
        if rest.is_empty() {
            return None;
        }
        while !rest.is_empty() {
            if let Some(r) = rest.strip_prefix('+') {
                rest = r;
                sign = 1;
                continue;
            }
            if let Some(r) = rest.strip_prefix('-') {
                rest = r;
                sign = -1;
                continue;
            }
            let end = rest
                .find(['+', '-'])
                .unwrap_or(rest.len());
            let (tok, r) = rest.split_at(end);
            rest = r;
            let term = match tok.split_once('/') {
                Some((num, den)) if den.chars().next()?.is_ascii_alphabetic() => {
                    if num != "1" {
                        return None;
                    }
                    K3Term::Recip(den.to_string())
                }
                _ => K3Term::Const(parse_rational(tok).ok()?),
            };
            terms.push((sign, term));
            sign = 1;
        }
        Some(RatExpr { terms })
    }
}

// ---------------------------------------------------------------------------
// Parameter sets and family descriptors
// ---------------------------------------------------------------------------

/// A named set of nondecreasing integer tuples `(r_1, ..., r_k)`, `r_i >= 5`,
/// with `sum 1/r_i >= threshold`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetDef {
    pub name: String,
    pub arity: usize,
    pub threshold: Rat,
}

impl SetDef {
    /// True iff the tuple belongs to the set.
    pub fn contains(&self, tuple: &[i64]) -> bool {
        tuple.len() == self.arity
            && tuple.iter().all(|&r| r >= 5)
            && tuple.windows(2).all(|w| w[0] <= w[1])
            && tuple.iter().map(|&r| rat(1, r)).sum::<Rat>() >= self.threshold
    }

    /// All members with components `<= cap`, plus, for every member prefix
    /// that stays valid with an arbitrarily large last component, the tuple
    /// with last component `tail` (a representative of the unbounded
    /// direction).  `tail` members beyond `cap` let callers sample the tail
    /// of unbounded families without enumerating it.
    pub fn members(&self, cap: i64, tail: Option<i64>) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        let mut tuple = vec![0i64; self.arity];
        self.fill(0, 5, cap, &mut tuple, &mut out);
        if let Some(tail) = tail {
            let mut extra = Vec::new();
            let mut tuple = vec![0i64; self.arity];
            self.fill(0, 5, cap, &mut tuple, &mut extra);
            for mut t in extra {
                *t.last_mut().unwrap() = tail;
                if self.contains(&t) && !out.contains(&t) {
                    out.push(t);
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    fn fill(&self, i: usize, lo: i64, cap: i64, tuple: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if i == self.arity {
            if self.contains(tuple) {
                out.push(tuple.clone());
            }
            return;
        }
        for r in lo..=cap {
            tuple[i] = r;
            // remaining components are >= r; prune when even r for all of
            // them cannot reach the threshold
            let max_sum: Rat = tuple[..=i].iter().map(|&x| rat(1, x)).sum::<Rat>()
                + int((self.arity - i - 1) as i64) * rat(1, r);
            if max_sum < self.threshold {
                break;
            }
            self.fill(i + 1, r, cap, tuple, out);
        }
    }
}

/// Loads the companion sets file: lines `name | arity | threshold`.
pub fn parse_sets(text: &str) -> Result<BTreeMap<String, SetDef>, String> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('|').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(format!("line {}: expected 3 fields", i + 1));
        }
        let arity: usize = fields[1].parse().map_err(|e| format!("line {}: {e}", i + 1))?;
        let threshold =
            parse_rational(fields[2]).map_err(|e| format!("line {}: {e}", i + 1))?;
        let name = fields[0].to_string();
        out.insert(name.clone(), SetDef { name, arity, threshold });
    }
    Ok(out)
}

/// One entry of a family descriptor: `count * (b, r-or-parameter)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyEntry {
    pub count: LinExpr,
    pub b: i64,
    /// Literal index, or the name of a parameter (`r`, `r1`, ...).
    pub r: Result<i64, String>,
}

/// The range of one family parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamRange {
    /// `t in 0..2` (inclusive).
    Interval { name: String, lo: i64, hi: Option<i64> },
    /// `(r1,r2) in I4`.
    Tuple { names: Vec<String>, set: String },
}

/// A basket or a parametric family of baskets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    pub entries: Vec<FamilyEntry>,
    pub params: Vec<ParamRange>,
}

impl Family {
    pub fn is_concrete(&self) -> bool {
        self.params.is_empty()
    }

    /// True when some parameter range has no printed upper bound.
    pub fn is_unbounded(&self) -> bool {
        self.params.iter().any(|p| match p {
            ParamRange::Interval { hi, .. } => hi.is_none(),
            ParamRange::Tuple { .. } => false,
        }) || self.params.iter().any(|p| matches!(p, ParamRange::Tuple { set, .. } if set == "I6" || set == "J"))
    }

    /// All instantiations with `r`-parameters `<= cap`, plus `tail`
    /// representatives for unbounded ranges.  Returns bindings together
    /// with the concrete basket.
    pub fn expand(
        &self,
        sets: &BTreeMap<String, SetDef>,
        cap: i64,
        tail: Option<i64>,
    ) -> Result<Vec<(BTreeMap<String, i64>, Basket)>, String> {
        let mut bindings = vec![BTreeMap::new()];
        for param in &self.params {
            let mut next = Vec::new();
            match param {
                ParamRange::Interval { name, lo, hi } => {
                    let mut values: Vec<i64> = (*lo..=hi.unwrap_or(cap).min(cap)).collect();
                    if hi.is_none() {
                        if let Some(tail) = tail {
                            values.push(tail);
                        }
                    }
                    for b in &bindings {
                        for &v in &values {
                            let mut b = b.clone();
                            b.insert(name.clone(), v);
                            next.push(b);
                        }
                    }
                }
                ParamRange::Tuple { names, set } => {
                    let def = sets
                        .get(set)
                        .ok_or_else(|| format!("unknown set {set}"))?;
                    if def.arity != names.len() {
                        return Err(format!("set {set} arity mismatch"));
                    }
                    let unbounded = matches!(set.as_str(), "I6" | "J");
                    let members = def.members(cap, if unbounded { tail } else { None });
                    for b in &bindings {
                        for m in &members {
                            let mut b = b.clone();
                            for (name, &v) in names.iter().zip(m) {
                                b.insert(name.clone(), v);
                            }
                            next.push(b);
                        }
                    }
                }
            }
            bindings = next;
        }

        let mut out = Vec::new();
        for binding in bindings {
            let t = binding.get("t").copied().unwrap_or(0);
            let mut points = Vec::new();
            for e in &self.entries {
                let n = e.count.eval(t);
                if n < 0 {
                    return Err(format!("negative count {n} in family"));
                }
                let r = match &e.r {
                    Ok(r) => *r,
                    Err(name) => *binding
                        .get(name)
                        .ok_or_else(|| format!("unbound parameter {name}"))?,
                };
                let p = BasketPoint::normalize(e.b, r).map_err(|e| e.to_string())?;
                points.extend(std::iter::repeat(p).take(n as usize));
            }
            out.push((binding, Basket::from_points(points)));
        }
        Ok(out)
    }

    /// Parses `{(18-4t)*(1,2), 3t*(1,3), (1,r)} ; t in 0..2 ; r in 5..12`.
    fn parse(s: &str) -> Result<Family, String> {
        let mut clauses = s.split(';').map(str::trim);
        let body = clauses.next().ok_or("empty family")?;
        let inner = body
            .strip_prefix('{')
            .and_then(|b| b.strip_suffix('}'))
            .ok_or_else(|| format!("family body must be braced: {body}"))?;
        let mut entries = Vec::new();
        for item in split_top_level(inner) {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let (count_str, point_str) = match item.rfind(['*', 'x']) {
                Some(i) if !item[..i].trim().is_empty() && item[..i].find('(').is_none() => {
                    (item[..i].trim(), item[i + 1..].trim())
                }
                _ => match item.find(")*(").or(item.find(")x(")) {
                    Some(i) => (item[..=i].trim(), item[i + 2..].trim()),
                    None => ("1", item),
                },
            };
            let count_str = count_str
                .strip_prefix('(')
                .and_then(|c| c.strip_suffix(')'))
                .unwrap_or(count_str);
            let count = LinExpr::parse(count_str)
                .ok_or_else(|| format!("bad count expression {count_str}"))?;
            let pt = point_str
                .strip_prefix('(')
                .and_then(|p| p.strip_suffix(')'))
                .ok_or_else(|| format!("bad point {point_str}"))?;
            let (b_str, r_str) = pt.split_once(',').ok_or_else(|| format!("bad point {pt}"))?;
            let b: i64 = b_str.trim().parse().map_err(|_| format!("bad index {b_str}"))?;
            let r_str = r_str.trim();
            let r = match r_str.parse::<i64>() {
                Ok(r) => Ok(r),
                Err(_) => Err(r_str.to_string()),
            };
            entries.push(FamilyEntry { count, b, r });
        }

        let mut params = Vec::new();
        for clause in clauses {
            let (lhs, rhs) = clause
                .split_once(" in ")
                .ok_or_else(|| format!("bad parameter clause {clause}"))?;
            let lhs = lhs.trim();
            let rhs = rhs.trim();
            if let Some(inner) = lhs.strip_prefix('(').and_then(|l| l.strip_suffix(')')) {
                let names = inner.split(',').map(|n| n.trim().to_string()).collect();
                params.push(ParamRange::Tuple { names, set: rhs.to_string() });
            } else {
                let (lo, hi) = rhs
                    .split_once("..")
                    .ok_or_else(|| format!("bad range {rhs}"))?;
                let lo: i64 = lo.trim().parse().map_err(|_| format!("bad range {rhs}"))?;
                let hi = match hi.trim() {
                    "" => None,
                    h => Some(h.parse::<i64>().map_err(|_| format!("bad range {rhs}"))?),
                };
                params.push(ParamRange::Interval { name: lhs.to_string(), lo, hi });
            }
        }
        Ok(Family { entries, params })
    }
}

/// Splits on commas not nested inside parentheses.
fn split_top_level(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' => {
                depth += 1;
                cur.push(c);
            }
            ')' => {
                depth -= 1;
                cur.push(c);
            }
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur));
            }
            _ => cur.push(c),
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur);
    }
    out
}

// ---------------------------------------------------------------------------
// Table rows
// ---------------------------------------------------------------------------

/// A printed mediant merge `left + right -> merged`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrintedMerge {
    pub left: BasketPoint,
    pub right: BasketPoint,
    pub merged: BasketPoint,
}

/// One dataset row; fields absent in the source table are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub id: String,
    pub family: Option<Family>,
    pub merge: Option<PrintedMerge>,
    pub chi: Option<i64>,
    pub p2: Option<i64>,
    pub k3: Option<RatExpr>,
    /// Expected plurigenera `(m, value-expression)`.
    pub p: Vec<(u32, LinExpr)>,
    pub delta: Option<u32>,
    pub offending: Option<String>,
}

/// Loads a dataset file.
pub fn parse_table(text: &str, file: &str) -> Result<Vec<TableRow>, DatasetError> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        rows.push(parse_row(line).map_err(|msg| DatasetError::Row {
            file: file.to_string(),
            line: i + 1,
            msg,
        })?);
    }
    Ok(rows)
}

fn parse_row(line: &str) -> Result<TableRow, String> {
    let fields: Vec<&str> = line.split('|').map(str::trim).collect();
    if fields.len() != 8 {
        return Err(format!("expected 8 fields, got {}", fields.len()));
    }
    let id = fields[0].to_string();
    let (family, merge) = match fields[1] {
        "-" => (None, None),
        f if f.contains('>') => {
            let (lhs, rhs) = f.split_once('>').unwrap();
            let (l, r) = lhs
                .split_once('+')
                .ok_or_else(|| format!("bad merge {f}"))?;
            let parse_pt = |s: &str| -> Result<BasketPoint, String> {
                let inner = s
                    .trim()
                    .strip_prefix('(')
                    .and_then(|x| x.strip_suffix(')'))
                    .ok_or_else(|| format!("bad point {s}"))?;
                let (b, r) = inner.split_once(',').ok_or_else(|| format!("bad point {s}"))?;
                BasketPoint::normalize(
                    b.trim().parse().map_err(|_| format!("bad point {s}"))?,
                    r.trim().parse().map_err(|_| format!("bad point {s}"))?,
                )
                .map_err(|e| e.to_string())
            };
            (
                None,
                Some(PrintedMerge {
                    left: parse_pt(l)?,
                    right: parse_pt(r)?,
                    merged: parse_pt(rhs)?,
                }),
            )
        }
        f => (Some(Family::parse(f)?), None),
    };
    let opt = |s: &str| if s == "-" { None } else { Some(s.to_string()) };
    let parse_kv = |s: &str, key: &str| -> Result<Option<String>, String> {
        let (k, v) = s.split_once('=').ok_or_else(|| format!("expected {key}=..."))?;
        if k.trim() != key {
            return Err(format!("expected field {key}, got {k}"));
        }
        Ok(opt(v.trim()))
    };
    let chi = parse_kv(fields[2], "chi")?
        .map(|v| v.parse::<i64>().map_err(|_| format!("bad chi {v}")))
        .transpose()?;
    let p2 = parse_kv(fields[3], "p2")?
        .map(|v| v.parse::<i64>().map_err(|_| format!("bad p2 {v}")))
        .transpose()?;
    let k3 = parse_kv(fields[4], "k3")?
        .map(|v| RatExpr::parse(&v).ok_or_else(|| format!("bad k3 expression {v}")))
        .transpose()?;
    let p = match parse_kv(fields[5], "P")? {
        None => Vec::new(),
        Some(list) => {
            let mut out = Vec::new();
            for item in list.split(',') {
                let (m, v) = item
                    .split_once(':')
                    .ok_or_else(|| format!("bad P entry {item}"))?;
                let m: u32 = m.trim().parse().map_err(|_| format!("bad P index {m}"))?;
                let v = LinExpr::parse(v).ok_or_else(|| format!("bad P value {v}"))?;
                out.push((m, v));
            }
            out
        }
    };
    let delta = parse_kv(fields[6], "delta")?
        .map(|v| v.parse::<u32>().map_err(|_| format!("bad delta {v}")))
        .transpose()?;
    let offending = parse_kv(fields[7], "offending")?;
    Ok(TableRow { id, family, merge, chi, p2, k3, p, delta, offending })
}

// ---------------------------------------------------------------------------
// Row verification
// ---------------------------------------------------------------------------

/// Verification report for one row: one entry per mismatching column per
/// instantiation; empty means the row checks out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowReport {
    pub id: String,
    pub instances: usize,
    pub mismatches: Vec<String>,
}

impl RowReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// How a Table H row's printed offending condition can be replayed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HCheck {
    /// A `P_m = <negative>` condition with `m` inside the printed window.
    Window,
    /// An "Item C" condition: volume below the classified floor at the
    /// printed window's section index.
    ItemC,
    /// The condition references plurigenera outside the printed window and
    /// the basket is given only in an unusable form.
    Unverifiable,
}

/// Classifies a Table H offending label.
pub fn h_checkability(offending: &str) -> HCheck {
    if offending == "Item C" {
        return HCheck::ItemC;
    }
    if let Some((head, _)) = offending.split_once('=') {
        if let Some(m) = head.strip_prefix("P_").and_then(|m| m.parse::<u32>().ok()) {
            if (12..=24).contains(&m) {
                return HCheck::Window;
            }
        }
    }
    HCheck::Unverifiable
}

/// Verifies one row of a basket table (F or II): recomputes `K^3`, the
/// listed plurigenera, and `delta` for every instantiation.
pub fn verify_row(
    row: &TableRow,
    sets: &BTreeMap<String, SetDef>,
    m_check: u32,
    cap: i64,
    tail: Option<i64>,
) -> Result<RowReport, String> {
    let family = row
        .family
        .as_ref()
        .ok_or_else(|| format!("row {}: no basket column", row.id))?;
    let chi = row.chi.ok_or_else(|| format!("row {}: chi required", row.id))?;
    let p2 = row.p2.ok_or_else(|| format!("row {}: p2 required", row.id))?;
    let instances = family.expand(sets, cap, tail)?;
    if instances.is_empty() {
        return Err(format!("row {}: family expands to no instances", row.id));
    }
    let mut mismatches = Vec::new();
    for (binding, basket) in &instances {
        let label = if binding.is_empty() {
            String::new()
        } else {
            let vars: Vec<String> = binding.iter().map(|(k, v)| format!("{k}={v}")).collect();
            format!(" [{}]", vars.join(","))
        };
        let wb = WeightedBasket::new(basket.clone(), p2, chi);
        let vol = wb.volume();
        if let Some(k3) = &row.k3 {
            match k3.eval(binding) {
                Some(expected) if expected == vol => {}
                Some(expected) => mismatches.push(format!(
                    "{}{label}: K^3 = {vol}, table says {expected}",
                    row.id
                )),
                None => mismatches.push(format!("{}{label}: K^3 expression unbound", row.id)),
            }
        }
        let t = binding.get("t").copied().unwrap_or(0);
        match wb.pluri_profile(m_check) {
            Ok(profile) => {
                for (m, expr) in &row.p {
                    let expected = expr.eval(t);
                    match profile.get(*m) {
                        Some(v) if *v == expected.into() => {}
                        Some(v) => mismatches.push(format!(
                            "{}{label}: P_{m} = {v}, table says {expected}",
                            row.id
                        )),
                        None => mismatches
                            .push(format!("{}{label}: P_{m} outside window", row.id)),
                    }
                }
                if let Some(delta) = row.delta {
                    match profile.ps_index() {
                        Some(d) if d == delta => {}
                        d => mismatches.push(format!(
                            "{}{label}: delta = {d:?}, table says {delta}",
                            row.id
                        )),
                    }
                }
            }
            Err(e) => mismatches.push(format!("{}{label}: {e}", row.id)),
        }
    }
    Ok(RowReport { id: row.id.clone(), instances: instances.len(), mismatches })
}

/// Verifies one Table H row: the printed merge (when present) must be a
/// valid mediant with matching component sums, and the printed offending
/// label must be reproduced whenever it is checkable from printed data.
///
/// Returns the report plus the row's checkability class.
pub fn verify_h_row(row: &TableRow, floor: FloorProfile) -> (RowReport, HCheck) {
    let mut mismatches = Vec::new();
    if let Some(merge) = &row.merge {
        if !can_pack(merge.left, merge.right) {
            mismatches.push(format!(
                "{}: printed merge {} + {} is not a Farey pair",
                row.id, merge.left, merge.right
            ));
        } else if mediant(merge.left, merge.right) != merge.merged {
            mismatches.push(format!(
                "{}: mediant of {} + {} is {}, table says {}",
                row.id,
                merge.left,
                merge.right,
                mediant(merge.left, merge.right),
                merge.merged
            ));
        }
    }

    let offending = row.offending.as_deref().unwrap_or("");
    let check = h_checkability(offending);
    let profile = h_profile(row);
    match (&profile, check) {
        (Some(profile), HCheck::Window) => {
            if !property_b(profile).contains(&offending.to_string()) {
                mismatches.push(format!(
                    "{}: printed violation {offending} not reproduced",
                    row.id
                ));
            }
        }
        (Some(profile), HCheck::ItemC) => {
            let verdict = check_profile(profile, floor);
            if !verdict.violations.contains(&"K^3 below floor".to_string()) {
                mismatches.push(format!(
                    "{}: Item C rejection not reproduced (violations: {:?})",
                    row.id, verdict.violations
                ));
            }
        }
        (Some(_), HCheck::Unverifiable) => {}
        (None, _) => mismatches.push(format!("{}: no printed profile window", row.id)),
    }
    (RowReport { id: row.id.clone(), instances: 1, mismatches }, check)
}

/// Builds the printed `P_12..P_24` window of a Table H row.
fn h_profile(row: &TableRow) -> Option<PluriProfile> {
    let k3 = row.k3.as_ref()?.eval(&BTreeMap::new())?;
    if row.p.is_empty() {
        return None;
    }
    let m_start = row.p.iter().map(|(m, _)| *m).min().unwrap();
    let mut values = Vec::new();
    for (i, (m, v)) in row.p.iter().enumerate() {
        if *m != m_start + i as u32 {
            return None;
        }
        values.push(v.eval(0));
    }
    Some(PluriProfile::from_window(k3, m_start, &values))
}

/// Summary of a whole-table verification run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableReport {
    pub table: String,
    pub rows: usize,
    pub instances: usize,
    pub mismatches: Vec<String>,
    /// Table H only: ids whose offending condition cannot be replayed from
    /// printed data.
    pub unverifiable: Vec<String>,
}

impl TableReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

impl fmt::Display for TableReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "table {}: rows={}, instances={}, matched={}",
            self.table,
            self.rows,
            self.instances,
            if self.ok() { "all".to_string() } else { format!("{} mismatches", self.mismatches.len()) }
        )
    }
}

/// The names of the shipped tables.
pub const TABLE_NAMES: [&str; 7] = ["F0", "F1", "F2", "H", "II1", "II2", "II3"];

fn table_file(name: &str) -> Option<&'static str> {
    match name {
        "F0" => Some("f0.txt"),
        "F1" => Some("f1.txt"),
        "F2" => Some("f2.txt"),
        "H" => Some("h.txt"),
        "II1" => Some("ii1.txt"),
        "II2" => Some("ii2.txt"),
        "II3" => Some("ii3.txt"),
        _ => None,
    }
}

/// Loads a table dataset from `data_dir`.
pub fn load_table(data_dir: &Path, name: &str) -> Result<Vec<TableRow>, DatasetError> {
    let file = table_file(name).ok_or_else(|| DatasetError::Row {
        file: name.to_string(),
        line: 0,
        msg: format!("unknown table {name} (expected one of {TABLE_NAMES:?})"),
    })?;
    let path = data_dir.join(file);
    let text = std::fs::read_to_string(&path).map_err(|source| DatasetError::Io {
        file: path.display().to_string(),
        source,
    })?;
    parse_table(&text, file)
}

/// Loads the companion sets file from `data_dir`.
pub fn load_sets(data_dir: &Path) -> Result<BTreeMap<String, SetDef>, DatasetError> {
    let path = data_dir.join("sets.txt");
    let text = std::fs::read_to_string(&path).map_err(|source| DatasetError::Io {
        file: path.display().to_string(),
        source,
    })?;
    parse_sets(&text).map_err(|msg| DatasetError::Row {
        file: path.display().to_string(),
        line: 0,
        msg,
    })
}

/// Runs verification over every row of the named table.
///
/// `cap` bounds `r`-parameter instantiation; `tail` adds one representative
/// value per unbounded parameter range.
pub fn verify_table(
    data_dir: &Path,
    name: &str,
    m_check: u32,
    cap: i64,
    tail: Option<i64>,
) -> Result<TableReport, DatasetError> {
    let rows = load_table(data_dir, name)?;
    let sets = load_sets(data_dir)?;
    let mut report = TableReport {
        table: name.to_string(),
        rows: rows.len(),
        instances: 0,
        mismatches: Vec::new(),
        unverifiable: Vec::new(),
    };
    for row in &rows {
        if name == "H" {
            let (r, check) = verify_h_row(row, FloorProfile::Classified);
            report.instances += r.instances;
            report.mismatches.extend(r.mismatches);
            if check == HCheck::Unverifiable {
                report.unverifiable.push(row.id.clone());
            }
        } else {
            let r = verify_row(row, &sets, m_check, cap, tail).map_err(|msg| {
                DatasetError::Row { file: name.to_string(), line: 0, msg }
            })?;
            report.instances += r.instances;
            report.mismatches.extend(r.mismatches);
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Delta census over the F tables
// ---------------------------------------------------------------------------

/// The census of Table F weighted baskets grouped by section index.
#[derive(Debug, Clone)]
pub struct Census {
    /// `delta -> (table name, row id, weighted basket)`.
    pub by_delta: BTreeMap<u32, Vec<(String, String, WeightedBasket)>>,
    /// Hard inconsistencies between computed indices and table placement.
    pub errors: Vec<String>,
}

impl Census {
    pub fn min_volume(&self, delta: u32) -> Option<Rat> {
        self.by_delta
            .get(&delta)?
            .iter()
            .map(|(_, _, wb)| wb.volume())
            .min()
    }
}

/// Groups all F-table rows by computed `delta` and checks the structural
/// claims: F-1 is exactly the `delta = 15` stratum, F-2 exactly
/// `delta = 14`, no basket has `delta` 16 or 17, and the strata satisfy the
/// eventual-positivity windows (`P_m > 0` for `m >= 10` at `delta = 13`,
/// for `m >= 20` at `delta in {14, 15, 18}`).
pub fn delta_census(data_dir: &Path, m_check: u32) -> Result<Census, DatasetError> {
    let sets = load_sets(data_dir)?;
    let mut census = Census { by_delta: BTreeMap::new(), errors: Vec::new() };
    for name in ["F0", "F1", "F2"] {
        for row in load_table(data_dir, name)? {
            let family = row.family.as_ref().expect("F rows carry baskets");
            let instances = family.expand(&sets, 20, None).map_err(|msg| {
                DatasetError::Row { file: name.to_string(), line: 0, msg }
            })?;
            for (_, basket) in instances {
                let wb = WeightedBasket::new(
                    basket,
                    row.p2.unwrap_or(0),
                    row.chi.expect("F rows carry chi"),
                );
                let profile = match wb.pluri_profile(m_check) {
                    Ok(p) => p,
                    Err(e) => {
                        census.errors.push(format!("{name} row {}: {e}", row.id));
                        continue;
                    }
                };
                let delta = match profile.ps_index() {
                    Some(d) => d,
                    None => {
                        census
                            .errors
                            .push(format!("{name} row {}: no delta within window", row.id));
                        continue;
                    }
                };
                match name {
                    "F1" if delta != 15 => census
                        .errors
                        .push(format!("F1 row {}: delta = {delta}, expected 15", row.id)),
                    "F2" if delta != 14 => census
                        .errors
                        .push(format!("F2 row {}: delta = {delta}, expected 14", row.id)),
                    _ => {}
                }
                let from = if delta == 13 { 10 } else { 20 };
                for m in from..=m_check {
                    if let Some(v) = profile.get(m) {
                        if *v <= 0.into() {
                            census.errors.push(format!(
                                "{name} row {}: P_{m} = {v} not positive",
                                row.id
                            ));
                        }
                    }
                }
                census
                    .by_delta
                    .entry(delta)
                    .or_default()
                    .push((name.to_string(), row.id.clone(), wb));
            }
        }
    }
    if !census.by_delta.get(&16).map_or(true, Vec::is_empty)
        || !census.by_delta.get(&17).map_or(true, Vec::is_empty)
    {
        census.errors.push("baskets found at delta 16 or 17".to_string());
    }
    Ok(census)
}

// ---------------------------------------------------------------------------
// Initial-basket enumeration
// ---------------------------------------------------------------------------

/// Constraints for the initial-basket enumerator.
#[derive(Debug, Clone)]
pub struct EnumConstraints {
    pub chi_lo: i64,
    pub chi_hi: i64,
    pub p2: i64,
    /// `(m, cap)` pairs; the defaults are `P_3 <= 3, P_4 <= 5, P_5 <= 7,
    /// P_6 <= 13`.
    pub pm_caps: Vec<(u32, i64)>,
    pub r_max: i64,
    pub m_check: u32,
    pub floor: FloorProfile,
}

impl EnumConstraints {
    pub fn new(chi_lo: i64, chi_hi: i64, p2: i64, r_max: i64) -> Self {
        EnumConstraints {
            chi_lo,
            chi_hi,
            p2,
            pm_caps: vec![(3, 3), (4, 5), (5, 7), (6, 13)],
            r_max,
            m_check: 24,
            floor: FloorProfile::Classified,
        }
    }
}

/// One enumerated candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub basket: Basket,
    pub chi: i64,
    pub profile: PluriProfile,
}

/// Enumerates all admissible initial baskets (points `(1, r)` only,
/// `2 <= r <= r_max`) for every `chi` in range.
///
/// Exhaustiveness: every point `(1, r)` lowers `P_3` by exactly 1 and
/// `K^3` by `1 - 1/r > 0`, and lowers `P_4`, `P_5`, `P_6` by at least 3,
/// 7, 13; the depth-first search therefore prunes exactly when `K^3 <= 0`
/// or any of `P_3..P_6` falls below 0, which only ever discards extensions
/// that stay invalid.  Survivors then run the full admissibility filter.
/// The search partitions on `(chi, n_{1,2})` across worker threads; the
/// result is sorted and deterministic regardless of worker count.
pub fn enumerate_initial(c: &EnumConstraints) -> Vec<Candidate> {
    let mut jobs = Vec::new();
    for chi in c.chi_lo..=c.chi_hi {
        // P_3 = 5 p2 + 10 chi - n >= 0 bounds the total point count
        let n_max = 5 * c.p2 + 10 * chi;
        for n2 in 0..=n_max.max(0) {
            jobs.push((chi, n2));
        }
    }
    let mut out: Vec<Candidate> = jobs
        .into_par_iter()
        .flat_map(|(chi, n2)| enumerate_partition(c, chi, n2))
        .collect();
    out.sort_by(|a, b| (a.chi, &a.basket).cmp(&(b.chi, &b.basket)));
    out
}

/// Enumerates the partition with `n_{1,2} = n2` fixed.
fn enumerate_partition(c: &EnumConstraints, chi: i64, n2: i64) -> Vec<Candidate> {
    let base = int(2 * c.p2 + 6 * chi);
    let mut counts: Vec<(i64, i64)> = vec![(2, n2)];
    let mut out = Vec::new();
    let k3 = &base - int(n2) * rat(1, 2);
    if k3.is_positive() || c.r_max >= 3 {
        dfs(c, chi, 3, k3, &mut counts, &mut out);
    }
    out
}

fn dfs(
    c: &EnumConstraints,
    chi: i64,
    r: i64,
    k3: Rat,
    counts: &mut Vec<(i64, i64)>,
    out: &mut Vec<Candidate>,
) {
    // linear plurigenus values for all-(1,r) baskets; coefficients derived
    // once from the local contributions (see module docs)
    let n: i64 = counts.iter().map(|(_, k)| k).sum();
    let n2 = counts.iter().find(|(r, _)| *r == 2).map_or(0, |(_, k)| *k);
    let n3 = counts.iter().find(|(r, _)| *r == 3).map_or(0, |(_, k)| *k);
    let n4 = counts.iter().find(|(r, _)| *r == 4).map_or(0, |(_, k)| *k);
    let p3 = 5 * c.p2 + 10 * chi - n;
    let p4 = 14 * c.p2 + 35 * chi - 4 * n + n2;
    let p5 = 30 * c.p2 + 81 * chi - 10 * n + 3 * n2 + n3;
    let p6 = 55 * c.p2 + 154 * chi - 20 * n + 7 * n2 + 3 * n3 + n4;
    if p3 < 0 || p4 < 0 || p5 < 0 || p6 < 0 {
        return;
    }
    let cap = |m: u32| {
        c.pm_caps
            .iter()
            .find(|(i, _)| *i == m)
            .map_or(i64::MAX / 2, |(_, cap)| *cap)
    };
    let (cap3, cap4, cap5, cap6) = (cap(3), cap(4), cap(5), cap(6));

    // each count vector reaches r = r_max + 1 exactly once (via the k = 0
    // chain), so acceptance happens there and nowhere else
    if r > c.r_max {
        if k3.is_positive() && p3 <= cap3 && p4 <= cap4 && p5 <= cap5 && p6 <= cap6 {
            let mut points = Vec::new();
            for &(r, k) in counts.iter() {
                points.extend(std::iter::repeat(BasketPoint::new(1, r)).take(k as usize));
            }
            let basket = Basket::from_points(points);
            let wb = WeightedBasket::new(basket.clone(), c.p2, chi);
            if let Ok(profile) = wb.pluri_profile(c.m_check) {
                let verdict = check_profile(&profile, c.floor);
                if verdict.admissible {
                    out.push(Candidate { basket, chi, profile });
                }
            }
        }
        return;
    }

    // Feasibility band for the number m of further points, all with index
    // >= r >= 3.  Per point: P_3 drops by exactly 1; P_4 by exactly 4; P_5
    // by 9 (index 3) or 10 (index >= 4); P_6 by 17, 19, or 20 (index 3, 4,
    // >= 5); K^3 by at least 1 - 1/r.  An extension can only reach the cap
    // window if some m satisfies every interval constraint at once.
    let (min5, max5) = if r == 3 { (9, 10) } else { (10, 10) };
    let (min6, max6) = match r {
        3 => (17, 20),
        4 => (19, 20),
        _ => (20, 20),
    };
    let ceil_div = |a: i64, b: i64| if a <= 0 { 0 } else { (a + b - 1) / b };
    let m_lo = [p3 - cap3, ceil_div(p4 - cap4, 4), ceil_div(p5 - cap5, max5), ceil_div(p6 - cap6, max6)]
        .into_iter()
        .max()
        .unwrap()
        .max(0);
    // largest m with m * (1 - 1/r) < k3, i.e. m < k3 * r / (r - 1)
    let m_k3 = {
        let t = &k3 * rat(r, r - 1);
        if t <= int(0) {
            -1
        } else {
            let q = t.numer() / t.denom();
            let exact = (t.numer() % t.denom()).is_zero();
            i64::try_from(&q).unwrap_or(i64::MAX / 2) - i64::from(exact)
        }
    };
    let m_hi = [p3, p4 / 4, p5 / min5, p6 / min6, m_k3].into_iter().min().unwrap();
    if m_lo > m_hi {
        return;
    }

    // try every count of (1, r), including zero, in ascending order
    let weight = int(1) - rat(1, r);
    for k in 0..=m_hi {
        let k3_here = &k3 - int(k) * &weight;
        if !k3_here.is_positive() && k > 0 {
            break;
        }
        if k > 0 {
            counts.push((r, k));
        }
        dfs(c, chi, r + 1, k3_here, counts, out);
        if k > 0 {
            counts.pop();
        }
    }
}
