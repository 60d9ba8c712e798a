//! `B^(5)` synthesis from plurigenus data.
//!
//! Given `χ`, `P2..P6` and `σ5` (the number of `(1,r)` entries with `r ≥ 5`),
//!
//! ```text
//! n(1,2) = 3χ + 6P2 − 3P3 +  P4 − 2P5 + P6 + σ5
//! n(2,5) = 2χ       −  P3       + 2P5 − P6 − σ5
//! n(1,3) = 2χ + 2P2 + 3P3 − 3P4 −  P5 + P6 + σ5
//! n(1,4) =  χ − 3P2 +  P3 + 2P4 −  P5      − σ5
//! ```
//!
//! and the tail `(1,r)` entries pass through unchanged. [`enumerate_b5`] scans
//! a box of plurigenus data and keeps every feasible basket whose own `χ_m`
//! reproduces `P3..P6`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basket::{Basket, Pair, WeightedBasket};
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PlurigenusData {
    pub chi: i64,
    /// `P2, P3, P4, P5, P6`.
    pub p: [i64; 5],
    pub sigma5: i64,
    /// Tail entries `(1,r)`, keyed by `r ≥ 5`.
    #[serde(default)]
    pub tail: BTreeMap<u32, u32>,
}

impl PlurigenusData {
    /// Data without tail entries (`σ5 = 0`).
    pub fn untailed(chi: i64, p: [i64; 5]) -> Self {
        PlurigenusData {
            chi,
            p,
            sigma5: 0,
            tail: BTreeMap::new(),
        }
    }

    /// `P_m` for `2 ≤ m ≤ 6`.
    pub fn pm(&self, m: u32) -> i64 {
        assert!((2..=6).contains(&m));
        self.p[m as usize - 2]
    }

    /// `2χ − P3 + 2P5 − P6`, the largest admissible `σ5`.
    pub fn sigma5_bound(&self) -> i64 {
        sigma5_bound(self.chi, &self.p)
    }
}

fn sigma5_bound(chi: i64, p: &[i64; 5]) -> i64 {
    let [_, p3, _, p5, p6] = *p;
    2 * chi - p3 + 2 * p5 - p6
}

fn raw_coefficients(chi: i64, p: &[i64; 5], s: i64) -> [i64; 4] {
    let [p2, p3, p4, p5, p6] = *p;
    [
        3 * chi + 6 * p2 - 3 * p3 + p4 - 2 * p5 + p6 + s,
        2 * chi - p3 + 2 * p5 - p6 - s,
        2 * chi + 2 * p2 + 3 * p3 - 3 * p4 - p5 + p6 + s,
        chi - 3 * p2 + p3 + 2 * p4 - p5 - s,
    ]
}

const COEFF_NAMES: [(&str, &str); 4] = [
    ("n(1,2)", "3χ+6P2−3P3+P4−2P5+P6+σ5"),
    ("n(2,5)", "2χ−P3+2P5−P6−σ5"),
    ("n(1,3)", "2χ+2P2+3P3−3P4−P5+P6+σ5"),
    ("n(1,4)", "χ−3P2+P3+2P4−P5−σ5"),
];

const HEAD: [(u32, u32); 4] = [(1, 2), (2, 5), (1, 3), (1, 4)];

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct B5Result {
    pub basket: Basket,
    /// `n(1,2), n(2,5), n(1,3), n(1,4)`.
    pub coefficients: [i64; 4],
    pub k3: Rational,
}

/// The four head multiplicities, checking everything except the tail.
pub fn head_coefficients(d: &PlurigenusData) -> Result<[i64; 4]> {
    let infeasible = |relation: String| Err(Error::Infeasible { relation });
    for m in 2..=6 {
        if d.pm(m) < 0 {
            return infeasible(format!("P{m} ≥ 0 violated by P{m} = {}", d.pm(m)));
        }
    }
    if d.sigma5 < 0 {
        return infeasible(format!("σ5 ≥ 0 violated by σ5 = {}", d.sigma5));
    }
    let bound = d.sigma5_bound();
    if d.sigma5 > bound {
        return infeasible(format!(
            "σ5 ≤ 2χ−P3+2P5−P6 = {bound} violated by σ5 = {}",
            d.sigma5
        ));
    }
    let coefficients = raw_coefficients(d.chi, &d.p, d.sigma5);
    for (n, (name, formula)) in coefficients.iter().zip(COEFF_NAMES) {
        if *n < 0 {
            return infeasible(format!("{name} = {formula} = {n} < 0"));
        }
    }
    Ok(coefficients)
}

/// Builds `B^(5)` from the displayed formulas, or names the relation that fails.
pub fn b5_coefficients(d: &PlurigenusData) -> Result<B5Result> {
    let infeasible = |relation: String| Err(Error::Infeasible { relation });
    let coefficients = head_coefficients(d)?;
    let tail_total: i64 = d.tail.values().map(|&k| k as i64).sum();
    if tail_total != d.sigma5 {
        return infeasible(format!(
            "tail multiplicities sum to {tail_total}, but σ5 = {}",
            d.sigma5
        ));
    }
    let mut basket = Basket::new();
    for (&n, (b, r)) in coefficients.iter().zip(HEAD) {
        basket.add(pair(b, r)?, n as u32);
    }
    for (&r, &k) in &d.tail {
        if r < 5 {
            return infeasible(format!("tail index r = {r} < 5"));
        }
        basket.add(pair(1, r)?, k);
    }
    let k3 = WeightedBasket::new(basket.clone(), d.p[0], d.chi).k3();
    Ok(B5Result {
        basket,
        coefficients,
        k3,
    })
}

/// `K³` before the tail entries' deficits are subtracted.
fn head_k3(chi: i64, p: &[i64; 5], coefficients: &[i64; 4]) -> Rational {
    let mut k3 = Rational::from_int(2 * p[0] + 6 * chi);
    for (&n, (b, r)) in coefficients.iter().zip(HEAD) {
        k3 -= &Rational::new(n * (b * (r - b)) as i64, r as i64);
    }
    k3
}

fn pair(b: u32, r: u32) -> Result<Pair> {
    Pair::new(b as i64, r as i64)
}

/// `true` when `χ_m` of the result equals `P_m` of the data for `m = 3..6`.
pub fn round_trips(d: &PlurigenusData, res: &B5Result) -> bool {
    let wb = WeightedBasket::new(res.basket.clone(), d.p[0], d.chi);
    (3..=6).all(|m| wb.plurigenus_with_k3(m, &res.k3) == Rational::from_int(d.pm(m)))
}

/// Closed integer interval; empty when `lo > hi`. Serialized as `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "(i64, i64)", into = "(i64, i64)")]
pub struct IntRange {
    pub lo: i64,
    pub hi: i64,
}

impl IntRange {
    pub const fn new(lo: i64, hi: i64) -> Self {
        IntRange { lo, hi }
    }

    pub const fn point(v: i64) -> Self {
        IntRange { lo: v, hi: v }
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn contains(&self, v: i64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

impl From<(i64, i64)> for IntRange {
    fn from((lo, hi): (i64, i64)) -> Self {
        IntRange { lo, hi }
    }
}

impl From<IntRange> for (i64, i64) {
    fn from(r: IntRange) -> Self {
        (r.lo, r.hi)
    }
}

impl std::fmt::Display for IntRange {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct B5Ranges {
    pub chi: IntRange,
    /// Boxes for `P2..P6`.
    pub p: [IntRange; 5],
}

impl B5Ranges {
    pub fn point(chi: i64, p: [i64; 5]) -> Self {
        B5Ranges {
            chi: IntRange::point(chi),
            p: p.map(IntRange::point),
        }
    }
}

pub type CandidateFilter = dyn Fn(&PlurigenusData, &B5Result) -> bool + Send + Sync;

#[derive(Clone)]
pub struct B5Search<'a> {
    pub ranges: B5Ranges,
    /// Largest `r` allowed in a tail entry `(1,r)`.
    pub tail_r_max: u32,
    /// Pin `σ5`; free (up to its bound) when `None`.
    pub sigma5: Option<i64>,
    /// Candidates need `K³ ≥ floor`; always `K³ > 0`. Used to prune tails.
    pub k3_floor: Option<Rational>,
    pub extra_filters: Vec<&'a CandidateFilter>,
}

impl<'a> B5Search<'a> {
    pub fn new(ranges: B5Ranges) -> Self {
        B5Search {
            ranges,
            tail_r_max: 30,
            sigma5: None,
            k3_floor: None,
            extra_filters: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct B5Enumeration {
    /// Feasible candidates, sorted by their plurigenus data.
    pub candidates: Vec<(PlurigenusData, B5Result)>,
    /// Candidates that would appear if `tail_r_max` were one larger; nonzero
    /// means the cutoff is binding.
    pub boundary_rejections: usize,
}

/// All feasible `B^(5)` in the box; see [`B5Search`].
pub fn enumerate_b5(search: &B5Search<'_>) -> B5Enumeration {
    let mut grid = Vec::new();
    for chi in search.ranges.chi.iter() {
        for p2 in search.ranges.p[0].iter() {
            for p3 in search.ranges.p[1].iter() {
                for p4 in search.ranges.p[2].iter() {
                    for p5 in search.ranges.p[3].iter() {
                        for p6 in search.ranges.p[4].iter() {
                            grid.push((chi, [p2, p3, p4, p5, p6]));
                        }
                    }
                }
            }
        }
    }
    let per_point: Vec<(Vec<_>, usize)> = grid
        .par_iter()
        .map(|&(chi, p)| point_candidates(search, chi, p))
        .collect();
    let mut candidates = Vec::new();
    let mut boundary_rejections = 0;
    for (c, b) in per_point {
        candidates.extend(c);
        boundary_rejections += b;
    }
    candidates.sort();
    B5Enumeration {
        candidates,
        boundary_rejections,
    }
}

fn point_candidates(
    search: &B5Search<'_>,
    chi: i64,
    p: [i64; 5],
) -> (Vec<(PlurigenusData, B5Result)>, usize) {
    let mut out = Vec::new();
    let mut boundary = 0;
    if p.iter().any(|&v| v < 0) {
        return (out, 0);
    }
    let bound = sigma5_bound(chi, &p);
    let sigmas = match search.sigma5 {
        Some(s) => s..=s.min(bound),
        None => 0..=bound,
    };
    for s in sigmas {
        if s < 0 || raw_coefficients(chi, &p, s).iter().any(|&n| n < 0) {
            continue;
        }
        let head = PlurigenusData {
            chi,
            p,
            sigma5: s,
            tail: BTreeMap::new(),
        };
        let base = head_k3(chi, &p, &raw_coefficients(chi, &p, s));
        let floor = search.k3_floor.clone();
        let extended = search.tail_r_max + 1;
        for tail in tails(s as u32, 5, extended, &base, floor.as_ref()) {
            let at_boundary = tail.contains_key(&extended);
            let d = PlurigenusData { tail, ..head.clone() };
            let Ok(res) = b5_coefficients(&d) else {
                continue;
            };
            if !accept(search, &d, &res) {
                continue;
            }
            if at_boundary {
                boundary += 1;
            } else {
                out.push((d, res));
            }
        }
    }
    (out, boundary)
}

fn accept(search: &B5Search<'_>, d: &PlurigenusData, res: &B5Result) -> bool {
    res.k3.is_positive()
        && search.k3_floor.as_ref().is_none_or(|f| &res.k3 >= f)
        && round_trips(d, res)
        && search.extra_filters.iter().all(|f| f(d, res))
}

/// Multisets of `count` indices in `lo..=hi` whose total deficit
/// `Σ (r−1)/r` keeps `base − deficit` above the floor (and above zero).
fn tails(
    count: u32,
    lo: u32,
    hi: u32,
    base: &Rational,
    floor: Option<&Rational>,
) -> Vec<BTreeMap<u32, u32>> {
    let cost = |r: u32| Rational::new(r as i64 - 1, r as i64);
    // Budget is strict against zero and weak against an explicit floor.
    let admissible = |left: &Rational| match floor {
        Some(f) if f.is_positive() => left >= f,
        _ => left.is_positive(),
    };
    let mut out = Vec::new();
    let mut cur: Vec<u32> = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn rec(
        count: u32,
        start: u32,
        hi: u32,
        left: Rational,
        cur: &mut Vec<u32>,
        out: &mut Vec<BTreeMap<u32, u32>>,
        cost: &dyn Fn(u32) -> Rational,
        admissible: &dyn Fn(&Rational) -> bool,
    ) {
        if cur.len() as u32 == count {
            let mut m = BTreeMap::new();
            for &r in cur.iter() {
                *m.entry(r).or_insert(0) += 1;
            }
            out.push(m);
            return;
        }
        let remaining = (count - cur.len() as u32) as i64;
        for r in start..=hi {
            // Costs grow with r, so once the cheapest completion fails, stop.
            if !admissible(&(&left - &(cost(r) * remaining))) {
                break;
            }
            cur.push(r);
            rec(count, r, hi, &left - &cost(r), cur, out, cost, admissible);
            cur.pop();
        }
    }
    rec(count, lo, hi, base.clone(), &mut cur, &mut out, &cost, &admissible);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(chi: i64, p: [i64; 5], sigma5: i64) -> PlurigenusData {
        PlurigenusData {
            sigma5,
            ..PlurigenusData::untailed(chi, p)
        }
    }

    #[test]
    fn b5_of_the_fifth_basket() {
        let r = b5_coefficients(&data(1, [1, 1, 2, 2, 3], 0)).unwrap();
        assert_eq!(r.coefficients, [7, 2, 2, 1]);
        assert_eq!(r.basket.to_string(), "7x(1,2),2x(1,3),(1,4),2x(2,5)");
        assert_eq!(r.k3, Rational::new(1, 60));
        assert!(round_trips(&data(1, [1, 1, 2, 2, 3], 0), &r));
    }

    #[test]
    fn other_coefficients() {
        let r = b5_coefficients(&data(1, [1, 1, 2, 3, 3], 0)).unwrap();
        assert_eq!(r.coefficients, [5, 4, 1, 0]);
        let r = b5_coefficients(&data(1, [1, 1, 2, 2, 4], 0)).unwrap();
        assert_eq!(r.coefficients, [8, 1, 3, 1]);
    }

    #[test]
    fn infeasible_relations_are_named() {
        let e = b5_coefficients(&data(1, [1, 1, 2, 2, 3], 3)).unwrap_err();
        let Error::Infeasible { relation } = e else {
            panic!()
        };
        assert!(relation.contains("σ5 ≤ 2χ−P3+2P5−P6 = 2"), "{relation}");

        let e = b5_coefficients(&data(0, [0, 0, 0, 0, 0], 0));
        assert!(e.is_ok());
        let Err(Error::Infeasible { relation }) = b5_coefficients(&data(0, [1, 0, 0, 0, 0], 0)) else {
            panic!()
        };
        assert!(relation.starts_with("n(1,4)"), "{relation}");

        // σ5 within bound, but no tail given.
        let e = b5_coefficients(&data(1, [1, 1, 2, 2, 3], 1)).unwrap_err();
        assert!(e.to_string().contains("tail"), "{e}");
    }

    #[test]
    fn tail_entries_pass_through() {
        let mut d = data(1, [1, 1, 2, 2, 3], 1);
        d.tail.insert(7, 1);
        let r = b5_coefficients(&d).unwrap();
        assert_eq!(r.coefficients, [8, 1, 3, 0]);
        assert_eq!(r.basket.multiplicity(&Pair::new(1, 7).unwrap()), 1);
        assert!(round_trips(&d, &r));
    }

    #[test]
    fn point_box_has_exactly_b5() {
        let mut s = B5Search::new(B5Ranges::point(1, [1, 1, 2, 2, 3]));
        s.tail_r_max = 10;
        let e = enumerate_b5(&s);
        assert_eq!(e.candidates.len(), 1);
        assert_eq!(e.candidates[0].1.coefficients, [7, 2, 2, 1]);
        assert_eq!(e.boundary_rejections, 0);
    }

    #[test]
    fn empty_box() {
        let mut r = B5Ranges::point(1, [1, 1, 2, 2, 3]);
        r.p[3] = IntRange::new(3, 2);
        assert!(enumerate_b5(&B5Search::new(r)).candidates.is_empty());
    }

    #[test]
    fn tail_enumeration_respects_budget() {
        // Budget 9/5 − ε admits two tail entries only when both are cheap.
        let base = Rational::new(9, 5);
        let ts = tails(2, 5, 6, &base, None);
        // (5,5): 8/5, (5,6): 4/5 + 5/6 = 49/30, (6,6): 5/3; all < 9/5.
        assert_eq!(ts.len(), 3);
        let ts = tails(2, 5, 6, &base, Some(&Rational::new(1, 6)));
        assert_eq!(ts.len(), 2);
    }
}
