//! Baskets of terminal quotient singularities and Reid's plurigenus formula.
//!
//! A [`Pair`] `(b, r)` stands for a singularity of type `1/r(1, -1, b)`. A
//! [`Basket`] is a multiset of pairs, and a [`WeightedBasket`] adds the two
//! integers `P2` and `χ(O_X)` which, together with the basket, determine the
//! canonical volume and every plurigenus `P_m` for `m ≥ 2`.
//!
//! Text form of a basket: comma separated terms, each `(b,r)` or `k x (b,r)`,
//! whitespace insensitive. The canonical rendering lists entries by `(r, b)`
//! with no spaces, e.g. `7x(1,2),2x(1,3),(1,4),2x(2,5)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A basket entry `(b, r)` with `gcd(b, r) = 1` and `1 ≤ b ≤ r/2`.
///
/// Ordering is by `(r, b)`, which is the canonical basket order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pair {
    r: u32,
    b: u32,
}

impl Pair {
    /// Validates and normalizes `(b, r)` to `(min(b, r - b), r)`.
    pub fn new(b: i64, r: i64) -> Result<Pair> {
        normalize_pair(b, r)
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// `b(r - b) / r`, the contribution of this pair to `K³`'s correction.
    pub fn deficit(&self) -> Rational {
        let (b, r) = (self.b as i64, self.r as i64);
        Rational::new(b * (r - b), r)
    }

    /// `b1·r2 − b2·r1`.
    pub fn det(&self, other: &Pair) -> i64 {
        self.b as i64 * other.r as i64 - other.b as i64 * self.r as i64
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.b, self.r)
    }
}

impl FromStr for Pair {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match parse_terms(s)?.as_slice() {
            [t] if t.mult == 1 => normalize_pair(t.b, t.r),
            _ => Err(Error::Parse {
                pos: 0,
                msg: "expected a single pair `(b,r)`".into(),
            }),
        }
    }
}

impl Serialize for Pair {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Pair {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn normalize_pair(b: i64, r: i64) -> Result<Pair> {
    let invalid = |reason: &str| Error::InvalidPair {
        b,
        r,
        reason: reason.to_string(),
    };
    if r < 2 {
        return Err(invalid("local index r must be at least 2"));
    }
    if b < 1 || b > r - 1 {
        return Err(invalid("b must lie in [1, r-1]"));
    }
    if b.gcd(&r) != 1 {
        return Err(invalid("b and r are not coprime"));
    }
    if r > u32::MAX as i64 {
        return Err(invalid("local index too large"));
    }
    Ok(Pair {
        b: b.min(r - b) as u32,
        r: r as u32,
    })
}

/// Reid's local correction term `Σ_{j=1}^{m-1} v_j (r − v_j) / 2r` with
/// `v_j = j·b mod r`.
pub fn l_pair(p: Pair, m: u32) -> Rational {
    let (b, r) = (p.b as u64, p.r as u64);
    let mut acc: u128 = 0;
    let mut v = 0u64;
    for _ in 1..m {
        v = (v + b) % r;
        acc += (v * (r - v)) as u128;
    }
    Rational::from_bigint(acc.into()) / Rational::from_int(2 * r as i64)
}

/// A finite multiset of pairs, stored in canonical `(r, b)` order.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Basket {
    entries: BTreeMap<Pair, u32>,
}

impl Basket {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries<I: IntoIterator<Item = (Pair, u32)>>(iter: I) -> Self {
        let mut basket = Basket::new();
        for (p, k) in iter {
            basket.add(p, k);
        }
        basket
    }

    /// Builds a basket from raw `(k, b, r)` triples, normalizing every pair.
    pub fn from_triples<I: IntoIterator<Item = (u32, i64, i64)>>(iter: I) -> Result<Self> {
        let mut basket = Basket::new();
        for (k, b, r) in iter {
            basket.add(normalize_pair(b, r)?, k);
        }
        Ok(basket)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let terms = parse_terms(text)?;
        Basket::from_triples(terms.iter().map(|t| (t.mult, t.b, t.r)))
    }

    pub fn add(&mut self, p: Pair, k: u32) {
        if k > 0 {
            *self.entries.entry(p).or_insert(0) += k;
        }
    }

    /// Removes one copy of `p`; returns false if absent.
    pub fn remove_one(&mut self, p: &Pair) -> bool {
        match self.entries.get_mut(p) {
            Some(k) if *k > 1 => {
                *k -= 1;
                true
            }
            Some(_) => {
                self.entries.remove(p);
                true
            }
            None => false,
        }
    }

    pub fn multiplicity(&self, p: &Pair) -> u32 {
        self.entries.get(p).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (Pair, u32)> + '_ {
        self.entries.iter().map(|(p, k)| (*p, *k))
    }

    pub fn pairs(&self) -> impl Iterator<Item = Pair> + '_ {
        self.entries.keys().copied()
    }

    /// Number of distinct pairs.
    pub fn distinct(&self) -> usize {
        self.entries.len()
    }

    /// Number of singular points, with multiplicity.
    pub fn count(&self) -> u64 {
        self.entries.values().map(|&k| k as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `Σ b_i (r_i − b_i) / r_i`.
    pub fn deficit(&self) -> Rational {
        self.entries
            .iter()
            .map(|(p, &k)| p.deficit() * k as i64)
            .sum()
    }

    /// `Σ l_pair(p_i, m)`.
    pub fn local_terms(&self, m: u32) -> Rational {
        self.entries
            .iter()
            .map(|(p, &k)| l_pair(*p, m) * k as i64)
            .sum()
    }

    /// The Cartier index `r_X`: lcm of the local indices, 1 when empty.
    pub fn cartier_index(&self) -> u64 {
        self.entries
            .keys()
            .fold(1u64, |acc, p| acc.lcm(&(p.r as u64)))
    }
}

pub fn cartier_index(b: &Basket) -> u64 {
    b.cartier_index()
}

impl fmt::Display for Basket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (p, k)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            if *k == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{k}x{p}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Basket {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Basket::parse(s)
    }
}

impl Serialize for Basket {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Basket {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One syntactic term `k x (b,r)` as written, before any validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Term {
    pub mult: u32,
    pub b: i64,
    pub r: i64,
    /// Byte offset of the term in the source text.
    pub pos: usize,
}

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        match self.peek() {
            Some(x) if x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(x) => self.err(format!("expected `{}`, found `{}`", c as char, x as char)),
            None => self.err(format!("expected `{}`, found end of input", c as char)),
        }
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if self.src.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        match text.parse::<i64>() {
            Ok(v) => Ok(v),
            Err(_) => {
                self.pos = start;
                self.err("expected an integer")
            }
        }
    }
}

/// Splits basket text into terms. Only syntax is checked here; pair
/// validity is left to [`Basket::from_triples`] or [`validate_terms`].
pub fn parse_terms(text: &str) -> Result<Vec<Term>> {
    let mut cur = Cursor {
        src: text.as_bytes(),
        pos: 0,
    };
    let mut terms = Vec::new();
    if cur.peek().is_none() {
        return Ok(terms);
    }
    loop {
        let pos = {
            cur.skip_ws();
            cur.pos
        };
        let mult = if cur.peek() == Some(b'(') {
            1
        } else {
            let k = cur.int()?;
            if k < 1 || k > u32::MAX as i64 {
                cur.pos = pos;
                return cur.err("multiplicity must be a positive integer");
            }
            cur.expect(b'x')?;
            k as u32
        };
        cur.expect(b'(')?;
        let b = cur.int()?;
        cur.expect(b',')?;
        let r = cur.int()?;
        cur.expect(b')')?;
        terms.push(Term { mult, b, r, pos });
        match cur.peek() {
            None => break,
            Some(b',') => cur.pos += 1,
            Some(c) => return cur.err(format!("expected `,` or end of input, found `{}`", c as char)),
        }
    }
    Ok(terms)
}

/// The full weighted-basket datum `{B_X, P2, χ(O_X)}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WeightedBasket {
    pub basket: Basket,
    pub p2: i64,
    pub chi: i64,
}

impl WeightedBasket {
    pub fn new(basket: Basket, p2: i64, chi: i64) -> Self {
        WeightedBasket { basket, p2, chi }
    }

    /// `K³ = 2·P2 + 6·χ − Σ b_i(r_i − b_i)/r_i`.
    pub fn k3(&self) -> Rational {
        Rational::from_int(2 * self.p2 + 6 * self.chi) - self.basket.deficit()
    }

    /// `χ_m = m(m−1)(2m−1)/12 · K³ + (1−2m)·χ + Σ l(p_i, m)` for `m ≥ 2`.
    ///
    /// Panics when `m < 2`.
    pub fn plurigenus(&self, m: u32) -> Rational {
        self.plurigenus_with_k3(m, &self.k3())
    }

    /// [`Self::plurigenus`] with `K³` already computed; `k3` must equal `self.k3()`.
    pub fn plurigenus_with_k3(&self, m: u32, k3: &Rational) -> Rational {
        assert!(m >= 2, "plurigenus is defined for m >= 2");
        let mi = m as i64;
        let poly = Rational::new(mi * (mi - 1) * (2 * mi - 1), 12) * k3;
        poly + Rational::from_int((1 - 2 * mi) * self.chi) + self.basket.local_terms(m)
    }

    /// `(χ_2, …, χ_upto)`.
    pub fn plurigenera(&self, upto: u32) -> Vec<Rational> {
        let k3 = self.k3();
        (2..=upto).map(|m| self.plurigenus_with_k3(m, &k3)).collect()
    }

    pub fn cartier_index(&self) -> u64 {
        self.basket.cartier_index()
    }

    pub fn validate(&self, opts: &ValidateOptions) -> ValidityReport {
        let mut failures = Vec::new();
        let k3 = self.k3();
        check_numeric(self, &k3, opts, &mut failures);
        ValidityReport {
            failures,
            k3: Some(k3),
        }
    }
}

pub fn k3(wb: &WeightedBasket) -> Rational {
    wb.k3()
}

pub fn plurigenus(wb: &WeightedBasket, m: u32) -> Rational {
    wb.plurigenus(m)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidateOptions {
    /// Require χ_m to be a non-negative integer for `2 ≤ m ≤ n`.
    pub integrality_upto: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Failure {
    InvalidPair { b: i64, r: i64, reason: String },
    NonPositiveK3 { k3: Rational },
    NonIntegralPlurigenus { m: u32, value: Rational },
    NegativePlurigenus { m: u32, value: Rational },
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::InvalidPair { b, r, reason } => write!(f, "invalid pair ({b},{r}): {reason}"),
            Failure::NonPositiveK3 { k3 } => write!(f, "K^3 = {k3} <= 0"),
            Failure::NonIntegralPlurigenus { m, value } => {
                write!(f, "P_{m} = {value} is not an integer")
            }
            Failure::NegativePlurigenus { m, value } => write!(f, "P_{m} = {value} < 0"),
        }
    }
}

/// Failed predicates of a weighted basket; an empty list means valid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub failures: Vec<Failure>,
    /// `None` when the basket could not be built.
    pub k3: Option<Rational>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

fn check_numeric(
    wb: &WeightedBasket,
    k3: &Rational,
    opts: &ValidateOptions,
    failures: &mut Vec<Failure>,
) {
    if !k3.is_positive() {
        failures.push(Failure::NonPositiveK3 { k3: k3.clone() });
    }
    if let Some(upto) = opts.integrality_upto {
        for m in 2..=upto {
            let value = wb.plurigenus_with_k3(m, k3);
            if !value.is_integer() {
                failures.push(Failure::NonIntegralPlurigenus { m, value });
            } else if value.is_negative() {
                failures.push(Failure::NegativePlurigenus { m, value });
            }
        }
    }
}

/// Validates raw terms, reporting every bad pair rather than stopping at
/// the first one.
pub fn validate_terms(terms: &[Term], p2: i64, chi: i64, opts: &ValidateOptions) -> ValidityReport {
    let mut failures = Vec::new();
    let mut basket = Basket::new();
    for t in terms {
        match normalize_pair(t.b, t.r) {
            Ok(p) => basket.add(p, t.mult),
            Err(Error::InvalidPair { b, r, reason }) => {
                failures.push(Failure::InvalidPair { b, r, reason })
            }
            Err(_) => unreachable!("normalize_pair only reports invalid pairs"),
        }
    }
    if !failures.is_empty() {
        return ValidityReport { failures, k3: None };
    }
    WeightedBasket::new(basket, p2, chi).validate(opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wb(text: &str, p2: i64, chi: i64) -> WeightedBasket {
        WeightedBasket::new(Basket::parse(text).unwrap(), p2, chi)
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_pair(1, 2).unwrap(), Pair { b: 1, r: 2 });
        assert_eq!(normalize_pair(5, 7).unwrap(), Pair { b: 2, r: 7 });
        let err = normalize_pair(4, 6).unwrap_err();
        assert!(err.to_string().contains("(4,6)"), "{err}");
        assert!(normalize_pair(1, 1).is_err());
        assert!(normalize_pair(0, 5).is_err());
        assert!(normalize_pair(5, 5).is_err());
        assert!(normalize_pair(-1, 5).is_err());
    }

    #[test]
    fn local_term_examples() {
        let p = |b, r| normalize_pair(b, r).unwrap();
        assert_eq!(l_pair(p(1, 2), 2), Rational::new(1, 4));
        assert_eq!(l_pair(p(2, 5), 3), Rational::from_int(1));
        assert_eq!(l_pair(p(1, 4), 6), Rational::new(13, 8));
        assert_eq!(l_pair(p(3, 7), 1), Rational::zero());
    }

    #[test]
    fn golden_volumes() {
        assert_eq!(wb("4x(1,2),(3,7),3x(2,5),(1,3)", 1, 1).k3(), Rational::new(2, 105));
        assert_eq!(wb("7x(1,2),(3,7),2x(1,3),(2,7)", 1, 1).k3(), Rational::new(1, 42));
        assert_eq!(wb("7x(1,2),2x(2,5),2x(1,3),(1,4)", 1, 1).k3(), Rational::new(1, 60));
    }

    #[test]
    fn b5_plurigenera() {
        let b5 = wb("7x(1,2),2x(2,5),2x(1,3),(1,4)", 1, 1);
        assert_eq!(b5.plurigenus(2), Rational::from_int(1));
        assert_eq!(b5.plurigenus(5), Rational::from_int(2));
        assert_eq!(b5.plurigenus(6), Rational::from_int(3));
        assert_eq!(b5.plurigenus(7), Rational::from_int(3));
    }

    #[test]
    fn cartier_examples() {
        assert_eq!(Basket::parse("7x(1,2),2x(2,5),2x(1,3),(1,4)").unwrap().cartier_index(), 60);
        assert_eq!(Basket::new().cartier_index(), 1);
        assert_eq!(Basket::parse("(3,7),(2,5)").unwrap().cartier_index(), 35);
    }

    #[test]
    fn validate_examples() {
        let r = wb("7x(1,2),2x(2,5),2x(1,3),(1,4)", 1, 1).validate(&ValidateOptions::default());
        assert!(r.is_valid());
        assert_eq!(r.k3, Some(Rational::new(1, 60)));

        let r = wb("(1,2)", 0, 0).validate(&ValidateOptions::default());
        assert_eq!(
            r.failures,
            vec![Failure::NonPositiveK3 {
                k3: Rational::new(-1, 2)
            }]
        );

        let terms = parse_terms("(2,4)").unwrap();
        let r = validate_terms(&terms, 1, 1, &ValidateOptions::default());
        assert!(matches!(r.failures[..], [Failure::InvalidPair { b: 2, r: 4, .. }]));
        assert_eq!(r.k3, None);
    }

    #[test]
    fn empty_basket_is_smooth() {
        let w = wb("", 0, 1);
        assert_eq!(w.k3(), Rational::from_int(6));
        assert_eq!(w.plurigenus(2), Rational::zero());
        // 3·2·5/12 · 6 − 5 = 10
        assert_eq!(w.plurigenus(3), Rational::from_int(10));
    }

    #[test]
    fn grammar() {
        let b = Basket::parse(" 2 x ( 2 , 5 ) ,(1,2), 3x(1,2) ,(5,7)").unwrap();
        assert_eq!(b.to_string(), "4x(1,2),2x(2,5),(2,7)");
        assert_eq!(Basket::parse("").unwrap(), Basket::new());
        assert_eq!(Basket::parse("   ").unwrap(), Basket::new());

        let err = Basket::parse("(1,2),,(1,3)").unwrap_err();
        assert!(matches!(err, Error::Parse { pos: 6, .. }), "{err:?}");
        let err = Basket::parse("0x(1,2)").unwrap_err();
        assert!(matches!(err, Error::Parse { pos: 0, .. }), "{err:?}");
        assert!(Basket::parse("(1,2").is_err());
        assert!(Basket::parse("3(1,2)").is_err());
        assert!(Basket::parse("(1,2) (1,3)").is_err());
        assert!(matches!(Basket::parse("(2,4)"), Err(Error::InvalidPair { .. })));
    }
}
