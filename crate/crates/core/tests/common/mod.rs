//! Independent oracles: plain i128 fractions and direct summation of the
//! local terms, sharing no code with the library's arithmetic.
#![allow(dead_code)]

use wbasket::{Basket, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Frac {
    pub n: i128,
    pub d: i128,
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl Frac {
    pub fn new(n: i128, d: i128) -> Frac {
        assert!(d != 0);
        let g = gcd(n, d).max(1) * d.signum();
        Frac { n: n / g, d: d / g }
    }
    pub fn int(n: i128) -> Frac {
        Frac { n, d: 1 }
    }
    pub fn add(self, o: Frac) -> Frac {
        Frac::new(self.n * o.d + o.n * self.d, self.d * o.d)
    }
    pub fn sub(self, o: Frac) -> Frac {
        Frac::new(self.n * o.d - o.n * self.d, self.d * o.d)
    }
    pub fn mul(self, o: Frac) -> Frac {
        Frac::new(self.n * o.n, self.d * o.d)
    }
    pub fn to_rational(self) -> Rational {
        Rational::new(self.n as i64, self.d as i64)
    }
}

/// Raw `(b, r)` list of a basket with multiplicities expanded.
pub fn points(b: &Basket) -> Vec<(i128, i128)> {
    b.entries()
        .flat_map(|(p, k)| std::iter::repeat_n((p.b() as i128, p.r() as i128), k as usize))
        .collect()
}

/// `Σ_{j=1}^{m-1} \bar{jb}(r − \bar{jb}) / 2r` by direct summation.
pub fn local(b: i128, r: i128, m: u32) -> Frac {
    let mut acc = Frac::int(0);
    for j in 1..m as i128 {
        let v = (j * b).rem_euclid(r);
        acc = acc.add(Frac::new(v * (r - v), 2 * r));
    }
    acc
}

/// `K³` solved from Riemann-Roch at `m = 2`:
/// `P2 = K³/2 − 3χ + Σ l_Q(2)`.
pub fn k3(pts: &[(i128, i128)], p2: i64, chi: i64) -> Frac {
    let l2 = pts.iter().fold(Frac::int(0), |a, &(b, r)| a.add(local(b, r, 2)));
    Frac::int(2).mul(Frac::int(p2 as i128 + 3 * chi as i128).sub(l2))
}

/// `χ(mK) = m(m−1)(2m−1)/12 · K³ + (1−2m)χ + Σ l_Q(m)`.
pub fn plurigenus(pts: &[(i128, i128)], p2: i64, chi: i64, m: u32) -> Frac {
    let mm = m as i128;
    let poly = Frac::new(mm * (mm - 1) * (2 * mm - 1), 12).mul(k3(pts, p2, chi));
    let lin = Frac::int((1 - 2 * mm) * chi as i128);
    pts.iter()
        .fold(poly.add(lin), |a, &(b, r)| a.add(local(b, r, m)))
}

/// Every basket reachable by merging two points with `|b1 r2 − b2 r1| = 1`,
/// by exhaustive search over expanded point lists.
pub fn packing_closure(start: &Basket) -> std::collections::BTreeSet<Basket> {
    let mut seen = std::collections::BTreeSet::new();
    let mut stack = vec![start.clone()];
    while let Some(b) = stack.pop() {
        if !seen.insert(b.clone()) {
            continue;
        }
        let pts = points(&b);
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let ((b1, r1), (b2, r2)) = (pts[i], pts[j]);
                if (b1 * r2 - b2 * r1).abs() != 1 {
                    continue;
                }
                let mut rest: Vec<(i64, i64)> = pts
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != i && k != j)
                    .map(|(_, &(b, r))| (b as i64, r as i64))
                    .collect();
                rest.push(((b1 + b2) as i64, (r1 + r2) as i64));
                let next = Basket::from_triples(rest.into_iter().map(|(b, r)| (1, b, r))).unwrap();
                stack.push(next);
            }
        }
    }
    seen
}

pub fn num_gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        num_gcd(b, a % b)
    }
}

use proptest::prelude::*;
use wbasket::WeightedBasket;

/// Coprime `(b, r)` with `2 ≤ r ≤ 20`, `1 ≤ b < r`, not normalized.
pub fn raw_pair() -> impl Strategy<Value = (u32, u32)> {
    (2u32..=20)
        .prop_flat_map(|r| (1..r, Just(r)))
        .prop_filter("coprime", |&(b, r)| num_gcd(b, r) == 1)
}

pub fn basket(max_points: usize) -> impl Strategy<Value = Basket> {
    prop::collection::vec(raw_pair(), 0..=max_points)
        .prop_map(|v| Basket::from_triples(v.into_iter().map(|(b, r)| (1, b as i64, r as i64))).unwrap())
}

pub fn weighted(max_points: usize) -> impl Strategy<Value = WeightedBasket> {
    (basket(max_points), 0i64..=6, -2i64..=3).prop_map(|(b, p2, chi)| WeightedBasket::new(b, p2, chi))
}
