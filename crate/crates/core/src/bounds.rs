//! Numeric side of the pluricanonical birationality criterion.
//!
//! Inputs are lower bounds `μ`, `β`, `ξ` supplied by the caller; every
//! function here only does the arithmetic that turns such bounds into better
//! bounds or into a level `m` at which the criterion's numeric conditions
//! hold. The geometric hypotheses behind each rule are listed in
//! [`ASSUMPTIONS`] and are never checked.

use std::fmt;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Hypotheses taken on trust by every computation in this module.
pub const ASSUMPTIONS: &[&str] = &[
    "mu, beta, xi are valid lower bounds for the given fibration data",
    "the moving curve C has canonical degree deg K_C = 2g(C) - 2",
    "the birationality criterion's separation hypotheses hold at the reported level",
    "r_X * xi is an integer whenever a Cartier index is supplied",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinementState {
    pub m0: u32,
    pub mu: Rational,
    pub beta: Rational,
    pub xi_lb: Rational,
    pub deg_kc: i64,
    /// Cartier index used to round `ξ` up to the grid `1/r_X`.
    pub rx: Option<u64>,
    /// `m1` with `M_{m1}|_S ≥ G`; enables the second distinguishing test.
    #[serde(default)]
    pub m1: Option<u32>,
    /// `ζ(m0)`; only used together with `m1`.
    #[serde(default = "Rational::one")]
    pub zeta: Rational,
}

impl RefinementState {
    /// State seeded with `ξ ≥ deg K_C / (1 + 1/μ + 1/β)`.
    pub fn seeded(m0: u32, mu: Rational, beta: Rational, deg_kc: i64) -> Result<Self> {
        let s = RefinementState {
            m0,
            xi_lb: Rational::one(),
            mu,
            beta,
            deg_kc,
            rx: None,
            m1: None,
            zeta: Rational::one(),
        };
        s.check()?;
        let xi_lb = seed_xi(&s.mu, &s.beta, s.deg_kc);
        Ok(RefinementState { xi_lb, ..s })
    }

    pub fn check(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::OutOfRange(what.to_string()));
        if self.m0 == 0 {
            return bad("m0 must be positive");
        }
        if !self.mu.is_positive() || !self.beta.is_positive() || !self.xi_lb.is_positive() {
            return bad("mu, beta and xi must be positive");
        }
        if self.deg_kc <= 0 || self.deg_kc % 2 != 0 {
            return bad("deg K_C must be a positive even integer");
        }
        if self.rx == Some(0) {
            return bad("r_X must be positive");
        }
        if self.m1 == Some(0) || !self.zeta.is_positive() {
            return bad("m1 and zeta must be positive");
        }
        Ok(())
    }
}

/// `deg K_C / (1 + 1/μ + 1/β)`.
pub fn seed_xi(mu: &Rational, beta: &Rational, deg_kc: i64) -> Rational {
    Rational::from_int(deg_kc) / (Rational::one() + mu.recip() + beta.recip())
}

/// `α(m) = (m − 1 − 1/μ − 1/β)·ξ`.
pub fn alpha(m: u32, s: &RefinementState) -> Rational {
    (Rational::from_int(m as i64 - 1) - s.mu.recip() - s.beta.recip()) * &s.xi_lb
}

/// `⌈q·r⌉ / r`.
pub fn quantize_up(q: &Rational, r: u64) -> Rational {
    assert!(r > 0, "grid denominator must be positive");
    let r = Rational::from_bigint(BigInt::from(r));
    Rational::from_bigint((q * &r).ceil()) / r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// `mξ ≥ deg K_C + ⌈α(m)⌉`, valid when `α(m) > 1`.
    CurveDegree,
    /// Rounding up to the `1/r_X` grid.
    Quantize,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::CurveDegree => "curve-degree",
            Rule::Quantize => "quantize",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub rule: Rule,
    pub m: Option<u32>,
    pub old: Rational,
    pub new: Rational,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.m {
            Some(m) => write!(f, "{} m={}: ξ ≥ {} (was {})", self.rule, m, self.new, self.old),
            None => write!(f, "{}: ξ ≥ {} (was {})", self.rule, self.new, self.old),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Refinement {
    pub state: RefinementState,
    pub transcript: Vec<Step>,
    pub rounds: u32,
    /// The round limit stopped the iteration before a fixpoint.
    pub capped: bool,
}

pub const DEFAULT_ROUND_LIMIT: u32 = 1000;

/// Iterates the curve-degree rule over `m_range` (and quantization when
/// `r_X` is known) until `ξ` stops improving.
///
/// Each round takes the best bound over the range; ties go to the smallest
/// `m`. Only rounds that change `ξ` are logged.
pub fn refine_xi(s: &RefinementState, m_range: RangeInclusive<u32>) -> Refinement {
    refine_xi_capped(s, m_range, DEFAULT_ROUND_LIMIT)
}

pub fn refine_xi_capped(s: &RefinementState, m_range: RangeInclusive<u32>, max_rounds: u32) -> Refinement {
    let mut state = s.clone();
    let mut transcript = Vec::new();
    let quantize = |state: &mut RefinementState, transcript: &mut Vec<Step>| {
        if let Some(rx) = state.rx {
            let q = quantize_up(&state.xi_lb, rx);
            if q != state.xi_lb {
                transcript.push(Step {
                    rule: Rule::Quantize,
                    m: None,
                    old: state.xi_lb.clone(),
                    new: q.clone(),
                });
                state.xi_lb = q;
            }
        }
    };
    quantize(&mut state, &mut transcript);
    let mut rounds = 0;
    loop {
        if rounds == max_rounds {
            return Refinement {
                state,
                transcript,
                rounds,
                capped: true,
            };
        }
        rounds += 1;
        let best = m_range
            .clone()
            .filter(|&m| m >= 1)
            .filter_map(|m| {
                let a = alpha(m, &state);
                (a > Rational::one()).then(|| {
                    let bound = (Rational::from_bigint(a.ceil()) + state.deg_kc) / m as i64;
                    (bound, m)
                })
            })
            .fold(None::<(Rational, u32)>, |acc, (b, m)| match acc {
                Some((ab, am)) if ab >= b => Some((ab, am)),
                _ => Some((b, m)),
            });
        match best {
            Some((bound, m)) if bound > state.xi_lb => {
                transcript.push(Step {
                    rule: Rule::CurveDegree,
                    m: Some(m),
                    old: state.xi_lb.clone(),
                    new: bound.clone(),
                });
                state.xi_lb = bound;
                quantize(&mut state, &mut transcript);
            }
            _ => {
                return Refinement {
                    state,
                    transcript,
                    rounds,
                    capped: false,
                }
            }
        }
    }
}

/// Least integer strictly greater than `q`.
fn above(q: &Rational) -> i64 {
    (q.floor() + BigInt::from(1)).to_i64().expect("threshold fits in i64")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelDetail {
    pub level: u32,
    /// Least `m` with `α(m) > 2`.
    pub alpha_bound: u32,
    /// `m0 + 2`.
    pub separation_bound: u32,
    /// Least `m > 1/μ + 2/β + 1`.
    pub distinguish_bound: u32,
    /// Least `m > m0/ζ + m1 + 1`, when `m1` is known.
    pub distinguish_bound_m1: Option<u32>,
}

/// Least `m` meeting `α(m) > 2`, `m ≥ m0 + 2` and one of the two
/// distinguishing conditions.
pub fn birational_level(s: &RefinementState) -> u32 {
    birational_level_detail(s).level
}

pub fn birational_level_detail(s: &RefinementState) -> LevelDetail {
    let clamp = |v: i64| v.max(1) as u32;
    let one = Rational::one();
    let alpha_bound = clamp(above(&(&one + &s.mu.recip() + s.beta.recip() + (s.xi_lb.recip() * 2))));
    let separation_bound = s.m0 + 2;
    let distinguish_bound = clamp(above(&(s.mu.recip() + (s.beta.recip() * 2) + 1)));
    let distinguish_bound_m1 = s
        .m1
        .map(|m1| clamp(above(&(Rational::from_int(s.m0 as i64) / &s.zeta + (m1 as i64 + 1)))));
    let distinguish = distinguish_bound_m1.map_or(distinguish_bound, |d| d.min(distinguish_bound));
    LevelDetail {
        level: alpha_bound.max(separation_bound).max(distinguish),
        alpha_bound,
        separation_bound,
        distinguish_bound,
        distinguish_bound_m1,
    }
}

/// `K³ ≥ μβξ / m0`.
pub fn k3_lower(s: &RefinementState) -> Rational {
    &(&s.mu * &s.beta) * &s.xi_lb / s.m0 as i64
}

/// `ζ / (m0 + ζ)`.
pub fn kawamata_ratio(zeta: &Rational, m0: u32) -> Rational {
    zeta / &(zeta + m0 as i64)
}

/// `(l1 + j1) / (n1 + j1)`.
pub fn k1_ratio(n1: i64, j1: i64, l1: i64) -> Rational {
    Rational::new(l1 + j1, n1 + j1)
}

/// Result of a conditional bound update.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Update {
    pub value: Rational,
    /// `false` when the rule's precondition failed and `value` is the input.
    pub applied: bool,
}

impl Update {
    fn noop(xi: &Rational) -> Self {
        Update {
            value: xi.clone(),
            applied: false,
        }
    }
}

/// `max(ξ, (⌈nξ⌉ + 2)/(n + m1 + 1), 2/(m1 + 1))` when `nξ > 1`.
pub fn x1_update(m1: u32, n: u32, xi: &Rational) -> Update {
    if xi * n as i64 <= Rational::one() {
        return Update::noop(xi);
    }
    let step = (Rational::from_bigint((xi * n as i64).ceil()) + 2) / (n as i64 + m1 as i64 + 1);
    let floor = Rational::new(2, m1 as i64 + 1);
    Update {
        value: xi.clone().max(step).max(floor),
        applied: true,
    }
}

/// Optional rule `(n+1)ξ ≥ 2 + δ + ⌈(n − m1 − 1/β)ξ⌉`, for `n > m1 + 1/β`
/// (or `n ≥ m1 + 1/β` when the restricted divisor is big).
pub fn x1_1_update(m1: u32, n: u32, beta: &Rational, delta: &Rational, xi: &Rational, big: bool) -> Update {
    let gap = Rational::from_int(n as i64 - m1 as i64) - beta.recip();
    let ok = if big { !gap.is_negative() } else { gap.is_positive() };
    if !ok {
        return Update::noop(xi);
    }
    let rhs = Rational::from_bigint((gap * xi).ceil()) + delta + 2;
    Update {
        value: xi.clone().max(rhs / (n as i64 + 1)),
        applied: true,
    }
}

/// Least `n ≥ 1` with `nξ > 2` and `n ≥ m2 − m1`; the level is `n + m1 + 1`.
pub fn x1_birational_n(m1: u32, m2: u32, xi: &Rational) -> u32 {
    assert!(xi.is_positive());
    let n = above(&(xi.recip() * 2)).max(m2 as i64 - m1 as i64).max(1);
    n as u32
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdInput {
    pub mu: Rational,
    pub beta: Rational,
    pub xi: Rational,
    pub m1: u32,
    pub m2: u32,
    pub j: u32,
    pub delta1: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdCase {
    /// `δ1 ≤ 2j`.
    Small,
    /// `δ1 > 2j`.
    Large,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Threshold {
    pub case: ThresholdCase,
    pub n: u32,
    /// `n + 1`.
    pub level: u32,
}

/// Least `n` from the two-case bound, with `φ_{n+1}` the reported level.
///
/// * `δ1 ≤ 2j`: `n ≥ max{m2, ⌊(1/ξ)(2 − δ1/j) + 1/μ + m1/j⌋ + 1}`
/// * `δ1 > 2j`: `n ≥ max{m2, ⌊1/μ + 2m1/δ1 + (1/β)(1 − 2j/δ1)⌋ + 1}`
pub fn x2_threshold(t: &ThresholdInput) -> Result<Threshold> {
    if !t.mu.is_positive() || !t.beta.is_positive() || !t.xi.is_positive() || !t.delta1.is_positive() || t.j == 0 {
        return Err(Error::OutOfRange("mu, beta, xi, delta1 and j must be positive".into()));
    }
    let j = t.j as i64;
    let m1 = t.m1 as i64;
    let (case, inner) = if t.delta1 <= Rational::from_int(2 * j) {
        let v = t.xi.recip() * (Rational::from_int(2) - (&t.delta1 / j)) + t.mu.recip() + Rational::new(m1, j);
        (ThresholdCase::Small, v)
    } else {
        let v = t.mu.recip()
            + (Rational::from_int(2 * m1) / &t.delta1)
            + t.beta.recip() * (Rational::one() - (Rational::from_int(2 * j) / &t.delta1));
        (ThresholdCase::Large, v)
    };
    let n = above(&inner).max(t.m2 as i64).max(0) as u32;
    Ok(Threshold {
        case,
        n,
        level: n + 1,
    })
}

/// `P_m` of a surface with `K² = 1`, `p_g = 2`: `m(m−1)/2 + 3`.
pub fn surface_pm_12(m: u32) -> i64 {
    assert!(m >= 2);
    let m = m as i64;
    m * (m - 1) / 2 + 3
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p, d)
    }

    fn state(m0: u32, mu: Rational, beta: Rational, xi: Rational, deg_kc: i64) -> RefinementState {
        RefinementState {
            m0,
            mu,
            beta,
            xi_lb: xi,
            deg_kc,
            rx: None,
            m1: None,
            zeta: Rational::one(),
        }
    }

    #[test]
    fn alpha_values() {
        let s = state(5, q(1, 5), q(1, 5), q(4, 11), 4);
        assert_eq!(alpha(14, &s), q(12, 11));
        let s = state(5, q(1, 5), q(1, 5), q(3, 7), 4);
        assert_eq!(alpha(16, &s), q(15, 7));
        let s = state(1, q(1, 1), q(1, 1), q(1, 1), 2);
        assert_eq!(alpha(3, &s), Rational::zero());
    }

    #[test]
    fn seed_and_first_step() {
        let s = RefinementState::seeded(5, q(1, 5), q(1, 5), 4).unwrap();
        assert_eq!(s.xi_lb, q(4, 11));
        let r = refine_xi(&s, 2..=15);
        assert_eq!(r.state.xi_lb, q(3, 7));
        assert_eq!(r.transcript.len(), 1);
        assert_eq!(r.transcript[0].m, Some(14));
        assert!(!r.capped);
    }

    #[test]
    fn wider_range_keeps_improving() {
        let s = RefinementState::seeded(5, q(1, 5), q(1, 5), 4).unwrap();
        let r = refine_xi(&s, 2..=20);
        assert_eq!(r.transcript[0].new, q(3, 7));
        assert_eq!(r.transcript[0].m, Some(14));
        assert_eq!(r.state.xi_lb, q(4, 9));
        // fixpoint
        let again = refine_xi(&r.state, 2..=20);
        assert!(again.transcript.is_empty());
    }

    #[test]
    fn quantization_only() {
        let mut s = state(4, q(1, 4), q(1, 5), q(2, 7), 2);
        s.rx = Some(60);
        let r = refine_xi(&s, 2..=10);
        assert_eq!(r.state.xi_lb, q(3, 10));
        assert_eq!(r.transcript.len(), 1);
        assert_eq!(r.transcript[0].rule, Rule::Quantize);
    }

    #[test]
    fn nothing_applies() {
        let s = state(1, q(1, 1), q(1, 1), q(2, 3), 2);
        let r = refine_xi(&s, 2..=4);
        assert_eq!(r.state, s);
        assert!(r.transcript.is_empty());
    }

    #[test]
    fn round_cap_is_reported() {
        let s = RefinementState::seeded(5, q(1, 5), q(1, 5), 4).unwrap();
        let r = refine_xi_capped(&s, 2..=20, 1);
        assert!(r.capped);
        assert_eq!(r.state.xi_lb, q(3, 7));
    }

    #[test]
    fn quantize_examples() {
        assert_eq!(quantize_up(&q(2, 7), 60), q(3, 10));
        assert_eq!(quantize_up(&q(2, 3), 70), q(47, 70));
        assert_eq!(quantize_up(&q(1, 2), 2), q(1, 2));
    }

    #[test]
    fn levels() {
        let mut s = state(5, q(1, 5), q(1, 5), q(3, 7), 4);
        assert_eq!(birational_level(&s), 17);
        s.m1 = Some(5);
        assert_eq!(birational_level(&s), 16);
        assert_eq!(birational_level(&state(5, q(2, 5), q(2, 7), q(2, 7), 2)), 15);
        assert_eq!(birational_level(&state(1, q(2, 1), q(2, 3), q(1, 1), 2)), 6);
    }

    #[test]
    fn volume_bounds_and_ratios() {
        assert_eq!(k3_lower(&state(4, q(1, 1), q(1, 5), q(1, 3), 2)), q(1, 60));
        assert_eq!(k3_lower(&state(1, q(1, 1), q(1, 1), q(1, 1), 2)), q(1, 1));
        assert_eq!(k3_lower(&state(5, q(2, 5), q(2, 7), q(2, 7), 2)), q(8, 1225));
        assert_eq!(kawamata_ratio(&q(2, 1), 1), q(2, 3));
        assert_eq!(kawamata_ratio(&q(1, 1), 5), q(1, 6));
        assert_eq!(kawamata_ratio(&q(2, 1), 5), q(2, 7));
        assert_eq!(k1_ratio(2, 2, 1), q(3, 4));
        assert_eq!(k1_ratio(1, 1, 1), q(1, 1));
        assert_eq!(k1_ratio(5, 2, 1), q(3, 7));
    }

    #[test]
    fn pencil_updates() {
        assert_eq!(x1_update(6, 4, &q(2, 7)).value, q(4, 11));
        assert_eq!(x1_update(7, 4, &q(2, 7)).value, q(1, 3));
        let u = x1_update(6, 1, &q(1, 2));
        assert!(!u.applied);
        assert_eq!(u.value, q(1, 2));
        assert_eq!(x1_birational_n(6, 6, &q(2, 5)), 6);
        assert_eq!(x1_birational_n(7, 7, &q(1, 3)), 7);
        assert_eq!(x1_birational_n(1, 1, &q(3, 1)), 1);
    }

    #[test]
    fn two_curve_thresholds() {
        let t = |mu, beta, xi, m1, m2, j, d| ThresholdInput {
            mu,
            beta,
            xi,
            m1,
            m2,
            j,
            delta1: d,
        };
        let r = x2_threshold(&t(q(1, 4), q(1, 5), q(2, 7), 7, 0, 1, q(2, 1))).unwrap();
        assert_eq!((r.case, r.level), (ThresholdCase::Small, 13));
        let one = Rational::one();
        let r = x2_threshold(&t(one.clone(), one.clone(), one.clone(), 1, 1, 1, q(2, 1))).unwrap();
        assert_eq!((r.case, r.level), (ThresholdCase::Small, 4));
        let r = x2_threshold(&t(one.clone(), one.clone(), one.clone(), 1, 1, 1, q(1, 1))).unwrap();
        assert_eq!((r.case, r.level), (ThresholdCase::Small, 5));
        let r = x2_threshold(&t(one.clone(), one.clone(), one.clone(), 2, 0, 1, q(4, 1))).unwrap();
        assert_eq!((r.case, r.level), (ThresholdCase::Large, 4));
    }

    #[test]
    fn surface_plurigenera() {
        assert_eq!(surface_pm_12(2), 4);
        assert_eq!(surface_pm_12(3), 6);
        assert_eq!(surface_pm_12(6), 18);
    }

    #[test]
    fn state_checks() {
        assert!(RefinementState::seeded(5, q(1, 5), q(1, 5), 3).is_err());
        assert!(RefinementState::seeded(0, q(1, 5), q(1, 5), 4).is_err());
        assert!(RefinementState::seeded(5, q(-1, 5), q(1, 5), 4).is_err());
    }
}
