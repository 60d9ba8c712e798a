//! Scenario searches: `B^(5)` candidates from a plurigenus box, then their
//! filtered packing descendants.
//!
//! A run has two stages. The raw stage lists every feasible `B^(5)` in the
//! configured box with `K³` above the floor. The refined stage walks the
//! packing closure of each raw candidate, keeping `χ_3..χ_d` fixed, and
//! applies the index divisibility, plurigenus pins, integrality and
//! superadditivity checks to the final baskets. Every emitted candidate is
//! then re-checked from scratch by [`revalidate_raw`] / [`revalidate_refined`],
//! which share no code with the search.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::b5::{enumerate_b5, B5Ranges, B5Result, B5Search, IntRange, PlurigenusData};
use crate::basket::{Basket, WeightedBasket};
use crate::error::{Error, Result};
use crate::manifest::{FilterRecord, RunManifest};
use crate::packing::{search, DescendantFilter, SearchOptions};
use crate::rational::Rational;

/// Raw and refined counts within a factor of ten of this are "the same order".
pub const PG3_RAW_REFERENCE: usize = 500;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub chi_range: IntRange,
    /// Boxes for `P2..P6`.
    pub p_ranges: [IntRange; 5],
    /// Allowed values of `P_m` for `m ≥ 7`, checked on refined baskets.
    #[serde(default)]
    pub pm_pins: BTreeMap<u32, Vec<i64>>,
    /// Pin `σ5`; free up to its bound when absent.
    #[serde(default)]
    pub sigma5: Option<i64>,
    pub tail_r_max: u32,
    pub k3_floor: Rational,
    #[serde(default)]
    pub rx_divisor: Option<u64>,
    /// Refined baskets keep `χ_m = P_m` for `3 ≤ m ≤ consistency_depth`.
    pub consistency_depth: u32,
    /// Instances `(m, n)` of `P_{m+n} ≥ P_m + P_n` checked on refined baskets.
    #[serde(default)]
    pub superadditivity_pairs: Vec<(u32, u32)>,
    /// Refined baskets need `χ_m` a non-negative integer for `2 ≤ m ≤ depth`.
    pub integrality_depth: u32,
    #[serde(default)]
    pub max_pack_depth: Option<u32>,
    /// Source wording for individual settings, keyed by field name.
    #[serde(default)]
    pub quotes: BTreeMap<String, String>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.tail_r_max < 5 {
            return bad("tail_r_max must be at least 5");
        }
        if self.consistency_depth < 2 {
            return bad("consistency_depth must be at least 2");
        }
        if self.rx_divisor == Some(0) {
            return bad("rx_divisor must be positive");
        }
        if self.pm_pins.keys().any(|&m| m < 2) {
            return bad("plurigenus pins need m >= 2");
        }
        if self.superadditivity_pairs.iter().any(|&(m, n)| m < 2 || n < 2) {
            return bad("superadditivity pairs need m, n >= 2");
        }
        Ok(())
    }

    fn quote(&self, key: &str) -> Option<&str> {
        self.quotes.get(key).map(String::as_str)
    }

    pub fn filter_records(&self) -> Vec<FilterRecord> {
        let mut out = vec![FilterRecord::new("chi_range", self.chi_range, self.quote("chi_range"))];
        for (i, r) in self.p_ranges.iter().enumerate() {
            let key = format!("p{}_range", i + 2);
            let quote = self.quote(&key).or(self.quote("p_ranges"));
            out.push(FilterRecord::new(key, r, quote));
        }
        let sigma5 = match self.sigma5 {
            Some(s) => format!("pinned {s}"),
            None => "0 <= sigma5 <= 2chi - P3 + 2P5 - P6".into(),
        };
        out.push(FilterRecord::new("sigma5", sigma5, self.quote("sigma5")));
        out.push(FilterRecord::new("tail_r_max", self.tail_r_max, self.quote("tail_r_max")));
        out.push(FilterRecord::new("k3_floor", &self.k3_floor, self.quote("k3_floor")));
        if let Some(d) = self.rx_divisor {
            out.push(FilterRecord::new("rx_divisor", d, self.quote("rx_divisor")));
        }
        out.push(FilterRecord::new(
            "consistency_depth",
            self.consistency_depth,
            self.quote("consistency_depth"),
        ));
        for (m, vals) in &self.pm_pins {
            let key = format!("p{m}_pin");
            let text = vals.iter().map(i64::to_string).collect::<Vec<_>>().join(",");
            out.push(FilterRecord::new(key.clone(), text, self.quote(&key)));
        }
        for (m, n) in &self.superadditivity_pairs {
            let key = format!("superadditivity_{m}_{n}");
            out.push(FilterRecord::new(
                key.clone(),
                format!("P{} >= P{m} + P{n}", m + n),
                self.quote(&key),
            ));
        }
        out.push(FilterRecord::new(
            "integrality_depth",
            self.integrality_depth,
            self.quote("integrality_depth"),
        ));
        if let Some(d) = self.max_pack_depth {
            out.push(FilterRecord::new("max_pack_depth", d, None));
        }
        out
    }
}

/// Default search box for `p_g = 3`.
pub fn pg3_default() -> ScenarioConfig {
    let quotes = [
        ("chi_range", "χ(O_X) = −1 or −2"),
        (
            "p_ranges",
            "6 ≤ P_2(X) ≤ 8, P_3(X) ≤ 14, P_4(X) ≤ 25, P_5(X) ≤ 40, P_6(X) ≤ 63",
        ),
        ("p2_range", "6 ≤ P_2(X) ≤ 8"),
        ("p3_range", "P_3(X) ≤ 14"),
        ("p4_range", "P_4(X) ≤ 25"),
        ("p5_range", "P_5(X) ≤ 40"),
        ("p6_range", "P_6(X) ≤ 63"),
        ("sigma5", "σ_5 ≤ 2χ(O_X) − P_3 + 2P_5 − P_6"),
        ("k3_floor", "K_X^3 ≥ 4/3"),
        (
            "rx_divisor",
            "r_X is 3-divisible, which applies to the basket B_X rather than B^(5)",
        ),
    ];
    ScenarioConfig {
        name: "pg3".into(),
        chi_range: IntRange::new(-2, -1),
        p_ranges: [
            IntRange::new(6, 8),
            IntRange::new(0, 14),
            IntRange::new(0, 25),
            IntRange::new(0, 40),
            IntRange::new(0, 63),
        ],
        pm_pins: BTreeMap::new(),
        sigma5: None,
        tail_r_max: 30,
        k3_floor: Rational::new(4, 3),
        rx_divisor: Some(3),
        consistency_depth: 6,
        superadditivity_pairs: Vec::new(),
        integrality_depth: 12,
        max_pack_depth: None,
        quotes: quotes.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
    }
}

/// The three `p_g = 1` sub-cases with `χ = 1`, `P2 = P3 = 1`, `P4 = 2`.
pub fn pg1_subcases() -> Vec<ScenarioConfig> {
    let case = |name: &str,
                p5: i64,
                p6: i64,
                pins: &[(u32, &[i64])],
                floor: Rational,
                quotes: &[(&str, &str)]| {
        let mut q: BTreeMap<String, String> = quotes.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        q.insert("superadditivity_4_2".into(), "P_6 ≥ P_4+P_2=3".into());
        q.insert("superadditivity_6_2".into(), "P_8 ≥ P_6+P_2=4".into());
        ScenarioConfig {
            name: name.into(),
            chi_range: IntRange::point(1),
            p_ranges: [1, 1, 2, p5, p6].map(IntRange::point),
            pm_pins: pins.iter().map(|(m, v)| (*m, v.to_vec())).collect(),
            sigma5: Some(0),
            tail_r_max: 30,
            k3_floor: floor,
            rx_divisor: None,
            consistency_depth: 6,
            superadditivity_pairs: vec![(4, 2), (6, 2)],
            integrality_depth: 8,
            max_pack_depth: None,
            quotes: q,
        }
    };
    vec![
        case(
            "pg1-p5-3",
            3,
            3,
            &[(7, &[4]), (8, &[4, 5])],
            Rational::new(1, 60),
            &[
                ("sigma5", "P_5=3 implies σ_5=0"),
                ("p6_range", "Thus P_6=P_5=3 and P_8=4,5"),
                ("p7_pin", "4 ≥ P_7=P_6+1"),
                ("p8_pin", "Thus P_6=P_5=3 and P_8=4,5"),
                ("k3_floor", "K_X^3 ≥ 1/(4·5) ξ ≥ 1/60"),
            ],
        ),
        case(
            "pg1-p6-p7-4",
            2,
            4,
            &[(7, &[4]), (8, &[5])],
            Rational::new(1, 60),
            &[
                ("sigma5", "P_6+σ_5 ≤ 5 ... Hence σ_5=0"),
                ("p5_range", "P_5=2 and P_6=P_7=4"),
                ("p6_range", "P_5=2 and P_6=P_7=4"),
                ("p7_pin", "P_5=2 and P_6=P_7=4"),
                ("p8_pin", "So we have P_8=5"),
                ("k3_floor", "We still have ξ ≥ 1/3 and so K_X^3 ≥ 1/60"),
            ],
        ),
        case(
            "pg1-p6-p7-3",
            2,
            3,
            &[(7, &[3])],
            Rational::new(1, 70),
            &[
                ("sigma5", "P_6+σ_5 ≤ 5 ... Hence σ_5=0"),
                ("p5_range", "P_5=2 and P_6=P_7=3"),
                ("p6_range", "P_5=2 and P_6=P_7=3"),
                ("p7_pin", "P_5=2 and P_6=P_7=3"),
                ("k3_floor", "we know ξ ≥ 2/7 and K_X^3 ≥ 1/70"),
            ],
        ),
    ]
}

/// A raw candidate in the flat `b5` output shape.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RawCandidate {
    pub chi: i64,
    pub p: [i64; 5],
    pub sigma5: i64,
    pub tail: BTreeMap<u32, u32>,
    pub coefficients: [i64; 4],
    pub basket: Basket,
    pub k3: Rational,
}

impl RawCandidate {
    pub fn new(d: &PlurigenusData, r: &B5Result) -> Self {
        RawCandidate {
            chi: d.chi,
            p: d.p,
            sigma5: d.sigma5,
            tail: d.tail.clone(),
            coefficients: r.coefficients,
            basket: r.basket.clone(),
            k3: r.k3.clone(),
        }
    }

    pub fn data(&self) -> PlurigenusData {
        PlurigenusData {
            chi: self.chi,
            p: self.p,
            sigma5: self.sigma5,
            tail: self.tail.clone(),
        }
    }

    pub fn weighted(&self) -> WeightedBasket {
        WeightedBasket::new(self.basket.clone(), self.p[0], self.chi)
    }
}

/// A refined basket with its volume and index, for output.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RefinedCandidate {
    pub basket: Basket,
    pub p2: i64,
    pub chi: i64,
    pub k3: Rational,
    pub rx: u64,
}

impl RefinedCandidate {
    pub fn new(wb: &WeightedBasket) -> Self {
        RefinedCandidate {
            basket: wb.basket.clone(),
            p2: wb.p2,
            chi: wb.chi,
            k3: wb.k3(),
            rx: wb.cartier_index(),
        }
    }

    pub fn weighted(&self) -> WeightedBasket {
        WeightedBasket::new(self.basket.clone(), self.p2, self.chi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub manifest: RunManifest,
    pub raw: Vec<RawCandidate>,
    pub refined: Vec<RefinedCandidate>,
}

struct Stage {
    raw: Vec<RawCandidate>,
    refined: BTreeSet<RefinedCandidate>,
    boundary_rejections: usize,
    visited: usize,
}

fn run_stage(cfg: &ScenarioConfig) -> Stage {
    let ranges = B5Ranges {
        chi: cfg.chi_range,
        p: cfg.p_ranges,
    };
    let mut b5 = B5Search::new(ranges);
    b5.tail_r_max = cfg.tail_r_max;
    b5.sigma5 = cfg.sigma5;
    b5.k3_floor = Some(cfg.k3_floor.clone());
    let raw_enum = enumerate_b5(&b5);
    let raw: Vec<RawCandidate> = raw_enum
        .candidates
        .iter()
        .map(|(d, r)| RawCandidate::new(d, r))
        .collect();

    let filter = DescendantFilter {
        k3_floor: Some(cfg.k3_floor.clone()),
        preserve_pm_upto: Some(cfg.consistency_depth),
        pm_pins: cfg
            .pm_pins
            .iter()
            .map(|(&m, v)| (m, v.iter().copied().collect()))
            .collect(),
        rx_divisor: cfg.rx_divisor,
        integrality_upto: Some(cfg.integrality_depth),
    };
    let opts = SearchOptions {
        max_depth: cfg.max_pack_depth,
        ..SearchOptions::default()
    };
    let per_raw: Vec<_> = raw
        .par_iter()
        .map(|c| {
            let s = search(&c.weighted(), &filter, &opts);
            let kept: Vec<_> = s
                .accepted
                .into_iter()
                .filter(|wb| check_superadditivity(wb, &cfg.superadditivity_pairs).passed())
                .collect();
            (kept, s.visited)
        })
        .collect();
    let mut refined = BTreeSet::new();
    let mut visited = 0;
    for (kept, v) in per_raw {
        refined.extend(kept.iter().map(RefinedCandidate::new));
        visited += v;
    }
    Stage {
        raw,
        refined,
        boundary_rejections: raw_enum.boundary_rejections,
        visited,
    }
}

fn finish(command: &str, cfgs: &[ScenarioConfig], stages: Vec<Stage>, started: Instant) -> ClassificationResult {
    let parameters = if cfgs.len() == 1 {
        serde_json::to_value(&cfgs[0]).expect("config serializes")
    } else {
        serde_json::to_value(cfgs).expect("config serializes")
    };
    let mut manifest = RunManifest::new(command, parameters);
    for cfg in cfgs {
        for mut f in cfg.filter_records() {
            if cfgs.len() > 1 {
                f.name = format!("{}.{}", cfg.name, f.name);
            }
            manifest.filters.push(f);
        }
    }
    let mut raw = Vec::new();
    let mut refined = BTreeSet::new();
    let (mut boundary, mut visited) = (0, 0);
    for s in stages {
        raw.extend(s.raw);
        refined.extend(s.refined);
        boundary += s.boundary_rejections;
        visited += s.visited;
    }
    manifest.count("raw", raw.len());
    manifest.count("refined", refined.len());
    manifest.count("packing_nodes_visited", visited);
    manifest.count("tail_cutoff_rejections", boundary);
    if boundary > 0 {
        manifest
            .notes
            .push(format!("{boundary} candidates need a tail index above tail_r_max"));
    }
    manifest.elapsed_ms = started.elapsed().as_millis();
    ClassificationResult {
        manifest,
        raw,
        refined: refined.into_iter().collect(),
    }
}

/// Runs one scenario.
pub fn run_scenario(cfg: &ScenarioConfig) -> ClassificationResult {
    let started = Instant::now();
    let stage = run_stage(cfg);
    finish(&format!("classify {}", cfg.name), std::slice::from_ref(cfg), vec![stage], started)
}

/// The `p_g = 1` run over the built-in sub-case table.
pub fn run_pg1() -> ClassificationResult {
    run_configs("classify pg1", &pg1_subcases())
}

/// Runs several sub-cases under one manifest; refined lists are merged.
pub fn run_configs(command: &str, cfgs: &[ScenarioConfig]) -> ClassificationResult {
    let started = Instant::now();
    let stages = cfgs.iter().map(run_stage).collect();
    finish(command, cfgs, stages, started)
}

/// The `p_g = 3` run; the raw count is compared with the published "about 500".
pub fn run_pg3(cfg: &ScenarioConfig) -> ClassificationResult {
    let mut res = run_configs("classify pg3", std::slice::from_ref(cfg));
    let n = res.raw.len();
    let same_order = n * 10 >= PG3_RAW_REFERENCE && n <= PG3_RAW_REFERENCE * 10;
    res.manifest.count("raw_reference", PG3_RAW_REFERENCE);
    res.manifest.count("raw_same_order_as_reference", same_order);
    res.manifest.notes.push(format!(
        "raw count {n} against a published figure of about {PG3_RAW_REFERENCE}; \
         the published filter set is not fully stated, so only the order of magnitude is compared"
    ));
    res
}

/// The five `p_g = 1` exceptional baskets, in reference order.
pub fn pg1_reference() -> Vec<RefinedCandidate> {
    serde_json::from_str(include_str!("../data/pg1_reference.json")).expect("bundled reference parses")
}

/// `P_{m1} ≤ j·m1(m1−1)/2 + 2j` for `j > 2m1 − 1`; `j` defaults to `2m1`.
pub fn pm_upper_bound(m1: u32, j: Option<u32>) -> Result<i64> {
    if m1 < 2 {
        return Err(Error::OutOfRange(format!("m1 = {m1} must be at least 2")));
    }
    let j = j.unwrap_or(2 * m1);
    if j < 2 * m1 {
        return Err(Error::OutOfRange(format!("j = {j} must exceed 2·m1 − 1 = {}", 2 * m1 - 1)));
    }
    let (m, j) = (m1 as i64, j as i64);
    Ok(j * m * (m - 1) / 2 + 2 * j)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuperadditivityCheck {
    pub m: u32,
    pub n: u32,
    pub pm: Rational,
    pub pn: Rational,
    pub pmn: Rational,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuperadditivityReport {
    pub checks: Vec<SuperadditivityCheck>,
}

impl SuperadditivityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Evaluates `P_{m+n} ≥ P_m + P_n` for each listed instance.
pub fn check_superadditivity(wb: &WeightedBasket, pairs: &[(u32, u32)]) -> SuperadditivityReport {
    let k3 = wb.k3();
    let checks = pairs
        .iter()
        .map(|&(m, n)| {
            assert!(m >= 2 && n >= 2, "superadditivity needs m, n >= 2");
            let pm = wb.plurigenus_with_k3(m, &k3);
            let pn = wb.plurigenus_with_k3(n, &k3);
            let pmn = wb.plurigenus_with_k3(m + n, &k3);
            let pass = pmn >= &pm + &pn;
            SuperadditivityCheck { m, n, pm, pn, pmn, pass }
        })
        .collect();
    SuperadditivityReport { checks }
}

/// From-scratch check of a raw candidate against the box, `σ5` and `K³`
/// constraints; returns the violated conditions.
pub fn revalidate_raw(cfg: &ScenarioConfig, c: &RawCandidate) -> Vec<String> {
    let mut bad = Vec::new();
    if !cfg.chi_range.contains(c.chi) {
        bad.push(format!("chi {} outside {}", c.chi, cfg.chi_range));
    }
    for (i, (v, r)) in c.p.iter().zip(&cfg.p_ranges).enumerate() {
        if !r.contains(*v) {
            bad.push(format!("P{} = {v} outside {r}", i + 2));
        }
    }
    let [_, p3, _, p5, p6] = c.p;
    let s = c.sigma5;
    if s < 0 || s > 2 * c.chi - p3 + 2 * p5 - p6 || cfg.sigma5.is_some_and(|pin| pin != s) {
        bad.push(format!("sigma5 = {s} not admissible"));
    }
    if c.tail.iter().any(|(&r, _)| r < 5 || r > cfg.tail_r_max) || c.tail.values().sum::<u32>() as i64 != s {
        bad.push("tail does not match sigma5 and the index cutoff".into());
    }
    // Rebuild the basket by hand from its multiplicities.
    let mut expect = Basket::new();
    let head = [(1, 2), (2, 5), (1, 3), (1, 4)];
    for (&(b, r), &n) in head.iter().zip(&c.coefficients) {
        if n < 0 {
            bad.push(format!("negative multiplicity for ({b},{r})"));
            return bad;
        }
        expect.add(crate::basket::Pair::new(b, r).expect("valid head pair"), n as u32);
    }
    for (&r, &k) in &c.tail {
        if let Ok(p) = crate::basket::Pair::new(1, r as i64) {
            expect.add(p, k);
        }
    }
    if expect != c.basket {
        bad.push("basket does not match its coefficients".into());
    }
    let wb = c.weighted();
    let k3 = wb.k3();
    if k3 != c.k3 {
        bad.push(format!("stored K3 {} differs from recomputed {k3}", c.k3));
    }
    if k3 < cfg.k3_floor {
        bad.push(format!("K3 {k3} below {}", cfg.k3_floor));
    }
    for m in 2..=6u32 {
        let v = wb.plurigenus(m);
        if v != Rational::from_int(c.p[m as usize - 2]) {
            bad.push(format!("chi_{m} = {v} differs from P{m} = {}", c.p[m as usize - 2]));
        }
    }
    bad
}

/// From-scratch check of a refined basket against every final-stage filter.
pub fn revalidate_refined(cfg: &ScenarioConfig, c: &RefinedCandidate) -> Vec<String> {
    let mut bad = Vec::new();
    let wb = c.weighted();
    let k3 = wb.k3();
    if k3 != c.k3 {
        bad.push(format!("stored K3 {} differs from recomputed {k3}", c.k3));
    }
    if k3 < cfg.k3_floor {
        bad.push(format!("K3 {k3} below {}", cfg.k3_floor));
    }
    let rx = crate::basket::cartier_index(&wb.basket);
    if rx != c.rx {
        bad.push(format!("stored r_X {} differs from {rx}", c.rx));
    }
    if let Some(d) = cfg.rx_divisor {
        if !rx.is_multiple_of(d) {
            bad.push(format!("r_X = {rx} not divisible by {d}"));
        }
    }
    if !cfg.chi_range.contains(c.chi) {
        bad.push(format!("chi {} outside {}", c.chi, cfg.chi_range));
    }
    for m in 2..=6u32.min(cfg.consistency_depth) {
        let v = wb.plurigenus(m);
        let r = cfg.p_ranges[m as usize - 2];
        if !v.is_integer() || !r.contains(v.to_i64().unwrap_or(i64::MIN)) {
            bad.push(format!("chi_{m} = {v} outside {r}"));
        }
    }
    for m in 2..=cfg.integrality_depth {
        let v = wb.plurigenus(m);
        if !v.is_integer() || v.is_negative() {
            bad.push(format!("chi_{m} = {v} is not a non-negative integer"));
        }
    }
    for (&m, allowed) in &cfg.pm_pins {
        let v = wb.plurigenus(m);
        if !allowed.iter().any(|&a| Rational::from_int(a) == v) {
            bad.push(format!("chi_{m} = {v} not in {allowed:?}"));
        }
    }
    for c in check_superadditivity(&wb, &cfg.superadditivity_pairs).checks {
        if !c.pass {
            bad.push(format!("P{} = {} < P{} + P{}", c.m + c.n, c.pmn, c.m, c.n));
        }
    }
    bad
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinedDiff {
    pub only_left: Vec<WeightedBasket>,
    pub only_right: Vec<WeightedBasket>,
    pub common: usize,
}

impl RefinedDiff {
    pub fn is_empty(&self) -> bool {
        self.only_left.is_empty() && self.only_right.is_empty()
    }
}

/// Symmetric difference of two refined lists, keyed by `(basket, P2, χ)`.
pub fn diff_refined(left: &[RefinedCandidate], right: &[RefinedCandidate]) -> RefinedDiff {
    let l: BTreeSet<WeightedBasket> = left.iter().map(RefinedCandidate::weighted).collect();
    let r: BTreeSet<WeightedBasket> = right.iter().map(RefinedCandidate::weighted).collect();
    RefinedDiff {
        only_left: l.difference(&r).cloned().collect(),
        only_right: r.difference(&l).cloned().collect(),
        common: l.intersection(&r).count(),
    }
}

/// Pulls the refined list out of any JSON result document: a full
/// classification result, a bare list, or `{"refined": [...]}`.
pub fn refined_from_json(text: &str) -> Result<Vec<RefinedCandidate>> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let list = match &v {
        serde_json::Value::Array(_) => v.clone(),
        serde_json::Value::Object(o) => o
            .get("refined")
            .cloned()
            .ok_or_else(|| Error::Config("no `refined` field".into()))?,
        _ => return Err(Error::Config("expected an object or a list".into())),
    };
    #[derive(Deserialize)]
    struct Entry {
        basket: Basket,
        p2: i64,
        chi: i64,
    }
    let entries: Vec<Entry> = serde_json::from_value(list).map_err(|e| Error::Config(e.to_string()))?;
    Ok(entries
        .into_iter()
        .map(|e| RefinedCandidate::new(&WeightedBasket::new(e.basket, e.p2, e.chi)))
        .collect())
}
